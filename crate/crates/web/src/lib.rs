//! Browser bindings for three small demos: Hit-and-Run samples from a
//! planar version space, an alpha risk-coverage sweep, and the mistake
//! budget tradeoff of relaxed enumeration.

use std::sync::Arc;

use abstain::datagen::{gen_random_table, GreedyAdversary};
use abstain::kwik::{run_protocol, FeedbackMode, MistakeBudgetState, RelaxedEnumeration};
use abstain::linsep::{analytic_arc_fraction_2d, hit_and_run_sample, vote_fraction, SamplerConfig, SeparatorVersionSpace};
use abstain::rng::{derive_seed, seeded};
use abstain::selective::alpha_interpolated_fit;
use abstain::{evaluate_selective, Error, Label};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Samples {
    samples: Vec<[f64; 2]>,
    volume_ratio: f64,
    /// Sampled and exact fraction of the version space labeling the query +1.
    sampled_fraction: f64,
    exact_fraction: f64,
}

#[derive(Serialize)]
struct AlphaPoint {
    alpha: f64,
    coverage: f64,
    risk: Option<f64>,
}

#[derive(Serialize)]
struct BudgetPoint {
    k: usize,
    mean_abstentions: f64,
    worst_abstentions: usize,
    worst_mistakes: usize,
    bound: f64,
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Separators `w` in the unit disk with `sign(w . x_i) = y_i`.
/// `points` is flat `[x0, y0, x1, y1, ...]`, `labels` holds +1 or -1.
pub fn sample_disk(points: &[f64], labels: &[i8], query: [f64; 2], num_samples: usize, seed: u64) -> abstain::Result<String> {
    if points.len() != 2 * labels.len() {
        return Err(Error::invalid("need two coordinates per label"));
    }
    let mut vs = SeparatorVersionSpace::new(2)?;
    let cfg = SamplerConfig {
        num_samples,
        seed,
        ..SamplerConfig::default()
    };
    let mut dirs = Vec::new();
    for (i, (x, &y)) in points.chunks(2).zip(labels).enumerate() {
        let y = Label::try_from(y).map_err(Error::invalid)?;
        let before = hit_and_run_sample(
            &vs,
            &SamplerConfig {
                seed: derive_seed(seed, i as u64 + 1),
                ..cfg
            },
        )?;
        vs.add_constraint(x, y, &before)?;
        dirs.push(vec![y.as_f64() * x[0], y.as_f64() * x[1]]);
    }
    let samples = hit_and_run_sample(&vs, &cfg)?;
    let out = Samples {
        sampled_fraction: vote_fraction(&samples, &query),
        exact_fraction: analytic_arc_fraction_2d(&dirs, &query)?,
        samples: samples.iter().map(|w| [w[0], w[1]]).collect(),
        volume_ratio: vs.volume_ratio(),
    };
    serde_json::to_string(&out).map_err(Error::from)
}

/// Pooled coverage and risk of the alpha-interpolated classifier for
/// `alpha = 0, 0.1, ..., 1` on random realizable tables.
pub fn alpha_curve(hypotheses: usize, points: usize, m: usize, trials: usize, seed: u64) -> abstain::Result<String> {
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let mut pooled = vec![(0usize, 0usize, 0usize); grid.len()];
    for t in 0..trials {
        let s = derive_seed(seed, t as u64);
        let table = gen_random_table(hypotheses, points, true, s)?;
        let train = table.sample(m, &mut seeded(derive_seed(s, 1)))?;
        let test = table.sample(200, &mut seeded(derive_seed(s, 2)))?;
        let class = Arc::new(table.class.clone());
        for (i, &a) in grid.iter().enumerate() {
            let c = alpha_interpolated_fit(class.clone(), &train, a, derive_seed(s, 3))?;
            let r = evaluate_selective(&c, &test)?;
            pooled[i].0 += r.predicted;
            pooled[i].1 += r.wrong;
            pooled[i].2 += r.total;
        }
    }
    let curve: Vec<AlphaPoint> = grid
        .iter()
        .zip(pooled)
        .map(|(&alpha, (p, w, n))| AlphaPoint {
            alpha,
            coverage: p as f64 / n.max(1) as f64,
            risk: (p > 0).then(|| w as f64 / p as f64),
        })
        .collect();
    serde_json::to_string(&curve).map_err(Error::from)
}

/// Abstentions of relaxed enumeration under the greedy adversary for
/// budgets `0..=max_k`, against `(k+1) |H|^(1/(k+1))`.
pub fn budget_curve(hypotheses: usize, points: usize, max_k: usize, trials: usize, seed: u64) -> abstain::Result<String> {
    let mut curve = Vec::new();
    for k in 0..=max_k {
        let (mut sum, mut worst_a, mut worst_m) = (0usize, 0usize, 0usize);
        for t in 0..trials {
            let table = gen_random_table(hypotheses, points, true, derive_seed(seed, t as u64))?;
            let class = Arc::new(table.class);
            let mut l = RelaxedEnumeration::new(class.clone(), k);
            let mut adv = GreedyAdversary::new(RelaxedEnumeration::new(class, k), FeedbackMode::LabelAlways);
            let tr = run_protocol(&mut l, &mut adv, 4 * points, FeedbackMode::LabelAlways, 0.0)?;
            sum += tr.abstentions();
            worst_a = worst_a.max(tr.abstentions());
            worst_m = worst_m.max(tr.mistakes());
        }
        curve.push(BudgetPoint {
            k,
            mean_abstentions: sum as f64 / trials.max(1) as f64,
            worst_abstentions: worst_a,
            worst_mistakes: worst_m,
            bound: MistakeBudgetState::abstention_bound(k, hypotheses),
        });
    }
    serde_json::to_string(&curve).map_err(Error::from)
}

#[wasm_bindgen(js_name = sampleDisk)]
pub fn sample_disk_js(points: &[f64], labels: &[i8], qx: f64, qy: f64, num_samples: usize, seed: u64) -> Result<String, JsError> {
    sample_disk(points, labels, [qx, qy], num_samples, seed).map_err(js)
}

#[wasm_bindgen(js_name = alphaCurve)]
pub fn alpha_curve_js(hypotheses: usize, points: usize, m: usize, trials: usize, seed: u64) -> Result<String, JsError> {
    alpha_curve(hypotheses, points, m, trials, seed).map_err(js)
}

#[wasm_bindgen(js_name = budgetCurve)]
pub fn budget_curve_js(hypotheses: usize, points: usize, max_k: usize, trials: usize, seed: u64) -> Result<String, JsError> {
    budget_curve(hypotheses, points, max_k, trials, seed).map_err(js)
}
