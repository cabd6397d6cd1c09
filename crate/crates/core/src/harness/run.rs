use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{aggregate, BoundCheck, BoundReport};
use super::config::{AdversaryKind, AlgorithmConfig, ExperimentConfig};
use super::output::{write_run, Cell, CsvRow};
use crate::datagen::{generate, GreedyAdversary, Instance, InstanceParams, InstanceSpec, RandomTable};
use crate::error::{Error, Result};
use crate::kwik::{
    hoeffding_sample_budget, run_protocol, CoinLearner, DieLearner, Enumeration, FeedbackMode,
    MbWrapper, MistakeBudgetState, NoiselessLinReg, NoisyLinReg, Query, RelaxedEnumeration,
    SequenceAdversary, VersionSpaceLearner,
};
use crate::linsep::{separability_measure, LinsepRelaxedEnumeration};
use crate::metrics::RiskCoveragePoint;
use crate::rng::{derive_seed, seeded, CoinStream};
use crate::selective::{
    alpha_interpolated_fit, css_abstain_bound, css_fit, relaxed_css_fit, wm_bounds, wm_fit,
    AffineConsistentSelective, AffineGridClass, SelectiveClassifier, WmBoundConstants, WmConfig,
};
use crate::types::{Decision, HypothesisSet, Label, LabeledSet, Outcome, Transcript};

/// Grid used by finite-class selective strategies on planar instances.
const DEFAULT_GRID: (usize, usize, [f64; 2]) = (32, 32, [-2.0, 2.0]);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial: usize,
    pub seed: u64,
    /// Online rounds played, or test points scored.
    pub rounds: usize,
    pub predictions: usize,
    pub mistakes: usize,
    pub abstentions: usize,
    pub ended_early: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub rounds: usize,
    pub predictions: usize,
    pub mistakes: usize,
    pub abstentions: usize,
}

impl Totals {
    /// Recounts totals from transcript rows.
    pub fn from_rows<'a>(rows: impl IntoIterator<Item = &'a CsvRow>) -> Self {
        let mut t = Totals::default();
        for r in rows {
            t.rounds += 1;
            match r.outcome {
                Outcome::Abstain => t.abstentions += 1,
                Outcome::Mistake => {
                    t.predictions += 1;
                    t.mistakes += 1;
                }
                Outcome::Correct => t.predictions += 1,
            }
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub algorithm: String,
    pub instance: String,
    pub seed: u64,
    pub trials: usize,
    pub totals: Totals,
    pub per_trial: Vec<TrialSummary>,
    pub bounds: Vec<BoundReport>,
    /// One point per trial for selective strategies.
    pub risk_coverage: Vec<RiskCoveragePoint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub summary: RunSummary,
    /// Transcript rows, one vector per trial.
    pub rows: Vec<Vec<CsvRow>>,
}

impl ExperimentOutput {
    pub fn write(&self, dir: &Path, summary_only: bool) -> Result<Vec<PathBuf>> {
        let rows: &[Vec<CsvRow>] = if summary_only { &[] } else { &self.rows };
        write_run(dir, rows, &self.summary)
    }

    pub fn violations(&self) -> Vec<&BoundReport> {
        self.summary.bounds.iter().filter(|b| b.violated()).collect()
    }
}

struct TrialRun {
    summary: TrialSummary,
    rows: Vec<CsvRow>,
    checks: Vec<BoundCheck>,
    point: Option<RiskCoveragePoint>,
}

/// Substream seeds of one trial.
#[derive(Clone, Copy)]
struct Seeds {
    trial: u64,
    instance: u64,
    stream: u64,
    learner: u64,
    test: u64,
}

impl Seeds {
    fn new(cfg: &ExperimentConfig, trial: usize) -> Self {
        let t = derive_seed(cfg.seed, trial as u64);
        Seeds {
            trial: t,
            instance: derive_seed(derive_seed(t, 0), cfg.instance.seed),
            stream: derive_seed(t, 1),
            learner: derive_seed(t, 2),
            test: derive_seed(t, 3),
        }
    }
}

/// Runs every trial of `cfg` on a pool of `cfg.workers` threads. Trials use
/// seeds derived from `(cfg.seed, trial)`, so the output does not depend on
/// the number of workers.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate("config")?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::invalid(e.to_string()))?;
    let runs: Vec<TrialRun> =
        pool.install(|| (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect::<Result<_>>())?;

    let checks: Vec<Vec<BoundCheck>> = runs.iter().map(|r| r.checks.clone()).collect();
    let mut totals = Totals::default();
    for r in &runs {
        totals.rounds += r.summary.rounds;
        totals.predictions += r.summary.predictions;
        totals.mistakes += r.summary.mistakes;
        totals.abstentions += r.summary.abstentions;
    }
    let risk_coverage = runs.iter().filter_map(|r| r.point.clone()).collect();
    let (per_trial, rows) = runs.into_iter().map(|r| (r.summary, r.rows)).unzip();
    Ok(ExperimentOutput {
        summary: RunSummary {
            algorithm: cfg.algorithm.name().into(),
            instance: cfg.instance.params.kind().into(),
            seed: cfg.seed,
            trials: cfg.trials,
            totals,
            per_trial,
            bounds: aggregate(&checks),
            risk_coverage,
        },
        rows,
    })
}

fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialRun> {
    let seeds = Seeds::new(cfg, trial);
    let mut run = match &cfg.algorithm {
        AlgorithmConfig::Enumeration | AlgorithmConfig::RelaxedEnumeration { .. } | AlgorithmConfig::MbWrapper => {
            finite_online(cfg, seeds)?
        }
        AlgorithmConfig::Coin { .. } | AlgorithmConfig::Die { .. } => estimator(cfg, seeds)?,
        AlgorithmConfig::NoiselessLinreg { .. } | AlgorithmConfig::NoisyLinreg { .. } => regression(cfg, seeds)?,
        AlgorithmConfig::LinsepRelaxed { .. } => linsep(cfg, seeds)?,
        _ => selective(cfg, seeds)?,
    };
    run.summary.trial = trial;
    for r in &mut run.rows {
        r.trial = trial;
    }
    Ok(run)
}

fn wrong_instance(cfg: &ExperimentConfig, needs: &str) -> Error {
    Error::config(
        "instance.kind",
        format!(
            "algorithm `{}` needs {needs}, got `{}`",
            cfg.algorithm.name(),
            cfg.instance.params.kind()
        ),
    )
}

fn instance(cfg: &ExperimentConfig, seed: u64) -> Result<Instance> {
    generate(&InstanceSpec {
        params: cfg.instance.params.clone(),
        seed,
    })
}

fn finite_table(cfg: &ExperimentConfig, seed: u64) -> Result<RandomTable> {
    match instance(cfg, seed)? {
        Instance::Finite {
            class,
            distribution,
            positive_rate,
        } => Ok(RandomTable {
            class,
            distribution,
            positive_rate,
        }),
        _ => Err(wrong_instance(cfg, "a finite-class instance")),
    }
}

fn transcript_rows<P: Cell, Y: Cell>(t: &Transcript<P, Y>) -> Vec<CsvRow> {
    t.rounds()
        .iter()
        .enumerate()
        .map(|(i, r)| CsvRow {
            trial: 0,
            round: i,
            point: r.point.cell(),
            decision: r.decision.cell(),
            truth: r.truth.cell(),
            outcome: r.outcome,
        })
        .collect()
}

fn online_run<P: Cell, Y: Cell>(seeds: Seeds, t: &Transcript<P, Y>, checks: Vec<BoundCheck>) -> TrialRun {
    TrialRun {
        summary: TrialSummary {
            trial: 0,
            seed: seeds.trial,
            rounds: t.len(),
            predictions: t.len() - t.abstentions(),
            mistakes: t.mistakes(),
            abstentions: t.abstentions(),
            ended_early: t.ended_early(),
        },
        rows: transcript_rows(t),
        checks,
        point: None,
    }
}

fn drive_finite<L>(
    learner: &mut L,
    table: &RandomTable,
    cfg: &ExperimentConfig,
    mode: FeedbackMode,
    seed: u64,
) -> Result<Transcript<usize, Label>>
where
    L: VersionSpaceLearner + Clone,
{
    let rounds = cfg.run.rounds;
    match cfg.run.adversary {
        AdversaryKind::Greedy => {
            let mut adv = GreedyAdversary::new(learner.clone(), mode);
            run_protocol(learner, &mut adv, rounds, mode, 0.0)
        }
        AdversaryKind::Iid => {
            let stream = table.sample(rounds, &mut seeded(seed))?;
            let mut adv = SequenceAdversary::labeled(stream.into_items());
            run_protocol(learner, &mut adv, rounds, mode, 0.0)
        }
    }
}

fn finite_online(cfg: &ExperimentConfig, seeds: Seeds) -> Result<TrialRun> {
    let table = finite_table(cfg, seeds.instance)?;
    let class = Arc::new(table.class.clone());
    let n = class.num_hypotheses();
    let size_minus_one = (n - 1) as f64;
    let (t, checks) = match cfg.algorithm {
        AlgorithmConfig::Enumeration => {
            let mut l = Enumeration::new(class);
            let t = drive_finite(&mut l, &table, cfg, FeedbackMode::LabelOnAbstainOnly, seeds.stream)?;
            let checks = vec![
                BoundCheck::hard("abstentions <= |H| - 1", size_minus_one, t.abstentions() as f64),
                BoundCheck::hard("mistakes == 0", 0.0, t.mistakes() as f64),
            ];
            (t, checks)
        }
        AlgorithmConfig::RelaxedEnumeration { budget } => {
            let mut l = RelaxedEnumeration::new(class, budget);
            let t = drive_finite(&mut l, &table, cfg, FeedbackMode::LabelAlways, seeds.stream)?;
            let checks = vec![
                BoundCheck::hard("mistakes <= k", budget as f64, t.mistakes() as f64),
                BoundCheck::hard(
                    "abstentions <= (k+1) |H|^(1/(k+1))",
                    MistakeBudgetState::abstention_bound(budget, n),
                    t.abstentions() as f64,
                ),
            ];
            (t, checks)
        }
        AlgorithmConfig::MbWrapper => {
            let mut l = MbWrapper::new(Enumeration::new(class));
            let t = drive_finite(&mut l, &table, cfg, FeedbackMode::LabelAlways, seeds.stream)?;
            let checks = vec![
                BoundCheck::hard("mistakes <= inner abstentions", l.forced_predictions() as f64, t.mistakes() as f64),
                BoundCheck::hard("mistakes <= |H| - 1", size_minus_one, t.mistakes() as f64),
            ];
            (t, checks)
        }
        _ => unreachable!("dispatched on finite online algorithms"),
    };
    Ok(online_run(seeds, &t, checks))
}

fn estimator(cfg: &ExperimentConfig, seeds: Seeds) -> Result<TrialRun> {
    match (&cfg.algorithm, instance(cfg, seeds.instance)?) {
        (&AlgorithmConfig::Coin { epsilon, delta }, Instance::Flips { p, flips }) => {
            let mut l = CoinLearner::new(epsilon, delta)?;
            let n = flips.len();
            let mut adv = SequenceAdversary::new(
                flips
                    .into_iter()
                    .map(|f| Query {
                        point: (),
                        truth: p,
                        observation: f,
                    })
                    .collect(),
            );
            let t = run_protocol(&mut l, &mut adv, n, FeedbackMode::LabelOnAbstainOnly, epsilon)?;
            let checks = vec![
                BoundCheck::statistical("estimate within epsilon", 0.0, t.mistakes() as f64, delta),
                BoundCheck::hard(
                    "abstentions <= sample budget",
                    hoeffding_sample_budget(epsilon, delta)? as f64,
                    t.abstentions() as f64,
                ),
            ];
            Ok(online_run(seeds, &t, checks))
        }
        (&AlgorithmConfig::Die { epsilon, delta }, Instance::Rolls { probs, rolls }) => {
            let mut l = DieLearner::new(probs.len(), epsilon, delta)?;
            let budget = l.per_coin_budget();
            let n = rolls.len();
            let mut adv = SequenceAdversary::new(
                rolls
                    .into_iter()
                    .map(|r| Query {
                        point: (),
                        truth: probs.clone(),
                        observation: r,
                    })
                    .collect(),
            );
            let t = run_protocol(&mut l, &mut adv, n, FeedbackMode::LabelOnAbstainOnly, epsilon)?;
            let checks = vec![
                BoundCheck::statistical("estimate within epsilon", 0.0, t.mistakes() as f64, delta),
                BoundCheck::hard("abstentions <= sample budget", budget as f64, t.abstentions() as f64),
            ];
            Ok(online_run(seeds, &t, checks))
        }
        (AlgorithmConfig::Coin { .. }, _) => Err(wrong_instance(cfg, "a coin instance")),
        _ => Err(wrong_instance(cfg, "a die instance")),
    }
}

fn regression(cfg: &ExperimentConfig, seeds: Seeds) -> Result<TrialRun> {
    let Instance::Linear { theta, points, values } = instance(cfg, seeds.instance)? else {
        return Err(wrong_instance(cfg, "a noiseless_linear instance"));
    };
    let dim = theta.len();
    let rounds = points.len();
    match cfg.algorithm {
        AlgorithmConfig::NoiselessLinreg { tolerance } => {
            let mut l = NoiselessLinReg::new(dim)?;
            let mut adv = SequenceAdversary::labeled(points.into_iter().zip(values));
            let t = run_protocol(&mut l, &mut adv, rounds, FeedbackMode::LabelOnAbstainOnly, tolerance)?;
            let checks = vec![
                BoundCheck::hard("abstentions <= dim", dim as f64, t.abstentions() as f64),
                BoundCheck::hard("mistakes == 0", 0.0, t.mistakes() as f64),
            ];
            Ok(online_run(seeds, &t, checks))
        }
        AlgorithmConfig::NoisyLinreg { noise, tolerance, .. } => {
            let mut l = NoisyLinReg::new(dim, cfg.algorithm.noisy_config())?;
            let mut rng = seeded(seeds.stream);
            let queries = points
                .into_iter()
                .zip(values)
                .map(|(x, v)| {
                    let z: f64 = rng.sample(StandardNormal);
                    Query {
                        point: x,
                        truth: v,
                        observation: v + noise * z,
                    }
                })
                .collect();
            let mut adv = SequenceAdversary::new(queries);
            let t = run_protocol(&mut l, &mut adv, rounds, FeedbackMode::LabelOnAbstainOnly, tolerance)?;
            Ok(online_run(seeds, &t, Vec::new()))
        }
        _ => unreachable!("dispatched on regression algorithms"),
    }
}

fn linsep(cfg: &ExperimentConfig, seeds: Seeds) -> Result<TrialRun> {
    let AlgorithmConfig::LinsepRelaxed {
        budget, initial_measure, ..
    } = cfg.algorithm
    else {
        unreachable!("dispatched on linsep");
    };
    let (InstanceParams::MarginHalfspace { dim, gamma, .. }, Instance::Labeled { sample, .. }) =
        (&cfg.instance.params, instance(cfg, seeds.instance)?)
    else {
        return Err(wrong_instance(cfg, "a margin_halfspace instance"));
    };
    let measure = match initial_measure {
        Some(r) => r,
        None => separability_measure(*dim, *gamma)?,
    };
    let mut l = LinsepRelaxedEnumeration::new(*dim, budget, measure, cfg.algorithm.sampler_config(seeds.learner))?;
    let rounds = cfg.run.rounds.min(sample.len());
    let mut adv = SequenceAdversary::labeled(sample.into_items());
    let t = run_protocol(&mut l, &mut adv, rounds, FeedbackMode::LabelAlways, 0.0)?;
    // volumes are sampled, so the budget holds only approximately
    let checks = vec![BoundCheck::shape("mistakes <= k", budget as f64, t.mistakes() as f64)];
    Ok(online_run(seeds, &t, checks))
}

/// Scores a fitted classifier on `test`, drawing coins the same way as
/// `evaluate_selective`.
fn score<P: Cell, S: SelectiveClassifier<P> + ?Sized>(
    clf: &S,
    test: &LabeledSet<P>,
    seeds: Seeds,
    mut checks: Vec<BoundCheck>,
    realizable: bool,
) -> TrialRun {
    let mut coins = CoinStream::new(clf.coin_seed());
    let mut rows = Vec::with_capacity(test.len());
    let (mut predicted, mut wrong) = (0, 0);
    for (i, (x, y)) in test.iter().enumerate() {
        let d = clf.decide(x, &mut coins);
        let outcome = Outcome::judge(&d, y, 0.0);
        if let Decision::Predict(p) = d {
            predicted += 1;
            wrong += usize::from(p != *y);
        }
        rows.push(CsvRow {
            trial: 0,
            round: i,
            point: x.cell(),
            decision: d.cell(),
            truth: y.cell(),
            outcome,
        });
    }
    let total = test.len();
    if realizable && clf.name() == "css" {
        checks.push(BoundCheck::hard("mistakes == 0", 0.0, wrong as f64));
    }
    TrialRun {
        summary: TrialSummary {
            trial: 0,
            seed: seeds.trial,
            rounds: total,
            predictions: predicted,
            mistakes: wrong,
            abstentions: total - predicted,
            ended_early: false,
        },
        rows,
        checks,
        point: Some(RiskCoveragePoint {
            coverage: if total == 0 { 0.0 } else { predicted as f64 / total as f64 },
            risk_on_predicted: (predicted > 0).then(|| wrong as f64 / predicted as f64),
            predicted,
            wrong,
            total,
            params: clf.params(),
        }),
    }
}

fn min_test_error<P, C: HypothesisSet<P>>(class: &C, test: &LabeledSet<P>) -> f64 {
    (0..class.num_hypotheses())
        .map(|h| class.mistakes_on(h, test))
        .min()
        .map_or(0.0, |e| e as f64 / test.len().max(1) as f64)
}

fn wm_checks<P, C: HypothesisSet<P>>(
    class: &C,
    test: &LabeledSet<P>,
    m: usize,
    theta: f64,
    delta: f64,
    run: &TrialRun,
) -> Result<Vec<BoundCheck>> {
    let n = class.num_hypotheses();
    if n < 2 || test.is_empty() {
        return Ok(Vec::new());
    }
    let b = wm_bounds(n, m, theta, delta, min_test_error(class, test), WmBoundConstants::default())?;
    let total = run.summary.rounds as f64;
    Ok(vec![
        BoundCheck::shape("error <= 2 err* + slack", b.error_bound, run.summary.mistakes as f64 / total),
        BoundCheck::shape("abstain <= 5 err* + slack", b.abstain_bound, run.summary.abstentions as f64 / total),
    ])
}

/// Fits the configured finite-class strategy on `train` and scores it.
fn fit_and_score<P: Cell, C: HypothesisSet<P>>(
    cfg: &ExperimentConfig,
    class: Arc<C>,
    train: &LabeledSet<P>,
    test: &LabeledSet<P>,
    seeds: Seeds,
    realizable: bool,
) -> Result<TrialRun> {
    match cfg.algorithm {
        AlgorithmConfig::Css { .. } => Ok(score(&css_fit(class, train)?, test, seeds, Vec::new(), realizable)),
        AlgorithmConfig::RelaxedCss { delta, d, threshold } => {
            let mut c = relaxed_css_fit(class, train, delta, d)?;
            if let Some(t) = threshold {
                c = c.with_threshold(t);
            }
            Ok(score(&c, test, seeds, Vec::new(), realizable))
        }
        AlgorithmConfig::Alpha { alpha } => {
            let c = alpha_interpolated_fit(class, train, alpha, seeds.learner)?;
            Ok(score(&c, test, seeds, Vec::new(), realizable))
        }
        AlgorithmConfig::Wm {
            theta, delta, threshold, ..
        } => {
            let mut wcfg = WmConfig::new(theta, delta, class.num_hypotheses(), train.len())?;
            if let Some(t) = threshold {
                wcfg = wcfg.with_threshold(t);
            }
            let c = wm_fit(class.clone(), train, wcfg)?;
            let run = score(&c, test, seeds, Vec::new(), realizable);
            let checks = wm_checks(class.as_ref(), test, train.len(), theta, delta, &run)?;
            Ok(TrialRun { checks, ..run })
        }
        _ => unreachable!("dispatched on selective algorithms"),
    }
}

fn selective(cfg: &ExperimentConfig, seeds: Seeds) -> Result<TrialRun> {
    let m = cfg.run.m;
    match &cfg.instance.params {
        InstanceParams::SingletonClass { .. } | InstanceParams::RandomTable { .. } => {
            let table = finite_table(cfg, seeds.instance)?;
            let train = table.sample(m, &mut seeded(seeds.stream))?;
            let test = table.sample(cfg.run.test_size, &mut seeded(seeds.test))?;
            let realizable = table.class.truth().is_some();
            let class = Arc::new(table.class.clone());
            let mut run = fit_and_score(cfg, class.clone(), &train, &test, seeds, realizable)?;
            if let AlgorithmConfig::Css { delta } = cfg.algorithm {
                if realizable && m > 0 {
                    // exact abstain probability under the point distribution
                    let css = css_fit(class.clone(), &train)?;
                    let p_abstain: f64 = (0..class.num_points())
                        .filter(|x| css.unanimous(x).is_none())
                        .map(|x| table.distribution[x])
                        .sum();
                    let bound = css_abstain_bound(m, class.num_hypotheses(), class.num_points(), delta)?;
                    run.checks.push(BoundCheck::statistical(
                        "abstain probability <= (ln2 min(|H|,|X|) + ln(1/delta)) / m",
                        bound,
                        p_abstain,
                        delta,
                    ));
                }
            }
            Ok(run)
        }
        InstanceParams::MarginHalfspace { .. } | InstanceParams::TwoArcs { .. } => {
            let mut params = cfg.instance.params.clone();
            let total = m + cfg.run.test_size;
            match &mut params {
                InstanceParams::MarginHalfspace { m, .. } | InstanceParams::TwoArcs { m, .. } => *m = total,
                _ => unreachable!(),
            }
            let Instance::Labeled { sample, .. } = generate(&InstanceSpec {
                params,
                seed: seeds.instance,
            })?
            else {
                unreachable!("vector instances are labeled samples");
            };
            let mut items = sample.into_items();
            let test = LabeledSet::new(items.split_off(m));
            let train = LabeledSet::new(items);
            match cfg.algorithm {
                AlgorithmConfig::Css { .. } => {
                    let c = AffineConsistentSelective::fit(&train)?;
                    Ok(score(&c, &test, seeds, Vec::new(), true))
                }
                AlgorithmConfig::Wm {
                    grid_angles,
                    grid_offsets,
                    offset_range,
                    ..
                } => {
                    let grid = affine_grid(grid_angles, grid_offsets, offset_range, &train)?;
                    fit_and_score(cfg, Arc::new(grid), &train, &test, seeds, true)
                }
                _ => {
                    let (a, o, r) = DEFAULT_GRID;
                    let grid = affine_grid(a, o, r, &train)?;
                    fit_and_score(cfg, Arc::new(grid), &train, &test, seeds, true)
                }
            }
        }
        _ => Err(wrong_instance(cfg, "a finite-class or labeled-sample instance")),
    }
}

fn affine_grid(angles: usize, offsets: usize, range: [f64; 2], train: &LabeledSet<Vec<f64>>) -> Result<AffineGridClass> {
    if train.iter().any(|(x, _)| x.len() != 2) {
        return Err(Error::invalid("affine grid strategies need planar points"));
    }
    if offsets == 0 || !(range[0] <= range[1]) {
        return Err(Error::invalid("malformed offset grid"));
    }
    let offs = if offsets == 1 {
        vec![range[0]]
    } else {
        (0..offsets)
            .map(|i| range[0] + (range[1] - range[0]) * i as f64 / (offsets - 1) as f64)
            .collect()
    };
    AffineGridClass::new(angles, offs)
}
