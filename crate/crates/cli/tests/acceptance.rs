//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL
//! line; the process exits non-zero if any failed.

use std::collections::{HashMap, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use abstain::datagen::{exhaustive_game, gen_random_table, gen_two_arcs, universal_class, GreedyAdversary, RandomTable, TwoArcsSpec};
use abstain::kwik::{
    run_protocol, CoinLearner, DieLearner, Enumeration, FeedbackMode, KwikLearner, MbWrapper, NoiselessLinReg,
    RelaxedEnumeration, SequenceAdversary, VersionSpaceLearner,
};
use abstain::linsep::{hit_and_run_sample, SamplerConfig, SeparatorVersionSpace};
use abstain::rng::{derive_seed, seeded, CoinStream};
use abstain::selective::{
    css_abstain_bound, css_fit, css_maximality_check, erm_finite, relaxed_css_fit, upper_envelope_bound, wm_fit,
    AffineConsistentSelective, AffineGridClass, SelectiveClassifier, WeightedMajority, WmConfig,
};
use abstain::{evaluate_selective, Decision, Error, FiniteHypothesisClass, HypothesisSet, Label, LabeledSet, Outcome};
use rand::Rng;

type Check = fn() -> String;

fn main() {
    let criteria: [(&str, Check); 13] = [
        ("zero-error enumeration and CSS on realizable instances", zero_error),
        ("relaxed enumeration mistake and abstention bounds", relaxed_budget),
        ("mistake-bound wrapper charged to inner abstentions", wrapper_charge),
        ("noiseless linear regression", noiseless_linreg),
        ("coin and die estimators", coin_and_die),
        ("CSS abstain-probability bound", css_bound),
        ("CSS maximality", css_maximality),
        ("relaxed CSS equals ERM reduction", relaxed_css_reduction),
        ("Hit-and-Run vote fractions in the plane", hit_and_run_votes),
        ("weighted-majority formulas and abstention", wm_formulas),
        ("two arcs: CSS abstains, WM does not", two_arcs),
        ("upper envelope values", envelope_values),
        ("CLI determinism", cli_determinism),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {n:2} PASS {name}: {detail} [{secs:.1}s]"),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {n:2} FAIL {name}: {msg} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}

/// Table whose columns have varied positive rates, so some points split the
/// class evenly and others isolate a few hypotheses. The point distribution
/// is skewed.
fn skewed_table(hypotheses: usize, points: usize, seed: u64) -> RandomTable {
    let mut rng = seeded(seed);
    let mut rows = vec![Vec::with_capacity(points); hypotheses];
    for _ in 0..points {
        let rate: f64 = rng.random_range(0.0..0.5);
        let flip = rng.random::<bool>();
        for row in rows.iter_mut() {
            let pos = (rng.random::<f64>() < rate) != flip;
            row.push(if pos { Label::Pos } else { Label::Neg });
        }
    }
    let truth = rng.random_range(0..hypotheses);
    let class = FiniteHypothesisClass::new(rows).unwrap().with_truth(truth).unwrap();
    let raw: Vec<f64> = (0..points).map(|_| rng.random::<f64>().powi(3) + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let positive_rate = (0..points)
        .map(|x| if class.label(truth, x) == Label::Pos { 1.0 } else { 0.0 })
        .collect();
    RandomTable {
        class,
        distribution: raw.iter().map(|w| w / total).collect(),
        positive_rate,
    }
}

/// Sixteen hypotheses: the target and fifteen rivals, each differing from it
/// on one rare point of mass `rare`. The rest of the mass sits on points
/// where the whole class agrees.
fn rare_disagreement_table(rare: f64, seed: u64) -> RandomTable {
    let mut rng = seeded(seed);
    let points = 64;
    let base: Vec<Label> = (0..points).map(|_| if rng.random::<bool>() { Label::Pos } else { Label::Neg }).collect();
    let rows = (0..16)
        .map(|h| {
            let mut r = base.clone();
            if h > 0 {
                r[h - 1] = r[h - 1].flip();
            }
            r
        })
        .collect();
    let class = FiniteHypothesisClass::new(rows).unwrap().with_truth(0).unwrap();
    let common = (1.0 - 15.0 * rare) / (points - 15) as f64;
    RandomTable {
        distribution: (0..points).map(|x| if x < 15 { rare } else { common }).collect(),
        positive_rate: base.iter().map(|&y| if y == Label::Pos { 1.0 } else { 0.0 }).collect(),
        class,
    }
}

fn consistent(class: &FiniteHypothesisClass, sample: &LabeledSet<usize>) -> Vec<usize> {
    (0..class.num_hypotheses())
        .filter(|&h| sample.iter().all(|&(x, y)| class.label(h, x) == y))
        .collect()
}

fn zero_error() -> String {
    let start = Instant::now();
    let (mut rounds, mut css_predictions) = (0usize, 0usize);
    for i in 0..10_000u64 {
        let seed = derive_seed(1, i);
        let mut rng = seeded(seed);
        let h = rng.random_range(1..=256);
        let x = rng.random_range(1..=64);
        let table = if i % 4 < 2 {
            gen_random_table(h, x, true, derive_seed(seed, 1)).unwrap()
        } else {
            skewed_table(h, x, derive_seed(seed, 1))
        };
        let class = Arc::new(table.class.clone());
        let mut learner = Enumeration::new(class.clone());
        let t = if i % 2 == 0 {
            let mut adv = GreedyAdversary::new(Enumeration::new(class.clone()), FeedbackMode::LabelOnAbstainOnly);
            run_protocol(&mut learner, &mut adv, 2 * x, FeedbackMode::LabelOnAbstainOnly, 0.0).unwrap()
        } else {
            let stream = table.sample(2 * x, &mut seeded(derive_seed(seed, 2))).unwrap();
            let mut adv = SequenceAdversary::labeled(stream.into_items());
            run_protocol(&mut learner, &mut adv, 2 * x, FeedbackMode::LabelOnAbstainOnly, 0.0).unwrap()
        };
        rounds += t.len();
        let wrong = t.rounds().iter().filter(|r| r.outcome == Outcome::Mistake).count();
        assert_eq!(wrong, 0, "enumeration erred on instance {i}");
        // the stream, realizable by construction, doubles as a CSS sample
        let sample: LabeledSet<usize> = t.rounds().iter().map(|r| (r.point, r.truth)).collect();
        let survivors = consistent(&table.class, &sample);
        assert!(!survivors.is_empty(), "stream {i} is not realizable");
        let css = css_fit(class.clone(), &sample).unwrap();
        let mut coins = CoinStream::new(0);
        for p in 0..x {
            if let Decision::Predict(y) = css.decide(&p, &mut coins) {
                css_predictions += 1;
                for &s in &survivors {
                    assert_eq!(table.class.label(s, p), y, "CSS erred on instance {i} at point {p}");
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 60.0, "took {secs:.1}s");
    format!("10000 instances, {rounds} online rounds, {css_predictions} CSS predictions, 0 errors")
}

fn relaxed_budget() -> String {
    let mut worst = Vec::new();
    for k in 1..=3usize {
        for h in [16usize, 81, 256] {
            let bound = (k as f64 + 1.0) * (h as f64).powf(1.0 / (k as f64 + 1.0));
            let mut max_a = 0;
            for trial in 0..1000u64 {
                let seed = derive_seed(derive_seed(2, (k * 1000 + h) as u64), trial);
                let table = if trial % 2 == 0 {
                    skewed_table(h, 64, seed)
                } else {
                    gen_random_table(h, 64, true, seed).unwrap()
                };
                let class = Arc::new(table.class);
                let mut l = RelaxedEnumeration::new(class.clone(), k);
                let mut adv = GreedyAdversary::new(RelaxedEnumeration::new(class, k), FeedbackMode::LabelAlways);
                let t = run_protocol(&mut l, &mut adv, 3 * 64, FeedbackMode::LabelAlways, 0.0).unwrap();
                let mistakes = t.rounds().iter().filter(|r| r.outcome == Outcome::Mistake).count();
                let abstentions = t.rounds().iter().filter(|r| r.outcome == Outcome::Abstain).count();
                assert!(mistakes <= k, "k={k} |H|={h} trial {trial}: {mistakes} mistakes");
                assert!(
                    abstentions as f64 <= bound,
                    "k={k} |H|={h} trial {trial}: {abstentions} abstentions > {bound}"
                );
                max_a = max_a.max(abstentions);
            }
            worst.push(format!("k={k},|H|={h}:{max_a}/{bound:.2}"));
        }
    }
    for n in 1..=9usize {
        let class = Arc::new(universal_class(n).unwrap());
        for k in 1..=3usize {
            let l = RelaxedEnumeration::new(class.clone(), k);
            let v = exhaustive_game(&l, |l: &RelaxedEnumeration| {
                let s = l.state();
                (l.version_space().members().to_vec(), s.mistakes, s.version_space_size)
            })
            .unwrap();
            let bound = (k as f64 + 1.0) * (n as f64).powf(1.0 / (k as f64 + 1.0));
            assert!(v.max_mistakes <= k, "game |H|={n} k={k}: {} mistakes", v.max_mistakes);
            assert!(
                v.max_abstentions as f64 <= bound,
                "game |H|={n} k={k}: {} abstentions > {bound}",
                v.max_abstentions
            );
        }
    }
    format!("worst abstentions/bound {}; exhaustive game |H|<=9 within bounds", worst.join(" "))
}

/// Largest excess of wrapper mistakes over inner abstentions plus inner
/// mistakes on any prefix of any realizable stream, by search over the game
/// tree of the universal class. Queries on unanimous points change nothing
/// and are skipped.
fn worst_excess<L, K>(inner: &L, wrapper: &MbWrapper<L>, key: &impl Fn(&L) -> K, memo: &mut HashMap<K, i64>) -> i64
where
    L: VersionSpaceLearner + Clone,
    K: std::hash::Hash + Eq,
{
    let k = key(inner);
    if let Some(&v) = memo.get(&k) {
        return v;
    }
    let members = inner.version_space().members().to_vec();
    let mut best = 0i64;
    for mask in 1..(1usize << members.len()) - 1 {
        let x: usize = (0..members.len()).filter(|i| mask >> i & 1 == 1).map(|i| 1usize << members[i]).sum();
        for y in Label::BOTH {
            let (mut i2, mut w2) = (inner.clone(), wrapper.clone());
            let di = i2.predict(&x).unwrap();
            let dw = w2.predict(&x).unwrap();
            if di.is_abstain() || i2.needs_every_label() {
                i2.observe(&x, &y).unwrap();
            }
            w2.observe(&x, &y).unwrap();
            // the wrapper's copy of the inner learner must track the standalone one
            assert_eq!(w2.inner().version_space(), i2.version_space());
            let inner_cost = match di {
                Decision::Abstain => 1,
                Decision::Predict(p) => (p != y) as i64,
            };
            let wrapper_cost = match dw {
                Decision::Abstain => panic!("wrapper abstained"),
                Decision::Predict(p) => (p != y) as i64,
            };
            best = best.max(wrapper_cost - inner_cost + worst_excess(&i2, &w2, key, memo));
        }
    }
    memo.insert(k, best);
    best
}

fn wrapper_charge() -> String {
    let (mut games, mut states) = (0, 0);
    for n in 1..=8usize {
        let class = Arc::new(universal_class(n).unwrap());
        let inner = Enumeration::new(class.clone());
        let mut memo = HashMap::new();
        let e = worst_excess(&inner, &MbWrapper::new(inner.clone()), &|l: &Enumeration| l.version_space().members().to_vec(), &mut memo);
        states += memo.len();
        assert_eq!(e, 0, "|H|={n}: wrapper exceeds inner abstentions by {e}");
        for k in 1..=2 {
            let inner = RelaxedEnumeration::new(class.clone(), k);
            let mut memo = HashMap::new();
            let e = worst_excess(
                &inner,
                &MbWrapper::new(inner.clone()),
                &|l: &RelaxedEnumeration| {
                    let s = l.state();
                    (l.version_space().members().to_vec(), s.mistakes, s.version_space_size)
                },
                &mut memo,
            );
            states += memo.len();
            assert_eq!(e, 0, "|H|={n} k={k}: wrapper exceeds inner cost by {e}");
        }
        games += 3;
    }
    // paired random streams on larger classes
    for trial in 0..300u64 {
        let table = skewed_table(64, 48, derive_seed(3, trial));
        let class = Arc::new(table.class.clone());
        let stream = table.sample(150, &mut seeded(derive_seed(4, trial))).unwrap().into_items();
        let mut inner = Enumeration::new(class.clone());
        let mut wrapper = MbWrapper::new(Enumeration::new(class));
        let ti = run_protocol(&mut inner, &mut SequenceAdversary::labeled(stream.clone()), 150, FeedbackMode::LabelOnAbstainOnly, 0.0).unwrap();
        let tw = run_protocol(&mut wrapper, &mut SequenceAdversary::labeled(stream), 150, FeedbackMode::LabelAlways, 0.0).unwrap();
        let (mut ci, mut cw) = (0, 0);
        for (a, b) in ti.rounds().iter().zip(tw.rounds()) {
            ci += (a.outcome != Outcome::Correct) as usize;
            cw += (b.outcome == Outcome::Mistake) as usize;
            assert!(cw <= ci, "trial {trial}: wrapper mistakes {cw} > inner cost {ci}");
        }
    }
    format!("{games} exhaustive games with |H|<=8 ({states} states) and 300 paired streams, no prefix exceeds the inner cost")
}

fn noiseless_linreg() -> String {
    let mut worst_err = 0f64;
    let mut predictions = 0;
    for trial in 0..1000u64 {
        let mut rng = seeded(derive_seed(5, trial));
        let n = rng.random_range(1..=10usize);
        let theta: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut learner = NoiselessLinReg::new(n).unwrap();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut abstentions = 0;
        for _ in 0..4 * n {
            let x: Vec<f64> = match rng.random_range(0..5) {
                // combination of earlier points
                0 | 1 if !basis.is_empty() => {
                    let mut v = vec![0.0; n];
                    for b in &basis {
                        let c: f64 = rng.random_range(-2.0..2.0);
                        v.iter_mut().zip(b).for_each(|(vi, bi)| *vi += c * bi);
                    }
                    v
                }
                2 if !basis.is_empty() => {
                    let b = &basis[rng.random_range(0..basis.len())];
                    let c: f64 = rng.random_range(-3.0..3.0);
                    b.iter().map(|v| c * v).collect()
                }
                3 => {
                    let mut v = vec![0.0; n];
                    v[rng.random_range(0..n)] = rng.random_range(-2.0..2.0);
                    v
                }
                _ => (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            };
            let y: f64 = theta.iter().zip(&x).map(|(a, b)| a * b).sum();
            match learner.predict(&x).unwrap() {
                Decision::Abstain => {
                    abstentions += 1;
                    learner.observe(&x, &y).unwrap();
                    basis.push(x);
                }
                Decision::Predict(p) => {
                    predictions += 1;
                    let err = (p - y).abs();
                    worst_err = worst_err.max(err);
                    assert!(err <= 1e-9, "trial {trial}: prediction off by {err}");
                }
            }
        }
        assert!(abstentions <= n, "trial {trial}: {abstentions} abstentions in dimension {n}");
    }
    format!("1000 streams, {predictions} predictions, worst error {worst_err:.2e}")
}

fn coin_and_die() -> String {
    let (eps, delta) = (0.1, 0.05);
    let mut coin_failures = 0;
    for trial in 0..500u64 {
        let mut rng = seeded(derive_seed(6, trial));
        let p: f64 = rng.random();
        let mut l = CoinLearner::new(eps, delta).unwrap();
        let mut asked = 0;
        while l.predict(&()).unwrap().is_abstain() {
            l.observe(&(), &(rng.random::<f64>() < p)).unwrap();
            asked += 1;
        }
        let budget = ((2.0 / delta).ln() / (2.0 * eps * eps)).ceil() as usize;
        assert_eq!(asked, budget);
        let est = l.estimate().unwrap();
        coin_failures += ((est - p).abs() > eps) as usize;
    }
    let mut die_failures = 0;
    for trial in 0..500u64 {
        let mut rng = seeded(derive_seed(7, trial));
        let faces = rng.random_range(2..=6usize);
        let raw: Vec<f64> = (0..faces).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|r| r / total).collect();
        let mut l = DieLearner::new(faces, eps, delta).unwrap();
        while l.predict(&()).unwrap().is_abstain() {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let face = probs.iter().position(|q| {
                acc += q;
                u < acc
            });
            l.observe(&(), &face.unwrap_or(faces - 1)).unwrap();
        }
        let est = l.estimate().unwrap();
        let off = est.iter().zip(&probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        die_failures += (off > eps) as usize;
    }
    let (fc, fd) = (coin_failures as f64 / 500.0, die_failures as f64 / 500.0);
    assert!(fc <= delta + 0.03, "coin failure frequency {fc}");
    assert!(fd <= delta + 0.03, "die failure frequency {fd}");
    format!("failure frequency coin {fc:.3}, die {fd:.3} (limit {:.2})", delta + 0.03)
}

fn css_bound() -> String {
    let delta: f64 = 0.05;
    let mut parts = Vec::new();
    for m in [50usize, 100, 200] {
        let bound = (2f64.ln() * 16.0 + (1.0 / delta).ln()) / m as f64;
        assert!((css_abstain_bound(m, 16, 64, delta).unwrap() - bound).abs() < 1e-12);
        let mut failures = 0;
        let mut worst = 0f64;
        for trial in 0..500u64 {
            let seed = derive_seed(derive_seed(8, m as u64), trial);
            let table = if trial % 2 == 0 {
                skewed_table(16, 64, seed)
            } else {
                // abstain mass about 15 p (1 - p)^m, largest near p = 1/m
                let p = seeded(derive_seed(seed, 3)).random_range(0.3..3.0) / m as f64;
                rare_disagreement_table(p, seed)
            };
            let train = table.sample(m, &mut seeded(derive_seed(seed, 1))).unwrap();
            let test = table.sample(2000, &mut seeded(derive_seed(seed, 2))).unwrap();
            let css = css_fit(Arc::new(table.class.clone()), &train).unwrap();
            let r = evaluate_selective(&css, &test).unwrap();
            assert_eq!(r.wrong, 0);
            let abstain = 1.0 - r.coverage;
            worst = worst.max(abstain);
            failures += (abstain > bound) as usize;
        }
        let freq = failures as f64 / 500.0;
        assert!(freq <= delta + 0.03, "m={m}: bound {bound:.4} exceeded in {freq} of trials");
        parts.push(format!("m={m}: bound {bound:.3}, worst {worst:.3}, exceeded {freq:.3}"));
    }
    parts.join("; ")
}

fn css_maximality() -> String {
    let (mut spaces, mut rivals, mut controls) = (0usize, 0usize, 0usize);
    for nx in 1..=5usize {
        let rows = 1usize << nx;
        let label = |row: usize, x: usize| if row >> x & 1 == 1 { Label::Pos } else { Label::Neg };
        // (class, labeled subset) per distinct version space; the rival test
        // depends on the instance only through it
        let mut seen: HashMap<u64, (Vec<usize>, usize, usize)> = HashMap::new();
        let mut class = Vec::new();
        fn subsets(start: usize, rows: usize, class: &mut Vec<usize>, out: &mut dyn FnMut(&[usize])) {
            if !class.is_empty() {
                out(class);
            }
            if class.len() == 6 {
                return;
            }
            for r in start..rows {
                class.push(r);
                subsets(r + 1, rows, class, out);
                class.pop();
            }
        }
        subsets(0, rows, &mut class, &mut |c: &[usize]| {
            for t in 0..rows {
                for &truth in c {
                    let v: u64 = c.iter().filter(|&&h| h & t == truth & t).map(|&h| 1u64 << h).sum();
                    seen.entry(v).or_insert_with(|| (c.to_vec(), t, truth));
                }
            }
        });
        for (v, (c, t, truth)) in seen {
            spaces += 1;
            let members: Vec<usize> = (0..rows).filter(|h| v >> h & 1 == 1).collect();
            // labels shared by every consistent hypothesis
            let forced: Vec<Option<Label>> = (0..nx)
                .map(|x| {
                    let first = label(members[0], x);
                    members.iter().all(|&h| label(h, x) == first).then_some(first)
                })
                .collect();
            let fhc = Arc::new(
                FiniteHypothesisClass::new(c.iter().map(|&h| (0..nx).map(|x| label(h, x)).collect()).collect()).unwrap(),
            );
            let sample: LabeledSet<usize> = (0..nx).filter(|x| t >> x & 1 == 1).map(|x| (x, label(truth, x))).collect();
            for code in 0..3usize.pow(nx as u32) {
                let rival: Vec<Decision<Label>> = (0..nx)
                    .map(|x| match code / 3usize.pow(x as u32) % 3 {
                        0 => Decision::Abstain,
                        1 => Decision::Predict(Label::Pos),
                        _ => Decision::Predict(Label::Neg),
                    })
                    .collect();
                let certain = rival.iter().zip(&forced).all(|(d, f)| match d {
                    Decision::Abstain => true,
                    Decision::Predict(y) => *f == Some(*y),
                });
                if certain {
                    rivals += 1;
                    let ok = css_maximality_check(fhc.clone(), &sample, nx, |x| rival[x].clone()).unwrap();
                    assert!(ok, "certain rival {code} escapes CSS on version space {v:#x}");
                }
            }
            if let Some(x) = forced.iter().position(|f| f.is_none()) {
                controls += 1;
                let ok = css_maximality_check(fhc.clone(), &sample, nx, |p| {
                    if p == x { Decision::Predict(Label::Pos) } else { Decision::Abstain }
                })
                .unwrap();
                assert!(!ok, "check accepted a rival predicting at a contested point");
            }
        }
    }
    format!("{spaces} version spaces, {rivals} zero-error rivals contained, {controls} contested controls rejected")
}

fn relaxed_css_reduction() -> String {
    let mut queries = 0;
    let mut abstained = 0;
    for trial in 0..1000u64 {
        let seed = derive_seed(9, trial);
        let mut rng = seeded(seed);
        let h = rng.random_range(1..=40usize);
        let nx = rng.random_range(1..=24usize);
        let m = rng.random_range(1..=60usize);
        let table = gen_random_table(h, nx, rng.random::<bool>(), derive_seed(seed, 1)).unwrap();
        let class = Arc::new(table.class.clone());
        let sample = table.sample(m, &mut seeded(derive_seed(seed, 2))).unwrap();
        let errors: Vec<f64> = (0..h)
            .map(|g| sample.iter().filter(|&&(x, y)| table.class.label(g, x) != y).count() as f64 / m as f64)
            .collect();
        let base = relaxed_css_fit(class.clone(), &sample, 0.05, None).unwrap();
        let mut thresholds = vec![base.threshold(), rng.random_range(0.0..0.5)];
        thresholds.extend((0..4).map(|j| (j as f64 + 0.5) / m as f64));
        for delta in thresholds {
            let rc = base.clone().with_threshold(delta);
            let best = rc.best_id();
            let min_err = errors.iter().copied().fold(f64::INFINITY, f64::min);
            assert_eq!(errors[best], min_err, "trial {trial}: reference hypothesis is not an ERM");
            let relaxed: Vec<usize> = (0..h).filter(|&g| errors[g] <= min_err + delta).collect();
            let mut coins = CoinStream::new(0);
            for x in 0..nx {
                queries += 1;
                let shown = table.class.label(best, x);
                let unanimous = relaxed.iter().all(|&g| table.class.label(g, x) == shown);
                let by_erm = match erm_finite(&table.class, &sample, Some((&x, shown))) {
                    Err(Error::NoQualifyingHypothesis) => true,
                    Ok(r) => r.best_empirical_error - min_err > delta,
                    Err(e) => panic!("{e}"),
                };
                let decided = rc.decide(&x, &mut coins);
                assert_eq!(unanimous, by_erm, "trial {trial} x={x}: ERM reduction disagrees with the relaxed space");
                match decided {
                    Decision::Predict(y) => {
                        assert!(unanimous && y == shown, "trial {trial} x={x}: predicted where it must abstain");
                    }
                    Decision::Abstain => {
                        abstained += 1;
                        assert!(!unanimous, "trial {trial} x={x}: abstained on a unanimous point");
                    }
                }
            }
        }
    }
    format!("1000 instances, {queries} queries agree exactly ({abstained} abstentions)")
}

fn hit_and_run_votes() -> String {
    const GRID: usize = 400_000;
    let angles: Vec<[f64; 2]> = (0..GRID)
        .map(|i| {
            let t = std::f64::consts::TAU * (i as f64 + 0.5) / GRID as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    let mut worst = 0f64;
    let mut total_samples = 0;
    for space in 0..100u64 {
        let mut rng = seeded(derive_seed(10, space));
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let w_star = [phi.cos(), phi.sin()];
        let mut vs = SeparatorVersionSpace::new(2).unwrap();
        let mut dirs: Vec<[f64; 2]> = Vec::new();
        for c in 0..rng.random_range(1..=5) {
            let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let dot = w_star[0] * x[0] + w_star[1] * x[1];
            if dot.abs() < 1e-6 {
                continue;
            }
            let y = if dot > 0.0 { Label::Pos } else { Label::Neg };
            let cfg = SamplerConfig {
                num_samples: 200,
                seed: derive_seed(space, c + 100),
                ..SamplerConfig::default()
            };
            let before = hit_and_run_sample(&vs, &cfg).unwrap();
            vs.add_constraint(&x, y, &before).unwrap();
            dirs.push([y.as_f64() * x[0], y.as_f64() * x[1]]);
        }
        let q = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let cfg = SamplerConfig {
            num_samples: 20_000,
            seed: derive_seed(space, 1),
            ..SamplerConfig::default()
        };
        let samples = hit_and_run_sample(&vs, &cfg).unwrap();
        total_samples += samples.len();
        for w in &samples {
            assert!(w[0] * w[0] + w[1] * w[1] <= 1.0 + 1e-12, "sample outside the unit disk");
            for d in &dirs {
                assert!(d[0] * w[0] + d[1] * w[1] > 0.0, "space {space}: sample violates a constraint");
            }
        }
        let sampled = samples.iter().filter(|w| w[0] * q[0] + w[1] * q[1] > 0.0).count() as f64 / samples.len() as f64;
        // uniform on the disk means uniform in angle over the feasible cone
        let feasible: Vec<&[f64; 2]> = angles.iter().filter(|a| dirs.iter().all(|d| d[0] * a[0] + d[1] * a[1] > 0.0)).collect();
        let exact = feasible.iter().filter(|a| a[0] * q[0] + a[1] * q[1] > 0.0).count() as f64 / feasible.len() as f64;
        let off = (sampled - exact).abs();
        worst = worst.max(off);
        assert!(off <= 0.02, "space {space}: sampled {sampled:.4} vs exact {exact:.4}");
    }
    format!("100 version spaces, {total_samples} samples inside, worst vote deviation {worst:.4}")
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

fn wm_formulas() -> String {
    let mut cases = 0;
    for theta in [0.01, 0.1, 0.25, 0.4, 0.49] {
        for delta in [0.001, 0.05, 0.2, 0.9] {
            for h in [2usize, 8, 100, 1024] {
                for m in [1usize, 10, 400, 10_000] {
                    let c = WmConfig::new(theta, delta, h, m).unwrap();
                    let eta = (8.0 * h as f64).ln() * (m as f64).powf(0.5 - theta);
                    let band = 2.0 * ((std::f64::consts::SQRT_2 / delta).ln() / m as f64).sqrt() + eta / (8.0 * m as f64);
                    assert!(close(c.eta, eta), "eta at theta={theta} delta={delta} |H|={h} m={m}");
                    assert!(close(c.threshold, band), "band at theta={theta} delta={delta} |H|={h} m={m}");
                    cases += 1;
                }
            }
        }
    }
    let c = WmConfig::new(0.25, 0.05, 8, 400).unwrap();
    assert!((c.eta - 18.599).abs() < 5e-4 && (c.threshold - 0.1886).abs() < 5e-5);

    // log-odds against direct sums, and nesting of prediction sets
    let mut nested = 0;
    for trial in 0..200u64 {
        let seed = derive_seed(11, trial);
        let mut rng = seeded(seed);
        let h = rng.random_range(2..=30usize);
        let nx = rng.random_range(1..=20usize);
        let table = gen_random_table(h, nx, false, seed).unwrap();
        let m = rng.random_range(1..=80usize);
        let sample = table.sample(m, &mut seeded(derive_seed(seed, 1))).unwrap();
        let cfg = WmConfig::new(0.25, 0.05, h, m).unwrap();
        let class = Arc::new(table.class.clone());
        let wm = wm_fit(class.clone(), &sample, cfg).unwrap();
        for x in 0..nx {
            let (mut pos, mut neg) = (0.0, 0.0);
            for g in 0..h {
                let err = sample.iter().filter(|&&(p, y)| table.class.label(g, p) != y).count() as f64 / m as f64;
                let w = (-cfg.eta * err).exp();
                if table.class.label(g, x) == Label::Pos { pos += w } else { neg += w }
            }
            let got = wm.log_odds(&x);
            if pos == 0.0 {
                assert_eq!(got, f64::NEG_INFINITY);
            } else if neg == 0.0 {
                assert_eq!(got, f64::INFINITY);
            } else {
                let want = (pos / neg).ln() / cfg.eta;
                assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "log-odds {got} vs {want}");
            }
        }
        let mut previous: Option<Vec<bool>> = None;
        for step in 0..=40 {
            let band = step as f64 * 0.05;
            let wm = WeightedMajority::from_errors(class.clone(), (0..h).map(|g| class.mistakes_on(g, &sample) as f64 / m as f64).collect(), cfg.with_threshold(band)).unwrap();
            let mut coins = CoinStream::new(0);
            let now: Vec<bool> = (0..nx).map(|x| !wm.decide(&x, &mut coins).is_abstain()).collect();
            if let Some(prev) = &previous {
                for x in 0..nx {
                    assert!(prev[x] || !now[x], "trial {trial}: raising the band to {band} added point {x}");
                }
            }
            previous = Some(now);
            nested += 1;
        }
    }

    // unanimous vote clears any band; a symmetric tie never does
    use Label::*;
    let class = Arc::new(FiniteHypothesisClass::new(vec![vec![Pos, Pos, Neg], vec![Pos, Neg, Pos], vec![Pos, Pos, Neg], vec![Pos, Neg, Pos]]).unwrap());
    let mut coins = CoinStream::new(0);
    for band in [0.0, 1.0, 1e6, f64::MAX] {
        let errors = vec![0.1, 0.1, 0.3, 0.3];
        let wm = WeightedMajority::from_errors(class.clone(), errors, WmConfig::new(0.25, 0.05, 4, 100).unwrap().with_threshold(band)).unwrap();
        assert_eq!(wm.decide(&0, &mut coins), Decision::Predict(Pos));
        assert_eq!(wm.log_odds(&1), 0.0);
        assert_eq!(wm.decide(&1, &mut coins), Decision::Abstain);
        assert_eq!(wm.decide(&2, &mut coins), Decision::Abstain);
    }
    format!("{cases} formula cases, {nested} nested bands, unanimous and tie cases")
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn two_arcs() -> String {
    let spec = TwoArcsSpec::default();
    let grid = Arc::new(AffineGridClass::new(32, linspace(-2.0, 1.0, 32)).unwrap());
    let mut css_worst = 0f64;
    let mut wm_worst = 1f64;
    for s in 0..50u64 {
        let seed = derive_seed(12, s);
        let all = gen_two_arcs(&spec, 250, seed).unwrap().into_items();
        let (train, test): (LabeledSet<Vec<f64>>, LabeledSet<Vec<f64>>) =
            (all[..50].iter().cloned().collect(), all[50..].iter().cloned().collect());
        let css = AffineConsistentSelective::fit(&train).unwrap();
        let r = evaluate_selective(&css, &test).unwrap();
        css_worst = css_worst.max(r.coverage);
        assert_eq!(r.predicted, 0, "seed {s}: CSS predicted on {} test points", r.predicted);

        let all = gen_two_arcs(&spec, 700, seed).unwrap().into_items();
        let (train, test): (LabeledSet<Vec<f64>>, LabeledSet<Vec<f64>>) =
            (all[..500].iter().cloned().collect(), all[500..].iter().cloned().collect());
        let cfg = WmConfig::new(0.25, 0.05, grid.num_hypotheses(), 500).unwrap();
        let wm = wm_fit(grid.clone(), &train, cfg).unwrap();
        let r = evaluate_selective(&wm, &test).unwrap();
        wm_worst = wm_worst.min(r.coverage);
        assert!(r.coverage > 0.5, "seed {s}: WM coverage {}", r.coverage);
    }
    format!("50 seeds, CSS coverage at most {css_worst}, WM coverage at least {wm_worst:.3}")
}

fn envelope_values() -> String {
    let cases = [
        (0.5, 100, 3, 0.1, -0.497_737_623_675_428_06),
        (1.0, 20, 10, 0.0, 0.031_25),
        (0.25, 50, 5, 0.05, -1.477_809_613_750_875_4),
        (0.8, 1000, 20, 0.2, -0.123_650_344_009_902_49),
        (1.0, 1, 1, 0.25, -0.168_549_060_186_648_42),
        (0.6, 10, 40, 0.01, 0.082_210_960_704_582_17),
    ];
    for (rho, m, d, delta, want) in cases {
        let got = upper_envelope_bound(rho, m, d, delta).unwrap();
        assert!((got - want).abs() <= 1e-9, "rho={rho} m={m} d={d} delta={delta}: {got} vs {want}");
    }
    assert!(upper_envelope_bound(0.0, 10, 1, 0.1).is_err());
    assert!(upper_envelope_bound(0.5, 10, 1, 0.3).is_err());
    format!("{} values within 1e-9", cases.len())
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run_cli(args: &[&str], config: &str, out: &Path) -> (i32, Vec<u8>) {
    let o = Command::new(env!("CARGO_BIN_EXE_abstain"))
        .args(args)
        .arg("--config")
        .arg(configs().join(config))
        .arg("--out")
        .arg(out)
        .args(["--seed", "41"])
        .output()
        .unwrap();
    let stdout = String::from_utf8(o.stdout).unwrap().replace(&out.display().to_string(), "<out>");
    (o.status.code().unwrap_or(-1), stdout.into_bytes())
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn cli_determinism() -> String {
    let cases = [
        ("kwik-run", "enumeration_singleton.toml"),
        ("kwik-run", "relaxed_budget_sweep.toml"),
        ("kwik-run", "coin.toml"),
        ("kwik-run", "linreg.toml"),
        ("kwik-run", "linsep.toml"),
        ("selective-run", "css_two_arcs.toml"),
        ("selective-run", "wm_two_arcs.toml"),
        ("sweep", "alpha_sweep.toml"),
        ("sweep", "relaxed_budget_sweep.toml"),
        ("gen-instance", "css_two_arcs.toml"),
        ("verify-bounds", "enumeration_singleton.toml"),
        ("verify-bounds", "css_bound.toml"),
    ];
    let tmp = tempfile::tempdir().unwrap();
    let mut files = 0;
    let mut commands = HashSet::new();
    for (i, (cmd, config)) in cases.iter().enumerate() {
        let a = tmp.path().join(format!("{i}a"));
        let b = tmp.path().join(format!("{i}b"));
        let ra = run_cli(&[cmd, "--trials", "3"], config, &a);
        let rb = run_cli(&[cmd, "--trials", "3", "--workers", "2"], config, &b);
        assert_eq!(ra.0, 0, "{cmd} {config} exited with {}", ra.0);
        assert_eq!(ra, rb, "{cmd} {config}: exit code or stdout differ");
        let (fa, fb) = (dir_contents(&a), dir_contents(&b));
        assert!(!fa.is_empty());
        assert!(fa == fb, "{cmd} {config}: output files differ");
        files += fa.len();
        commands.insert(*cmd);
    }
    assert_eq!(commands.len(), 5);
    format!("{} runs of 5 commands repeated, {files} files byte-identical", cases.len())
}
