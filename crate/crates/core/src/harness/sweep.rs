use serde::{Deserialize, Serialize};

use super::bounds::BoundReport;
use super::config::{AlgorithmConfig, ExperimentConfig, SweepParam};
use super::run::run_experiment;
use crate::error::{Error, Result};
use crate::metrics::RiskCoveragePoint;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    /// Pooled over all trials.
    pub point: RiskCoveragePoint,
    /// `c*` on the widest zero-error point, `r*` on the widest point.
    pub tags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub param: SweepParam,
    pub algorithm: String,
    pub instance: String,
    pub seed: u64,
    pub trials: usize,
    pub points: Vec<SweepPoint>,
    pub bounds: Vec<BoundReport>,
}

impl SweepOutput {
    pub fn violations(&self) -> Vec<&BoundReport> {
        self.bounds.iter().filter(|b| b.violated()).collect()
    }
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Alpha => "alpha",
            SweepParam::WmThreshold => "wm_threshold",
            SweepParam::Budget => "budget",
            SweepParam::RelaxedCssThreshold => "relaxed_css_threshold",
        }
    }
}

fn with_param(cfg: &ExperimentConfig, param: SweepParam, v: f64) -> Result<ExperimentConfig> {
    let mut c = cfg.clone();
    let mismatch = || {
        Error::config(
            "sweep.param",
            format!("`{}` does not apply to algorithm `{}`", param.as_str(), cfg.algorithm.name()),
        )
    };
    match (param, &mut c.algorithm) {
        (SweepParam::Alpha, AlgorithmConfig::Alpha { alpha }) => *alpha = v,
        (SweepParam::WmThreshold, AlgorithmConfig::Wm { threshold, .. })
        | (SweepParam::RelaxedCssThreshold, AlgorithmConfig::RelaxedCss { threshold, .. }) => *threshold = Some(v),
        (SweepParam::Budget, AlgorithmConfig::RelaxedEnumeration { budget })
        | (SweepParam::Budget, AlgorithmConfig::LinsepRelaxed { budget, .. }) => {
            if !(v >= 0.0 && v.fract() == 0.0) {
                return Err(Error::config("sweep.values", format!("budget must be a nonnegative integer, got {v}")));
            }
            *budget = v as usize;
        }
        _ => return Err(mismatch()),
    }
    Ok(c)
}

/// One pooled risk-coverage point per grid value. Trials reuse the same
/// derived seeds at every grid value, so the curve compares strategies on
/// common data and common coins.
pub fn sweep_risk_coverage(cfg: &ExperimentConfig, param: SweepParam, grid: &[f64]) -> Result<SweepOutput> {
    if grid.is_empty() {
        return Err(Error::config("sweep.values", "sweep grid is empty"));
    }
    let mut points = Vec::with_capacity(grid.len());
    let mut bounds = Vec::new();
    for &v in grid {
        let out = run_experiment(&with_param(cfg, param, v)?)?;
        let t = out.summary.totals;
        points.push(SweepPoint {
            value: v,
            point: RiskCoveragePoint {
                coverage: if t.rounds == 0 { 0.0 } else { t.predictions as f64 / t.rounds as f64 },
                risk_on_predicted: (t.predictions > 0).then(|| t.mistakes as f64 / t.predictions as f64),
                predicted: t.predictions,
                wrong: t.mistakes,
                total: t.rounds,
                params: format!("{}={v}", param.as_str()),
            },
            tags: Vec::new(),
        });
        bounds.extend(out.summary.bounds.into_iter().map(|mut b| {
            b.name = format!("{}={v}: {}", param.as_str(), b.name);
            b
        }));
    }
    tag_endpoints(&mut points);
    Ok(SweepOutput {
        param,
        algorithm: cfg.algorithm.name().into(),
        instance: cfg.instance.params.kind().into(),
        seed: cfg.seed,
        trials: cfg.trials,
        points,
        bounds,
    })
}

fn widest(points: &[SweepPoint], keep: impl Fn(&SweepPoint) -> bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, p) in points.iter().enumerate() {
        if keep(p) && best.is_none_or(|b| p.point.coverage >= points[b].point.coverage) {
            best = Some(i);
        }
    }
    best
}

fn tag_endpoints(points: &mut [SweepPoint]) {
    if let Some(i) = widest(points, |p| p.point.wrong == 0) {
        points[i].tags.push("c*".into());
    }
    if let Some(i) = widest(points, |_| true) {
        points[i].tags.push("r*".into());
    }
}
