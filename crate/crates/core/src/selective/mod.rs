//! Batch selective classifiers.
//!
//! Each classifier is fit once to a labeled sample and afterwards maps a
//! point to a label or to an abstention. Test labels are never shown to a
//! fitted classifier.

mod affine;
mod alpha;
mod css;
mod envelope;
mod erm;
mod relaxed_css;
mod wm;

pub use affine::{AffineConsistentSelective, AffineGridClass};
pub use alpha::{alpha_interpolated_fit, AlphaInterpolated};
pub use css::{css_abstain_bound, css_fit, css_maximality_check, Css};
pub use envelope::upper_envelope_bound;
pub use erm::{erm_finite, ErmResult};
pub use relaxed_css::{relaxed_css_fit, relaxed_css_threshold, vc_surrogate, RelaxedCss};
pub use wm::{wm_bounds, wm_fit, WeightedMajority, WmBoundConstants, WmBounds, WmConfig};

use crate::rng::CoinStream;
use crate::types::{Decision, Label};

/// A fitted predictor `X -> {-1, +1, abstain}`.
///
/// `coins` supplies randomness to randomized strategies; deterministic ones
/// ignore it. Randomized strategies draw exactly one coin per call.
pub trait SelectiveClassifier<P: ?Sized> {
    fn decide(&self, x: &P, coins: &mut CoinStream) -> Decision<Label>;

    fn name(&self) -> String;

    fn params(&self) -> String {
        String::new()
    }

    /// Seed for the coin stream used when this classifier is evaluated.
    fn coin_seed(&self) -> u64 {
        0
    }
}

impl<P: ?Sized, F> SelectiveClassifier<P> for F
where
    F: Fn(&P) -> Decision<Label>,
{
    fn decide(&self, x: &P, _coins: &mut CoinStream) -> Decision<Label> {
        self(x)
    }

    fn name(&self) -> String {
        "closure".into()
    }
}
