use crate::error::{Error, Result};
use crate::types::FiniteHypothesisClass;

/// `2^n` hypotheses over the `2^n` points of `{0,1}^n`, hypothesis `i`
/// positive exactly on the point whose binary code is `i`.
pub fn gen_singleton_class(n: u32) -> Result<FiniteHypothesisClass> {
    if !(1..=20).contains(&n) {
        return Err(Error::invalid(format!("bits must lie in 1..=20, got {n}")));
    }
    FiniteHypothesisClass::singletons(1usize << n)
}
