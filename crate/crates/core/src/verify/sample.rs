use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classcheck::{weight_pair, ClassParams};
use crate::error::{Error, Result};
use crate::operator::MultiplierTable;
use crate::series::HarmonicSeries;

/// A seeded function with nonnegative real coefficients and margin >= 0.
///
/// Draws a budget fraction in `(0, 1]` and one positive share per index,
/// then spends `budget · ℓ(ℓ-2-σ)` of the coefficient sum across the indices
/// in proportion to their shares.
pub fn sample_in_class(cp: &ClassParams, truncation: u32, seed: u64) -> Result<HarmonicSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_in_class_from(cp, truncation, &mut rng)
}

pub(crate) fn sample_in_class_from<R: Rng>(
    cp: &ClassParams,
    truncation: u32,
    rng: &mut R,
) -> Result<HarmonicSeries> {
    cp.require_nondegenerate()?;
    let ell = cp.ell();
    if truncation <= ell {
        return Err(Error::InvalidParams(format!(
            "sampling needs truncation > ell, got {truncation} <= {ell}"
        )));
    }
    let budget = 1.0 - rng.random::<f64>();
    let a_shares: BTreeMap<u32, f64> = (ell + 1..=truncation)
        .map(|k| (k, 1.0 - rng.random::<f64>()))
        .collect();
    let b_shares: BTreeMap<u32, f64> = (ell..=truncation)
        .map(|k| (k, 1.0 - rng.random::<f64>()))
        .collect();
    in_class_from_shares(cp, truncation, budget, &a_shares, &b_shares)
}

/// Deterministic core of [`sample_in_class`]: coefficients chosen so that
/// `S(f) = budget · ℓ(ℓ-2-σ)` with index `κ` receiving `share_κ / Σ shares`
/// of it.
pub fn in_class_from_shares(
    cp: &ClassParams,
    truncation: u32,
    budget: f64,
    a_shares: &BTreeMap<u32, f64>,
    b_shares: &BTreeMap<u32, f64>,
) -> Result<HarmonicSeries> {
    cp.require_nondegenerate()?;
    if !(0.0..=1.0).contains(&budget) {
        return Err(Error::InvalidParams(format!("budget must lie in [0, 1], got {budget}")));
    }
    let shares = a_shares.values().chain(b_shares.values());
    if shares.clone().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::InvalidParams("shares must be finite and >= 0".into()));
    }
    let total: f64 = shares.sum();
    if budget > 0.0 && total <= 0.0 {
        return Err(Error::InvalidParams("a positive budget needs a positive share".into()));
    }
    let ell = cp.ell();
    let table = MultiplierTable::new(cp.op(), truncation)?;
    let spend = budget * cp.bound();
    let coefficient = |k: u32, share: f64, weight: f64| -> Complex64 {
        if budget == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(spend * (share / total) / (weight * table.get(k)), 0.0)
        }
    };
    let a = a_shares
        .iter()
        .map(|(&k, &s)| (k, coefficient(k, s, weight_pair(k, cp.sigma()).0)))
        .collect();
    let b = b_shares
        .iter()
        .map(|(&k, &s)| (k, coefficient(k, s, weight_pair(k, cp.sigma()).1)))
        .collect();
    HarmonicSeries::new(ell, truncation, a, b)
}
