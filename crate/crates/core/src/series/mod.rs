//! Truncated harmonic multivalent functions
//!
//! ```text
//! f = h + conj(g),  h(z) = z^ℓ + Σ_{κ=ℓ+1}^{N} a_κ z^κ,  g(z) = Σ_{κ=ℓ}^{N} b_κ z^κ
//! ```
//!
//! A [`HarmonicSeries`] is the harmonic polynomial itself; no tail is implied.

mod grid;
pub(crate) mod json;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use grid::DiskGrid;

/// Which half of `f = h + conj(g)` an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    #[serde(rename = "analytic")]
    Analytic,
    #[serde(rename = "co-analytic")]
    CoAnalytic,
}

impl std::str::FromStr for Part {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Part::Analytic),
            "co-analytic" | "coanalytic" => Ok(Part::CoAnalytic),
            other => Err(Error::Domain(format!(
                "part must be 'analytic' or 'co-analytic', got '{other}'"
            ))),
        }
    }
}

/// Sparse coefficient tables of a truncated harmonic multivalent function.
///
/// The `z^ℓ` coefficient of `h` is fixed to 1 and not stored. Absent indices
/// are zero; exact zeros are dropped at construction so that two series with
/// the same coefficients compare equal.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicSeries {
    ell: u32,
    truncation: u32,
    a: BTreeMap<u32, Complex64>,
    b: BTreeMap<u32, Complex64>,
}

impl HarmonicSeries {
    pub fn new(
        ell: u32,
        truncation: u32,
        a: BTreeMap<u32, Complex64>,
        b: BTreeMap<u32, Complex64>,
    ) -> Result<Self> {
        if ell == 0 {
            return Err(Error::InvalidParams("valence ell must be >= 1".into()));
        }
        if truncation < ell {
            return Err(Error::InvalidParams(format!(
                "truncation {truncation} is below the valence {ell}"
            )));
        }
        for (&k, c) in &a {
            if k <= ell || k > truncation {
                return Err(Error::InvalidParams(format!(
                    "a-index {k} outside [{}, {truncation}]",
                    ell + 1
                )));
            }
            check_finite(c, "a", k)?;
        }
        for (&k, c) in &b {
            if k < ell || k > truncation {
                return Err(Error::InvalidParams(format!(
                    "b-index {k} outside [{ell}, {truncation}]"
                )));
            }
            check_finite(c, "b", k)?;
        }
        Ok(HarmonicSeries {
            ell,
            truncation,
            a: prune(a),
            b: prune(b),
        })
    }

    /// `f(z) = z^ℓ`.
    pub fn monomial(ell: u32) -> Result<Self> {
        Self::new(ell, ell, BTreeMap::new(), BTreeMap::new())
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn a(&self) -> &BTreeMap<u32, Complex64> {
        &self.a
    }

    pub fn b(&self) -> &BTreeMap<u32, Complex64> {
        &self.b
    }

    pub fn a_coeff(&self, kappa: u32) -> Complex64 {
        self.a.get(&kappa).copied().unwrap_or_default()
    }

    pub fn b_coeff(&self, kappa: u32) -> Complex64 {
        self.b.get(&kappa).copied().unwrap_or_default()
    }

    /// Same coefficients, different truncation order.
    pub fn with_truncation(&self, truncation: u32) -> Result<Self> {
        Self::new(self.ell, truncation, self.a.clone(), self.b.clone())
    }

    /// `|b_ℓ| < 1`. Reported by callers; never enforced.
    pub fn b_ell_below_one(&self) -> bool {
        self.b_coeff(self.ell).norm() < 1.0
    }

    /// True when every stored coefficient is real and nonnegative.
    pub fn has_nonnegative_real_coefficients(&self) -> bool {
        self.a
            .values()
            .chain(self.b.values())
            .all(|c| c.im == 0.0 && c.re >= 0.0)
    }

    /// Rebuild with each stored coefficient replaced by `map(part, κ, c)`.
    pub(crate) fn map_coefficients<F>(&self, map: F) -> Self
    where
        F: Fn(Part, u32, Complex64) -> Complex64,
    {
        let a = self
            .a
            .iter()
            .map(|(&k, &c)| (k, map(Part::Analytic, k, c)))
            .collect();
        let b = self
            .b
            .iter()
            .map(|(&k, &c)| (k, map(Part::CoAnalytic, k, c)))
            .collect();
        HarmonicSeries {
            ell: self.ell,
            truncation: self.truncation,
            a: prune(a),
            b: prune(b),
        }
    }

    pub(crate) fn from_parts_unchecked(
        ell: u32,
        truncation: u32,
        a: BTreeMap<u32, Complex64>,
        b: BTreeMap<u32, Complex64>,
    ) -> Self {
        HarmonicSeries {
            ell,
            truncation,
            a: prune(a),
            b: prune(b),
        }
    }

    /// Analytic-part terms including the unit leading coefficient.
    pub(crate) fn analytic_terms(&self) -> impl Iterator<Item = (u32, Complex64)> + '_ {
        std::iter::once((self.ell, Complex64::new(1.0, 0.0)))
            .chain(self.a.iter().map(|(&k, &c)| (k, c)))
    }

    pub(crate) fn coanalytic_terms(&self) -> impl Iterator<Item = (u32, Complex64)> + '_ {
        self.b.iter().map(|(&k, &c)| (k, c))
    }
}

fn check_finite(c: &Complex64, table: &str, k: u32) -> Result<()> {
    if c.re.is_finite() && c.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{table}[{k}] is not finite")))
    }
}

fn prune(mut table: BTreeMap<u32, Complex64>) -> BTreeMap<u32, Complex64> {
    table.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    table
}

pub(crate) fn check_in_disk(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() && z.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("|z| must be < 1, got z = {z}")))
    }
}

/// `Σ c_κ · κ(κ-1)...(κ-order+1) · z^(κ-order)`.
fn sum_derivative<I>(terms: I, order: u32, z: Complex64) -> Complex64
where
    I: Iterator<Item = (u32, Complex64)>,
{
    terms
        .filter(|&(k, _)| k >= order)
        .map(|(k, c)| {
            let falling: f64 = (0..order).map(|j| f64::from(k - j)).product();
            c * falling * z.powu(k - order)
        })
        .sum()
}

/// `h(z) + conj(g(z))`.
pub fn evaluate(f: &HarmonicSeries, z: Complex64) -> Result<Complex64> {
    check_in_disk(z)?;
    let h = sum_derivative(f.analytic_terms(), 0, z);
    let g = sum_derivative(f.coanalytic_terms(), 0, z);
    Ok(h + g.conj())
}

/// First or second derivative of `h` or `g` at `z`. No conjugation is applied.
pub fn eval_part_derivative(
    f: &HarmonicSeries,
    part: Part,
    order: u32,
    z: Complex64,
) -> Result<Complex64> {
    if !(order == 1 || order == 2) {
        return Err(Error::Domain(format!("derivative order must be 1 or 2, got {order}")));
    }
    check_in_disk(z)?;
    Ok(match part {
        Part::Analytic => sum_derivative(f.analytic_terms(), order, z),
        Part::CoAnalytic => sum_derivative(f.coanalytic_terms(), order, z),
    })
}

/// `|h'(z)| - |g'(z)|`; positive means sense-preserving at `z`.
pub fn sense_gap(f: &HarmonicSeries, z: Complex64) -> Result<f64> {
    let dh = eval_part_derivative(f, Part::Analytic, 1, z)?;
    let dg = eval_part_derivative(f, Part::CoAnalytic, 1, z)?;
    Ok(dh.norm() - dg.norm())
}

/// Coefficient-wise affine combination `Σ w_i f_i` with `Σ w_i = 1`.
pub fn linear_combine(terms: &[(f64, &HarmonicSeries)]) -> Result<HarmonicSeries> {
    let (_, first) = terms
        .first()
        .ok_or_else(|| Error::InvalidParams("linear_combine needs at least one term".into()))?;
    let ell = first.ell;
    for (_, f) in terms {
        if f.ell != ell {
            return Err(Error::ValenceMismatch { left: ell, right: f.ell });
        }
    }
    let sum: f64 = terms.iter().map(|(w, _)| w).sum();
    if !((sum - 1.0).abs() <= 1e-12) {
        return Err(Error::Normalization { sum });
    }
    let truncation = terms.iter().map(|(_, f)| f.truncation).max().unwrap_or(ell);

    let mut a: BTreeMap<u32, Complex64> = BTreeMap::new();
    let mut b: BTreeMap<u32, Complex64> = BTreeMap::new();
    for &(w, f) in terms {
        for (&k, &c) in &f.a {
            *a.entry(k).or_default() += c * w;
        }
        for (&k, &c) in &f.b {
            *b.entry(k).or_default() += c * w;
        }
    }
    Ok(HarmonicSeries::from_parts_unchecked(ell, truncation, a, b))
}
