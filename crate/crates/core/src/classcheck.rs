//! Membership in the class defined by `Re{A(z)/B(z)} >= σ`, where
//!
//! ```text
//! A = z²(Hh)'' - conj(z²(Hg)''),   B = z(Hh)' + conj(z(Hg)')
//! ```
//!
//! and the coefficient condition `S(f) <= ℓ(ℓ-2-σ)` with
//!
//! ```text
//! S(f) = Σ_{κ>ℓ} κ(κ-σ) Φ_κ |a_κ| + Σ_{κ>=ℓ} κ(κ-2-σ) Φ_κ |b_κ|.
//! ```
//!
//! The coefficient margin `ℓ(ℓ-2-σ) - S(f)` and the grid minimum of
//! `Re(A/B)` are reported separately and never merged into one verdict.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::operator::{apply_operator, MultiplierTable, OperatorParams};
use crate::series::{self, DiskGrid, HarmonicSeries, Part};

/// Operator parameters plus the order `σ ∈ [0, 1)`.
/// JSON: `{"operator": {...}, "sigma": 0.3}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawClassParams", into = "RawClassParams")]
pub struct ClassParams {
    op: OperatorParams,
    sigma: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClassParams {
    operator: OperatorParams,
    sigma: f64,
}

impl TryFrom<RawClassParams> for ClassParams {
    type Error = Error;

    fn try_from(raw: RawClassParams) -> Result<Self> {
        ClassParams::new(raw.operator, raw.sigma)
    }
}

impl From<ClassParams> for RawClassParams {
    fn from(cp: ClassParams) -> Self {
        RawClassParams {
            operator: cp.op,
            sigma: cp.sigma,
        }
    }
}

impl ClassParams {
    pub fn new(op: OperatorParams, sigma: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&sigma) {
            return Err(Error::InvalidParams(format!("sigma must lie in [0, 1), got {sigma}")));
        }
        Ok(ClassParams { op, sigma })
    }

    pub fn op(&self) -> &OperatorParams {
        &self.op
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn ell(&self) -> u32 {
        self.op.ell()
    }

    /// The normalisation constant `ℓ(ℓ-2-σ)`.
    pub fn bound(&self) -> f64 {
        let ell = f64::from(self.ell());
        ell * (ell - 2.0 - self.sigma)
    }

    /// `ℓ - 2 - σ <= 0`: the bound is not positive.
    pub fn is_degenerate(&self) -> bool {
        f64::from(self.ell()) - 2.0 - self.sigma <= 0.0
    }

    pub(crate) fn require_nondegenerate(&self) -> Result<()> {
        if self.is_degenerate() {
            Err(Error::Degenerate { bound: self.bound() })
        } else {
            Ok(())
        }
    }
}

/// `(κ(κ-σ), κ(κ-2-σ))`, the analytic and co-analytic coefficient weights.
pub fn weight_pair(kappa: u32, sigma: f64) -> (f64, f64) {
    let k = f64::from(kappa);
    (k * (k - 1.0) + k * (1.0 - sigma), k * (k - 1.0) - k * (1.0 + sigma))
}

fn check_valence(f: &HarmonicSeries, cp: &ClassParams) -> Result<()> {
    if f.ell() != cp.ell() {
        return Err(Error::ValenceMismatch { left: f.ell(), right: cp.ell() });
    }
    Ok(())
}

/// `S(f)` over the stored coefficients.
pub fn coefficient_sum(f: &HarmonicSeries, cp: &ClassParams) -> Result<f64> {
    check_valence(f, cp)?;
    let table = MultiplierTable::new(cp.op(), f.truncation())?;
    let a_sum: f64 = f
        .a()
        .iter()
        .map(|(&k, c)| weight_pair(k, cp.sigma).0 * table.get(k) * c.norm())
        .fold(0.0, |acc, x| acc + x);
    let b_sum: f64 = f
        .b()
        .iter()
        .map(|(&k, c)| weight_pair(k, cp.sigma).1 * table.get(k) * c.norm())
        .fold(0.0, |acc, x| acc + x);
    // Explicit +0.0 seeds: an empty f64 `sum()` is -0.0.
    Ok(a_sum + b_sum)
}

/// `ℓ(ℓ-2-σ) - S(f)`; nonnegative is the sufficient membership condition.
pub fn margin(f: &HarmonicSeries, cp: &ClassParams) -> Result<f64> {
    Ok(cp.bound() - coefficient_sum(f, cp)?)
}

/// `|θ + (1-α)| >= |θ - (1+α)|`, which holds exactly when `Re θ >= α`.
pub fn re_ge_alpha_modulus(theta: Complex64, alpha: f64) -> bool {
    (theta + (1.0 - alpha)).norm() >= (theta - (1.0 + alpha)).norm()
}

/// Evaluates `A/B` for one function, with `H` applied once up front.
///
/// Both `A` and `B` are divided by `z^ℓ` before the quotient is taken, so
/// `f = z^ℓ` gives exactly `ℓ - 1` and small radii do not underflow.
pub(crate) struct RatioEvaluator {
    ell: u32,
    analytic: Vec<(u32, Complex64)>,
    coanalytic: Vec<(u32, Complex64)>,
}

impl RatioEvaluator {
    pub(crate) fn new(f: &HarmonicSeries, cp: &ClassParams) -> Result<Self> {
        check_valence(f, cp)?;
        let hf = apply_operator(f, cp.op())?;
        Ok(RatioEvaluator {
            ell: f.ell(),
            analytic: hf.a().iter().map(|(&k, &c)| (k, c)).collect(),
            coanalytic: hf.b().iter().map(|(&k, &c)| (k, c)).collect(),
        })
    }

    pub(crate) fn ratio(&self, z: Complex64) -> Result<Complex64> {
        let ell = self.ell;
        let l = f64::from(ell);
        if z == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(l - 1.0, 0.0));
        }
        let mut num = Complex64::new(l * (l - 1.0), 0.0);
        let mut den = Complex64::new(l, 0.0);
        for &(k, c) in &self.analytic {
            let kf = f64::from(k);
            let term = c * z.powu(k - ell);
            num += term * (kf * (kf - 1.0));
            den += term * kf;
        }
        if !self.coanalytic.is_empty() {
            // conj(z^κ) / z^ℓ = conj(z)^(κ-ℓ) · (conj(z)/z)^ℓ
            let zc = z.conj();
            let rotation = (zc / z).powu(ell);
            let mut g2 = Complex64::new(0.0, 0.0);
            let mut g1 = Complex64::new(0.0, 0.0);
            for &(k, c) in &self.coanalytic {
                let kf = f64::from(k);
                let term = c.conj() * zc.powu(k - ell);
                g2 += term * (kf * (kf - 1.0));
                g1 += term * kf;
            }
            num -= g2 * rotation;
            den += g1 * rotation;
        }
        if den.norm() * z.norm().powi(ell as i32) < 1e-300 {
            return Err(Error::Singular { z });
        }
        Ok(num / den)
    }
}

/// `A(z)/B(z)`; at `z = 0` the limit `ℓ - 1` is returned.
pub fn analytic_ratio(f: &HarmonicSeries, cp: &ClassParams, z: Complex64) -> Result<Complex64> {
    series::check_in_disk(z)?;
    RatioEvaluator::new(f, cp)?.ratio(z)
}

/// Minimum of `value(z)` over the grid with its location.
///
/// Ties go to the smaller radius, then the smaller angle index. On error the
/// first failing point in that same order is reported.
pub(crate) fn scan_grid<F>(grid: &DiskGrid, exec: Execution, value: F) -> Result<(f64, Complex64)>
where
    F: Fn(Complex64) -> Result<f64> + Sync + Send,
{
    let per_radius = exec.map_indexed(grid.r_values().len(), |i| -> Result<(f64, Complex64)> {
        let mut best: Option<(f64, Complex64)> = None;
        for z in grid.circle(i) {
            let v = value(z)?;
            if best.is_none_or(|(b, _)| v < b) {
                best = Some((v, z));
            }
        }
        Ok(best.expect("grid circles are nonempty"))
    });
    let mut best: Option<(f64, Complex64)> = None;
    for item in per_radius {
        let (v, z) = item?;
        if best.is_none_or(|(b, _)| v < b) {
            best = Some((v, z));
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// `min Re(A/B)` over the grid and the point attaining it.
pub fn min_re_over_grid(
    f: &HarmonicSeries,
    cp: &ClassParams,
    grid: &DiskGrid,
) -> Result<(f64, Complex64)> {
    min_re_over_grid_with(f, cp, grid, Execution::default())
}

pub fn min_re_over_grid_with(
    f: &HarmonicSeries,
    cp: &ClassParams,
    grid: &DiskGrid,
    exec: Execution,
) -> Result<(f64, Complex64)> {
    let evaluator = RatioEvaluator::new(f, cp)?;
    scan_grid(grid, exec, |z| Ok(evaluator.ratio(z)?.re))
}

/// `min (|h'| - |g'|)` over the grid and the point attaining it.
pub fn sense_gap_min_over_grid(
    f: &HarmonicSeries,
    grid: &DiskGrid,
    exec: Execution,
) -> Result<(f64, Complex64)> {
    scan_grid(grid, exec, |z| series::sense_gap(f, z))
}

/// Both membership tests for one function on one grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub margin: f64,
    pub coefficient_sum: f64,
    pub bound: f64,
    pub min_re: f64,
    #[serde(with = "crate::series::json::complex_pair")]
    pub argmin_z: Complex64,
    pub sense_gap_min: f64,
    pub sufficient_verdict: bool,
    pub analytic_verdict: bool,
    pub degenerate: bool,
    pub grid: DiskGrid,
}

pub fn check_membership(
    f: &HarmonicSeries,
    cp: &ClassParams,
    grid: &DiskGrid,
    exec: Execution,
) -> Result<MembershipReport> {
    let coefficient_sum = coefficient_sum(f, cp)?;
    let bound = cp.bound();
    let margin = bound - coefficient_sum;
    let (min_re, argmin_z) = min_re_over_grid_with(f, cp, grid, exec)?;
    let (sense_gap_min, _) = sense_gap_min_over_grid(f, grid, exec)?;
    Ok(MembershipReport {
        margin,
        coefficient_sum,
        bound,
        min_re,
        argmin_z,
        sense_gap_min,
        sufficient_verdict: margin >= 0.0,
        analytic_verdict: min_re >= cp.sigma,
        degenerate: cp.is_degenerate(),
        grid: grid.clone(),
    })
}

/// Convex weights over the extreme points: `X_ℓ` on `z^ℓ`, `X_κ` on the
/// analytic single-term functions, `Y_κ` on the co-analytic ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights", into = "RawWeights")]
pub struct ExtremalWeights {
    x_ell: f64,
    x: BTreeMap<u32, f64>,
    y: BTreeMap<u32, f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    x_ell: f64,
    #[serde(default)]
    x: BTreeMap<u32, f64>,
    #[serde(default)]
    y: BTreeMap<u32, f64>,
}

impl TryFrom<RawWeights> for ExtremalWeights {
    type Error = Error;

    fn try_from(raw: RawWeights) -> Result<Self> {
        ExtremalWeights::new(raw.x_ell, raw.x, raw.y)
    }
}

impl From<ExtremalWeights> for RawWeights {
    fn from(w: ExtremalWeights) -> Self {
        RawWeights {
            x_ell: w.x_ell,
            x: w.x,
            y: w.y,
        }
    }
}

impl ExtremalWeights {
    pub fn new(x_ell: f64, x: BTreeMap<u32, f64>, y: BTreeMap<u32, f64>) -> Result<Self> {
        let all = std::iter::once(&x_ell).chain(x.values()).chain(y.values());
        if all.clone().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParams("extremal weights must be finite and >= 0".into()));
        }
        let sum: f64 = all.sum();
        if !((sum - 1.0).abs() <= 1e-12) {
            return Err(Error::Normalization { sum });
        }
        Ok(ExtremalWeights { x_ell, x, y })
    }

    /// All weight on a single extreme point. `(Analytic, ℓ)` selects `z^ℓ`.
    pub fn unit(part: Part, kappa: u32, ell: u32) -> Result<Self> {
        match part {
            Part::Analytic if kappa == ell => Self::new(1.0, BTreeMap::new(), BTreeMap::new()),
            Part::Analytic => Self::new(0.0, [(kappa, 1.0)].into(), BTreeMap::new()),
            Part::CoAnalytic => Self::new(0.0, BTreeMap::new(), [(kappa, 1.0)].into()),
        }
    }

    pub fn x_ell(&self) -> f64 {
        self.x_ell
    }

    pub fn x(&self) -> &BTreeMap<u32, f64> {
        &self.x
    }

    pub fn y(&self) -> &BTreeMap<u32, f64> {
        &self.y
    }
}

/// The convex combination of extreme points with the given weights:
/// `a_κ = ℓ(ℓ-2-σ) X_κ / (κ(κ-σ) Φ_κ)`, `b_κ = ℓ(ℓ-2-σ) Y_κ / (κ(κ-2-σ) Φ_κ)`.
///
/// Its margin is `ℓ(ℓ-2-σ) · X_ℓ`.
pub fn extremal_function(weights: &ExtremalWeights, cp: &ClassParams) -> Result<HarmonicSeries> {
    cp.require_nondegenerate()?;
    let ell = cp.ell();
    if let Some(&k) = weights.x.keys().find(|&&k| k <= ell) {
        return Err(Error::InvalidParams(format!("X index {k} must exceed ell = {ell}")));
    }
    if let Some(&k) = weights.y.keys().find(|&&k| k < ell) {
        return Err(Error::InvalidParams(format!("Y index {k} must be >= ell = {ell}")));
    }
    let truncation = weights
        .x
        .keys()
        .chain(weights.y.keys())
        .copied()
        .max()
        .unwrap_or(ell)
        .max(ell);
    let table = MultiplierTable::new(cp.op(), truncation)?;
    let bound = cp.bound();
    let a = weights
        .x
        .iter()
        .map(|(&k, &w)| {
            let coeff = bound * w / (weight_pair(k, cp.sigma).0 * table.get(k));
            (k, Complex64::new(coeff, 0.0))
        })
        .collect();
    let b = weights
        .y
        .iter()
        .map(|(&k, &w)| {
            let coeff = bound * w / (weight_pair(k, cp.sigma).1 * table.get(k));
            (k, Complex64::new(coeff, 0.0))
        })
        .collect();
    HarmonicSeries::new(ell, truncation, a, b)
}

/// Hadamard product: `a_κ c_κ` and `b_κ d_κ`, leading `z^ℓ` kept.
///
/// The result is truncated at the smaller of the two truncation orders,
/// beyond which every product vanishes.
pub fn convolve(f: &HarmonicSeries, m: &HarmonicSeries) -> Result<HarmonicSeries> {
    if f.ell() != m.ell() {
        return Err(Error::ValenceMismatch { left: f.ell(), right: m.ell() });
    }
    let truncation = f.truncation().min(m.truncation());
    let products = |left: &BTreeMap<u32, Complex64>, right: &BTreeMap<u32, Complex64>| {
        left.iter()
            .filter_map(|(k, c)| right.get(k).map(|d| (*k, c * d)))
            .filter(|(k, _)| *k <= truncation)
            .collect::<BTreeMap<_, _>>()
    };
    HarmonicSeries::new(f.ell(), truncation, products(f.a(), m.a()), products(f.b(), m.b()))
}

/// Bernardi transform on coefficients: every stored `κ` is scaled by
/// `(u+ℓ)/(κ+u)`; the leading `z^ℓ` is unchanged.
pub fn bernardi(f: &HarmonicSeries, u: f64) -> Result<HarmonicSeries> {
    if !(u.is_finite() && u > -1.0) {
        return Err(Error::Domain(format!("Bernardi parameter u must exceed -1, got {u}")));
    }
    let ell = f64::from(f.ell());
    Ok(f.map_coefficients(|_, k, c| c * ((u + ell) / (f64::from(k) + u))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pq::PQParams;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn class(ell: u32, sigma: f64) -> ClassParams {
        let op = OperatorParams::new(PQParams::new(0.9, 0.5).unwrap(), ell, 1.0, 1).unwrap();
        ClassParams::new(op, sigma).unwrap()
    }

    // Φ_4 for p=0.9, q=0.5, ℓ=3, δ=1, t=1 from the ratio recurrence and
    // geometric sums: Φ_3 = [5]_q, Φ_4 = Φ_3 · [6]_q/[5]_q · [4]_{p,q}/[1]_{p,q}.
    fn phi4_oracle() -> f64 {
        let qsum = |n: i32| (0..n).map(|k| 0.5f64.powi(k)).sum::<f64>();
        let pqsum = |n: i32| (0..n).map(|k| 0.9f64.powi(n - 1 - k) * 0.5f64.powi(k)).sum::<f64>();
        qsum(5) * (qsum(6) / qsum(5)) * (pqsum(4) / pqsum(1))
    }

    #[test]
    fn class_params_validation() {
        let op = *class(3, 0.3).op();
        assert!(ClassParams::new(op, 1.0).is_err());
        assert!(ClassParams::new(op, -0.1).is_err());
        assert!(!class(3, 0.3).is_degenerate());
        assert!(class(2, 0.0).is_degenerate());
        assert!(class(1, 0.5).is_degenerate());
        assert!((class(3, 0.3).bound() - 2.1).abs() < 1e-15);
        let json = r#"{"operator": {"p": 0.9, "q": 0.5, "ell": 3, "delta": 1.0, "t": 1}, "sigma": 0.3}"#;
        assert_eq!(serde_json::from_str::<ClassParams>(json).unwrap(), class(3, 0.3));
    }

    #[test]
    fn weight_pair_examples() {
        assert_eq!(weight_pair(3, 0.0), (9.0, 3.0));
        let (x, y) = weight_pair(4, 0.3);
        assert!((x - 14.8).abs() < 1e-14 && (y - 6.8).abs() < 1e-14);
        assert_eq!(weight_pair(1, 0.0), (1.0, -1.0));
    }

    #[test]
    fn coefficient_sum_examples() {
        let cp = class(3, 0.3);
        assert_eq!(coefficient_sum(&HarmonicSeries::monomial(3).unwrap(), &cp).unwrap(), 0.0);

        let f = HarmonicSeries::new(3, 4, [(4, c(0.01, 0.0))].into(), BTreeMap::new()).unwrap();
        let want = 0.148 * phi4_oracle();
        assert!((coefficient_sum(&f, &cp).unwrap() - want).abs() < 1e-14);

        assert!(matches!(
            coefficient_sum(&HarmonicSeries::monomial(4).unwrap(), &cp),
            Err(Error::ValenceMismatch { .. })
        ));
    }

    #[test]
    fn margin_examples() {
        let cp = class(3, 0.3);
        let z3 = HarmonicSeries::monomial(3).unwrap();
        assert!((margin(&z3, &cp).unwrap() - 2.1).abs() < 1e-15);

        let w = ExtremalWeights::unit(Part::Analytic, 4, 3).unwrap();
        let e = extremal_function(&w, &cp).unwrap();
        assert!(margin(&e, &cp).unwrap().abs() <= 1e-12 * 2.1);

        let f1 = HarmonicSeries::new(3, 6, [(4, c(0.01, 0.0))].into(), [(5, c(0.002, 0.0))].into()).unwrap();
        let f2 = HarmonicSeries::new(3, 6, [(6, c(0.001, 0.0))].into(), [(3, c(0.2, 0.0))].into()).unwrap();
        let mu = 0.35;
        let g = series::linear_combine(&[(mu, &f1), (1.0 - mu, &f2)]).unwrap();
        let affine = mu * margin(&f1, &cp).unwrap() + (1.0 - mu) * margin(&f2, &cp).unwrap();
        assert!((margin(&g, &cp).unwrap() - affine).abs() <= 1e-12);
    }

    #[test]
    fn modulus_criterion_examples() {
        assert!(re_ge_alpha_modulus(c(2.0, 0.0), 1.0));
        assert!(!re_ge_alpha_modulus(c(0.0, 1.0), 0.5));
        for alpha in [0.0, 0.25, 0.5, 0.9, 3.0] {
            let theta = c(alpha, 0.0);
            assert!(re_ge_alpha_modulus(theta, alpha));
            assert!(((theta + (1.0 - alpha)).norm() - (theta - (1.0 + alpha)).norm()).abs() <= 1e-15);
        }
    }

    #[test]
    fn modulus_criterion_matches_real_part_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20_000 {
            let theta = Complex64::from_polar(
                10.0 * rng.random::<f64>().sqrt(),
                std::f64::consts::TAU * rng.random::<f64>(),
            );
            for alpha in [0.0, 0.25, 0.5, 0.9] {
                if (theta.re - alpha).abs() <= 1e-12 {
                    continue;
                }
                assert_eq!(re_ge_alpha_modulus(theta, alpha), theta.re >= alpha);
            }
        }
    }

    #[test]
    fn ratio_of_monomial_is_exact() {
        let cp = class(3, 0.3);
        let f = HarmonicSeries::monomial(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let z = Complex64::from_polar(
                0.999 * rng.random::<f64>(),
                std::f64::consts::TAU * rng.random::<f64>(),
            );
            let r = analytic_ratio(&f, &cp, z).unwrap();
            assert!((r - c(2.0, 0.0)).norm() <= 1e-12);
        }
        assert_eq!(analytic_ratio(&f, &cp, c(0.0, 0.0)).unwrap(), c(2.0, 0.0));
        assert!(analytic_ratio(&f, &cp, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn ratio_real_coefficients_real_axis() {
        let cp = class(3, 0.3);
        let a4 = 0.02;
        let f = HarmonicSeries::new(3, 4, [(4, c(a4, 0.0))].into(), BTreeMap::new()).unwrap();
        let phi4 = phi4_oracle();
        for x in [-0.9, -0.4, 0.3, 0.95] {
            let z = c(x, 0.0);
            let got = analytic_ratio(&f, &cp, z).unwrap();
            let z3 = x * x * x;
            let z4 = z3 * x;
            let want = (6.0 * z3 + 12.0 * phi4 * a4 * z4) / (3.0 * z3 + 4.0 * phi4 * a4 * z4);
            assert!(got.im.abs() < 1e-15);
            assert!((got.re - want).abs() < 1e-13);
        }
    }

    #[test]
    fn ratio_matches_direct_derivatives() {
        // Direct route through eval_part_derivative of H f, without z^ℓ normalisation.
        let cp = class(4, 0.6);
        let f = HarmonicSeries::new(
            4,
            8,
            [(5, c(0.01, 0.004)), (7, c(-0.002, 0.001))].into(),
            [(4, c(0.05, -0.02)), (6, c(0.003, 0.0))].into(),
        )
        .unwrap();
        let hf = apply_operator(&f, cp.op()).unwrap();
        for z in [c(0.3, 0.4), c(-0.7, 0.1), c(0.05, -0.9)] {
            let d1h = series::eval_part_derivative(&hf, Part::Analytic, 1, z).unwrap();
            let d2h = series::eval_part_derivative(&hf, Part::Analytic, 2, z).unwrap();
            let d1g = series::eval_part_derivative(&hf, Part::CoAnalytic, 1, z).unwrap();
            let d2g = series::eval_part_derivative(&hf, Part::CoAnalytic, 2, z).unwrap();
            let a = z * z * d2h - (z * z * d2g).conj();
            let b = z * d1h + (z * d1g).conj();
            let got = analytic_ratio(&f, &cp, z).unwrap();
            assert!((got - a / b).norm() < 1e-12, "{got} vs {}", a / b);
        }
    }

    #[test]
    fn singular_denominator_reported() {
        // b_ℓ Φ_ℓ = 1 makes B vanish wherever z^ℓ is purely imaginary.
        let cp = class(3, 0.3);
        let phi3: f64 = (0..5).map(|k| 0.5f64.powi(k)).sum();
        let f = HarmonicSeries::new(3, 3, BTreeMap::new(), [(3, c(1.0 / phi3, 0.0))].into()).unwrap();
        let z = Complex64::from_polar(0.5, std::f64::consts::FRAC_PI_6);
        let ev = RatioEvaluator::new(&f, &cp).unwrap();
        match ev.ratio(z) {
            Err(Error::Singular { z: at }) => assert_eq!(at, z),
            other => {
                // Rounding may leave a residue; it must then be tiny.
                let r = other.unwrap();
                assert!(r.norm() > 1e10, "expected blow-up, got {r}");
            }
        }
    }

    #[test]
    fn grid_minimum_and_tie_break() {
        let cp = class(3, 0.3);
        let grid = DiskGrid::uniform(8, 16, 0.9).unwrap();
        let f = HarmonicSeries::monomial(3).unwrap();
        let (m, z) = min_re_over_grid(&f, &cp, &grid).unwrap();
        assert_eq!(m, 2.0);
        assert_eq!(z, grid.point(0, 0));

        // Ties on the second radius: the earlier angle index wins.
        let (v, at) = scan_grid(&grid, Execution::Sequential, |z| {
            Ok(if z.norm() > 0.2 { 0.0 } else { 1.0 })
        })
        .unwrap();
        assert_eq!((v, at), (0.0, grid.point(1, 0)));
        let (_, at) = scan_grid(&grid, Execution::Parallel, |z| {
            Ok(if (z.arg() - 1.0).abs() < 0.5 { -1.0 } else { 0.0 })
        })
        .unwrap();
        assert_eq!(at, grid.point(0, 2));
    }

    #[test]
    fn grid_scan_identical_across_execution_modes() {
        let cp = class(3, 0.3);
        let f = HarmonicSeries::new(
            3,
            7,
            [(4, c(0.03, 0.0)), (7, c(0.001, 0.0))].into(),
            [(3, c(0.2, 0.0)), (5, c(0.004, 0.0))].into(),
        )
        .unwrap();
        let grid = DiskGrid::default();
        let seq = min_re_over_grid_with(&f, &cp, &grid, Execution::Sequential).unwrap();
        let par = min_re_over_grid_with(&f, &cp, &grid, Execution::Parallel).unwrap();
        assert_eq!(seq.0.to_bits(), par.0.to_bits());
        assert_eq!(seq.1, par.1);
    }

    #[test]
    fn membership_of_monomial() {
        let cp = class(3, 0.3);
        let r = check_membership(&HarmonicSeries::monomial(3).unwrap(), &cp, &DiskGrid::default(), Execution::default())
            .unwrap();
        assert!((r.margin - 2.1).abs() < 1e-15);
        assert_eq!(r.min_re, 2.0);
        assert!(r.sufficient_verdict && r.analytic_verdict && !r.degenerate);
        let json = serde_json::to_value(&r).unwrap();
        for key in ["margin", "coefficient_sum", "bound", "min_re", "argmin_z", "sense_gap_min",
                    "sufficient_verdict", "analytic_verdict", "degenerate", "grid"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn extremal_examples() {
        let cp = class(3, 0.3);
        let w = ExtremalWeights::new(1.0, BTreeMap::new(), BTreeMap::new()).unwrap();
        assert_eq!(extremal_function(&w, &cp).unwrap(), HarmonicSeries::monomial(3).unwrap());

        let e = extremal_function(&ExtremalWeights::unit(Part::Analytic, 4, 3).unwrap(), &cp).unwrap();
        assert_eq!(e.a().len(), 1);
        assert!(e.b().is_empty());
        let sum = 14.8 * phi4_oracle() * e.a_coeff(4).re;
        assert!((sum - 2.1).abs() < 1e-12);

        let half = ExtremalWeights::new(0.5, [(4, 0.5)].into(), BTreeMap::new()).unwrap();
        let e = extremal_function(&half, &cp).unwrap();
        assert!((margin(&e, &cp).unwrap() - 1.05).abs() < 1e-12);

        for k in 3..=13 {
            let mut parts = vec![Part::CoAnalytic];
            if k > 3 {
                parts.push(Part::Analytic);
            }
            for part in parts {
                let e = extremal_function(&ExtremalWeights::unit(part, k, 3).unwrap(), &cp).unwrap();
                assert!(margin(&e, &cp).unwrap().abs() <= 1e-12 * 2.1, "{part:?} {k}");
            }
        }

        assert!(matches!(
            extremal_function(&ExtremalWeights::unit(Part::Analytic, 3, 2).unwrap(), &class(2, 0.3)),
            Err(Error::Degenerate { .. })
        ));
        assert!(ExtremalWeights::new(0.5, [(4, 0.6)].into(), BTreeMap::new()).is_err());
        assert!(ExtremalWeights::new(1.5, [(4, -0.5)].into(), BTreeMap::new()).is_err());
        let low = ExtremalWeights::new(0.0, BTreeMap::new(), [(2, 1.0)].into()).unwrap();
        assert!(extremal_function(&low, &cp).is_err());
    }

    #[test]
    fn convolution_examples() {
        let f = HarmonicSeries::new(
            3,
            6,
            [(4, c(0.1, 0.2)), (6, c(-0.3, 0.0))].into(),
            [(3, c(0.2, -0.1)), (5, c(0.05, 0.05))].into(),
        )
        .unwrap();
        let ones = HarmonicSeries::new(
            3,
            6,
            (4..=6).map(|k| (k, c(1.0, 0.0))).collect(),
            (3..=6).map(|k| (k, c(1.0, 0.0))).collect(),
        )
        .unwrap();
        assert_eq!(convolve(&f, &ones).unwrap(), f);
        assert_eq!(convolve(&ones, &f).unwrap(), f);

        let m = HarmonicSeries::new(3, 6, [(4, c(0.5, -1.0))].into(), [(3, c(0.3, 0.3)), (6, c(1.0, 0.0))].into()).unwrap();
        assert_eq!(convolve(&f, &m).unwrap(), convolve(&m, &f).unwrap());

        let z3 = HarmonicSeries::monomial(3).unwrap();
        assert_eq!(convolve(&f, &z3).unwrap(), z3);
        assert!(convolve(&f, &HarmonicSeries::monomial(2).unwrap()).is_err());
    }

    #[test]
    fn bernardi_examples() {
        let f = HarmonicSeries::new(3, 4, [(4, c(0.5, 0.0))].into(), [(3, c(0.25, 0.1))].into()).unwrap();
        let g = bernardi(&f, 1.0).unwrap();
        assert_eq!(g.b_coeff(3), c(0.25, 0.1));
        assert!((g.a_coeff(4).re - 0.4).abs() < 1e-16);
        let z3 = HarmonicSeries::monomial(3).unwrap();
        assert_eq!(bernardi(&z3, 0.7).unwrap(), z3);
        assert!(bernardi(&f, -1.0).is_err());
        assert!(bernardi(&f, -0.5).is_ok());
    }
}
