//! The linear operator `H` as a coefficient multiplier:
//!
//! ```text
//! Φ_κ = ([κ + ℓ - 1]_q)^t · ([δ + ℓ]_{p,q})_{κ-ℓ} / [κ - ℓ]_{p,q}!
//! ```
//!
//! The leading `z^ℓ` of the analytic part is left unweighted; every stored
//! coefficient (including `b_ℓ`) is multiplied by its `Φ_κ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pq::{bracket_formula, bracket_q, PQParams};
use crate::series::HarmonicSeries;

/// Valence, shift, exponent and deformation pair. Serialises flat:
/// `{"p": 0.9, "q": 0.5, "ell": 3, "delta": 1.0, "t": 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperatorParams", into = "RawOperatorParams")]
pub struct OperatorParams {
    pq: PQParams,
    ell: u32,
    delta: f64,
    t: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperatorParams {
    p: f64,
    q: f64,
    ell: u32,
    delta: f64,
    t: u32,
}

impl TryFrom<RawOperatorParams> for OperatorParams {
    type Error = Error;

    fn try_from(raw: RawOperatorParams) -> Result<Self> {
        OperatorParams::new(PQParams::new(raw.p, raw.q)?, raw.ell, raw.delta, raw.t)
    }
}

impl From<OperatorParams> for RawOperatorParams {
    fn from(op: OperatorParams) -> Self {
        RawOperatorParams {
            p: op.pq.p(),
            q: op.pq.q(),
            ell: op.ell,
            delta: op.delta,
            t: op.t,
        }
    }
}

impl OperatorParams {
    pub fn new(pq: PQParams, ell: u32, delta: f64, t: u32) -> Result<Self> {
        if ell == 0 {
            return Err(Error::InvalidParams("valence ell must be >= 1".into()));
        }
        if !(delta.is_finite() && delta > -f64::from(ell)) {
            return Err(Error::InvalidParams(format!(
                "delta must exceed -ell = -{ell}, got {delta}"
            )));
        }
        Ok(OperatorParams { pq, ell, delta, t })
    }

    /// `t = 0`, `δ = 1 - ℓ`: every multiplier equals one.
    pub fn identity(pq: PQParams, ell: u32) -> Result<Self> {
        Self::new(pq, ell, 1.0 - f64::from(ell), 0)
    }

    pub fn pq(&self) -> PQParams {
        self.pq
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn t(&self) -> u32 {
        self.t
    }
}

/// `Φ_κ` for `κ >= ℓ`.
pub fn multiplier(kappa: u32, params: &OperatorParams) -> Result<f64> {
    let ell = params.ell;
    if kappa < ell {
        return Err(Error::Domain(format!("multiplier index {kappa} is below ell = {ell}")));
    }
    let n = kappa - ell;
    let salagean = bracket_q(f64::from(kappa + ell - 1), params.pq.q())?.powi(params.t as i32);
    let base = params.delta + f64::from(ell);
    // ([base]_n / [n]!) as one running product of ratios: each factor is
    // O(1) while numerator and denominator alone underflow for small p.
    let (p, q) = (params.pq.p(), params.pq.q());
    let ratio = (0..n).fold(1.0, |acc, j| {
        let j = f64::from(j);
        acc * (bracket_formula(base + j, p, q) / bracket_formula(j + 1.0, p, q))
    });
    Ok(salagean * ratio)
}

/// Read-only table `Φ_ℓ, ..., Φ_N` for one parameter set.
#[derive(Clone, Debug)]
pub struct MultiplierTable {
    ell: u32,
    values: Vec<f64>,
}

impl MultiplierTable {
    pub fn new(params: &OperatorParams, truncation: u32) -> Result<Self> {
        let ell = params.ell;
        let values = (ell..=truncation.max(ell))
            .map(|k| multiplier(k, params))
            .collect::<Result<_>>()?;
        Ok(MultiplierTable { ell, values })
    }

    /// `Φ_κ`; panics if `κ` lies outside the table.
    pub fn get(&self, kappa: u32) -> f64 {
        self.values[(kappa - self.ell) as usize]
    }
}

/// `H f`: `a_κ ↦ Φ_κ a_κ`, `b_κ ↦ Φ_κ b_κ`, leading `z^ℓ` unchanged.
pub fn apply_operator(f: &HarmonicSeries, params: &OperatorParams) -> Result<HarmonicSeries> {
    if f.ell() != params.ell {
        return Err(Error::ValenceMismatch { left: f.ell(), right: params.ell });
    }
    let table = MultiplierTable::new(params, f.truncation())?;
    Ok(f.map_coefficients(|_, k, c| c * table.get(k)))
}
