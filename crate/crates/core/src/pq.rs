//! Scalar (p,q)-calculus: brackets, factorials and shifted factorials.
//!
//! `[x]_{p,q} = (p^x - q^x) / (p - q)` and `[x]_q = (1 - q^x) / (1 - q)`.
//! Arguments may be real, since the shifted factorial starts at `δ + ℓ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The deformation pair, `0 < q < p <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPQ", into = "RawPQ")]
pub struct PQParams {
    p: f64,
    q: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPQ {
    p: f64,
    q: f64,
}

impl TryFrom<RawPQ> for PQParams {
    type Error = Error;

    fn try_from(raw: RawPQ) -> Result<Self> {
        PQParams::new(raw.p, raw.q)
    }
}

impl From<PQParams> for RawPQ {
    fn from(pq: PQParams) -> Self {
        RawPQ { p: pq.p, q: pq.q }
    }
}

impl PQParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && q.is_finite() && 0.0 < q && q < p && p <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "need 0 < q < p <= 1, got p = {p}, q = {q}"
            )));
        }
        Ok(PQParams { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// `(p^x - q^x) / (p - q)` without any ordering requirement on `p`, `q`.
///
/// Written as `p^x (1 - (q/p)^x) / (p - q)` so the numerator does not
/// cancel when `q/p` is close to one.
pub(crate) fn bracket_formula(x: f64, p: f64, q: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let ratio = -(x * (q / p).ln()).exp_m1();
    p.powf(x) * ratio / (p - q)
}

/// The (p,q)-bracket `[x]_{p,q}`.
pub fn bracket_pq(x: f64, pq: PQParams) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bracket argument must be >= 0, got {x}")));
    }
    Ok(bracket_formula(x, pq.p, pq.q))
}

/// The one-parameter bracket `[x]_q`, i.e. `[x]_{1,q}`.
pub fn bracket_q(x: f64, q: f64) -> Result<f64> {
    if !(0.0 < q && q < 1.0) {
        return Err(Error::Domain(format!("q must lie in (0, 1), got {q}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bracket argument must be >= 0, got {x}")));
    }
    Ok(bracket_formula(x, 1.0, q))
}

/// `[n]_{p,q}! = [1][2]...[n]`, with `[0]! = 1`.
pub fn factorial_pq(n: u32, pq: PQParams) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * bracket_formula(f64::from(k), pq.p, pq.q))
}

/// Shifted factorial `([a]_{p,q})_n = [a][a+1]...[a+n-1]`, with `(·)_0 = 1`.
pub fn pochhammer_pq(a: f64, n: u32, pq: PQParams) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("pochhammer base must be > 0, got {a}")));
    }
    Ok((0..n).fold(1.0, |acc, j| acc * bracket_formula(a + f64::from(j), pq.p, pq.q)))
}
