//! Margin of a Hadamard product recomputed without `convolve`,
//! `MultiplierTable` or the library brackets. The multipliers come from the
//! ratio recurrence
//!
//! ```text
//! Φ_ℓ = [2ℓ-1]_q^t,   Φ_{κ+1} = Φ_κ · ([κ+ℓ]_q / [κ+ℓ-1]_q)^t · [δ+κ]_{p,q} / [κ+1-ℓ]_{p,q}
//! ```
//!
//! with integer brackets taken as finite geometric sums.

use crate::classcheck::ClassParams;
use crate::series::HarmonicSeries;

fn q_bracket_sum(n: u32, q: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for _ in 0..n {
        sum += term;
        term *= q;
    }
    sum
}

fn pq_bracket_sum(n: u32, p: f64, q: f64) -> f64 {
    (0..n).map(|k| p.powi((n - 1 - k) as i32) * q.powi(k as i32)).sum()
}

/// Multipliers `Φ_ℓ ..= Φ_N` via the recurrence.
pub(crate) fn recurrence_multipliers(cp: &ClassParams, truncation: u32) -> Vec<f64> {
    let op = cp.op();
    let (p, q) = (op.pq().p(), op.pq().q());
    let (ell, t) = (op.ell(), op.t() as i32);
    let mut phi = vec![q_bracket_sum(2 * ell - 1, q).powi(t)];
    for k in ell..truncation {
        let salagean = (q_bracket_sum(k + ell, q) / q_bracket_sum(k + ell - 1, q)).powi(t);
        let x = op.delta() + f64::from(k);
        let shifted = (p.powf(x) - q.powf(x)) / (p - q);
        let last = *phi.last().expect("nonempty");
        phi.push(last * salagean * shifted / pq_bracket_sum(k + 1 - ell, p, q));
    }
    phi
}

/// `ℓ(ℓ-2-σ) - S(f*M)` from the coefficient tables of `f` and `M`.
pub fn convolution_margin_oracle(f: &HarmonicSeries, m: &HarmonicSeries, cp: &ClassParams) -> f64 {
    let ell = cp.ell();
    let sigma = cp.sigma();
    let truncation = f.truncation().min(m.truncation());
    let phi = recurrence_multipliers(cp, truncation);
    let mut sum = 0.0;
    for k in ell..=truncation {
        let kf = f64::from(k);
        let phi_k = phi[(k - ell) as usize];
        if k > ell {
            sum += kf * (kf - sigma) * phi_k * (f.a_coeff(k) * m.a_coeff(k)).norm();
        }
        sum += kf * (kf - 2.0 - sigma) * phi_k * (f.b_coeff(k) * m.b_coeff(k)).norm();
    }
    let l = f64::from(ell);
    l * (l - 2.0 - sigma) - sum
}
