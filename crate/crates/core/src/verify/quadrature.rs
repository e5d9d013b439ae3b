use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::{evaluate, HarmonicSeries};

/// Absolute accuracy requested for the normalized integral `∫_0^1 g dw`.
pub const QUADRATURE_TARGET: f64 = 1e-10;

/// `(u+ℓ)/x^u ∫_0^x t^(u-1) f(t) dt` by double-exponential quadrature on the
/// real segment, where `conj(t) = t`.
///
/// With `g(t) = f(t)/t^ℓ` and `t = x·w^(1/(u+ℓ))` the integral becomes
/// `x^ℓ ∫_0^1 g(x·w^(1/(u+ℓ))) dw`, which has a bounded integrand even when
/// `u < 1` puts an algebraic singularity at the origin.
pub fn bernardi_quadrature_oracle(f: &HarmonicSeries, u: f64, x: f64) -> Result<Complex64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("quadrature point must lie in (0, 1), got {x}")));
    }
    if !(u.is_finite() && u > -1.0) {
        return Err(Error::Domain(format!("Bernardi parameter u must exceed -1, got {u}")));
    }
    let ell = f.ell() as i32;
    let order = u + f64::from(f.ell());
    // On the real axis every term tends to 0 except z^ℓ and conj(z)^ℓ.
    let at_origin = 1.0 + f.b_coeff(f.ell());

    let g = |w: f64| -> Complex64 {
        let t = x * w.powf(1.0 / order);
        let scale = t.powi(ell);
        if scale < 1e-280 {
            return at_origin;
        }
        evaluate(f, Complex64::new(t, 0.0)).map_or(at_origin, |v| v / scale)
    };
    let re = quadrature::integrate(|w| g(w).re, 0.0, 1.0, QUADRATURE_TARGET);
    let im = quadrature::integrate(|w| g(w).im, 0.0, 1.0, QUADRATURE_TARGET);
    let estimate = re.error_estimate.max(im.error_estimate);
    if !(estimate <= QUADRATURE_TARGET) {
        return Err(Error::Quadrature { estimate, target: QUADRATURE_TARGET });
    }
    Ok(Complex64::new(re.integral, im.integral) * x.powi(ell))
}
