use std::collections::BTreeMap;

use proptest::prelude::*;

use pqharmonic::classcheck::{analytic_ratio, bernardi, convolve, extremal_function, margin};
use pqharmonic::series::linear_combine;
use pqharmonic::verify::{convolution_margin_oracle, sample_in_class};
use pqharmonic::{ClassParams, Complex64, ExtremalWeights, HarmonicSeries, OperatorParams, PQParams, Part};

fn class_strategy() -> impl Strategy<Value = ClassParams> {
    (0.3f64..=1.0, 0.05f64..0.95, 3u32..6, 0.0f64..4.0, 0u32..3, 0.0f64..0.9).prop_map(
        |(p, frac, ell, shift, t, sigma)| {
            let delta = shift + 0.1 - f64::from(ell);
            let op = OperatorParams::new(PQParams::new(p, p * frac).unwrap(), ell, delta, t).unwrap();
            ClassParams::new(op, sigma).unwrap()
        },
    )
}

/// Nonnegative real coefficients on `[ell, ell + 6]`, unconstrained by class.
fn real_series(ell: u32) -> impl Strategy<Value = HarmonicSeries> {
    (
        proptest::collection::vec(0.0f64..0.05, 6),
        proptest::collection::vec(0.0f64..0.05, 7),
    )
        .prop_map(move |(a, b)| {
            let a: BTreeMap<u32, Complex64> =
                a.into_iter().enumerate().map(|(i, x)| (ell + 1 + i as u32, Complex64::new(x, 0.0))).collect();
            let b: BTreeMap<u32, Complex64> =
                b.into_iter().enumerate().map(|(i, x)| (ell + i as u32, Complex64::new(x, 0.0))).collect();
            HarmonicSeries::new(ell, ell + 6, a, b).unwrap()
        })
}

fn complex_series(ell: u32) -> impl Strategy<Value = HarmonicSeries> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 13).prop_map(move |c| {
        let c: Vec<Complex64> = c.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        let a = (0..6).map(|i| (ell + 1 + i as u32, c[i])).collect();
        let b = (0..7).map(|i| (ell + i as u32, c[6 + i])).collect();
        HarmonicSeries::new(ell, ell + 6, a, b).unwrap()
    })
}

fn ones(ell: u32, truncation: u32) -> HarmonicSeries {
    let one = Complex64::new(1.0, 0.0);
    HarmonicSeries::new(
        ell,
        truncation,
        (ell + 1..=truncation).map(|k| (k, one)).collect(),
        (ell..=truncation).map(|k| (k, one)).collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn margin_is_affine_in_convex_combinations(
        (cp, f1, f2) in class_strategy().prop_flat_map(|cp| {
            let ell = cp.ell();
            (Just(cp), real_series(ell), real_series(ell))
        }),
        mu in 0.0f64..=1.0,
    ) {
        let g = linear_combine(&[(mu, &f1), (1.0 - mu, &f2)]).unwrap();
        let affine = mu * margin(&f1, &cp).unwrap() + (1.0 - mu) * margin(&f2, &cp).unwrap();
        prop_assert!((margin(&g, &cp).unwrap() - affine).abs() <= 1e-12);
    }

    #[test]
    fn bernardi_never_lowers_the_margin(
        (cp, f) in class_strategy().prop_flat_map(|cp| {
            let ell = cp.ell();
            (Just(cp), real_series(ell))
        }),
        u in -0.99f64..5.0,
    ) {
        let before = margin(&f, &cp).unwrap();
        let after = margin(&bernardi(&f, u).unwrap(), &cp).unwrap();
        prop_assert!(after >= before - 1e-12);
    }

    #[test]
    fn convolution_commutes_and_has_identity(f in complex_series(3), g in complex_series(3)) {
        prop_assert_eq!(convolve(&f, &g).unwrap(), convolve(&g, &f).unwrap());
        prop_assert_eq!(convolve(&f, &ones(3, 9)).unwrap(), f.clone());
        prop_assert_eq!(convolve(&ones(3, 9), &f).unwrap(), f);
    }

    #[test]
    fn convolution_margin_matches_oracle(cp in class_strategy(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let f = sample_in_class(&cp, cp.ell() + 8, s1).unwrap();
        let m = sample_in_class(&cp, cp.ell() + 8, s2).unwrap();
        let primary = margin(&convolve(&f, &m).unwrap(), &cp).unwrap();
        let oracle = convolution_margin_oracle(&f, &m, &cp);
        // Products of in-class coefficients scale like 1/Φ_κ, so S(f*M) can
        // reach 1e4 for small p; compare relative to the size of the sum.
        let scale = (cp.bound() - primary).abs().max(cp.bound()).max(1.0);
        prop_assert!((primary - oracle).abs() <= 1e-12 * scale, "{} vs {}", primary, oracle);
    }

    #[test]
    fn samples_are_in_class(cp in class_strategy(), seed in any::<u64>(), extra in 1u32..15) {
        let f = sample_in_class(&cp, cp.ell() + extra, seed).unwrap();
        prop_assert!(margin(&f, &cp).unwrap() >= -1e-12);
        prop_assert!(f.has_nonnegative_real_coefficients());
    }

    #[test]
    fn unit_extremals_are_sharp(cp in class_strategy(), offset in 0u32..=10, coanalytic in any::<bool>()) {
        let kappa = cp.ell() + offset;
        let part = if coanalytic || offset == 0 { Part::CoAnalytic } else { Part::Analytic };
        let f = extremal_function(&ExtremalWeights::unit(part, kappa, cp.ell()).unwrap(), &cp).unwrap();
        prop_assert!(margin(&f, &cp).unwrap().abs() <= 1e-12 * cp.bound());
    }
}

#[test]
fn monomial_ratio_is_valence_minus_one() {
    use rand::{RngExt, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for ell in 1..=6 {
        let op = OperatorParams::new(PQParams::new(0.8, 0.3).unwrap(), ell, 0.5, 2).unwrap();
        let cp = ClassParams::new(op, 0.0).unwrap();
        let f = HarmonicSeries::monomial(ell).unwrap();
        for _ in 0..1000 {
            let z = Complex64::from_polar(0.999 * rng.random::<f64>(), std::f64::consts::TAU * rng.random::<f64>());
            let ratio = analytic_ratio(&f, &cp, z).unwrap();
            assert!((ratio - Complex64::new(f64::from(ell) - 1.0, 0.0)).norm() <= 1e-12, "ell={ell} z={z}");
        }
    }
}
