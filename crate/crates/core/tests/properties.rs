//! Randomized invariants over the model's validity domain.

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use parampli::dynamics::{intensity, propagator, propagator_series_oracle};
use parampli::entanglement::y_record;
use parampli::error::Error;
use parampli::model::{build_dynamics_matrix, ModelParams};
use parampli::spectral::{eigenfrequencies, multiset_distance, numeric_spectrum_oracle};
use parampli::stability::{classify_analytic, classify_spectral, threshold_chi_squared, RegimeTag, DEFAULT_TOL};
use parampli::validate::relative_symplectic_residual;

fn params() -> impl Strategy<Value = ModelParams> {
    (-3.0..1.0f64, 0.0..0.9f64, 0.0..1.5f64).prop_map(|(d, k, x2)| ModelParams::new(d, k, x2.sqrt()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn spectrum_closed_under_negation_and_conjugation(p in params()) {
        let w = eigenfrequencies(&p)?.omegas;
        let neg = w.map(|z| -z);
        let conj = w.map(|z| z.conj());
        let scale = w.iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(multiset_distance(&w, &neg) <= 1e-9 * scale);
        prop_assert!(multiset_distance(&w, &conj) <= 1e-9 * scale);
        let sum: C64 = w.iter().sum();
        prop_assert!(sum.norm() <= 1e-12 * scale);
    }

    #[test]
    fn closed_form_matches_schur(p in params()) {
        let closed = eigenfrequencies(&p)?.omegas;
        let numeric = numeric_spectrum_oracle(&build_dynamics_matrix(&p)?)?;
        let scale = closed.iter().map(|z| z.norm()).fold(1.0, f64::max);
        // a double root only resolves to ~sqrt(eps) under perturbation
        prop_assert!(multiset_distance(&closed, &numeric) <= 1e-6 * scale);
    }

    #[test]
    fn classifications_agree_off_threshold(p in params()) {
        let th = threshold_chi_squared(p.delta, p.kappa);
        prop_assume!(th.is_some_and(|th| (p.chi_squared() - th).abs() > 1e-4));
        let analytic = classify_analytic(&p, 1e-6)?;
        let spectral = classify_spectral(&eigenfrequencies(&p)?, DEFAULT_TOL)?;
        prop_assert_eq!(analytic.tag, spectral.tag);
        prop_assert!((analytic.gamma - spectral.gamma).abs() <= 1e-12);
        if analytic.tag == RegimeTag::Stable {
            prop_assert_eq!(analytic.gamma, 0.0);
        }
    }

    #[test]
    fn region_one_threshold_grows_with_kappa(d in 0.01..1.0f64, k1 in 0.0..0.9f64, k2 in 0.0..0.9f64) {
        let (lo, hi) = if k1 < k2 { (k1, k2) } else { (k2, k1) };
        prop_assert!(threshold_chi_squared(d, lo).unwrap() <= threshold_chi_squared(d, hi).unwrap());
    }

    #[test]
    fn propagator_group_law(p in params(), t in -5.0..5.0f64, s in -5.0..5.0f64) {
        let gt = propagator(&p, t)?;
        let gs = propagator(&p, s)?;
        let gts = propagator(&p, t + s)?;
        let scale = (gt.g.max_abs() * gs.g.max_abs()).max(1.0);
        prop_assert!((gt.g * gs.g).max_abs_diff(&gts.g) <= 1e-9 * scale);
        prop_assert!(relative_symplectic_residual(&gt) <= 1e-12);
        prop_assert!(gt.conjugation_residual() <= 1e-12);
    }

    #[test]
    fn eigen_and_series_propagators_agree(p in params(), t in -10.0..10.0f64) {
        let a = propagator(&p, t)?;
        let b = propagator_series_oracle(&build_dynamics_matrix(&p)?, t)?;
        prop_assert!(a.g.max_abs_diff(&b.g) <= 1e-8 * a.g.max_abs().max(1.0));
    }

    #[test]
    fn intensity_at_zero_is_coherent_amplitude(p in params(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let alpha = C64::new(re, im);
        let rec = intensity(&propagator(&p, 0.0)?, alpha);
        prop_assert!((rec.i_light - alpha.norm_sqr()).abs() <= 1e-12 * alpha.norm_sqr().max(1.0));
        prop_assert!(rec.i_atom.abs() <= 1e-12);
    }

    #[test]
    fn entanglement_in_unit_interval(p in params(), t in 0.0..15.0f64) {
        let rec = y_record(&p, t)?;
        prop_assert!(rec.y >= 0.0 && rec.y < 1.0, "y = {}", rec.y);
    }

    #[test]
    fn kappa_at_or_above_one_is_rejected(k in 1.0..10.0f64) {
        prop_assert!(matches!(ModelParams::new(0.5, k, 1.0), Err(Error::OutsideValidity(_))));
    }
}
