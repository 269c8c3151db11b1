//! Atom-photon entanglement coefficient
//!
//! ```text
//! Y = sqrt[ (|⟨â ĉ†⟩|² + |⟨â ĉ⟩|²) / (2(⟨â†â⟩ + ½)(⟨ĉ†ĉ⟩ + ½)) ]
//! ```
//!
//! with all moments centered. [`y_from_covariances`] evaluates this on an
//! evolved [`CovarianceState`]; [`y_closed_form`] evaluates the equivalent
//! expression in propagator entries for a vacuum trap mode and coherent
//! light. The two are computed independently and must coincide.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{check_grid, evolve_moments, propagator, CovarianceState, Propagator};
use crate::error::{Error, Result};
use crate::model::{InitialState, ModelParams};

/// Allowed disagreement between the two evaluation paths in a series.
pub const DUAL_PATH_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YRecord {
    pub t: f64,
    pub y: f64,
    pub y_closed: f64,
    pub y_covariance: f64,
}

pub fn y_from_covariances(state: &CovarianceState) -> f64 {
    let cov = &state.cov;
    let a_cdag = cov[(2, 1)];
    let a_c = cov[(2, 0)];
    let n_a = cov[(3, 2)].re;
    let n_c = cov[(1, 0)].re;
    let num = a_cdag.norm_sqr() + a_c.norm_sqr();
    let den = 2.0 * (n_a + 0.5) * (n_c + 0.5);
    (num / den).sqrt()
}

pub fn y_closed_form(g: &Propagator) -> f64 {
    let m = &g.g;
    let g = |i: usize, j: usize| m[(i - 1, j - 1)];
    let first = g(3, 1) * g(1, 1).conj() + g(3, 3) * g(1, 3).conj();
    let second = g(3, 1) * g(1, 2) + g(3, 3) * g(1, 4);
    let light = g(3, 2).norm_sqr() + g(3, 4).norm_sqr() + 0.5;
    let atom = g(1, 2).norm_sqr() + g(1, 4).norm_sqr() + 0.5;
    ((first.norm_sqr() + second.norm_sqr()) / (2.0 * light * atom)).sqrt()
}

/// Y at one time through both paths.
pub fn y_record(params: &ModelParams, t: f64) -> Result<YRecord> {
    let g = propagator(params, t)?;
    let y_closed = y_closed_form(&g);
    // Y does not depend on α; the covariance path runs with the vacuum
    let y_covariance = y_from_covariances(&evolve_moments(&g, &InitialState::coherent(C64::new(0.0, 0.0))));
    let diff = (y_closed - y_covariance).abs();
    if !(diff <= DUAL_PATH_TOL) {
        return Err(Error::Inconsistency {
            what: format!("entanglement dual path at t = {t}"),
            residual: diff,
            tol: DUAL_PATH_TOL,
        });
    }
    Ok(YRecord { t, y: y_closed, y_closed, y_covariance })
}

pub fn entanglement_series(params: &ModelParams, t_grid: &[f64]) -> Result<Vec<YRecord>> {
    params.validate()?;
    check_grid(t_grid)?;
    t_grid.par_iter().map(|&t| y_record(params, t)).collect()
}

/// Mean and half peak-to-peak of Y over a window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub mean: f64,
    pub amplitude: f64,
    /// Change in `amplitude` when the window is sampled at half resolution;
    /// a measure of how well the grid resolves the oscillation.
    pub noise: f64,
}

pub fn window_stats(records: &[YRecord], t_from: f64, t_to: f64) -> Option<WindowStats> {
    let ys: Vec<f64> = records
        .iter()
        .filter(|r| r.t >= t_from && r.t <= t_to)
        .map(|r| r.y)
        .collect();
    if ys.len() < 4 {
        return None;
    }
    let half_range = |it: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
        0.5 * (hi - lo)
    };
    let amplitude = half_range(&mut ys.iter().copied());
    let coarse = half_range(&mut ys.iter().copied().step_by(2));
    Some(WindowStats {
        mean: ys.iter().sum::<f64>() / ys.len() as f64,
        amplitude,
        noise: (amplitude - coarse).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::time_grid;

    fn p(d: f64, k: f64, x: f64) -> ModelParams {
        ModelParams::new(d, k, x).unwrap()
    }

    #[test]
    fn product_state_has_zero_y() {
        assert_eq!(y_closed_form(&Propagator::identity()), 0.0);
        let s = evolve_moments(&Propagator::identity(), &InitialState::coherent(C64::new(2.0, 0.0)));
        assert_eq!(y_from_covariances(&s), 0.0);
    }

    #[test]
    fn uncoupled_modes_stay_unentangled() {
        let params = p(0.5, 0.4, 0.0);
        for t in [0.5, 3.0, 14.0] {
            let r = y_record(&params, t).unwrap();
            assert!(r.y_closed < 1e-14 && r.y_covariance < 1e-14);
        }
    }

    #[test]
    fn dual_paths_agree() {
        let params = p(0.5, 0.0, 1.0);
        let g = propagator(&params, 2.0).unwrap();
        let closed = y_closed_form(&g);
        let cov = y_from_covariances(&evolve_moments(&g, &InitialState::coherent(C64::new(2.0, 0.0))));
        assert!((closed - cov).abs() < 1e-12);
        assert!(closed > 0.0 && closed < 1.0);
    }

    #[test]
    fn independent_of_coherent_amplitude() {
        let g = propagator(&p(-1.0, 0.4, 1.0), 4.2).unwrap();
        let ys: Vec<f64> = [C64::new(0.0, 0.0), C64::new(2.0, 0.0), C64::new(10.0, 0.0), C64::from_polar(2.0, std::f64::consts::FRAC_PI_3)]
            .iter()
            .map(|&a| y_from_covariances(&evolve_moments(&g, &InitialState::coherent(a))))
            .collect();
        for y in &ys {
            assert!((y - ys[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn region_one_saturates() {
        let recs = entanglement_series(&p(0.5, 0.0, 1.0), &[10.0, 12.0, 15.0]).unwrap();
        assert!(1.0 - recs[2].y < 1e-3);
        assert!(recs[2].y < 1.0);
        assert!(recs.windows(2).all(|w| w[1].y > w[0].y));
    }

    #[test]
    fn region_two_oscillates_below_one() {
        let recs = entanglement_series(&p(-1.0, 0.8, 1.0), &time_grid(15.0, 1500)).unwrap();
        let w = window_stats(&recs, 10.0, 15.0).unwrap();
        assert!(w.mean < 0.9);
        assert!(w.amplitude > 10.0 * w.noise);
    }

    #[test]
    fn series_at_origin() {
        let recs = entanglement_series(&p(0.5, 0.0, 1.0), &[0.0]).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].y.abs() < 1e-12);
    }
}
