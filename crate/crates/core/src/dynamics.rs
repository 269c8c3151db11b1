//! Propagator, Gaussian moment evolution and field intensities.
//!
//! The Heisenberg solution is `x̂(t) = G(t) x̂(0)` with `G(t) = exp(iMt)`.
//! [`propagator`] builds `G` from the eigendecomposition
//! `U·diag(e^{iω_k t})·U⁻¹`; [`propagator_series_oracle`] exponentiates
//! `iMt` directly by scaling and squaring. Near an exceptional point the
//! eigenvector matrix is singular and the series result is used instead.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat4, Vec4};
use crate::model::{build_dynamics_matrix, DynamicsMatrix, InitialState, ModelParams};
use crate::spectral::eigenfrequencies;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Eigendecomposition,
    Series,
}

#[derive(Clone, Copy, Debug)]
pub struct Propagator {
    pub g: Mat4,
    pub t: f64,
    pub method: Method,
}

/// Commutator matrix `C_ij = [x̂_i, x̂_j]` in the order `(ĉ, ĉ†, â, â†)`.
pub fn commutator_matrix() -> Mat4 {
    Mat4::from_real([
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ])
}

impl Propagator {
    /// Wraps a raw matrix, projecting it onto the adjoint-symmetric form
    /// `G = S·Ḡ·S` that every exact propagator of a real generator satisfies.
    fn symmetrized(g: Mat4, t: f64, method: Method) -> Self {
        let mirrored = g.swap_adjoint().conj();
        let g = (g + mirrored).scale(C64::new(0.5, 0.0));
        Propagator { g, t, method }
    }

    pub fn identity() -> Self {
        Propagator { g: Mat4::identity(), t: 0.0, method: Method::Series }
    }

    /// `max |G·C·Gᵀ − C|`.
    pub fn symplectic_residual(&self) -> f64 {
        let c = commutator_matrix();
        (self.g * c * self.g.transpose()).max_abs_diff(&c)
    }

    /// `max |G − S·Ḡ·S|`.
    pub fn conjugation_residual(&self) -> f64 {
        self.g.max_abs_diff(&self.g.swap_adjoint().conj())
    }
}

pub fn propagator(params: &ModelParams, t: f64) -> Result<Propagator> {
    if !t.is_finite() {
        return Err(Error::InvalidParam { name: "t", value: t, reason: "must be finite" });
    }
    let spectrum = eigenfrequencies(params)?;
    let m = build_dynamics_matrix(params)?;
    if spectrum.degenerate {
        return propagator_series_oracle(&m, t);
    }
    let u = spectrum.vectors;
    let Some(u_inv) = u.inverse() else {
        return propagator_series_oracle(&m, t);
    };
    let phases: Vec4 = spectrum.omegas.map(|w| (C64::new(0.0, t) * w).exp());
    let g = u * Mat4::diag(phases) * u_inv;
    if !g.is_finite() {
        return propagator_series_oracle(&m, t);
    }
    Ok(Propagator::symmetrized(g, t, Method::Eigendecomposition))
}

/// `exp(iMt)` by scaling and squaring a truncated Taylor series.
pub fn propagator_series_oracle(matrix: &DynamicsMatrix, t: f64) -> Result<Propagator> {
    if !t.is_finite() {
        return Err(Error::InvalidParam { name: "t", value: t, reason: "must be finite" });
    }
    let a = matrix.to_complex().scale(C64::new(0.0, t));
    let norm = a.norm_1();
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    let a = a.scale(C64::new(2f64.powi(-(squarings as i32)), 0.0));

    let mut sum = Mat4::identity();
    let mut term = Mat4::identity();
    for k in 1..64 {
        term = (term * a).scale(C64::new(1.0 / k as f64, 0.0));
        sum = sum + term;
        if term.norm_1() < 1e-16 * sum.norm_1() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    Ok(Propagator::symmetrized(sum, t, Method::Series))
}

/// First moments and unsymmetrized centered second moments
/// `⟨x̂_i x̂_j⟩ − ⟨x̂_i⟩⟨x̂_j⟩` of the two-mode Gaussian state.
#[derive(Clone, Copy, Debug)]
pub struct CovarianceState {
    pub mean: Vec4,
    pub cov: Mat4,
}

impl CovarianceState {
    /// Trap mode in vacuum, optical mode coherent.
    pub fn initial(init: &InitialState) -> Self {
        let zero = C64::new(0.0, 0.0);
        let mut cov = Mat4::zeros();
        cov[(0, 1)] = C64::new(1.0, 0.0);
        cov[(2, 3)] = C64::new(1.0, 0.0);
        CovarianceState {
            mean: [zero, zero, init.alpha, init.alpha.conj()],
            cov,
        }
    }

    /// `⟨ĉ†ĉ⟩`.
    pub fn atom_number(&self) -> f64 {
        self.cov[(1, 0)].re + self.mean[0].norm_sqr()
    }

    /// `⟨â†â⟩`.
    pub fn light_number(&self) -> f64 {
        self.cov[(3, 2)].re + self.mean[2].norm_sqr()
    }
}

pub fn evolve_moments(g: &Propagator, init: &InitialState) -> CovarianceState {
    let start = CovarianceState::initial(init);
    CovarianceState {
        mean: g.g.mul_vec(&start.mean),
        cov: g.g * start.cov * g.g.transpose(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntensityRecord {
    pub t: f64,
    pub i_atom: f64,
    pub i_light: f64,
}

/// `I_i = |G_i2|² + |G_i4|² + |G_i3 α + G_i4 ᾱ|²` for the trap mode (row 1)
/// and the light mode (row 3).
pub fn intensity(g: &Propagator, alpha: C64) -> IntensityRecord {
    let row = |r: usize| {
        let m = &g.g;
        m[(r, 1)].norm_sqr() + m[(r, 3)].norm_sqr() + (m[(r, 2)] * alpha + m[(r, 3)] * alpha.conj()).norm_sqr()
    };
    IntensityRecord { t: g.t, i_atom: row(0), i_light: row(2) }
}

pub(crate) fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Config("time grid contains non-finite values".into()));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("time grid must be ascending".into()));
    }
    Ok(())
}

/// Intensities on a time grid. Each point gets its own propagator.
pub fn intensity_series(params: &ModelParams, alpha: C64, t_grid: &[f64]) -> Result<Vec<IntensityRecord>> {
    params.validate()?;
    check_grid(t_grid)?;
    t_grid
        .par_iter()
        .map(|&t| propagator(params, t).map(|g| intensity(&g, alpha)))
        .collect()
}

/// `n` uniformly spaced times on `[0, t_max]`.
pub fn time_grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| crate::stability::grid_point(0.0, t_max, i, n)).collect()
}

/// Least-squares slope of `ln I_light` against `t` for records with
/// `t_from ≤ t ≤ t_to`.
pub fn log_intensity_slope(records: &[IntensityRecord], t_from: f64, t_to: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.t >= t_from && r.t <= t_to)
        .map(|r| (r.t, r.i_light.ln()))
        .collect();
    least_squares_slope(&pts)
}

pub fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}
