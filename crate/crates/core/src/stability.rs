//! Instability thresholds and regime classification.
//!
//! Two routes classify a parameter point: the analytic threshold inequalities
//! in `χ²`, and the shape of the eigenfrequency spectrum. They must agree
//! away from the thresholds themselves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::spectral::{eigenfrequencies, Spectrum};

/// Tolerance on real/imaginary parts when reading a spectrum's shape.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Width in `χ²` of the band around a threshold reported as `NearThreshold`.
pub const DEFAULT_MARGIN: f64 = 1e-6;
/// Allowed disagreement between analytic and bisected thresholds.
pub const BOUNDARY_AGREEMENT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeTag {
    Stable,
    /// One exponentially growing mode (δ > 0).
    RegionI,
    /// Two counter-rotating growing modes (δ < 0).
    RegionII,
    NearThreshold,
}

impl RegimeTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeTag::Stable => "Stable",
            RegimeTag::RegionI => "RegionI",
            RegimeTag::RegionII => "RegionII",
            RegimeTag::NearThreshold => "NearThreshold",
        }
    }

    pub fn is_unstable(&self) -> bool {
        matches!(self, RegimeTag::RegionI | RegimeTag::RegionII)
    }
}

impl std::fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub tag: RegimeTag,
    /// Rotation frequency Ω.
    pub omega_rot: f64,
    /// Exponential growth rate Γ; zero when stable.
    pub gamma: f64,
}

/// Critical `χ²` above which the point is unstable, or `None` at `δ = 0`.
pub fn threshold_chi_squared(delta: f64, kappa: f64) -> Option<f64> {
    if delta > 0.0 {
        Some(delta * (1.0 + kappa) / 4.0)
    } else if delta < 0.0 {
        let s = 1.0 - kappa * kappa - delta * delta;
        Some(s * s / (16.0 * delta.abs() * (1.0 - kappa)))
    } else {
        None
    }
}

fn rates(spectrum: &Spectrum) -> (f64, f64) {
    let gamma = spectrum.max_imag().max(0.0);
    let omega = spectrum.omegas.iter().map(|w| w.re.abs()).fold(0.0, f64::max);
    (omega, gamma)
}

pub fn classify_analytic(params: &ModelParams, margin: f64) -> Result<Regime> {
    let spectrum = eigenfrequencies(params)?;
    let (omega_rot, gamma) = rates(&spectrum);
    let tag = match threshold_chi_squared(params.delta, params.kappa) {
        None => RegimeTag::NearThreshold,
        Some(th) => {
            let x2 = params.chi_squared();
            if (x2 - th).abs() <= margin {
                RegimeTag::NearThreshold
            } else if x2 < th {
                RegimeTag::Stable
            } else if params.delta > 0.0 {
                RegimeTag::RegionI
            } else {
                RegimeTag::RegionII
            }
        }
    };
    let gamma = if tag == RegimeTag::Stable { 0.0 } else { gamma };
    Ok(Regime { tag, omega_rot, gamma })
}

/// Reads the regime off the eigenvalue pattern alone.
pub fn classify_spectral(spectrum: &Spectrum, tol: f64) -> Result<Regime> {
    let w = &spectrum.omegas;
    let (omega_rot, gamma) = rates(spectrum);
    let real = |z: &num_complex::Complex64| z.im.abs() <= tol;
    let imaginary = |z: &num_complex::Complex64| z.re.abs() <= tol && z.im.abs() > tol;

    if w.iter().all(real) {
        return Ok(Regime { tag: RegimeTag::Stable, omega_rot, gamma: 0.0 });
    }
    let n_real = w.iter().filter(|z| real(z)).count();
    let n_imag = w.iter().filter(|z| imaginary(z)).count();
    if n_real == 2 && n_imag == 2 {
        return Ok(Regime { tag: RegimeTag::RegionI, omega_rot, gamma });
    }
    if w.iter().all(|z| z.re.abs() > tol && z.im.abs() > tol) {
        return Ok(Regime { tag: RegimeTag::RegionII, omega_rot, gamma });
    }
    Err(Error::UnclassifiableSpectrum {
        tol,
        omegas: format!("{:?}", w),
    })
}

pub fn growth_rate(spectrum: &Spectrum) -> f64 {
    spectrum.max_imag().max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub delta: f64,
    pub chi2_analytic: f64,
    pub chi2_bisect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub kappa: f64,
    pub points: Vec<BoundaryPoint>,
}

/// `i`-th of `n` uniformly spaced points on `[lo, hi]`, endpoints exact.
pub fn grid_point(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if n < 2 {
        return lo;
    }
    let m = (n - 1) as f64;
    (lo * (m - i as f64) + hi * i as f64) / m
}

fn is_unstable(delta: f64, kappa: f64, chi2: f64, tol: f64) -> Result<bool> {
    let s = eigenfrequencies(&ModelParams::new(delta, kappa, chi2.sqrt())?)?;
    Ok(s.max_imag() > tol)
}

/// Critical `χ²` found by bisecting on the spectrum's largest imaginary part.
pub fn bisect_threshold(delta: f64, kappa: f64, tol: f64) -> Result<f64> {
    let mut lo = 0.0;
    if is_unstable(delta, kappa, lo, tol)? {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while !is_unstable(delta, kappa, hi, tol)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Inconsistency {
                what: format!("threshold bracket at delta = {delta}, kappa = {kappa}"),
                residual: hi,
                tol: 1e12,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if is_unstable(delta, kappa, mid, tol)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Threshold curve over a uniform δ grid (δ = 0 skipped), each point checked
/// against spectral bisection.
pub fn trace_boundary(kappa: f64, delta_min: f64, delta_max: f64, n_points: usize) -> Result<BoundaryCurve> {
    ModelParams::new(0.0, kappa, 0.0)?;
    if n_points < 2 {
        return Err(Error::Config(format!("n_points must be >= 2, got {n_points}")));
    }
    if !(delta_min.is_finite() && delta_max.is_finite()) || delta_min >= delta_max {
        return Err(Error::Config(format!("invalid delta range [{delta_min}, {delta_max}]")));
    }
    let mut points = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let delta = grid_point(delta_min, delta_max, i, n_points);
        let Some(analytic) = threshold_chi_squared(delta, kappa) else {
            continue;
        };
        let bisect = bisect_threshold(delta, kappa, DEFAULT_TOL)?;
        let diff = (analytic - bisect).abs();
        if diff > BOUNDARY_AGREEMENT {
            return Err(Error::Inconsistency {
                what: format!("boundary at kappa = {kappa}, delta = {delta}"),
                residual: diff,
                tol: BOUNDARY_AGREEMENT,
            });
        }
        points.push(BoundaryPoint { delta, chi2_analytic: analytic, chi2_bisect: bisect });
    }
    Ok(BoundaryCurve { kappa, points })
}
