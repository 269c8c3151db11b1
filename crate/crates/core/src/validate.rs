//! Seeded randomized property suite behind the `validate` subcommand.
//!
//! Each property reports its worst residual over the sweep together with the
//! tolerance it was held to. Same seed, same report.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::{evolve_moments, intensity, propagator, propagator_series_oracle, Propagator};
use crate::entanglement::{y_closed_form, y_from_covariances};
use crate::error::Result;
use crate::linalg::Mat4;
use crate::model::{build_dynamics_matrix, InitialState, ModelParams};
use crate::spectral::{char_poly, eigenfrequencies, multiset_distance, numeric_spectrum_oracle, DEGENERACY_GAP};
use crate::stability::{
    classify_analytic, classify_spectral, trace_boundary, DEFAULT_MARGIN, DEFAULT_TOL, RegimeTag,
};

pub const DEFAULT_SEED: u64 = 42;

/// Random parameter points over the figure-relevant domain:
/// `δ ∈ [−3, 1]`, `χ² ∈ [0, 1.5]`, `κ ∈ {0, 0.4, 0.8}`.
pub struct Sweep {
    rng: ChaCha8Rng,
}

impl Sweep {
    pub fn new(seed: u64) -> Self {
        Sweep { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn params(&mut self) -> ModelParams {
        let delta = self.rng.gen_range(-3.0..=1.0);
        let kappa = [0.0, 0.4, 0.8][self.rng.gen_range(0..3)];
        let chi2: f64 = self.rng.gen_range(0.0..=1.5);
        ModelParams { delta, kappa, chi: chi2.sqrt() }
    }

    /// Like [`Sweep::params`] but with κ drawn continuously from `[0, 0.9]`.
    pub fn params_continuous(&mut self) -> ModelParams {
        let mut p = self.params();
        p.kappa = self.rng.gen_range(0.0..=0.9);
        p
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..=hi)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub samples: usize,
    pub worst: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub properties: Vec<PropertyResult>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.properties.iter().all(|p| p.pass)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("validate seed={}\n", self.seed);
        for p in &self.properties {
            out += &format!(
                "{} {:<32} worst={:.6e} tol={:.1e} samples={}\n",
                if p.pass { "PASS" } else { "FAIL" },
                p.name,
                p.worst,
                p.tol,
                p.samples
            );
        }
        let failed = self.properties.iter().filter(|p| !p.pass).count();
        out += &format!("{} of {} properties passed\n", self.properties.len() - failed, self.properties.len());
        out
    }
}

/// Scale-aware symplectic residual: `max|G·C·Gᵀ − C| / max(1, max|G|²)`.
/// Rounding of `G` alone perturbs the product by about `ε·max|G|²`.
pub fn relative_symplectic_residual(g: &Propagator) -> f64 {
    g.symplectic_residual() / g.g.max_abs().powi(2).max(1.0)
}

struct Collector {
    tol_override: Option<f64>,
    results: Vec<PropertyResult>,
}

impl Collector {
    fn push(&mut self, name: &'static str, samples: usize, worst: f64, tol: f64) {
        let tol = self.tol_override.unwrap_or(tol);
        // NaN must fail
        let pass = worst <= tol;
        self.results.push(PropertyResult { name, samples, worst, tol, pass });
    }
}

/// Runs the full suite. `tol_override` replaces every property's tolerance.
pub fn run(seed: u64, tol_override: Option<f64>) -> Result<Report> {
    let mut sweep = Sweep::new(seed);
    let mut col = Collector { tol_override, results: Vec::new() };

    // characteristic polynomial against direct determinants
    let mut worst = 0.0f64;
    let n = 100;
    for _ in 0..n {
        let p = sweep.params_continuous();
        let cp = char_poly(&p)?;
        let m = build_dynamics_matrix(&p)?.to_complex();
        for _ in 0..5 {
            let w = C64::new(sweep.uniform(-3.0, 3.0), sweep.uniform(-2.0, 2.0));
            let det = (m - Mat4::identity().scale(w)).det();
            worst = worst.max((cp.eval(w) - det).norm() / det.norm().max(1.0));
        }
    }
    col.push("char_poly_vs_determinant", n * 5, worst, 1e-12);

    // closed-form spectrum against Schur iteration, and eigenpair residuals
    let (mut dist, mut resid, mut used) = (0.0f64, 0.0f64, 0usize);
    for _ in 0..200 {
        let p = sweep.params_continuous();
        let s = eigenfrequencies(&p)?;
        if s.degenerate {
            continue;
        }
        let m = build_dynamics_matrix(&p)?;
        dist = dist.max(multiset_distance(&s.omegas, &numeric_spectrum_oracle(&m)?));
        resid = resid.max(s.max_residual(&m));
        used += 1;
    }
    col.push("spectrum_closed_vs_numeric", used, dist, 1e-8);
    col.push("eigenpair_residual", used, resid, 1e-10);

    // analytic vs spectral classification
    let (mut disagreements, mut used) = (0usize, 0usize);
    for _ in 0..2000 {
        let p = sweep.params();
        let a = classify_analytic(&p, DEFAULT_MARGIN)?;
        if a.tag == RegimeTag::NearThreshold {
            continue;
        }
        used += 1;
        let s = classify_spectral(&eigenfrequencies(&p)?, DEFAULT_TOL)?;
        if s.tag != a.tag {
            disagreements += 1;
        }
    }
    col.push("classification_agreement", used, disagreements as f64, 0.0);

    // analytic thresholds vs spectral bisection
    let mut worst = 0.0f64;
    let mut used = 0;
    for kappa in [0.0, 0.4, 0.8] {
        let curve = trace_boundary(kappa, -3.0, 1.0, 41)?;
        for pt in &curve.points {
            worst = worst.max((pt.chi2_analytic - pt.chi2_bisect).abs());
            used += 1;
        }
    }
    col.push("threshold_vs_bisection", used, worst, 1e-6);

    // propagators
    let (mut eig_vs_series, mut symp, mut conj, mut used) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for _ in 0..300 {
        let p = sweep.params_continuous();
        let t = sweep.uniform(-10.0, 10.0);
        if eigenfrequencies(&p)?.gap <= DEGENERACY_GAP {
            continue;
        }
        let a = propagator(&p, t)?;
        let b = propagator_series_oracle(&build_dynamics_matrix(&p)?, t)?;
        eig_vs_series = eig_vs_series.max(a.g.max_abs_diff(&b.g));
        for g in [&a, &b] {
            symp = symp.max(relative_symplectic_residual(g));
            conj = conj.max(g.conjugation_residual());
        }
        used += 1;
    }
    col.push("propagator_eigen_vs_series", used, eig_vs_series, 1e-9);
    col.push("symplectic_relative", 2 * used, symp, 1e-10);
    col.push("conjugation_symmetry", 2 * used, conj, 1e-12);

    let mut worst = 0.0f64;
    let n = 100;
    for _ in 0..n {
        let p = sweep.params_continuous();
        let (t, s) = (sweep.uniform(0.0, 5.0), sweep.uniform(0.0, 5.0));
        let (gt, gs) = (propagator(&p, t)?, propagator(&p, s)?);
        let gts = propagator(&p, t + s)?;
        let scale = (gt.g.max_abs() * gs.g.max_abs()).max(1.0);
        worst = worst.max(gts.g.max_abs_diff(&(gt.g * gs.g)) / scale);
    }
    col.push("semigroup_relative", n, worst, 1e-10);

    // intensities and entanglement
    let (mut inten, mut dual, mut alpha_dep, mut out_of_range) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    let alphas = [
        C64::new(0.0, 0.0),
        C64::new(2.0, 0.0),
        C64::new(10.0, 0.0),
        C64::from_polar(2.0, std::f64::consts::FRAC_PI_3),
    ];
    let n = 300;
    for _ in 0..n {
        let p = sweep.params_continuous();
        let t = sweep.uniform(-10.0, 10.0);
        let g = propagator(&p, t)?;
        let y_closed = y_closed_form(&g);
        let mut ys = Vec::with_capacity(alphas.len());
        for &alpha in &alphas {
            let state = evolve_moments(&g, &InitialState::coherent(alpha));
            let rec = intensity(&g, alpha);
            inten = inten.max((rec.i_atom - state.atom_number()).abs() / rec.i_atom.max(1.0));
            inten = inten.max((rec.i_light - state.light_number()).abs() / rec.i_light.max(1.0));
            ys.push(y_from_covariances(&state));
        }
        for y in &ys {
            dual = dual.max((y - y_closed).abs());
            alpha_dep = alpha_dep.max((y - ys[0]).abs());
        }
        out_of_range += ys
            .iter()
            .chain(std::iter::once(&y_closed))
            .filter(|y| !(**y >= 0.0 && **y < 1.0))
            .count();
    }
    col.push("intensity_closed_vs_moments", n * alphas.len(), inten, 1e-10);
    col.push("entanglement_dual_path", n * alphas.len(), dual, 1e-12);
    col.push("entanglement_alpha_independence", n, alpha_dep, 1e-12);
    col.push("entanglement_range", n * (alphas.len() + 1), out_of_range as f64, 0.0);

    Ok(Report { seed, properties: col.results })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes_and_is_deterministic() {
        let a = run(DEFAULT_SEED, None).unwrap();
        assert!(a.all_pass(), "{}", a.to_text());
        let b = run(DEFAULT_SEED, None).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn impossible_tolerance_fails() {
        let r = run(7, Some(1e-30)).unwrap();
        assert!(!r.all_pass());
        assert!(r.to_text().contains("FAIL"));
    }
}
