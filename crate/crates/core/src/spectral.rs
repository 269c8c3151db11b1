//! Eigenfrequencies and eigenvectors of the dynamics matrix.
//!
//! The characteristic polynomial of `M` is even,
//! `det(M − ωI) = ω⁴ + b ω² + c` with
//!
//! ```text
//! b = −(δ² + 1 − κ²)
//! c = δ²(1 − κ²) − 4δχ²(1 − κ)
//! ```
//!
//! so the spectrum is exact from one quadratic in `ω²`. An independent
//! Schur-iteration solver ([`numeric_spectrum_oracle`]) cross-checks it.

use std::cmp::Ordering;

use nalgebra::{Matrix4, Schur};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{vec_norm, Mat4, Vec4};
use crate::model::{build_dynamics_matrix, DynamicsMatrix, ModelParams};

/// Minimum eigenvalue separation below which the spectrum is treated as
/// near-defective (dimensionless frequency units).
pub const DEGENERACY_GAP: f64 = 1e-6;

/// Coefficients of `p(ω) = ω⁴ + b ω² + c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharPoly {
    pub b: f64,
    pub c: f64,
}

impl CharPoly {
    pub fn eval(&self, omega: C64) -> C64 {
        let w2 = omega * omega;
        w2 * w2 + w2 * self.b + self.c
    }

    /// Discriminant of the quadratic in `ω²`.
    pub fn discriminant(&self) -> f64 {
        self.b * self.b - 4.0 * self.c
    }

    /// The two roots `z = ω²`.
    pub fn squared_roots(&self) -> [C64; 2] {
        self.squared_roots_with(self.discriminant())
    }

    /// Roots given a separately evaluated discriminant.
    fn squared_roots_with(&self, disc: f64) -> [C64; 2] {
        if disc >= 0.0 {
            // stable form, avoids cancellation
            let q = -0.5 * (self.b + self.b.signum() * disc.sqrt());
            let other = if q != 0.0 { self.c / q } else { 0.0 };
            [C64::new(q, 0.0), C64::new(other, 0.0)]
        } else {
            let re = -0.5 * self.b;
            let im = 0.5 * (-disc).sqrt();
            [C64::new(re, im), C64::new(re, -im)]
        }
    }
}

/// `b² − 4c` rewritten as `(1 − κ² − δ²)² + 16δχ²(1 − κ)`. Expanding `b²`
/// and `4c` separately cancels catastrophically at the degenerate points
/// and can leave a spurious negative residue.
pub fn discriminant(params: &ModelParams) -> f64 {
    let ModelParams { delta: d, kappa: k, chi: x } = *params;
    let s = 1.0 - k * k - d * d;
    s * s + 16.0 * d * x * x * (1.0 - k)
}

pub fn char_poly(params: &ModelParams) -> Result<CharPoly> {
    params.validate()?;
    let ModelParams { delta: d, kappa: k, chi: x } = *params;
    let d2 = d * d;
    Ok(CharPoly {
        b: -(d2 + 1.0 - k * k),
        c: d2 * (1.0 - k * k) - 4.0 * d * x * x * (1.0 - k),
    })
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Eigenfrequencies in canonical order.
    pub omegas: [C64; 4],
    /// Column `k` is the unit eigenvector for `omegas[k]`.
    pub vectors: Mat4,
    /// Minimum pairwise distance between eigenfrequencies.
    pub gap: f64,
    /// Set when `gap < DEGENERACY_GAP`; the eigenvectors are then unreliable.
    pub degenerate: bool,
}

impl Spectrum {
    /// `max_k ‖M v_k − ω_k v_k‖ / ‖v_k‖`.
    pub fn max_residual(&self, m: &DynamicsMatrix) -> f64 {
        let mc = m.to_complex();
        (0..4)
            .map(|k| {
                let v = self.vectors.column(k);
                let mv = mc.mul_vec(&v);
                let r: Vec4 = std::array::from_fn(|i| mv[i] - self.omegas[k] * v[i]);
                vec_norm(&r) / vec_norm(&v)
            })
            .fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.omegas.iter().map(|w| w.im).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Orders eigenfrequencies: positive imaginary part first, then real, then
/// negative; within a class by descending real part, then imaginary part.
pub fn canonical_order(a: &C64, b: &C64) -> Ordering {
    fn class(z: &C64) -> u8 {
        if z.im > 0.0 {
            0
        } else if z.im < 0.0 {
            2
        } else {
            1
        }
    }
    class(a)
        .cmp(&class(b))
        .then(b.re.total_cmp(&a.re))
        .then(b.im.total_cmp(&a.im))
}

pub fn eigenfrequencies(params: &ModelParams) -> Result<Spectrum> {
    let poly = char_poly(params)?;
    let m = build_dynamics_matrix(params)?;

    let mut omegas = [C64::new(0.0, 0.0); 4];
    for (n, z) in poly.squared_roots_with(discriminant(params)).into_iter().enumerate() {
        let w = if z.im == 0.0 && z.re >= 0.0 {
            C64::new(z.re.sqrt(), 0.0)
        } else {
            z.sqrt()
        };
        let (first, second) = if w.im >= 0.0 { (w, -w) } else { (-w, w) };
        omegas[2 * n] = first;
        omegas[2 * n + 1] = second;
    }
    omegas.sort_by(canonical_order);

    let mc = m.to_complex();
    let cols: [Vec4; 4] = std::array::from_fn(|k| {
        let shifted = mc - Mat4::identity().scale(omegas[k]);
        normalize_phase(shifted.null_vector())
    });

    let gap = min_gap(&omegas);
    Ok(Spectrum {
        omegas,
        vectors: Mat4::from_columns(&cols),
        gap,
        degenerate: gap < DEGENERACY_GAP,
    })
}

fn min_gap(omegas: &[C64; 4]) -> f64 {
    let mut gap = f64::INFINITY;
    for j in 0..4 {
        for k in j + 1..4 {
            gap = gap.min((omegas[j] - omegas[k]).norm());
        }
    }
    gap
}

/// Unit norm, first non-negligible component rotated onto the positive real axis.
fn normalize_phase(v: Vec4) -> Vec4 {
    let n = vec_norm(&v);
    if n == 0.0 || !n.is_finite() {
        return v;
    }
    let mut u = v.map(|z| z / n);
    if let Some(lead) = u.iter().copied().find(|z| z.norm() > 1e-10) {
        let phase = lead.conj() / lead.norm();
        u = u.map(|z| z * phase);
    }
    u
}

/// Eigenvalues of any real 4×4 matrix by shifted Schur (QR) iteration.
/// Shares nothing with the closed-form path. Unordered.
pub fn numeric_spectrum_oracle(matrix: &DynamicsMatrix) -> Result<[C64; 4]> {
    let e = &matrix.entries;
    let m = Matrix4::from_fn(|i, j| e[i][j]);
    let schur = Schur::try_new(m, f64::EPSILON, 10_000).ok_or(Error::NonConvergence)?;
    let ev = schur.complex_eigenvalues();
    Ok(std::array::from_fn(|i| ev[i]))
}

/// Distance between two 4-element multisets: the smallest, over all
/// pairings, of the largest pairwise modulus difference.
pub fn multiset_distance(a: &[C64; 4], b: &[C64; 4]) -> f64 {
    let mut best = f64::INFINITY;
    let mut perm = [0usize, 1, 2, 3];
    // Heap's algorithm over the 24 pairings
    let mut c = [0usize; 4];
    let score = |p: &[usize; 4]| (0..4).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max);
    best = best.min(score(&perm));
    let mut i = 0;
    while i < 4 {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(score(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: f64, k: f64, x: f64) -> ModelParams {
        ModelParams::new(d, k, x).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Quartic coefficients recovered by sampling `det(M − ωI)` at five
    /// real points and solving the Vandermonde system.
    fn fitted_quartic(params: &ModelParams) -> [f64; 5] {
        let m = build_dynamics_matrix(params).unwrap().to_complex();
        let xs: [f64; 5] = [-2.0, -1.0, 0.0, 1.5, 2.5];
        let mut a = [[0.0f64; 6]; 5];
        for (r, &x) in xs.iter().enumerate() {
            for k in 0..5 {
                a[r][k] = x.powi(k as i32);
            }
            a[r][5] = (m - Mat4::identity().scale(c(x, 0.0))).det().re;
        }
        // Gaussian elimination with partial pivoting
        for k in 0..5 {
            let piv = (k..5).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
            a.swap(k, piv);
            for i in k + 1..5 {
                let f = a[i][k] / a[k][k];
                for j in k..6 {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
        let mut coef = [0.0; 5];
        for k in (0..5).rev() {
            let s: f64 = (k + 1..5).map(|j| a[k][j] * coef[j]).sum();
            coef[k] = (a[k][5] - s) / a[k][k];
        }
        coef
    }

    #[test]
    fn decoupled_char_poly() {
        let cp = char_poly(&p(1.0, 0.0, 0.0)).unwrap();
        assert_eq!((cp.b, cp.c), (-2.0, 1.0));
        let z = cp.squared_roots();
        assert_eq!(z, [c(1.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn char_poly_matches_determinant_fit() {
        let params = p(0.5, 0.0, 1.0);
        let fit = fitted_quartic(&params);
        let cp = char_poly(&params).unwrap();
        // frozen from the fit: b = -1.25, c = -1.75
        assert!((fit[2] - -1.25).abs() < 1e-12);
        assert!((fit[0] - -1.75).abs() < 1e-12);
        assert!(fit[1].abs() < 1e-12 && fit[3].abs() < 1e-12);
        assert!((fit[4] - 1.0).abs() < 1e-12);
        assert_eq!((cp.b, cp.c), (-1.25, -1.75));
    }

    #[test]
    fn char_poly_matches_fit_with_collisions() {
        for params in [p(-1.7, 0.8, 0.6), p(0.3, 0.4, 1.1), p(-0.2, 0.65, 0.0)] {
            let fit = fitted_quartic(&params);
            let cp = char_poly(&params).unwrap();
            assert!((fit[2] - cp.b).abs() < 1e-11, "{params:?}");
            assert!((fit[0] - cp.c).abs() < 1e-11, "{params:?}");
        }
    }

    #[test]
    fn discriminant_forms_agree() {
        for params in [p(0.5, 0.0, 1.0), p(-1.0, 0.4, 0.3), p(-2.7, 0.8, 1.2), p(0.1, 0.2, 0.0)] {
            let cp = char_poly(&params).unwrap();
            assert!((cp.discriminant() - discriminant(&params)).abs() < 1e-12);
        }
        // exact double root: no spurious complex pair
        let s = eigenfrequencies(&p(0.6, 0.8, 0.0)).unwrap();
        assert!(s.omegas.iter().all(|w| w.im == 0.0));
    }

    #[test]
    fn decoupled_spectrum() {
        let s = eigenfrequencies(&p(0.5, 0.0, 0.0)).unwrap();
        assert_eq!(s.omegas, [c(1.0, 0.0), c(0.5, 0.0), c(-0.5, 0.0), c(-1.0, 0.0)]);
        assert!(!s.degenerate);
        assert!((s.gap - 0.5).abs() < 1e-15);
        assert!(s.max_residual(&build_dynamics_matrix(&p(0.5, 0.0, 0.0)).unwrap()) == 0.0);
    }

    #[test]
    fn region_one_spectrum() {
        // Ω, Γ from the exact roots of z² − 1.25 z − 1.75 (30-digit reference)
        let (omega, gamma) = (1.445_021_622_274_197_4, 0.915_471_184_057_670_5);
        let s = eigenfrequencies(&p(0.5, 0.0, 1.0)).unwrap();
        let expect = [c(0.0, gamma), c(omega, 0.0), c(-omega, 0.0), c(0.0, -gamma)];
        for (a, b) in s.omegas.iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-14, "{a} vs {b}");
        }
        let m = build_dynamics_matrix(&p(0.5, 0.0, 1.0)).unwrap();
        let numeric = numeric_spectrum_oracle(&m).unwrap();
        assert!(multiset_distance(&s.omegas, &numeric) < 1e-9);
        assert!(s.max_residual(&m) < 1e-10);
    }

    #[test]
    fn region_two_spectrum() {
        // ω² = 1 ± 2i
        let (omega, gamma) = (1.272_019_649_514_069, 0.786_151_377_757_423_3);
        let s = eigenfrequencies(&p(-1.0, 0.0, 1.0)).unwrap();
        let expect = [c(omega, gamma), c(-omega, gamma), c(omega, -gamma), c(-omega, -gamma)];
        for (a, b) in s.omegas.iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-14, "{a} vs {b}");
        }
        let m = build_dynamics_matrix(&p(-1.0, 0.0, 1.0)).unwrap();
        assert!(multiset_distance(&s.omegas, &numeric_spectrum_oracle(&m).unwrap()) < 1e-9);
        assert!(s.max_residual(&m) < 1e-10);
    }

    #[test]
    fn eigenvectors_are_normalized() {
        let s = eigenfrequencies(&p(-0.7, 0.4, 0.8)).unwrap();
        for k in 0..4 {
            let v = s.vectors.column(k);
            assert!((vec_norm(&v) - 1.0).abs() < 1e-14);
            let lead = v.iter().find(|z| z.norm() > 1e-10).unwrap();
            assert!(lead.re > 0.0 && lead.im.abs() < 1e-15);
        }
    }

    #[test]
    fn exceptional_point_is_flagged() {
        // δ = −√(1−κ²), χ = 0: the two ω² roots coincide
        let s = eigenfrequencies(&p(-1.0, 0.0, 0.0)).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.gap, 0.0);
    }

    #[test]
    fn numeric_oracle_on_diagonal() {
        let m = build_dynamics_matrix(&p(1.0, 0.0, 0.0)).unwrap();
        let ev = numeric_spectrum_oracle(&m).unwrap();
        let expect = [c(-1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)];
        assert!(multiset_distance(&ev, &expect) < 1e-15);
    }

    #[test]
    fn multiset_distance_ignores_order() {
        let a = [c(1.0, 0.0), c(2.0, 1.0), c(-3.0, 0.5), c(0.0, -1.0)];
        let b = [a[3], a[1], a[0], a[2]];
        assert_eq!(multiset_distance(&a, &b), 0.0);
        let mut d = b;
        d[0] += c(1e-3, 0.0);
        assert!((multiset_distance(&a, &d) - 1e-3).abs() < 1e-15);
    }
}
