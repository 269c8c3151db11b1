//! Dimensionless model parameters and the Heisenberg dynamics matrix.
//!
//! Operators are ordered `x̂ = (ĉ, ĉ†, â, â†)`: the excited trap mode first,
//! the optical mode second. With time measured in units of the trap-mode
//! frequency `ω_m`, the equations of motion are `dx̂/dt = i M x̂`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat4;

/// The three dimensionless numbers defining the system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Optical detuning in units of `ω_m`. Either sign.
    pub delta: f64,
    /// Collision parameter in units of `ω_m`, restricted to `[0, 1)`.
    pub kappa: f64,
    /// Condensate-light coupling in units of `ω_m`, nonnegative.
    pub chi: f64,
}

impl ModelParams {
    pub fn new(delta: f64, kappa: f64, chi: f64) -> Result<Self> {
        let p = ModelParams { delta, kappa, chi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("delta", self.delta), ("kappa", self.kappa), ("chi", self.chi)] {
            if !value.is_finite() {
                return Err(Error::InvalidParam { name, value, reason: "must be finite" });
            }
        }
        if self.chi < 0.0 {
            return Err(Error::InvalidParam {
                name: "chi",
                value: self.chi,
                reason: "must be nonnegative",
            });
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidParam {
                name: "kappa",
                value: self.kappa,
                reason: "only repulsive collisions (kappa >= 0) are modeled",
            });
        }
        if self.kappa >= 1.0 {
            return Err(Error::OutsideValidity(self.kappa));
        }
        Ok(())
    }

    pub fn chi_squared(&self) -> f64 {
        self.chi * self.chi
    }
}

/// Inputs in physical (inverse-time) units, reduced by [`reduce_physical`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalInputs {
    /// Mean number of condensed atoms `N`.
    pub n_atoms: f64,
    /// `|g₁||g₂||a₂| / |Δ|`.
    pub coupling_product: f64,
    /// Optical transition matrix element `A₀ₘ`.
    pub optical_matrix_element: f64,
    /// Precomputed collision parameter `κ_m` (the overlap integral times `2NU/ħ`).
    pub collision_overlap: f64,
    /// Collision-modified trap level frequency `ω_m`; the unit of frequency.
    pub omega_m: f64,
    /// Optical detuning `δ = ω₁ − ω₂`.
    pub detuning: f64,
}

/// Initial state: trap mode in vacuum, optical mode coherent with amplitude `alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialState {
    pub alpha: C64,
}

impl InitialState {
    pub fn coherent(alpha: C64) -> Self {
        InitialState { alpha }
    }
}

/// Real 4×4 matrix `M` with `dx̂/dt = i M x̂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicsMatrix {
    pub entries: [[f64; 4]; 4],
}

impl DynamicsMatrix {
    pub fn to_complex(&self) -> Mat4 {
        Mat4::from_real(self.entries)
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.entries[i][i]).sum()
    }
}

pub fn build_dynamics_matrix(params: &ModelParams) -> Result<DynamicsMatrix> {
    params.validate()?;
    let ModelParams { delta: d, kappa: k, chi: x } = *params;
    Ok(DynamicsMatrix {
        entries: [
            [-1.0, -k, -x, -x],
            [k, 1.0, x, x],
            [-x, -x, -d, 0.0],
            [x, x, 0.0, d],
        ],
    })
}

/// Reduces physical inputs to dimensionless parameters.
pub fn reduce_physical(inputs: &PhysicalInputs) -> Result<ModelParams> {
    let PhysicalInputs {
        n_atoms,
        coupling_product,
        optical_matrix_element,
        collision_overlap,
        omega_m,
        detuning,
    } = *inputs;
    let fields = [
        ("n_atoms", n_atoms),
        ("coupling_product", coupling_product),
        ("optical_matrix_element", optical_matrix_element),
        ("collision_overlap", collision_overlap),
        ("omega_m", omega_m),
        ("detuning", detuning),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            return Err(Error::InvalidParam { name, value, reason: "must be finite" });
        }
    }
    if omega_m <= 0.0 {
        return Err(Error::InvalidParam {
            name: "omega_m",
            value: omega_m,
            reason: "must be positive",
        });
    }
    if n_atoms < 0.0 {
        return Err(Error::InvalidParam {
            name: "n_atoms",
            value: n_atoms,
            reason: "must be nonnegative",
        });
    }
    let chi = (n_atoms.sqrt() * optical_matrix_element * coupling_product / omega_m).abs();
    ModelParams::new(detuning / omega_m, collision_overlap / omega_m, chi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoupled_matrix_is_diagonal() {
        let m = build_dynamics_matrix(&ModelParams::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        let mut expect = [[0.0; 4]; 4];
        for (i, v) in [-1.0, 1.0, -1.0, 1.0].into_iter().enumerate() {
            expect[i][i] = v;
        }
        assert_eq!(m.entries, expect);
    }

    #[test]
    fn entries_match_equations_of_motion() {
        let m = build_dynamics_matrix(&ModelParams::new(0.5, 0.4, 1.0).unwrap()).unwrap();
        assert_eq!(
            m.entries,
            [
                [-1.0, -0.4, -1.0, -1.0],
                [0.4, 1.0, 1.0, 1.0],
                [-1.0, -1.0, -0.5, 0.0],
                [1.0, 1.0, 0.0, 0.5],
            ]
        );
        assert_eq!(m.trace(), 0.0);
    }

    #[test]
    fn adjoint_swap_negates() {
        let m = build_dynamics_matrix(&ModelParams::new(-1.3, 0.7, 0.9).unwrap()).unwrap();
        let c = m.to_complex();
        assert_eq!(c.swap_adjoint(), c.scale(C64::new(-1.0, 0.0)));
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(matches!(ModelParams::new(f64::NAN, 0.0, 1.0), Err(Error::InvalidParam { .. })));
        assert!(matches!(ModelParams::new(0.5, f64::INFINITY, 1.0), Err(Error::InvalidParam { .. })));
        assert!(matches!(ModelParams::new(0.5, 0.0, -1.0), Err(Error::InvalidParam { name: "chi", .. })));
        assert!(matches!(ModelParams::new(0.5, -0.1, 1.0), Err(Error::InvalidParam { name: "kappa", .. })));
        assert!(matches!(ModelParams::new(0.5, 1.0, 1.0), Err(Error::OutsideValidity(_))));
        assert!(matches!(ModelParams::new(0.5, 1.2, 1.0), Err(Error::OutsideValidity(_))));
        let bad = ModelParams { delta: 0.5, kappa: 1.5, chi: 1.0 };
        assert!(build_dynamics_matrix(&bad).is_err());
    }

    fn inputs() -> PhysicalInputs {
        let omega_m = 2.0e3;
        PhysicalInputs {
            n_atoms: 1.0e4,
            coupling_product: 0.05 * omega_m,
            optical_matrix_element: 0.1,
            collision_overlap: 0.3 * omega_m,
            omega_m,
            detuning: 0.5 * omega_m,
        }
    }

    #[test]
    fn reduction_by_hand() {
        // sqrt(1e4) * 0.1 * 0.05 = 0.5
        let p = reduce_physical(&inputs()).unwrap();
        assert!((p.delta - 0.5).abs() < 1e-15);
        assert!((p.kappa - 0.3).abs() < 1e-15);
        assert!((p.chi - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reduction_edge_cases() {
        let mut i = inputs();
        i.collision_overlap = 0.0;
        assert_eq!(reduce_physical(&i).unwrap().kappa, 0.0);

        let mut i = inputs();
        i.n_atoms = 0.0;
        assert_eq!(reduce_physical(&i).unwrap().chi, 0.0);

        let mut i = inputs();
        i.optical_matrix_element = -0.1;
        assert!((reduce_physical(&i).unwrap().chi - 0.5).abs() < 1e-15);

        let mut i = inputs();
        i.omega_m = 0.0;
        assert!(matches!(reduce_physical(&i), Err(Error::InvalidParam { name: "omega_m", .. })));

        let mut i = inputs();
        i.collision_overlap = i.omega_m;
        assert!(matches!(reduce_physical(&i), Err(Error::OutsideValidity(_))));
    }

    #[test]
    fn both_entry_paths_agree() {
        let p = reduce_physical(&inputs()).unwrap();
        let direct = ModelParams::new(0.5, 0.3, 0.5).unwrap();
        let a = build_dynamics_matrix(&p).unwrap();
        let b = build_dynamics_matrix(&direct).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((a.entries[i][j] - b.entries[i][j]).abs() < 1e-15);
            }
        }
    }
}
