//! Linear Heisenberg dynamics of a trapped-atom optical parametric amplifier
//! with s-wave collisions.
//!
//! The model couples one excited trap mode `ĉ` of a condensate to a quantized
//! optical mode `â`. Everything observable (instability regimes, growth rates,
//! field intensities, the atom-photon entanglement coefficient) follows from
//! the 4×4 propagator acting on `(ĉ, ĉ†, â, â†)`, which this crate computes
//! two independent ways.

pub mod cli;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod model;
pub mod spectral;
pub mod stability;
pub mod validate;

pub use error::{Error, Result};
pub use model::{DynamicsMatrix, InitialState, ModelParams, PhysicalInputs};
pub use spectral::{CharPoly, Spectrum};
pub use stability::{Regime, RegimeTag};
pub use dynamics::{CovarianceState, IntensityRecord, Method, Propagator};
pub use entanglement::YRecord;

pub use num_complex::Complex64 as C64;
