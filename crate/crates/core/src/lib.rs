//! Spectral resolvent solvers for the linearized compressible Navier–Stokes
//! (Lamé/Stokes) system, discrete Besov norms, numerical Laplace inversion and
//! finite-difference cross-checks.

pub mod besov;
pub mod campaign;
pub mod error;
pub mod fd;
pub mod halfspace;
pub mod io;
pub mod model;
pub mod operators;
pub mod semigroup;
pub mod spectral;
pub mod stokes;
pub mod verifier;
pub mod wholespace;

pub use error::{LabError, Result};
pub use model::{ModelParams, PressureLaw};
pub use num_complex::Complex64;
