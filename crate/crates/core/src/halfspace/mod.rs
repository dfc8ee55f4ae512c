//! Half-space Lamé resolvent: reflection, whole-space solve and boundary corrector.

pub mod kernel;
pub mod rep;
pub mod roots;
pub mod solver;

pub use kernel::{apply_boundary_kernel, apply_boundary_kernel_adjoint, KernelKind};
pub use rep::{HalfSpaceRep, LayerBasis};
pub use roots::{characteristic_roots, stable_m, CharacteristicRoots};
pub use solver::{HalfSpaceResolvent, HalfSpaceSolution};
