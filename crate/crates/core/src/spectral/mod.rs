//! Grids, transforms, multipliers and sector geometry.

pub mod field;
pub mod extension;
pub mod grid;
pub mod multiplier;
pub mod norms;
pub mod sector;
pub mod transform;

pub use field::Field;
pub use grid::{GridKind, SpectralGrid};
pub use multiplier::{apply_multiplier, map_spectrum};
pub use sector::{sector_contains, SectorParams, SectorPoint};
pub use transform::{tangential_inverse, tangential_transform};
