//! Schwinger-boson coherent states on truncated Fock spaces.
//!
//! Sectors of the multimode Fock space are enumerated in [`fock`], sparse
//! operators and Lie-algebra generators live in [`operators`], coherent-state
//! families in [`states`], sphere quadrature and resolution-of-identity checks
//! in [`integration`], and residual reports in [`verify`].

pub mod error;
pub mod fock;
pub mod integration;
pub mod operators;
pub mod special;
pub mod states;
pub mod verify;

pub type C64 = num_complex::Complex64;

pub use error::{Error, Result};
pub use fock::{enumerate_sector, sector_dimension, Constraint, OccupationState, SectorBasis, SectorSpec};
pub use integration::{FamilySpec, QuadratureGrid};
pub use operators::{GeneratorSet, Group, SparseOperator};
pub use states::{EulerAngles, Ket, PlanePoint, SpherePoint};
pub use verify::CheckReport;
