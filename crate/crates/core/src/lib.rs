//! Symmetry-protected-topological invariants for uniform matrix-product
//! states: exact finite-group cohomology over torus coefficients, the
//! projective-representation (H^2) and charge (H^1) index pipelines, and
//! F-norm interaction machinery.

pub mod builtins;
pub mod cochain;
pub mod cohomology;
pub mod error;
pub mod group;
pub mod indices;
pub mod interactions;
pub mod linalg;
pub mod mps;
pub mod random;
pub mod snf;
pub mod torus;

pub use cochain::{Cochain, NumericCochain};
pub use cohomology::{CohomologyClass, CohomologyGroup};
pub use error::SptError;
pub use group::{FiniteGroup, GroupHom};
pub use indices::{IndexReport, ProjectiveRep, Transform, VerifyRow};
pub use interactions::{Interaction, LatticePatch, Metric};
pub use mps::{MpsSymmetryData, OnSiteAction, UniformMPS};
pub use torus::TorusValue;
