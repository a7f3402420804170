//! Deciding almost-ellipticity of connected Lie groups from structural data.
//!
//! The crate works with real Lie algebras given by structure constants, torus
//! representations, simply connected solvable groups realized as matrix
//! groups, and semidirect products of those with compact tori.

pub mod decision;
pub mod ellipticity;
pub mod error;
pub mod exact;
pub mod gallery;
pub mod lie_algebra;
pub mod linalg;
pub mod report;
pub mod sampling;
pub mod solvable_group;
pub mod torus_rep;

pub use nalgebra;

pub use decision::{DecisionOptions, DecisionReport, GroupPresentation, Kind, Verdict};
pub use ellipticity::{EllipticVerdict, SemidirectElement, SemidirectGroup};
pub use error::{Error, Result};
pub use lie_algebra::{DerivedSeries, KillingForm, LieAlgebra, Subspace};
pub use report::{Envelope, Tolerances};
pub use sampling::{DensityReport, Parallelism};
pub use solvable_group::{AlgebraAutomorphism, GroupElement, SolvablePresentation};
pub use torus_rep::{CompactPart, TorusRep, WeightMultiset};
