//! Numerical verification of differential implications between convexity,
//! starlikeness and related conditions for p-valent analytic functions on the unit disk.
//!
//! The crate is layered bottom-up:
//!
//! - [`series`]: truncated power series and the classes `A_p`, `A_{p,b}`.
//! - [`grid`] and [`functionals`]: the four disk functionals and their grid infima.
//! - [`thresholds`]: closed-form bounds of every implication.
//! - [`admissibility`]: numerical suprema behind those bounds.
//! - [`corpus`]: test-function families.
//! - [`verify`]: implication checks, suites and the sharpness probe.

pub mod admissibility;
pub mod corpus;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod series;
pub mod thresholds;
pub mod verify;

pub use admissibility::{AdmissibilityProblem, SupReport};
pub use corpus::{CorpusEntry, CorpusManifest, Family, FamilySpec};
pub use error::{Error, Result};
pub use functionals::{FunctionalKind, FunctionalProfile, PointwiseReport};
pub use grid::{DiskGrid, InfEstimate};
pub use series::{MultivalentFunction, PowerSeries};
pub use thresholds::{RootQuadruple, ThresholdSpec, TheoremId};
pub use verify::{ImplicationCase, SharpnessReport, Status, SuiteReport, VerificationReport};
