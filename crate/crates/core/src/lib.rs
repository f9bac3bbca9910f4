//! Young-function calculus, Orlicz norms on one-dimensional and radial
//! domains, and the first eigenvalue of the Dirichlet g-Laplacian at a
//! prescribed energy level, together with explicit eigenvalue lower bounds
//! and a verification pipeline that checks them against computed values.
//!
//! The crate is organised bottom-up:
//!
//! * [`young`]: Young functions `G` with density `g`, inverses, conjugates,
//!   growth indices, the Δ′ constants and Sobolev-critical objects.
//! * [`orlicz`]: discrete fields, weights, modulars and Luxemburg norms.
//! * [`eigen`]: constrained minimisation of `I(u) = ∫ G(|∇u|)` over the level
//!   set `∫ w H(|u|) = μ`.
//! * [`bounds`]: constant ledger, hypothesis checks, lower-bound formulas and
//!   the bound-versus-eigenvalue verification.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod eigen;
mod error;
pub mod grid;
pub mod orlicz;
pub mod quad;
pub mod young;

pub use error::{Error, Result};

pub use bounds::{
    BoundResult, BoundTarget, ConstantLedger, HypothesisReport, LedgerEntry, Provenance,
    TheoremId, VerificationReport, VerifyOptions,
};
pub use eigen::{EigenProblem, EigenResult, SolveOptions};
pub use orlicz::{DomainGeometry, ElementField, Field, Weight, WeightKind};
pub use young::{Family, OrderingWitness, SobolevClass, YoungFunction, YoungSpec};
