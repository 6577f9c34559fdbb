//! Randomized robust price optimization.
//!
//! Given a multi-product demand model (linear, semi-log or log-log), a finite
//! grid of allowable prices per product, and an uncertainty set over the demand
//! parameters, this crate computes:
//!
//! * the nominal optimal price vector (`oracles::nominal_price_opt`),
//! * the deterministic robust price vector maximizing worst-case revenue
//!   (`convex::solve_drpo_convex`, `discrete::drpo_discrete`),
//! * a randomized pricing policy — a finitely supported distribution over
//!   price vectors — maximizing worst-case *expected* revenue
//!   (`convex::solve_rrpo_convex` for L1 uncertainty balls,
//!   `discrete::solve_double_cg` for finite uncertainty sets),
//! * randomization-proofness diagnostics (`analysis`).
//!
//! Everything is backed by a dense two-phase simplex solver (`lp`) so the
//! crate has no dependency on external optimization software.

pub mod analysis;
pub mod batch;
pub mod convex;
pub mod demand;
pub mod discrete;
pub mod generate;
pub mod instance_io;
pub mod lp;
pub mod oracles;
pub mod rng;
pub mod uncertainty;

pub use demand::{DemandFamily, Instance, ParamVector, PriceVector};
pub use oracles::{PricingMethod, RandomizedPolicy};
pub use uncertainty::{DiscreteBudgetSet, ExplicitSet, L1Set, Scenario, UncertaintySet};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("nonpositive price {price} at product {product} (log-log demand requires p > 0)")]
    NonpositivePrice { product: usize, price: f64 },
    #[error("enumeration cap exceeded: {required} candidates, cap {cap}")]
    CapExceeded { required: u128, cap: u128 },
    #[error("pricing method {method} is not valid for demand family {family}")]
    MethodFamilyMismatch { method: String, family: String },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),
    #[error("numerical failure in LP solve: {0}")]
    NumericalFailure(String),
    #[error("policy support mismatch: {0}")]
    SupportMismatch(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("parse error in {path}: {message}")]
    ParseError { path: String, message: String },
    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersionMismatch { found: u32, expected: u32 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
