//! A finite-depth dyadic harmonic analysis laboratory.
//!
//! Everything lives on the dyadic tree of `[0,1)` truncated at depth `n`:
//! functions are constant on the `2^n` finest cells, symbols are indexed by
//! the `2^n − 1` intervals above them. The crate provides fast Haar
//! transforms, paraproducts and their compositions, martingale transforms,
//! Muckenhoupt characteristics, sparse collections, weighted operator norms
//! and a set of seeded ensemble experiments.

pub mod cli;
pub mod config;
pub mod error;
pub mod generators;
pub mod lattice;
pub mod operator;
pub mod paraproduct;
pub mod report;
pub mod rng;
pub mod sparse;
pub mod step;
pub mod symbol;
pub mod verification;
pub mod weights;

pub use config::{Format, RunConfig};
pub use error::{DyadError, Result};
pub use generators::SymbolSpec;
pub use lattice::{DyadicInterval, Lattice};
pub use operator::{to_matrix, OperatorDescription, OperatorMatrix};
pub use report::ExperimentReport;
pub use sparse::{SparseCollection, SparseMember};
pub use step::{HaarExpansion, StepFunction};
pub use symbol::{BmoFlavor, Convention, SymbolSequence};
pub use weights::{Weight, WeightSpec};
