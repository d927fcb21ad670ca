//! Causal discovery among primary variables under unobserved confounding,
//! driven by secondary variables that may be invalid instruments.
//!
//! The pipeline has three stages:
//! 1. [`dcor`]: distance-correlation independence tests between every
//!    secondary and primary variable.
//! 2. [`peeling`]: leaf peeling on the test rejections to recover the
//!    ancestral relation graph and per-node candidate IV sets.
//! 3. [`surrogate`] + [`gmm`]: surrogate-IV construction, closed-form GMM
//!    estimation of edge effects, sandwich standard errors, and
//!    FDR-controlled edge selection.
//!
//! [`sim`] generates synthetic benchmark designs and scores estimates;
//! [`pipeline`] ties the stages together for data matrices; [`export`]
//! renders graphs to DOT.

pub mod cli;
pub mod dcor;
pub mod error;
pub mod export;
pub mod graph;
pub mod gmm;
pub mod peeling;
pub mod pipeline;
pub mod sim;
pub mod surrogate;

pub use error::{Error, Result};
