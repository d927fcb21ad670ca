//! End-to-end discovery: dependence testing, leaf peeling, and GMM
//! estimation on raw data matrices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dcor::{independence_matrices, DcorMatrices};
use crate::error::{Error, Result};
use crate::gmm::{estimate, EstimateOptions, GmmEstimate};
use crate::peeling::{estimate_arg, PeelingResult};
use crate::surrogate::VariableKind;

/// Significance level policy for the independence tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMode {
    /// alpha = min(0.05, 20000/n^2): an O(n^-2) schedule, which is the rate
    /// needed for consistent graph recovery, capped at a conventional level
    /// for small samples. The constant balances per-cell power against false
    /// rejections, which corrupt leaf peeling far more than missed ones.
    RecommendedRate,
    /// A fixed level in (0, 1).
    Fixed { alpha: f64 },
}

impl AlphaMode {
    pub fn resolve(self, n: usize) -> Result<f64> {
        let alpha = match self {
            AlphaMode::RecommendedRate => (20_000.0 / (n as f64 * n as f64)).min(0.05),
            AlphaMode::Fixed { alpha } => alpha,
        };
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::DegenerateAlpha { alpha });
        }
        Ok(alpha)
    }
}

/// Options for the full pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodOptions {
    pub alpha: AlphaMode,
    pub estimate: EstimateOptions,
}

impl Default for MethodOptions {
    fn default() -> Self {
        Self {
            alpha: AlphaMode::RecommendedRate,
            estimate: EstimateOptions::default(),
        }
    }
}

/// Output of the full pipeline, with each stage's artifacts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineResult {
    pub dcor: DcorMatrices,
    pub peeling: PeelingResult,
    pub estimate: GmmEstimate,
}

/// Runs independence tests, leaf peeling, and GMM estimation.
pub fn run_pipeline(
    x: &DMatrix<f64>,
    kinds: &[VariableKind],
    y: &DMatrix<f64>,
    opts: &MethodOptions,
) -> Result<PipelineResult> {
    let alpha = opts.alpha.resolve(x.nrows())?;
    let dcor = independence_matrices(x, y, alpha)?;
    let peeling = estimate_arg(&dcor)?;
    let estimate = estimate(x, kinds, y, &peeling.arg, &opts.estimate)?;
    Ok(PipelineResult {
        dcor,
        peeling,
        estimate,
    })
}
