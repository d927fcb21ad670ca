//! Empirical distance covariance/correlation and the asymptotic independence
//! test used as the dependence oracle of the peeling stage.
//!
//! Two algebraically equivalent estimators are exposed: the S1 + S2 - 2*S3
//! form (with S3 factored into row means, O(n^2)) and the double-centered
//! form. Both are kept so each can serve as a check on the other.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-pair distance correlation statistics.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DcorStats {
    /// Squared empirical distance covariance, clamped at 0.
    pub v2_xy: f64,
    /// Squared distance variance of x.
    pub v2_xx: f64,
    /// Squared distance variance of y.
    pub v2_yy: f64,
    /// Empirical distance correlation in [0, 1]; 0 when a variance vanishes.
    pub r: f64,
    /// The S2 product-of-mean-distances term.
    pub s2: f64,
    /// Test statistic T_n = n * v2_xy / s2.
    pub t: f64,
}

/// q x p distance correlations and test rejections for all (X_i, Y_j) pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DcorMatrices {
    /// Distance correlations, `c[i][j]` for pair (X_i, Y_j).
    pub c: Vec<Vec<f64>>,
    /// Independence-test rejections (1 = dependence detected).
    pub rejections: Vec<Vec<u8>>,
    /// Significance level used for every cell.
    pub alpha: f64,
}

impl DcorMatrices {
    pub fn q(&self) -> usize {
        self.c.len()
    }

    pub fn p(&self) -> usize {
        self.c.first().map_or(0, |row| row.len())
    }
}

fn validate_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::SampleTooSmall { n: x.len(), min: 2 });
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Squared empirical distance covariance via S1 + S2 - 2*S3, with S3
/// factored as (1/n) sum_t (mean_r |x_r - x_t|)(mean_s |y_s - y_t|).
pub fn dcov_sq_direct(x: &[f64], y: &[f64]) -> Result<f64> {
    validate_pair(x, y)?;
    let n = x.len();
    let nf = n as f64;
    let mut xrow = vec![0.0; n];
    let mut yrow = vec![0.0; n];
    let mut s1 = 0.0;
    for r in 0..n {
        for s in 0..n {
            let dx = (x[r] - x[s]).abs();
            let dy = (y[r] - y[s]).abs();
            s1 += dx * dy;
            xrow[r] += dx;
            yrow[r] += dy;
        }
    }
    s1 /= nf * nf;
    let xbar = xrow.iter().sum::<f64>() / (nf * nf);
    let ybar = yrow.iter().sum::<f64>() / (nf * nf);
    let s2 = xbar * ybar;
    let s3 = (0..n)
        .map(|t| (xrow[t] / nf) * (yrow[t] / nf))
        .sum::<f64>()
        / nf;
    Ok((s1 + s2 - 2.0 * s3).max(0.0))
}

/// Squared empirical distance covariance via double-centered distance
/// matrices: n^-2 * sum_ij A_ij B_ij.
pub fn dcov_sq_centered(x: &[f64], y: &[f64]) -> Result<f64> {
    validate_pair(x, y)?;
    let a = CenteredColumn::build(x);
    let b = CenteredColumn::build(y);
    Ok(a.dcov_sq_with(&b))
}

/// Cached per-column quantities for repeated pairwise evaluation: the
/// double-centered distance matrix, the mean distance, and the distance
/// variance.
struct CenteredColumn {
    n: usize,
    centered: Vec<f64>,
    mean_dist: f64,
    v2_self: f64,
}

impl CenteredColumn {
    fn build(x: &[f64]) -> Self {
        let n = x.len();
        let nf = n as f64;
        let mut dist = vec![0.0; n * n];
        let mut row_mean = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let d = (x[i] - x[j]).abs();
                dist[i * n + j] = d;
                row_mean[i] += d;
            }
        }
        for m in row_mean.iter_mut() {
            *m /= nf;
        }
        let grand = row_mean.iter().sum::<f64>() / nf;
        let mut centered = dist;
        let mut v2_self = 0.0;
        for i in 0..n {
            for j in 0..n {
                let c = centered[i * n + j] - row_mean[i] - row_mean[j] + grand;
                centered[i * n + j] = c;
                v2_self += c * c;
            }
        }
        v2_self = (v2_self / (nf * nf)).max(0.0);
        Self {
            n,
            centered,
            mean_dist: grand,
            v2_self,
        }
    }

    fn dcov_sq_with(&self, other: &CenteredColumn) -> f64 {
        debug_assert_eq!(self.n, other.n);
        let nf = self.n as f64;
        let dot: f64 = self
            .centered
            .iter()
            .zip(other.centered.iter())
            .map(|(a, b)| a * b)
            .sum();
        (dot / (nf * nf)).max(0.0)
    }

    fn stats_with(&self, other: &CenteredColumn) -> DcorStats {
        let v2_xy = self.dcov_sq_with(other);
        let v2_xx = self.v2_self;
        let v2_yy = other.v2_self;
        let denom = (v2_xx * v2_yy).sqrt();
        let r = if denom > 0.0 { v2_xy / denom } else { 0.0 };
        let s2 = self.mean_dist * other.mean_dist;
        let t = if s2 > 0.0 {
            self.n as f64 * v2_xy / s2
        } else {
            0.0
        };
        DcorStats {
            v2_xy,
            v2_xx,
            v2_yy,
            r,
            s2,
            t,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::DegenerateAlpha { alpha });
    }
    Ok(())
}

/// Distance-correlation independence test at asymptotic level `alpha`:
/// rejects when sqrt(T_n) exceeds the standard normal (1 - alpha/2) quantile.
/// A degenerate pair (zero distance variance) never rejects.
pub fn dcor_test(x: &[f64], y: &[f64], alpha: f64) -> Result<(DcorStats, bool)> {
    validate_pair(x, y)?;
    check_alpha(alpha)?;
    let a = CenteredColumn::build(x);
    let b = CenteredColumn::build(y);
    let stats = a.stats_with(&b);
    let reject = reject_from_stats(&stats, alpha);
    Ok((stats, reject))
}

fn reject_from_stats(stats: &DcorStats, alpha: f64) -> bool {
    if stats.s2 <= 0.0 || stats.v2_xx * stats.v2_yy <= 0.0 {
        return false;
    }
    stats.t.max(0.0).sqrt() > normal_quantile(1.0 - alpha / 2.0)
}

/// Pairwise distance correlations and rejections for all columns of `x`
/// against all columns of `y`. Cells are computed independently; the result
/// does not depend on evaluation order.
pub fn independence_matrices(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    alpha: f64,
) -> Result<DcorMatrices> {
    if x.nrows() != y.nrows() {
        return Err(Error::ShapeMismatch {
            context: format!("X has {} rows, Y has {}", x.nrows(), y.nrows()),
        });
    }
    if x.nrows() < 2 {
        return Err(Error::SampleTooSmall {
            n: x.nrows(),
            min: 2,
        });
    }
    check_alpha(alpha)?;
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let q = x.ncols();
    let p = y.ncols();
    // Distance matrices for Y columns are shared across all X rows; each X
    // column's matrix is built once inside its own task.
    let y_cols: Vec<CenteredColumn> = (0..p)
        .into_par_iter()
        .map(|j| CenteredColumn::build(y.column(j).as_slice()))
        .collect();
    let rows: Vec<(Vec<f64>, Vec<u8>)> = (0..q)
        .into_par_iter()
        .map(|i| {
            let xi = CenteredColumn::build(x.column(i).as_slice());
            let mut c_row = Vec::with_capacity(p);
            let mut r_row = Vec::with_capacity(p);
            for yc in &y_cols {
                let stats = xi.stats_with(yc);
                c_row.push(stats.r);
                r_row.push(u8::from(reject_from_stats(&stats, alpha)));
            }
            (c_row, r_row)
        })
        .collect();
    let (c, rejections) = rows.into_iter().unzip();
    Ok(DcorMatrices {
        c,
        rejections,
        alpha,
    })
}

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal quantile (inverse CDF) for p in (0, 1).
///
/// Wichura's rational approximation refined with one Newton step against
/// [`normal_cdf`], giving |cdf(quantile(p)) - p| well below 1e-12.
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "probability must lie in (0, 1)");
    let x = wichura_ppnd(p);
    let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if pdf > 0.0 {
        x - (normal_cdf(x) - p) / pdf
    } else {
        x
    }
}

/// Wichura's PPND16 algorithm (AS 241).
fn wichura_ppnd(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = q
            * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
                + 6.7265770927008700853e4)
                * r
                + 4.5921953931549871457e4)
                * r
                + 1.3731693765509461125e4)
                * r
                + 1.9715909503065514427e3)
                * r
                + 1.3314166789178437745e2)
                * r
                + 3.3871328727963666080e0);
        let den = ((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
            + 3.9307895800092710610e4)
            * r
            + 2.1213794301586595867e4)
            * r
            + 5.3941960214247511077e3)
            * r
            + 6.8718700749205790830e2)
            * r
            + 4.2313330701600911252e1)
            * r
            + 1.0;
        return num / den;
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
            + 2.41780725177450611770e-1)
            * r
            + 1.27045825245236838258e0)
            * r
            + 3.64784832476320460504e0)
            * r
            + 5.76949722146069140550e0)
            * r
            + 4.63033784615654529590e0)
            * r
            + 1.42343711074968357734e0;
        let den = ((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
            + 1.51986665636164571966e-2)
            * r
            + 1.48103976427480074590e-1)
            * r
            + 6.89767334985100004550e-1)
            * r
            + 1.67638483018380384940e0)
            * r
            + 2.05319162663775882187e0)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
            + 1.24266094738807843860e-3)
            * r
            + 2.65321895265761230930e-2)
            * r
            + 2.96560571828504891230e-1)
            * r
            + 1.78482653991729133580e0)
            * r
            + 5.46378491116411436990e0)
            * r
            + 6.65790464350110377720e0;
        let den = ((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
            + 1.84631831751005468180e-5)
            * r
            + 7.86869131145613259100e-4)
            * r
            + 1.48753612908506148525e-2)
            * r
            + 1.36929880922735805310e-1)
            * r
            + 5.99832206555887937690e-1)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}
