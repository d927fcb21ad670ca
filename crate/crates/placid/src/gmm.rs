//! Closed-form GMM estimation of edge effects from surrogate IVs, sandwich
//! standard errors that account for the estimated centering means, and
//! FDR-controlled edge selection.
//!
//! The moment conditions are affine in the effect vector beta: for each
//! ancestral edge (k, j) and each surrogate column z of node k,
//! E[z * (Y_j - sum_l beta_l Y_{k_l})] = 0, where l ranges over edges into j
//! whose source is k or a mediator of (k, j).

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dcor::normal_cdf;
use crate::error::{Error, Result};
use crate::graph::AncestralGraph;
use crate::surrogate::{build_basis, BasisSpec, Factor, FactorKey, VariableKind};

/// Relative condition number above which the normal matrix is solved by
/// pseudo-inverse with a warning.
const COND_WARN: f64 = 1e12;

/// Weighting matrix policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaMode {
    /// Identity weighting (default).
    Identity,
    /// Two-step: identity first, then the inverse moment covariance at the
    /// first-step estimate.
    TwoStep,
}

/// Estimation options.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimateOptions {
    pub basis: BasisSpec,
    pub omega: OmegaMode,
    /// Propagate uncertainty of the estimated centering means into the
    /// standard errors. Disabling treats the centers as known.
    pub augment_nuisance: bool,
    /// FDR level for edge selection.
    pub q_star: f64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            basis: BasisSpec::default(),
            omega: OmegaMode::Identity,
            augment_nuisance: true,
            q_star: 0.05,
        }
    }
}

/// One stacked moment row: a surrogate column of the edge's source node.
#[derive(Debug, Clone)]
pub struct MomentRow {
    /// Index into [`MomentSystem::edges`] of the edge this row instruments.
    pub edge: usize,
    /// Evaluated surrogate column, length n.
    pub z: Vec<f64>,
    /// Factorization of the column (for nuisance derivatives).
    pub factors: Vec<Factor>,
    /// Target node j of the edge.
    pub target: usize,
    /// Parameter indices with nonzero coefficient in this row's residual:
    /// edges (k_l, j) with k_l the source or one of its mediators.
    pub active: Vec<usize>,
}

/// The stacked affine moment system for an ancestral relation graph.
#[derive(Debug, Clone)]
pub struct MomentSystem {
    pub n: usize,
    /// Parameter order: ancestral edges (k, j), lexicographic.
    pub edges: Vec<(usize, usize)>,
    pub rows: Vec<MomentRow>,
    /// One representative factor per distinct centering mean, ordered by key.
    pub mu_factors: Vec<Factor>,
    pub warnings: Vec<String>,
}

/// Builds the moment system: one surrogate basis per source node, one row
/// per (edge, basis column) pair.
pub fn build_moment_system(
    x: &DMatrix<f64>,
    kinds: &[VariableKind],
    y: &DMatrix<f64>,
    arg: &AncestralGraph,
    basis_spec: &BasisSpec,
) -> Result<MomentSystem> {
    let n = x.nrows();
    if y.nrows() != n {
        return Err(Error::ShapeMismatch {
            context: format!("X has {n} rows, Y has {}", y.nrows()),
        });
    }
    if y.ncols() != arg.p() || x.ncols() != arg.q() {
        return Err(Error::ShapeMismatch {
            context: format!(
                "graph is over p = {}, q = {} but data have p = {}, q = {}",
                arg.p(),
                arg.q(),
                y.ncols(),
                x.ncols()
            ),
        });
    }
    if n < 2 {
        return Err(Error::SampleTooSmall { n, min: 2 });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }

    let edges: Vec<(usize, usize)> = arg.ancestral_edges().iter().copied().collect();
    let sources: BTreeSet<usize> = edges.iter().map(|&(k, _)| k).collect();
    let mut sys_warnings = Vec::new();
    let mut bases = BTreeMap::new();
    for &k in &sources {
        let ca = arg.candidate_ivs(k)?;
        // A candidate set smaller than gamma leaves no nonempty subsets of
        // the required size; fall back to the largest feasible order rather
        // than refusing to estimate the node's edges.
        let mut spec = basis_spec.clone();
        if !ca.is_empty() && spec.gamma > ca.len() {
            sys_warnings.push(format!(
                "node {}: candidate set has {} element(s), clamping gamma from {} to {}",
                k + 1,
                ca.len(),
                spec.gamma,
                ca.len()
            ));
            spec.gamma = ca.len();
        }
        bases.insert(k, build_basis(x, kinds, ca, k, &spec)?);
    }

    let mut rows = Vec::new();
    for (ei, &(k, j)) in edges.iter().enumerate() {
        let me = arg.mediators(k, j);
        let active: Vec<usize> = edges
            .iter()
            .enumerate()
            .filter(|&(_, &(kl, jl))| jl == j && (kl == k || me.contains(&kl)))
            .map(|(l, _)| l)
            .collect();
        for col in &bases[&k].columns {
            rows.push(MomentRow {
                edge: ei,
                z: col.values.clone(),
                factors: col.factors.clone(),
                target: j,
                active: active.clone(),
            });
        }
    }

    let mut by_key: BTreeMap<FactorKey, Factor> = BTreeMap::new();
    for row in &rows {
        for f in &row.factors {
            by_key.entry(f.key()).or_insert_with(|| f.clone());
        }
    }

    Ok(MomentSystem {
        n,
        edges,
        rows,
        mu_factors: by_key.into_values().collect(),
        warnings: sys_warnings,
    })
}

impl MomentSystem {
    /// Jacobian of the moment mean in beta, negated: G[s][l] = E_n[z_s Y_{k_l}]
    /// over active parameters, zero elsewhere.
    pub fn g_matrix(&self, y: &DMatrix<f64>) -> DMatrix<f64> {
        let nf = self.n as f64;
        let mut g = DMatrix::zeros(self.rows.len(), self.edges.len());
        for (s, row) in self.rows.iter().enumerate() {
            for &l in &row.active {
                let k = self.edges[l].0;
                g[(s, l)] = row
                    .z
                    .iter()
                    .enumerate()
                    .map(|(i, &zi)| zi * y[(i, k)])
                    .sum::<f64>()
                    / nf;
            }
        }
        g
    }

    /// Intercept of the moment mean: h[s] = E_n[z_s Y_{j_s}].
    pub fn h_vector(&self, y: &DMatrix<f64>) -> DVector<f64> {
        let nf = self.n as f64;
        DVector::from_iterator(
            self.rows.len(),
            self.rows.iter().map(|row| {
                row.z
                    .iter()
                    .enumerate()
                    .map(|(i, &zi)| zi * y[(i, row.target)])
                    .sum::<f64>()
                    / nf
            }),
        )
    }

    /// Per-observation moments at `beta`: an n x M matrix with entry
    /// z_s(x_i) * (Y_{j_s,i} - sum_l beta_l Y_{k_l,i}).
    pub fn moments(&self, y: &DMatrix<f64>, beta: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.rows.len());
        for (s, row) in self.rows.iter().enumerate() {
            for i in 0..self.n {
                let mut r = y[(i, row.target)];
                for &l in &row.active {
                    r -= beta[l] * y[(i, self.edges[l].0)];
                }
                m[(i, s)] = row.z[i] * r;
            }
        }
        m
    }

    /// Mean moment at `beta`; equals h - G beta by affinity.
    pub fn moment_mean(&self, y: &DMatrix<f64>, beta: &DVector<f64>) -> DVector<f64> {
        let m = self.moments(y, beta);
        DVector::from_iterator(
            self.rows.len(),
            (0..self.rows.len()).map(|s| m.column(s).sum() / self.n as f64),
        )
    }
}

fn pinv(a: &DMatrix<f64>, rel_eps: f64) -> Result<(DMatrix<f64>, f64)> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    if !(smax > 0.0) {
        return Err(Error::SingularNormalMatrix);
    }
    let smin = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let inv = svd
        .pseudo_inverse(smax * rel_eps)
        .map_err(|_| Error::SingularNormalMatrix)?;
    Ok((inv, cond))
}

/// Closed-form weighted GMM solution beta = (G' O G)^-1 G' O h. Returns the
/// estimate and the condition number of the normal matrix; an ill-conditioned
/// system is solved by pseudo-inverse.
pub fn closed_form_beta(
    g: &DMatrix<f64>,
    omega: &DMatrix<f64>,
    h: &DVector<f64>,
) -> Result<(DVector<f64>, f64)> {
    let gt_o = g.transpose() * omega;
    let normal = &gt_o * g;
    let (inv, cond) = pinv(&normal, 1e-12)?;
    Ok((inv * (gt_o * h), cond))
}

/// Sandwich standard errors at `beta`.
///
/// The estimating equations are stacked as (mu_m - t_m(x_i); z_s (b - A
/// beta)_s). With bread G = [[I, 0], [C, -Ghat]] and weight W = blockdiag(I,
/// Omega Ghat Ghat' Omega), the variance is the usual
/// (G'WG)^-1 G'WFWG (G'WG)^-1 and the beta block is its bottom-right corner.
pub fn sandwich_std_errs(
    sys: &MomentSystem,
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    beta: &DVector<f64>,
    omega: &DMatrix<f64>,
    augment_nuisance: bool,
) -> Result<Vec<f64>> {
    let n = sys.n;
    let nf = n as f64;
    let m_rows = sys.rows.len();
    let n_par = sys.edges.len();
    let mus: &[Factor] = if augment_nuisance {
        &sys.mu_factors
    } else {
        &[]
    };
    let m_mu = mus.len();
    let mu_index: BTreeMap<FactorKey, usize> = mus
        .iter()
        .enumerate()
        .map(|(i, f)| (f.key(), i))
        .collect();

    let moments = sys.moments(y, beta);
    let g_hat = sys.g_matrix(y);

    // bread block [[I, 0], [C, -Ghat]]
    let mut gbig = DMatrix::zeros(m_mu + m_rows, m_mu + n_par);
    for i in 0..m_mu {
        gbig[(i, i)] = 1.0;
    }
    for (s, row) in sys.rows.iter().enumerate() {
        for (fi, f) in row.factors.iter().enumerate() {
            let col = mu_index.get(&f.key());
            let Some(&col) = col else { continue };
            // d z_s / d mu = -prod of the other factors; times the residual
            let mut acc = 0.0;
            for i in 0..n {
                let mut others = 1.0;
                for (fj, fo) in row.factors.iter().enumerate() {
                    if fj != fi {
                        others *= fo.term(x[(i, fo.coord)]);
                    }
                }
                let r = if row.z[i] != 0.0 {
                    moments[(i, s)] / row.z[i]
                } else {
                    let mut r = y[(i, row.target)];
                    for &l in &row.active {
                        r -= beta[l] * y[(i, sys.edges[l].0)];
                    }
                    r
                };
                acc += -others * r;
            }
            gbig[(m_mu + s, col)] = acc / nf;
        }
        for l in 0..n_par {
            gbig[(m_mu + s, m_mu + l)] = -g_hat[(s, l)];
        }
    }

    // weight blockdiag(I, Omega Ghat Ghat' Omega)
    let w_beta = omega * &g_hat * g_hat.transpose() * omega;
    let mut w = DMatrix::zeros(m_mu + m_rows, m_mu + m_rows);
    for i in 0..m_mu {
        w[(i, i)] = 1.0;
    }
    for a in 0..m_rows {
        for b in 0..m_rows {
            w[(m_mu + a, m_mu + b)] = w_beta[(a, b)];
        }
    }

    // outer-product meat F = E_n[g_i g_i']
    let mut f = DMatrix::zeros(m_mu + m_rows, m_mu + m_rows);
    let mut gi = DVector::zeros(m_mu + m_rows);
    for i in 0..n {
        for (mi, fac) in mus.iter().enumerate() {
            gi[mi] = fac.center - fac.transform_value(x[(i, fac.coord)]);
        }
        for s in 0..m_rows {
            gi[m_mu + s] = moments[(i, s)];
        }
        f.ger(1.0 / nf, &gi, &gi, 1.0);
    }

    let bread_inner = gbig.transpose() * &w * &gbig;
    let (bread, _cond) = pinv(&bread_inner, 1e-12)?;
    let meat = gbig.transpose() * &w * &f * &w * &gbig;
    let v = &bread * meat * bread.transpose();

    let diag: Vec<f64> = (0..n_par).map(|l| v[(m_mu + l, m_mu + l)]).collect();
    let scale = diag.iter().copied().fold(0.0f64, |a, b| a.max(b.abs()));
    let min_diag = diag.iter().copied().fold(f64::INFINITY, f64::min);
    if min_diag < -1e-8 * scale.max(1e-300) {
        return Err(Error::VarianceNotPsd { min_diag });
    }
    Ok(diag.iter().map(|&d| (d.max(0.0) / nf).sqrt()).collect())
}

/// Two-sided normal p-value for beta / std_err.
pub fn wald_p_value(beta: f64, std_err: f64) -> f64 {
    2.0 * normal_cdf(-(beta / std_err).abs())
}

/// FDR selection valid under arbitrary dependence: selects the l smallest
/// p-values where l is the largest i with P_(i) <= i q / (N sum_j 1/j).
pub fn by_select(p_values: &[f64], q_star: f64) -> Vec<bool> {
    let n = p_values.len();
    let mut selected = vec![false; n];
    if n == 0 {
        return selected;
    }
    let c: f64 = (1..=n).map(|j| 1.0 / j as f64).sum();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        p_values[a]
            .partial_cmp(&p_values[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut l = 0;
    for (rank, &idx) in order.iter().enumerate() {
        let threshold = (rank + 1) as f64 * q_star / (n as f64 * c);
        if p_values[idx] <= threshold {
            l = rank + 1;
        }
    }
    for &idx in &order[..l] {
        selected[idx] = true;
    }
    selected
}

/// Inference output for one ancestral edge (k, j); indices 0-based in
/// memory, 1-based in serialized form.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeEstimate {
    pub k: usize,
    pub j: usize,
    pub beta: f64,
    pub std_err: f64,
    pub p_value: f64,
    pub selected: bool,
}

#[derive(Serialize, Deserialize)]
struct EdgeEstimateRepr {
    k: usize,
    j: usize,
    beta: f64,
    std_err: f64,
    p_value: f64,
    selected: bool,
}

impl Serialize for EdgeEstimate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EdgeEstimateRepr {
            k: self.k + 1,
            j: self.j + 1,
            beta: self.beta,
            std_err: self.std_err,
            p_value: self.p_value,
            selected: self.selected,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EdgeEstimate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = EdgeEstimateRepr::deserialize(d)?;
        if r.k == 0 || r.j == 0 {
            return Err(serde::de::Error::custom("indices are 1-based; found 0"));
        }
        Ok(EdgeEstimate {
            k: r.k - 1,
            j: r.j - 1,
            beta: r.beta,
            std_err: r.std_err,
            p_value: r.p_value,
            selected: r.selected,
        })
    }
}

/// Full estimation result over the ancestral edges.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GmmEstimate {
    pub edges: Vec<EdgeEstimate>,
    pub warnings: Vec<String>,
}

/// End-to-end estimation: moment system, closed-form GMM, sandwich standard
/// errors, p-values, and FDR selection.
pub fn estimate(
    x: &DMatrix<f64>,
    kinds: &[VariableKind],
    y: &DMatrix<f64>,
    arg: &AncestralGraph,
    opts: &EstimateOptions,
) -> Result<GmmEstimate> {
    if !(opts.q_star > 0.0 && opts.q_star < 1.0) {
        return Err(Error::Config(format!(
            "q_star must lie strictly in (0, 1), got {}",
            opts.q_star
        )));
    }
    let mut warnings = Vec::new();
    if arg.ancestral_edges().is_empty() {
        return Ok(GmmEstimate {
            edges: Vec::new(),
            warnings,
        });
    }
    let sys = build_moment_system(x, kinds, y, arg, &opts.basis)?;
    warnings.extend(sys.warnings.iter().cloned());
    let g = sys.g_matrix(y);
    let h = sys.h_vector(y);
    let identity = DMatrix::identity(sys.rows.len(), sys.rows.len());

    let (beta, omega) = match opts.omega {
        OmegaMode::Identity => {
            let (beta, cond) = closed_form_beta(&g, &identity, &h)?;
            if cond > COND_WARN {
                warnings.push(format!(
                    "normal matrix condition number {cond:.3e}; solved by pseudo-inverse"
                ));
            }
            (beta, identity)
        }
        OmegaMode::TwoStep => {
            let (beta1, _) = closed_form_beta(&g, &identity, &h)?;
            let m = sys.moments(y, &beta1);
            let s = m.transpose() * &m / sys.n as f64;
            let (omega, s_cond) = pinv(&s, 1e-12)?;
            if s_cond > COND_WARN {
                warnings.push(format!(
                    "moment covariance condition number {s_cond:.3e}; weighted by pseudo-inverse"
                ));
            }
            let (beta, cond) = closed_form_beta(&g, &omega, &h)?;
            if cond > COND_WARN {
                warnings.push(format!(
                    "normal matrix condition number {cond:.3e}; solved by pseudo-inverse"
                ));
            }
            (beta, omega)
        }
    };

    let std_errs = sandwich_std_errs(&sys, x, y, &beta, &omega, opts.augment_nuisance)?;
    let mut p_values = Vec::with_capacity(sys.edges.len());
    for (l, &(k, j)) in sys.edges.iter().enumerate() {
        if std_errs[l] <= 0.0 {
            return Err(Error::ZeroStdErr { k, j });
        }
        p_values.push(wald_p_value(beta[l], std_errs[l]));
    }
    let selected = by_select(&p_values, opts.q_star);

    let edges = sys
        .edges
        .iter()
        .enumerate()
        .map(|(l, &(k, j))| EdgeEstimate {
            k,
            j,
            beta: beta[l],
            std_err: std_errs[l],
            p_value: p_values[l],
            selected: selected[l],
        })
        .collect();
    Ok(GmmEstimate { edges, warnings })
}
