//! Synthetic benchmark designs, scoring, and replicated benchmark runs.
//!
//! Each primary node j is intervened on by three secondary variables:
//! X_j and X_{p+j} (valid: they touch nothing else) and X_{2p + floor(j/2)},
//! shared with the paired node. Latent confounders load on consecutive node
//! pairs. Intervention effects are nonlinear, so surrogate products remain
//! informative.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gmm::EdgeEstimate;
use crate::graph::CausalGraph;
use crate::pipeline::{run_pipeline, MethodOptions};
use crate::surrogate::VariableKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    /// Independent edges i -> j (i < j) with probability 1 / (2p).
    Random,
    /// Node 1 points at every other node.
    Hub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondaryKind {
    /// Standard normal secondary variables, smooth nonlinear effects.
    Continuous,
    /// Bernoulli(1/2) secondary variables, pairwise interaction effects.
    Discrete,
}

impl SecondaryKind {
    pub fn variable_kind(self) -> VariableKind {
        match self {
            SecondaryKind::Continuous => VariableKind::Continuous,
            SecondaryKind::Discrete => VariableKind::Binary,
        }
    }
}

/// Benchmark configuration. The number of secondary variables is derived:
/// q = 2p + ceil(p / 2).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub graph: GraphKind,
    pub p: usize,
    /// Number of latent confounders; confounder m loads on nodes 2m and
    /// 2m + 1.
    pub r: usize,
    pub n: usize,
    pub secondary: SecondaryKind,
    pub n_reps: usize,
    pub seed: u64,
    /// Alternative confounder block layout: confounder m loads on nodes
    /// 2m + 1 and 2m + 2 instead, with confounder 0 also loading node 0.
    /// The two layouts differ only in which node pairs share a confounder.
    pub alt_confounder_blocks: bool,
    pub method: MethodOptions,
}

impl Default for SimConfig {
    fn default() -> Self {
        let mut method = MethodOptions::default();
        method.estimate.basis.gamma = 2;
        Self {
            graph: GraphKind::Hub,
            p: 10,
            r: 5,
            n: 1000,
            secondary: SecondaryKind::Continuous,
            n_reps: 50,
            seed: 17,
            alt_confounder_blocks: false,
            method,
        }
    }
}

impl SimConfig {
    pub fn q(&self) -> usize {
        derived_q(self.p)
    }
}

pub fn derived_q(p: usize) -> usize {
    2 * p + p / 2
}

/// Third intervener of node j (0-based): consecutive node pairs share one
/// secondary variable, with the first and last node pairing up.
pub fn shared_intervener(p: usize, j: usize) -> usize {
    2 * p - 1 + (j + 1) / 2
}

/// Named configurations used by the benchmark harness: each graph kind and
/// secondary kind at p = 10 and p = 20, with two valid IVs per node and
/// gamma = 2.
pub fn preset(name: &str) -> Option<SimConfig> {
    let mut cfg = SimConfig::default();
    let (graph, p, secondary) = match name {
        "hub-p10-continuous" => (GraphKind::Hub, 10, SecondaryKind::Continuous),
        "hub-p20-continuous" => (GraphKind::Hub, 20, SecondaryKind::Continuous),
        "random-p10-continuous" => (GraphKind::Random, 10, SecondaryKind::Continuous),
        "random-p20-continuous" => (GraphKind::Random, 20, SecondaryKind::Continuous),
        "hub-p10-discrete" => (GraphKind::Hub, 10, SecondaryKind::Discrete),
        "hub-p20-discrete" => (GraphKind::Hub, 20, SecondaryKind::Discrete),
        "random-p10-discrete" => (GraphKind::Random, 10, SecondaryKind::Discrete),
        "random-p20-discrete" => (GraphKind::Random, 20, SecondaryKind::Discrete),
        _ => return None,
    };
    cfg.graph = graph;
    cfg.p = p;
    cfg.r = p / 2;
    cfg.secondary = secondary;
    Some(cfg)
}

pub const PRESET_NAMES: [&str; 8] = [
    "hub-p10-continuous",
    "hub-p20-continuous",
    "random-p10-continuous",
    "random-p20-continuous",
    "hub-p10-discrete",
    "hub-p20-discrete",
    "random-p10-discrete",
    "random-p20-discrete",
];

/// A drawn ground-truth model: graph, direct effects, and nuisance draws.
#[derive(Debug, Clone)]
pub struct TrueModel {
    pub graph: CausalGraph,
    /// Direct effects on the graph's edges.
    pub beta: BTreeMap<(usize, usize), f64>,
    /// Intervention effect scale per node (continuous designs).
    pub w: Vec<f64>,
    /// Noise standard deviation per node.
    pub sigma: Vec<f64>,
    /// p x r confounder loading matrix.
    pub lambda: DMatrix<f64>,
}

fn signed_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let mag = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

/// Draws a ground-truth model for one replication.
pub fn gen_model(cfg: &SimConfig, rng: &mut ChaCha8Rng) -> Result<TrueModel> {
    let p = cfg.p;
    let q = cfg.q();
    let mut edges = BTreeSet::new();
    match cfg.graph {
        GraphKind::Hub => {
            for j in 1..p {
                edges.insert((0, j));
            }
        }
        GraphKind::Random => {
            let prob = 1.0 / (2.0 * p as f64);
            for i in 0..p {
                for j in (i + 1)..p {
                    if rng.gen_bool(prob) {
                        edges.insert((i, j));
                    }
                }
            }
        }
    }
    let beta: BTreeMap<(usize, usize), f64> = edges
        .iter()
        .map(|&e| (e, signed_uniform(rng, 0.8, 1.2)))
        .collect();
    let interventions: BTreeSet<(usize, usize)> = (0..p)
        .flat_map(|j| [(j, j), (p + j, j), (shared_intervener(p, j), j)])
        .collect();
    let graph = CausalGraph::new(p, q, edges, interventions)?;
    let w: Vec<f64> = (0..p).map(|_| signed_uniform(rng, 2.8, 3.2)).collect();
    let sigma: Vec<f64> = (0..p).map(|_| rng.gen_range(0.3..0.4)).collect();
    let loads = |j: usize, m: usize| -> bool {
        if cfg.alt_confounder_blocks {
            (j == 0 && m == 0) || (j >= 1 && m == (j - 1) / 2)
        } else {
            m == (j / 2) % cfg.r
        }
    };
    let lambda = DMatrix::from_fn(p, cfg.r.max(1), |j, m| {
        if cfg.r > 0 && loads(j, m) {
            signed_uniform(rng, 0.3, 0.4)
        } else {
            0.0
        }
    });
    Ok(TrueModel {
        graph,
        beta,
        w,
        sigma,
        lambda,
    })
}

/// Nonlinear intervention effect on node j given this row of X.
fn intervention_effect(
    model: &TrueModel,
    secondary: SecondaryKind,
    j: usize,
    xrow: &[f64],
) -> f64 {
    let intr: Vec<usize> = model.graph.intr(j).expect("node in range").into_iter().collect();
    match secondary {
        SecondaryKind::Continuous => {
            let w = model.w[j];
            let mut main = 0.0;
            let mut cross = 0.0;
            for (a, &l) in intr.iter().enumerate() {
                let xl = xrow[l];
                main += xl * xl + f64::from(xl > 0.0);
                for (b, &k) in intr.iter().enumerate() {
                    if a != b {
                        cross += xrow[k] * xl;
                    }
                }
            }
            w * main + (w / 2.0) * cross
        }
        SecondaryKind::Discrete => {
            let mut cross = 0.0;
            for (a, &l) in intr.iter().enumerate() {
                for (b, &k) in intr.iter().enumerate() {
                    if a != b {
                        cross += xrow[k] * xrow[l];
                    }
                }
            }
            cross
        }
    }
}

/// Samples one dataset from a drawn model. Y is filled in node index order;
/// generated edges always point from lower to higher index.
pub fn gen_data(
    model: &TrueModel,
    cfg: &SimConfig,
    rng: &mut ChaCha8Rng,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = cfg.n;
    let p = cfg.p;
    let q = cfg.q();
    let x = DMatrix::from_fn(n, q, |_, _| match cfg.secondary {
        SecondaryKind::Continuous => StandardNormal.sample(&mut *rng),
        SecondaryKind::Discrete => f64::from(rng.gen_bool(0.5)),
    });
    let u = DMatrix::from_fn(n, cfg.r.max(1), |_, _| {
        if cfg.r > 0 {
            StandardNormal.sample(&mut *rng)
        } else {
            0.0
        }
    });
    let mut y = DMatrix::zeros(n, p);
    let mut xrow = vec![0.0; q];
    for i in 0..n {
        for l in 0..q {
            xrow[l] = x[(i, l)];
        }
        for j in 0..p {
            let mut v = intervention_effect(model, cfg.secondary, j, &xrow);
            for (&(k, _), &b) in model.beta.iter().filter(|&(&(_, t), _)| t == j) {
                v += b * y[(i, k)];
            }
            for m in 0..model.lambda.ncols() {
                v += model.lambda[(j, m)] * u[(i, m)];
            }
            let e: f64 = StandardNormal.sample(&mut *rng);
            v += model.sigma[j] * e;
            y[(i, j)] = v;
        }
    }
    (x, y)
}

/// Structure recovery counts and derived rates for selected edges against
/// the true direct edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureScore {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    /// Selected edges whose reverse is a true edge.
    pub re: usize,
    pub fdp: f64,
    pub tpr: f64,
    pub shd: usize,
    pub ji: f64,
}

pub fn score_structure(
    true_edges: &BTreeSet<(usize, usize)>,
    selected: &BTreeSet<(usize, usize)>,
) -> StructureScore {
    let tp = selected.intersection(true_edges).count();
    // An edge that is itself true is never a reversal, even if the input
    // relation also contains its flip.
    let re = selected
        .iter()
        .filter(|&&(k, j)| true_edges.contains(&(j, k)) && !true_edges.contains(&(k, j)))
        .count();
    let fp = selected.len() - tp - re;
    let fn_ = true_edges.len() - tp;
    let discoveries = tp + re + fp;
    let fdp = if discoveries == 0 {
        0.0
    } else {
        (re + fp) as f64 / discoveries as f64
    };
    let tpr = if true_edges.is_empty() {
        1.0
    } else {
        tp as f64 / true_edges.len() as f64
    };
    let shd = fp + fn_ + re;
    let ji = if tp + shd == 0 {
        1.0
    } else {
        tp as f64 / (tp + shd) as f64
    };
    StructureScore {
        tp,
        fp,
        fn_,
        re,
        fdp,
        tpr,
        shd,
        ji,
    }
}

/// Entrywise error norms between the true effect matrix and the estimate
/// restricted to selected edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamScore {
    pub linf: f64,
    pub l1: f64,
    pub l2: f64,
}

pub fn score_parameters(
    p: usize,
    true_beta: &BTreeMap<(usize, usize), f64>,
    estimates: &[EdgeEstimate],
) -> ParamScore {
    let mut diff = DMatrix::zeros(p, p);
    for (&(k, j), &b) in true_beta {
        diff[(k, j)] = -b;
    }
    for e in estimates.iter().filter(|e| e.selected) {
        diff[(e.k, e.j)] += e.beta;
    }
    let linf = diff.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let l1 = diff.iter().map(|v| v.abs()).sum();
    let l2 = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
    ParamScore { linf, l1, l2 }
}

/// Scores for one completed replication.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepOutcome {
    pub rep: usize,
    pub n_true_edges: usize,
    pub n_selected: usize,
    pub structure: StructureScore,
    pub params: ParamScore,
}

/// Mean and standard deviation of one metric over completed replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub sd: f64,
}

/// Aggregated benchmark output. Means and sds are over completed
/// replications; failed replications are listed with their error and
/// excluded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkSummary {
    pub config: SimConfig,
    pub n_completed: usize,
    pub n_failures: usize,
    pub fdp: MetricSummary,
    pub tpr: MetricSummary,
    pub shd: MetricSummary,
    pub ji: MetricSummary,
    pub linf: MetricSummary,
    pub l1: MetricSummary,
    pub l2: MetricSummary,
    pub reps: Vec<RepOutcome>,
    pub failures: Vec<(usize, String)>,
}

impl BenchmarkSummary {
    /// (metric, summary) rows in a fixed order for tabular output.
    pub fn metric_rows(&self) -> [(&'static str, MetricSummary); 7] {
        [
            ("fdp", self.fdp),
            ("tpr", self.tpr),
            ("shd", self.shd),
            ("ji", self.ji),
            ("linf", self.linf),
            ("l1", self.l1),
            ("l2", self.l2),
        ]
    }
}

/// Runs one replication: draw a model and data, run the full pipeline, and
/// score the selected edges.
pub fn run_replication(cfg: &SimConfig, rep: usize) -> Result<RepOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(rep as u64);
    let model = gen_model(cfg, &mut rng)?;
    let (x, y) = gen_data(&model, cfg, &mut rng);
    let kinds = vec![cfg.secondary.variable_kind(); cfg.q()];
    let result = run_pipeline(&x, &kinds, &y, &cfg.method)?;
    let selected: BTreeSet<(usize, usize)> = result
        .estimate
        .edges
        .iter()
        .filter(|e| e.selected)
        .map(|e| (e.k, e.j))
        .collect();
    let structure = score_structure(model.graph.edges(), &selected);
    let params = score_parameters(cfg.p, &model.beta, &result.estimate.edges);
    Ok(RepOutcome {
        rep,
        n_true_edges: model.graph.edges().len(),
        n_selected: selected.len(),
        structure,
        params,
    })
}

/// Runs all replications in parallel (deterministically: each replication
/// seeds its own RNG stream) and aggregates.
pub fn run_benchmark(cfg: &SimConfig) -> Result<BenchmarkSummary> {
    let outcomes: Vec<(usize, Result<RepOutcome>)> = (0..cfg.n_reps)
        .into_par_iter()
        .map(|rep| (rep, run_replication(cfg, rep)))
        .collect();
    let mut reps = Vec::new();
    let mut failures = Vec::new();
    for (rep, outcome) in outcomes {
        match outcome {
            Ok(o) => reps.push(o),
            Err(e) => failures.push((rep, e.to_string())),
        }
    }
    let n_completed = reps.len();
    // Sample sd over completed replications; a single replication reports 0.
    let agg = |f: &dyn Fn(&RepOutcome) -> f64| -> MetricSummary {
        if n_completed == 0 {
            return MetricSummary {
                mean: f64::NAN,
                sd: f64::NAN,
            };
        }
        let vals: Vec<f64> = reps.iter().map(|r| f(r)).collect();
        let mean = vals.iter().sum::<f64>() / n_completed as f64;
        let sd = if n_completed < 2 {
            0.0
        } else {
            let ss: f64 = vals.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n_completed - 1) as f64).sqrt()
        };
        MetricSummary { mean, sd }
    };
    Ok(BenchmarkSummary {
        config: cfg.clone(),
        n_completed,
        n_failures: failures.len(),
        fdp: agg(&|r| r.structure.fdp),
        tpr: agg(&|r| r.structure.tpr),
        shd: agg(&|r| r.structure.shd as f64),
        ji: agg(&|r| r.structure.ji),
        linf: agg(&|r| r.params.linf),
        l1: agg(&|r| r.params.l1),
        l2: agg(&|r| r.params.l2),
        reps,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_cfg() -> SimConfig {
        SimConfig::default()
    }

    #[test]
    fn derived_sizes() {
        assert_eq!(derived_q(10), 25);
        assert_eq!(derived_q(20), 50);
        assert_eq!(derived_q(3), 7);
        // shared interveners cover 2p - 1 .. q - 1 and pair consecutive nodes
        assert_eq!(shared_intervener(10, 0), 19);
        assert_eq!(shared_intervener(10, 1), 20);
        assert_eq!(shared_intervener(10, 2), 20);
        assert_eq!(shared_intervener(10, 9), 24);
    }

    #[test]
    fn hub_graph_shape() {
        let cfg = base_cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let model = gen_model(&cfg, &mut rng).unwrap();
        assert_eq!(model.graph.edges().len(), 9);
        for &(k, j) in model.graph.edges() {
            assert_eq!(k, 0);
            assert!(j >= 1);
        }
        // three interventions per node; X20 (0-based 19) doubles as the
        // second IV of node 9 and the shared IV of node 0
        assert_eq!(model.graph.intr(0).unwrap(), [0, 10, 19].into());
        assert_eq!(model.graph.intr(1).unwrap(), [1, 11, 20].into());
        assert_eq!(model.graph.intr(2).unwrap(), [2, 12, 20].into());
        assert_eq!(model.graph.intr(9).unwrap(), [9, 19, 24].into());
        // exactly two valid IVs per node
        for j in 0..cfg.p {
            assert_eq!(model.graph.valid_ivs(j).unwrap().len(), 2);
        }
    }

    #[test]
    fn random_graph_edge_rate() {
        let mut cfg = base_cfg();
        cfg.graph = GraphKind::Random;
        let mut total = 0usize;
        let reps = 400;
        for rep in 0..reps {
            let mut rng = ChaCha8Rng::seed_from_u64(123);
            rng.set_stream(rep);
            total += gen_model(&cfg, &mut rng).unwrap().graph.edges().len();
        }
        // expectation C(10,2) / 20 = 2.25 edges per draw
        let mean = total as f64 / reps as f64;
        assert!((mean - 2.25).abs() < 0.35, "mean edges = {mean}");
    }

    #[test]
    fn effect_magnitude_bands() {
        let cfg = base_cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let model = gen_model(&cfg, &mut rng).unwrap();
        for b in model.beta.values() {
            assert!((0.8..1.2).contains(&b.abs()));
        }
        for w in &model.w {
            assert!((2.8..3.2).contains(&w.abs()));
        }
        for s in &model.sigma {
            assert!((0.3..0.4).contains(s));
        }
        for j in 0..cfg.p {
            let nonzero: Vec<usize> = (0..cfg.r)
                .filter(|&m| model.lambda[(j, m)] != 0.0)
                .collect();
            assert_eq!(nonzero, vec![j / 2]);
            assert!((0.3..0.4).contains(&model.lambda[(j, j / 2)].abs()));
        }
    }

    #[test]
    fn alt_confounder_layout() {
        let mut cfg = base_cfg();
        cfg.alt_confounder_blocks = true;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let model = gen_model(&cfg, &mut rng).unwrap();
        for j in 0..cfg.p {
            let nonzero: Vec<usize> = (0..cfg.r)
                .filter(|&m| model.lambda[(j, m)] != 0.0)
                .collect();
            let expect = if j == 0 { vec![0] } else { vec![(j - 1) / 2] };
            assert_eq!(nonzero, expect, "j = {j}");
        }
    }

    #[test]
    fn discrete_interaction_levels() {
        let mut cfg = base_cfg();
        cfg.secondary = SecondaryKind::Discrete;
        cfg.n = 200;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let model = gen_model(&cfg, &mut rng).unwrap();
        let (x, _) = gen_data(&model, &cfg, &mut rng);
        // with three binary interveners the interaction term is m(m-1) for m
        // ones: one of {0, 2, 6}
        let mut seen = BTreeSet::new();
        for i in 0..cfg.n {
            let xrow: Vec<f64> = (0..cfg.q()).map(|l| x[(i, l)]).collect();
            let v = intervention_effect(&model, cfg.secondary, 4, &xrow);
            assert!(v == 0.0 || v == 2.0 || v == 6.0, "v = {v}");
            seen.insert(v as i64);
        }
        assert_eq!(seen, [0i64, 2, 6].into());
    }

    #[test]
    fn structure_score_arithmetic() {
        let truth: BTreeSet<(usize, usize)> = [(0, 1), (1, 2)].into();
        // perfect
        let s = score_structure(&truth, &truth.clone());
        assert_eq!((s.tp, s.fp, s.fn_, s.re, s.shd), (2, 0, 0, 0, 0));
        assert_eq!((s.fdp, s.tpr, s.ji), (0.0, 1.0, 1.0));
        // one reversed edge
        let sel: BTreeSet<(usize, usize)> = [(1, 0)].into();
        let s = score_structure(&truth, &sel);
        assert_eq!((s.tp, s.re, s.fp, s.fn_), (0, 1, 0, 2));
        assert_eq!(s.fdp, 1.0);
        assert_eq!(s.shd, 3);
        // nothing selected, nothing true
        let s = score_structure(&BTreeSet::new(), &BTreeSet::new());
        assert_eq!((s.fdp, s.tpr, s.ji), (0.0, 1.0, 1.0));
        // false positive only
        let s = score_structure(&BTreeSet::new(), &[(0, 1)].into());
        assert_eq!((s.tp, s.fp, s.fdp), (0, 1, 1.0));
        assert_eq!(s.shd, 1);
        assert_eq!(s.ji, 0.0);
    }

    #[test]
    fn reversed_single_edge_case() {
        let truth: BTreeSet<(usize, usize)> = [(0, 1)].into();
        let sel: BTreeSet<(usize, usize)> = [(1, 0)].into();
        let s = score_structure(&truth, &sel);
        assert_eq!((s.tp, s.re, s.fdp), (0, 1, 1.0));
        assert_eq!(s.shd, 2);
    }

    #[test]
    fn parameter_score_arithmetic() {
        let truth: BTreeMap<(usize, usize), f64> = [((0, 1), 1.0), ((1, 2), -0.5)].into();
        let est = vec![
            EdgeEstimate {
                k: 0,
                j: 1,
                beta: 1.1,
                std_err: 0.1,
                p_value: 0.0,
                selected: true,
            },
            // unselected estimates do not enter the error
            EdgeEstimate {
                k: 1,
                j: 2,
                beta: 9.0,
                std_err: 0.1,
                p_value: 0.0,
                selected: false,
            },
        ];
        let s = score_parameters(3, &truth, &est);
        // diff entries: (0,1): 0.1, (1,2): -(-0.5) stays -0.5... truth kept
        assert!((s.linf - 0.5).abs() < 1e-12);
        assert!((s.l1 - 0.6).abs() < 1e-12);
        assert!((s.l2 - (0.01f64 + 0.25).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn replication_determinism() {
        let mut cfg = base_cfg();
        cfg.p = 4;
        cfg.r = 2;
        cfg.n = 300;
        cfg.n_reps = 3;
        let a = run_benchmark(&cfg).unwrap();
        let b = run_benchmark(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.n_completed + a.n_failures, cfg.n_reps);
    }

    #[test]
    fn small_hub_benchmark_recovers() {
        let mut cfg = base_cfg();
        cfg.p = 4;
        cfg.r = 2;
        cfg.n = 1000;
        cfg.n_reps = 4;
        let summary = run_benchmark(&cfg).unwrap();
        assert_eq!(summary.n_failures, 0, "failures: {:?}", summary.failures);
        assert!(summary.tpr.mean >= 0.9, "tpr = {}", summary.tpr.mean);
        assert!(summary.fdp.mean <= 0.1, "fdp = {}", summary.fdp.mean);
        assert!(summary.linf.mean <= 0.4, "linf = {}", summary.linf.mean);
        assert!(summary.tpr.sd.is_finite());
    }

    #[test]
    fn presets_resolve() {
        for name in PRESET_NAMES {
            let cfg = preset(name).unwrap();
            assert_eq!(cfg.n, 1000);
            assert_eq!(cfg.n_reps, 50);
            assert_eq!(cfg.method.estimate.basis.gamma, 2);
            assert_eq!(cfg.r, cfg.p / 2);
        }
        assert!(preset("no-such-preset").is_none());
    }
}

