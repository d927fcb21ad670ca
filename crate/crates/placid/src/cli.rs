//! Command-line surface: CSV ingestion, JSON run configuration, pipeline
//! orchestration, and machine-readable artifacts (JSON, CSV, DOT).
//!
//! Every JSON artifact embeds a format-version field and the fully resolved
//! configuration, so re-running from an embedded config reproduces the
//! artifact byte for byte. Timestamps are never written into artifacts;
//! they go to a separate `meta.json` sidecar.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error,
//! 4 degeneracy (peeling stall, singular or unidentified moment system),
//! 5 internal error. `discover` exits 4 when peeling stalled (artifacts are
//! still written) and 3 when the rejections admit no acyclic order.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dcor::{independence_matrices, DcorMatrices};
use crate::error::{Error, Result};
use crate::export::{ancestral_graph_dot, causal_graph_dot, selected_edges_dot};
use crate::gmm::{estimate, EstimateOptions, GmmEstimate, OmegaMode};
use crate::graph::AncestralGraph;
use crate::peeling::{estimate_arg, PeelingResult};
use crate::pipeline::{run_pipeline, AlphaMode, MethodOptions};
use crate::sim::{gen_data, gen_model, preset, run_benchmark, SimConfig, PRESET_NAMES};
use crate::surrogate::{BasisSpec, VariableKind};

/// Version of the artifact JSON schema.
pub const FORMAT_VERSION: u32 = 1;

/// Environment variable selecting the rayon thread count.
pub const THREADS_ENV: &str = "PLACID_THREADS";

/// Declared role and kind of one secondary (X) column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XColumn {
    pub name: String,
    pub kind: VariableKind,
}

/// Run configuration for data-driven subcommands, loaded from JSON.
/// Column roles come from here, never from header naming conventions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// CSV input with a header row.
    pub input: PathBuf,
    pub x_columns: Vec<XColumn>,
    /// Primary (Y) column names; always read as continuous.
    pub y_columns: Vec<String>,
    pub alpha: AlphaMode,
    pub gamma: usize,
    /// Highest power of each standardized continuous candidate.
    pub degree: u32,
    pub q_star: f64,
    pub omega: OmegaMode,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::new(),
            x_columns: Vec::new(),
            y_columns: Vec::new(),
            alpha: AlphaMode::RecommendedRate,
            gamma: 1,
            degree: 2,
            q_star: 0.05,
            omega: OmegaMode::Identity,
            output_dir: PathBuf::from("."),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.x_columns.is_empty() {
            return Err(Error::Config("x_columns must be nonempty".into()));
        }
        if self.y_columns.is_empty() {
            return Err(Error::Config("y_columns must be nonempty".into()));
        }
        let mut seen = BTreeSet::new();
        for name in self
            .x_columns
            .iter()
            .map(|c| &c.name)
            .chain(self.y_columns.iter())
        {
            if !seen.insert(name.as_str()) {
                return Err(Error::Config(format!(
                    "column {name} assigned more than one role"
                )));
            }
        }
        if self.gamma == 0 {
            return Err(Error::Config("gamma must be at least 1".into()));
        }
        if !(self.q_star > 0.0 && self.q_star < 1.0) {
            return Err(Error::Config(format!(
                "q_star must lie in (0, 1), got {}",
                self.q_star
            )));
        }
        Ok(())
    }

    pub fn method(&self) -> MethodOptions {
        MethodOptions {
            alpha: self.alpha,
            estimate: EstimateOptions {
                basis: BasisSpec {
                    gamma: self.gamma,
                    degree: self.degree,
                    ..BasisSpec::default()
                },
                omega: self.omega,
                q_star: self.q_star,
                ..EstimateOptions::default()
            },
        }
    }
}

pub fn load_run_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::Config(format!("cannot read config {}: {e}", path.display()))
    })?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))?;
    cfg.validate()?;
    Ok(cfg)
}

/// A parsed dataset: secondary matrix with kinds, primary matrix.
#[derive(Debug)]
pub struct Dataset {
    pub x: DMatrix<f64>,
    pub kinds: Vec<VariableKind>,
    pub y: DMatrix<f64>,
}

/// Loads the configured CSV. Missing values and non-finite entries are
/// rejected with a row/column diagnostic; declared kinds are checked
/// against the observed values.
pub fn load_dataset(cfg: &RunConfig) -> Result<Dataset> {
    let mut rdr = csv::Reader::from_path(&cfg.input).map_err(|e| {
        Error::Data(format!("cannot open {}: {e}", cfg.input.display()))
    })?;
    let headers = rdr.headers()?.clone();
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("column {name} not found in CSV header")))
    };
    let x_idx: Vec<usize> = cfg
        .x_columns
        .iter()
        .map(|c| find(&c.name))
        .collect::<Result<_>>()?;
    let y_idx: Vec<usize> = cfg
        .y_columns
        .iter()
        .map(|n| find(n))
        .collect::<Result<_>>()?;

    let mut x_rows: Vec<Vec<f64>> = Vec::new();
    let mut y_rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        // header is line 1, so data row i is line i + 2
        let line = i + 2;
        let cell = |col: usize, name: &str| -> Result<f64> {
            let raw = record.get(col).unwrap_or("").trim();
            if raw.is_empty() {
                return Err(Error::Data(format!(
                    "line {line}, column {name}: missing value"
                )));
            }
            let v: f64 = raw.parse().map_err(|_| {
                Error::Data(format!("line {line}, column {name}: cannot parse {raw:?}"))
            })?;
            if !v.is_finite() {
                return Err(Error::Data(format!(
                    "line {line}, column {name}: non-finite value"
                )));
            }
            Ok(v)
        };
        x_rows.push(
            x_idx
                .iter()
                .zip(&cfg.x_columns)
                .map(|(&c, xc)| cell(c, &xc.name))
                .collect::<Result<_>>()?,
        );
        y_rows.push(
            y_idx
                .iter()
                .zip(&cfg.y_columns)
                .map(|(&c, n)| cell(c, n))
                .collect::<Result<_>>()?,
        );
    }
    let n = x_rows.len();
    if n == 0 {
        return Err(Error::Data("CSV has a header but no data rows".into()));
    }
    for (l, xc) in cfg.x_columns.iter().enumerate() {
        if xc.kind == VariableKind::Binary {
            if let Some(row) = x_rows.iter().find(|r| r[l] != 0.0 && r[l] != 1.0) {
                return Err(Error::Data(format!(
                    "column {} declared binary contains {}",
                    xc.name, row[l]
                )));
            }
        }
    }
    let x = DMatrix::from_fn(n, x_idx.len(), |i, j| x_rows[i][j]);
    let y = DMatrix::from_fn(n, y_idx.len(), |i, j| y_rows[i][j]);
    let kinds = cfg.x_columns.iter().map(|c| c.kind).collect();
    Ok(Dataset { x, kinds, y })
}

/// JSON artifact wrapper: schema version plus the resolved configuration.
#[derive(Serialize)]
struct Artifact<'a, C: Serialize, T: Serialize> {
    format_version: u32,
    config: &'a C,
    result: T,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Wall-clock metadata lives in its own sidecar so artifacts from identical
/// (config, seed) runs stay byte-identical.
fn write_meta(dir: &Path) -> Result<()> {
    let created = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    write_json(
        &dir.join("meta.json"),
        &serde_json::json!({ "created_unix": created }),
    )
}

/// Writes a q x p matrix as CSV with Y names as header and X labels per row.
fn write_matrix_csv<F: Fn(usize, usize) -> String>(
    path: &Path,
    q: usize,
    p: usize,
    get: F,
) -> Result<()> {
    let mut out = String::new();
    out.push_str("x");
    for j in 0..p {
        out.push_str(&format!(",Y{}", j + 1));
    }
    out.push('\n');
    for l in 0..q {
        out.push_str(&format!("X{}", l + 1));
        for j in 0..p {
            out.push(',');
            out.push_str(&get(l, j));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

fn write_dcor_artifacts(dir: &Path, cfg: &RunConfig, dc: &DcorMatrices) -> Result<()> {
    write_json(
        &dir.join("dcor.json"),
        &Artifact {
            format_version: FORMAT_VERSION,
            config: cfg,
            result: dc,
        },
    )?;
    write_matrix_csv(&dir.join("c_matrix.csv"), dc.q(), dc.p(), |l, j| {
        format!("{:.17e}", dc.c[l][j])
    })?;
    write_matrix_csv(&dir.join("r_matrix.csv"), dc.q(), dc.p(), |l, j| {
        dc.rejections[l][j].to_string()
    })
}

fn write_peeling_artifacts(dir: &Path, cfg: &RunConfig, peeling: &PeelingResult) -> Result<()> {
    write_json(
        &dir.join("arg.json"),
        &Artifact {
            format_version: FORMAT_VERSION,
            config: cfg,
            result: peeling,
        },
    )?;
    fs::write(dir.join("arg.dot"), ancestral_graph_dot(&peeling.arg))?;
    Ok(())
}

fn write_estimate_artifacts(
    dir: &Path,
    cfg: &RunConfig,
    p: usize,
    est: &GmmEstimate,
) -> Result<()> {
    write_json(
        &dir.join("estimate.json"),
        &Artifact {
            format_version: FORMAT_VERSION,
            config: cfg,
            result: est,
        },
    )?;
    fs::write(dir.join("selected.dot"), selected_edges_dot(p, &est.edges))?;
    Ok(())
}

fn cmd_dcor(config: &Path, alpha: Option<f64>) -> Result<i32> {
    let mut cfg = load_run_config(config)?;
    if let Some(alpha) = alpha {
        cfg.alpha = AlphaMode::Fixed { alpha };
    }
    let data = load_dataset(&cfg)?;
    let resolved = cfg.alpha.resolve(data.x.nrows())?;
    let dc = independence_matrices(&data.x, &data.y, resolved)?;
    ensure_dir(&cfg.output_dir)?;
    write_dcor_artifacts(&cfg.output_dir, &cfg, &dc)?;
    write_meta(&cfg.output_dir)?;
    Ok(0)
}

fn cmd_discover(config: &Path) -> Result<i32> {
    let cfg = load_run_config(config)?;
    let data = load_dataset(&cfg)?;
    let resolved = cfg.alpha.resolve(data.x.nrows())?;
    let dc = independence_matrices(&data.x, &data.y, resolved)?;
    let peeling = estimate_arg(&dc)?;
    ensure_dir(&cfg.output_dir)?;
    write_dcor_artifacts(&cfg.output_dir, &cfg, &dc)?;
    write_peeling_artifacts(&cfg.output_dir, &cfg, &peeling)?;
    write_meta(&cfg.output_dir)?;
    if peeling.warnings.is_empty() {
        Ok(0)
    } else {
        for w in &peeling.warnings {
            eprintln!("warning: {w}");
        }
        Ok(4)
    }
}

/// Reads an ARG from a `discover` artifact or from a bare graph JSON file.
fn load_arg(path: &Path) -> Result<AncestralGraph> {
    #[derive(Deserialize)]
    struct PeelingArtifact {
        result: PeelingResult,
    }
    let text = fs::read_to_string(path)?;
    if let Ok(artifact) = serde_json::from_str::<PeelingArtifact>(&text) {
        return Ok(artifact.result.arg);
    }
    serde_json::from_str::<AncestralGraph>(&text)
        .map_err(|e| Error::Data(format!("invalid ARG file {}: {e}", path.display())))
}

fn cmd_estimate(config: &Path, arg_path: &Path) -> Result<i32> {
    let cfg = load_run_config(config)?;
    let data = load_dataset(&cfg)?;
    let arg = load_arg(arg_path)?;
    let est = estimate(&data.x, &data.kinds, &data.y, &arg, &cfg.method().estimate)?;
    ensure_dir(&cfg.output_dir)?;
    write_estimate_artifacts(&cfg.output_dir, &cfg, data.y.ncols(), &est)?;
    write_meta(&cfg.output_dir)?;
    for w in &est.warnings {
        eprintln!("warning: {w}");
    }
    Ok(0)
}

fn cmd_pipeline(config: &Path) -> Result<i32> {
    let cfg = load_run_config(config)?;
    let data = load_dataset(&cfg)?;
    let result = run_pipeline(&data.x, &data.kinds, &data.y, &cfg.method())?;
    ensure_dir(&cfg.output_dir)?;
    write_dcor_artifacts(&cfg.output_dir, &cfg, &result.dcor)?;
    write_peeling_artifacts(&cfg.output_dir, &cfg, &result.peeling)?;
    write_estimate_artifacts(&cfg.output_dir, &cfg, data.y.ncols(), &result.estimate)?;
    write_meta(&cfg.output_dir)?;
    for w in result.peeling.warnings.iter().chain(&result.estimate.warnings) {
        eprintln!("warning: {w}");
    }
    Ok(0)
}

fn resolve_sim_config(
    preset_name: Option<&str>,
    config: Option<&Path>,
    reps: Option<usize>,
    seed: Option<u64>,
) -> Result<SimConfig> {
    let mut cfg = match (preset_name, config) {
        (Some(name), None) => preset(name).ok_or_else(|| {
            Error::Config(format!(
                "unknown preset {name}; available: {}",
                PRESET_NAMES.join(", ")
            ))
        })?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            serde_json::from_str(&text).map_err(|e| {
                Error::Config(format!("invalid config {}: {e}", path.display()))
            })?
        }
        _ => {
            return Err(Error::Config(
                "exactly one of --preset and --config is required".into(),
            ))
        }
    };
    if let Some(reps) = reps {
        cfg.n_reps = reps;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// True edges with 1-based indices for the simulate artifact.
#[derive(Serialize)]
struct TruthEdge {
    k: usize,
    j: usize,
    beta: f64,
}

fn cmd_simulate(cfg: &SimConfig, rep: usize, out: &Path) -> Result<i32> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(rep as u64);
    let model = gen_model(cfg, &mut rng)?;
    let (x, y) = gen_data(&model, cfg, &mut rng);
    ensure_dir(out)?;

    let (p, q) = (cfg.p, cfg.q());
    let mut csv = String::new();
    for l in 0..q {
        csv.push_str(&format!("x{},", l + 1));
    }
    for j in 0..p {
        if j > 0 {
            csv.push(',');
        }
        csv.push_str(&format!("y{}", j + 1));
    }
    csv.push('\n');
    for i in 0..x.nrows() {
        for l in 0..q {
            csv.push_str(&format!("{:.17e},", x[(i, l)]));
        }
        for j in 0..p {
            if j > 0 {
                csv.push(',');
            }
            csv.push_str(&format!("{:.17e}", y[(i, j)]));
        }
        csv.push('\n');
    }
    fs::write(out.join("data.csv"), csv)?;

    let edges: Vec<TruthEdge> = model
        .beta
        .iter()
        .map(|(&(k, j), &beta)| TruthEdge {
            k: k + 1,
            j: j + 1,
            beta,
        })
        .collect();
    write_json(
        &out.join("truth.json"),
        &Artifact {
            format_version: FORMAT_VERSION,
            config: cfg,
            result: serde_json::json!({ "graph": &model.graph, "edges": edges, "rep": rep }),
        },
    )?;
    fs::write(out.join("truth.dot"), causal_graph_dot(&model.graph))?;

    // A ready-to-run configuration for the data-driven subcommands.
    let run_cfg = RunConfig {
        input: out.join("data.csv"),
        x_columns: (0..q)
            .map(|l| XColumn {
                name: format!("x{}", l + 1),
                kind: cfg.secondary.variable_kind(),
            })
            .collect(),
        y_columns: (0..p).map(|j| format!("y{}", j + 1)).collect(),
        gamma: cfg.method.estimate.basis.gamma,
        q_star: cfg.method.estimate.q_star,
        alpha: cfg.method.alpha,
        omega: cfg.method.estimate.omega,
        output_dir: out.to_path_buf(),
        seed: cfg.seed,
        ..RunConfig::default()
    };
    write_json(&out.join("run_config.json"), &run_cfg)?;
    write_meta(out)?;
    Ok(0)
}

fn cmd_benchmark(cfg: &SimConfig, out: &Path, dump_reps: bool) -> Result<i32> {
    let summary = run_benchmark(cfg)?;
    ensure_dir(out)?;

    #[derive(Serialize)]
    struct SummaryArtifact<'a> {
        format_version: u32,
        result: &'a crate::sim::BenchmarkSummary,
    }
    write_json(
        &out.join("summary.json"),
        &SummaryArtifact {
            format_version: FORMAT_VERSION,
            result: &summary,
        },
    )?;

    let mut csv = String::from("metric,mean,sd\n");
    for (name, m) in summary.metric_rows() {
        csv.push_str(&format!("{name},{:.17e},{:.17e}\n", m.mean, m.sd));
    }
    fs::write(out.join("summary.csv"), csv)?;

    if dump_reps {
        let mut lines = String::new();
        for rep in &summary.reps {
            lines.push_str(&serde_json::to_string(rep)?);
            lines.push('\n');
        }
        fs::write(out.join("reps.jsonl"), lines)?;
    }
    write_meta(out)?;
    if summary.n_failures > 0 {
        eprintln!(
            "warning: {} of {} replications failed",
            summary.n_failures, cfg.n_reps
        );
    }
    println!(
        "completed {} replications ({} failed): fdp {:.4}, tpr {:.4}, shd {:.4}",
        summary.n_completed, summary.n_failures, summary.fdp.mean, summary.tpr.mean, summary.shd.mean
    );
    Ok(0)
}

#[derive(Parser)]
#[command(
    name = "placid",
    version,
    about = "Causal discovery with potentially invalid instruments"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance-correlation and rejection matrices for all (X, Y) pairs.
    Dcor {
        #[arg(long)]
        config: PathBuf,
        /// Override the configured significance level.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Estimate the ancestral relation graph by leaf peeling.
    Discover {
        #[arg(long)]
        config: PathBuf,
    },
    /// GMM edge estimation and FDR selection on a stored ARG.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        /// ARG artifact from `discover`, or a bare graph JSON file.
        #[arg(long)]
        arg: PathBuf,
    },
    /// Full run: tests, peeling, estimation, selection.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
    },
    /// Draw one synthetic replication and write it as CSV plus truth files.
    Simulate {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Replication index (selects the RNG stream).
        #[arg(long, default_value_t = 0)]
        rep: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "sim-out")]
        out: PathBuf,
    },
    /// Replicated synthetic benchmark with aggregate summaries.
    Benchmark {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
        /// Also write per-replication records as JSON lines.
        #[arg(long)]
        dump_reps: bool,
    },
}

/// Maps library errors onto the documented exit codes.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::DegenerateAlpha { .. } | Error::BasisTooLarge { .. } => 2,
        Error::Io(_)
        | Error::Csv(_)
        | Error::Json(_)
        | Error::Data(_)
        | Error::NonFinite
        | Error::NonBinaryValue { .. }
        | Error::SingleLevel { .. }
        | Error::LengthMismatch { .. }
        | Error::SampleTooSmall { .. }
        | Error::IndexOutOfRange { .. }
        | Error::ShapeMismatch { .. }
        | Error::CycleDetected { .. }
        | Error::AmbiguousAncestralOrder { .. } => 3,
        Error::SingularNormalMatrix
        | Error::VarianceNotPsd { .. }
        | Error::ZeroStdErr { .. }
        | Error::DegenerateBasis { .. }
        | Error::EmptyCandidateSet { .. }
        | Error::GammaOutOfRange { .. } => 4,
    }
}

fn init_threads() -> Result<()> {
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let threads: usize = raw
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be an integer, got {raw:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Dcor { config, alpha } => cmd_dcor(&config, alpha),
        Command::Discover { config } => cmd_discover(&config),
        Command::Estimate { config, arg } => cmd_estimate(&config, &arg),
        Command::Pipeline { config } => cmd_pipeline(&config),
        Command::Simulate {
            preset,
            config,
            rep,
            seed,
            out,
        } => {
            let cfg = resolve_sim_config(preset.as_deref(), config.as_deref(), None, seed)?;
            cmd_simulate(&cfg, rep, &out)
        }
        Command::Benchmark {
            preset,
            config,
            reps,
            seed,
            out,
            dump_reps,
        } => {
            let cfg = resolve_sim_config(preset.as_deref(), config.as_deref(), reps, seed)?;
            cmd_benchmark(&cfg, &out, dump_reps)
        }
    }
}

/// Parses arguments and runs the selected subcommand, returning the process
/// exit code. Panics are reported as internal errors.
pub fn run() -> i32 {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(cli))) {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            5
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_validation() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"input":"d.csv","x_columns":[{"name":"a","kind":"binary"}],"y_columns":["b"]}"#,
        )
        .unwrap();
        assert_eq!(cfg.gamma, 1);
        assert_eq!(cfg.q_star, 0.05);
        assert_eq!(cfg.degree, 2);
        assert!(matches!(cfg.alpha, AlphaMode::RecommendedRate));
        cfg.validate().unwrap();

        let overlap: RunConfig = serde_json::from_str(
            r#"{"input":"d.csv","x_columns":[{"name":"a","kind":"binary"}],"y_columns":["a"]}"#,
        )
        .unwrap();
        assert!(matches!(overlap.validate(), Err(Error::Config(_))));

        let mut empty = cfg.clone();
        empty.y_columns.clear();
        assert!(empty.validate().is_err());
        let mut bad_q = cfg.clone();
        bad_q.q_star = 1.5;
        assert!(bad_q.validate().is_err());
    }

    #[test]
    fn method_options_carry_config() {
        let mut cfg = RunConfig::default();
        cfg.gamma = 2;
        cfg.degree = 3;
        cfg.q_star = 0.01;
        let m = cfg.method();
        assert_eq!(m.estimate.basis.gamma, 2);
        assert_eq!(m.estimate.basis.degree, 3);
        assert_eq!(m.estimate.q_star, 0.01);
    }

    #[test]
    fn dataset_diagnostics() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let mut cfg = RunConfig {
            input: path.clone(),
            x_columns: vec![XColumn {
                name: "a".into(),
                kind: VariableKind::Binary,
            }],
            y_columns: vec!["b".into()],
            ..RunConfig::default()
        };

        std::fs::write(&path, "a,b\n0,1.5\n1,2.5\n").unwrap();
        let d = load_dataset(&cfg).unwrap();
        assert_eq!((d.x.nrows(), d.x.ncols(), d.y.ncols()), (2, 1, 1));

        std::fs::write(&path, "a,b\n0,1.5\n1,\n").unwrap();
        let err = load_dataset(&cfg).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        assert!(err.contains("missing value"), "{err}");

        std::fs::write(&path, "a,b\n0,1.5\n2,2.5\n").unwrap();
        let err = load_dataset(&cfg).unwrap_err().to_string();
        assert!(err.contains("declared binary"), "{err}");

        std::fs::write(&path, "a,b\n0,oops\n").unwrap();
        let err = load_dataset(&cfg).unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("oops"), "{err}");

        cfg.x_columns[0].name = "zzz".into();
        std::fs::write(&path, "a,b\n0,1.5\n").unwrap();
        assert!(matches!(load_dataset(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn exit_code_classes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::Data("x".into())), 3);
        assert_eq!(exit_code(&Error::NonFinite), 3);
        assert_eq!(
            exit_code(&Error::AmbiguousAncestralOrder { cycle: vec![0, 1] }),
            3
        );
        assert_eq!(exit_code(&Error::SingularNormalMatrix), 4);
        assert_eq!(exit_code(&Error::EmptyCandidateSet { node: 0 }), 4);
    }

    #[test]
    fn unknown_preset_is_config_error() {
        let err = resolve_sim_config(Some("nope"), None, None, None).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("hub-p10-continuous"));
    }
}
