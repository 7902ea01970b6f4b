//! The `bter` command-line driver.
//!
//! Every command writes CSV outputs plus a `manifest.json` describing the
//! run into `--out-dir`. Outputs are a pure function of the arguments, the
//! input files and the seed; `--threads` only changes speed.
//!
//! Exit codes: 0 success, 1 replay mismatch, 2 usage error, 3 input error,
//! 4 eigenvalue non-convergence.

use std::collections::{BTreeMap, HashMap};
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::community::{CommunityPartition, ConnectivityFormula};
use crate::degree::{extract_degrees, read_degree_file, synthesize_powerlaw, DegreeSequence};
use crate::generator::{generate_bter, generate_cl_with, generate_er, ClMode, GenerationConfig};
use crate::graph::{read_snap_edgelist, write_edgelist, Graph, SnapGraph};
use crate::metrics::{
    clustering_from_counts, compare_reports, count_triangles_wedges, read_report_dir, top_eigenvalues_with,
    write_cc_csv, write_degree_csv, write_spectrum_csv, write_summary_csv, write_triangles_csv, MetricsReport,
    SpectrumError, SpectrumOptions, DEFAULT_TOP_K,
};
use crate::theory::{audit_community_with, kruskal_katona_check, predict_community_profile, CORE_CONSTANTS};
use crate::DegreeDistribution;

pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NO_CONVERGENCE: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    NoConvergence(String),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_INPUT,
            CliError::NoConvergence(_) => EXIT_NO_CONVERGENCE,
            CliError::Mismatch(_) => EXIT_MISMATCH,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "bter",
    version,
    about = "Generate and analyze BTER, Chung-Lu and Erdos-Renyi graphs"
)]
pub struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "BTER_THREADS", global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a graph and write edges.txt (plus trace.csv and partition.csv for BTER).
    Generate(GenerateArgs),
    /// Measure a graph: degree.csv, cc.csv, triangles.csv, spectrum.csv, summary.csv.
    Analyze(AnalyzeArgs),
    /// Compare two graphs or two analyze output directories.
    Compare(CompareArgs),
    /// Kruskal-Katona check, per-block community audit and community-size prediction.
    Audit(AuditArgs),
    /// Re-run the command recorded in a manifest and diff its outputs.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Bter,
    Cl,
    Er,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Standard,
    Cubic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClModeArg {
    Auto,
    Exact,
    Fast,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "bter")]
    pub model: Model,
    /// Degree file: `degree,count` CSV or one degree per line.
    #[arg(long, group = "source")]
    pub degrees: Option<PathBuf>,
    /// Use the realized degrees of a SNAP edge list as targets.
    #[arg(long, group = "source")]
    pub from_graph: Option<PathBuf>,
    /// Synthesize a power-law sequence: `n,gamma,dmax`.
    #[arg(long, group = "source")]
    pub powerlaw: Option<String>,
    /// Node count for `--model er`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge probability for `--model er`.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Key-value config file (seed, rho, eta, variant, manual_fraction, d1_weight, q, beta).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Base block connectivity [default: 0.95].
    #[arg(long)]
    pub rho: Option<f64>,
    /// Connectivity decay with block degree [default: 0.05].
    #[arg(long)]
    pub eta: Option<f64>,
    /// Connectivity formula [default: standard].
    #[arg(long, value_enum)]
    pub variant: Option<Variant>,
    /// Fraction of degree-1 nodes wired by hand [default: 0.75].
    #[arg(long)]
    pub manual_fraction: Option<f64>,
    /// Interconnect weight of the other degree-1 nodes [default: 1.10].
    #[arg(long)]
    pub d1_weight: Option<f64>,
    /// Hand-wired degree-1 nodes paired with each other (even) [default: expectation].
    #[arg(long)]
    pub q: Option<usize>,
    /// Interconnect over-draw for discarded repeats [default: 0.10].
    #[arg(long)]
    pub beta: Option<f64>,
    /// Chung-Lu sampler.
    #[arg(long, value_enum, default_value = "auto")]
    pub cl_mode: ClModeArg,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Comma-separated subset of degree, cc, spectrum, triangles.
    #[arg(long, value_delimiter = ',', default_value = "degree,cc,triangles")]
    pub metrics: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    pub top_k: usize,
    /// Residual tolerance for eigenpairs.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed of the Krylov starting vector.
    #[arg(long, default_value_t = 0)]
    pub spectrum_seed: u64,
    /// Krylov basis cap [default: max(3k + 50, 200)].
    #[arg(long)]
    pub max_basis: Option<usize>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Two graphs (edge lists) or analyze output directories; the second is the reference.
    #[arg(long, num_args = 2, required = true)]
    pub graph: Vec<PathBuf>,
    /// Eigenvalues compared when inputs are graphs; 0 skips the spectrum.
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Minimum node count per degree, in both inputs, for the clustering gap.
    #[arg(long, default_value_t = 1)]
    pub count_floor: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Partition CSV (`node,block,...`) as written by `generate`.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Node count of the graph; partition ids at or above it are rejected
    /// [default: largest id in the graph + 1].
    #[arg(long)]
    pub nodes: Option<u64>,
    #[arg(long, default_value_t = 0.1)]
    pub kappa: f64,
    /// ER-core constants c (nodes with internal degree >= c * sqrt(s)).
    #[arg(long, value_delimiter = ',', default_values_t = CORE_CONSTANTS.to_vec())]
    pub core_constants: Vec<f64>,
    /// Predict the community-size profile: `n=<nodes>,gamma=<exponent>`.
    #[arg(long)]
    pub predict: Option<String>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Where to write the re-run outputs [default: a temporary directory].
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Record of one run, sufficient to reproduce it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, without `--out-dir` and `--threads`.
    pub args: Vec<String>,
    pub config: BTreeMap<String, String>,
    pub inputs: Vec<FileDigest>,
    pub seed: Option<u64>,
    pub version: String,
    /// Output files, relative to the output directory.
    pub outputs: Vec<FileDigest>,
}

fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn digest(path: &Path) -> Result<FileDigest, CliError> {
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: sha256_file(path)?,
    })
}

/// Strips `--out-dir` and `--threads` (both spellings) from an argument list.
fn replayable_args(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out-dir" || a == "--threads" {
            skip = true;
        } else if !(a.starts_with("--out-dir=") || a.starts_with("--threads=")) {
            out.push(a.clone());
        }
    }
    out
}

/// Collects output files and a manifest for one command.
struct RunOutput {
    dir: PathBuf,
    files: Vec<String>,
}

impl RunOutput {
    fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
        Ok(RunOutput {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let err = |e: std::io::Error| CliError::Input(format!("{}: {e}", path.display()));
        let mut out = BufWriter::new(File::create(&path).map_err(err)?);
        body(&mut out).map_err(err)?;
        out.flush().map_err(err)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn graph(&mut self, name: &str, g: &Graph) -> Result<(), CliError> {
        write_edgelist(g, self.dir.join(name)).map_err(input)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn finish(
        self,
        command: &str,
        args: &[String],
        config: BTreeMap<String, String>,
        inputs: &[&Path],
        seed: Option<u64>,
    ) -> Result<(), CliError> {
        let outputs = self
            .files
            .iter()
            .map(|f| {
                Ok(FileDigest {
                    path: f.clone(),
                    sha256: sha256_file(&self.dir.join(f))?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let manifest = RunManifest {
            command: command.to_string(),
            args: replayable_args(args),
            config,
            inputs: inputs.iter().map(|p| digest(p)).collect::<Result<_, _>>()?,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs,
        };
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        fs::write(&path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

/// Parses `argv` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(cli, &args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command. `args` is the raw argument list recorded in the
/// manifest.
pub fn execute(cli: Cli, args: &[String]) -> Result<(), CliError> {
    let job = move || match &cli.command {
        Command::Generate(a) => cmd_generate(a, args),
        Command::Analyze(a) => cmd_analyze(a, args),
        Command::Compare(a) => cmd_compare(a, args),
        Command::Audit(a) => cmd_audit(a, args),
        Command::Replay(a) => cmd_replay(a),
    };
    match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(job),
        None => job(),
    }
}

/// Flat `key = value` config; `#` starts a comment.
fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    const KEYS: [&str; 8] = [
        "seed",
        "rho",
        "eta",
        "variant",
        "manual_fraction",
        "d1_weight",
        "q",
        "beta",
    ];
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Input(format!(
                "{}:{}: expected key = value",
                path.display(),
                i + 1
            )));
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(CliError::Input(format!(
                "{}:{}: unknown key {k:?}",
                path.display(),
                i + 1
            )));
        }
        map.insert(k.to_string(), v.to_string());
    }
    Ok(map)
}

fn config_value<T: std::str::FromStr>(
    flag: Option<T>,
    file: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => file
            .get(key)
            .map(|s| {
                s.parse()
                    .map_err(|_| CliError::Input(format!("config: bad value {s:?} for {key}")))
            })
            .transpose(),
    }
}

fn parse_triplet(text: &str) -> Result<(usize, f64, usize), CliError> {
    let bad = || CliError::Usage(format!("--powerlaw expects n,gamma,dmax, got {text:?}"));
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [n, g, d] = parts[..] else { return Err(bad()) };
    Ok((
        n.parse().map_err(|_| bad())?,
        g.parse().map_err(|_| bad())?,
        d.parse().map_err(|_| bad())?,
    ))
}

fn load_degrees(a: &GenerateArgs, inputs: &mut Vec<PathBuf>) -> Result<DegreeSequence, CliError> {
    match (&a.degrees, &a.from_graph, &a.powerlaw) {
        (Some(path), _, _) => {
            inputs.push(path.clone());
            read_degree_file(path).map_err(input)
        }
        (_, Some(path), _) => {
            inputs.push(path.clone());
            let snap = read_snap_edgelist(path).map_err(input)?;
            extract_degrees(&snap.graph).map_err(input)
        }
        (_, _, Some(text)) => {
            let (n, gamma, d_max) = parse_triplet(text)?;
            synthesize_powerlaw(n, gamma, d_max).map_err(|e| CliError::Usage(e.to_string()))
        }
        _ => Err(CliError::Usage(
            "one of --degrees, --from-graph or --powerlaw is required".into(),
        )),
    }
}

pub fn cmd_generate(a: &GenerateArgs, args: &[String]) -> Result<(), CliError> {
    let file = match &a.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    let seed: u64 = config_value(a.seed, &file, "seed")?
        .ok_or_else(|| CliError::Usage("--seed is required (or seed in --config)".into()))?;
    let mut inputs: Vec<PathBuf> = a.config.iter().cloned().collect();
    let mut config = BTreeMap::new();
    config.insert("model".to_string(), format!("{:?}", a.model).to_lowercase());
    config.insert("seed".to_string(), seed.to_string());
    let mut out = RunOutput::new(&a.out_dir)?;

    match a.model {
        Model::Er => {
            let n = a.n.ok_or_else(|| CliError::Usage("--model er needs --n".into()))?;
            let p = a.p.ok_or_else(|| CliError::Usage("--model er needs --p".into()))?;
            let g = generate_er(n, p, seed).map_err(|e| CliError::Usage(e.to_string()))?;
            config.insert("n".into(), n.to_string());
            config.insert("p".into(), p.to_string());
            out.graph("edges.txt", &g)?;
        }
        Model::Cl => {
            let degrees = load_degrees(a, &mut inputs)?;
            let mode = match a.cl_mode {
                ClModeArg::Auto => ClMode::Auto,
                ClModeArg::Exact => ClMode::Exact,
                ClModeArg::Fast => ClMode::Fast,
            };
            config.insert("cl_mode".into(), format!("{mode:?}").to_lowercase());
            config.insert("nodes".into(), degrees.len().to_string());
            let g = generate_cl_with(&degrees, seed, mode).map_err(input)?;
            out.graph("edges.txt", &g)?;
        }
        Model::Bter => {
            let degrees = load_degrees(a, &mut inputs)?;
            let variant = match (a.variant, file.get("variant").map(String::as_str)) {
                (Some(v), _) => v,
                (None, None | Some("standard")) => Variant::Standard,
                (None, Some("cubic")) => Variant::Cubic,
                (None, Some(other)) => return Err(CliError::Input(format!("config: unknown variant {other:?}"))),
            };
            let connectivity = match variant {
                Variant::Cubic => ConnectivityFormula::cubic(),
                Variant::Standard => {
                    let rho = config_value(a.rho, &file, "rho")?.unwrap_or(0.95);
                    let eta = config_value(a.eta, &file, "eta")?.unwrap_or(0.05);
                    ConnectivityFormula::standard(rho, eta).map_err(|e| CliError::Usage(e.to_string()))?
                }
            };
            let mut cfg = GenerationConfig::new(seed, connectivity);
            if let Some(v) = config_value(a.manual_fraction, &file, "manual_fraction")? {
                cfg.manual_fraction = v;
            }
            if let Some(v) = config_value(a.d1_weight, &file, "d1_weight")? {
                cfg.d1_weight = v;
            }
            if let Some(v) = config_value(a.beta, &file, "beta")? {
                cfg.beta = v;
            }
            cfg.q_override = config_value(a.q, &file, "q")?;
            let (g, trace) = generate_bter(&degrees, &cfg).map_err(|e| CliError::Usage(e.to_string()))?;
            let partition = CommunityPartition::new(&degrees, &cfg.connectivity);
            for (k, v) in [
                ("variant", format!("{variant:?}").to_lowercase()),
                ("rho", cfg.connectivity.rho.to_string()),
                ("eta", cfg.connectivity.eta.to_string()),
                ("manual_fraction", cfg.manual_fraction.to_string()),
                ("d1_weight", cfg.d1_weight.to_string()),
                ("q", trace.paired.to_string()),
                ("beta", cfg.beta.to_string()),
                ("nodes", degrees.len().to_string()),
            ] {
                config.insert(k.to_string(), v);
            }
            out.graph("edges.txt", &g)?;
            out.write("trace.csv", |w| trace.write_csv(w))?;
            out.write("partition.csv", |w| partition.write_csv(w))?;
        }
    }
    let inputs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    out.finish("generate", args, config, &inputs, Some(seed))
}

const METRICS: [&str; 4] = ["degree", "cc", "spectrum", "triangles"];

pub fn cmd_analyze(a: &AnalyzeArgs, args: &[String]) -> Result<(), CliError> {
    for m in &a.metrics {
        if !METRICS.contains(&m.as_str()) {
            return Err(CliError::Usage(format!(
                "unknown metric {m:?}; expected one of {METRICS:?}"
            )));
        }
    }
    let wants = |m: &str| a.metrics.iter().any(|x| x == m);
    let snap = read_snap_edgelist(&a.graph).map_err(input)?;
    let g = &snap.graph;
    let mut out = RunOutput::new(&a.out_dir)?;
    let mut summary = vec![
        ("nodes", g.node_count().to_string()),
        ("edges", g.edge_count().to_string()),
        ("non_isolated_nodes", g.non_isolated_count().to_string()),
        ("raw_edge_lines", snap.stats.raw_edges.to_string()),
        ("self_loops_dropped", snap.stats.self_loops_dropped.to_string()),
        ("duplicates_dropped", snap.stats.duplicates_dropped.to_string()),
    ];
    if wants("degree") {
        out.write("degree.csv", |w| write_degree_csv(&DegreeDistribution::of_graph(g), w))?;
    }
    if wants("cc") || wants("triangles") {
        let counts = count_triangles_wedges(g);
        let profile = clustering_from_counts(g, &counts);
        summary.push(("triangles", counts.triangles.to_string()));
        summary.push(("wedges", counts.wedges.to_string()));
        summary.push(("global_cc", profile.global_c.to_string()));
        if wants("cc") {
            out.write("cc.csv", |w| write_cc_csv(&profile.by_degree, w))?;
        }
        if wants("triangles") {
            out.write("triangles.csv", |w| write_triangles_csv(&counts, w))?;
        }
    }
    let mut failure = None;
    if wants("spectrum") {
        let opts = SpectrumOptions {
            seed: a.spectrum_seed,
            max_basis: a.max_basis,
            ..SpectrumOptions::new(a.top_k, a.tol)
        };
        let report = match top_eigenvalues_with(g, &opts) {
            Ok(r) => r,
            Err(SpectrumError::NoConvergence { partial }) => {
                failure = Some(CliError::NoConvergence(format!(
                    "spectrum did not converge to {} within {} basis vectors; partial results written",
                    a.tol, partial.iterations
                )));
                partial
            }
            Err(e) => return Err(CliError::Usage(e.to_string())),
        };
        summary.push(("spectrum_iterations", report.iterations.to_string()));
        out.write("spectrum.csv", |w| write_spectrum_csv(&report, w))?;
    }
    out.write("summary.csv", |w| write_summary_csv(&summary, w))?;
    let mut config = BTreeMap::new();
    config.insert("metrics".into(), a.metrics.join(","));
    if wants("spectrum") {
        config.insert("top_k".into(), a.top_k.to_string());
        config.insert("tol".into(), a.tol.to_string());
        config.insert("spectrum_seed".into(), a.spectrum_seed.to_string());
    }
    out.finish(
        "analyze",
        args,
        config,
        &[&a.graph],
        wants("spectrum").then_some(a.spectrum_seed),
    )?;
    failure.map_or(Ok(()), Err)
}

fn load_report(path: &Path, top_k: usize, tol: f64) -> Result<MetricsReport, CliError> {
    if path.is_dir() {
        return read_report_dir(path).map_err(input);
    }
    let snap = read_snap_edgelist(path).map_err(input)?;
    let opts = SpectrumOptions::new(top_k, tol);
    MetricsReport::compute(&snap.graph, (top_k > 0).then_some(&opts)).map_err(|e| match e {
        SpectrumError::NoConvergence { .. } => CliError::NoConvergence(format!("{}: {e}", path.display())),
        other => CliError::Usage(other.to_string()),
    })
}

pub fn cmd_compare(a: &CompareArgs, args: &[String]) -> Result<(), CliError> {
    let [first, second] = &a.graph[..] else {
        return Err(CliError::Usage("compare needs exactly two --graph inputs".into()));
    };
    let ra = load_report(first, a.top_k, a.tol)?;
    let rb = load_report(second, a.top_k, a.tol)?;
    let divergence = compare_reports(&ra, &rb, a.count_floor).map_err(input)?;
    let mut out = RunOutput::new(&a.out_dir)?;
    out.write("divergence.csv", |w| divergence.write_csv(w))?;
    let mut config = BTreeMap::new();
    config.insert("top_k".into(), a.top_k.to_string());
    config.insert("tol".into(), a.tol.to_string());
    config.insert("count_floor".into(), a.count_floor.to_string());
    let inputs: Vec<&Path> = [first, second]
        .into_iter()
        .filter(|p| p.is_file())
        .map(PathBuf::as_path)
        .collect();
    out.finish("compare", args, config, &inputs, None)
}

/// Node id to block id, from the `node,block,...` partition CSV. Rows with
/// an empty block are unassigned nodes.
fn read_partition(path: &Path) -> Result<BTreeMap<u64, usize>, CliError> {
    let err = |m: String| CliError::Input(format!("{}: {m}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| err(e.to_string()))?;
    let mut map = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| err(e.to_string()))?;
        let node: u64 = rec
            .get(0)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| err(format!("bad node in {rec:?}")))?;
        let block = rec.get(1).map(str::trim).unwrap_or("");
        if block.is_empty() {
            continue;
        }
        let block: usize = block.parse().map_err(|_| err(format!("bad block in {rec:?}")))?;
        if map.insert(node, block).is_some() {
            return Err(err(format!("node {node} listed twice")));
        }
    }
    Ok(map)
}

fn parse_predict(text: &str) -> Result<(u64, f64), CliError> {
    let bad = || CliError::Usage(format!("--predict expects n=<nodes>,gamma=<exponent>, got {text:?}"));
    let (mut n, mut gamma) = (None, None);
    for part in text.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(bad)?;
        match k.trim() {
            "n" => n = Some(v.trim().parse::<f64>().map_err(|_| bad())?),
            "gamma" => gamma = Some(v.trim().parse::<f64>().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    match (n, gamma) {
        (Some(n), Some(g)) if n >= 1.0 && n.fract() == 0.0 => Ok((n as u64, g)),
        _ => Err(bad()),
    }
}

fn core_label(c: f64) -> String {
    format!("core_c{}", format!("{c:?}").replace('.', ""))
}

pub fn cmd_audit(a: &AuditArgs, args: &[String]) -> Result<(), CliError> {
    let snap: SnapGraph = read_snap_edgelist(&a.graph).map_err(input)?;
    let g = &snap.graph;
    let counts = count_triangles_wedges(g);
    let holds = kruskal_katona_check(counts.triangles, g.edge_count() as u64);
    let mut summary = vec![
        ("triangles", counts.triangles.to_string()),
        ("edges", g.edge_count().to_string()),
        ("kruskal_katona_holds", holds.to_string()),
    ];
    let mut out = RunOutput::new(&a.out_dir)?;
    let mut inputs: Vec<&Path> = vec![&a.graph];
    let mut realized_sizes: BTreeMap<usize, usize> = BTreeMap::new();

    if let Some(part_path) = &a.partition {
        inputs.push(part_path);
        let assignment = read_partition(part_path)?;
        let limit = a.nodes.unwrap_or_else(|| snap.original_ids.last().map_or(0, |m| m + 1));
        let index: HashMap<u64, usize> = snap.original_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut blocks: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
        for (&node, &block) in &assignment {
            if node >= limit {
                return Err(CliError::Input(format!(
                    "partition references node {node}, beyond the graph's {limit} nodes"
                )));
            }
            blocks.entry(block).or_default().push(node);
        }
        let mut rows = Vec::new();
        let mut passing = 0usize;
        for (block, members) in &blocks {
            *realized_sizes.entry(members.len()).or_default() += 1;
            // Members absent from the edge list are isolated nodes.
            let internal: Vec<u64> = members
                .iter()
                .map(|id| {
                    index.get(id).map_or(0, |&u| {
                        g.neighbors(u)
                            .iter()
                            .filter(|&&v| assignment.get(&snap.original_ids[v]) == Some(block))
                            .count() as u64
                    })
                })
                .filter(|&d| d > 0)
                .collect();
            let audit = if internal.iter().sum::<u64>() >= 2 {
                Some(
                    audit_community_with(&internal, a.kappa, &a.core_constants)
                        .map_err(|e| CliError::Usage(e.to_string()))?,
                )
            } else if !(a.kappa > 0.0 && a.kappa < 1.0) {
                return Err(CliError::Usage(format!("kappa must lie in (0, 1), got {}", a.kappa)));
            } else {
                None
            };
            let mut row = format!("{block}");
            match &audit {
                Some(audit) => {
                    passing += audit.passes as usize;
                    row += &format!(
                        ",{},{},{},{}",
                        audit.s, audit.expected_triangles.value, audit.wedge_threshold, audit.passes
                    );
                    for c in &audit.er_core {
                        row += &format!(",{}", c.count);
                    }
                }
                None => {
                    row += &format!(",{},0,0,false", internal.iter().sum::<u64>() as f64 / 2.0);
                    row += &",0".repeat(a.core_constants.len());
                }
            }
            rows.push(row);
        }
        let header = ["block", "s", "expected_triangles", "wedge_threshold", "passes"]
            .map(String::from)
            .into_iter()
            .chain(a.core_constants.iter().map(|&c| core_label(c)))
            .collect::<Vec<_>>()
            .join(",");
        out.write("audit.csv", |w| {
            writeln!(w, "{header}")?;
            rows.iter().try_for_each(|r| writeln!(w, "{r}"))
        })?;
        summary.push(("blocks", blocks.len().to_string()));
        summary.push(("blocks_passing", passing.to_string()));
        let fraction = if blocks.is_empty() {
            0.0
        } else {
            passing as f64 / blocks.len() as f64
        };
        summary.push(("pass_fraction", fraction.to_string()));
    }

    if let Some(text) = &a.predict {
        let (n, gamma) = parse_predict(text)?;
        let profile = predict_community_profile(n, gamma).map_err(|e| CliError::Usage(e.to_string()))?;
        summary.push(("predicted_max_size", profile.max_size.to_string()));
        let top = profile
            .max_size
            .max(realized_sizes.keys().next_back().copied().unwrap_or(0));
        out.write("profile.csv", |w| {
            writeln!(w, "size,predicted,realized")?;
            for d in 1..=top {
                let predicted = profile.counts.get(d - 1).map_or(0.0, |c| c.1);
                writeln!(w, "{d},{predicted},{}", realized_sizes.get(&d).copied().unwrap_or(0))?;
            }
            Ok(())
        })?;
    }
    out.write("summary.csv", |w| write_summary_csv(&summary, w))?;
    let mut config = BTreeMap::new();
    config.insert("kappa".into(), a.kappa.to_string());
    config.insert(
        "core_constants".into(),
        a.core_constants
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    if let Some(p) = &a.predict {
        config.insert("predict".into(), p.clone());
    }
    out.finish("audit", args, config, &inputs, None)
}

pub fn cmd_replay(a: &ReplayArgs) -> Result<(), CliError> {
    let text =
        fs::read_to_string(&a.manifest).map_err(|e| CliError::Input(format!("{}: {e}", a.manifest.display())))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", a.manifest.display())))?;
    for input in &manifest.inputs {
        let now = sha256_file(Path::new(&input.path))?;
        if now != input.sha256 {
            return Err(CliError::Mismatch(format!(
                "input {} changed since the recorded run",
                input.path
            )));
        }
    }
    let temp;
    let dir = match &a.out_dir {
        Some(d) => d.clone(),
        None => {
            temp = tempfile::tempdir().map_err(input)?;
            temp.path().to_path_buf()
        }
    };
    let mut argv = vec!["bter".to_string()];
    argv.extend(manifest.args.iter().cloned());
    argv.push("--out-dir".into());
    argv.push(dir.display().to_string());
    let cli = Cli::try_parse_from(&argv).map_err(|e| CliError::Input(format!("manifest arguments: {e}")))?;
    let result = execute(cli, &argv[1..]);
    if let Err(e) = result {
        if !matches!(e, CliError::NoConvergence(_)) {
            return Err(e);
        }
    }
    let mut differing = Vec::new();
    for output in &manifest.outputs {
        let path = dir.join(&output.path);
        let same = path.exists() && sha256_file(&path)? == output.sha256;
        println!("{} {}", if same { "identical" } else { "DIFFERS" }, output.path);
        if !same {
            differing.push(output.path.clone());
        }
    }
    if differing.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("outputs differ: {}", differing.join(", "))))
    }
}
