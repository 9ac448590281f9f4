//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use log::info;

use crate::edge_set::EdgeSet;
use crate::evalproxy::{self, EvalConfig, Scorer};
use crate::graph::{build_graph, HeteroGraph, NodeTable};
use crate::io::{self as gio, LinkFileOptions, LinkReader, Report};
use crate::sparsify::{self, Method, SparsifyParams};
use crate::synthgen::{self, EdgeTypeSpec, GenSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "HGSPARSE_THREADS";

#[derive(Parser, Debug)]
#[command(name = "hgsparse", version, about = "Sparsify heterogeneous graphs by per-edge-type neighborhood sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a sparsifier and write the kept edges.
    Sparsify(SparsifyArgs),
    /// Print graph statistics as JSON.
    Stats(StatsArgs),
    /// Generate a synthetic heterogeneous graph.
    Generate(GenerateArgs),
    /// Check a sparse edge file against the coverage and isolation guarantees.
    Verify(VerifyArgs),
    /// Link-prediction proxy on the full or sparsified training edges.
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Link file: src, dst, edge type[, weight].
    #[arg(long)]
    links: PathBuf,
    /// Node file: id, name, node type.
    #[arg(long)]
    nodes: Option<PathBuf>,
    /// Link files carry a fourth weight column.
    #[arg(long)]
    weighted: bool,
    /// Field delimiter; `tab` or a single character.
    #[arg(long, default_value = "tab", value_parser = parse_delimiter)]
    delimiter: char,
    /// Skip lines starting with this character.
    #[arg(long)]
    comment: Option<char>,
}

impl InputArgs {
    fn link_options(&self) -> LinkFileOptions {
        LinkFileOptions { has_weight: self.weighted, delimiter: self.delimiter, comment_prefix: self.comment }
    }
}

#[derive(Args, Debug)]
struct SparsifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Per-bucket budget.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, default_value = "per-type")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sparse link file to write.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report to write.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Omit the timestamp from the report.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Spec file with `node_types=`, `seed=` and `edges <src> <dst> <count> <alpha>` lines.
    #[arg(long, conflicts_with_all = ["preset", "node_types", "edge_type"])]
    spec: Option<PathBuf>,
    /// Built-in shape: `pubmed` or `yelp`.
    #[arg(long, conflicts_with_all = ["node_types", "edge_type"])]
    preset: Option<String>,
    /// Skew exponent for presets.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Comma-separated node-type sizes.
    #[arg(long, value_delimiter = ',')]
    node_types: Vec<usize>,
    /// Edge type as `src:dst:count:alpha`; repeatable.
    #[arg(long, value_parser = parse_edge_type)]
    edge_type: Vec<EdgeTypeSpec>,
    /// Overrides the spec file's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_links: PathBuf,
    #[arg(long)]
    out_nodes: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Sparse link file to check (same format as --links).
    #[arg(long)]
    sparse: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, default_value = "per-type")]
    method: Method,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Sparsify the training edges with this budget; omit for the full-graph baseline.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: Option<u64>,
    #[arg(long, default_value = "per-type")]
    method: Method,
    #[arg(long, default_value_t = evalproxy::DEFAULT_HOLDOUT)]
    holdout: f64,
    #[arg(long, default_value_t = evalproxy::DEFAULT_NEGATIVES_PER_POSITIVE,
          value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    negatives_per_positive: usize,
    #[arg(long, default_value = "common-neighbors")]
    scorer: Scorer,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    deterministic: bool,
}

fn parse_delimiter(s: &str) -> Result<char, String> {
    let c = match s {
        "tab" | "\\t" => '\t',
        _ => {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => return Err(format!("delimiter must be a single character or `tab`, got {s:?}")),
            }
        }
    };
    if c.is_ascii_digit() {
        return Err(format!("delimiter {c:?} must not be a digit"));
    }
    Ok(c)
}

fn parse_edge_type(s: &str) -> Result<EdgeTypeSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err(format!("expected src:dst:count:alpha, got {s:?}"));
    }
    let int = |p: &str| p.parse::<usize>().map_err(|e| format!("{p:?}: {e}"));
    Ok(EdgeTypeSpec {
        src_type: int(parts[0])?,
        dst_type: int(parts[1])?,
        count: int(parts[2])?,
        alpha: parts[3].parse().map_err(|e| format!("{:?}: {e}", parts[3]))?,
    })
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Verification(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Verification(_) => EXIT_VERIFY,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Verification(m) => m,
        }
    }
}

fn data_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Sparsify(a) => run_sparsify(a),
        Command::Stats(a) => run_stats(a),
        Command::Generate(a) => run_generate(a),
        Command::Verify(a) => run_verify(a),
        Command::Eval(a) => run_eval(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path).map(BufReader::new).map_err(|e| data_err(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| data_err(path, e))
}

fn load_graph(input: &InputArgs) -> Result<HeteroGraph, Failure> {
    let nodes: Option<NodeTable> = match &input.nodes {
        Some(p) => Some(gio::read_node_file(open(p)?).map_err(|e| data_err(p, e))?),
        None => None,
    };
    let records = read_records(&input.links, &input.link_options())?;
    let g = build_graph(records, nodes.as_ref()).map_err(|e| data_err(&input.links, e))?;
    info!("loaded {}: n={} m={} t={} duplicates={}", input.links.display(), g.n(), g.m(), g.t(), g.duplicates_dropped());
    Ok(g)
}

fn read_records(path: &Path, opts: &LinkFileOptions) -> Result<Vec<crate::graph::EdgeRecord>, Failure> {
    LinkReader::new(open(path)?, opts.clone())
        .map_err(|e| Failure::Usage(e.to_string()))?
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| data_err(path, e))
}

fn timestamp(deterministic: bool) -> Option<u64> {
    if deterministic {
        None
    } else {
        SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
    }
}

fn emit_report(report: &Report, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => gio::write_report(report, create(p)?).map_err(|e| data_err(p, e)),
        None => gio::write_report(report, io::stdout().lock()).map_err(|e| Failure::Data(e.to_string())),
    }
}

fn run_sparsify(a: SparsifyArgs) -> Result<(), Failure> {
    let g = load_graph(&a.input)?;
    let params = SparsifyParams::new(a.k as usize, a.method, a.seed).map_err(|e| Failure::Usage(e.to_string()))?;
    let result = sparsify::sparsify(&g, &params).map_err(|e| data_err(&a.input.links, e))?;
    info!("kept {} of {} edges (ratio {:.4})", result.kept, g.m(), result.ratio);
    if let Some(out) = &a.out {
        gio::write_link_file(&g, Some(&result.selected), create(out)?).map_err(|e| data_err(out, e))?;
    }
    let mut report = Report::for_selection(&g, &result.selected, Some(params.k), Some(params.method), Some(params.seed))
        .map_err(|e| Failure::Data(e.to_string()))?;
    report.generated_at = timestamp(a.deterministic);
    if a.report.is_some() || a.out.is_none() {
        emit_report(&report, a.report.as_deref())?;
    }
    Ok(())
}

fn run_stats(a: StatsArgs) -> Result<(), Failure> {
    let g = load_graph(&a.input)?;
    let mut value = serde_json::to_value(g.stats()).map_err(|e| Failure::Data(e.to_string()))?;
    value["duplicates_dropped"] = g.duplicates_dropped().into();
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &value).map_err(|e| Failure::Data(e.to_string()))?;
    writeln!(out).map_err(|e| Failure::Data(e.to_string()))?;
    Ok(())
}

fn run_generate(a: GenerateArgs) -> Result<(), Failure> {
    let mut spec = if let Some(path) = &a.spec {
        GenSpec::parse(open(path)?).map_err(|e| data_err(path, e))?
    } else if let Some(preset) = &a.preset {
        match preset.as_str() {
            "pubmed" => GenSpec::pubmed_like(a.alpha, 0),
            "yelp" => GenSpec::yelp_like(a.alpha, 0),
            other => return Err(Failure::Usage(format!("unknown preset {other:?} (expected pubmed or yelp)"))),
        }
    } else {
        if a.node_types.is_empty() || a.edge_type.is_empty() {
            return Err(Failure::Usage("give --spec, --preset, or both --node-types and --edge-type".into()));
        }
        GenSpec { node_type_sizes: a.node_types.clone(), edge_types: a.edge_type.clone(), seed: 0 }
    };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let g = synthgen::generate(&spec).map_err(|e| Failure::Data(e.to_string()))?;
    gio::write_link_file(&g, None, create(&a.out_links)?).map_err(|e| data_err(&a.out_links, e))?;
    if let Some(path) = &a.out_nodes {
        let mut w = create(path)?;
        for u in g.nodes() {
            writeln!(
                w,
                "{}\t{}\t{}",
                g.node_label(u),
                g.node_name(u).unwrap_or_default(),
                g.node_type_label(g.node_type(u))
            )
            .map_err(|e| data_err(path, e))?;
        }
        w.flush().map_err(|e| data_err(path, e))?;
    }
    info!("generated n={} m={} t={}", g.n(), g.m(), g.t());
    Ok(())
}

fn run_verify(a: VerifyArgs) -> Result<(), Failure> {
    let g = load_graph(&a.input)?;
    let sparse = read_records(&a.sparse, &a.input.link_options())?;
    let selected = EdgeSet::from_records(&g, &sparse).map_err(|e| data_err(&a.sparse, e))?;
    let mut report = Report::for_selection(&g, &selected, Some(a.k as usize), Some(a.method), None)
        .map_err(|e| Failure::Data(e.to_string()))?;
    report.generated_at = timestamp(a.deterministic);
    if let Some(path) = &a.report {
        emit_report(&report, Some(path))?;
    }
    let mut out = io::stdout().lock();
    let _ = writeln!(
        out,
        "kept {} of {} edges, {} coverage violations, {} isolated nodes",
        report.kept_edges,
        report.m,
        report.coverage_violations.len(),
        report.isolated_nodes.len()
    );
    for v in &report.coverage_violations {
        let _ = writeln!(
            out,
            "violation: node {} {} type {}: required {}, kept {}",
            v.node, v.direction, v.etype, v.required, v.actual
        );
    }
    for u in &report.isolated_nodes {
        let _ = writeln!(out, "isolated: node {u}");
    }
    if report.passes_verification() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} fails verification", a.sparse.display())))
    }
}

fn worker_pool() -> Result<rayon::ThreadPool, Failure> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Failure::Usage(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Data(e.to_string()))
}

fn run_eval(a: EvalArgs) -> Result<(), Failure> {
    if !(a.holdout > 0.0 && a.holdout < 1.0) {
        return Err(Failure::Usage(format!("--holdout must lie strictly between 0 and 1, got {}", a.holdout)));
    }
    let g = load_graph(&a.input)?;
    let mut cfg = EvalConfig::new(a.seed);
    cfg.holdout = a.holdout;
    cfg.negatives_per_positive = a.negatives_per_positive;
    cfg.scorer = a.scorer;
    if let Some(k) = a.k {
        cfg = cfg.with_sparsifier(k as usize, a.method);
    }
    let pool = worker_pool()?;
    let outcome = pool
        .install(|| evalproxy::evaluate(&g, &cfg))
        .map_err(|e| data_err(&a.input.links, e))?;
    let (k, method) = match cfg.sparsify {
        Some((k, m)) => (Some(k), Some(m)),
        None => (None, None),
    };
    let mut report = Report::for_selection(&outcome.train_graph, &outcome.selected, k, method, Some(a.seed))
        .map_err(|e| Failure::Data(e.to_string()))?;
    report.eval = Some(outcome.report);
    report.generated_at = timestamp(a.deterministic);
    emit_report(&report, a.report.as_deref())
}
