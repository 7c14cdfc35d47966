mod config;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gfmmd::bench::{run_grid_experiment, run_swissroll_benchmark, GridConfig, SwissRollConfig};
use gfmmd::io::{
    read_edge_list, read_points_csv, read_signals_csv, write_distance_csv, write_edge_list,
    write_embedding_csv,
};
use gfmmd::metric::MetricOptions;
use gfmmd::{build_knn_graph, normalize_signals, Engine, Gfmmd, Graph, KernelSpec, SignalMatrix};

use config::{resolve_engine, RunConfig};

/// Graph Fourier MMD: distances between distributions on weighted graphs.
#[derive(Parser, Debug)]
#[command(name = "gfmmd", version)]
struct Cli {
    /// Write the resolved run configuration as JSON to this file.
    #[arg(long, global = true, value_name = "FILE")]
    save_config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a k-NN graph from a point CSV, or canonicalize an edge list.
    BuildGraph(BuildGraphArgs),
    /// All pairwise distances between signal columns.
    Distances(DistancesArgs),
    /// Localization score of each signal column, highest first.
    Localize(LocalizeArgs),
    /// Witness function for a pair of signal columns.
    Witness(WitnessArgs),
    /// Run a benchmark and write its report files.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct BuildGraphArgs {
    /// Headerless CSV with one point per row.
    #[arg(long, conflicts_with = "edges", required_unless_present = "edges")]
    points: Option<PathBuf>,
    /// Tab-separated edge list `a  b  weight`.
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    knn: usize,
    /// `gaussian:SIGMA` or `adaptive:K`.
    #[arg(long, default_value = "adaptive:5")]
    kernel: KernelSpec,
    /// Output edge list; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EngineArgs {
    /// `exact`, `cheby` or `cheby:ORDER`.
    #[arg(long, default_value = "exact")]
    engine: String,
    /// Chebyshev polynomial order.
    #[arg(long)]
    order: Option<usize>,
    /// Chebyshev regularizer as a multiple of the largest eigenvalue.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Component-mass gap above which a distance is infinite.
    #[arg(long, default_value_t = gfmmd::metric::DEFAULT_MASS_TOLERANCE)]
    mass_tol: f64,
}

#[derive(Args, Debug)]
struct SignalInput {
    /// Edge list of the graph.
    #[arg(long)]
    graph: PathBuf,
    /// CSV with a header of labels and one row per vertex.
    #[arg(long)]
    signals: PathBuf,
    /// Treat columns as general signals instead of normalizing them to
    /// distributions.
    #[arg(long)]
    raw: bool,
}

#[derive(Args, Debug)]
struct DistancesArgs {
    #[command(flatten)]
    input: SignalInput,
    #[command(flatten)]
    engine: EngineArgs,
    /// Also write the embedding, one row per signal.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LocalizeArgs {
    #[command(flatten)]
    input: SignalInput,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    #[command(flatten)]
    input: SignalInput,
    /// Two signal labels, `A,B`.
    #[arg(long)]
    pair: String,
    #[arg(long, default_value_t = gfmmd::metric::DEFAULT_MASS_TOLERANCE)]
    mass_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Swissroll,
    Grid,
}

#[derive(Args, Debug)]
struct BenchArgs {
    suite: Suite,
    /// JSON configuration; defaults are used for missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run a single seed instead of the configured list.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the grid engine (`exact` or `cheby:ORDER`).
    #[arg(long)]
    engine: Option<Engine>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_graph(path: &Path) -> Result<Graph> {
    read_edge_list(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn load(input: &SignalInput, mass_tol: f64) -> Result<(Gfmmd, SignalMatrix)> {
    let graph = read_graph(&input.graph)?;
    let (labels, values) = read_signals_csv(open(&input.signals)?)
        .with_context(|| format!("reading {}", input.signals.display()))?;
    if values.nrows() != graph.n() {
        bail!(
            "signal file has {} rows but the graph has {} vertices",
            values.nrows(),
            graph.n()
        );
    }
    let signals = if input.raw {
        SignalMatrix::general(values, labels)?
    } else {
        normalize_signals(values, labels)?
    };
    let options = MetricOptions {
        tau_mass: mass_tol,
        ..MetricOptions::default()
    };
    Ok((Gfmmd::with_options(graph, options), signals))
}

fn engine_of(args: &EngineArgs) -> Result<Engine> {
    resolve_engine(&args.engine, args.order, args.epsilon)
}

fn run_config(cli: &Cli) -> Result<RunConfig> {
    let base = RunConfig {
        subcommand: String::new(),
        inputs: Vec::new(),
        engine: Engine::Exact,
        kernel: KernelSpec::default(),
        k_nn: 10,
        tau_mass: gfmmd::metric::DEFAULT_MASS_TOLERANCE,
        seed: None,
        outputs: Vec::new(),
    };
    let opt = |p: &Option<PathBuf>| p.iter().cloned().collect::<Vec<_>>();
    let config = match &cli.command {
        Command::BuildGraph(a) => RunConfig {
            subcommand: "build-graph".into(),
            inputs: opt(&a.points).into_iter().chain(opt(&a.edges)).collect(),
            kernel: a.kernel,
            k_nn: a.knn,
            outputs: opt(&a.out),
            ..base
        },
        Command::Distances(a) => RunConfig {
            subcommand: "distances".into(),
            inputs: vec![a.input.graph.clone(), a.input.signals.clone()],
            engine: engine_of(&a.engine)?,
            tau_mass: a.engine.mass_tol,
            outputs: opt(&a.out).into_iter().chain(opt(&a.embeddings)).collect(),
            ..base
        },
        Command::Localize(a) => RunConfig {
            subcommand: "localize".into(),
            inputs: vec![a.input.graph.clone(), a.input.signals.clone()],
            engine: engine_of(&a.engine)?,
            tau_mass: a.engine.mass_tol,
            outputs: opt(&a.out),
            ..base
        },
        Command::Witness(a) => RunConfig {
            subcommand: "witness".into(),
            inputs: vec![a.input.graph.clone(), a.input.signals.clone()],
            tau_mass: a.mass_tol,
            outputs: opt(&a.out),
            ..base
        },
        Command::Bench(a) => RunConfig {
            subcommand: match a.suite {
                Suite::Swissroll => "bench swissroll".into(),
                Suite::Grid => "bench grid".into(),
            },
            inputs: opt(&a.config),
            engine: a.engine.unwrap_or(Engine::Exact),
            seed: a.seed,
            outputs: vec![a.out.clone()],
            ..base
        },
    };
    config.validate()?;
    Ok(config)
}

fn build_graph(a: &BuildGraphArgs) -> Result<()> {
    let graph = match (&a.points, &a.edges) {
        (Some(p), None) => {
            let points =
                read_points_csv(open(p)?).with_context(|| format!("reading {}", p.display()))?;
            build_knn_graph(points.view(), a.knn, a.kernel)?
        }
        (None, Some(e)) => read_graph(e)?,
        _ => bail!("give exactly one of --points or --edges"),
    };
    let mut out = sink(a.out.as_deref())?;
    write_edge_list(&graph, &mut out)?;
    out.flush()?;
    let stats = format!(
        "vertices: {}\nedges: {}\ncomponents: {}",
        graph.n(),
        graph.edge_count(),
        graph.connected_components().count()
    );
    if a.out.is_some() {
        println!("{stats}");
    } else {
        eprintln!("{stats}");
    }
    Ok(())
}

fn distances(a: &DistancesArgs) -> Result<()> {
    let engine = engine_of(&a.engine)?;
    let (ctx, signals) = load(&a.input, a.engine.mass_tol)?;
    let d = ctx.distances(&signals, &engine)?;
    let mut out = sink(a.out.as_deref())?;
    write_distance_csv(&d, &mut out)?;
    out.flush()?;
    if let Some(path) = &a.embeddings {
        let e = ctx.embed(&signals, &engine)?;
        let mut out = sink(Some(path))?;
        write_embedding_csv(&e, &mut out)?;
        out.flush()?;
    }
    Ok(())
}

fn localize(a: &LocalizeArgs) -> Result<()> {
    let engine = engine_of(&a.engine)?;
    let (ctx, signals) = load(&a.input, a.engine.mass_tol)?;
    let mut scores = (0..signals.m())
        .map(|j| {
            let p = signals.column(j);
            let s = if signals.is_normalized() {
                ctx.localization_score(p, &engine)?
            } else {
                ctx.seminorm(p, ctx.uniform().view(), &engine)?
            };
            Ok((signals.labels()[j].clone(), s))
        })
        .collect::<Result<Vec<(String, f64)>>>()?;
    // label order breaks ties so the ranking ignores column order
    scores.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mut out = sink(a.out.as_deref())?;
    writeln!(out, "label,score")?;
    for (label, s) in scores {
        writeln!(out, "{label},{s}")?;
    }
    out.flush()?;
    Ok(())
}

fn witness(a: &WitnessArgs) -> Result<()> {
    let (ctx, signals) = load(&a.input, a.mass_tol)?;
    let (l1, l2) = a
        .pair
        .split_once(',')
        .ok_or_else(|| anyhow!("--pair must be two labels separated by a comma"))?;
    let index = |l: &str| {
        signals
            .label_index(l.trim())
            .ok_or_else(|| anyhow!("no signal labeled '{}'", l.trim()))
    };
    let (i, j) = (index(l1)?, index(l2)?);
    let w = ctx
        .witness_function(signals.column(i), signals.column(j))
        .map_err(|e| match e {
            gfmmd::error::Error::UndefinedWitness => {
                anyhow!("signals '{l1}' and '{l2}' are identical; the witness is undefined")
            }
            other => other.into(),
        })?;
    let mut out = sink(a.out.as_deref())?;
    writeln!(out, "vertex,witness")?;
    for (v, f) in w.values.iter().enumerate() {
        writeln!(out, "{v},{f}")?;
    }
    writeln!(out, "gap,{}", w.gap)?;
    out.flush()?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text =
                fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("invalid config {}", p.display()))
        }
    }
}

fn bench(a: &BenchArgs) -> Result<()> {
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let write = |name: &str, text: &str| -> Result<()> {
        let path = a.out.join(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
    };
    match a.suite {
        Suite::Swissroll => {
            let mut config: SwissRollConfig = read_json(a.config.as_deref())?;
            if let Some(seed) = a.seed {
                config.seeds = vec![seed];
            }
            if a.engine.is_some() {
                bail!("--engine applies to the grid suite; set chebyshev_orders in the config");
            }
            let report = run_swissroll_benchmark(&config)?;
            write("report.json", &serde_json::to_string_pretty(&report)?)?;
            write("report.txt", &report.to_table())?;
            write("scatter.csv", &report.scatter_csv())?;
            print!("{}", report.to_table());
        }
        Suite::Grid => {
            let mut config: GridConfig = read_json(a.config.as_deref())?;
            if let Some(engine) = a.engine {
                config.engine = engine;
            }
            if a.seed.is_some() {
                bail!("the grid suite is deterministic and takes no seed");
            }
            let report = run_grid_experiment(&config)?;
            write("report.json", &serde_json::to_string_pretty(&report)?)?;
            write("report.txt", &report.to_table())?;
            write("witness.csv", &report.witness_csv())?;
            print!("{}", report.to_table());
        }
    }
    Ok(())
}

fn init_threads() -> Result<()> {
    if let Ok(value) = std::env::var("GFMMD_THREADS") {
        let n: usize =
            value.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
                anyhow!("GFMMD_THREADS must be a positive integer, got '{value}'")
            })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    let config = run_config(&cli)?;
    if let Some(path) = &cli.save_config {
        fs::write(path, config.to_json()?)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    match &cli.command {
        Command::BuildGraph(a) => build_graph(a),
        Command::Distances(a) => distances(a),
        Command::Localize(a) => localize(a),
        Command::Witness(a) => witness(a),
        Command::Bench(a) => bench(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
