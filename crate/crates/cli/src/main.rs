use anyhow::{anyhow, bail, Context, Result};
use cggm_core::bayes::{compare_models, ingest_data, ModelEntry};
use cggm_core::frames::verify_frame;
use cggm_core::oracle;
use cggm_core::{
    classify, BcModel, CerVerdict, ColorSpace, ColoredGraph, DYPrior, Error, GraphSpec,
    ModelOptions, PermGroupGenerators, RcopSpec, SpaceSpec,
};
use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_INPUT: u8 = 1;
const EXIT_NEGATIVE: u8 = 2;
const EXIT_DIVERGENT: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "cggm",
    version,
    about = "Colored Gaussian graphical models: CER classification and closed-form normalizers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a colored graph (exit 2 unless Cer or SymmetricCer).
    Classify { graph: PathBuf },
    /// Color a graph by the orbits of a permutation group.
    Rcop { input: PathBuf },
    /// Structure constants of a graph or raw space.
    Constants {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include Jordan frames and frame diagnostics.
        #[arg(long)]
        dump: bool,
    },
    /// Log of the gamma-like integral, or of the DY normalizer with --delta.
    Normalize {
        input: PathBuf,
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "delta",
            required_unless_present = "delta"
        )]
        s: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// Matrix file (JSON nested array); identity when absent. Read as D with --delta.
        #[arg(long = "A", short = 'A')]
        a: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Score and rank a list of models on data.
    Score {
        models: PathBuf,
        data: PathBuf,
        #[arg(long, default_value_t = 3.0)]
        delta: f64,
        /// Prior scale matrix file; identity when absent.
        #[arg(long = "D", short = 'D')]
        d: Option<PathBuf>,
        /// The CSV file starts with a header row.
        #[arg(long)]
        header: bool,
    },
    /// Compare the closed form with independent numerical oracles.
    Validate {
        input: PathBuf,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        s: f64,
        #[arg(long = "A", short = 'A')]
        a: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Generalized Cholesky factor of a PD element and its round-trip error.
    Cholesky {
        input: PathBuf,
        /// The element, JSON nested array in the input's vertex labels.
        #[arg(long)]
        x: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Quadrature when the dimension allows it, plus Monte Carlo.
    Auto,
    Mc,
    Quadrature,
}

enum Input {
    Graph(ColoredGraph),
    Space(ColorSpace<f64>),
}

fn tolerance() -> Result<f64> {
    match std::env::var("CGGM_TOL") {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| *t > 0.0)
            .ok_or_else(|| anyhow!("CGGM_TOL must be a positive number")),
        Err(_) => Ok(1e-10),
    }
}

fn options(seed: u64) -> Result<ModelOptions> {
    let tol = tolerance()?;
    Ok(ModelOptions {
        seed,
        tol,
        rank_tol: tol,
        ..ModelOptions::default()
    })
}

fn read_json(path: &Path) -> Result<Value> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_input(path: &Path) -> Result<Input> {
    let v = read_json(path)?;
    if v.get("basis").is_some() {
        let spec: SpaceSpec = serde_json::from_value(v)?;
        Ok(Input::Space(ColorSpace::from_spec(&spec)?))
    } else {
        let spec: GraphSpec = serde_json::from_value(v)?;
        Ok(Input::Graph(ColoredGraph::from_spec(&spec)?))
    }
}

fn build_model(input: &Input, opts: &ModelOptions) -> Result<BcModel<f64>> {
    Ok(match input {
        Input::Graph(g) => BcModel::from_graph(g, opts)?,
        Input::Space(s) => BcModel::from_space(s.clone(), opts)?,
    })
}

fn read_matrix(path: Option<&PathBuf>, p: usize) -> Result<DMatrix<f64>> {
    let Some(path) = path else {
        return Ok(DMatrix::identity(p, p));
    };
    let rows: Vec<Vec<f64>> =
        serde_json::from_value(read_json(path)?).context("matrix must be a nested array")?;
    if rows.len() != p || rows.iter().any(|r| r.len() != p) {
        bail!("{}: expected a {p}x{p} matrix", path.display());
    }
    Ok(DMatrix::from_fn(p, p, |i, j| rows[i][j]))
}

fn matrix_json(m: &DMatrix<f64>) -> Value {
    Value::from(
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    )
}

/// Rounds every float to 12 significant digits.
fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
            serde_json::Number::from_f64(r)
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        v => v,
    }
}

fn emit(v: Value) -> Result<()> {
    let text = serde_json::to_string_pretty(&round_floats(v))?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn named_ordering(g: &ColoredGraph, v: &CerVerdict) -> Value {
    match v.ordering() {
        Some(eta) => json!({
            "classes": eta.as_slice(),
            "names": eta.as_slice().iter().map(|&k| g.class_name(k)).collect::<Vec<_>>(),
        }),
        None => Value::Null,
    }
}

fn cmd_classify(path: &Path) -> Result<u8> {
    let Input::Graph(g) = read_input(path)? else {
        bail!("classify expects a graph");
    };
    let verdict = classify(&g)?;
    let mut out = json!({ "verdict": verdict.name(), "ordering": named_ordering(&g, &verdict) });
    match &verdict {
        CerVerdict::CpeoOnly { m1_witness, .. } => out["m1_witness"] = json!(m1_witness),
        CerVerdict::Cer { m2_witness, .. } => out["m2_witness"] = json!(m2_witness),
        _ => {}
    }
    emit(out)?;
    Ok(if verdict.is_cer() { 0 } else { EXIT_NEGATIVE })
}

fn cmd_rcop(path: &Path) -> Result<u8> {
    let spec: RcopSpec = serde_json::from_value(read_json(path)?)?;
    let edges: Vec<(usize, usize)> = spec.edges.iter().map(|e| (e[0], e[1])).collect();
    let gens = PermGroupGenerators::from_images(spec.p, &spec.generators)?;
    let g = cggm_core::colored_graph::rcop_coloring(spec.p, &edges, &gens)?;
    emit(serde_json::to_value(g.to_spec())?)?;
    Ok(0)
}

fn cmd_constants(path: &Path, seed: u64, dump: bool) -> Result<u8> {
    let input = read_input(path)?;
    let opts = options(seed)?;
    let model = build_model(&input, &opts)?;
    let sc = model.constants();
    let mut out = json!({
        "blocks": sc.blocks,
        "dim": model.space().dim(),
        "p_z": sc.p_z::<f64>(),
        "q_z": sc.q_z::<f64>(),
        "threshold": sc.convergence_threshold::<f64>(),
    });
    if let Some(r) = model.relabeling() {
        out["verdict"] = json!(r.verdict.name());
        out["vertex_order"] = json!(r.perm);
    }
    if dump {
        let frames: Vec<Value> = model
            .frames()
            .iter()
            .zip(model.algebras())
            .map(|(f, alg)| json!({ "frame": f, "report": verify_frame(f, alg, opts.tol) }))
            .collect();
        out["frames"] = Value::Array(frames);
    }
    emit(out)?;
    Ok(0)
}

fn cmd_normalize(
    path: &Path,
    s: Option<f64>,
    delta: Option<f64>,
    a: Option<&PathBuf>,
    seed: u64,
) -> Result<u8> {
    let input = read_input(path)?;
    let model = build_model(&input, &options(seed)?)?;
    let m = read_matrix(a, model.space().p())?;
    let res = match (s, delta) {
        (Some(s), _) => model.log_integral_original(s, &m)?,
        (None, Some(d)) => model.dy_log_normalizer(d, &m)?,
        (None, None) => bail!("one of --s or --delta is required"),
    };
    emit(serde_json::to_value(&res)?)?;
    Ok(0)
}

fn cmd_score(
    models: &Path,
    data: &Path,
    delta: f64,
    d: Option<&PathBuf>,
    header: bool,
) -> Result<u8> {
    let list: Vec<ModelEntry> = serde_json::from_value(read_json(models)?)
        .context("models must be a JSON array of graphs")?;
    let p = list
        .first()
        .map(|m| m.graph.p)
        .ok_or_else(|| anyhow!("empty model list"))?;
    if list.iter().any(|m| m.graph.p != p) {
        bail!("all models must share the same number of vertices");
    }
    let file = std::fs::File::open(data).with_context(|| format!("opening {}", data.display()))?;
    let stats = ingest_data(file, p, header)?;
    let prior = DYPrior::new(delta, read_matrix(d, p)?)?;
    let rows = compare_models(&list, &prior, &stats);
    emit(json!({ "n": stats.n, "delta": delta, "ranking": rows }))?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_validate(
    path: &Path,
    s: f64,
    a: Option<&PathBuf>,
    samples: usize,
    seed: u64,
    threads: Option<usize>,
    method: Method,
) -> Result<u8> {
    let input = read_input(path)?;
    let tol = tolerance()?;
    let model = build_model(&input, &options(seed)?)?;
    let a_orig = read_matrix(a, model.space().p())?;
    let a_model = model.to_model_labels(&a_orig)?;
    let engine = model.log_integral(s, &a_model)?.log_value;
    let space = model.space();
    let mut checks = Vec::new();
    let want_quad = method == Method::Quadrature
        || (method == Method::Auto && space.dim() <= oracle::QUADRATURE_MAX_DIM);
    if want_quad {
        let q = oracle::quadrature_integral(space, s, &a_model)?;
        let c = oracle::compare_with_tol(engine, q, None, tol.max(1e-8));
        checks.push(json!({ "oracle": "quadrature", "comparison": c }));
    }
    if method != Method::Quadrature {
        let mc = oracle::mc_integral(space, s, &a_model, samples, seed, threads)?;
        let c = oracle::compare(engine, mc.log_estimate, Some(mc.stderr_log));
        checks.push(json!({ "oracle": "monte_carlo", "comparison": c, "seed": seed, "samples": samples, "ess": mc.ess }));
    }
    let pass = checks
        .iter()
        .all(|c| c["comparison"]["pass"] == Value::Bool(true));
    emit(json!({ "engine": engine, "s": s, "dim": space.dim(), "checks": checks, "pass": pass }))?;
    Ok(if pass { 0 } else { EXIT_VALIDATION })
}

fn cmd_cholesky(path: &Path, x: &Path, seed: u64) -> Result<u8> {
    let input = read_input(path)?;
    let tol = tolerance()?;
    let model = build_model(&input, &options(seed)?)?;
    let xm = model.to_model_labels(&read_matrix(Some(&x.to_path_buf()), model.space().p())?)?;
    let chol = model.generalized_cholesky(&xm, tol)?;
    let pass = chol.reconstruction_residual <= tol;
    emit(json!({
        "entries": chol.entries,
        "factor": matrix_json(&chol.factor),
        "reconstruction_residual": chol.reconstruction_residual,
        "pass": pass,
    }))?;
    Ok(if pass { 0 } else { EXIT_VALIDATION })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Classify { graph } => cmd_classify(&graph),
        Command::Rcop { input } => cmd_rcop(&input),
        Command::Constants { input, seed, dump } => cmd_constants(&input, seed, dump),
        Command::Normalize {
            input,
            s,
            delta,
            a,
            seed,
        } => cmd_normalize(&input, s, delta, a.as_ref(), seed),
        Command::Score {
            models,
            data,
            delta,
            d,
            header,
        } => cmd_score(&models, &data, delta, d.as_ref(), header),
        Command::Validate {
            input,
            s,
            a,
            samples,
            seed,
            threads,
            method,
        } => cmd_validate(&input, s, a.as_ref(), samples, seed, threads, method),
        Command::Cholesky { input, x, seed } => cmd_cholesky(&input, &x, seed),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::NotCer(_)) | Some(Error::NoCpeo) => EXIT_NEGATIVE,
        Some(Error::Divergent { .. }) => EXIT_DIVERGENT,
        Some(Error::ProposalMismatch { .. }) => EXIT_VALIDATION,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if let Some(Error::Divergent { s, threshold }) = e.downcast_ref::<Error>() {
                eprintln!(
                    "error: integral diverges: s = {s} is not above the threshold {threshold}"
                );
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
