use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use edge_elim::harness::{
    csv_string, elimination_rate_experiment, pair_count, remaining_edges_growth, sample_pairs,
    soundness_experiment, summary_table, Criterion, ExperimentConfig, ExperimentKind, Method,
    Witness,
};
use edge_elim::hs::{DeltaRule, HsMode};
use edge_elim::instance::{load_instance, write_tsplib};
use edge_elim::jv::WitnessStrategy;
use edge_elim::oracle::{ExactOracle, DEFAULT_TOL};
use edge_elim::{DensitySpec, Error, Instance};

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "edge-elim", version, about = "Useless-edge detection for Euclidean TSP instances")]
struct Cli {
    /// Maximum number of worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random instance.
    Generate(GenerateArgs),
    /// Decide uselessness for edges of an instance and write a verdict CSV.
    Eliminate(EliminateArgs),
    /// Check eliminations against the exact oracle (n <= 15).
    Verify(VerifyArgs),
    /// Run an experiment described by a JSON config.
    Experiment(ExperimentArgs),
    /// Print basic statistics about an instance.
    Inspect(InspectArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    /// Preset name (uniform, gaussian, per-point-mixture) or inline JSON spec.
    #[arg(long, default_value = "uniform")]
    density: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Tsplib,
}

#[derive(Args, Debug, Clone)]
struct MethodArgs {
    #[arg(long)]
    criterion: Criterion,
    /// HS search mode.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<HsMode>,
    /// HS radius rule: fixed or pair-adaptive.
    #[arg(long, value_parser = parse_delta_rule)]
    delta_rule: Option<DeltaRule>,
    /// JV witness strategy: all-vertices or nearest-k:K.
    #[arg(long, value_parser = parse_witness)]
    witness: Option<WitnessStrategy>,
}

impl MethodArgs {
    fn method(&self) -> Result<Method, Error> {
        match self.criterion {
            Criterion::Jv => {
                if self.mode.is_some() || self.delta_rule.is_some() {
                    return Err(Error::InvalidConfig("--mode and --delta-rule apply to hs only".into()));
                }
                Ok(Method { witness: self.witness, ..Method::jv() })
            }
            Criterion::Hs => {
                if self.witness.is_some() {
                    return Err(Error::InvalidConfig("--witness applies to jv only".into()));
                }
                Ok(Method::hs(self.mode.unwrap_or_default(), self.delta_rule.unwrap_or_default()))
            }
        }
    }
}

#[derive(Args, Debug)]
struct EliminateArgs {
    /// Instance file (internal JSON or TSPLIB EUC_2D).
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    method: MethodArgs,
    /// `all` or `sample:K`.
    #[arg(long, default_value = "all", value_parser = parse_edges)]
    edges: EdgeSelection,
    /// Seed for edge sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug)]
enum EdgeSelection {
    All,
    Sample(usize),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    method: MethodArgs,
    /// Required gap between the best tour through an edge and the optimum.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Verdict CSV from `eliminate`; its positive rows are checked instead of
    /// recomputing verdicts.
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InspectArgs {
    #[arg(long = "in")]
    input: PathBuf,
}

fn parse_mode(s: &str) -> Result<HsMode, String> {
    HsMode::from_name(s).map_err(|e| e.to_string())
}

fn parse_delta_rule(s: &str) -> Result<DeltaRule, String> {
    match s {
        "fixed" => Ok(DeltaRule::Fixed),
        "pair-adaptive" | "adaptive" => Ok(DeltaRule::PairAdaptive),
        _ => Err(format!("unknown delta rule '{s}' (expected fixed or pair-adaptive)")),
    }
}

fn parse_witness(s: &str) -> Result<WitnessStrategy, String> {
    if s == "all-vertices" || s == "all" {
        return Ok(WitnessStrategy::AllVertices);
    }
    match s.strip_prefix("nearest-k:").map(usize::from_str) {
        Some(Ok(k)) if k > 0 => Ok(WitnessStrategy::NearestK(k)),
        _ => Err(format!("unknown witness strategy '{s}' (expected all-vertices or nearest-k:K)")),
    }
}

fn parse_edges(s: &str) -> Result<EdgeSelection, String> {
    if s == "all" {
        return Ok(EdgeSelection::All);
    }
    match s.strip_prefix("sample:").map(usize::from_str) {
        Some(Ok(k)) if k > 0 => Ok(EdgeSelection::Sample(k)),
        _ => Err(format!("edges must be 'all' or 'sample:K' with K > 0, got '{s}'")),
    }
}

/// Failure with a specific exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: EXIT_VALIDATION, message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure { code: EXIT_VALIDATION, message: format!("{}: {e}", path.display()) }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure { code: EXIT_VALIDATION, message: e.to_string() }),
    }
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    Ok(load_instance(&read_file(path)?)?)
}

fn describe_method(m: &Method, n: usize) -> String {
    match m.criterion {
        Criterion::Jv => format!("criterion=jv witness={}", m.label(n)),
        Criterion::Hs => format!(
            "criterion=hs mode={} delta_rule={}",
            m.hs_mode.name(),
            match m.delta_rule {
                DeltaRule::Fixed => "fixed",
                DeltaRule::PairAdaptive => "pair-adaptive",
            }
        ),
    }
}

fn generate(args: &GenerateArgs) -> Result<(), Failure> {
    let density = if args.density.trim_start().starts_with('{') {
        serde_json::from_str::<DensitySpec>(&args.density).map_err(Error::from)?
    } else {
        DensitySpec::from_name(&args.density)?
    };
    if args.n == 0 {
        return Err(Error::InvalidConfig("--n must be positive".into()).into());
    }
    eprintln!(
        "# generate n={} density={} seed={} format={:?}",
        args.n,
        serde_json::to_string(&density).map_err(Error::from)?,
        args.seed,
        args.format
    );
    let inst = Instance::generate(args.n, &density, args.seed)?;
    let text = match args.format {
        Format::Json => inst.to_json() + "\n",
        Format::Tsplib => write_tsplib(&inst, &format!("uniform{}_{}", args.n, args.seed)),
    };
    write_output(args.out.as_deref(), &text)
}

fn eliminate(args: &EliminateArgs) -> Result<(), Failure> {
    let inst = read_instance(&args.input)?;
    let n = inst.n();
    let method = args.method.method()?;
    method.check_size(n)?;
    let pairs = match args.edges {
        EdgeSelection::All => sample_pairs(n, pair_count(n), 0),
        EdgeSelection::Sample(k) => sample_pairs(n, k.min(pair_count(n)), args.seed),
    };
    eprintln!(
        "# eliminate in={} n={n} {} edges={} seed={}",
        args.input.display(),
        describe_method(&method, n),
        match args.edges {
            EdgeSelection::All => "all".to_string(),
            EdgeSelection::Sample(k) => format!("sample:{k}"),
        },
        args.seed
    );
    let verdicts: Vec<Option<Witness>> = pairs
        .par_iter()
        .map(|&(i, j)| method.evaluate(&inst, i, j))
        .collect::<Result<_, _>>()?;
    let mut out = String::from("i,j,eliminated,witness\n");
    for (&(i, j), v) in pairs.iter().zip(&verdicts) {
        match v {
            Some(w) => out.push_str(&format!("{i},{j},1,{w}\n")),
            None => out.push_str(&format!("{i},{j},0,\n")),
        }
    }
    write_output(args.out.as_deref(), &out)?;
    let eliminated = verdicts.iter().filter(|v| v.is_some()).count();
    eprintln!(
        "eliminated {eliminated} of {} edges ({:.3}%)",
        pairs.len(),
        100.0 * eliminated as f64 / pairs.len().max(1) as f64
    );
    Ok(())
}

/// Positive verdicts read back from an `eliminate` CSV.
fn read_verdicts(path: &Path, n: usize) -> Result<Vec<(usize, usize, Option<Witness>)>, Failure> {
    let text = read_file(path)?;
    let bad = |line: usize, msg: &str| Failure {
        code: EXIT_VALIDATION,
        message: format!("{} line {line}: {msg}", path.display()),
    };
    let mut rows = Vec::new();
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    for (k, rec) in reader.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| bad(line, &e.to_string()))?;
        if rec.len() != 4 {
            return Err(bad(line, "expected i,j,eliminated,witness"));
        }
        let idx = |s: &str| s.parse::<usize>().ok().filter(|&v| v < n);
        let (Some(i), Some(j)) = (idx(&rec[0]), idx(&rec[1])) else {
            return Err(bad(line, "vertex index missing or out of range"));
        };
        if i == j {
            return Err(bad(line, "edge endpoints coincide"));
        }
        match &rec[2] {
            "0" => {}
            "1" => {
                let witness = if rec[3].is_empty() {
                    None
                } else {
                    Some(rec[3].parse::<Witness>().map_err(|e| bad(line, &e.to_string()))?)
                };
                rows.push((i, j, witness));
            }
            _ => return Err(bad(line, "eliminated must be 0 or 1")),
        }
    }
    Ok(rows)
}

fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let inst = read_instance(&args.input)?;
    let n = inst.n();
    let oracle = ExactOracle::default();
    if n > oracle.max_n {
        return Err(Error::SizeOutOfRange { n, min: 5, max: oracle.max_n }.into());
    }
    if !(args.tol >= 0.0 && args.tol.is_finite()) {
        return Err(Error::InvalidConfig(format!("--tol must be finite and non-negative, got {}", args.tol)).into());
    }
    let method = args.method.method()?;
    method.check_size(n)?;
    eprintln!(
        "# verify in={} n={n} {} tol={} replay={}",
        args.input.display(),
        describe_method(&method, n),
        args.tol,
        args.replay.as_ref().map_or("none".into(), |p| p.display().to_string())
    );
    let claims: Vec<(usize, usize, Option<Witness>)> = match &args.replay {
        Some(path) => read_verdicts(path, n)?,
        None => sample_pairs(n, pair_count(n), 0)
            .into_iter()
            .filter_map(|(i, j)| match method.evaluate(&inst, i, j) {
                Ok(Some(w)) => Some(Ok((i, j, Some(w)))),
                Ok(None) => None,
                Err(e) => Some(Err(e)),
            })
            .collect::<Result<_, _>>()?,
    };
    let best = oracle.optimal_tour(&inst)?;
    println!("optimal tour length {:.12}", best.length);
    println!("i,j,witness,witness_ok,forced_length,gap,oracle_useless");
    let mut violations = 0;
    for (i, j, witness) in &claims {
        let forced = oracle.optimal_tour_with_edge(&inst, *i, *j)?;
        let gap = forced.length - best.length;
        let useless = gap > args.tol;
        let witness_ok = match witness {
            // A witness that cannot even be evaluated (say, it names an
            // endpoint of the edge) is a failed replay.
            Some(w) => w.criterion() == method.criterion && w.replay(&inst, *i, *j).unwrap_or(false),
            None => false,
        };
        if !useless || !witness_ok {
            violations += 1;
        }
        println!(
            "{i},{j},{},{},{:.12},{:.3e},{}",
            witness.map_or(String::new(), |w| w.to_string()),
            witness_ok as u8,
            forced.length,
            gap,
            useless as u8
        );
    }
    eprintln!("checked {} eliminations, {violations} violations", claims.len());
    if violations > 0 {
        return Err(Failure {
            code: EXIT_VIOLATION,
            message: format!("{violations} eliminated edges failed verification"),
        });
    }
    Ok(())
}

fn experiment(args: &ExperimentArgs) -> Result<(), Failure> {
    let mut config = ExperimentConfig::from_json(&read_file(&args.config)?)?;
    if let Some(out) = &args.out {
        config.output = Some(out.clone());
    }
    eprintln!("# config {}", serde_json::to_string(&config).map_err(Error::from)?);
    let out = config.output.clone();
    match config.experiment {
        ExperimentKind::Rates => {
            let rows = elimination_rate_experiment(&config)?;
            write_output(out.as_deref(), &csv_string(&rows)?)?;
            eprint!("{}", summary_table(&rows));
        }
        ExperimentKind::Growth => {
            let report = remaining_edges_growth(&config)?;
            write_output(out.as_deref(), &csv_string(&report.rows)?)?;
            eprint!("{}", summary_table(&report.rows));
            eprintln!("log-log slope of remaining edges: {:.4}", report.slope);
            eprintln!("spread of remaining/n: {:.4}", report.per_n_spread());
        }
        ExperimentKind::Soundness => {
            let methods = config.methods();
            let trials = config.trials;
            let report =
                soundness_experiment(trials, &config.n_values, &methods, &config.density, config.seed)?;
            let mut text = String::from("method,instances,edges_checked,edges_eliminated,violations\n");
            for (label, count) in &report.eliminated {
                let v = report.violations.iter().filter(|v| &v.method == label).count();
                text.push_str(&format!(
                    "{label},{},{},{count},{v}\n",
                    report.instances, report.edges_checked
                ));
            }
            write_output(out.as_deref(), &text)?;
            for v in &report.violations {
                eprintln!(
                    "violation: trial {} n {} seed {} {} edge {}-{} witness {}",
                    v.trial, v.n, v.instance_seed, v.method, v.i, v.j, v.witness
                );
            }
            eprintln!(
                "{} instances, {} edges, {} eliminations, {} violations",
                report.instances,
                report.edges_checked,
                report.total_eliminated(),
                report.violations.len()
            );
            if !report.violations.is_empty() {
                return Err(Failure {
                    code: EXIT_VIOLATION,
                    message: "soundness violations found".into(),
                });
            }
        }
    }
    Ok(())
}

fn inspect(args: &InspectArgs) -> Result<(), Failure> {
    let inst = read_instance(&args.input)?;
    let n = inst.n();
    println!("n {n}");
    println!("edges {}", pair_count(n));
    match inst.provenance() {
        Some(p) => println!(
            "provenance seed={} density={}",
            p.seed,
            serde_json::to_string(&p.density).map_err(Error::from)?
        ),
        None => println!("provenance none"),
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in inst.points() {
        lo = [lo[0].min(p.x), lo[1].min(p.y)];
        hi = [hi[0].max(p.x), hi[1].max(p.y)];
    }
    println!("bbox [{:.6}, {:.6}] x [{:.6}, {:.6}]", lo[0], hi[0], lo[1], hi[1]);
    if n >= 2 {
        let nn = inst.nn_distances();
        let mean = nn.iter().sum::<f64>() / n as f64;
        let min = nn.iter().copied().fold(f64::INFINITY, f64::min);
        let max = nn.iter().copied().fold(0.0, f64::max);
        println!("nearest-neighbour distance min {min:.6} mean {mean:.6} max {max:.6}");
        println!("mean nn * sqrt(n) {:.4}", mean * (n as f64).sqrt());
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::InvalidConfig("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure { code: EXIT_VALIDATION, message: e.to_string() })?;
    }
    match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Eliminate(a) => eliminate(a),
        Command::Verify(a) => verify(a),
        Command::Experiment(a) => experiment(a),
        Command::Inspect(a) => inspect(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
