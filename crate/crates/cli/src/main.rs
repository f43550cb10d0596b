use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use phasemax::ensembles::{gen_instance_seeded, ApproxPolicy, EnsembleKind, InstanceSpec, NoiseModel};
use phasemax::initializers::{initialize, InitKind, InitializerConfig};
use phasemax::io::{read_instance, write_instance};
use phasemax::oracles::{coverage_mc, regions_brute_force, uniqueness_check, CapCenters};
use phasemax::seeding::rng_from_seed;
use phasemax::solvers::{gerchberg_saxton, recover_via_dual, solve_phasemax, SolverConfig};
use phasemax::sweep::{parse_grid, run_sweep, selftest, sweep_solver_config, InitPolicy, Method, SweepConfig};
use phasemax::theory::{
    halfsphere_cover_prob, neighbor_cover_bound, noise_bound_from_ratios, nonuniform_bound,
    phasemax_success_bound, regions_count, small_caps_cover_bound, FormulaId,
};
use phasemax::{Error, Field};

#[derive(Parser)]
#[command(name = "phasemax", version, about = "Convex phase retrieval by PhaseMax")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance file.
    Recover(RecoverArgs),
    /// Evaluate a closed-form probability bound.
    Bounds {
        #[arg(long)]
        formula: String,
        /// Comma-separated `key=value` pairs.
        #[arg(long, default_value = "")]
        params: String,
    },
    /// Geometric oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Monte Carlo success-rate sweep, written as CSV.
    Sweep(SweepArgs),
    /// Reduced-scale invariant suite; prints a JSON report.
    Selftest,
    /// Write a random instance file.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "phasemax")]
    method: String,
    /// Replace the stored `xhat`: random | spectral | trunc-spectral.
    #[arg(long)]
    init: Option<String>,
    /// Use only the first K measurements for initialization and the rest for recovery.
    #[arg(long)]
    init_m: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Count regions cut by k random hyperplanes in R^n by sampling.
    Regions {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Frequency with which m random semispheres cover the sphere of R^n.
    Cover {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        /// Cap angle in degrees.
        #[arg(long, default_value_t = 90.0)]
        theta_deg: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check whether the stored truth is the unique solution.
    Unique {
        #[arg(long)]
        instance: PathBuf,
    },
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    field: Option<Field>,
    /// Comma-separated angles in degrees.
    #[arg(long, value_delimiter = ',')]
    beta_deg: Option<Vec<f64>>,
    /// `lo:hi:step`, inclusive.
    #[arg(long)]
    m_grid: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    method: Option<String>,
    /// `at-angle` or an initializer name.
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    init_m: Option<usize>,
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value = "complex")]
    field: Field,
    #[arg(long, default_value_t = 0.0)]
    beta_deg: f64,
    #[arg(long, default_value = "unit-sphere")]
    ensemble: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Sweep file; every key may be overridden by the matching flag.
#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SweepFile {
    n: Option<usize>,
    field: Option<Field>,
    beta_deg: Option<Vec<f64>>,
    m_grid: Option<String>,
    trials: Option<usize>,
    method: Option<String>,
    init: Option<String>,
    init_m: Option<usize>,
    ensemble: Option<String>,
    noise: Option<NoiseModel>,
    seed: Option<u64>,
    workers: Option<usize>,
    solver: Option<SolverConfig>,
}

enum Failure {
    Config(String),
    Io(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(msg) => Failure::Io(msg),
            Error::InvalidParameter(_)
            | Error::Format(_)
            | Error::DimensionMismatch { .. }
            | Error::FieldMismatch
            | Error::Regime(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Recover(a) => recover(a),
        Command::Bounds { formula, params } => bounds(&formula, &params),
        Command::Oracle(o) => oracle(o),
        Command::Sweep(a) => sweep(a),
        Command::Selftest => return run_selftest(),
        Command::Generate(a) => generate(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn emit_json(v: &Value, out: Option<&Path>) -> CmdResult {
    let text = serde_json::to_string_pretty(v).expect("json value");
    match out {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => writeln!(io::stdout().lock(), "{text}")?,
    }
    Ok(())
}

fn parse_kind(s: &str) -> Result<EnsembleKind, Failure> {
    match s {
        "unit-sphere" => Ok(EnsembleKind::UnitSphere),
        "gaussian" => Ok(EnsembleKind::Gaussian),
        other => Err(Failure::Config(format!("unknown ensemble `{other}`"))),
    }
}

fn recover(a: RecoverArgs) -> CmdResult {
    let inst = read_instance(&a.instance)?;
    let method: Method = a.method.parse()?;
    let mut cfg = SolverConfig::default();
    if let Some(k) = a.max_iters {
        cfg.max_iters = k;
    }
    if let Some(t) = a.tol {
        cfg.tol_objective = t;
    }
    cfg.validate()?;

    let (init_part, ensemble) = match a.init_m {
        Some(k) => inst.ensemble.split_at(k)?,
        None => (inst.ensemble.clone(), inst.ensemble.clone()),
    };
    let xhat = match &a.init {
        Some(name) => {
            let kind: InitKind = name.parse()?;
            let mut rng = rng_from_seed(inst.ensemble.seed);
            initialize(&init_part, &InitializerConfig::with_kind(kind), None, &mut rng)?
        }
        None => inst.xhat.clone(),
    };
    let truth = inst.truth.as_ref();
    let result = match method {
        Method::PhaseMax => {
            let p = phasemax::ensembles::ProblemInstance::new(ensemble, xhat, inst.truth.clone())?;
            solve_phasemax(&p, &cfg)?
        }
        Method::Bp => recover_via_dual(&ensemble, &xhat, truth, &cfg)?,
        Method::Gs => gerchberg_saxton(&ensemble, &xhat, truth, &cfg)?,
    };
    let mut v = serde_json::to_value(&result).expect("result serializes");
    v["method"] = json!(a.method);
    emit_json(&v, a.out.as_deref())
}

fn parse_params(s: &str) -> Result<BTreeMap<String, f64>, Failure> {
    let mut out = BTreeMap::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("parameter `{item}` is not key=value")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::Config(format!("parameter `{k}` is not a number")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

fn bounds(formula: &str, params: &str) -> CmdResult {
    let id: FormulaId = formula.parse()?;
    let p = parse_params(params)?;
    let get = |k: &str| {
        p.get(k)
            .copied()
            .ok_or_else(|| Failure::Config(format!("formula `{formula}` needs parameter `{k}`")))
    };
    // accuracy may be given directly or through the angle in degrees
    let alpha = || match (p.get("alpha"), p.get("beta_deg")) {
        (Some(&a), _) => Ok(a),
        (None, Some(&b)) => Ok(1.0 - b / 90.0),
        _ => Err(Failure::Config(format!("formula `{formula}` needs `alpha` or `beta_deg`"))),
    };
    let v = match id {
        FormulaId::SuccessComplex => {
            json!(phasemax_success_bound(get("m")?, get("n")?, alpha()?, Field::Complex))
        }
        FormulaId::SuccessReal => {
            json!(phasemax_success_bound(get("m")?, get("n")?, alpha()?, Field::Real))
        }
        FormulaId::NeighborCover => json!(neighbor_cover_bound(get("m")?, get("n")?, alpha()?)),
        FormulaId::Nonuniform => {
            json!(nonuniform_bound(get("m")?, get("n")?, alpha()?, get("ell")?))
        }
        FormulaId::SmallCaps => {
            let (b, trace) = small_caps_cover_bound(get("m")?, get("n")?, get("phi")?);
            let mut v = json!(b);
            v["trace"] = json!(trace);
            v
        }
        FormulaId::Noise => {
            let angle = match (p.get("angle"), p.get("beta_deg")) {
                (Some(&a), _) => a,
                (None, Some(&b)) => b.to_radians(),
                _ => 0.0,
            };
            let nb = noise_bound_from_ratios(
                get("m")?,
                get("n")?,
                angle,
                get("s")?,
                get("r")?,
                get("epsilon")?,
                p.get("x0_norm").copied().unwrap_or(1.0),
            )?;
            let mut v = json!(nb.probability);
            v["error_bound"] = json!(nb.error_bound);
            v["theta"] = json!(nb.theta);
            v["phi"] = json!(nb.phi);
            v["trace"] = json!(nb.trace);
            v
        }
    };
    emit_json(&v, None)
}

fn oracle(cmd: OracleCommand) -> CmdResult {
    match cmd {
        OracleCommand::Regions { n, k, samples, seed } => {
            let mut rng = rng_from_seed(seed);
            let found = regions_brute_force(n, k, &mut rng, samples)?;
            let formula = regions_count(n as u64, k as u64)?;
            emit_json(
                &json!({
                    "n": n, "k": k, "samples": samples,
                    "brute_force": found,
                    "formula": formula.to_string(),
                    "match": formula == found.into(),
                }),
                None,
            )
        }
        OracleCommand::Cover { n, m, trials, theta_deg, seed } => {
            let mut rng = rng_from_seed(seed);
            let theta = theta_deg.to_radians();
            let est = coverage_mc(n, m, &CapCenters::Uniform, theta, trials, &Default::default(), &mut rng)?;
            let mut v = json!(est);
            v["n"] = json!(n);
            v["m"] = json!(m);
            v["theta_deg"] = json!(theta_deg);
            if (theta_deg - 90.0).abs() < 1e-12 {
                v["formula"] = json!(halfsphere_cover_prob(m as u64, n as u64)?);
            }
            emit_json(&v, None)
        }
        OracleCommand::Unique { instance } => {
            let inst = read_instance(&instance)?;
            let truth = inst
                .truth
                .as_ref()
                .ok_or_else(|| Failure::Config("instance has no x0".into()))?;
            let report = uniqueness_check(&inst.ensemble, truth, &inst.xhat)?;
            let mut v = json!(report);
            v["unique"] = json!(!report.nontrivial);
            emit_json(&v, None)
        }
    }
}

fn sweep_config(a: &SweepArgs) -> Result<SweepConfig, Failure> {
    let file: SweepFile = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?
        }
        None => SweepFile::default(),
    };
    let n = a.n.or(file.n).ok_or_else(|| Failure::Config("--n is required".into()))?;
    let grid = a
        .m_grid
        .clone()
        .or(file.m_grid)
        .ok_or_else(|| Failure::Config("--m-grid is required".into()))?;
    let init = a.init.clone().or(file.init).unwrap_or_else(|| "at-angle".into());
    let init_m = a.init_m.or(file.init_m);
    let init = match init.as_str() {
        "at-angle" => InitPolicy::AtAngle,
        name => InitPolicy::Initializer {
            config: InitializerConfig::with_kind(name.parse()?),
            init_m,
        },
    };
    let beta_deg = a.beta_deg.clone().or(file.beta_deg).unwrap_or_default();
    let mut cfg = SweepConfig::new(n, beta_deg, parse_grid(&grid)?, a.trials.or(file.trials).unwrap_or(100));
    cfg.field = a.field.or(file.field).unwrap_or(Field::Complex);
    cfg.init = init;
    if let Some(m) = a.method.clone().or(file.method) {
        cfg.method = m.parse()?;
    }
    if let Some(k) = a.ensemble.clone().or(file.ensemble) {
        cfg.ensemble = parse_kind(&k)?;
    }
    cfg.noise = file.noise.unwrap_or(NoiseModel::None);
    cfg.seed = a.seed.or(file.seed).unwrap_or(0);
    cfg.workers = a.workers.or(file.workers).unwrap_or(1);
    cfg.solver = file.solver.unwrap_or_else(sweep_solver_config);
    cfg.validate()?;
    Ok(cfg)
}

fn sweep(a: SweepArgs) -> CmdResult {
    let cfg = sweep_config(&a)?;
    let table = run_sweep(&cfg)?;
    match &a.out {
        Some(p) => {
            let f = File::create(p)?;
            table.write_csv(BufWriter::new(f))?;
        }
        None => io::stdout().write_all(table.to_csv_string().as_bytes())?,
    }
    Ok(())
}

fn run_selftest() -> ExitCode {
    let report = selftest();
    for item in &report.items {
        eprintln!("{} {}: {}", if item.passed { "PASS" } else { "FAIL" }, item.name, item.detail);
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn generate(a: GenerateArgs) -> CmdResult {
    if !(0.0..=90.0).contains(&a.beta_deg) {
        return Err(Failure::Config("--beta-deg must lie in [0, 90]".into()));
    }
    let spec = InstanceSpec::new(a.n, a.m, a.field)
        .kind(parse_kind(&a.ensemble)?)
        .approx(ApproxPolicy::AtAngle(a.beta_deg.to_radians()));
    let inst = gen_instance_seeded(&spec, a.seed)?;
    write_instance(&a.out, &inst)?;
    Ok(())
}
