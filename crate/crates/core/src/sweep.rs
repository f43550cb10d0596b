//! Monte Carlo phase-transition sweeps over `(beta, m)` grids, Wilson
//! intervals, CSV tables, and the reduced-scale self test.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::ensembles::{
    gen_instance, ApproxPolicy, EnsembleKind, InstanceSpec, NoiseModel, ProblemInstance,
};
use crate::error::{Error, Result};
use crate::initializers::{initialize, InitializerConfig};
use crate::linalg::{accuracy, angle_between, Field};
use crate::seeding::{child_rng, derive_seed};
use crate::solvers::{
    gerchberg_saxton, recover_via_dual, solve_phasemax, SolverConfig, RRE_SUCCESS,
};
use crate::theory::phasemax_success_bound;
use crate::util::Stopwatch;

pub const CSV_HEADER: &str = "beta_deg,m,trials,successes,rate,wilson_lo,wilson_hi,theory_bound";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    PhaseMax,
    Bp,
    Gs,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phasemax" => Ok(Method::PhaseMax),
            "bp" => Ok(Method::Bp),
            "gs" => Ok(Method::Gs),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

/// How each trial obtains its approximation vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitPolicy {
    /// At each configured angle exactly.
    AtAngle,
    /// From the measurements. With `init_m`, that many extra measurements are
    /// drawn and used only for initialization.
    Initializer {
        config: InitializerConfig,
        init_m: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub field: Field,
    /// Angles in degrees; ignored (one pseudo-angle) for initializer policies.
    pub beta_deg: Vec<f64>,
    pub m_grid: Vec<usize>,
    pub trials_per_cell: usize,
    pub method: Method,
    pub init: InitPolicy,
    pub ensemble: EnsembleKind,
    pub noise: NoiseModel,
    pub seed: u64,
    pub workers: usize,
    pub solver: SolverConfig,
}

impl SweepConfig {
    /// Complex unit-sphere sweep with exact angles and the default solver.
    pub fn new(n: usize, beta_deg: Vec<f64>, m_grid: Vec<usize>, trials_per_cell: usize) -> Self {
        Self {
            n,
            field: Field::Complex,
            beta_deg,
            m_grid,
            trials_per_cell,
            method: Method::PhaseMax,
            init: InitPolicy::AtAngle,
            ensemble: EnsembleKind::UnitSphere,
            noise: NoiseModel::None,
            seed: 0,
            workers: 1,
            solver: sweep_solver_config(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::InvalidParameter(s.to_string()));
        if self.n == 0 {
            return bad("n must be positive");
        }
        if self.trials_per_cell == 0 {
            return bad("trials_per_cell must be at least 1");
        }
        if self.m_grid.is_empty() || self.m_grid.contains(&0) {
            return bad("m grid must be nonempty with positive entries");
        }
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        match self.init {
            InitPolicy::AtAngle => {
                if self.beta_deg.is_empty() {
                    return bad("beta list must be nonempty");
                }
                if self.beta_deg.iter().any(|b| !(0.0..=90.0).contains(b)) {
                    return bad("angles must lie in [0, 90] degrees");
                }
            }
            InitPolicy::Initializer { config, init_m } => {
                if init_m == Some(0) {
                    return bad("init_m must be positive");
                }
                config.validate()?
            }
        }
        if self.method == Method::Gs && self.m_grid.iter().any(|&m| m < self.n) {
            return bad("Gerchberg-Saxton needs m >= n");
        }
        self.solver.validate()
    }

    fn betas(&self) -> Vec<f64> {
        match self.init {
            InitPolicy::AtAngle => self.beta_deg.clone(),
            InitPolicy::Initializer { .. } => vec![f64::NAN],
        }
    }
}

/// Solver settings for sweeps: tolerances two orders below the success
/// threshold on the relative error.
pub fn sweep_solver_config() -> SolverConfig {
    SolverConfig {
        tol_objective: RRE_SUCCESS * 1e-2,
        max_iters: 20_000,
        ..Default::default()
    }
}

/// Parses `lo:hi:step` (inclusive) into a grid.
pub fn parse_grid(spec: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidParameter(format!("bad grid entry `{s}`")))
    };
    match parts.as_slice() {
        [one] => Ok(vec![num(one)?]),
        [lo, hi, step] => {
            let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
            if step == 0 || lo > hi {
                return Err(Error::InvalidParameter(format!("bad grid `{spec}`")));
            }
            Ok((lo..=hi).step_by(step).collect())
        }
        _ => Err(Error::InvalidParameter(format!(
            "grid must be `lo:hi:step`, got `{spec}`"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// Configured angle, or the measured angle for initializer policies.
    pub beta_deg: f64,
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    pub alpha: f64,
    pub rre: f64,
    pub success: bool,
    pub converged: bool,
    pub iterations: usize,
    pub wall_ms: f64,
}

/// Builds the instance of one trial: truth, measurements, then `xhat`.
pub fn trial_instance(
    cfg: &SweepConfig,
    beta_idx: usize,
    m_idx: usize,
    trial: usize,
) -> Result<(ProblemInstance, u64)> {
    let seed = derive_seed(cfg.seed, &[beta_idx as u64, m_idx as u64, trial as u64]);
    let mut rng = child_rng(seed, &[]);
    let m = cfg.m_grid[m_idx];
    let base = InstanceSpec::new(cfg.n, m, cfg.field)
        .kind(cfg.ensemble)
        .noise(cfg.noise);
    let inst = match cfg.init {
        InitPolicy::AtAngle => {
            let beta = cfg.beta_deg[beta_idx].to_radians();
            gen_instance(&base.approx(ApproxPolicy::AtAngle(beta)), seed, &mut rng)?
        }
        InitPolicy::Initializer { config, init_m } => {
            let extra = init_m.unwrap_or(0);
            let mut spec = base.approx(ApproxPolicy::Random);
            spec.m = m + extra;
            let full = gen_instance(&spec, seed, &mut rng)?;
            let (init_src, target) = if extra > 0 {
                full.ensemble.split_at(extra)?
            } else {
                (full.ensemble.clone(), full.ensemble.clone())
            };
            let xhat = initialize(&init_src, &config, None, &mut rng)?;
            ProblemInstance::new(target, xhat, full.truth)?
        }
    };
    Ok((inst, seed))
}

/// Runs one trial; solver trouble is recorded as a failure, not an error.
pub fn run_trial(cfg: &SweepConfig, beta_idx: usize, m_idx: usize, trial: usize) -> Result<TrialRecord> {
    let (inst, seed) = trial_instance(cfg, beta_idx, m_idx, trial)?;
    let truth = inst.truth.as_ref().expect("sweep instances carry a truth");
    let clock = Stopwatch::start();
    let outcome: Result<(f64, bool, usize)> = match cfg.method {
        Method::PhaseMax => solve_phasemax(&inst, &cfg.solver)
            .map(|r| (r.rre.unwrap_or(f64::INFINITY), r.converged, r.iterations)),
        Method::Bp => recover_via_dual(&inst.ensemble, &inst.xhat, Some(truth), &cfg.solver)
            .map(|r| (r.rre.unwrap_or(f64::INFINITY), r.converged, r.iterations)),
        Method::Gs => gerchberg_saxton(&inst.ensemble, &inst.xhat, Some(truth), &cfg.solver)
            .map(|r| (r.rre.unwrap_or(f64::INFINITY), r.converged, r.iterations)),
    };
    let (e, converged, iterations) = outcome.unwrap_or((f64::INFINITY, false, 0));
    let beta_deg = match cfg.init {
        InitPolicy::AtAngle => cfg.beta_deg[beta_idx],
        InitPolicy::Initializer { .. } => angle_between(truth, &inst.xhat)?.to_degrees(),
    };
    Ok(TrialRecord {
        beta_deg,
        m: cfg.m_grid[m_idx],
        trial,
        seed,
        alpha: accuracy(truth, &inst.xhat)?,
        rre: e,
        success: e < RRE_SUCCESS,
        converged,
        iterations,
        wall_ms: clock.elapsed_ms(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta_deg: f64,
    pub m: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub theory_bound: f64,
}

impl SweepRow {
    /// Binomial standard error of the empirical rate.
    pub fn standard_error(&self) -> f64 {
        (self.rate * (1.0 - self.rate) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let nt = trials as f64;
    let p = successes as f64 / nt;
    let z2 = z * z;
    let denom = 1.0 + z2 / nt;
    let center = (p + z2 / (2.0 * nt)) / denom;
    let half = z * (p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)).sqrt() / denom;
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// All trial records of a sweep, in grid order regardless of scheduling.
pub fn run_sweep_records(cfg: &SweepConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let betas = cfg.betas();
    let tasks: Vec<(usize, usize, usize)> = (0..betas.len())
        .flat_map(|b| {
            (0..cfg.m_grid.len())
                .flat_map(move |mi| (0..cfg.trials_per_cell).map(move |t| (b, mi, t)))
        })
        .collect();
    run_tasks(cfg, &tasks)
}

#[cfg(feature = "parallel")]
fn run_tasks(cfg: &SweepConfig, tasks: &[(usize, usize, usize)]) -> Result<Vec<TrialRecord>> {
    use rayon::prelude::*;
    if cfg.workers <= 1 {
        return tasks.iter().map(|&(b, m, t)| run_trial(cfg, b, m, t)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| {
        tasks
            .par_iter()
            .map(|&(b, m, t)| run_trial(cfg, b, m, t))
            .collect()
    })
}

#[cfg(not(feature = "parallel"))]
fn run_tasks(cfg: &SweepConfig, tasks: &[(usize, usize, usize)]) -> Result<Vec<TrialRecord>> {
    tasks.iter().map(|&(b, m, t)| run_trial(cfg, b, m, t)).collect()
}

/// Folds trial records into one row per `(beta, m)` cell, in grid order.
pub fn aggregate(cfg: &SweepConfig, records: &[TrialRecord]) -> SweepTable {
    let betas = cfg.betas();
    let per_beta = cfg.m_grid.len() * cfg.trials_per_cell;
    let mut rows = Vec::new();
    for (bi, &beta) in betas.iter().enumerate() {
        for (mi, &m) in cfg.m_grid.iter().enumerate() {
            let start = bi * per_beta + mi * cfg.trials_per_cell;
            let cell = &records[start..start + cfg.trials_per_cell];
            let trials = cell.len();
            let successes = cell.iter().filter(|r| r.success).count();
            let (wilson_lo, wilson_hi) = wilson_interval(successes, trials, 1.96);
            let bound_at = |alpha: f64| {
                phasemax_success_bound(m as f64, cfg.n as f64, alpha, cfg.field).value
            };
            let (beta_deg, theory_bound) = if beta.is_nan() {
                // averaging the conditional bound over the observed accuracies
                // still lower-bounds the success probability
                let mean_angle = cell.iter().map(|r| r.beta_deg).sum::<f64>() / trials as f64;
                let mean_bound = cell.iter().map(|r| bound_at(r.alpha)).sum::<f64>() / trials as f64;
                (mean_angle, mean_bound)
            } else {
                (beta, bound_at(1.0 - beta / 90.0))
            };
            rows.push(SweepRow {
                beta_deg,
                m,
                trials,
                successes,
                rate: successes as f64 / trials as f64,
                wilson_lo,
                wilson_hi,
                theory_bound,
            });
        }
    }
    SweepTable { rows }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    let records = run_sweep_records(cfg)?;
    Ok(aggregate(cfg, &records))
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for row in &self.rows {
            wr.serialize(row).map_err(csv_err)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        if self.rows.is_empty() {
            buf.extend_from_slice(CSV_HEADER.as_bytes());
            buf.push(b'\n');
        } else {
            self.write_csv(&mut buf).expect("writing to memory");
        }
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let header: Vec<String> = rd
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(str::to_string)
            .collect();
        if header.join(",") != CSV_HEADER {
            return Err(Error::Format(format!("unexpected csv header `{}`", header.join(","))));
        }
        let rows = rd
            .deserialize()
            .collect::<std::result::Result<Vec<SweepRow>, _>>()
            .map_err(csv_err)?;
        Ok(Self { rows })
    }

    /// Rows of one angle, sorted by `m`.
    pub fn rows_for(&self, beta_deg: f64) -> Vec<&SweepRow> {
        let mut v: Vec<&SweepRow> = self
            .rows
            .iter()
            .filter(|r| (r.beta_deg - beta_deg).abs() < 1e-9)
            .collect();
        v.sort_by_key(|r| r.m);
        v
    }
}

fn csv_err(e: csv::Error) -> Error {
    if e.is_io_error() {
        Error::Io(e.to_string())
    } else {
        Error::Format(e.to_string())
    }
}

/// Cells where `rate + slack * SE` falls below the bound `bound(row)` while
/// that bound is valid (`Some`).
pub fn bound_violations<'a, F>(rows: &[&'a SweepRow], slack: f64, bound: F) -> Vec<&'a SweepRow>
where
    F: Fn(&SweepRow) -> Option<f64>,
{
    rows.iter()
        .copied()
        .filter(|r| match bound(r) {
            Some(b) => r.rate + slack * r.standard_error() < b,
            None => false,
        })
        .collect()
}

/// Linearly interpolated `m` at which the rate first reaches `level`.
pub fn crossing(rows: &[&SweepRow], level: f64) -> Option<f64> {
    let first = rows.first()?;
    if first.rate >= level {
        return Some(first.m as f64);
    }
    rows.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        (a.rate < level && b.rate >= level).then(|| {
            a.m as f64 + (level - a.rate) / (b.rate - a.rate) * (b.m as f64 - a.m as f64)
        })
    })
}

/// Width between the 10% and 90% crossings.
pub fn transition_width(rows: &[&SweepRow]) -> Option<f64> {
    Some(crossing(rows, 0.9)? - crossing(rows, 0.1)?)
}

/// Pairs `(i, j)`, `m_i < m_j`, whose Wilson intervals show a significant drop.
pub fn monotonicity_breaks(rows: &[&SweepRow]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if rows[j].wilson_hi < rows[i].wilson_lo {
                out.push((rows[i].m, rows[j].m));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub items: Vec<SelftestItem>,
}

/// Reduced-scale run of the invariant suite.
pub fn selftest() -> SelftestReport {
    selftest::run()
}

mod selftest {
    use std::f64::consts::FRAC_PI_2;

    use num_bigint::BigUint;
    use num_rational::BigRational;

    use super::*;
    use crate::ensembles::gen_instance_seeded;
    use crate::oracles::{coverage_mc, regions_brute_force, uniqueness_check, CapCenters};
    use crate::seeding::rng_from_seed;
    use crate::solvers::{rre, signal_via_dual, solve_basis_pursuit, solve_phasemax_detailed};
    use crate::theory::{
        binomial_cdf_exact, expected_abs_cos, halfsphere_cover_prob, halfsphere_cover_prob_binomial,
        halfsphere_cover_prob_exact, hoeffding_tail, rational_to_f64, regions_count,
        success_bound_with_constant,
    };

    type Check = fn() -> Result<(bool, String)>;

    pub(super) fn run() -> SelftestReport {
        let checks: [(&str, Check); 8] = [
            ("region_count_vs_sign_patterns", regions),
            ("cover_probability_identity", cover_identity),
            ("semisphere_coverage_monte_carlo", coverage),
            ("hoeffding_dominates_binomial_tail", hoeffding),
            ("abs_cos_brackets", abs_cos),
            ("primal_dual_agreement", duality),
            ("uniqueness_oracle_vs_solver", uniqueness),
            ("success_bound_and_mutation", mini_sweep),
        ];
        let items: Vec<SelftestItem> = checks
            .iter()
            .map(|(name, f)| {
                let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
                SelftestItem {
                    name: name.to_string(),
                    passed,
                    detail,
                }
            })
            .collect();
        SelftestReport {
            passed: items.iter().all(|i| i.passed),
            items,
        }
    }

    fn regions() -> Result<(bool, String)> {
        let mut rng = rng_from_seed(31);
        let mut bad = Vec::new();
        for n in 2..=3 {
            for k in 1..=6 {
                let got = regions_brute_force(n, k, &mut rng, 100_000)?;
                let want = regions_count(n as u64, k as u64)?;
                if BigUint::from(got) != want {
                    bad.push(format!("(n={n},k={k})"));
                }
            }
        }
        Ok((bad.is_empty(), format!("mismatches: {bad:?}")))
    }

    fn cover_identity() -> Result<(bool, String)> {
        for n in 1..=10 {
            for m in 1..=20 {
                if halfsphere_cover_prob_exact(m, n)? != halfsphere_cover_prob_binomial(m, n)? {
                    return Ok((false, format!("identity fails at m={m}, n={n}")));
                }
            }
        }
        Ok((true, "exact for n <= 10, m <= 20".into()))
    }

    fn coverage() -> Result<(bool, String)> {
        let mut rng = rng_from_seed(32);
        let est = coverage_mc(2, 3, &CapCenters::Uniform, FRAC_PI_2, 4000, &Default::default(), &mut rng)?;
        let want = halfsphere_cover_prob(3, 2)?;
        let ok = (est.frequency - want).abs() <= 4.0 * est.standard_error.max(1e-3);
        Ok((ok, format!("estimate {:.4} vs {want:.4}", est.frequency)))
    }

    fn hoeffding() -> Result<(bool, String)> {
        let half = BigRational::new(1.into(), 2.into());
        for m in (10..=60).step_by(10) {
            for n in 0..m / 2 {
                let tail = rational_to_f64(&binomial_cdf_exact(m, n, &half));
                if tail > hoeffding_tail(m as f64, n as f64, 0.5)? * (1.0 + 1e-12) {
                    return Ok((false, format!("violated at m={m}, n={n}")));
                }
            }
        }
        Ok((true, "p = 1/2, m <= 60".into()))
    }

    fn abs_cos() -> Result<(bool, String)> {
        for n in 1..=2000 {
            for f in [Field::Real, Field::Complex] {
                let c = expected_abs_cos(n, f)?;
                if !(c.lower <= c.exact * (1.0 + 1e-12) && c.exact <= c.upper * (1.0 + 1e-12)) {
                    return Ok((false, format!("bracket fails at n={n} ({f})")));
                }
            }
        }
        Ok((true, "n <= 2000, both fields".into()))
    }

    fn duality() -> Result<(bool, String)> {
        let spec = InstanceSpec::new(6, 60, Field::Complex).approx(ApproxPolicy::AtAngle(0.5));
        let inst = gen_instance_seeded(&spec, 33)?;
        let pm = solve_phasemax_detailed(&inst.ensemble, &inst.xhat, inst.truth.as_ref(), &Default::default())?;
        let bp = solve_basis_pursuit(&inst.ensemble, &inst.xhat, &Default::default())?;
        let xbp = signal_via_dual(&inst.ensemble, &bp.z, 1e-6)?.signal;
        let gap = (pm.result.objective - bp.objective).abs() / pm.result.objective.abs();
        let agree = rre(&xbp, &pm.result.x_star, false)?;
        Ok((
            gap <= 1e-4 && agree < 1e-6,
            format!("relative gap {gap:.2e}, rre between routes {agree:.2e}"),
        ))
    }

    fn uniqueness() -> Result<(bool, String)> {
        let mut agree = 0;
        let total = 24;
        for s in 0..total {
            let m = 12 + 2 * s as usize;
            let spec = InstanceSpec::new(4, m, Field::Complex).approx(ApproxPolicy::AtAngle(0.6));
            let inst = gen_instance_seeded(&spec, 100 + s)?;
            let truth = inst.truth.as_ref().expect("generated");
            let unique = !uniqueness_check(&inst.ensemble, truth, &inst.xhat)?.nontrivial;
            let ok = solve_phasemax(&inst, &Default::default())?.success == Some(true);
            agree += usize::from(unique == ok);
        }
        Ok((agree * 100 >= 95 * total as usize, format!("{agree}/{total} verdicts agree")))
    }

    fn mini_sweep() -> Result<(bool, String)> {
        let mut cfg = SweepConfig::new(40, vec![45.0], (260..=440).step_by(20).collect(), 40);
        cfg.workers = std::thread::available_parallelism().map_or(1, |p| p.get());
        cfg.seed = 34;
        let table = run_sweep(&cfg)?;
        let rows = table.rows_for(45.0);
        let n = cfg.n as f64;
        let real = bound_violations(&rows, 3.0, |r| {
            phasemax_success_bound(r.m as f64, n, 0.5, Field::Complex).guarantee()
        });
        let mutated = bound_violations(&rows, 3.0, |r| {
            success_bound_with_constant(r.m as f64, n, 0.5, Field::Complex, 3.0).guarantee()
        });
        Ok((
            real.is_empty() && !mutated.is_empty(),
            format!(
                "{} cells violate the bound, {} violate the 3n variant",
                real.len(),
                mutated.len()
            ),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("400:500:50").unwrap(), vec![400, 450, 500]);
        assert_eq!(parse_grid("7").unwrap(), vec![7]);
        assert!(parse_grid("5:1:1").is_err());
        assert!(parse_grid("1:5:0").is_err());
        assert!(parse_grid("a:b").is_err());
    }

    #[test]
    fn wilson_brackets_rate() {
        for trials in [1, 7, 100] {
            for s in 0..=trials {
                let (lo, hi) = wilson_interval(s, trials, 1.96);
                let p = s as f64 / trials as f64;
                assert!(lo <= p && p <= hi && lo >= 0.0 && hi <= 1.0);
            }
        }
    }

    #[test]
    fn wilson_coverage_near_nominal() {
        use statrs::distribution::{Binomial, Discrete};
        for p in [0.05, 0.2, 0.3, 0.5, 0.8] {
            let dist = Binomial::new(p, 100).unwrap();
            let cov: f64 = (0..=100)
                .filter(|&s| {
                    let (lo, hi) = wilson_interval(s as usize, 100, 1.96);
                    lo <= p && p <= hi
                })
                .map(|s| dist.pmf(s))
                .sum();
            assert!((cov - 0.95).abs() <= 0.02, "coverage {cov} at p = {p}");
        }
    }

    fn small_cfg() -> SweepConfig {
        let mut cfg = SweepConfig::new(4, vec![0.0, 40.0], vec![24, 40], 3);
        cfg.seed = 9;
        cfg
    }

    #[test]
    fn trial_is_deterministic() {
        let cfg = small_cfg();
        let a = run_trial(&cfg, 1, 1, 2).unwrap();
        let b = run_trial(&cfg, 1, 1, 2).unwrap();
        assert_eq!((a.seed, a.rre, a.iterations), (b.seed, b.rre, b.iterations));
    }

    #[test]
    fn zero_angle_always_succeeds() {
        let cfg = small_cfg();
        for mi in 0..2 {
            for t in 0..3 {
                assert!(run_trial(&cfg, 0, mi, t).unwrap().success);
            }
        }
    }

    #[test]
    fn table_is_independent_of_worker_count() {
        let cfg = small_cfg();
        let one = run_sweep(&cfg).unwrap();
        let many = run_sweep(&SweepConfig { workers: 3, ..cfg }).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn csv_round_trip() {
        let table = run_sweep(&small_cfg()).unwrap();
        let text = table.to_csv_string();
        assert!(text.starts_with(CSV_HEADER));
        let back = SweepTable::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, table);
        assert!(SweepTable::read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn crossing_and_width() {
        let mk = |m, rate| SweepRow {
            beta_deg: 0.0,
            m,
            trials: 10,
            successes: 0,
            rate,
            wilson_lo: rate,
            wilson_hi: rate,
            theory_bound: 0.0,
        };
        let rows = [mk(100, 0.0), mk(200, 0.2), mk(300, 1.0)];
        let refs: Vec<&SweepRow> = rows.iter().collect();
        assert_eq!(crossing(&refs, 0.1), Some(150.0));
        assert_eq!(crossing(&refs, 0.9), Some(287.5));
        assert_eq!(transition_width(&refs), Some(137.5));
        assert!(monotonicity_breaks(&refs).is_empty());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = small_cfg();
        cfg.trials_per_cell = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = small_cfg();
        cfg.beta_deg = vec![95.0];
        assert!(cfg.validate().is_err());
        let mut cfg = small_cfg();
        cfg.m_grid.clear();
        assert!(cfg.validate().is_err());
    }
}
