//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Every export takes plain numbers and returns a JSON string, so the page
//! needs no generated TypeScript glue beyond `wasm-bindgen --target web`.

use phasemax::ensembles::{gen_instance_seeded, ApproxPolicy, InstanceSpec};
use phasemax::oracles::{coverage_mc, CapCenters, CoverageConfig};
use phasemax::seeding::rng_from_seed;
use phasemax::solvers::{solve_phasemax, SolverConfig};
use phasemax::theory::{halfsphere_cover_prob, phasemax_success_bound};
use phasemax::Field;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_DEMO_N: usize = 64;
const MAX_DEMO_M: usize = 1024;

fn field_of(complex: bool) -> Field {
    if complex {
        Field::Complex
    } else {
        Field::Real
    }
}

#[derive(Debug, Serialize)]
pub struct BoundPoint {
    pub m: usize,
    pub bound: f64,
    pub valid: bool,
}

/// Success bound as a function of `m` for fixed `n` and angle.
pub fn bound_curve_points(
    n: usize,
    complex: bool,
    beta_deg: f64,
    m_max: usize,
) -> Result<Vec<BoundPoint>, String> {
    if n == 0 || !(0.0..90.0).contains(&beta_deg) {
        return Err("need n >= 1 and 0 <= beta < 90".into());
    }
    let alpha = 1.0 - beta_deg / 90.0;
    let step = (m_max / 200).max(1);
    Ok((n..=m_max.max(n))
        .step_by(step)
        .map(|m| {
            let b = phasemax_success_bound(m as f64, n as f64, alpha, field_of(complex));
            BoundPoint {
                m,
                bound: b.value,
                valid: b.valid,
            }
        })
        .collect())
}

#[derive(Debug, Serialize)]
pub struct CoverReport {
    pub exact: f64,
    pub frequency: f64,
    pub standard_error: f64,
    pub trials: usize,
}

/// Probability that `m` random hemispheres cover the sphere of `R^n`, exact
/// and by simulation.
pub fn cover_report(m: usize, n: usize, trials: usize, seed: u64) -> Result<CoverReport, String> {
    if n == 0 || n > 8 || m == 0 || m > 64 || trials == 0 || trials > 20_000 {
        return Err("demo limits: 1 <= n <= 8, 1 <= m <= 64, 1 <= trials <= 20000".into());
    }
    let exact = halfsphere_cover_prob(m as u64, n as u64).map_err(|e| e.to_string())?;
    let mut rng = rng_from_seed(seed);
    let est = coverage_mc(
        n,
        m,
        &CapCenters::Uniform,
        std::f64::consts::FRAC_PI_2,
        trials,
        &CoverageConfig::default(),
        &mut rng,
    )
    .map_err(|e| e.to_string())?;
    Ok(CoverReport {
        exact,
        frequency: est.frequency,
        standard_error: est.standard_error,
        trials,
    })
}

#[derive(Debug, Serialize)]
pub struct RecoverReport {
    pub rre: f64,
    pub success: bool,
    pub iterations: usize,
    pub converged: bool,
    pub truth_re: Vec<f64>,
    pub recovered_re: Vec<f64>,
}

/// Generates one instance and solves it.
pub fn recover_report(
    n: usize,
    m: usize,
    complex: bool,
    beta_deg: f64,
    seed: u64,
) -> Result<RecoverReport, String> {
    if n == 0 || n > MAX_DEMO_N || m < n || m > MAX_DEMO_M || !(0.0..90.0).contains(&beta_deg) {
        return Err(format!(
            "demo limits: 1 <= n <= {MAX_DEMO_N}, n <= m <= {MAX_DEMO_M}, 0 <= beta < 90"
        ));
    }
    let spec = InstanceSpec::new(n, m, field_of(complex))
        .approx(ApproxPolicy::AtAngle(beta_deg.to_radians()));
    let inst = gen_instance_seeded(&spec, seed).map_err(|e| e.to_string())?;
    let cfg = SolverConfig {
        max_iters: 20_000,
        tol_objective: 1e-7,
        ..SolverConfig::default()
    };
    let res = solve_phasemax(&inst, &cfg).map_err(|e| e.to_string())?;
    let truth = inst.truth.as_ref().ok_or("instance without truth")?;
    let aligned = phasemax::align(&res.x_star, truth).map_err(|e| e.to_string())?;
    Ok(RecoverReport {
        rre: res.rre.unwrap_or(f64::INFINITY),
        success: res.success.unwrap_or(false),
        iterations: res.iterations,
        converged: res.converged,
        truth_re: truth.entries().iter().map(|z| z.re).collect(),
        recovered_re: aligned.entries().iter().map(|z| z.re).collect(),
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn bound_curve(n: usize, complex: bool, beta_deg: f64, m_max: usize) -> Result<String, JsValue> {
    to_js(bound_curve_points(n, complex, beta_deg, m_max))
}

#[wasm_bindgen]
pub fn cover(m: usize, n: usize, trials: usize, seed: u32) -> Result<String, JsValue> {
    to_js(cover_report(m, n, trials, seed as u64))
}

#[wasm_bindgen]
pub fn recover(n: usize, m: usize, complex: bool, beta_deg: f64, seed: u32) -> Result<String, JsValue> {
    to_js(recover_report(n, m, complex, beta_deg, seed as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_is_monotone_in_m() {
        let pts = bound_curve_points(20, true, 30.0, 400).unwrap();
        assert!(pts.windows(2).all(|w| w[1].bound >= w[0].bound - 1e-12));
        assert!(pts.last().unwrap().bound > 0.9);
    }

    #[test]
    fn cover_exact_and_simulated_agree() {
        let r = cover_report(6, 3, 4000, 1).unwrap();
        assert!((r.exact - r.frequency).abs() < 4.0 * r.standard_error.max(1e-3));
    }

    #[test]
    fn small_recovery_succeeds() {
        let r = recover_report(8, 80, true, 20.0, 4).unwrap();
        assert!(r.success, "rre {}", r.rre);
        assert_eq!(r.truth_re.len(), 8);
    }

    #[test]
    fn limits_are_enforced() {
        assert!(recover_report(8, 4, true, 20.0, 4).is_err());
        assert!(cover_report(6, 30, 10, 1).is_err());
        assert!(bound_curve_points(5, false, 95.0, 50).is_err());
    }
}
