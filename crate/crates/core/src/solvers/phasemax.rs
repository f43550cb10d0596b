//! Restarted primal-dual hybrid gradient for
//!
//! ```text
//! maximize Re<x, xhat>  s.t.  |<a_i, x>| <= b_i.
//! ```
//!
//! Written as `min_x -Re<xhat, x> + g(Ax)` with `g` the indicator of the disc
//! product `{u : |u_i| <= b_i}`. The dual update is the Moreau complement of
//! the radial disc projection, which is a complex soft threshold at `sigma*b_i`.
//! Rows are scaled to unit norm first; this leaves the feasible set unchanged.

use crate::ensembles::{MeasurementEnsemble, ProblemInstance};
use crate::error::{Error, Result};
use crate::linalg::{align, Cx, Field, MeasurementMatrix, Planar, Signal};
use crate::solvers::{RecoveryResult, SolverConfig};
use crate::util::Stopwatch;

const CHECK_EVERY: usize = 64;
const RESTART_SUFFICIENT: f64 = 0.2;
const RESTART_NECESSARY: f64 = 0.8;
const RESTART_ARTIFICIAL: f64 = 0.36;
const WEIGHT_SMOOTHING: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMaxOutput {
    pub result: RecoveryResult,
    /// Dual multipliers `y` with `A^* y = xhat` at optimum; `z = B y` solves the
    /// basis pursuit problem.
    pub dual: Vec<Cx>,
    /// `sum_i b_i |y_i|`.
    pub dual_objective: f64,
}

pub fn solve_phasemax(instance: &ProblemInstance, cfg: &SolverConfig) -> Result<RecoveryResult> {
    solve_phasemax_detailed(&instance.ensemble, &instance.xhat, instance.truth.as_ref(), cfg)
        .map(|o| o.result)
}

#[derive(Clone)]
struct Iterate {
    x: Planar,
    y: Planar,
    ax: Planar,
    aty: Planar,
}

impl Iterate {
    fn zeros(m: usize, n: usize) -> Self {
        Self {
            x: Planar::zeros(n),
            y: Planar::zeros(m),
            ax: Planar::zeros(m),
            aty: Planar::zeros(n),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Kkt {
    max_violation: f64,
    primal_residual: f64,
    dual_residual: f64,
    primal_objective: f64,
    dual_objective: f64,
}

impl Kkt {
    fn gap(&self) -> f64 {
        (self.dual_objective - self.primal_objective).abs()
    }

    fn relative_gap(&self) -> f64 {
        self.gap() / (self.primal_objective.abs() + self.dual_objective.abs()).max(1e-300)
    }

    fn weighted(&self, omega: f64) -> f64 {
        (omega * self.primal_residual.powi(2)
            + self.dual_residual.powi(2) / omega
            + self.gap().powi(2))
        .sqrt()
    }
}

struct Problem {
    a: MeasurementMatrix,
    b: Vec<f64>,
    xhat: Planar,
    xhat_norm: f64,
    real: bool,
}

impl Problem {
    fn kkt(&self, it: &Iterate) -> Kkt {
        let mut max_violation = f64::NEG_INFINITY;
        let mut rp2 = 0.0;
        let mut dual_objective = 0.0;
        for i in 0..self.b.len() {
            let r = it.ax.re[i].hypot(it.ax.im[i]);
            let v = r - self.b[i];
            max_violation = max_violation.max(v);
            if v > 0.0 {
                rp2 += v * v;
            }
            dual_objective += self.b[i] * it.y.re[i].hypot(it.y.im[i]);
        }
        let rd2 = it.aty.dist_sqr(&self.xhat);
        Kkt {
            max_violation,
            primal_residual: rp2.sqrt(),
            dual_residual: rd2.sqrt(),
            primal_objective: it.x.re_dot(&self.xhat),
            dual_objective,
        }
    }

    fn converged(&self, k: &Kkt, tol_feas: f64, tol_obj: f64) -> bool {
        k.max_violation <= tol_feas
            && k.dual_residual <= tol_obj * self.xhat_norm
            && k.relative_gap() <= tol_obj
    }
}

/// Solves PhaseMax for an ensemble and approximation vector; grades against
/// `truth` when given.
pub fn solve_phasemax_detailed(
    ensemble: &MeasurementEnsemble,
    xhat: &Signal,
    truth: Option<&Signal>,
    cfg: &SolverConfig,
) -> Result<PhaseMaxOutput> {
    cfg.validate()?;
    let (m, n) = (ensemble.m(), ensemble.n());
    if xhat.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: xhat.len(),
        });
    }
    let xhat_norm = xhat.norm();
    if xhat_norm == 0.0 {
        return Err(Error::ZeroNorm("solve_phasemax: xhat"));
    }
    if let Some((index, &value)) = ensemble
        .magnitudes
        .iter()
        .enumerate()
        .find(|(_, b)| !(**b >= 0.0))
    {
        return Err(Error::NegativeMagnitude { index, value });
    }
    let clock = Stopwatch::start();

    let row_scale: Vec<f64> = (0..m)
        .map(|i| {
            let r = ensemble.matrix.row_norm(i);
            if r > 0.0 {
                1.0 / r
            } else {
                1.0
            }
        })
        .collect();
    let prob = Problem {
        a: ensemble.matrix.scale_rows(&row_scale),
        b: ensemble
            .magnitudes
            .iter()
            .zip(&row_scale)
            .map(|(b, s)| b * s)
            .collect(),
        xhat: Planar::from_cx(xhat.entries()),
        xhat_norm,
        real: ensemble.field() == Field::Real,
    };
    let tol_feas = cfg.tol_feasibility.map_or_else(
        || cfg.feasibility_tol(&prob.b),
        |t| t,
    );
    // the user-facing tolerance is on the unscaled rows; the scaled violation
    // times the row norm is the true violation
    let max_row_norm = (0..m).map(|i| ensemble.matrix.row_norm(i)).fold(0.0, f64::max);
    let tol_feas_scaled = if cfg.tol_feasibility.is_some() {
        tol_feas / max_row_norm.max(1e-300)
    } else {
        tol_feas
    };

    let op_norm = prob.a.operator_norm(cfg.operator_norm_iters).max(1e-300);
    let eta = cfg.step_product_margin.sqrt() / op_norm;
    let b_norm = prob.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut omega = if cfg.adaptive_primal_weight && b_norm > 0.0 {
        xhat_norm / b_norm
    } else {
        1.0
    };

    let mut cur = Iterate::zeros(m, n);
    let mut next = Iterate::zeros(m, n);
    let mut avg = Iterate::zeros(m, n);
    let mut avg_count = 0usize;
    let mut last_restart = cur.clone();
    let mut kkt_last_restart = prob.kkt(&cur).weighted(omega);
    let mut kkt_prev_candidate = f64::INFINITY;
    let mut since_restart = 0usize;

    let mut best = cur.clone();
    let mut best_kkt = prob.kkt(&cur);
    let mut best_score = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0usize;

    for k in 1..=cfg.max_iters {
        iterations = k;
        let tau = eta / omega;
        let sigma = eta * omega;

        // x+ = x - tau (A^* y - xhat)
        for j in 0..n {
            next.x.re[j] = cur.x.re[j] - tau * (cur.aty.re[j] - prob.xhat.re[j]);
            next.x.im[j] = if prob.real {
                0.0
            } else {
                cur.x.im[j] - tau * (cur.aty.im[j] - prob.xhat.im[j])
            };
        }
        prob.a.apply_planar(&next.x, &mut next.ax);

        // y+ = soft(y + sigma A(2x+ - x), sigma b)
        for i in 0..m {
            let vr = cur.y.re[i] + sigma * (2.0 * next.ax.re[i] - cur.ax.re[i]);
            let vi = cur.y.im[i] + sigma * (2.0 * next.ax.im[i] - cur.ax.im[i]);
            let r = vr.hypot(vi);
            let thr = sigma * prob.b[i];
            if r > thr {
                let s = (r - thr) / r;
                next.y.re[i] = s * vr;
                next.y.im[i] = s * vi;
            } else {
                next.y.re[i] = 0.0;
                next.y.im[i] = 0.0;
            }
        }
        prob.a.adjoint_planar(&next.y, &mut next.aty);
        std::mem::swap(&mut cur, &mut next);
        since_restart += 1;

        if cfg.adaptive_restarts {
            avg_count += 1;
            let w = 1.0 / avg_count as f64;
            for (a, c) in [
                (&mut avg.x, &cur.x),
                (&mut avg.y, &cur.y),
                (&mut avg.ax, &cur.ax),
                (&mut avg.aty, &cur.aty),
            ] {
                for (p, q) in a.re.iter_mut().zip(&c.re) {
                    *p += w * (q - *p);
                }
                for (p, q) in a.im.iter_mut().zip(&c.im) {
                    *p += w * (q - *p);
                }
            }
        }

        if k % 8 != 0 && k != cfg.max_iters {
            continue;
        }
        let kc = prob.kkt(&cur);
        if prob.converged(&kc, tol_feas_scaled, cfg.tol_objective) {
            best = cur.clone();
            best_kkt = kc;
            converged = true;
            break;
        }
        if k % CHECK_EVERY != 0 {
            continue;
        }
        let score_cur = kc.weighted(omega);
        let (cand_is_avg, cand_kkt, cand_score) = if cfg.adaptive_restarts {
            let ka = prob.kkt(&avg);
            if prob.converged(&ka, tol_feas_scaled, cfg.tol_objective) {
                best = avg.clone();
                best_kkt = ka;
                converged = true;
                break;
            }
            let sa = ka.weighted(omega);
            if sa < score_cur {
                (true, ka, sa)
            } else {
                (false, kc, score_cur)
            }
        } else {
            (false, kc, score_cur)
        };
        if cand_score < best_score {
            best_score = cand_score;
            best_kkt = cand_kkt;
            best = if cand_is_avg { avg.clone() } else { cur.clone() };
        }
        if !cfg.adaptive_restarts {
            continue;
        }
        let restart = cand_score <= RESTART_SUFFICIENT * kkt_last_restart
            || (cand_score <= RESTART_NECESSARY * kkt_last_restart
                && cand_score > kkt_prev_candidate)
            || since_restart as f64 >= RESTART_ARTIFICIAL * k as f64;
        kkt_prev_candidate = cand_score;
        if restart {
            if cand_is_avg {
                cur = avg.clone();
            }
            if cfg.adaptive_primal_weight {
                let dx = cur.x.dist_sqr(&last_restart.x).sqrt();
                let dy = cur.y.dist_sqr(&last_restart.y).sqrt();
                if dx > 1e-10 && dy > 1e-10 {
                    omega = (WEIGHT_SMOOTHING * (dy / dx).ln()
                        + (1.0 - WEIGHT_SMOOTHING) * omega.ln())
                    .exp();
                }
            }
            last_restart = cur.clone();
            kkt_last_restart = prob.kkt(&cur).weighted(omega);
            kkt_prev_candidate = f64::INFINITY;
            avg = cur.clone();
            avg_count = 1;
            since_restart = 0;
        }
    }

    // back to unscaled coordinates: y_orig = D y_scaled
    let dual: Vec<Cx> = (0..m).map(|i| best.y.get(i) * row_scale[i]).collect();
    let mut x = best.x.to_cx();
    if prob.real {
        x.iter_mut().for_each(|z| z.im = 0.0);
    }
    let x = align(&Signal::new(x, ensemble.field())?, xhat)?;
    let ax = ensemble.matrix.apply(&x);
    let max_violation = ax
        .iter()
        .zip(&ensemble.magnitudes)
        .map(|(z, b)| z.norm() - b)
        .fold(f64::NEG_INFINITY, f64::max);
    let objective = crate::linalg::inner(&x, xhat)?.re;
    let mut result = RecoveryResult {
        x_star: x,
        iterations,
        max_constraint_violation: max_violation.max(0.0),
        objective,
        dual_residual: best_kkt.dual_residual / xhat_norm,
        relative_gap: best_kkt.relative_gap(),
        rre: None,
        success: None,
        converged,
        wall_ms: clock.elapsed_ms(),
    };
    result.grade(truth, false)?;
    Ok(PhaseMaxOutput {
        result,
        dual,
        dual_objective: best_kkt.dual_objective,
    })
}
