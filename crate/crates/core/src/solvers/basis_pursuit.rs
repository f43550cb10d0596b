//! The basis pursuit dual `min ||z||_1 s.t. xhat = sum_i a_i z_i / b_i`,
//! solved by a diagonally preconditioned primal-dual splitting with restarts,
//! and phase recovery from its solution.

use crate::ensembles::MeasurementEnsemble;
use crate::error::{Error, Result};
use crate::linalg::{phase, Cx, Field, Planar, Signal};
use crate::solvers::least_squares::{solve_normal_equations, LeastSquares};
use crate::solvers::{RecoveryResult, SolverConfig};
use crate::util::Stopwatch;

const CHECK_EVERY: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub z: Vec<Cx>,
    /// `||A B^{-1} z - xhat||`.
    pub residual: f64,
    /// `||z||_1`.
    pub objective: f64,
    /// `max_i (|<a_i, x>| / b_i - 1)_+` for the multiplier `x` of the equality.
    pub dual_violation: f64,
    pub relative_gap: f64,
    /// Multiplier of the equality constraint; it solves the primal program.
    pub multiplier: Signal,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone)]
struct State {
    z: Planar,
    w: Planar,
    mz: Planar,
    mtw: Planar,
}

struct Kkt {
    residual: f64,
    violation_max: f64,
    violation: f64,
    l1: f64,
    gap: f64,
}

impl Kkt {
    fn relative_gap(&self, xhat_obj: f64) -> f64 {
        self.gap / (self.l1.abs() + xhat_obj.abs()).max(1e-300)
    }
}

/// Solves the basis pursuit problem; every `b_i` must be positive.
pub fn solve_basis_pursuit(
    ensemble: &MeasurementEnsemble,
    xhat: &Signal,
    cfg: &SolverConfig,
) -> Result<DualSolution> {
    cfg.validate()?;
    let (m, n, field) = (ensemble.m(), ensemble.n(), ensemble.field());
    if xhat.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: xhat.len(),
        });
    }
    if let Some(index) = ensemble.magnitudes.iter().position(|&b| !(b > 0.0)) {
        return Err(Error::SingularMagnitudes { index });
    }
    let xhat_norm = xhat.norm();
    if xhat_norm == 0.0 {
        return Ok(DualSolution {
            z: vec![Cx::new(0.0, 0.0); m],
            residual: 0.0,
            objective: 0.0,
            dual_violation: 0.0,
            relative_gap: 0.0,
            multiplier: Signal::zeros(n, field),
            iterations: 0,
            converged: true,
        });
    }
    let real = field == Field::Real;
    let inv_b: Vec<f64> = ensemble.magnitudes.iter().map(|b| 1.0 / b).collect();
    // rows of `a` are a_i / b_i: `M z = a.adjoint(z)`, `M^* w = a.apply(w)`
    let a = ensemble.matrix.scale_rows(&inv_b);
    let xh = Planar::from_cx(xhat.entries());

    let mut row_abs = vec![0.0; m];
    let mut col_abs = vec![0.0; n];
    for (i, ra) in row_abs.iter_mut().enumerate() {
        for (k, ca) in col_abs.iter_mut().enumerate() {
            let v = a.entry(i, k).norm();
            *ra += v;
            *ca += v;
        }
    }
    let margin = cfg.step_product_margin.sqrt();
    let tau: Vec<f64> = row_abs.iter().map(|s| margin / s.max(1e-300)).collect();
    let sigma: Vec<f64> = col_abs.iter().map(|s| margin / s.max(1e-300)).collect();
    let tol_res = cfg.tol_feasibility.unwrap_or(1e-9 * xhat_norm);
    let tol = cfg.tol_objective;

    let kkt = |s: &State| -> Kkt {
        let residual = s.mz.dist_sqr(&xh).sqrt();
        let mut violation_max: f64 = 0.0;
        let mut v2 = 0.0;
        let mut l1 = 0.0;
        for i in 0..m {
            let v = (s.mtw.re[i].hypot(s.mtw.im[i]) - 1.0).max(0.0);
            violation_max = violation_max.max(v);
            v2 += v * v;
            l1 += s.z.re[i].hypot(s.z.im[i]);
        }
        Kkt {
            residual,
            violation_max,
            violation: v2.sqrt(),
            l1,
            gap: (l1 + s.w.re_dot(&xh)).abs(),
        }
    };
    let done = |k: &Kkt| {
        k.residual <= tol_res && k.violation_max <= tol && k.relative_gap(k.l1) <= tol
    };
    let score = |k: &Kkt, omega: f64| {
        (omega * k.residual.powi(2) + k.violation.powi(2) / omega + k.gap.powi(2)).sqrt()
    };

    let zero = State {
        z: Planar::zeros(m),
        w: Planar::zeros(n),
        mz: Planar::zeros(n),
        mtw: Planar::zeros(m),
    };
    let mut cur = zero.clone();
    let mut next = zero.clone();
    let mut avg = zero.clone();
    let mut avg_count = 0usize;
    let mut anchor = zero;
    let mut omega = 1.0;
    let mut score_anchor = score(&kkt(&cur), omega);
    let mut score_prev = f64::INFINITY;
    let mut since = 0usize;
    let mut best = cur.clone();
    let mut best_score = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    for k in 1..=cfg.max_iters {
        iterations = k;
        for i in 0..m {
            let t = tau[i] / omega;
            let vr = cur.z.re[i] - t * cur.mtw.re[i];
            let vi = if real { 0.0 } else { cur.z.im[i] - t * cur.mtw.im[i] };
            let r = vr.hypot(vi);
            let s = if r > t { (r - t) / r } else { 0.0 };
            next.z.re[i] = s * vr;
            next.z.im[i] = s * vi;
        }
        a.adjoint_planar(&next.z, &mut next.mz);
        for j in 0..n {
            let sg = sigma[j] * omega;
            next.w.re[j] = cur.w.re[j] + sg * (2.0 * next.mz.re[j] - cur.mz.re[j] - xh.re[j]);
            next.w.im[j] = if real {
                0.0
            } else {
                cur.w.im[j] + sg * (2.0 * next.mz.im[j] - cur.mz.im[j] - xh.im[j])
            };
        }
        a.apply_planar(&next.w, &mut next.mtw);
        std::mem::swap(&mut cur, &mut next);
        since += 1;

        if cfg.adaptive_restarts {
            avg_count += 1;
            let wgt = 1.0 / avg_count as f64;
            for (p, q) in [
                (&mut avg.z, &cur.z),
                (&mut avg.w, &cur.w),
                (&mut avg.mz, &cur.mz),
                (&mut avg.mtw, &cur.mtw),
            ] {
                for (u, v) in p.re.iter_mut().zip(&q.re).chain(p.im.iter_mut().zip(&q.im)) {
                    *u += wgt * (v - *u);
                }
            }
        }
        if k % 8 != 0 && k != cfg.max_iters {
            continue;
        }
        let kc = kkt(&cur);
        if done(&kc) {
            best = cur.clone();
            converged = true;
            break;
        }
        if k % CHECK_EVERY != 0 {
            continue;
        }
        let sc = score(&kc, omega);
        let (use_avg, cand) = if cfg.adaptive_restarts {
            let ka = kkt(&avg);
            if done(&ka) {
                best = avg.clone();
                converged = true;
                break;
            }
            let sa = score(&ka, omega);
            if sa < sc {
                (true, sa)
            } else {
                (false, sc)
            }
        } else {
            (false, sc)
        };
        if cand < best_score {
            best_score = cand;
            best = if use_avg { avg.clone() } else { cur.clone() };
        }
        if !cfg.adaptive_restarts {
            continue;
        }
        let restart = cand <= 0.2 * score_anchor
            || (cand <= 0.8 * score_anchor && cand > score_prev)
            || since as f64 >= 0.36 * k as f64;
        score_prev = cand;
        if restart {
            if use_avg {
                cur = avg.clone();
            }
            if cfg.adaptive_primal_weight {
                let dz = cur.z.dist_sqr(&anchor.z).sqrt();
                let dw = cur.w.dist_sqr(&anchor.w).sqrt();
                if dz > 1e-12 && dw > 1e-12 {
                    omega = (0.5 * (dw / dz).ln() + 0.5 * omega.ln()).exp();
                }
            }
            anchor = cur.clone();
            score_anchor = score(&kkt(&cur), omega);
            score_prev = f64::INFINITY;
            avg = cur.clone();
            avg_count = 1;
            since = 0;
        }
    }

    let kb = kkt(&best);
    let mut x = best.w.clone();
    x.re.iter_mut().chain(x.im.iter_mut()).for_each(|v| *v = -*v);
    Ok(DualSolution {
        z: best.z.to_cx(),
        residual: kb.residual,
        objective: kb.l1,
        dual_violation: kb.violation_max,
        relative_gap: kb.relative_gap(kb.l1),
        multiplier: Signal::new(x.to_cx(), field)?,
        iterations,
        converged,
    })
}

/// `y_i = phase(z_i) b_i`.
pub fn recover_phases_from_dual(z: &[Cx], b: &[f64]) -> Result<Vec<Cx>> {
    if z.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: b.len(),
            got: z.len(),
        });
    }
    Ok(z.iter().zip(b).map(|(&zi, &bi)| phase(zi) * bi).collect())
}

/// Reconstructs the signal from a basis pursuit solution by least squares over
/// the rows where `|z_i| > support_tol * max_i |z_i|`; off-support phases carry
/// no information.
pub fn signal_via_dual(
    ensemble: &MeasurementEnsemble,
    z: &[Cx],
    support_tol: f64,
) -> Result<LeastSquares> {
    let y = recover_phases_from_dual(z, &ensemble.magnitudes)?;
    let zmax = z.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let support: Vec<usize> = (0..z.len())
        .filter(|&i| z[i].norm() > support_tol * zmax)
        .collect();
    if support.len() < ensemble.n() {
        return Err(Error::Regime(format!(
            "dual support has {} rows, fewer than n = {}",
            support.len(),
            ensemble.n()
        )));
    }
    let sub = ensemble.matrix.select_rows(&support)?;
    let ys: Vec<Cx> = support.iter().map(|&i| y[i]).collect();
    solve_normal_equations(&sub, &ys, None)
}

/// Full dual route: solve the basis pursuit program, read the phases off `z`,
/// and fit the signal on the dual support. Falls back to the equality
/// multiplier when the support is too small for a least-squares fit.
pub fn recover_via_dual(
    ensemble: &MeasurementEnsemble,
    xhat: &Signal,
    truth: Option<&Signal>,
    cfg: &SolverConfig,
) -> Result<RecoveryResult> {
    let clock = Stopwatch::start();
    let dual = solve_basis_pursuit(ensemble, xhat, cfg)?;
    let x = match signal_via_dual(ensemble, &dual.z, 1e-6) {
        Ok(ls) => ls.signal,
        Err(Error::Regime(_)) => dual.multiplier.clone(),
        Err(e) => return Err(e),
    };
    let ax = ensemble.matrix.apply(&x);
    let violation = ax
        .iter()
        .zip(&ensemble.magnitudes)
        .map(|(v, &b)| v.norm() - b)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out = RecoveryResult {
        x_star: x,
        iterations: dual.iterations,
        max_constraint_violation: violation.max(0.0),
        objective: dual.objective,
        dual_residual: dual.residual,
        relative_gap: dual.relative_gap,
        rre: None,
        success: None,
        converged: dual.converged,
        wall_ms: clock.elapsed_ms(),
    };
    out.grade(truth, false)?;
    Ok(out)
}
