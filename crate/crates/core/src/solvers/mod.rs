//! Solvers for the PhaseMax program, its basis pursuit dual, and the
//! Gerchberg–Saxton alternating-projection baseline.

mod basis_pursuit;
mod gerchberg_saxton;
mod least_squares;
mod phasemax;

pub use basis_pursuit::{
    recover_phases_from_dual, recover_via_dual, signal_via_dual, solve_basis_pursuit, DualSolution,
};
pub use gerchberg_saxton::{gerchberg_saxton, measurement_misfit};
pub use least_squares::{signal_from_phases, LeastSquares};
pub use phasemax::{solve_phasemax, solve_phasemax_detailed, PhaseMaxOutput};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{align, Signal};

/// Success threshold on the relative reconstruction error.
pub const RRE_SUCCESS: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Absolute bound on `max_i |<a_i, x>| - b_i`. `None` means
    /// `tol_objective * max(b)`.
    pub tol_feasibility: Option<f64>,
    /// Relative tolerance on the dual residual and the primal-dual gap.
    pub tol_objective: f64,
    /// Bound on `tau * sigma * ||A||^2`.
    pub step_product_margin: f64,
    pub operator_norm_iters: usize,
    /// Restart the splitting from its running average when the KKT error stalls.
    pub adaptive_restarts: bool,
    /// Rebalance primal and dual step sizes at restarts.
    pub adaptive_primal_weight: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 50_000,
            tol_feasibility: None,
            tol_objective: 1e-9,
            step_product_margin: 0.95,
            operator_norm_iters: 200,
            adaptive_restarts: true,
            adaptive_primal_weight: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_objective > 0.0) || self.tol_feasibility.is_some_and(|t| !(t > 0.0)) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if !(self.step_product_margin > 0.0 && self.step_product_margin < 1.0) {
            return Err(Error::InvalidParameter(
                "step product margin must lie in (0, 1)".into(),
            ));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn feasibility_tol(&self, b: &[f64]) -> f64 {
        self.tol_feasibility.unwrap_or_else(|| {
            let bmax = b.iter().cloned().fold(0.0, f64::max);
            self.tol_objective * bmax.max(f64::MIN_POSITIVE)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    #[serde(with = "crate::io::signal_serde")]
    pub x_star: Signal,
    pub iterations: usize,
    pub max_constraint_violation: f64,
    /// `Re<x_star, xhat>` for PhaseMax; the measurement misfit for Gerchberg–Saxton.
    pub objective: f64,
    pub dual_residual: f64,
    pub relative_gap: f64,
    pub rre: Option<f64>,
    pub success: Option<bool>,
    pub converged: bool,
    pub wall_ms: f64,
}

impl RecoveryResult {
    pub(crate) fn grade(&mut self, truth: Option<&Signal>, phase_align: bool) -> Result<()> {
        if let Some(t) = truth {
            let e = rre(&self.x_star, t, phase_align)?;
            self.rre = Some(e);
            self.success = Some(e < RRE_SUCCESS);
        }
        Ok(())
    }
}

/// Relative reconstruction error `||x0 - x||^2 / ||x0||^2`, optionally after
/// removing the global phase of `x` relative to `truth`.
pub fn rre(x: &Signal, truth: &Signal, phase_align: bool) -> Result<f64> {
    let t2 = truth.norm_sqr();
    if t2 == 0.0 {
        return Err(Error::ZeroNorm("rre: truth"));
    }
    let x = if phase_align { align(x, truth)? } else { x.clone() };
    Ok(x.sub(truth)?.norm_sqr() / t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Cx, Field};

    #[test]
    fn rre_examples() {
        let t = Signal::complex(vec![Cx::new(1.0, -0.5), Cx::new(0.2, 0.3)]);
        assert_eq!(rre(&t, &t, false).unwrap(), 0.0);
        assert!(rre(&t.scale_real(-1.0), &t, true).unwrap() < 1e-30);
        assert!(rre(&t.scale(Cx::new(0.0, 1.0)), &t, true).unwrap() < 1e-30);
        assert_eq!(rre(&Signal::zeros(2, Field::Complex), &t, false).unwrap(), 1.0);
        assert!(rre(&t, &Signal::zeros(2, Field::Complex), false).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            step_product_margin: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            tol_objective: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
