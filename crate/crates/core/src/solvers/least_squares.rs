//! Least-squares inversion of `<a_i, x> = y_i` by conjugate gradients on the
//! normal equations.

use crate::ensembles::MeasurementEnsemble;
use crate::error::{Error, Result};
use crate::linalg::{Cx, Field, MeasurementMatrix, Planar, Signal};

const LS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub signal: Signal,
    /// `||A^*(Ax - y)|| / ||A^* y||` at exit.
    pub normal_residual: f64,
    pub iterations: usize,
}

impl LeastSquares {
    /// True when CG reached its tolerance; a large residual signals rank deficiency.
    pub fn converged(&self) -> bool {
        self.normal_residual <= 1e-10
    }
}

/// Minimizes `sum_i |<a_i, x> - y_i|^2` over the ensemble's field.
pub fn signal_from_phases(ensemble: &MeasurementEnsemble, y: &[Cx]) -> Result<LeastSquares> {
    solve_normal_equations(&ensemble.matrix, y, None)
}

fn project_field(v: &mut Planar, field: Field) {
    if field == Field::Real {
        v.im.iter_mut().for_each(|z| *z = 0.0);
    }
}

pub(crate) fn solve_normal_equations(
    a: &MeasurementMatrix,
    y: &[Cx],
    warm: Option<&Signal>,
) -> Result<LeastSquares> {
    let (m, n, field) = (a.rows(), a.cols(), a.field());
    if y.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: y.len(),
        });
    }
    if m < n {
        return Err(Error::InvalidParameter(format!(
            "least squares needs m >= n (m = {m}, n = {n})"
        )));
    }
    let mut rhs = Planar::zeros(n);
    a.adjoint_planar(&Planar::from_cx(y), &mut rhs);
    project_field(&mut rhs, field);
    let rhs_norm = rhs.norm();
    if rhs_norm == 0.0 {
        return Ok(LeastSquares {
            signal: Signal::zeros(n, field),
            normal_residual: 0.0,
            iterations: 0,
        });
    }

    let mut ax = Planar::zeros(m);
    let mut x = match warm {
        Some(w) if w.len() == n => Planar::from_cx(w.entries()),
        _ => Planar::zeros(n),
    };
    project_field(&mut x, field);
    let mut r = Planar::zeros(n);
    a.apply_planar(&x, &mut ax);
    a.adjoint_planar(&ax, &mut r);
    project_field(&mut r, field);
    for k in 0..n {
        r.re[k] = rhs.re[k] - r.re[k];
        r.im[k] = rhs.im[k] - r.im[k];
    }
    let mut p = r.clone();
    let mut q = Planar::zeros(n);
    let mut rr = r.norm_sqr();
    let max_iters = 4 * field.real_dim(n) + 50;
    let mut iterations = 0;
    while rr.sqrt() > LS_TOL * rhs_norm && iterations < max_iters {
        a.apply_planar(&p, &mut ax);
        a.adjoint_planar(&ax, &mut q);
        project_field(&mut q, field);
        let pq = p.re_dot(&q);
        if !(pq > 0.0) {
            break;
        }
        let step = rr / pq;
        x.axpy(step, &p);
        r.axpy(-step, &q);
        let rr_new = r.norm_sqr();
        let beta = rr_new / rr;
        rr = rr_new;
        for k in 0..n {
            p.re[k] = r.re[k] + beta * p.re[k];
            p.im[k] = r.im[k] + beta * p.im[k];
        }
        iterations += 1;
    }
    Ok(LeastSquares {
        signal: Signal::new(x.to_cx(), field)?,
        normal_residual: rr.sqrt() / rhs_norm,
        iterations,
    })
}
