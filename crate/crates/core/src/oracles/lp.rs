//! Dense tableau simplex. Problems are set up with an identity starting basis
//! and nonnegative right-hand side, so no phase one is needed. Pricing is
//! Dantzig's rule; after a run of degenerate pivots it drops to Bland's rule,
//! which cannot cycle, until the objective moves again. Reduced costs are
//! compared against a tolerance scaled by the column, since entries can grow
//! by orders of magnitude after pivoting on nearly parallel rows.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const DEGENERATE_RUN: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

/// Minimization tableau: constraint rows, then the reduced-cost row whose
/// last entry is minus the objective value.
struct Tableau {
    t: Vec<f64>,
    rows: usize,
    cols: usize,
    basis: Vec<usize>,
    /// The objective is known to be bounded, so a failed ratio test is roundoff.
    bounded: bool,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn cost(&self, j: usize) -> f64 {
        self.at(self.rows, j)
    }

    fn column_scale(&self, j: usize) -> f64 {
        (0..self.rows).map(|i| self.at(i, j).abs()).fold(1.0, f64::max)
    }

    fn solve(&mut self) -> Result<usize> {
        let max_pivots = 50 * (self.cols + self.rows) + 1000;
        let mut pivots = 0;
        let mut stalled = 0;
        let mut blocked = vec![false; self.cols];
        loop {
            let candidates = (0..self.cols)
                .filter(|&j| !blocked[j] && self.cost(j) < -PIVOT_EPS * self.column_scale(j));
            let enter = if stalled < DEGENERATE_RUN {
                candidates.min_by(|&i, &j| self.cost(i).total_cmp(&self.cost(j)))
            } else {
                candidates.min()
            };
            let Some(enter) = enter else {
                return Ok(pivots);
            };
            let mut leave: Option<usize> = None;
            let mut best = f64::INFINITY;
            for i in 0..self.rows {
                let aij = self.at(i, enter);
                if aij > PIVOT_EPS {
                    let ratio = self.rhs(i) / aij;
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            ratio < best - 1e-14
                                || (ratio <= best + 1e-14 && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        best = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else {
                if self.bounded {
                    blocked[enter] = true;
                    continue;
                }
                return Err(Error::Regime("linear program is unbounded".into()));
            };
            if best <= 1e-14 {
                stalled += 1;
            } else {
                stalled = 0;
            }
            self.pivot(r, enter);
            blocked.fill(false);
            pivots += 1;
            if pivots > max_pivots {
                return Err(Error::Regime("simplex pivot limit reached".into()));
            }
        }
    }

    fn pivot(&mut self, r: usize, enter: usize) {
        let w = self.width();
        let piv = self.t[r * w + enter];
        for v in &mut self.t[r * w..(r + 1) * w] {
            *v /= piv;
        }
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..=self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + enter];
            if f != 0.0 {
                for (v, p) in self.t[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        self.basis[r] = enter;
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.cols];
        for (i, &bv) in self.basis.iter().enumerate() {
            x[bv] = self.rhs(i);
        }
        x
    }
}

/// `max c.x s.t. Ax <= b, x >= 0` with `b >= 0`, started from the slack basis.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let nv = c.len();
    let nc = a.len();
    if b.len() != nc {
        return Err(Error::DimensionMismatch {
            expected: nc,
            got: b.len(),
        });
    }
    if let Some(row) = a.iter().find(|r| r.len() != nv) {
        return Err(Error::DimensionMismatch {
            expected: nv,
            got: row.len(),
        });
    }
    if b.iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::InvalidParameter("simplex start needs b >= 0".into()));
    }
    let cols = nv + nc;
    let width = cols + 1;
    let mut t = vec![0.0; (nc + 1) * width];
    for i in 0..nc {
        let row = &mut t[i * width..(i + 1) * width];
        row[..nv].copy_from_slice(&a[i]);
        row[nv + i] = 1.0;
        row[cols] = b[i];
    }
    for j in 0..nv {
        t[nc * width + j] = -c[j];
    }
    let mut tab = Tableau {
        t,
        rows: nc,
        cols,
        basis: (nv..nv + nc).collect(),
        bounded: false,
    };
    let pivots = tab.solve()?;
    let mut x = tab.primal();
    x.truncate(nv);
    Ok(LpSolution {
        objective: c.iter().zip(&x).map(|(a, b)| a * b).sum(),
        x,
        pivots,
    })
}

/// Maximizes `g.v` over `{v : G v <= 0, -1 <= v <= 1}`.
///
/// Solved through the dual `min ||g - G^T lambda||_1` over `lambda >= 0`,
/// written as `G^T lambda + s - t = g` with `s, t >= 0`. Its identity basis
/// (`s_j` or `t_j` by the sign of `g_j`) is nondegenerate for generic `g`,
/// unlike the primal, where every cone row is tight at the origin. The
/// maximizer is read off the reduced costs: `v_j = 1 - cost(s_j)`.
pub(crate) fn cone_box_max(g: &[f64], rows: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let d = g.len();
    let k = rows.len();
    if let Some(r) = rows.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: r.len(),
        });
    }
    let cols = k + 2 * d;
    let width = cols + 1;
    let mut t = vec![0.0; (d + 1) * width];
    let mut basis = Vec::with_capacity(d);
    for j in 0..d {
        let sigma = if g[j] >= 0.0 { 1.0 } else { -1.0 };
        let row = &mut t[j * width..(j + 1) * width];
        for (i, r) in rows.iter().enumerate() {
            row[i] = sigma * r[j];
        }
        row[k + j] = sigma;
        row[k + d + j] = -sigma;
        row[cols] = sigma * g[j];
        basis.push(if sigma > 0.0 { k + j } else { k + d + j });
    }
    // reduced costs c - 1^T A for unit costs on s and t
    for col in 0..width {
        let c = if (k..k + 2 * d).contains(&col) { 1.0 } else { 0.0 };
        let s: f64 = (0..d).map(|j| t[j * width + col]).sum();
        t[d * width + col] = c - s;
    }
    let mut tab = Tableau {
        t,
        rows: d,
        cols,
        basis,
        bounded: true,
    };
    tab.solve()?;
    let value = -tab.rhs(d);
    let v: Vec<f64> = (0..d).map(|j| (1.0 - tab.cost(k + j)).clamp(-1.0, 1.0)).collect();
    Ok((value, v))
}
