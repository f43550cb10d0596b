//! Independent checkers: the cone condition for uniqueness of the PhaseMax
//! solution, Monte Carlo cap coverage, and sign-pattern region counting.

mod lp;

pub use lp::{maximize, LpSolution};

use std::collections::HashSet;
use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::ensembles::MeasurementEnsemble;
use crate::error::{Error, Result};
use crate::linalg::{inner, phase, Cx, Field, Signal};
use crate::seeding::{derive_seed, rng_from_seed};

/// Optimum above which the cone is declared to contain a nonzero point.
pub const CONE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeFeasibilityReport {
    pub nontrivial: bool,
    /// Unit-norm failure direction when `nontrivial`.
    #[serde(with = "crate::io::opt_signal_serde")]
    pub witness: Option<Signal>,
    /// Largest optimum over the objectives tried.
    pub objective_value: f64,
    pub generic_directions_tried: usize,
}

fn gaussian_vec<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

fn unit_vec<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let g = gaussian_vec(d, rng);
        let nrm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm > 0.0 {
            return g.iter().map(|v| v / nrm).collect();
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Real coordinates of `u` such that `Re<u, v> = embed(u) . embed(v)`.
fn embed(u: &Signal) -> Vec<f64> {
    u.real_embedding()
}

/// Searches `{v : rows . v <= 0}` for a nonzero point by maximizing
/// `directions` generic objectives (each paired with its negation).
fn probe_cone<R: Rng + ?Sized>(
    rows: &[Vec<f64>],
    d: usize,
    directions: usize,
    rng: &mut R,
) -> Result<(bool, f64, Option<Vec<f64>>, usize)> {
    let mut best = f64::NEG_INFINITY;
    let mut witness = None;
    let mut tried = 0;
    for _ in 0..directions.max(1) {
        let g = gaussian_vec(d, rng);
        for sign in [1.0, -1.0] {
            let gs: Vec<f64> = g.iter().map(|v| sign * v).collect();
            let (val, v) = lp::cone_box_max(&gs, rows)?;
            tried += 1;
            if val > best {
                best = val;
                witness = Some(v);
            }
            if best > CONE_TOL {
                return Ok((true, best, witness, tried));
            }
        }
    }
    Ok((false, best, None, tried))
}

/// Decides whether the descent cone
/// `{delta : Im<delta, xhat> = 0, Re<delta, xhat> >= 0, Re<a~_i, delta> <= 0}`
/// with `a~_i = phase(<a_i, x0>) a_i` holds a nonzero vector. An empty cone
/// certifies that `x0` is the unique PhaseMax solution.
pub fn uniqueness_check(
    ensemble: &MeasurementEnsemble,
    truth: &Signal,
    xhat: &Signal,
) -> Result<ConeFeasibilityReport> {
    uniqueness_check_with(ensemble, truth, xhat, 4, derive_seed(ensemble.seed, &[0x0c0e]))
}

pub fn uniqueness_check_with(
    ensemble: &MeasurementEnsemble,
    truth: &Signal,
    xhat: &Signal,
    directions: usize,
    seed: u64,
) -> Result<ConeFeasibilityReport> {
    let n = ensemble.n();
    for s in [truth, xhat] {
        if s.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: s.len(),
            });
        }
    }
    if xhat.norm() == 0.0 {
        return Err(Error::ZeroNorm("uniqueness_check: xhat"));
    }
    let field = ensemble.field();
    let d = field.real_dim(n);
    let mut rows = Vec::with_capacity(ensemble.m() + 3);
    let xh = embed(xhat);
    rows.push(xh.iter().map(|v| -v).collect::<Vec<_>>());
    if field == Field::Complex {
        let jx = embed(&xhat.scale(Cx::new(0.0, 1.0)));
        rows.push(jx.iter().map(|v| -v).collect());
        rows.push(jx);
    }
    let c = ensemble.matrix.apply(truth);
    for (i, ci) in c.iter().enumerate() {
        rows.push(embed(&ensemble.matrix.row(i).scale(phase(*ci))));
    }
    let mut rng = rng_from_seed(seed);
    let (nontrivial, best, w, tried) = probe_cone(&rows, d, directions, &mut rng)?;
    let witness = match (nontrivial, w) {
        (true, Some(v)) => {
            let s = Signal::from_real_embedding(&v, field);
            Some(s.normalized()?)
        }
        _ => None,
    };
    Ok(ConeFeasibilityReport {
        nontrivial,
        witness,
        objective_value: best,
        generic_directions_tried: tried,
    })
}

/// Largest violation of the cone constraints by `delta` (for witness checks).
pub fn cone_violation(
    ensemble: &MeasurementEnsemble,
    truth: &Signal,
    xhat: &Signal,
    delta: &Signal,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let dx = inner(delta, xhat)?;
    worst = worst.max(dx.im.abs()).max(-dx.re);
    let ad = ensemble.matrix.apply(delta);
    for (ci, di) in ensemble.matrix.apply(truth).iter().zip(&ad) {
        worst = worst.max((ci.conj() * di).re);
    }
    Ok(worst)
}

/// Where random cap centres are drawn from.
#[derive(Debug, Clone, PartialEq)]
pub enum CapCenters {
    /// Uniform on the sphere of `R^d`.
    Uniform,
    /// Uniform on the symmetric set `{a : sign<a, x> = sign<a, y>}` (rejection sampling).
    Hourglass { x: Vec<f64>, y: Vec<f64> },
}

impl CapCenters {
    fn sample<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Vec<f64> {
        match self {
            CapCenters::Uniform => unit_vec(d, rng),
            CapCenters::Hourglass { x, y } => loop {
                let a = unit_vec(d, rng);
                let (s, t) = (dot(&a, x), dot(&a, y));
                if s * t > 0.0 {
                    return a;
                }
            },
        }
    }

    /// The hourglass built from `x` and its reflection through `e_1`.
    pub fn hourglass_from(x: &[f64]) -> Self {
        let mut y: Vec<f64> = x.iter().map(|v| -v).collect();
        y[0] = x[0];
        CapCenters::Hourglass { x: x.to_vec(), y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageConfig {
    /// Uniform probe directions per experiment.
    pub probes: usize,
    /// At `theta = pi/2`, decide coverage exactly with a cone program and use
    /// only `reject_probes` probes as a fast reject.
    pub exact_semisphere: bool,
    pub reject_probes: usize,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        Self {
            probes: 20_000,
            exact_semisphere: true,
            reject_probes: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub frequency: f64,
    pub standard_error: f64,
    pub trials: usize,
    pub covered: usize,
}

/// Whether the open caps `{p : <a, p> > cos(theta)}` around `centers` cover
/// the unit sphere of `R^d`.
pub fn caps_cover<R: Rng + ?Sized>(
    centers: &[Vec<f64>],
    theta: f64,
    cfg: &CoverageConfig,
    rng: &mut R,
) -> Result<bool> {
    if !(theta > 0.0 && theta <= FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!(
            "cap angle {theta} outside (0, pi/2]"
        )));
    }
    let Some(d) = centers.first().map(|c| c.len()) else {
        return Ok(false);
    };
    let exact = cfg.exact_semisphere && theta >= FRAC_PI_2;
    let cos_t = if exact { 0.0 } else { theta.cos() };
    let probes = if exact { cfg.reject_probes } else { cfg.probes };
    for _ in 0..probes {
        let p = unit_vec(d, rng);
        if !centers.iter().any(|a| dot(a, &p) > cos_t) {
            return Ok(false);
        }
    }
    if exact {
        // uncovered set is the cone {v : <a_i, v> <= 0}
        let (nontrivial, ..) = probe_cone(centers, d, 2, rng)?;
        return Ok(!nontrivial);
    }
    Ok(true)
}

/// Signal-valued front end to [`caps_cover`]; complex centres are embedded in
/// `R^{2n}`.
pub fn signal_caps_cover<R: Rng + ?Sized>(
    centers: &[Signal],
    theta: f64,
    cfg: &CoverageConfig,
    rng: &mut R,
) -> Result<bool> {
    let rows: Vec<Vec<f64>> = centers.iter().map(embed).collect();
    caps_cover(&rows, theta, cfg, rng)
}

/// Fraction of `trials` experiments in which `count` fresh caps of angle
/// `theta` cover the sphere of `R^d`.
pub fn coverage_mc<R: Rng + ?Sized>(
    d: usize,
    count: usize,
    centers: &CapCenters,
    theta: f64,
    trials: usize,
    cfg: &CoverageConfig,
    rng: &mut R,
) -> Result<CoverageEstimate> {
    if d == 0 || trials == 0 {
        return Err(Error::InvalidParameter("need d >= 1 and trials >= 1".into()));
    }
    let mut covered = 0;
    for _ in 0..trials {
        let cs: Vec<Vec<f64>> = (0..count).map(|_| centers.sample(d, rng)).collect();
        if caps_cover(&cs, theta, cfg, rng)? {
            covered += 1;
        }
    }
    let p = covered as f64 / trials as f64;
    Ok(CoverageEstimate {
        frequency: p,
        standard_error: (p * (1.0 - p) / trials as f64).sqrt(),
        trials,
        covered,
    })
}

/// Counts distinct sign patterns `(sign<a_i, p>)_i` over `samples` sphere
/// points `p`, for `k` random hyperplanes through the origin of `R^n`.
///
/// Half the points are uniform. The other half sit at a log-uniform distance
/// from a random vertex of the arrangement (a ray where `n - 1` planes meet),
/// since thin regions are only reachable there: every region of a generic
/// arrangement with `k >= n` has such a ray on its boundary.
pub fn regions_brute_force<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
    samples: usize,
) -> Result<u64> {
    if n == 0 || k == 0 || n > 5 || k > 8 {
        return Err(Error::Regime(format!(
            "region brute force supports 1 <= n <= 5, 1 <= k <= 8 (got n = {n}, k = {k})"
        )));
    }
    let normals: Vec<Vec<f64>> = (0..k).map(|_| gaussian_vec(n, rng)).collect();
    let vertices = arrangement_vertices(&normals, n);
    let mut seen = [false; 256];
    let mut count = 0;
    for s in 0..samples {
        let p = if s % 2 == 0 || vertices.is_empty() {
            gaussian_vec(n, rng)
        } else {
            let v = &vertices[rng.random_range(0..vertices.len())];
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let t = 10f64.powf(-rng.random_range(1.0..8.0));
            let g = unit_vec(n, rng);
            v.iter().zip(&g).map(|(a, b)| sign * a + t * b).collect()
        };
        let mut pattern = 0usize;
        for (i, a) in normals.iter().enumerate() {
            if dot(a, &p) > 0.0 {
                pattern |= 1 << i;
            }
        }
        if !seen[pattern] {
            seen[pattern] = true;
            count += 1;
        }
    }
    Ok(count)
}

/// Unit rays orthogonal to every `(n-1)`-subset of `normals`.
fn arrangement_vertices(normals: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    if normals.len() + 1 < n {
        return out;
    }
    let mut subset: Vec<usize> = (0..n - 1).collect();
    loop {
        // generalized cross product: cofactors along a free last row
        let v: Vec<f64> = (0..n)
            .map(|j| {
                let minor: Vec<Vec<f64>> = subset
                    .iter()
                    .map(|&i| (0..n).filter(|&c| c != j).map(|c| normals[i][c]).collect())
                    .collect();
                let sign = if (n - 1 + j) % 2 == 0 { 1.0 } else { -1.0 };
                sign * det(minor)
            })
            .collect();
        let nv = dot(&v, &v).sqrt();
        if nv > 0.0 {
            out.push(v.iter().map(|x| x / nv).collect());
        }
        // next (n-1)-combination of 0..k in lexicographic order
        let k = normals.len();
        let r = n - 1;
        let Some(pos) = (0..r).rev().find(|&i| subset[i] < k - r + i) else {
            break;
        };
        subset[pos] += 1;
        for i in pos + 1..r {
            subset[i] = subset[i - 1] + 1;
        }
    }
    out
}

fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let d = a.len();
    let mut acc = 1.0;
    for c in 0..d {
        let Some(p) = (c..d).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else {
            return acc;
        };
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            acc = -acc;
        }
        acc *= a[c][c];
        for i in c + 1..d {
            let f = a[i][c] / a[c][c];
            for j in c..d {
                a[i][j] -= f * a[c][j];
            }
        }
    }
    acc
}

/// Distinct sign patterns of explicit centres, without sampling (test helper
/// for the region oracle on tiny inputs).
pub fn sign_patterns(normals: &[Vec<f64>], points: &[Vec<f64>]) -> usize {
    points
        .iter()
        .map(|p| normals.iter().map(|a| dot(a, p) > 0.0).collect::<Vec<bool>>())
        .collect::<HashSet<_>>()
        .len()
}
