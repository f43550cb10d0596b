//! Approximation vectors: random, spectral, and truncated spectral.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensembles::{sample_unit_sphere, MeasurementEnsemble};
use crate::error::{Error, Result};
use crate::linalg::{Field, Planar, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    Random,
    Spectral,
    #[serde(rename = "trunc-spectral")]
    TruncatedSpectral,
}

impl std::str::FromStr for InitKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(InitKind::Random),
            "spectral" => Ok(InitKind::Spectral),
            "trunc-spectral" => Ok(InitKind::TruncatedSpectral),
            other => Err(Error::InvalidParameter(format!("unknown initializer `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitializerConfig {
    pub kind: InitKind,
    pub power_iters: usize,
    pub power_tol: f64,
    /// Measurements with `b_i > truncation_factor * sqrt(mean(b^2))` are dropped.
    pub truncation_factor: f64,
    /// Output norm; `None` uses the magnitude-based norm estimate.
    pub scale_to: Option<f64>,
}

impl Default for InitializerConfig {
    fn default() -> Self {
        Self {
            kind: InitKind::TruncatedSpectral,
            power_iters: 500,
            power_tol: 1e-10,
            truncation_factor: 3.0,
            scale_to: None,
        }
    }
}

impl InitializerConfig {
    pub fn with_kind(kind: InitKind) -> Self {
        Self {
            kind,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power_tol > 0.0) {
            return Err(Error::InvalidParameter("power_tol must be positive".into()));
        }
        if !(self.truncation_factor > 0.0) {
            return Err(Error::InvalidParameter(
                "truncation_factor must be positive".into(),
            ));
        }
        if self.scale_to.is_some_and(|s| !(s > 0.0)) {
            return Err(Error::InvalidParameter("scale_to must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    pub signal: Signal,
    /// Rayleigh quotient of the unit-norm direction.
    pub eigenvalue: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Rayleigh quotients after each power step.
    pub history: Vec<f64>,
}

/// Uniform draw from the unit sphere, independent of any measurements.
pub fn random_init<R: Rng + ?Sized>(n: usize, field: Field, rng: &mut R) -> Result<Signal> {
    sample_unit_sphere(n, field, rng)
}

/// Leading eigenvector of `(1/m) sum_i w_i b_i^2 a_i a_i^*`, scaled.
pub fn spectral_init(ensemble: &MeasurementEnsemble, cfg: &InitializerConfig) -> Result<Signal> {
    spectral_estimate(ensemble, cfg).map(|e| e.signal)
}

/// Like [`spectral_init`] but also reports the power-iteration diagnostics.
pub fn spectral_estimate(
    ensemble: &MeasurementEnsemble,
    cfg: &InitializerConfig,
) -> Result<SpectralEstimate> {
    cfg.validate()?;
    let (m, n, field) = (ensemble.m(), ensemble.n(), ensemble.field());
    let b2: Vec<f64> = ensemble.magnitudes.iter().map(|b| b * b).collect();
    let mean_b2 = b2.iter().sum::<f64>() / m as f64;
    let weights: Vec<f64> = match cfg.kind {
        InitKind::TruncatedSpectral => b2
            .iter()
            .map(|&v| if v <= cfg.truncation_factor.powi(2) * mean_b2 { v } else { 0.0 })
            .collect(),
        _ => b2.clone(),
    };
    if weights.iter().all(|&w| w == 0.0) {
        return Err(Error::DegenerateTruncation(cfg.truncation_factor));
    }
    let weights: Vec<f64> = weights.iter().map(|w| w / m as f64).collect();

    // deterministic start built from the data so that permuting rows does not
    // change it: A^* of the weights, plus a fixed fallback direction
    let mut v = Planar::zeros(n);
    let w_planar = Planar {
        re: weights.clone(),
        im: vec![0.0; m],
    };
    ensemble.matrix.adjoint_planar(&w_planar, &mut v);
    for k in 0..n {
        v.re[k] += 1e-3 * (1.0 + 0.5 * ((k as f64) * 0.917).sin());
        if field == Field::Complex {
            v.im[k] += 1e-3 * 0.5 * ((k as f64) * 1.31).cos();
        }
    }
    normalize(&mut v);

    let mut av = Planar::zeros(m);
    let mut yv = Planar::zeros(n);
    let mut history = Vec::new();
    let mut lambda = f64::NEG_INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=cfg.power_iters.max(1) {
        iterations = k;
        ensemble.matrix.apply_planar(&v, &mut av);
        for i in 0..m {
            av.re[i] *= weights[i];
            av.im[i] *= weights[i];
        }
        ensemble.matrix.adjoint_planar(&av, &mut yv);
        if field == Field::Real {
            yv.im.iter_mut().for_each(|z| *z = 0.0);
        }
        let rq = v.re_dot(&yv);
        history.push(rq);
        let nrm = yv.norm();
        if nrm == 0.0 {
            break;
        }
        std::mem::swap(&mut v, &mut yv);
        normalize(&mut v);
        if (rq - lambda).abs() < cfg.power_tol * rq.abs().max(1e-300) {
            lambda = rq;
            converged = true;
            break;
        }
        lambda = rq;
    }

    let scale = match cfg.scale_to {
        Some(s) => s,
        None => norm_estimate(ensemble),
    };
    let mut entries = v.to_cx();
    // fix the global phase so the output is reproducible across permutations
    let pivot = entries
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (k, z)| if z.norm() > acc.1 { (k, z.norm()) } else { acc })
        .0;
    let rot = crate::linalg::phase(entries[pivot]).conj();
    entries.iter_mut().for_each(|z| *z *= rot * scale);
    if field == Field::Real {
        entries.iter_mut().for_each(|z| z.im = 0.0);
    }
    Ok(SpectralEstimate {
        signal: Signal::new(entries, field)?,
        eigenvalue: lambda,
        iterations,
        converged,
        history,
    })
}

/// `sqrt(n * sum b_i^2 / sum ||a_i||^2)`, which reduces to `sqrt(n mean(b^2))`
/// for unit rows and estimates `||x0||` under any rotation-invariant ensemble.
pub fn norm_estimate(ensemble: &MeasurementEnsemble) -> f64 {
    let num: f64 = ensemble.magnitudes.iter().map(|b| b * b).sum();
    let den: f64 = (0..ensemble.m())
        .map(|i| ensemble.matrix.row_norm(i).powi(2))
        .sum();
    if den == 0.0 || num == 0.0 {
        1.0
    } else {
        (ensemble.n() as f64 * num / den).sqrt()
    }
}

fn normalize(v: &mut Planar) {
    let nv = v.norm();
    if nv > 0.0 {
        v.re.iter_mut().chain(v.im.iter_mut()).for_each(|z| *z /= nv);
    }
}

/// Builds `xhat` per `cfg`. The first `init_m` measurements (all of them when
/// `None`) feed the spectral estimate; random draws ignore the data.
pub fn initialize<R: Rng + ?Sized>(
    ensemble: &MeasurementEnsemble,
    cfg: &InitializerConfig,
    init_m: Option<usize>,
    rng: &mut R,
) -> Result<Signal> {
    match cfg.kind {
        InitKind::Random => {
            let x = random_init(ensemble.n(), ensemble.field(), rng)?;
            Ok(x.scale_real(cfg.scale_to.unwrap_or(1.0)))
        }
        _ => match init_m {
            Some(k) if k == ensemble.m() => spectral_init(ensemble, cfg),
            Some(k) => spectral_init(&ensemble.split_at(k)?.0, cfg),
            None => spectral_init(ensemble, cfg),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{gen_instance_seeded, EnsembleKind, InstanceSpec};
    use crate::linalg::{angle_between, Cx, MeasurementMatrix};
    use crate::seeding::rng_from_seed;

    fn cos_angle(x: &Signal, y: &Signal) -> f64 {
        let c = crate::linalg::inner(x, y).unwrap().norm();
        c / (x.norm() * y.norm())
    }

    #[test]
    fn random_init_has_unit_norm() {
        let mut rng = rng_from_seed(5);
        let x = random_init(17, Field::Complex, &mut rng).unwrap();
        assert!((x.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_measurement_gives_its_row() {
        let a = Signal::complex(vec![Cx::new(0.3, 0.1), Cx::new(-0.2, 0.7), Cx::new(0.0, 0.4)]);
        let matrix = MeasurementMatrix::from_rows(std::slice::from_ref(&a)).unwrap();
        let ens = MeasurementEnsemble::new(matrix, vec![0.8], vec![0.0], 0).unwrap();
        let cfg = InitializerConfig::with_kind(InitKind::Spectral);
        let x = spectral_init(&ens, &cfg).unwrap();
        assert!((cos_angle(&x, &a) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn large_truncation_factor_matches_plain_spectral() {
        let inst = gen_instance_seeded(&InstanceSpec::new(10, 80, Field::Complex), 2).unwrap();
        let plain = spectral_init(&inst.ensemble, &InitializerConfig::with_kind(InitKind::Spectral))
            .unwrap();
        let trunc = spectral_init(
            &inst.ensemble,
            &InitializerConfig {
                truncation_factor: 1e12,
                ..InitializerConfig::with_kind(InitKind::TruncatedSpectral)
            },
        )
        .unwrap();
        assert_eq!(plain, trunc);
    }

    #[test]
    fn tiny_truncation_factor_is_degenerate() {
        let inst = gen_instance_seeded(&InstanceSpec::new(4, 20, Field::Real), 3).unwrap();
        let cfg = InitializerConfig {
            truncation_factor: 1e-30,
            ..Default::default()
        };
        assert_eq!(
            spectral_init(&inst.ensemble, &cfg).unwrap_err(),
            Error::DegenerateTruncation(1e-30)
        );
    }

    #[test]
    fn rayleigh_quotients_do_not_decrease() {
        let spec = InstanceSpec::new(20, 200, Field::Complex).kind(EnsembleKind::Gaussian);
        let inst = gen_instance_seeded(&spec, 8).unwrap();
        let est = spectral_estimate(&inst.ensemble, &Default::default()).unwrap();
        for w in est.history.windows(2) {
            assert!(w[1] >= w[0] * (1.0 - 1e-12));
        }
    }

    #[test]
    fn permutation_and_scaling_leave_direction_unchanged() {
        let inst = gen_instance_seeded(&InstanceSpec::new(8, 64, Field::Complex), 6).unwrap();
        let cfg = InitializerConfig::default();
        let x = spectral_init(&inst.ensemble, &cfg).unwrap();

        let perm: Vec<usize> = (0..64).rev().collect();
        let xp = spectral_init(&inst.ensemble.select(&perm).unwrap(), &cfg).unwrap();
        assert!(angle_between(&x, &xp).unwrap() < 1e-6);

        let mut scaled = inst.ensemble.clone();
        scaled.magnitudes.iter_mut().for_each(|b| *b *= 3.0);
        let xs = spectral_init(&scaled, &cfg).unwrap();
        assert!((cos_angle(&x, &xs) - 1.0).abs() < 1e-9);
        assert!((xs.norm() / x.norm() - 3.0).abs() < 1e-9);
    }
}
