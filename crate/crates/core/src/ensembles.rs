//! Problem instances: true signals, random measurement vectors, magnitude
//! data `b_i^2 = |<a_i, x0>|^2 + eta_i`, noise, and approximation vectors at a
//! prescribed angle.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{accuracy, align, inner, Cx, Field, MeasurementMatrix, Signal};

/// How measurement vectors are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    /// Uniform on the unit sphere of `H^n`.
    UnitSphere,
    /// I.i.d. standard normal entries (`CN(0,1)` in the complex case).
    Gaussian,
}

/// Additive noise on the squared magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "level", rename_all = "kebab-case")]
pub enum NoiseModel {
    None,
    /// `eta_i ~ U[0, level * bhat_i]`, so `max eta_i / bhat_i <= level`.
    NonnegUniform(f64),
    /// `eta_i ~ U[-level * bhat_i^2, level * bhat_i^2]` with `level < 1`.
    SymmetricUniform(f64),
    /// `eta_i ~ U[-r * bhat_i, r * bhat_i]`; rejected if some `b_i^2` turns negative.
    RelativeBounded(f64),
}

impl NoiseModel {
    pub fn is_none(&self) -> bool {
        matches!(self, NoiseModel::None)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementEnsemble {
    pub matrix: MeasurementMatrix,
    pub magnitudes: Vec<f64>,
    pub noise: Vec<f64>,
    pub normalized: bool,
    pub seed: u64,
}

impl MeasurementEnsemble {
    /// Builds an ensemble from explicit data, checking shapes and signs.
    pub fn new(
        matrix: MeasurementMatrix,
        magnitudes: Vec<f64>,
        noise: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        let m = matrix.rows();
        for (got, _) in [(magnitudes.len(), "b"), (noise.len(), "eta")] {
            if got != m {
                return Err(Error::DimensionMismatch { expected: m, got });
            }
        }
        if let Some((index, &value)) = magnitudes
            .iter()
            .enumerate()
            .find(|(_, b)| !(**b >= 0.0) || !b.is_finite())
        {
            return Err(Error::NegativeMagnitude { index, value });
        }
        let normalized = (0..m).all(|i| (matrix.row_norm(i) - 1.0).abs() <= 1e-12);
        Ok(Self {
            matrix,
            magnitudes,
            noise,
            normalized,
            seed,
        })
    }

    /// Noiseless magnitudes `b_i = |<a_i, x>|` for an arbitrary measurement operator.
    pub fn noiseless(matrix: MeasurementMatrix, truth: &Signal, seed: u64) -> Result<Self> {
        if truth.len() != matrix.cols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.cols(),
                got: truth.len(),
            });
        }
        let b = matrix.apply(truth).iter().map(|z| z.norm()).collect();
        let m = matrix.rows();
        Self::new(matrix, b, vec![0.0; m], seed)
    }

    pub fn m(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    pub fn field(&self) -> Field {
        self.matrix.field()
    }

    /// Keeps the measurements with the listed indices.
    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        let matrix = self.matrix.select_rows(idx)?;
        let normalized = (0..matrix.rows()).all(|i| (matrix.row_norm(i) - 1.0).abs() <= 1e-12);
        Ok(Self {
            matrix,
            magnitudes: idx.iter().map(|&i| self.magnitudes[i]).collect(),
            noise: idx.iter().map(|&i| self.noise[i]).collect(),
            normalized,
            seed: self.seed,
        })
    }

    /// Splits into a prefix of `k` measurements and the remaining suffix;
    /// both parts must be nonempty.
    pub fn split_at(&self, k: usize) -> Result<(Self, Self)> {
        if k == 0 || k >= self.m() {
            return Err(Error::InvalidParameter(format!(
                "cannot split {} measurements at {k}",
                self.m()
            )));
        }
        let head: Vec<usize> = (0..k).collect();
        let tail: Vec<usize> = (k..self.m()).collect();
        Ok((self.select(&head)?, self.select(&tail)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub ensemble: MeasurementEnsemble,
    pub xhat: Signal,
    pub truth: Option<Signal>,
    pub alpha: Option<f64>,
}

impl ProblemInstance {
    /// Assembles an instance; a truth signal is re-phased to be aligned with `xhat`.
    pub fn new(ensemble: MeasurementEnsemble, xhat: Signal, truth: Option<Signal>) -> Result<Self> {
        if xhat.len() != ensemble.n() {
            return Err(Error::DimensionMismatch {
                expected: ensemble.n(),
                got: xhat.len(),
            });
        }
        let (truth, alpha) = match truth {
            Some(t) => {
                let t = align(&t, &xhat)?;
                let a = accuracy(&t, &xhat)?;
                (Some(t), Some(a))
            }
            None => (None, None),
        };
        Ok(Self {
            ensemble,
            xhat,
            truth,
            alpha,
        })
    }

    /// Replaces the approximation vector, re-aligning the truth.
    pub fn with_xhat(self, xhat: Signal) -> Result<Self> {
        Self::new(self.ensemble, xhat, self.truth)
    }

    pub fn n(&self) -> usize {
        self.ensemble.n()
    }

    pub fn m(&self) -> usize {
        self.ensemble.m()
    }
}

/// How the approximation vector of a generated instance is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "beta", rename_all = "kebab-case")]
pub enum ApproxPolicy {
    /// At a given angle (radians) from the truth.
    AtAngle(f64),
    /// Uniform on the unit sphere, independent of everything else.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    pub m: usize,
    pub field: Field,
    pub kind: EnsembleKind,
    pub noise: NoiseModel,
    pub truth_norm: f64,
    pub approx: ApproxPolicy,
}

impl InstanceSpec {
    pub fn new(n: usize, m: usize, field: Field) -> Self {
        Self {
            n,
            m,
            field,
            kind: EnsembleKind::UnitSphere,
            noise: NoiseModel::None,
            truth_norm: 1.0,
            approx: ApproxPolicy::AtAngle(0.0),
        }
    }

    pub fn kind(mut self, kind: EnsembleKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn noise(mut self, noise: NoiseModel) -> Self {
        self.noise = noise;
        self
    }

    pub fn truth_norm(mut self, c: f64) -> Self {
        self.truth_norm = c;
        self
    }

    pub fn approx(mut self, approx: ApproxPolicy) -> Self {
        self.approx = approx;
        self
    }
}

fn gaussian_entry<R: Rng + ?Sized>(field: Field, rng: &mut R) -> Cx {
    match field {
        Field::Real => Cx::new(rng.sample(StandardNormal), 0.0),
        Field::Complex => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Cx::new(s * re, s * im)
        }
    }
}

/// Standard Gaussian vector in `H^n` (`E|g_k|^2 = 1`).
pub fn sample_gaussian<R: Rng + ?Sized>(n: usize, field: Field, rng: &mut R) -> Result<Signal> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    Signal::new((0..n).map(|_| gaussian_entry(field, rng)).collect(), field)
}

/// Uniform sample from the unit sphere of `H^n`.
pub fn sample_unit_sphere<R: Rng + ?Sized>(n: usize, field: Field, rng: &mut R) -> Result<Signal> {
    loop {
        let g = sample_gaussian(n, field, rng)?;
        if g.norm() > 0.0 {
            return g.normalized();
        }
    }
}

/// Draws the noise vector for clean squared magnitudes `bhat_sq`.
pub fn apply_noise<R: Rng + ?Sized>(
    bhat_sq: &[f64],
    model: NoiseModel,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let eta: Vec<f64> = match model {
        NoiseModel::None => vec![0.0; bhat_sq.len()],
        NoiseModel::NonnegUniform(level) => {
            if !(level >= 0.0) {
                return Err(Error::InvalidParameter(format!("noise level {level} < 0")));
            }
            bhat_sq
                .iter()
                .map(|&b2| rng.random::<f64>() * level * b2.sqrt())
                .collect()
        }
        NoiseModel::SymmetricUniform(level) => {
            if !(0.0..1.0).contains(&level) {
                return Err(Error::InvalidParameter(format!(
                    "symmetric noise level {level} must lie in [0, 1)"
                )));
            }
            bhat_sq
                .iter()
                .map(|&b2| (2.0 * rng.random::<f64>() - 1.0) * level * b2)
                .collect()
        }
        NoiseModel::RelativeBounded(r) => {
            if !(r >= 0.0) {
                return Err(Error::InvalidParameter(format!("noise bound {r} < 0")));
            }
            bhat_sq
                .iter()
                .map(|&b2| (2.0 * rng.random::<f64>() - 1.0) * r * b2.sqrt())
                .collect()
        }
    };
    if let Some((index, value)) = bhat_sq
        .iter()
        .zip(&eta)
        .map(|(b2, e)| b2 + e)
        .enumerate()
        .find(|(_, v)| *v < 0.0)
    {
        return Err(Error::NegativeMagnitude { index, value });
    }
    Ok(eta)
}

/// Random unit vector orthogonal to `truth` in both the real and imaginary
/// parts of the inner product. For `n = 1` complex the only real-orthogonal
/// direction is `j * truth`.
fn orthogonal_unit<R: Rng + ?Sized>(truth: &Signal, rng: &mut R) -> Result<Signal> {
    let t = truth.normalized()?;
    let n = t.len();
    match (t.field(), n) {
        (Field::Real, 1) => Err(Error::InvalidParameter(
            "a real signal of length 1 has no orthogonal direction".into(),
        )),
        (Field::Complex, 1) => Ok(t.scale(Cx::new(0.0, 1.0))),
        _ => loop {
            let g = sample_gaussian(n, t.field(), rng)?;
            let c = inner(&t, &g)?;
            let u = g.sub(&t.scale(c))?;
            // second pass for orthogonality to machine precision
            let c2 = inner(&t, &u)?;
            let u = u.sub(&t.scale(c2))?;
            if u.norm() > 1e-8 {
                return u.normalized();
            }
        },
    }
}

/// Approximation vector at angle `beta` from `truth`, with the same norm and
/// `<truth, result>` real and nonnegative.
pub fn make_approx_at_angle<R: Rng + ?Sized>(
    truth: &Signal,
    beta: f64,
    rng: &mut R,
) -> Result<Signal> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&beta) {
        return Err(Error::InvalidParameter(format!(
            "angle {beta} outside [0, pi/2]"
        )));
    }
    let nrm = truth.norm();
    if nrm == 0.0 {
        return Err(Error::ZeroNorm("make_approx_at_angle: truth"));
    }
    if beta == 0.0 {
        return Ok(truth.clone());
    }
    let u = orthogonal_unit(truth, rng)?;
    let t = truth.scale_real(1.0 / nrm);
    t.scale_real(beta.cos())
        .add(&u.scale_real(beta.sin()))
        .map(|v| v.scale_real(nrm))
}

/// Generates a complete instance from a seeded stream.
///
/// Draw order: truth, measurement rows, noise, approximation vector.
pub fn gen_instance<R: Rng + ?Sized>(
    spec: &InstanceSpec,
    seed: u64,
    rng: &mut R,
) -> Result<ProblemInstance> {
    let InstanceSpec { n, m, field, .. } = *spec;
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("need n >= 1 and m >= 1".into()));
    }
    if !(spec.truth_norm > 0.0) {
        return Err(Error::InvalidParameter("truth norm must be positive".into()));
    }
    let truth = sample_unit_sphere(n, field, rng)?.scale_real(spec.truth_norm);
    let normalize = spec.kind == EnsembleKind::UnitSphere || !spec.noise.is_none();
    let rows: Vec<Signal> = (0..m)
        .map(|_| match spec.kind {
            EnsembleKind::UnitSphere => sample_unit_sphere(n, field, rng),
            EnsembleKind::Gaussian => {
                let g = sample_gaussian(n, field, rng)?;
                if normalize {
                    g.normalized()
                } else {
                    Ok(g)
                }
            }
        })
        .collect::<Result<_>>()?;
    let matrix = MeasurementMatrix::from_rows(&rows)?;
    let bhat_sq: Vec<f64> = matrix.apply(&truth).iter().map(|z| z.norm_sqr()).collect();
    let eta = apply_noise(&bhat_sq, spec.noise, rng)?;
    let b: Vec<f64> = if spec.noise.is_none() {
        matrix.apply(&truth).iter().map(|z| z.norm()).collect()
    } else {
        bhat_sq.iter().zip(&eta).map(|(b2, e)| (b2 + e).sqrt()).collect()
    };
    let ensemble = MeasurementEnsemble::new(matrix, b, eta, seed)?;
    let xhat = match spec.approx {
        ApproxPolicy::AtAngle(beta) => make_approx_at_angle(&truth, beta, rng)?,
        ApproxPolicy::Random => sample_unit_sphere(n, field, rng)?,
    };
    ProblemInstance::new(ensemble, xhat, Some(truth))
}

/// Convenience wrapper seeding a fresh ChaCha stream from `seed`.
pub fn gen_instance_seeded(spec: &InstanceSpec, seed: u64) -> Result<ProblemInstance> {
    let mut rng = crate::seeding::rng_from_seed(seed);
    gen_instance(spec, seed, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::angle_between;
    use crate::seeding::rng_from_seed;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn unit_sphere_samples_have_unit_norm() {
        let mut rng = rng_from_seed(1);
        for n in 1..20 {
            for field in [Field::Real, Field::Complex] {
                let s = sample_unit_sphere(n, field, &mut rng).unwrap();
                assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
            }
        }
        assert!(sample_unit_sphere(0, Field::Real, &mut rng).is_err());
    }

    #[test]
    fn s0_is_plus_minus_one_evenly() {
        let mut rng = rng_from_seed(2);
        let trials = 20_000;
        let plus = (0..trials)
            .filter(|_| sample_unit_sphere(1, Field::Real, &mut rng).unwrap().entries()[0].re > 0.0)
            .count();
        for _ in 0..10 {
            let v = sample_unit_sphere(1, Field::Real, &mut rng).unwrap().entries()[0].re;
            assert_eq!(v.abs(), 1.0);
        }
        // binomial SE is 0.0035
        assert!((plus as f64 / trials as f64 - 0.5).abs() < 0.015);
    }

    #[test]
    fn sphere_mean_is_statistically_zero() {
        let mut rng = rng_from_seed(3);
        let n = 4;
        let trials = 100_000;
        let mut acc = vec![Cx::new(0.0, 0.0); n];
        for _ in 0..trials {
            let s = sample_unit_sphere(n, Field::Complex, &mut rng).unwrap();
            for (a, z) in acc.iter_mut().zip(s.entries()) {
                *a += z;
            }
        }
        // each real coordinate has variance 1/(2n); the norm of the mean has
        // expected square 1/trials
        let mean_norm = acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / trials as f64;
        assert!(mean_norm < 4.0 / (trials as f64).sqrt(), "{mean_norm}");
    }

    #[test]
    fn noiseless_instance_has_exact_magnitudes() {
        let spec = InstanceSpec::new(6, 20, Field::Complex);
        let inst = gen_instance_seeded(&spec, 9).unwrap();
        let truth = inst.truth.as_ref().unwrap();
        let ax = inst.ensemble.matrix.apply(truth);
        for (z, b) in ax.iter().zip(&inst.ensemble.magnitudes) {
            assert_eq!(z.norm(), *b);
        }
        assert!(inst.ensemble.noise.iter().all(|&e| e == 0.0));
        assert!(inst.ensemble.normalized);
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = InstanceSpec::new(5, 17, Field::Complex)
            .noise(NoiseModel::SymmetricUniform(0.3))
            .approx(ApproxPolicy::AtAngle(0.4));
        let a = gen_instance_seeded(&spec, 123).unwrap();
        let b = gen_instance_seeded(&spec, 123).unwrap();
        assert_eq!(a, b);
        let c = gen_instance_seeded(&spec, 124).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn truth_norm_scales_magnitudes() {
        let spec = InstanceSpec::new(5, 30, Field::Real);
        let a = gen_instance_seeded(&spec, 77).unwrap();
        let b = gen_instance_seeded(&spec.truth_norm(3.0), 77).unwrap();
        for (x, y) in a.ensemble.magnitudes.iter().zip(&b.ensemble.magnitudes) {
            assert_abs_diff_eq!(3.0 * x, *y, epsilon = 1e-12);
        }
    }

    #[test]
    fn gaussian_rows_stay_unnormalized_without_noise() {
        let spec = InstanceSpec::new(8, 30, Field::Complex).kind(EnsembleKind::Gaussian);
        let inst = gen_instance_seeded(&spec, 5).unwrap();
        assert!(!inst.ensemble.normalized);
        let noisy = gen_instance_seeded(&spec.noise(NoiseModel::NonnegUniform(0.1)), 5).unwrap();
        assert!(noisy.ensemble.normalized);
    }

    #[test]
    fn approx_at_angle_examples() {
        let mut rng = rng_from_seed(11);
        let truth = sample_unit_sphere(7, Field::Complex, &mut rng).unwrap().scale_real(2.5);
        let same = make_approx_at_angle(&truth, 0.0, &mut rng).unwrap();
        assert_eq!(same, truth);
        let ortho = make_approx_at_angle(&truth, FRAC_PI_2, &mut rng).unwrap();
        assert!(inner(&truth, &ortho).unwrap().re.abs() < 1e-12);
        let quarter = make_approx_at_angle(&truth, FRAC_PI_4, &mut rng).unwrap();
        assert_abs_diff_eq!(accuracy(&truth, &quarter).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(quarter.norm(), truth.norm(), epsilon = 1e-12);
        let ip = inner(&truth, &quarter).unwrap();
        assert!(ip.re >= 0.0 && ip.im.abs() < 1e-12);
        assert!(make_approx_at_angle(&truth, 2.0, &mut rng).is_err());
        assert!(make_approx_at_angle(&truth, -0.1, &mut rng).is_err());
    }

    #[test]
    fn approx_at_angle_small_dimensions() {
        let mut rng = rng_from_seed(12);
        let t1 = Signal::real(&[0.7]);
        assert!(make_approx_at_angle(&t1, 0.3, &mut rng).is_err());
        let c1 = Signal::complex(vec![Cx::new(0.6, 0.8)]);
        let r = make_approx_at_angle(&c1, 0.3, &mut rng).unwrap();
        assert_abs_diff_eq!(angle_between(&c1, &r).unwrap(), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn noise_models_respect_their_bounds() {
        let mut rng = rng_from_seed(13);
        let bhat_sq: Vec<f64> = (1..200).map(|k| (k as f64 / 50.0).powi(2)).collect();
        let none = apply_noise(&bhat_sq, NoiseModel::None, &mut rng).unwrap();
        assert!(none.iter().all(|&e| e == 0.0));
        let nn = apply_noise(&bhat_sq, NoiseModel::NonnegUniform(0.1), &mut rng).unwrap();
        let r = nn
            .iter()
            .zip(&bhat_sq)
            .map(|(e, b2)| e / b2.sqrt())
            .fold(0.0, f64::max);
        assert!(nn.iter().all(|&e| e >= 0.0) && r <= 0.1);
        let sym = apply_noise(&bhat_sq, NoiseModel::SymmetricUniform(0.5), &mut rng).unwrap();
        assert!(sym.iter().zip(&bhat_sq).all(|(e, b2)| b2 + e > 0.0));
        assert!(apply_noise(&bhat_sq, NoiseModel::SymmetricUniform(1.5), &mut rng).is_err());
    }

    #[test]
    fn relative_noise_rejects_negative_squares() {
        let mut rng = rng_from_seed(14);
        // bhat = 0.01, so eta can reach -0.5 * 0.01 which exceeds bhat^2 = 1e-4
        let bhat_sq = vec![1e-4; 50];
        match apply_noise(&bhat_sq, NoiseModel::RelativeBounded(0.5), &mut rng) {
            Err(Error::NegativeMagnitude { index, .. }) => assert!(index < 50),
            other => panic!("expected rejection, got {other:?}"),
        }
    }
}
