//! Closed-form success and covering bounds, exact region counts, and the
//! moment formulas behind random initialization.
//!
//! Bounds whose preconditions fail come back flagged invalid with value 0
//! instead of erroring, so sweeps can cross validity boundaries.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::linalg::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormulaId {
    /// Covering a half-sphere's neighbourhood with random semispheres.
    #[serde(rename = "lem3")]
    NeighborCover,
    #[serde(rename = "thm1")]
    SuccessComplex,
    #[serde(rename = "thm4")]
    SuccessReal,
    #[serde(rename = "thm5")]
    Nonuniform,
    /// Covering the sphere with caps of angle `phi < pi/2`.
    #[serde(rename = "lem4")]
    SmallCaps,
    #[serde(rename = "noise")]
    Noise,
}

impl std::str::FromStr for FormulaId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lem3" => FormulaId::NeighborCover,
            "thm1" => FormulaId::SuccessComplex,
            "thm4" => FormulaId::SuccessReal,
            "thm5" => FormulaId::Nonuniform,
            "lem4" => FormulaId::SmallCaps,
            "noise" => FormulaId::Noise,
            other => {
                return Err(Error::InvalidParameter(format!("unknown formula `{other}`")))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryBound {
    /// Probability lower bound in `[0, 1]`; 0 whenever `valid` is false.
    pub value: f64,
    pub valid: bool,
    pub params: BTreeMap<String, f64>,
    pub formula_id: FormulaId,
}

impl TheoryBound {
    fn new(formula_id: FormulaId, valid: bool, value: f64, params: &[(&str, f64)]) -> Self {
        let value = if valid && value.is_finite() {
            value.clamp(0.0, 1.0)
        } else {
            0.0
        };
        Self {
            value,
            valid,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            formula_id,
        }
    }

    /// The bound if valid, else `None`.
    pub fn guarantee(&self) -> Option<f64> {
        self.valid.then_some(self.value)
    }
}

/// Intermediate quantities of the small-cap covering bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallCapsTrace {
    /// `cos(phi)`.
    pub epsilon_cos: f64,
    /// `sin^{n-1}(phi) / sqrt(8n)`, the smallest value of the cap-area lower
    /// bound over the integration range.
    pub lambda_floor: f64,
    /// `(em)^n sqrt(n-1) / (2n)^{n-1}`; may overflow to infinity.
    pub combinatorial_factor: f64,
    pub log_combinatorial_factor: f64,
    /// `exp(-sin^{n-1}(phi) (m - n) / sqrt(8n))`.
    pub exp_term: f64,
    /// `exp(-(m - 2n + 1)^2 / (2m - 2))`.
    pub hoeffding_term: f64,
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Number of regions `r(n, k) = 2 sum_{i<n} C(k-1, i)` cut from the sphere in
/// `R^n` by `k` generic hyperplanes through the origin.
pub fn regions_count(n: u64, k: u64) -> Result<BigUint> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter("regions_count needs n, k >= 1".into()));
    }
    let mut s = BigUint::zero();
    for i in 0..n.min(k) {
        s += binomial(k - 1, i);
    }
    Ok(s * 2u32)
}

/// Exact probability that `m_a` uniform semispheres in `R^n` cover the sphere:
/// `1 - r(n, m_a) / 2^{m_a}`.
pub fn halfsphere_cover_prob_exact(m_a: u64, n: u64) -> Result<BigRational> {
    let r = regions_count(n, m_a)?;
    let denom = BigUint::one() << (m_a as usize);
    Ok(BigRational::one() - BigRational::new(r.into(), denom.into()))
}

/// The same probability from the binomial sum
/// `1 - 2^{1-m_a} sum_{k<n} C(m_a - 1, k)`.
pub fn halfsphere_cover_prob_binomial(m_a: u64, n: u64) -> Result<BigRational> {
    if n == 0 || m_a == 0 {
        return Err(Error::InvalidParameter("need m_a, n >= 1".into()));
    }
    let mut s = BigUint::zero();
    for k in 0..n.min(m_a) {
        s += binomial(m_a - 1, k);
    }
    let denom = BigUint::one() << ((m_a - 1) as usize);
    Ok(BigRational::one() - BigRational::new(s.into(), denom.into()))
}

pub fn halfsphere_cover_prob(m_a: u64, n: u64) -> Result<f64> {
    Ok(rational_to_f64(&halfsphere_cover_prob_exact(m_a, n)?))
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // both parts overflow: scale down by a common power of two
        let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
        let num = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let den = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        num / den
    })
}

/// `P(Bin(m, p) <= n) <= exp(-2 (pm - n)^2 / m)` when `pm > n`; 1 otherwise.
pub fn hoeffding_tail(m: f64, n: f64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    if !(m > 0.0) {
        return Err(Error::InvalidParameter("hoeffding_tail needs m > 0".into()));
    }
    let d = p * m - n;
    Ok(if d > 0.0 { (-2.0 * d * d / m).exp() } else { 1.0 })
}

/// Exact `P(Bin(m, p) <= n) = sum_{k<=n} C(m,k) p^k (1-p)^{m-k}`.
pub fn binomial_cdf_exact(m: u64, n: u64, p: &BigRational) -> BigRational {
    let q = BigRational::one() - p;
    let mut total = BigRational::zero();
    for k in 0..=n.min(m) {
        let c = BigRational::from_integer(binomial(m, k).into());
        total += c * num_traits::pow(p.clone(), k as usize) * num_traits::pow(q.clone(), (m - k) as usize);
    }
    total
}

/// Probability that `m` random semispheres cover every point within the angle
/// budget set by accuracy `alpha`: `1 - exp(-(alpha m - 2n)^2 / (2m))`.
pub fn neighbor_cover_bound(m: f64, n: f64, alpha: f64) -> TheoryBound {
    let valid = alpha > 0.0 && alpha <= 1.0 && m > 0.0 && alpha * m > 2.0 * n;
    let value = if valid {
        1.0 - hoeffding_tail(m, n, alpha / 2.0).unwrap_or(1.0)
    } else {
        0.0
    };
    TheoryBound::new(
        FormulaId::NeighborCover,
        valid,
        value,
        &[("m", m), ("n", n), ("alpha", alpha)],
    )
}

/// Success probability lower bound for random measurements uniform on the
/// sphere: `1 - exp(-(alpha m - c n)^2 / (2m))` with `c = 4` (complex) or
/// `c = 2` (real), valid when `alpha m > c n`.
pub fn phasemax_success_bound(m: f64, n: f64, alpha: f64, field: Field) -> TheoryBound {
    success_bound_with_constant(m, n, alpha, field, field_constant(field))
}

fn field_constant(field: Field) -> f64 {
    match field {
        Field::Real => 2.0,
        Field::Complex => 4.0,
    }
}

/// [`phasemax_success_bound`] with an explicit dimension multiplier; used to
/// check that the harness notices a wrong constant.
pub fn success_bound_with_constant(
    m: f64,
    n: f64,
    alpha: f64,
    field: Field,
    c: f64,
) -> TheoryBound {
    let valid = alpha > 0.0 && alpha <= 1.0 && m > 0.0 && alpha * m > c * n;
    let value = if valid {
        let d = alpha * m - c * n;
        1.0 - (-d * d / (2.0 * m)).exp()
    } else {
        0.0
    };
    let id = match field {
        Field::Real => FormulaId::SuccessReal,
        Field::Complex => FormulaId::SuccessComplex,
    };
    TheoryBound::new(id, valid, value, &[("m", m), ("n", n), ("alpha", alpha)])
}

/// `ln s_n` with `s_n = 2 pi^n / Gamma(n)`, the surface area of the unit
/// sphere of `C^n`.
pub fn ln_sphere_area_complex(n: f64) -> f64 {
    std::f64::consts::LN_2 + n * PI.ln() - ln_gamma(n)
}

/// Bound for measurement densities bounded below by `ell_d` on the complex
/// unit sphere: the uniform bound at `m_U = floor(m_D s_n ell_d)`.
pub fn nonuniform_bound(m_d: f64, n: f64, alpha: f64, ell_d: f64) -> TheoryBound {
    let ln_sn = ln_sphere_area_complex(n);
    let s_n = ln_sn.exp();
    let raw = m_d * (ln_sn + ell_d.ln()).exp();
    let m_u = if ell_d > 0.0 {
        // absorb rounding so ell_d = k / s_n lands exactly on k m_D
        (raw * (1.0 + 1e-12)).floor()
    } else {
        0.0
    };
    let inner = phasemax_success_bound(m_u, n, alpha, Field::Complex);
    let valid = ell_d > 0.0 && inner.valid;
    TheoryBound::new(
        FormulaId::Nonuniform,
        valid,
        inner.value,
        &[
            ("m_D", m_d),
            ("n", n),
            ("alpha", alpha),
            ("ell_D", ell_d),
            ("s_n", s_n),
            ("m_U", m_u),
        ],
    )
}

/// Lower bound on the probability that `m` uniform caps of angle `phi` cover
/// the sphere of `R^n`, valid for `n >= 9` and `m > 2n`.
pub fn small_caps_cover_bound(m: f64, n: f64, phi: f64) -> (TheoryBound, SmallCapsTrace) {
    // cos(fl(pi/2)) is 6e-17, which the huge prefactor would amplify
    let eps = if phi >= PI / 2.0 - 1e-12 { 0.0 } else { phi.cos().max(0.0) };
    let sin_pow = if n >= 1.0 { phi.sin().max(0.0).powf(n - 1.0) } else { 0.0 };
    let lambda_floor = sin_pow / (8.0 * n).sqrt();
    let log_comb = n * (E * m).ln() - (n - 1.0) * (2.0 * n).ln() + 0.5 * (n - 1.0).ln();
    let exp_arg = -sin_pow * (m - n) / (8.0 * n).sqrt();
    let hoeff = if m > 1.0 {
        hoeffding_tail(m - 1.0, n - 1.0, 0.5).unwrap_or(1.0)
    } else {
        1.0
    };
    let trace = SmallCapsTrace {
        epsilon_cos: eps,
        lambda_floor,
        combinatorial_factor: log_comb.exp(),
        log_combinatorial_factor: log_comb,
        exp_term: exp_arg.exp(),
        hoeffding_term: hoeff,
    };
    let valid = n >= 9.0 && m > 2.0 * n && phi > 0.0 && phi <= PI / 2.0;
    let cap_term = if eps == 0.0 {
        0.0
    } else {
        (log_comb + exp_arg + eps.ln()).exp()
    };
    let value = 1.0 - cap_term - hoeff;
    let bound = TheoryBound::new(
        FormulaId::SmallCaps,
        valid,
        value,
        &[("m", m), ("n", n), ("phi", phi), ("epsilon", eps)],
    );
    (bound, trace)
}

/// Error and probability bounds for noisy magnitudes `b_i^2 = bhat_i^2 + eta_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseBound {
    /// `epsilon + (1 - s) ||x0||`.
    pub error_bound: f64,
    /// `min(1, min_i b_i / bhat_i)`.
    pub s: f64,
    /// `max_i (bhat_i^2 (1 - s^2) + eta_i) / (s bhat_i)`; for nonnegative noise
    /// this is `max_i eta_i / bhat_i`.
    pub r: f64,
    pub epsilon: f64,
    /// `arccos(r / 2 epsilon)`.
    pub theta: f64,
    /// `theta - angle(x0, xhat)`.
    pub phi: f64,
    /// Probability that the error bound holds (small-cap covering in `R^{2n}`).
    pub probability: TheoryBound,
    pub trace: SmallCapsTrace,
}

/// `s` and the shrunk noise ratio `r` of a noisy instance.
pub fn noise_ratios(b_hat: &[f64], eta: &[f64]) -> Result<(f64, f64)> {
    if b_hat.len() != eta.len() {
        return Err(Error::DimensionMismatch {
            expected: b_hat.len(),
            got: eta.len(),
        });
    }
    let mut s2 = f64::INFINITY;
    for (i, (&bh, &e)) in b_hat.iter().zip(eta).enumerate() {
        let b2 = bh * bh + e;
        if !(b2 > 0.0) && !(bh == 0.0 && e == 0.0) {
            return Err(Error::NegativeMagnitude { index: i, value: b2 });
        }
        if bh > 0.0 {
            s2 = s2.min(b2 / (bh * bh));
        }
    }
    let s = s2.min(1.0).sqrt();
    let mut r: f64 = 0.0;
    for (&bh, &e) in b_hat.iter().zip(eta) {
        if bh > 0.0 {
            r = r.max((bh * bh * (1.0 - s * s) + e) / (s * bh));
        } else if e > 0.0 {
            r = f64::INFINITY;
        }
    }
    Ok((s, r))
}

/// Noise analysis for an instance with `m` unit-norm measurements in `C^n`.
pub fn noise_error_bound(
    m: f64,
    n: f64,
    angle_x0_xhat: f64,
    b_hat: &[f64],
    eta: &[f64],
    epsilon: f64,
    truth_norm: f64,
) -> Result<NoiseBound> {
    let (s, r) = noise_ratios(b_hat, eta)?;
    noise_bound_from_ratios(m, n, angle_x0_xhat, s, r, epsilon, truth_norm)
}

/// [`noise_error_bound`] from precomputed ratios `s` and `r`.
pub fn noise_bound_from_ratios(
    m: f64,
    n: f64,
    angle_x0_xhat: f64,
    s: f64,
    r: f64,
    epsilon: f64,
    truth_norm: f64,
) -> Result<NoiseBound> {
    if !(s > 0.0 && s <= 1.0) || !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < s <= 1 and r >= 0 (got s = {s}, r = {r})"
        )));
    }
    if !(epsilon > r / 2.0) {
        return Err(Error::InvalidParameter(format!(
            "error level {epsilon} must exceed r/2 = {}",
            r / 2.0
        )));
    }
    let theta = (r / (2.0 * epsilon)).acos();
    let phi = theta - angle_x0_xhat;
    let (cover, trace) = small_caps_cover_bound(m, 2.0 * n, phi);
    let valid = cover.valid && n >= 5.0 && m > 4.0 * n;
    let probability = TheoryBound::new(
        FormulaId::Noise,
        valid,
        cover.value,
        &[
            ("m", m),
            ("n", n),
            ("r", r),
            ("s", s),
            ("epsilon", epsilon),
            ("phi", phi),
        ],
    );
    Ok(NoiseBound {
        error_bound: epsilon + (1.0 - s) * truth_norm,
        s,
        r,
        epsilon,
        theta,
        phi,
        probability,
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsCosMoment {
    pub exact: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `E|cos angle(x, y)|` for independent uniform directions, with its
/// elementary brackets. The complex case is the real one in dimension `2n`.
pub fn expected_abs_cos(n: u64, field: Field) -> Result<AbsCosMoment> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let d = field.real_dim(n as usize) as f64;
    let exact = (ln_gamma(d / 2.0) - ln_gamma((d + 1.0) / 2.0)).exp() / PI.sqrt();
    Ok(AbsCosMoment {
        exact,
        lower: (2.0 / (PI * d)).sqrt(),
        upper: (2.0 / (PI * (d - 0.5))).sqrt(),
    })
}

/// Lower bound `sqrt(8 / (pi^3 d))` on the expected accuracy of a uniformly
/// random approximation vector, `d` the real dimension.
pub fn random_init_alpha_floor(n: u64, field: Field) -> f64 {
    let d = field.real_dim(n as usize) as f64;
    (8.0 / (PI.powi(3) * d)).sqrt()
}

/// Constant `c` such that `m > c n^{3/2}` measurements make a random
/// approximation vector sufficient.
pub fn random_init_constant(field: Field) -> f64 {
    match field {
        Field::Real => (PI.powi(3) / 2.0).sqrt(),
        Field::Complex => 2.0 * PI.powi(3).sqrt(),
    }
}

pub fn random_init_sample_threshold(n: u64, field: Field) -> f64 {
    random_init_constant(field) * (n as f64).powf(1.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_bigint::BigInt;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn region_count_examples() {
        for n in 1..6 {
            assert_eq!(regions_count(n, 1).unwrap(), BigUint::from(2u32));
        }
        for k in 1..20 {
            assert_eq!(regions_count(2, k).unwrap(), BigUint::from(2 * k));
        }
        assert_eq!(regions_count(3, 3).unwrap(), BigUint::from(8u32));
        assert_eq!(regions_count(4, 6).unwrap(), BigUint::from(52u32));
        assert!(regions_count(0, 3).is_err());
    }

    #[test]
    fn region_count_satisfies_the_slicing_recurrence() {
        for n in 2..12u64 {
            for k in 2..30u64 {
                assert_eq!(
                    regions_count(n, k).unwrap(),
                    regions_count(n, k - 1).unwrap() + regions_count(n - 1, k - 1).unwrap()
                );
            }
        }
    }

    #[test]
    fn cover_prob_examples() {
        assert_eq!(halfsphere_cover_prob_exact(5, 5).unwrap(), BigRational::zero());
        assert_eq!(halfsphere_cover_prob_exact(2, 1).unwrap(), rat(1, 2));
        assert_eq!(halfsphere_cover_prob_exact(3, 2).unwrap(), rat(1, 4));
        assert_eq!(halfsphere_cover_prob_exact(6, 3).unwrap(), rat(1, 2));
    }

    #[test]
    fn large_rationals_convert() {
        let p = halfsphere_cover_prob(2000, 900).unwrap();
        assert!(p > 0.99 && p <= 1.0);
    }

    #[test]
    fn neighbor_cover_examples() {
        let b = neighbor_cover_bound(20.0, 10.0, 1.0);
        assert!(!b.valid && b.value == 0.0);
        let b = neighbor_cover_bound(100.0, 10.0, 1.0);
        assert!(b.valid);
        assert_relative_eq!(b.value, 1.0 - (-32.0f64).exp(), max_relative = 1e-15);
        assert!(!neighbor_cover_bound(100.0, 10.0, 0.0).valid);
    }

    #[test]
    fn success_bound_examples() {
        let b = phasemax_success_bound(400.0, 100.0, 1.0, Field::Complex);
        assert!(!b.valid && b.value == 0.0);
        let b = phasemax_success_bound(800.0, 100.0, 1.0, Field::Complex);
        assert_relative_eq!(b.value, 1.0 - (-100.0f64).exp());
        let b = phasemax_success_bound(900.0, 100.0, 0.5, Field::Real);
        assert_relative_eq!(b.value, 1.0 - (-(250.0f64 * 250.0) / 1800.0).exp());
        assert_eq!(b.formula_id, FormulaId::SuccessReal);
    }

    #[test]
    fn nonuniform_examples() {
        for n in [1.0, 2.0, 7.0, 40.0] {
            let s_n = ln_sphere_area_complex(n).exp();
            let b = nonuniform_bound(900.0, n, 0.8, 1.0 / s_n);
            assert_eq!(b.params["m_U"], 900.0);
            assert_eq!(b.value, phasemax_success_bound(900.0, n, 0.8, Field::Complex).value);
        }
        assert!(!nonuniform_bound(900.0, 2.0, 0.8, 0.0).valid);
        let s2 = 2.0 * PI * PI;
        assert_relative_eq!(ln_sphere_area_complex(2.0).exp(), s2, max_relative = 1e-14);
        assert_eq!(nonuniform_bound(100.0, 2.0, 1.0, 0.9 / s2).params["m_U"], 90.0);
    }

    #[test]
    fn small_caps_examples() {
        let (b, t) = small_caps_cover_bound(100.0, 10.0, PI / 2.0);
        assert!(b.valid);
        let h = (-(81.0f64 * 81.0) / 198.0).exp();
        assert_relative_eq!(b.value, 1.0 - h, max_relative = 1e-14);
        assert_relative_eq!(t.hoeffding_term, h, max_relative = 1e-14);
        assert!(!small_caps_cover_bound(18.0, 9.0, 1.0).0.valid);
        let (b, t) = small_caps_cover_bound(1e6, 10.0, PI / 3.0);
        assert!((0.0..=1.0).contains(&b.value));
        assert!(t.combinatorial_factor.is_finite() && t.exp_term >= 0.0);
    }

    #[test]
    fn noise_examples() {
        let bh = [0.5, 0.25, 1.0];
        let nb = noise_error_bound(400.0, 20.0, 0.3, &bh, &[0.0; 3], 0.05, 1.0).unwrap();
        assert_eq!((nb.s, nb.r), (1.0, 0.0));
        assert_relative_eq!(nb.phi, PI / 2.0 - 0.3);
        assert_eq!(nb.error_bound, 0.05);

        let eta = [0.05, 0.01, 0.02];
        let nb = noise_error_bound(400.0, 20.0, 0.0, &bh, &eta, 0.1, 1.0).unwrap();
        assert_relative_eq!(nb.r, 0.1);
        assert_relative_eq!(nb.theta, PI / 3.0, max_relative = 1e-12);

        assert!(noise_error_bound(400.0, 20.0, 0.0, &bh, &eta, 0.05, 1.0).is_err());
        assert!(noise_ratios(&[0.5], &[-0.3]).is_err());
    }

    #[test]
    fn shrunk_ratio_handles_negative_noise() {
        let bh = [1.0, 0.5];
        let eta = [-0.19, 0.01];
        let (s, r) = noise_ratios(&bh, &eta).unwrap();
        assert_relative_eq!(s, 0.9);
        let z0: f64 = 1.0 * (1.0 - 0.81) - 0.19;
        let z1 = 0.25 * (1.0 - 0.81) + 0.01;
        assert_relative_eq!(r, (z0 / 0.9).max(z1 / (0.9 * 0.5)));
    }

    #[test]
    fn abs_cos_examples() {
        assert_relative_eq!(expected_abs_cos(1, Field::Real).unwrap().exact, 1.0, max_relative = 1e-13);
        assert_relative_eq!(
            expected_abs_cos(2, Field::Real).unwrap().exact,
            2.0 / PI,
            max_relative = 1e-13
        );
        let c = expected_abs_cos(100, Field::Real).unwrap();
        assert_relative_eq!(c.lower, (2.0 / (100.0 * PI)).sqrt());
        assert_relative_eq!(c.upper, (2.0 / (99.5 * PI)).sqrt());
        let c = expected_abs_cos(7, Field::Complex).unwrap();
        assert_relative_eq!(c.lower, (1.0 / (7.0 * PI)).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(c.upper, (4.0 / (27.0 * PI)).sqrt(), max_relative = 1e-15);
        for n in 1..=10_000 {
            for f in [Field::Real, Field::Complex] {
                let c = expected_abs_cos(n, f).unwrap();
                assert!(c.lower <= c.exact * (1.0 + 1e-12) && c.exact <= c.upper * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn random_init_examples() {
        assert_relative_eq!(random_init_alpha_floor(1, Field::Real), (8.0 / PI.powi(3)).sqrt());
        assert_relative_eq!(
            random_init_alpha_floor(3, Field::Complex),
            (4.0 / (PI.powi(3) * 3.0)).sqrt(),
            max_relative = 1e-15
        );
        for n in 1..50 {
            assert!(random_init_alpha_floor(n + 1, Field::Real) < random_init_alpha_floor(n, Field::Real));
        }
        assert_relative_eq!(random_init_constant(Field::Complex), 2.0 * PI.powf(1.5));
    }

    #[test]
    fn hoeffding_examples() {
        assert_eq!(hoeffding_tail(20.0, 10.0, 0.5).unwrap(), 1.0);
        assert_eq!(hoeffding_tail(20.0, 0.0, 0.0).unwrap(), 1.0);
        assert!(hoeffding_tail(20.0, 0.0, 1.5).is_err());
        let exact = rational_to_f64(&binomial_cdf_exact(50, 10, &rat(1, 2)));
        assert!(exact <= hoeffding_tail(50.0, 10.0, 0.5).unwrap());
        assert_eq!(binomial_cdf_exact(7, 7, &rat(1, 3)), BigRational::one());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn regions_satisfy_pascal_recursion(n in 2u64..12, k in 2u64..40) {
                // adding a plane splits every region of the trace it cuts
                let lhs = regions_count(n, k).unwrap();
                let rhs = regions_count(n, k - 1).unwrap() + regions_count(n - 1, k - 1).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn cover_forms_agree(n in 1u64..20, m in 1u64..80) {
                prop_assert_eq!(
                    halfsphere_cover_prob_exact(m, n).unwrap(),
                    halfsphere_cover_prob_binomial(m, n).unwrap()
                );
            }

            #[test]
            fn success_bound_is_monotone_in_m(n in 2.0..200.0f64, alpha in 0.05..1.0f64, extra in 1.0..500.0f64) {
                let m = 4.0 * n / alpha + 1.0;
                let lo = phasemax_success_bound(m, n, alpha, Field::Complex).value;
                let hi = phasemax_success_bound(m + extra, n, alpha, Field::Complex).value;
                prop_assert!(hi >= lo - 1e-12);
            }
        }
    }
}
