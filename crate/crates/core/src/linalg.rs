//! Field-generic dense vectors and the measurement operator.
//!
//! Real signals live in the same complex container as complex ones, with the
//! imaginary parts pinned to zero. The inner product is conjugate-linear in
//! its first argument: `<a, b> = sum conj(a_k) b_k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Cx = Complex64;

pub const ZERO: Cx = Cx::new(0.0, 0.0);
pub const ONE: Cx = Cx::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Real dimension of `H^n`.
    pub fn real_dim(self, n: usize) -> usize {
        match self {
            Field::Real => n,
            Field::Complex => 2 * n,
        }
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Field::Real => "real",
            Field::Complex => "complex",
        })
    }
}

impl std::str::FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            other => Err(Error::InvalidParameter(format!("unknown field `{other}`"))),
        }
    }
}

/// `z/|z|`, with `phase(0) = 1`.
#[inline]
pub fn phase(z: Cx) -> Cx {
    let r = z.norm();
    if r > 0.0 {
        z / r
    } else {
        ONE
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    entries: Vec<Cx>,
    field: Field,
}

impl Signal {
    pub fn new(entries: Vec<Cx>, field: Field) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("signal length must be at least 1".into()));
        }
        if field == Field::Real && entries.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidParameter(
                "real signal with nonzero imaginary part".into(),
            ));
        }
        Ok(Self { entries, field })
    }

    pub fn real(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "signal length must be at least 1");
        Self {
            entries: values.iter().map(|&v| Cx::new(v, 0.0)).collect(),
            field: Field::Real,
        }
    }

    pub fn complex(entries: Vec<Cx>) -> Self {
        assert!(!entries.is_empty(), "signal length must be at least 1");
        Self {
            entries,
            field: Field::Complex,
        }
    }

    pub fn zeros(n: usize, field: Field) -> Self {
        assert!(n >= 1, "signal length must be at least 1");
        Self {
            entries: vec![ZERO; n],
            field,
        }
    }

    /// Unit basis vector `e_k`.
    pub fn basis(n: usize, k: usize, field: Field) -> Self {
        let mut s = Self::zeros(n, field);
        s.entries[k] = ONE;
        s
    }

    /// Builds a signal from its real embedding `(re_0, .., re_{n-1}, im_0, .., im_{n-1})`
    /// (complex) or `(x_0, .., x_{n-1})` (real).
    pub fn from_real_embedding(v: &[f64], field: Field) -> Self {
        match field {
            Field::Real => Self::real(v),
            Field::Complex => {
                let n = v.len() / 2;
                Self::complex((0..n).map(|k| Cx::new(v[k], v[n + k])).collect())
            }
        }
    }

    pub fn real_embedding(&self) -> Vec<f64> {
        match self.field {
            Field::Real => self.entries.iter().map(|z| z.re).collect(),
            Field::Complex => self
                .entries
                .iter()
                .map(|z| z.re)
                .chain(self.entries.iter().map(|z| z.im))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn entries(&self) -> &[Cx] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Cx> {
        self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Multiplies by a complex scalar. A real signal only accepts real scalars.
    pub fn scale(&self, c: Cx) -> Self {
        debug_assert!(self.field == Field::Complex || c.im == 0.0);
        Self {
            entries: self.entries.iter().map(|&z| z * c).collect(),
            field: self.field,
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|&z| z * c).collect(),
            field: self.field,
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let nrm = self.norm();
        if nrm == 0.0 {
            return Err(Error::ZeroNorm("normalize"));
        }
        Ok(Self {
            entries: self.entries.iter().map(|&z| z / nrm).collect(),
            field: self.field,
        })
    }

    fn check_compatible(&self, other: &Signal) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Signal) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
            field: self.field,
        })
    }

    pub fn sub(&self, other: &Signal) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
            field: self.field,
        })
    }

    pub fn distance(&self, other: &Signal) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }
}

/// `<a, b> = sum conj(a_k) b_k`.
pub fn inner(a: &Signal, b: &Signal) -> Result<Cx> {
    a.check_compatible(b)?;
    Ok(dot(&a.entries, &b.entries))
}

#[inline]
pub(crate) fn dot(a: &[Cx], b: &[Cx]) -> Cx {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

/// Angle in `[0, pi]` between `x` and `y` with respect to the real inner product.
pub fn angle_between(x: &Signal, y: &Signal) -> Result<f64> {
    let ip = inner(x, y)?;
    let nx = x.norm();
    let ny = y.norm();
    if nx == 0.0 {
        return Err(Error::ZeroNorm("angle_between: first argument"));
    }
    if ny == 0.0 {
        return Err(Error::ZeroNorm("angle_between: second argument"));
    }
    Ok((ip.re / (nx * ny)).clamp(-1.0, 1.0).acos())
}

/// Rotates `x` by a global phase so that `<x, reference>` is real and nonnegative.
pub fn align(x: &Signal, reference: &Signal) -> Result<Signal> {
    if reference.norm() == 0.0 {
        return Err(Error::ZeroNorm("align: reference"));
    }
    let w = phase(inner(x, reference)?);
    Ok(x.scale(w))
}

/// Accuracy `alpha = 1 - (2/pi) angle(x0, xhat)`.
pub fn accuracy(truth: &Signal, xhat: &Signal) -> Result<f64> {
    Ok(1.0 - std::f64::consts::FRAC_2_PI * angle_between(truth, xhat)?)
}

/// Dense complex vector split into real and imaginary planes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Planar {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl Planar {
    pub fn zeros(len: usize) -> Self {
        Self {
            re: vec![0.0; len],
            im: vec![0.0; len],
        }
    }

    pub fn from_cx(v: &[Cx]) -> Self {
        Self {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_cx(&self) -> Vec<Cx> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| Cx::new(r, i))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn get(&self, k: usize) -> Cx {
        Cx::new(self.re[k], self.im[k])
    }

    pub fn set(&mut self, k: usize, z: Cx) {
        self.re[k] = z.re;
        self.im[k] = z.im;
    }

    pub fn fill_zero(&mut self) {
        self.re.iter_mut().for_each(|v| *v = 0.0);
        self.im.iter_mut().for_each(|v| *v = 0.0);
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re.iter().map(|v| v * v).sum::<f64>() + self.im.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `self <- self + c * other` for a real `c`.
    pub fn axpy(&mut self, c: f64, other: &Planar) {
        for (a, b) in self.re.iter_mut().zip(&other.re) {
            *a += c * b;
        }
        for (a, b) in self.im.iter_mut().zip(&other.im) {
            *a += c * b;
        }
    }

    /// Real part of `<self, other>`.
    pub fn re_dot(&self, other: &Planar) -> f64 {
        self.re.iter().zip(&other.re).map(|(a, b)| a * b).sum::<f64>()
            + self.im.iter().zip(&other.im).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn dist_sqr(&self, other: &Planar) -> f64 {
        self.re
            .iter()
            .zip(&other.re)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            + self
                .im
                .iter()
                .zip(&other.im)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
    }
}

/// The measurement operator `x -> (<a_i, x>)_i` for `m` rows of length `n`.
///
/// Stored twice (row- and column-major) in split real/imaginary planes so that
/// both the forward map and its adjoint are plain axpy sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    m: usize,
    n: usize,
    field: Field,
    row_re: Vec<f64>,
    row_im: Vec<f64>,
    col_re: Vec<f64>,
    col_im: Vec<f64>,
}

impl MeasurementMatrix {
    /// Builds the operator from measurement vectors `a_i`.
    pub fn from_rows(rows: &[Signal]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidParameter("need at least one measurement".into()))?;
        let n = first.len();
        let field = first.field();
        let m = rows.len();
        let mut row_re = Vec::with_capacity(m * n);
        let mut row_im = Vec::with_capacity(m * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            if r.field() != field {
                return Err(Error::FieldMismatch);
            }
            row_re.extend(r.entries().iter().map(|z| z.re));
            row_im.extend(r.entries().iter().map(|z| z.im));
        }
        let mut col_re = vec![0.0; m * n];
        let mut col_im = vec![0.0; m * n];
        for i in 0..m {
            for k in 0..n {
                col_re[k * m + i] = row_re[i * n + k];
                col_im[k * m + i] = row_im[i * n + k];
            }
        }
        Ok(Self {
            m,
            n,
            field,
            row_re,
            row_im,
            col_re,
            col_im,
        })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn entry(&self, i: usize, k: usize) -> Cx {
        Cx::new(self.row_re[i * self.n + k], self.row_im[i * self.n + k])
    }

    pub fn row(&self, i: usize) -> Signal {
        let s = i * self.n;
        Signal {
            entries: (s..s + self.n)
                .map(|j| Cx::new(self.row_re[j], self.row_im[j]))
                .collect(),
            field: self.field,
        }
    }

    pub fn row_vectors(&self) -> Vec<Signal> {
        (0..self.m).map(|i| self.row(i)).collect()
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        let s = i * self.n;
        (s..s + self.n)
            .map(|j| self.row_re[j] * self.row_re[j] + self.row_im[j] * self.row_im[j])
            .sum::<f64>()
            .sqrt()
    }

    /// Returns a copy with row `i` multiplied by `scales[i]`.
    pub fn scale_rows(&self, scales: &[f64]) -> Self {
        assert_eq!(scales.len(), self.m);
        let mut out = self.clone();
        for i in 0..self.m {
            for k in 0..self.n {
                out.row_re[i * self.n + k] *= scales[i];
                out.row_im[i * self.n + k] *= scales[i];
                out.col_re[k * self.m + i] *= scales[i];
                out.col_im[k * self.m + i] *= scales[i];
            }
        }
        out
    }

    /// Keeps the rows whose indices are listed, in that order. Fails on an
    /// empty selection.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let rows: Vec<Signal> = idx.iter().map(|&i| self.row(i)).collect();
        Self::from_rows(&rows)
    }

    /// `out <- A x`.
    pub fn apply_planar(&self, x: &Planar, out: &mut Planar) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.m);
        out.fill_zero();
        let m = self.m;
        match self.field {
            Field::Real => {
                for k in 0..self.n {
                    let xr = x.re[k];
                    let col = &self.col_re[k * m..(k + 1) * m];
                    for (o, a) in out.re.iter_mut().zip(col) {
                        *o += a * xr;
                    }
                }
            }
            Field::Complex => {
                for k in 0..self.n {
                    let (xr, xi) = (x.re[k], x.im[k]);
                    let cr = &self.col_re[k * m..(k + 1) * m];
                    let ci = &self.col_im[k * m..(k + 1) * m];
                    for ((o, a), b) in out.re.iter_mut().zip(cr).zip(ci) {
                        *o += a * xr + b * xi;
                    }
                    for ((o, a), b) in out.im.iter_mut().zip(cr).zip(ci) {
                        *o += a * xi - b * xr;
                    }
                }
            }
        }
    }

    /// `out <- A^* y = sum_i a_i y_i`.
    pub fn adjoint_planar(&self, y: &Planar, out: &mut Planar) {
        debug_assert_eq!(y.len(), self.m);
        debug_assert_eq!(out.len(), self.n);
        out.fill_zero();
        let n = self.n;
        match self.field {
            Field::Real => {
                for i in 0..self.m {
                    let yr = y.re[i];
                    let row = &self.row_re[i * n..(i + 1) * n];
                    for (o, a) in out.re.iter_mut().zip(row) {
                        *o += a * yr;
                    }
                }
            }
            Field::Complex => {
                for i in 0..self.m {
                    let (yr, yi) = (y.re[i], y.im[i]);
                    let rr = &self.row_re[i * n..(i + 1) * n];
                    let ri = &self.row_im[i * n..(i + 1) * n];
                    for ((o, a), b) in out.re.iter_mut().zip(rr).zip(ri) {
                        *o += a * yr - b * yi;
                    }
                    for ((o, a), b) in out.im.iter_mut().zip(rr).zip(ri) {
                        *o += a * yi + b * yr;
                    }
                }
            }
        }
    }

    pub fn apply(&self, x: &Signal) -> Vec<Cx> {
        let mut out = Planar::zeros(self.m);
        self.apply_planar(&Planar::from_cx(x.entries()), &mut out);
        out.to_cx()
    }

    pub fn adjoint(&self, y: &[Cx]) -> Signal {
        let mut out = Planar::zeros(self.n);
        self.adjoint_planar(&Planar::from_cx(y), &mut out);
        let mut entries = out.to_cx();
        if self.field == Field::Real {
            entries.iter_mut().for_each(|z| z.im = 0.0);
        }
        Signal {
            entries,
            field: self.field,
        }
    }

    /// Estimates the spectral norm `||A||` by power iteration on `A^* A`.
    pub fn operator_norm(&self, max_iters: usize) -> f64 {
        let mut v = Planar::zeros(self.n);
        for k in 0..self.n {
            // deterministic start with no special alignment to any row
            v.re[k] = 1.0 + 0.37 * ((k as f64) * 0.713).sin();
            if self.field == Field::Complex {
                v.im[k] = 0.5 * ((k as f64) * 1.37).cos();
            }
        }
        let nv = v.norm();
        v.re.iter_mut().chain(v.im.iter_mut()).for_each(|z| *z /= nv);
        let mut av = Planar::zeros(self.m);
        let mut w = Planar::zeros(self.n);
        let mut est = 0.0;
        for _ in 0..max_iters.max(1) {
            self.apply_planar(&v, &mut av);
            self.adjoint_planar(&av, &mut w);
            let nw = w.norm();
            if nw == 0.0 {
                return 0.0;
            }
            let next = nw.sqrt();
            w.re.iter_mut().chain(w.im.iter_mut()).for_each(|z| *z /= nw);
            std::mem::swap(&mut v, &mut w);
            if (next - est).abs() <= 1e-10 * next {
                est = next;
                break;
            }
            est = next;
        }
        est
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    #[test]
    fn phase_examples() {
        assert_eq!(phase(Cx::new(0.0, 0.0)), ONE);
        assert_eq!(phase(Cx::new(3.0, 0.0)), ONE);
        assert_eq!(phase(Cx::new(0.0, -2.0)), Cx::new(0.0, -1.0));
    }

    #[test]
    fn inner_examples() {
        let e1 = Signal::basis(2, 0, Field::Complex);
        assert_eq!(inner(&e1, &e1).unwrap(), ONE);
        let a = Signal::complex(vec![Cx::new(0.0, 1.0), ZERO]);
        let b = Signal::complex(vec![ONE, ZERO]);
        assert_eq!(inner(&a, &b).unwrap(), Cx::new(0.0, -1.0));
        let p = Signal::real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let q = Signal::real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);
        assert_abs_diff_eq!(inner(&p, &q).unwrap().norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn inner_rejects_mismatch() {
        let a = Signal::zeros(2, Field::Real);
        let b = Signal::zeros(3, Field::Real);
        assert!(matches!(inner(&a, &b), Err(Error::DimensionMismatch { .. })));
        let c = Signal::zeros(2, Field::Complex);
        assert_eq!(inner(&a, &c), Err(Error::FieldMismatch));
    }

    #[test]
    fn angle_examples() {
        let x = Signal::complex(vec![Cx::new(1.0, 2.0), Cx::new(-0.5, 0.3)]);
        assert_abs_diff_eq!(angle_between(&x, &x).unwrap(), 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(
            angle_between(&x, &x.scale_real(-1.0)).unwrap(),
            PI,
            epsilon = 1e-7
        );
        let e1 = Signal::basis(3, 0, Field::Real);
        let e2 = Signal::basis(3, 1, Field::Real);
        assert_abs_diff_eq!(angle_between(&e1, &e2).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        assert!(angle_between(&e1, &Signal::zeros(3, Field::Real)).is_err());
    }

    #[test]
    fn align_examples() {
        let r = Signal::complex(vec![Cx::new(1.0, 0.5), Cx::new(0.2, -0.3)]);
        // already aligned
        let x = r.scale_real(2.0);
        assert_eq!(align(&x, &r).unwrap(), x);
        // x = j * ref is rotated back onto ref
        let jx = r.scale(Cx::new(0.0, 1.0));
        let back = align(&jx, &r).unwrap();
        assert_abs_diff_eq!(back.distance(&r).unwrap(), 0.0, epsilon = 1e-14);
        // orthogonal: phase(0) = 1 leaves x untouched
        let e1 = Signal::basis(2, 0, Field::Complex);
        let e2 = Signal::basis(2, 1, Field::Complex);
        assert_eq!(align(&e2, &e1).unwrap(), e2);
        assert!(align(&e1, &Signal::zeros(2, Field::Complex)).is_err());
    }

    #[test]
    fn real_signal_rejects_imaginary_part() {
        assert!(Signal::new(vec![Cx::new(1.0, 1e-3)], Field::Real).is_err());
        assert!(Signal::new(vec![], Field::Complex).is_err());
    }

    #[test]
    fn operator_matches_naive_products() {
        let rows = vec![
            Signal::complex(vec![Cx::new(1.0, 2.0), Cx::new(0.5, -1.0), Cx::new(0.0, 0.3)]),
            Signal::complex(vec![Cx::new(-0.4, 0.1), Cx::new(2.0, 0.0), Cx::new(1.0, 1.0)]),
        ];
        let a = MeasurementMatrix::from_rows(&rows).unwrap();
        let x = Signal::complex(vec![Cx::new(0.3, -0.2), Cx::new(1.0, 0.5), Cx::new(-1.0, 0.0)]);
        let ax = a.apply(&x);
        for (i, r) in rows.iter().enumerate() {
            let want = inner(r, &x).unwrap();
            assert_abs_diff_eq!((ax[i] - want).norm(), 0.0, epsilon = 1e-14);
        }
        let y = vec![Cx::new(0.7, 0.1), Cx::new(-0.2, 1.1)];
        let aty = a.adjoint(&y);
        // <Ax, y> = <x, A^* y>
        let lhs = dot(&ax, &y);
        let rhs = inner(&x, &aty).unwrap();
        assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn operator_norm_of_orthonormal_rows_is_one() {
        let rows: Vec<_> = (0..4).map(|k| Signal::basis(4, k, Field::Real)).collect();
        let a = MeasurementMatrix::from_rows(&rows).unwrap();
        assert_abs_diff_eq!(a.operator_norm(100), 1.0, epsilon = 1e-9);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn signal(n: usize) -> impl Strategy<Value = Signal> {
            prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), n)
                .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
                .prop_map(|v| Signal::complex(v.into_iter().map(|(a, b)| Cx::new(a, b)).collect()))
        }

        proptest! {
            #[test]
            fn phase_has_unit_modulus(re in -1e6..1e6f64, im in -1e6..1e6f64) {
                prop_assert!((phase(Cx::new(re, im)).norm() - 1.0).abs() < 1e-12);
            }

            #[test]
            fn align_is_idempotent((x, r) in (signal(5), signal(5))) {
                let once = align(&x, &r).unwrap();
                let twice = align(&once, &r).unwrap();
                prop_assert!(once.distance(&twice).unwrap() <= 1e-9 * x.norm());
                let ip = inner(&once, &r).unwrap();
                prop_assert!(ip.im.abs() <= 1e-9 * x.norm() * r.norm() && ip.re >= -1e-9);
            }

            #[test]
            fn angle_is_symmetric_and_bounded((x, y) in (signal(4), signal(4))) {
                let a = angle_between(&x, &y).unwrap();
                prop_assert!((a - angle_between(&y, &x).unwrap()).abs() < 1e-12);
                prop_assert!((0.0..=PI).contains(&a));
            }

            #[test]
            fn alignment_never_increases_distance((x, r) in (signal(3), signal(3))) {
                let aligned = align(&x, &r).unwrap();
                prop_assert!(aligned.distance(&r).unwrap() <= x.distance(&r).unwrap() + 1e-9);
            }
        }
    }
}
