//! Forward-mode automatic differentiation with multi-component dual numbers.
//!
//! Model code in this crate is written once against the [`Real`] trait and
//! evaluated either with plain `f64` or with [`Dual<N>`], which carries the
//! value together with `N` directional derivatives. Seeding the `N` inputs of
//! a map with unit tangents yields its full Jacobian in one evaluation.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use thiserror::Error;

/// Scalar type accepted by the differentiable model code.
pub trait Real:
    Copy
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn from_f64(value: f64) -> Self;

    /// The real (value) part.
    fn value(self) -> f64;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn atan(self) -> Self;
    fn atan2(self, x: Self) -> Self;
    fn sqrt(self) -> Self;

    /// Evaluates a scalar function of `self` whose value and slope at
    /// `self.value()` are already known.
    ///
    /// For `f64` this is `value`; for dual numbers the tangent is scaled by
    /// `slope`. Used for quantities computed numerically (integrated frames,
    /// cached quadratures) that still need exact first derivatives.
    fn lift(self, value: f64, slope: f64) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn powi2(self) -> Self {
        self * self
    }

    fn is_finite(self) -> bool;
}

impl Real for f64 {
    #[inline]
    fn from_f64(value: f64) -> Self {
        value
    }
    #[inline]
    fn value(self) -> f64 {
        self
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn tan(self) -> Self {
        f64::tan(self)
    }
    #[inline]
    fn atan(self) -> Self {
        f64::atan(self)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn lift(self, value: f64, _slope: f64) -> Self {
        value
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

/// A dual number `re + Σ eps[i] ε_i` with `ε_i ε_j = 0`.
#[derive(Clone, Copy, PartialEq)]
pub struct Dual<const N: usize> {
    pub re: f64,
    pub eps: [f64; N],
}

impl<const N: usize> Dual<N> {
    pub const fn constant(re: f64) -> Self {
        Self { re, eps: [0.0; N] }
    }

    /// Independent variable seeded along input direction `index`.
    pub fn variable(re: f64, index: usize) -> Self {
        let mut eps = [0.0; N];
        eps[index] = 1.0;
        Self { re, eps }
    }

    #[inline]
    fn chain(self, re: f64, slope: f64) -> Self {
        let mut eps = self.eps;
        for e in eps.iter_mut() {
            *e *= slope;
        }
        Self { re, eps }
    }
}

impl<const N: usize> fmt::Debug for Dual<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {:?}ε", self.re, self.eps)
    }
}

impl<const N: usize> Add for Dual<N> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self.re += rhs.re;
        for (a, b) in self.eps.iter_mut().zip(rhs.eps.iter()) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for Dual<N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        self.re -= rhs.re;
        for (a, b) in self.eps.iter_mut().zip(rhs.eps.iter()) {
            *a -= b;
        }
        self
    }
}

impl<const N: usize> Mul for Dual<N> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut eps = [0.0; N];
        for i in 0..N {
            eps[i] = self.eps[i] * rhs.re + self.re * rhs.eps[i];
        }
        Self { re: self.re * rhs.re, eps }
    }
}

impl<const N: usize> Div for Dual<N> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let inv = 1.0 / rhs.re;
        let re = self.re * inv;
        let mut eps = [0.0; N];
        for i in 0..N {
            eps[i] = (self.eps[i] - re * rhs.eps[i]) * inv;
        }
        Self { re, eps }
    }
}

impl<const N: usize> Neg for Dual<N> {
    type Output = Self;
    #[inline]
    fn neg(mut self) -> Self {
        self.re = -self.re;
        for e in self.eps.iter_mut() {
            *e = -*e;
        }
        self
    }
}

impl<const N: usize> Add<f64> for Dual<N> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: f64) -> Self {
        self.re += rhs;
        self
    }
}

impl<const N: usize> Sub<f64> for Dual<N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: f64) -> Self {
        self.re -= rhs;
        self
    }
}

impl<const N: usize> Mul<f64> for Dual<N> {
    type Output = Self;
    #[inline]
    fn mul(mut self, rhs: f64) -> Self {
        self.re *= rhs;
        for e in self.eps.iter_mut() {
            *e *= rhs;
        }
        self
    }
}

impl<const N: usize> Div<f64> for Dual<N> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: f64) -> Self {
        self * (1.0 / rhs)
    }
}

impl<const N: usize> AddAssign for Dual<N> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const N: usize> SubAssign for Dual<N> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<const N: usize> MulAssign for Dual<N> {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<const N: usize> Real for Dual<N> {
    #[inline]
    fn from_f64(value: f64) -> Self {
        Self::constant(value)
    }
    #[inline]
    fn value(self) -> f64 {
        self.re
    }
    #[inline]
    fn sin(self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }
    #[inline]
    fn cos(self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }
    #[inline]
    fn tan(self) -> Self {
        let t = self.re.tan();
        self.chain(t, 1.0 + t * t)
    }
    #[inline]
    fn atan(self) -> Self {
        self.chain(self.re.atan(), 1.0 / (1.0 + self.re * self.re))
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        let r2 = self.re * self.re + x.re * x.re;
        let mut eps = [0.0; N];
        for i in 0..N {
            eps[i] = (x.re * self.eps[i] - self.re * x.eps[i]) / r2;
        }
        Self { re: self.re.atan2(x.re), eps }
    }
    #[inline]
    fn sqrt(self) -> Self {
        let r = self.re.sqrt();
        self.chain(r, 0.5 / r)
    }
    #[inline]
    fn lift(self, value: f64, slope: f64) -> Self {
        self.chain(value, slope)
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.eps.iter().all(|e| e.is_finite())
    }
}

#[derive(Debug, Error)]
pub enum JacobianError<E> {
    #[error("derivative is not finite at output {output} (primitive singularity)")]
    NonDifferentiablePoint { output: usize },
    #[error(transparent)]
    Map(E),
}

/// Values and Jacobian of `f` at `x`, computed with one dual evaluation.
///
/// Returns `NonDifferentiablePoint` when any output value or tangent is not
/// finite (division by zero, `sqrt` at zero and similar).
pub fn try_jacobian<const N: usize, E, F>(
    f: F,
    x: &[f64; N],
) -> Result<(Vec<f64>, DMatrix<f64>), JacobianError<E>>
where
    F: FnOnce(&[Dual<N>; N]) -> Result<Vec<Dual<N>>, E>,
{
    let mut seeded = [Dual::<N>::constant(0.0); N];
    for (i, (slot, &xi)) in seeded.iter_mut().zip(x.iter()).enumerate() {
        *slot = Dual::variable(xi, i);
    }
    let out = f(&seeded).map_err(JacobianError::Map)?;
    let mut values = Vec::with_capacity(out.len());
    let mut jac = DMatrix::zeros(out.len(), N);
    for (row, d) in out.iter().enumerate() {
        if !d.is_finite() {
            return Err(JacobianError::NonDifferentiablePoint { output: row });
        }
        values.push(d.re);
        for (col, e) in d.eps.iter().enumerate() {
            jac[(row, col)] = *e;
        }
    }
    Ok((values, jac))
}

/// Jacobian of an infallible map.
pub fn jacobian<const N: usize, F>(
    f: F,
    x: &[f64; N],
) -> Result<(Vec<f64>, DMatrix<f64>), JacobianError<std::convert::Infallible>>
where
    F: FnOnce(&[Dual<N>; N]) -> Vec<Dual<N>>,
{
    try_jacobian(|d| Ok(f(d)), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn square_derivative() {
        let (v, j) = jacobian(|x: &[Dual<1>; 1]| vec![x[0] * x[0]], &[3.0]).unwrap();
        assert_eq!(v[0], 9.0);
        assert_eq!(j[(0, 0)], 6.0);
    }

    #[test]
    fn linear_map_is_exact() {
        let m = [[1.5, -2.0, 0.25], [0.0, 4.0, -1.0]];
        let (_, j) = jacobian(
            |x: &[Dual<3>; 3]| {
                m.iter()
                    .map(|row| x[0] * row[0] + x[1] * row[1] + x[2] * row[2])
                    .collect()
            },
            &[0.3, -0.7, 2.0],
        )
        .unwrap();
        for r in 0..2 {
            for c in 0..3 {
                assert_eq!(j[(r, c)], m[r][c]);
            }
        }
    }

    #[test]
    fn primitives_match_central_differences() {
        let f = |x: [f64; 2]| -> f64 {
            (x[0].sin() * x[1].cos() + x[0].tan()).atan() + x[1].atan2(x[0]) + (x[0] * x[0] + x[1]).sqrt() / x[1]
        };
        let x = [0.4, 1.3];
        let (_, j) = jacobian(
            |d: &[Dual<2>; 2]| {
                let v = (d[0].sin() * d[1].cos() + d[0].tan()).atan()
                    + d[1].atan2(d[0])
                    + (d[0] * d[0] + d[1]).sqrt() / d[1];
                vec![v]
            },
            &x,
        )
        .unwrap();
        let h = 1e-6;
        for i in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (f(xp) - f(xm)) / (2.0 * h);
            assert_relative_eq!(j[(0, i)], fd, max_relative = 1e-7);
        }
    }

    #[test]
    fn division_by_zero_is_flagged() {
        let r = jacobian(|x: &[Dual<1>; 1]| vec![Dual::constant(1.0) / (x[0] - 2.0)], &[2.0]);
        assert!(matches!(r, Err(JacobianError::NonDifferentiablePoint { output: 0 })));
    }

    #[test]
    fn sqrt_at_zero_is_flagged() {
        let r = jacobian(|x: &[Dual<1>; 1]| vec![x[0].sqrt()], &[0.0]);
        assert!(matches!(r, Err(JacobianError::NonDifferentiablePoint { .. })));
    }

    #[test]
    fn lift_scales_tangent() {
        let s = Dual::<2> { re: 1.0, eps: [2.0, -1.0] };
        let l = s.lift(5.0, 3.0);
        assert_eq!(l.re, 5.0);
        assert_eq!(l.eps, [6.0, -3.0]);
        assert_eq!(1.0f64.lift(5.0, 3.0), 5.0);
    }
}
