//! Fixed-size vectors and matrices generic over [`Real`].
//!
//! nalgebra's generic scalars require a full `RealField` implementation; the
//! geometry here only needs 3-vectors, 2×2 and 3×3 matrices, so they are
//! spelled out directly.

use std::ops::{Add, Mul, Neg, Sub};

use crate::nlp::dual::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zeros() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn from_f64(v: Vec3<f64>) -> Self {
        Self::new(T::from_f64(v.x), T::from_f64(v.y), T::from_f64(v.z))
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn scale(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }

    pub fn scale_f64(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }

    pub fn values(self) -> Vec3<f64> {
        Vec3::new(self.x.value(), self.y.value(), self.z.value())
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }
}

impl Vec3<f64> {
    pub const E1: Self = Self { x: 1.0, y: 0.0, z: 0.0 };
    pub const E2: Self = Self { x: 0.0, y: 1.0, z: 0.0 };
    pub const E3: Self = Self { x: 0.0, y: 0.0, z: 1.0 };

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Row-major 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T> {
    pub m: [[T; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn zeros() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn det(&self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> T {
        self.m[0][0] + self.m[1][1]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    /// Adjugate inverse; the caller is responsible for checking `det`.
    pub fn inverse_unchecked(&self) -> Self {
        let inv = T::one() / self.det();
        Self::new(
            self.m[1][1] * inv,
            -self.m[0][1] * inv,
            -self.m[1][0] * inv,
            self.m[0][0] * inv,
        )
    }

    pub fn mul_vec(&self, v: [T; 2]) -> [T; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn values(&self) -> Mat2<f64> {
        Mat2::new(
            self.m[0][0].value(),
            self.m[0][1].value(),
            self.m[1][0].value(),
            self.m[1][1].value(),
        )
    }
}

impl Mat2<f64> {
    /// 2-norm condition number via the singular values of a 2×2 matrix.
    pub fn condition_number(&self) -> f64 {
        let [[a, b], [c, d]] = self.m;
        let s = a * a + b * b + c * c + d * d;
        let det = (a * d - b * c).abs();
        let disc = (s * s - 4.0 * det * det).max(0.0).sqrt();
        let smax = ((s + disc) / 2.0).sqrt();
        let smin2 = (s - disc) / 2.0;
        if smin2 <= 0.0 {
            return f64::INFINITY;
        }
        smax / smin2.sqrt()
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                m = m.max((self.m[r][c] - o.m[r][c]).abs());
            }
        }
        m
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// 3×3 matrix stored by columns; used for rotations `[e_s | e_y | e_n]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<T> {
    pub cols: [Vec3<T>; 3],
}

impl<T: Real> Mat3<T> {
    pub fn from_columns(c0: Vec3<T>, c1: Vec3<T>, c2: Vec3<T>) -> Self {
        Self { cols: [c0, c1, c2] }
    }

    pub fn from_rows(r: [[T; 3]; 3]) -> Self {
        Self::from_columns(
            Vec3::new(r[0][0], r[1][0], r[2][0]),
            Vec3::new(r[0][1], r[1][1], r[2][1]),
            Vec3::new(r[0][2], r[1][2], r[2][2]),
        )
    }

    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self::from_rows([[o, z, z], [z, o, z], [z, z, o]])
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        let c = self.cols[col];
        match row {
            0 => c.x,
            1 => c.y,
            _ => c.z,
        }
    }

    pub fn col(&self, i: usize) -> Vec3<T> {
        self.cols[i]
    }

    pub fn mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        self.cols[0].scale(v.x) + self.cols[1].scale(v.y) + self.cols[2].scale(v.z)
    }

    pub fn transpose(&self) -> Self {
        let mut r = [[T::zero(); 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(j, i);
            }
        }
        Self::from_rows(r)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_columns(
            self.cols[0] + o.cols[0],
            self.cols[1] + o.cols[1],
            self.cols[2] + o.cols[2],
        )
    }

    pub fn scale(&self, k: T) -> Self {
        Self::from_columns(self.cols[0].scale(k), self.cols[1].scale(k), self.cols[2].scale(k))
    }

    pub fn values(&self) -> Mat3<f64> {
        Mat3::from_columns(self.cols[0].values(), self.cols[1].values(), self.cols[2].values())
    }

    /// Skew-symmetric matrix `[w]×` with `[w]× v = w × v`.
    pub fn skew(w: Vec3<T>) -> Self {
        let z = T::zero();
        Self::from_rows([[z, -w.z, w.y], [w.z, z, -w.x], [-w.y, w.x, z]])
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::from_columns(self.mul_vec(o.cols[0]), self.mul_vec(o.cols[1]), self.mul_vec(o.cols[2]))
    }
}

impl Mat3<f64> {
    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        (0..3).map(|i| (self.cols[i] - o.cols[i]).max_abs()).fold(0.0, f64::max)
    }

    pub fn det(&self) -> f64 {
        self.cols[0].dot(self.cols[1].cross(self.cols[2]))
    }
}
