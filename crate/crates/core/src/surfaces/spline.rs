//! Clamped cubic spline interpolation.

use thiserror::Error;

use crate::nlp::dual::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SplineError {
    #[error("a spline needs at least 2 breakpoints, got {0}")]
    TooFewPoints(usize),
    #[error("breakpoints must be strictly increasing (index {index}: {prev} then {next})")]
    NotIncreasing { index: usize, prev: f64, next: f64 },
    #[error("breakpoint and sample counts differ ({knots} vs {values})")]
    LengthMismatch { knots: usize, values: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
}

/// C² piecewise cubic through `(knots[i], values[i])` with prescribed end
/// slopes. Outside the knot range it continues linearly along the end slope.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    knots: Vec<f64>,
    // per segment: y + b t + c t² + d t³ with t = s - knots[i]
    coeffs: Vec<[f64; 4]>,
    end_slopes: [f64; 2],
    end_value: f64,
}

impl CubicSpline {
    /// Clamped spline with explicit end slopes.
    pub fn clamped(knots: &[f64], values: &[f64], start_slope: f64, end_slope: f64) -> Result<Self, SplineError> {
        validate(knots, values)?;
        let n = knots.len();
        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let secant: Vec<f64> = (0..n - 1).map(|i| (values[i + 1] - values[i]) / h[i]).collect();

        // Tridiagonal system for the second derivatives at the knots.
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 2.0 * h[0];
        sup[0] = h[0];
        rhs[0] = 6.0 * (secant[0] - start_slope);
        for i in 1..n - 1 {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * (secant[i] - secant[i - 1]);
        }
        sub[n - 1] = h[n - 2];
        diag[n - 1] = 2.0 * h[n - 2];
        rhs[n - 1] = 6.0 * (end_slope - secant[n - 2]);
        let m = solve_tridiagonal(&sub, &diag, &sup, &rhs);

        let coeffs = (0..n - 1)
            .map(|i| {
                let hi = h[i];
                [
                    values[i],
                    secant[i] - hi * (2.0 * m[i] + m[i + 1]) / 6.0,
                    m[i] / 2.0,
                    (m[i + 1] - m[i]) / (6.0 * hi),
                ]
            })
            .collect();
        Ok(Self { knots: knots.to_vec(), coeffs, end_slopes: [start_slope, end_slope], end_value: values[n - 1] })
    }

    /// Clamped spline whose end slopes are taken from the parabola through
    /// the first (last) three samples. Reproduces linear and quadratic data
    /// exactly.
    pub fn with_estimated_slopes(knots: &[f64], values: &[f64]) -> Result<Self, SplineError> {
        validate(knots, values)?;
        let n = knots.len();
        let (d0, dn) = if n == 2 {
            let s = (values[1] - values[0]) / (knots[1] - knots[0]);
            (s, s)
        } else {
            (
                parabola_slope(knots[0], knots[1], knots[2], values[0], values[1], values[2], knots[0]),
                parabola_slope(
                    knots[n - 3],
                    knots[n - 2],
                    knots[n - 1],
                    values[n - 3],
                    values[n - 2],
                    values[n - 1],
                    knots[n - 1],
                ),
            )
        };
        Self::clamped(knots, values, d0, dn)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn start(&self) -> f64 {
        self.knots[0]
    }

    pub fn end(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    fn segment(&self, s: f64) -> usize {
        let idx = self.knots.partition_point(|&k| k <= s);
        idx.saturating_sub(1).min(self.coeffs.len() - 1)
    }

    /// Value, first and second derivative at `s`.
    pub fn eval<T: Real>(&self, s: T) -> [T; 3] {
        let sv = s.value();
        if sv < self.start() {
            let y0 = T::from_f64(self.coeffs[0][0]);
            let d = self.end_slopes[0];
            return [y0 + (s - self.start()) * d, T::from_f64(d), T::zero()];
        }
        if sv > self.end() {
            let yn = T::from_f64(self.end_value);
            let d = self.end_slopes[1];
            return [yn + (s - self.end()) * d, T::from_f64(d), T::zero()];
        }
        let i = self.segment(sv);
        let [a, b, c, d] = self.coeffs[i];
        let t = s - self.knots[i];
        let f = ((t * d + c) * t + b) * t + a;
        let f1 = (t * (3.0 * d) + 2.0 * c) * t + b;
        let f2 = t * (6.0 * d) + 2.0 * c;
        [f, f1, f2]
    }

    pub fn eval_f64(&self, s: f64) -> [f64; 3] {
        self.eval(s)
    }

    pub fn value(&self, s: f64) -> f64 {
        self.eval_f64(s)[0]
    }

    /// Third derivative (piecewise constant) at `s`.
    pub fn third_derivative(&self, s: f64) -> f64 {
        if s < self.start() || s > self.end() {
            return 0.0;
        }
        6.0 * self.coeffs[self.segment(s)][3]
    }

    /// Exact integral of the spline from `start()` to `s`.
    pub fn integral(&self, s: f64) -> f64 {
        let mut total = 0.0;
        if s <= self.start() {
            let [y0, d, _] = self.eval_f64(self.start());
            let t = s - self.start();
            return y0 * t + 0.5 * d * t * t;
        }
        for (i, &[a, b, c, d]) in self.coeffs.iter().enumerate() {
            let x0 = self.knots[i];
            let x1 = self.knots[i + 1];
            let t = (s.min(x1)) - x0;
            total += a * t + b * t * t / 2.0 + c * t.powi(3) / 3.0 + d * t.powi(4) / 4.0;
            if s <= x1 {
                return total;
            }
        }
        let [yn, dn, _] = self.eval_f64(self.end());
        let t = s - self.end();
        total + yn * t + 0.5 * dn * t * t
    }
}

fn validate(knots: &[f64], values: &[f64]) -> Result<(), SplineError> {
    if knots.len() != values.len() {
        return Err(SplineError::LengthMismatch { knots: knots.len(), values: values.len() });
    }
    if knots.len() < 2 {
        return Err(SplineError::TooFewPoints(knots.len()));
    }
    for (i, (k, v)) in knots.iter().zip(values).enumerate() {
        if !k.is_finite() || !v.is_finite() {
            return Err(SplineError::NonFinite(i));
        }
    }
    for (i, w) in knots.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(SplineError::NotIncreasing { index: i + 1, prev: w[0], next: w[1] });
        }
    }
    Ok(())
}

fn parabola_slope(x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64, at: f64) -> f64 {
    // derivative of the Lagrange interpolant through three points
    let l0 = (2.0 * at - x1 - x2) / ((x0 - x1) * (x0 - x2));
    let l1 = (2.0 * at - x0 - x2) / ((x1 - x0) * (x1 - x2));
    let l2 = (2.0 * at - x0 - x1) / ((x2 - x0) * (x2 - x1));
    y0 * l0 + y1 * l1 + y2 * l2
}

fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = if i < n - 1 { sup[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}
