//! Fixed-step RK4 and adaptive Dormand-Prince 5(4) integrators.

use crate::nlp::dual::Real;

/// One classical RK4 step of `ż = f(z)` (inputs are captured by `f` and held
/// constant over the step).
pub fn rk4_step<T: Real, E, const N: usize>(
    f: impl Fn(&[T; N]) -> Result<[T; N], E>,
    z: &[T; N],
    dt: f64,
) -> Result<[T; N], E> {
    let axpy = |a: &[T; N], k: &[T; N], h: f64| {
        let mut out = *a;
        for i in 0..N {
            out[i] += k[i] * h;
        }
        out
    };
    let k1 = f(z)?;
    let k2 = f(&axpy(z, &k1, 0.5 * dt))?;
    let k3 = f(&axpy(z, &k2, 0.5 * dt))?;
    let k4 = f(&axpy(z, &k3, dt))?;
    let mut out = *z;
    for i in 0..N {
        out[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5Options {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self { abs_tol: 1e-9, rel_tol: 1e-8, max_steps: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dopri5Error<E> {
    Rates(E),
    StepLimit,
    StepUnderflow { t: f64 },
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights are the last row of A; these are fifth minus fourth
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `ż = f(t, z)` from `t0` to `t1` with the Dormand-Prince 5(4)
/// pair and standard error-per-step control.
pub fn dopri5<E2, const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> Result<[f64; N], E2>,
    z0: &[f64; N],
    t0: f64,
    t1: f64,
    opts: &Dopri5Options,
) -> Result<[f64; N], Dopri5Error<E2>> {
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(*z0);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut z = *z0;
    let mut k0 = f(t, &z).map_err(Dopri5Error::Rates)?;
    let scale = |z: &[f64; N], i: usize| opts.abs_tol + opts.rel_tol * z[i].abs();
    // initial step from the size of the first derivative
    let d0 = rms::<N>(|i| z[i] / scale(&z, i));
    let d1 = rms::<N>(|i| k0[i] / scale(&z, i));
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(span.abs());

    for _ in 0..opts.max_steps {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            return Ok(z);
        }
        let last = h >= remaining;
        let hs = if last { remaining } else { h } * dir;

        let mut k = [[0.0; N]; 7];
        k[0] = k0;
        for stage in 1..7 {
            let mut zi = z;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..N {
                        zi[i] += hs * a * kj[i];
                    }
                }
            }
            k[stage] = f(t + C[stage] * hs, &zi).map_err(Dopri5Error::Rates)?;
        }
        let mut z_new = z;
        for (j, kj) in k.iter().enumerate().take(6) {
            let b = A[6][j];
            for i in 0..N {
                z_new[i] += hs * b * kj[i];
            }
        }
        let err = rms::<N>(|i| {
            let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * hs;
            let sc = opts.abs_tol + opts.rel_tol * z[i].abs().max(z_new[i].abs());
            e / sc
        });
        if !err.is_finite() {
            h *= 0.25;
        } else if err <= 1.0 {
            t = if last { t1 } else { t + hs };
            z = z_new;
            // first-same-as-last: the seventh stage is f at the new point
            k0 = k[6];
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Dopri5Error::StepUnderflow { t });
        }
    }
    Err(Dopri5Error::StepLimit)
}

fn rms<const N: usize>(f: impl Fn(usize) -> f64) -> f64 {
    ((0..N).map(|i| f(i).powi(2)).sum::<f64>() / N as f64).sqrt()
}
