//! Interpolated road profiles: Tait-Bryan angles, planar curvature and
//! Darboux curvatures as functions of centerline arc length.

use super::frames::tait_bryan_to_darboux_rates;
use super::spline::{CubicSpline, SplineError};
use crate::nlp::dual::Real;

/// Heading `a(s)`, slope `b(s)` and bank `c(s)` in radians, each a clamped
/// cubic spline (C² on the breakpoint range).
#[derive(Debug, Clone, PartialEq)]
pub struct AngleProfile {
    pub heading: CubicSpline,
    pub slope: CubicSpline,
    pub bank: CubicSpline,
}

impl AngleProfile {
    pub fn from_samples(s: &[f64], heading: &[f64], slope: &[f64], bank: &[f64]) -> Result<Self, SplineError> {
        Ok(Self {
            heading: CubicSpline::with_estimated_slopes(s, heading)?,
            slope: CubicSpline::with_estimated_slopes(s, slope)?,
            bank: CubicSpline::with_estimated_slopes(s, bank)?,
        })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.heading.start(), self.heading.end())
    }

    /// `[value, d/ds, d²/ds²]` of each angle.
    pub fn eval<T: Real>(&self, s: T) -> [[T; 3]; 3] {
        [self.heading.eval(s), self.slope.eval(s), self.bank.eval(s)]
    }

    pub fn darboux<T: Real>(&self, s: T) -> [[T; 2]; 3] {
        let [a, b, c] = self.eval(s);
        tait_bryan_to_darboux_rates(a, b, c)
    }
}

/// Planar centerline curvature `κ(s)` in 1/m.
#[derive(Debug, Clone, PartialEq)]
pub enum CurvatureProfile {
    /// Cubic spline through curvature samples.
    Samples(CubicSpline),
    /// Curvature defined as the derivative of a heading spline, so that a
    /// planar angle road and its curvature description share one centerline.
    HeadingRate(CubicSpline),
}

impl CurvatureProfile {
    pub fn from_samples(s: &[f64], kappa: &[f64]) -> Result<Self, SplineError> {
        Ok(Self::Samples(CubicSpline::with_estimated_slopes(s, kappa)?))
    }

    pub fn range(&self) -> (f64, f64) {
        let sp = match self {
            Self::Samples(sp) | Self::HeadingRate(sp) => sp,
        };
        (sp.start(), sp.end())
    }

    /// `[κ, κ_s]`.
    pub fn eval<T: Real>(&self, s: T) -> [T; 2] {
        match self {
            Self::Samples(sp) => {
                let [k, k1, _] = sp.eval(s);
                [k, k1]
            }
            Self::HeadingRate(sp) => {
                let [_, k, k1] = sp.eval(s);
                [k, k1]
            }
        }
    }

    /// Heading change `∫ κ ds` from the start of the profile.
    pub fn heading_change(&self, s: f64) -> f64 {
        match self {
            Self::Samples(sp) => sp.integral(s),
            Self::HeadingRate(sp) => sp.value(s) - sp.value(sp.start()),
        }
    }

    /// Largest |κ| over the breakpoint range, sampled finely.
    pub fn max_abs(&self) -> f64 {
        let (a, b) = self.range();
        let n = (((b - a) / 0.05).ceil() as usize).max(1);
        (0..=n).map(|i| self.eval(a + (b - a) * i as f64 / n as f64)[0].abs()).fold(0.0, f64::max)
    }
}

/// Torsion `κˢ`, normal curvature `κʸ` and geodesic curvature `κⁿ` of the
/// centerline in 1/m.
#[derive(Debug, Clone, PartialEq)]
pub enum DarbouxProfile {
    Samples { torsion: CubicSpline, normal: CubicSpline, geodesic: CubicSpline },
    /// Curvatures converted pointwise from a Tait-Bryan angle profile.
    FromAngles(AngleProfile),
}

impl DarbouxProfile {
    pub fn from_samples(s: &[f64], torsion: &[f64], normal: &[f64], geodesic: &[f64]) -> Result<Self, SplineError> {
        Ok(Self::Samples {
            torsion: CubicSpline::with_estimated_slopes(s, torsion)?,
            normal: CubicSpline::with_estimated_slopes(s, normal)?,
            geodesic: CubicSpline::with_estimated_slopes(s, geodesic)?,
        })
    }

    pub fn range(&self) -> (f64, f64) {
        match self {
            Self::Samples { torsion, .. } => (torsion.start(), torsion.end()),
            Self::FromAngles(p) => p.range(),
        }
    }

    /// `[[κˢ, κˢ'], [κʸ, κʸ'], [κⁿ, κⁿ']]`.
    pub fn eval<T: Real>(&self, s: T) -> [[T; 2]; 3] {
        match self {
            Self::Samples { torsion, normal, geodesic } => {
                let d = |sp: &CubicSpline| {
                    let [k, k1, _] = sp.eval(s);
                    [k, k1]
                };
                [d(torsion), d(normal), d(geodesic)]
            }
            Self::FromAngles(p) => p.darboux(s),
        }
    }

    /// Breakpoints the frame integrator must land on.
    pub fn knots(&self) -> Vec<f64> {
        match self {
            Self::Samples { torsion, .. } => torsion.knots().to_vec(),
            Self::FromAngles(p) => p.heading.knots().to_vec(),
        }
    }
}
