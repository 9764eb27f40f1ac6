//! Road definition files (TOML).
//!
//! ```toml
//! kind = "tait-bryan"          # or "frenet", "darboux"
//! anchor = [0.0, 0.0, 0.0]
//! com_height = 0.592
//! lane_half_width = 3.5
//! initial_angles = [0.0, 0.0, 0.0]   # optional, frenet and darboux only
//!
//! [[breakpoints]]
//! s = 0.0
//! a = 0.0
//! b = 0.0
//! c = 0.0
//! ```
//!
//! Frenet breakpoints carry `kappa`; Darboux breakpoints carry `ks`, `ky`,
//! `kn`. Breakpoint `s` values must be strictly increasing.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

use super::profile::{AngleProfile, CurvatureProfile, DarbouxProfile};
use super::road::{RoadError, RoadKind, RoadOptions, RoadProfile, RoadSurface, DEFAULT_COM_HEIGHT};
use super::spline::SplineError;

#[derive(Debug, Error)]
pub enum RoadFileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error(transparent)]
    Road(#[from] RoadError),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Breakpoint {
    pub s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ky: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kn: Option<f64>,
}

impl Breakpoint {
    pub fn angles(s: f64, a: f64, b: f64, c: f64) -> Self {
        Self { s, a: Some(a), b: Some(b), c: Some(c), ..Default::default() }
    }

    pub fn curvature(s: f64, kappa: f64) -> Self {
        Self { s, kappa: Some(kappa), ..Default::default() }
    }

    pub fn darboux(s: f64, ks: f64, ky: f64, kn: f64) -> Self {
        Self { s, ks: Some(ks), ky: Some(ky), kn: Some(kn), ..Default::default() }
    }
}

/// In-memory form of a road file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoadFile {
    pub kind: RoadKind,
    pub anchor: [f64; 3],
    pub com_height: f64,
    pub lane_half_width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_angles: Option<[f64; 3]>,
    pub breakpoints: Vec<Breakpoint>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRoadFile {
    kind: RoadKind,
    #[serde(default)]
    anchor: [f64; 3],
    #[serde(default = "default_com_height")]
    com_height: f64,
    lane_half_width: f64,
    #[serde(default)]
    initial_angles: Option<[f64; 3]>,
    breakpoints: Vec<Spanned<Breakpoint>>,
}

fn default_com_height() -> f64 {
    DEFAULT_COM_HEIGHT
}

/// 1-based line and column of a byte offset.
pub(crate) fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

pub(crate) fn toml_error(src: &str, e: &toml::de::Error) -> (usize, usize, String) {
    let (line, column) = e.span().map_or((0, 0), |r| line_col(src, r.start));
    (line, column, e.message().to_string())
}

impl RoadFile {
    pub fn parse(src: &str) -> Result<Self, RoadFileError> {
        let raw: RawRoadFile = toml::from_str(src).map_err(|e| {
            let (line, column, message) = toml_error(src, &e);
            RoadFileError::Parse { line, column, message }
        })?;
        let at = |sp: &Spanned<Breakpoint>, message: String| {
            let (line, column) = line_col(src, sp.span().start);
            RoadFileError::Parse { line, column, message }
        };
        for (i, bp) in raw.breakpoints.iter().enumerate() {
            let b = bp.get_ref();
            let (want, have): (&[&str], [(&str, bool); 7]) = (
                match raw.kind {
                    RoadKind::TaitBryan => &["a", "b", "c"],
                    RoadKind::Frenet => &["kappa"],
                    RoadKind::Darboux => &["ks", "ky", "kn"],
                },
                [
                    ("a", b.a.is_some()),
                    ("b", b.b.is_some()),
                    ("c", b.c.is_some()),
                    ("kappa", b.kappa.is_some()),
                    ("ks", b.ks.is_some()),
                    ("ky", b.ky.is_some()),
                    ("kn", b.kn.is_some()),
                ],
            );
            for (name, present) in have {
                let needed = want.contains(&name);
                if needed && !present {
                    return Err(at(bp, format!("breakpoint {i} of a {} road is missing `{name}`", raw.kind)));
                }
                if !needed && present {
                    return Err(at(bp, format!("field `{name}` is not allowed on a {} road", raw.kind)));
                }
            }
            if !b.s.is_finite() {
                return Err(at(bp, format!("breakpoint {i} has a non-finite s")));
            }
            if i > 0 {
                let prev = raw.breakpoints[i - 1].get_ref().s;
                if b.s == prev {
                    return Err(at(bp, format!("duplicate breakpoint s = {}", b.s)));
                }
                if b.s < prev {
                    return Err(at(bp, format!("breakpoints must be strictly increasing ({prev} then {})", b.s)));
                }
            }
        }
        if raw.breakpoints.len() < 2 {
            return Err(RoadFileError::Parse {
                line: 0,
                column: 0,
                message: format!("a road needs at least 2 breakpoints, got {}", raw.breakpoints.len()),
            });
        }
        Ok(Self {
            kind: raw.kind,
            anchor: raw.anchor,
            com_height: raw.com_height,
            lane_half_width: raw.lane_half_width,
            initial_angles: raw.initial_angles,
            breakpoints: raw.breakpoints.into_iter().map(Spanned::into_inner).collect(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, RoadFileError> {
        let src = std::fs::read_to_string(path)
            .map_err(|source| RoadFileError::Io { path: path.display().to_string(), source })?;
        Self::parse(&src)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("road files always serialize")
    }

    pub fn profile(&self) -> Result<RoadProfile, SplineError> {
        let s: Vec<f64> = self.breakpoints.iter().map(|b| b.s).collect();
        let col = |f: fn(&Breakpoint) -> Option<f64>| -> Vec<f64> {
            self.breakpoints.iter().map(|b| f(b).unwrap_or(0.0)).collect()
        };
        Ok(match self.kind {
            RoadKind::TaitBryan => {
                RoadProfile::Angles(AngleProfile::from_samples(&s, &col(|b| b.a), &col(|b| b.b), &col(|b| b.c))?)
            }
            RoadKind::Frenet => RoadProfile::Curvature(CurvatureProfile::from_samples(&s, &col(|b| b.kappa))?),
            RoadKind::Darboux => {
                RoadProfile::Darboux(DarbouxProfile::from_samples(&s, &col(|b| b.ks), &col(|b| b.ky), &col(|b| b.kn))?)
            }
        })
    }

    pub fn build(&self) -> Result<RoadSurface, RoadFileError> {
        let profile = self.profile().map_err(|e| RoadFileError::Parse { line: 0, column: 0, message: e.to_string() })?;
        let options = RoadOptions {
            anchor: self.anchor,
            lane_half_width: self.lane_half_width,
            com_height: self.com_height,
            initial_angles: self.initial_angles,
        };
        Ok(RoadSurface::new(profile, options)?)
    }
}

/// Parses and builds a road from a file on disk.
pub fn load_road(path: &Path) -> Result<RoadSurface, RoadFileError> {
    RoadFile::load(path)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = r#"
kind = "tait-bryan"
lane_half_width = 3.0

[[breakpoints]]
s = 0.0
a = 0.0
b = 0.0
c = 0.0

[[breakpoints]]
s = 100.0
a = 0.0
b = 0.0
c = 0.0
"#;

    #[test]
    fn parses_defaults() {
        let f = RoadFile::parse(FLAT).unwrap();
        assert_eq!(f.kind, RoadKind::TaitBryan);
        assert_eq!(f.anchor, [0.0; 3]);
        assert_eq!(f.com_height, 0.592);
        let road = f.build().unwrap();
        assert_eq!(road.s_range(), (0.0, 100.0));
    }

    #[test]
    fn round_trips_through_text() {
        let f = RoadFile::parse(FLAT).unwrap();
        let again = RoadFile::parse(&f.to_toml()).unwrap();
        assert_eq!(f, again);
    }

    #[test]
    fn duplicate_s_reports_line() {
        let src = FLAT.replace("s = 100.0", "s = 0.0");
        match RoadFile::parse(&src) {
            Err(RoadFileError::Parse { line, message, .. }) => {
                assert!(message.contains("duplicate"), "{message}");
                assert!(line >= 11, "line {line}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_fields_for_kind() {
        let src = FLAT.replacen("a = 0.0", "kappa = 0.0", 1);
        assert!(matches!(RoadFile::parse(&src), Err(RoadFileError::Parse { .. })));
    }

    #[test]
    fn syntax_error_has_line() {
        let src = "kind = \"frenet\"\nlane_half_width = \n";
        match RoadFile::parse(src) {
            Err(RoadFileError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
