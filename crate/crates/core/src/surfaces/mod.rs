//! Concrete road charts: planar Frenet, Tait-Bryan angle and Darboux-frame
//! centerline surfaces built from spline profiles.

pub mod file;
pub mod frames;
pub mod profile;
pub mod road;
pub mod spline;

pub use file::{load_road, Breakpoint, RoadFile, RoadFileError};
pub use frames::{frame_from_angles, tait_bryan_to_darboux};
pub use profile::{AngleProfile, CurvatureProfile, DarbouxProfile};
pub use road::{RoadError, RoadKind, RoadOptions, RoadProfile, RoadSurface, DEFAULT_COM_HEIGHT};
pub use spline::{CubicSpline, SplineError};
