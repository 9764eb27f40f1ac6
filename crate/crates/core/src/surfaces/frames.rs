//! Centerline frames from heading/slope/bank angles and their conversion to
//! Darboux-frame curvatures.

use crate::geom::{Mat3, Vec3};
use crate::nlp::dual::Real;

fn rot_heading<T: Real>(a: T) -> [Mat3<T>; 3] {
    let (c, s) = (a.cos(), a.sin());
    let (o, z) = (T::one(), T::zero());
    [
        Mat3::from_rows([[c, -s, z], [s, c, z], [z, z, o]]),
        Mat3::from_rows([[-s, -c, z], [c, -s, z], [z, z, z]]),
        Mat3::from_rows([[-c, s, z], [-s, -c, z], [z, z, z]]),
    ]
}

fn rot_slope<T: Real>(b: T) -> [Mat3<T>; 3] {
    let (c, s) = (b.cos(), b.sin());
    let (o, z) = (T::one(), T::zero());
    [
        Mat3::from_rows([[c, z, -s], [z, o, z], [s, z, c]]),
        Mat3::from_rows([[-s, z, -c], [z, z, z], [c, z, -s]]),
        Mat3::from_rows([[-c, z, s], [z, z, z], [-s, z, -c]]),
    ]
}

fn rot_bank<T: Real>(c_: T) -> [Mat3<T>; 3] {
    let (c, s) = (c_.cos(), c_.sin());
    let (o, z) = (T::one(), T::zero());
    [
        Mat3::from_rows([[o, z, z], [z, c, -s], [z, s, c]]),
        Mat3::from_rows([[z, z, z], [z, -s, -c], [z, c, -s]]),
        Mat3::from_rows([[z, z, z], [z, -c, s], [z, -s, -c]]),
    ]
}

/// Centerline frame `[e_s | e_y | e_n] = R_a R_b R_c` for heading `a`, slope
/// `b` and bank `c`.
pub fn frame_from_angles<T: Real>(a: T, b: T, c: T) -> Mat3<T> {
    rot_heading(a)[0] * rot_slope(b)[0] * rot_bank(c)[0]
}

/// Frame and its first two arc-length derivatives, by the product rule on
/// `R_a R_b R_c`. Each angle is given as `[value, d/ds, d²/ds²]`.
pub fn frame_with_derivatives<T: Real>(a: [T; 3], b: [T; 3], c: [T; 3]) -> [Mat3<T>; 3] {
    let ra = rot_heading(a[0]);
    let rb = rot_slope(b[0]);
    let rc = rot_bank(c[0]);
    // chain rule per factor: R' = R_θ θ', R'' = R_θθ θ'^2 + R_θ θ''
    let d1 = |r: &[Mat3<T>; 3], th: &[T; 3]| r[1].scale(th[1]);
    let d2 = |r: &[Mat3<T>; 3], th: &[T; 3]| r[2].scale(th[1] * th[1]).add(&r[1].scale(th[2]));
    let (a1, b1, c1) = (d1(&ra, &a), d1(&rb, &b), d1(&rc, &c));
    let (a2, b2, c2) = (d2(&ra, &a), d2(&rb, &b), d2(&rc, &c));
    let (a0, b0, c0) = (ra[0], rb[0], rc[0]);

    let r = a0 * b0 * c0;
    let r1 = (a1 * b0 * c0).add(&(a0 * b1 * c0)).add(&(a0 * b0 * c1));
    let cross = (a1 * b1 * c0).add(&(a1 * b0 * c1)).add(&(a0 * b1 * c1));
    let r2 = (a2 * b0 * c0)
        .add(&(a0 * b2 * c0))
        .add(&(a0 * b0 * c2))
        .add(&cross.scale(T::from_f64(2.0)));
    [r, r1, r2]
}

/// Darboux curvatures `(κˢ, κʸ, κⁿ)` (torsion, normal curvature, geodesic
/// curvature) of a Tait-Bryan centerline frame, from angle rates.
///
/// Sign convention: `∂e_s/∂s = κⁿ e_y − κʸ e_n`, `∂e_y/∂s = −κⁿ e_s + κˢ e_n`,
/// `∂e_n/∂s = κʸ e_s − κˢ e_y`, i.e. `R' = R [ω]×` with `ω = (κˢ, κʸ, κⁿ)`.
pub fn tait_bryan_to_darboux<T: Real>(a: [T; 2], b: [T; 2], c: [T; 2]) -> [T; 3] {
    let (sb, cb) = (b[0].sin(), b[0].cos());
    let (sc, cc) = (c[0].sin(), c[0].cos());
    let (da, db, dc) = (a[1], b[1], c[1]);
    [da * sb + dc, da * cb * sc - db * cc, da * cb * cc + db * sc]
}

/// Curvatures together with their arc-length derivatives, from angles given
/// as `[value, d/ds, d²/ds²]`. Returns `[[κˢ, κˢ'], [κʸ, κʸ'], [κⁿ, κⁿ']]`.
pub fn tait_bryan_to_darboux_rates<T: Real>(a: [T; 3], b: [T; 3], c: [T; 3]) -> [[T; 2]; 3] {
    let (sb, cb) = (b[0].sin(), b[0].cos());
    let (sc, cc) = (c[0].sin(), c[0].cos());
    let [_, a1, a2] = a;
    let [_, b1, b2] = b;
    let [_, c1, c2] = c;
    let ks = a1 * sb + c1;
    let ks_d = a2 * sb + a1 * b1 * cb + c2;
    let ky = a1 * cb * sc - b1 * cc;
    let ky_d = a2 * cb * sc - a1 * b1 * sb * sc + a1 * c1 * cb * cc - b2 * cc + b1 * c1 * sc;
    let kn = a1 * cb * cc + b1 * sc;
    let kn_d = a2 * cb * cc - a1 * b1 * sb * cc - a1 * c1 * cb * sc + b2 * sc + b1 * c1 * cc;
    [[ks, ks_d], [ky, ky_d], [kn, kn_d]]
}

/// Rotation for the Darboux rate vector `ω = (κˢ, κʸ, κⁿ)`: `R' = R [ω]×`.
pub fn darboux_generator<T: Real>(kappa: [T; 3]) -> Mat3<T> {
    Mat3::skew(Vec3::new(kappa[0], kappa[1], kappa[2]))
}
