//! Surface jet, fundamental forms and body frame at one pose on a banked,
//! climbing road.
//!
//! ```text
//! cargo run --example geometry_basics
//! ```

use nonplanar::geom::{body_basis, conditioning, parametric_velocity, surface_angular_velocity, FundamentalForms, ParametricPose};
use nonplanar::surfaces::{AngleProfile, RoadSurface};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // heading turns left, pitch climbs to 0.1 rad, bank to 0.15 rad
    let s = [0.0, 50.0, 100.0];
    let profile = AngleProfile::from_samples(&s, &[0.0, 0.3, 0.6], &[0.0, 0.1, 0.1], &[0.0, 0.15, 0.15])?;
    let road = RoadSurface::tait_bryan(profile, 4.0)?;

    let pose = ParametricPose::new(40.0, 1.5, 0.1);
    let jet = road.evaluate_jet(pose.s, pose.y)?;
    let forms = FundamentalForms::at_pose(&jet, pose.theta_s)?;
    println!("x(s, y)   = {:?}", jet.position);
    println!("normal    = {:?}", jet.normal);
    println!("I         = {:?}", forms.first.m);
    println!("II        = {:?}", forms.second.m);
    println!("{:?}", conditioning(&forms));

    let (e1, e2, e3) = body_basis(&jet, pose.theta_s);
    println!("body e1 {e1:?}\n     e2 {e2:?}\n     e3 {e3:?}");

    // 10 m/s along e1
    let [s_dot, y_dot] = parametric_velocity(&forms, 10.0, 0.0)?;
    let [w1, w2] = surface_angular_velocity(&forms, 10.0, 0.0)?;
    println!("ṡ = {s_dot:.4}, ẏ = {y_dot:.4}, ω1 = {w1:.5}, ω2 = {w2:.5}");

    let (x, r) = road.global_pose(&pose)?;
    let back = road.pose_from_global(x, &r, (pose.s + 0.5, 0.0))?;
    println!("global round trip: {back:?}");
    Ok(())
}
