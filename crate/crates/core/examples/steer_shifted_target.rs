//! Steer towards the second eigensolution of the radial problem.

use eigensteer::config::{resolve_cost_model, Param};
use eigensteer::spectral::make_radial_ball_x2;
use eigensteer::steering::{steer_local, SteeringConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = make_radial_ball_x2();
    let j = 2;
    let (cost, suffcond) = resolve_cost_model(&p, j, Param::Auto, Param::Value(1.0), 1.0)?;
    let mut cfg = SteeringConfig::new(cost);
    cfg.suffcond = suffcond;
    let u0 = [0.0, 1.0, 1e-3, 0.0, 0.0, 1e-4];
    let out = steer_local(&p, j, &u0, 1.0, &cfg)?;
    let r = &out.report;
    println!("windows used: {}", r.windows_used);
    println!(
        "|u(Tf) - psi_2(Tf)| = {:.3e} at Tf = {:.4}",
        r.final_error, r.final_time
    );
    println!("z-frame deviation: {:.3e}", r.final_error_z);
    Ok(())
}
