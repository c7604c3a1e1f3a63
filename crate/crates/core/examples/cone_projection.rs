//! Steer a datum in a cone onto the multiple of the first eigensolution it projects to.

use eigensteer::config::{resolve_cost_model, Param};
use eigensteer::spectral::make_dirichlet_x2;
use eigensteer::steering::{steer_to_projection, SteeringConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = make_dirichlet_x2();
    let (cost, suffcond) = resolve_cost_model(&p, 1, Param::Auto, Param::Value(1.0), 1.0)?;
    let mut cfg = SteeringConfig::new(cost);
    cfg.suffcond = suffcond;
    cfg.r1_override = Some(1e-3);
    let out = steer_to_projection(&p, &[-1.0, 0.5], 0.5, &cfg)?;
    let r = &out.report;
    println!("gamma = {}, orthogonal part = {}", r.gamma, r.orthogonal_norm);
    println!(
        "T_R = {:.4}, |z(T_R) - gamma phi_1| = {:.3e}",
        r.total_time, r.terminal_error_z
    );
    println!("|u(T_R) - gamma psi_1(T_R)| = {:.3e}", r.terminal_error);
    Ok(())
}
