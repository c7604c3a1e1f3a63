//! Wait for free decay, then steer locally onto the first eigensolution.

use eigensteer::config::{resolve_cost_model, Param};
use eigensteer::spectral::make_dirichlet_x2;
use eigensteer::steering::{steer_semiglobal, SteeringConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = make_dirichlet_x2();
    let (cost, suffcond) = resolve_cost_model(&p, 1, Param::Auto, Param::Value(1.0), 1.0)?;
    let mut cfg = SteeringConfig::new(cost);
    cfg.suffcond = suffcond;
    let u0 = [1.0, 0.0, 5.0];
    for r1 in [None, Some(1e-3)] {
        cfg.r1_override = r1;
        let out = steer_semiglobal(&p, &u0, 5.0, &cfg)?;
        let r = &out.report;
        println!(
            "r1 {}: ln r1 = {:.4e}, t_R = {:.4}, local windows = {}, terminal error = {:.3e}",
            if r.r1_from_theory { "from theory" } else { "override" },
            r.log_r1,
            r.t_r,
            r.local.windows_used,
            r.terminal_error
        );
    }
    Ok(())
}
