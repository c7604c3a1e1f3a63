//! Steer a perturbed first eigenfunction onto its eigensolution.

use eigensteer::config::resolve_cost_model;
use eigensteer::config::Param;
use eigensteer::spectral::make_dirichlet_x2;
use eigensteer::steering::{steer_local, SteeringConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = make_dirichlet_x2();
    let (cost, suffcond) = resolve_cost_model(&p, 1, Param::Auto, Param::Value(1.0), 1.0)?;
    let mut cfg = SteeringConfig::new(cost);
    cfg.suffcond = suffcond;
    let u0 = [1.0, 1e-3, 0.0, 0.0, 1e-4];
    let out = steer_local(&p, 1, &u0, 1.0, &cfg)?;
    let r = &out.report;
    for w in &r.windows {
        println!(
            "window {}: [{:.4}, {:.4}] |v| {:.3e} -> {:.3e}, |p| = {:.3e}, N = {:.3e}",
            w.n, w.tau_start, w.tau_end, w.v_prev_norm, w.v_norm, w.p_norm, w.cost_emp
        );
    }
    println!(
        "stop: {:?}, final error at t = {:.4}: {:.3e}",
        r.stop, r.final_time, r.final_error
    );
    println!("flags: {:?}", r.flags);
    Ok(())
}
