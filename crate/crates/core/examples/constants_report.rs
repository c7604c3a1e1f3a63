//! Evaluate the constants of the local steering estimate for one target.

use eigensteer::constants::{compute_suffcond, log_control_norm_bound, CostModel, SteeringConstants};
use eigensteer::simulator::frame_sigma;
use eigensteer::spectral::make_dirichlet_x2;

fn main() -> eigensteer::Result<()> {
    let p = make_dirichlet_x2();
    let j = 1;
    let s = compute_suffcond(&p, j, 1.0)?;
    println!(
        "M = {:.6}, C_q = {:.6}, C_q,alpha = {:.6}, Gamma_j = {:.6}",
        s.m, s.cq, s.cqa, s.gamma_j
    );
    let cost = CostModel::from_suffcond_on(&p, &s, 1.0)?;
    println!("cost model: N(tau) <= exp({:.4}/tau) on (0, {}]", cost.nu, cost.t0);
    let sigma = frame_sigma(&p, p.eigenvalue(j));
    for horizon in [0.1, 0.5, 1.0] {
        let c = SteeringConstants::new(&cost, p.b_norm, sigma, horizon)?;
        println!(
            "T = {horizon}: D = {:.4}, Gamma0 = {:.4}, T1 = {:.5}, Tf = {:.5}, ln R_T = {:.6e}, ln control bound = {:.6e}",
            c.d,
            c.gamma0,
            c.t1,
            c.tf,
            c.log_rt,
            log_control_norm_bound(c.gamma0, horizon)
        );
    }
    Ok(())
}
