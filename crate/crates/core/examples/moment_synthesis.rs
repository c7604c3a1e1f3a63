//! Solve one minimum-norm moment problem and check the terminal state.

use eigensteer::moment::{build_moment_problem, control_l2_norm, solve_min_norm};
use eigensteer::simulator::simulate_linear_duhamel;
use eigensteer::spectral::make_dirichlet_x2;

fn main() -> eigensteer::Result<()> {
    let p = make_dirichlet_x2();
    let (j, horizon, n_ctrl) = (1, 0.5, 8);
    let y0: Vec<f64> = (0..n_ctrl)
        .map(|i| if i == 0 { 0.0 } else { 1e-3 / i as f64 })
        .collect();
    let mp = build_moment_problem(&p, j, &y0, horizon, n_ctrl)?;
    let cs = solve_min_norm(&mp)?;
    println!("Gram condition number: {:.3e}", cs.condition);
    println!("max scaled residual:   {:.3e}", cs.max_residual);
    println!("|q|_L2 = {:.6e}, |p|_L2 = {:.6e}", cs.q_norm(), control_l2_norm(&cs));
    for s in [0.0, 0.25, 0.5] {
        println!("p({s}) = {:.6e}", cs.p_local(s));
    }
    let y = simulate_linear_duhamel(&p, j, &y0, &cs)?;
    let size: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    println!("|y(T)| on the controlled modes = {size:.3e}");
    Ok(())
}
