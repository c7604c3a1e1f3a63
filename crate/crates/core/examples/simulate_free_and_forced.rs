//! Integrate the Galerkin system with and without a constant control.

use eigensteer::control::{ConstantControl, ZeroControl};
use eigensteer::simulator::{simulate_bilinear, SimConfig};
use eigensteer::spectral::make_neumann_x2;

fn main() -> eigensteer::Result<()> {
    let p = make_neumann_x2();
    let cfg = SimConfig {
        n_sim: 12,
        record_stride: 100,
        ..SimConfig::default()
    };
    let u0 = [1.0, 0.5, 0.25];
    let free = simulate_bilinear(&p, &u0, &ZeroControl, (0.0, 0.5), &cfg)?;
    let forced = simulate_bilinear(&p, &u0, &ConstantControl(2.0), (0.0, 0.5), &cfg)?;
    println!(
        "free:   {} steps, u(0.5)[..3] = {:?}",
        free.steps,
        &free.final_state()[..3]
    );
    println!(
        "forced: {} steps, u(0.5)[..3] = {:?}",
        forced.steps,
        &forced.final_state()[..3]
    );
    for (t, u) in forced.times.iter().zip(&forced.states).step_by(10) {
        println!("  t = {t:.3}: u_1 = {:.6}", u[0]);
    }
    Ok(())
}
