//! Empirical control cost against the sufficient-condition bound.

use eigensteer::constants::compute_suffcond;
use eigensteer::moment::empirical_cost;
use eigensteer::spectral::gallery;

fn main() -> eigensteer::Result<()> {
    for p in gallery() {
        let s = compute_suffcond(&p, 1, 1.0)?;
        println!("{} (Gamma_1 = {:.4})", p.name(), s.gamma_j);
        for horizon in [0.05, 0.1, 0.2, 0.5, 1.0] {
            let n = empirical_cost(&p, 1, horizon, 10)?;
            println!(
                "  T = {horizon:<5} ln N = {:>9.4}  bound Gamma_1/T = {:>10.4}",
                n.ln(),
                s.gamma_j / horizon
            );
        }
    }
    Ok(())
}
