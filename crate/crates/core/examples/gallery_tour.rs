//! Print the spectral data of every built-in problem.

use eigensteer::spectral::{gallery, verify_gap, verify_gap_relative};

fn main() -> eigensteer::Result<()> {
    for p in gallery() {
        println!("{}", p.name());
        println!(
            "  sigma = {}, |B| = {}, alpha = {:.6}, q = {}",
            p.sigma, p.b_norm, p.gap_alpha, p.decay_exponent
        );
        println!("  lambda_1..4 = {:?}", p.eigenvalues(4));
        println!(
            "  <B phi_1, phi_k>, k = 1..4: {:?}",
            (1..=4).map(|k| p.b_entry(1, k)).collect::<Result<Vec<_>, _>>()?
        );
        println!("  decay constant b = {:.6e}", p.decay_b()?);
        println!(
            "  min gap for k < 100: {:.6} (relative to lambda_1: {:.6})",
            verify_gap(&p, 100),
            verify_gap_relative(&p, 100)
        );
    }
    Ok(())
}
