//! Randomly kicked top: relaxation of a coherent state towards 𝟙/N.

use std::f64::consts::PI;

use qifs::qstate::{trace_distance, von_neumann_entropy, DensityMatrix};
use qifs::spin::{random_kicked_top, spin_coherent, Spin};

fn main() -> qifs::Result<()> {
    let spin = Spin::new(3.0)?;
    let top = random_kicked_top(spin, PI / 4.0, 2.0, 0.05, 0.5)?;
    let ch = top.channel();
    let target = DensityMatrix::maximally_mixed(spin.dim());
    let mut rho = DensityMatrix::from_ket(&spin_coherent(spin, PI / 3.0, PI / 5.0));
    for n in 1..=500 {
        rho = ch.apply(&rho)?;
        if n % 100 == 0 {
            println!("n = {n:>3}  D_tr(ρ, 𝟙/N) = {:.5}  S(ρ) = {:.5}", trace_distance(&rho, &target)?, von_neumann_entropy(&rho));
        }
    }
    Ok(())
}
