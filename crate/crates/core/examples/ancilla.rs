//! A channel obtained by coupling to a maximally mixed ancilla.

use qifs::classical::chaos::stream_rng;
use qifs::linalg::{self, max_abs};
use qifs::quantum::{ancilla_channel, ancilla_direct};

fn main() -> qifs::Result<()> {
    let mut rng = stream_rng(12, 0);
    let (n, m) = (2, 3);
    let u = linalg::haar_unitary(n * m, &mut rng);
    let ch = ancilla_channel(&u, m)?;
    let (tp, unital) = ch.identity_deviations();
    println!("{} Kraus operators, trace-preservation error {tp:.1e}, unitality error {unital:.1e}", ch.kraus().len());
    let rho = linalg::random_density_matrix(n, 2, &mut rng);
    let gap = max_abs(&(ch.apply_matrix(&rho) - ancilla_direct(&u, m, &rho)?));
    println!("Kraus form vs partial trace: {gap:.1e}");
    Ok(())
}
