//! The quantized tartan: invariant states, excluded Husimi mass and the
//! position profile against a Cantor staircase.

use qifs::linalg::pearson;
use qifs::torus::{
    cantor_profile, excluded_mass, husimi_torus, matched_cantor_level, position_profile, tartan_invariant, TartanChannel, TartanMode,
    TartanOptions,
};

fn main() -> qifs::Result<()> {
    for n in [9, 27, 81] {
        let ch = TartanChannel::with_dim(n)?;
        let inv = tartan_invariant(&ch, TartanMode::LinearSpectral, &TartanOptions::default())?;
        let mass = excluded_mass(&husimi_torus(&inv.state, 27)?);
        let r = pearson(&position_profile(&inv.state), &cantor_profile(n, matched_cantor_level(n)));
        println!(
            "N = {n:>2}: {} in {} steps, leading eigenvalue {:.5}, excluded mass {mass:.3}, profile correlation {r:.3}",
            inv.method, inv.steps, inv.growth
        );
    }
    Ok(())
}
