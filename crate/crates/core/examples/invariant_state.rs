//! Invariant states by the spectral route and by power iteration.

use qifs::invariant::{fixed_states, power_iteration, EIGENVALUE_TOL};
use qifs::linalg;
use qifs::qstate::{trace_distance, DensityMatrix, MatrixJson};
use qifs::quantum::{depolarizing, QifsDefinition};

fn main() -> qifs::Result<()> {
    for p in [0.1, 0.5, 0.9] {
        let ch = depolarizing(p)?;
        let rep = fixed_states(&ch, EIGENVALUE_TOL)?;
        let rho = DensityMatrix::diagonal(&[1.0, 0.0])?;
        let r = ch.apply(&rho)?.bloch_vector()?;
        println!("depolarizing p = {p}: multiplicity {}, unique {}, Bloch z of Λ(|0⟩⟨0|) = {:.4}", rep.multiplicity, rep.unique, r[2]);
    }

    let center = |k: usize| {
        let mut d = [0.0; 4];
        d[3 * k] = 1.0;
        MatrixJson::from(&linalg::from_real_rows(2, 2, &d))
    };
    let homothety = QifsDefinition::Homothety { dim: 2, ratio: 1.0 / 3.0, centers: vec![center(0), center(1)], probs: vec![0.5, 0.5] }.build()?;
    let start = DensityMatrix::diagonal(&[1.0, 0.0])?;
    let pi = power_iteration(&homothety, &start, 100, 1e-12)?;
    let half = DensityMatrix::diagonal(&[0.5, 0.5])?;
    println!(
        "homothety: converged {} in {} steps, D_tr to diag(1/2, 1/2) = {:.2e}",
        pi.converged,
        pi.steps,
        trace_distance(&pi.state, &half)?
    );
    if let Some(sup) = homothety.superoperator() {
        let moduli: Vec<String> = sup.spectrum().iter().map(|z| format!("{:.4}", z.norm())).collect();
        println!("homothety superoperator spectrum moduli: {}", moduli.join(", "));
    }
    Ok(())
}
