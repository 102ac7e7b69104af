//! Husimi functions of coherent states on the sphere and on the torus.

use qifs::qstate::DensityMatrix;
use qifs::spin::{husimi_sphere, sphere_integral, spin_coherent, Spin};
use qifs::torus::{coherent_torus, husimi_torus};

fn argmax(values: &[f64]) -> usize {
    values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(k, _)| k).unwrap()
}

fn main() -> qifs::Result<()> {
    let spin = Spin::new(10.0)?;
    let rho = DensityMatrix::from_ket(&spin_coherent(spin, 1.0, 2.0));
    let g = husimi_sphere(&rho, 60, 120)?;
    let k = argmax(&g.values);
    println!(
        "sphere: peak at {} = {:.3}, {} = {:.3}; integral {:.4}",
        g.row_label,
        g.row_centre(k / g.cols),
        g.col_label,
        g.col_centre(k % g.cols),
        sphere_integral(&g, spin.dim())
    );

    let rho = DensityMatrix::from_ket(&coherent_torus(0.25, 0.6, 64)?);
    let g = husimi_torus(&rho, 64)?;
    let k = argmax(&g.values);
    println!(
        "torus: peak at {} = {:.3}, {} = {:.3}",
        g.row_label,
        g.row_centre(k / g.cols),
        g.col_label,
        g.col_centre(k % g.cols)
    );
    Ok(())
}
