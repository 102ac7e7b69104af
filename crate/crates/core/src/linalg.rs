//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`, stored column-major. The
//! vectorization `vec(ρ)` is the column-major stacking of `ρ`, so
//! `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Build a matrix from real row-major entries.
pub fn from_real_rows(n: usize, m: usize, rows: &[f64]) -> CMat {
    CMat::from_fn(n, m, |i, j| c(rows[i * m + j], 0.0))
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Hermitian part `(m + m†) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    u.is_square() && max_abs(&(u.adjoint() * u - identity(u.nrows()))) <= tol
}

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues ascending, with
/// the eigenvectors as matching columns.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    eigh(m).0
}

/// `f(H)` for Hermitian `H`, via its eigen-decomposition.
pub fn hermitian_function(h: &CMat, f: impl Fn(f64) -> C64) -> CMat {
    let (values, vectors) = eigh(h);
    let diag = CMat::from_diagonal(&CVec::from_iterator(values.len(), values.iter().map(|&x| f(x))));
    &vectors * diag * vectors.adjoint()
}

/// `exp(i·θ·H)` for Hermitian `H`.
pub fn exp_i_hermitian(h: &CMat, theta: f64) -> CMat {
    hermitian_function(h, |x| (I * theta * x).exp())
}

/// Square root of a positive semidefinite matrix; eigenvalues below zero are
/// clipped.
pub fn sqrt_psd(m: &CMat) -> CMat {
    hermitian_function(m, |x| c(x.max(0.0).sqrt(), 0.0))
}

/// Eigenvalues of a general square complex matrix (complex Schur form).
///
/// QR sweeps can stall at machine-precision deflation on highly degenerate
/// matrices, so the iteration count is bounded and the deflation threshold
/// loosened step by step.
pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    let budget = 30 * m.nrows().max(10);
    for eps in [f64::EPSILON, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10] {
        if let Some(schur) = Schur::try_new(m.clone(), eps, budget) {
            let (_, t) = schur.unpack();
            return (0..t.nrows()).map(|k| t[(k, k)]).collect();
        }
    }
    let (_, t) = Schur::new(m.clone()).unpack();
    (0..t.nrows()).map(|k| t[(k, k)]).collect()
}

/// Orthonormal basis of the null space of `m`: right singular vectors whose
/// singular value is at most `tol` (relative to `max(1, σ_max)`).
pub fn null_space(m: &CMat, tol: f64) -> Vec<CVec> {
    let (rows, cols) = m.shape();
    // SVD only yields min(rows, cols) right vectors; pad wide inputs.
    let padded = if rows < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma = &svd.singular_values;
    let scale = sigma.iter().cloned().fold(1.0_f64, f64::max);
    (0..sigma.len())
        .filter(|&k| sigma[k] <= tol * scale)
        .map(|k| v_t.row(k).adjoint())
        .collect()
}

/// Column-major vectorization.
pub fn vec(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn unvec(v: &CVec, n: usize) -> CMat {
    CMat::from_column_slice(n, n, v.as_slice())
}

/// Gram-Schmidt on a list of vectors, dropping those that become smaller
/// than `tol`.
pub fn orthonormalize(vectors: &[CVec], tol: f64) -> Vec<CVec> {
    let mut basis: Vec<CVec> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&w);
                w -= b * proj;
            }
        }
        let norm = w.norm();
        if norm > tol {
            basis.push(w / c(norm, 0.0));
        }
    }
    basis
}

/// Standard complex Gaussian (real and imaginary parts N(0, 1/2)).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of the
/// diagonal of R divided out.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let qr = ginibre(n, n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Random unit vector, uniform on the sphere of ℂⁿ.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVec {
    let v = CVec::from_fn(n, |_, _| complex_gaussian(rng));
    let norm = v.norm();
    v / c(norm, 0.0)
}

/// Random Hermitian matrix from the Gaussian unitary ensemble.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    hermitian_part(&ginibre(n, n, rng))
}

/// Random density matrix of given rank, induced by a Ginibre `n × rank`.
pub fn random_density_matrix<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> CMat {
    let g = ginibre(n, rank.max(1), rng);
    let rho = &g * g.adjoint();
    let t = trace(&rho);
    rho / t
}

pub fn projector(v: &CVec) -> CMat {
    v * v.adjoint()
}

pub fn pauli() -> [CMat; 3] {
    [
        CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

/// Least-squares line `y = slope·x + intercept`, with the coefficient of
/// determination.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, intercept, r2)
}

/// Relative spread below which a sample counts as constant.
const CONSTANT_SPREAD: f64 = 1e-10;

/// Pearson correlation coefficient; NaN when either sample is constant to
/// rounding.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let flat = |s: f64, m: f64| s.sqrt() <= CONSTANT_SPREAD * m.abs() * n.sqrt();
    if flat(sxx, mx) || flat(syy, my) {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}
