//! Quantum states, the distances between them, entropy and partial trace.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64};

/// Hermiticity deviation accepted (and symmetrized away) on construction.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Negative eigenvalues down to this value are clipped; below it the input is rejected.
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues below this count as zero in entropy and Bures computations.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// A normalized vector in ℂᴺ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorJson", into = "VectorJson")]
pub struct Ket {
    amplitudes: CVec,
}

impl Ket {
    /// Normalizes `amplitudes`; fails on a (numerically) zero vector.
    pub fn new(amplitudes: CVec) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::Vanishing(norm));
        }
        Ok(Self { amplitudes: amplitudes / c(norm, 0.0) })
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::new(CVec::from_column_slice(amplitudes))
    }

    /// Computational basis vector `|k⟩` (0-based).
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = CVec::zeros(n);
        v[k] = linalg::ONE;
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVec {
        self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn projector(&self) -> CMat {
        linalg::projector(&self.amplitudes)
    }

    /// `⟨self|A|self⟩`.
    pub fn expectation(&self, a: &CMat) -> C64 {
        self.amplitudes.dotc(&(a * &self.amplitudes))
    }
}

/// A ray in Hilbert space: a ket up to a global phase.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PureState(Ket);

impl PureState {
    pub fn new(ket: Ket) -> Self {
        Self(ket)
    }

    pub fn ket(&self) -> &Ket {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn projector(&self) -> CMat {
        self.0.projector()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_ket(&self.0)
    }

    /// Phase-blind comparison: `|⟨φ|ψ⟩| ≥ 1 − tol`.
    pub fn same_state(&self, other: &PureState, tol: f64) -> bool {
        self.0
            .inner(&other.0)
            .map(|z| z.norm() >= 1.0 - tol)
            .unwrap_or(false)
    }
}

impl From<Ket> for PureState {
    fn from(ket: Ket) -> Self {
        Self(ket)
    }
}

impl PartialEq for PureState {
    fn eq(&self, other: &Self) -> bool {
        self.same_state(other, 1e-12)
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct DensityMatrix {
    matrix: CMat,
}

impl DensityMatrix {
    /// Validates and lightly repairs `matrix`: small anti-Hermitian parts are
    /// symmetrized away, eigenvalues in `[-PSD_TOL, 0)` are clipped, and the
    /// trace is renormalized to exactly one.
    pub fn new(matrix: CMat) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let herm_dev = linalg::max_abs(&(&matrix - matrix.adjoint()));
        if !(herm_dev <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian(herm_dev));
        }
        let matrix = linalg::hermitian_part(&matrix);
        let tr = linalg::trace(&matrix).re;
        if !((tr - 1.0).abs() <= TRACE_TOL) {
            return Err(Error::NotNormalized(tr));
        }
        let (values, vectors) = linalg::eigh(&matrix);
        let min = values.first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        let matrix = if min < 0.0 {
            let clipped = CVec::from_iterator(values.len(), values.iter().map(|&x| c(x.max(0.0), 0.0)));
            &vectors * CMat::from_diagonal(&clipped) * vectors.adjoint()
        } else {
            matrix
        };
        let tr = linalg::trace(&matrix).re;
        Ok(Self { matrix: linalg::hermitian_part(&(matrix / c(tr, 0.0))) })
    }

    /// Normalizes the trace first, then validates as [`DensityMatrix::new`].
    pub fn from_unnormalized(matrix: CMat) -> Result<Self> {
        let tr = linalg::trace(&matrix).re;
        if !(tr.abs() > 1e-300) {
            return Err(Error::Vanishing(tr));
        }
        Self::new(matrix / c(tr, 0.0))
    }

    pub fn from_ket(ket: &Ket) -> Self {
        Self { matrix: ket.projector() }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self { matrix: linalg::identity(n) / c(n as f64, 0.0) }
    }

    /// Diagonal state from nonnegative weights summing to one.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        let m = CMat::from_diagonal(&CVec::from_iterator(weights.len(), weights.iter().map(|&w| c(w, 0.0))));
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `tr(Aρ)`.
    pub fn expectation(&self, a: &CMat) -> C64 {
        (a * &self.matrix).trace()
    }

    /// Bloch vector `(tr ρσ₁, tr ρσ₂, tr ρσ₃)` of a qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        check_dim(2, self.dim())?;
        let s = linalg::pauli();
        Ok([self.expectation(&s[0]).re, self.expectation(&s[1]).re, self.expectation(&s[2]).re])
    }

    /// Qubit state with Bloch vector `r` (|r| ≤ 1).
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let s = linalg::pauli();
        let m = (linalg::identity(2) + &s[0] * c(r[0], 0.0) + &s[1] * c(r[1], 0.0) + &s[2] * c(r[2], 0.0))
            * c(0.5, 0.0);
        Self::new(m)
    }
}

/// Fubini–Study distance `arccos |⟨a|b⟩|`, in `[0, π/2]`.
pub fn fubini_study(a: &PureState, b: &PureState) -> Result<f64> {
    let overlap = a.ket().inner(b.ket())?.norm();
    Ok(overlap.clamp(0.0, 1.0).acos())
}

/// Hilbert–Schmidt distance `sqrt(tr (ρ₁ − ρ₂)²)`.
pub fn hs_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    Ok((a.matrix() - b.matrix()).norm())
}

/// Trace norm of a Hermitian matrix: the sum of its absolute eigenvalues.
pub fn trace_norm(m: &CMat) -> f64 {
    linalg::eigvalsh(m).iter().map(|x| x.abs()).sum()
}

/// Trace distance `‖ρ₁ − ρ₂‖₁` (no factor 1/2).
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    Ok(trace_norm(&(a.matrix() - b.matrix())))
}

/// Root fidelity `tr sqrt(√ρ₁ ρ₂ √ρ₁)`.
pub fn root_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    let s = linalg::sqrt_psd(a.matrix());
    let inner = &s * b.matrix() * &s;
    Ok(linalg::eigvalsh(&inner)
        .iter()
        .map(|&x| if x > EIGEN_FLOOR { x.sqrt() } else { 0.0 })
        .sum())
}

/// Bures distance `sqrt(2 (1 − tr sqrt(√ρ₁ ρ₂ √ρ₁)))`.
pub fn bures_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let f = root_fidelity(a, b)?;
    Ok((2.0 * (1.0 - f)).max(0.0).sqrt())
}

/// Von Neumann entropy `−tr ρ ln ρ` (natural log, nonnegative).
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .iter()
        .filter(|&&x| x > EIGEN_FLOOR)
        .map(|&x| -x * x.ln())
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace of a state on `ℂⁿ ⊗ ℂᵐ` (index `a·m + b`), removing
/// `trace_out`.
pub fn partial_trace(sigma: &DensityMatrix, dims: (usize, usize), trace_out: Subsystem) -> Result<DensityMatrix> {
    let m = partial_trace_matrix(sigma.matrix(), dims, trace_out)?;
    DensityMatrix::new(m)
}

/// Partial trace on a bare matrix; no state invariants are assumed.
pub fn partial_trace_matrix(sigma: &CMat, dims: (usize, usize), trace_out: Subsystem) -> Result<CMat> {
    let (n, m) = dims;
    check_dim(n * m, sigma.nrows())?;
    Ok(match trace_out {
        Subsystem::B => CMat::from_fn(n, n, |a, a2| (0..m).map(|b| sigma[(a * m + b, a2 * m + b)]).sum()),
        Subsystem::A => CMat::from_fn(m, m, |b, b2| (0..n).map(|a| sigma[(a * m + b, a * m + b2)]).sum()),
    })
}

/// `{"dim": N, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<CMat> {
        let n = self.dim;
        if self.re.len() != n || self.im.len() != n {
            return Err(Error::Invalid(format!("expected {n} rows in re/im")));
        }
        for row in self.re.iter().chain(&self.im) {
            if row.len() != n {
                return Err(Error::Invalid(format!("expected {n} columns, found {}", row.len())));
            }
        }
        Ok(CMat::from_fn(n, n, |i, j| c(self.re[i][j], self.im[i][j])))
    }
}

impl From<&CMat> for MatrixJson {
    fn from(m: &CMat) -> Self {
        let n = m.nrows();
        Self {
            dim: n,
            re: (0..n).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for DensityMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        DensityMatrix::new(j.to_matrix()?)
    }
}

impl From<DensityMatrix> for MatrixJson {
    fn from(rho: DensityMatrix) -> Self {
        MatrixJson::from(&rho.matrix)
    }
}

/// `{"dim": N, "re": [...], "im": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl TryFrom<VectorJson> for Ket {
    type Error = Error;
    fn try_from(j: VectorJson) -> Result<Self> {
        if j.re.len() != j.dim || j.im.len() != j.dim {
            return Err(Error::Invalid(format!("expected {} amplitudes", j.dim)));
        }
        Ket::new(CVec::from_iterator(j.dim, j.re.iter().zip(&j.im).map(|(&r, &i)| c(r, i))))
    }
}

impl From<Ket> for VectorJson {
    fn from(k: Ket) -> Self {
        Self {
            dim: k.dim(),
            re: k.amplitudes.iter().map(|z| z.re).collect(),
            im: k.amplitudes.iter().map(|z| z.im).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, random_density_matrix, random_unit_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, LN_2};

    fn diag(w: &[f64]) -> DensityMatrix {
        DensityMatrix::diagonal(w).unwrap()
    }

    #[test]
    fn fubini_study_examples() {
        let e1 = PureState::new(Ket::basis(3, 0));
        let e2 = PureState::new(Ket::basis(3, 1));
        assert_eq!(fubini_study(&e1, &e1).unwrap(), 0.0);
        assert!((fubini_study(&e1, &e2).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let other = PureState::new(Ket::basis(2, 0));
        assert!(matches!(fubini_study(&e1, &other), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn fubini_study_matches_direct_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_unit_vector(4, &mut rng);
        let b = random_unit_vector(4, &mut rng);
        // oracle: explicit component sum
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..4 {
            re += a[k].re * b[k].re + a[k].im * b[k].im;
            im += a[k].re * b[k].im - a[k].im * b[k].re;
        }
        let expected = (re * re + im * im).sqrt().acos();
        let got = fubini_study(&PureState::new(Ket::new(a).unwrap()), &PureState::new(Ket::new(b).unwrap())).unwrap();
        assert!((got - expected).abs() < 1e-13);
    }

    #[test]
    fn pure_state_equality_ignores_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let v = random_unit_vector(3, &mut rng);
        let a = PureState::new(Ket::new(v.clone()).unwrap());
        let b = PureState::new(Ket::new(v * c(0.3, 0.7)).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, PureState::new(Ket::basis(3, 0)));
    }

    #[test]
    fn hs_distance_examples() {
        let p0 = diag(&[1.0, 0.0]);
        let p1 = diag(&[0.0, 1.0]);
        assert_eq!(hs_distance(&p0, &p0).unwrap(), 0.0);
        assert!((hs_distance(&p0, &p1).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((hs_distance(&p0, &diag(&[0.5, 0.5])).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn trace_distance_examples() {
        let p0 = diag(&[1.0, 0.0]);
        let p1 = diag(&[0.0, 1.0]);
        assert!(trace_distance(&p0, &p0).unwrap().abs() < 1e-15);
        assert!((trace_distance(&p0, &p1).unwrap() - 2.0).abs() < 1e-14);
        assert!((trace_distance(&diag(&[0.75, 0.25]), &diag(&[0.25, 0.75])).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bures_distance_examples() {
        let p0 = diag(&[1.0, 0.0]);
        let p1 = diag(&[0.0, 1.0]);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(bures_distance(&p0, &p0).unwrap() < 1e-7);
        assert!((bures_distance(&p0, &p1).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        let expected = (2.0 - 2f64.sqrt()).sqrt();
        assert!((bures_distance(&mixed, &p0).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn entropy_examples() {
        assert!(von_neumann_entropy(&diag(&[1.0, 0.0, 0.0])).abs() < 1e-15);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(2)) - LN_2).abs() < 1e-14);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(5)) - 5f64.ln()).abs() < 1e-14);
        let expected = -0.25 * 0.25f64.ln() - 0.75 * 0.75f64.ln();
        assert!((von_neumann_entropy(&diag(&[0.25, 0.75])) - expected).abs() < 1e-14);
    }

    #[test]
    fn entropy_is_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 2..6 {
            let rho = DensityMatrix::new(random_density_matrix(n, n, &mut rng)).unwrap();
            let u = haar_unitary(n, &mut rng);
            let rotated = DensityMatrix::new(&u * rho.matrix() * u.adjoint()).unwrap();
            assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&rotated)).abs() < 1e-10);
        }
    }

    #[test]
    fn partial_trace_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let a = random_density_matrix(2, 2, &mut rng);
        let b = random_density_matrix(3, 3, &mut rng);
        let prod = DensityMatrix::new(a.kronecker(&b)).unwrap();
        let ra = partial_trace(&prod, (2, 3), Subsystem::B).unwrap();
        assert!(linalg::max_abs(&(ra.matrix() - &a)) < 1e-12);
        let rb = partial_trace(&prod, (2, 3), Subsystem::A).unwrap();
        assert!(linalg::max_abs(&(rb.matrix() - &b)) < 1e-12);

        // Bell state (|00⟩ + |11⟩)/√2
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Ket::from_slice(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        let reduced = partial_trace(&DensityMatrix::from_ket(&bell), (2, 2), Subsystem::B).unwrap();
        assert!(linalg::max_abs(&(reduced.matrix() - DensityMatrix::maximally_mixed(2).matrix())) < 1e-15);

        let full = partial_trace(&DensityMatrix::maximally_mixed(6), (3, 2), Subsystem::B).unwrap();
        assert!(linalg::max_abs(&(full.matrix() - DensityMatrix::maximally_mixed(3).matrix())) < 1e-15);

        assert!(partial_trace(&DensityMatrix::maximally_mixed(5), (2, 2), Subsystem::B).is_err());
    }

    #[test]
    fn construction_rejects_invalid_matrices() {
        let not_herm = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(DensityMatrix::new(not_herm), Err(Error::NotHermitian(_))));
        let neg = CMat::from_row_slice(2, 2, &[c(1.1, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.1, 0.0)]);
        assert!(matches!(DensityMatrix::new(neg), Err(Error::NotPositive(_))));
        let tr = CMat::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.0)]);
        assert!(matches!(DensityMatrix::new(tr), Err(Error::NotNormalized(_))));
        // slightly negative eigenvalue is clipped
        let nearly = CMat::from_row_slice(2, 2, &[c(1.0 + 5e-11, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-5e-11, 0.0)]);
        let rho = DensityMatrix::new(nearly).unwrap();
        assert!(rho.eigenvalues()[0] >= 0.0);
    }

    #[test]
    fn json_layout_round_trips() {
        let rho = DensityMatrix::from_bloch([0.1, -0.2, 0.3]).unwrap();
        let text = serde_json::to_string(&rho).unwrap();
        assert!(text.starts_with("{\"dim\":2,\"re\":[["));
        let back: DensityMatrix = serde_json::from_str(&text).unwrap();
        assert!(linalg::max_abs(&(back.matrix() - rho.matrix())) < 1e-15);
        let bad = r#"{"dim":2,"re":[[1,0],[0,0]],"im":[[0,0],[0,0]],"extra":1}"#;
        assert!(serde_json::from_str::<DensityMatrix>(bad).is_err());
    }
}
