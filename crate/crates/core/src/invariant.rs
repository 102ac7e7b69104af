//! Invariant states of channels and the common-block-diagonal criterion for
//! their uniqueness.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, c, kron, max_abs, null_space, orthonormalize, unvec, vec, CMat, CVec, C64};
use crate::qstate::{trace_distance, DensityMatrix, MatrixJson};
use crate::quantum::{random_external_field, DensityMap, QuantumChannel};

/// `|λ − 1|` below this counts as eigenvalue one.
pub const EIGENVALUE_TOL: f64 = 1e-9;
/// Largest dimension for dense superoperator eigensolves.
pub const DENSE_DIM_CAP: usize = 100;
/// Eigenvalue gap below which a random commutant sample is redrawn.
pub const BLOCK_GAP: f64 = 1e-6;
const BLOCK_ATTEMPTS: usize = 5;

/// Matrix of a linear map on column-major `vec(ρ)`.
#[derive(Clone, Debug)]
pub struct Superoperator {
    matrix: CMat,
    dim: usize,
}

impl Superoperator {
    pub fn of(ch: &QuantumChannel) -> Self {
        Self { matrix: ch.superoperator(), dim: ch.dim() }
    }

    /// Build from the images of the matrix units under `f`.
    pub fn from_fn(dim: usize, f: impl Fn(&CMat) -> CMat) -> Self {
        let n2 = dim * dim;
        let mut matrix = CMat::zeros(n2, n2);
        for k in 0..n2 {
            let mut e = CMat::zeros(dim, dim);
            // column-major unit: entry (k mod N, k div N)
            e[(k % dim, k / dim)] = linalg::ONE;
            matrix.set_column(k, &vec(&f(&e)));
        }
        Self { matrix, dim }
    }

    /// Wrap an `N² × N²` matrix acting on column-major `vec(ρ)`.
    pub fn from_matrix(matrix: CMat) -> Result<Self> {
        let dim = (matrix.nrows() as f64).sqrt().round() as usize;
        if dim * dim != matrix.nrows() || !matrix.is_square() {
            return Err(Error::Invalid(format!("{}×{} is not a superoperator shape", matrix.nrows(), matrix.ncols())));
        }
        Ok(Self { matrix, dim })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, rho: &CMat) -> CMat {
        unvec(&(&self.matrix * vec(rho)), self.dim)
    }

    /// Eigenvalues sorted by decreasing modulus.
    pub fn spectrum(&self) -> Vec<C64> {
        let mut ev = linalg::eigenvalues(&self.matrix);
        ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        ev
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedStateReport {
    /// Dimension of the eigenvalue-one eigenspace.
    pub multiplicity: usize,
    /// Hermitian basis of the fixed matrices.
    #[serde(serialize_with = "serialize_matrices")]
    pub basis: Vec<CMat>,
    /// Image of `𝟙/N` under the spectral projector onto the fixed space.
    pub state: Option<DensityMatrix>,
    /// `‖Λ(ρ) − ρ‖_max` of `state`.
    pub residual: f64,
    pub unique: bool,
    /// Eigenvalue moduli, largest first.
    pub spectrum_moduli: Vec<f64>,
}

fn serialize_matrices<S: serde::Serializer>(ms: &[CMat], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(ms.len()))?;
    for m in ms {
        seq.serialize_element(&MatrixJson::from(m))?;
    }
    seq.end()
}

/// Fixed points of a linear map given by its superoperator.
///
/// `trace_preserving` selects whether an empty eigenvalue-one space is an
/// error (it cannot happen analytically for trace-preserving maps).
pub fn fixed_states_of(sup: &Superoperator, tol: f64, trace_preserving: bool) -> Result<FixedStateReport> {
    let n = sup.dim();
    if n > DENSE_DIM_CAP {
        return Err(Error::Invalid(format!("dense eigensolve capped at N = {DENSE_DIM_CAP}; got {n}")));
    }
    let id = linalg::identity(n * n);
    let shifted = sup.matrix() - &id;
    let right = null_space(&shifted, tol);
    let multiplicity = right.len();
    let spectrum_moduli = sup.spectrum().iter().map(|z| z.norm()).collect();
    if multiplicity == 0 {
        if trace_preserving {
            return Err(Error::NonConvergence { steps: 0, residual: f64::NAN });
        }
        return Ok(FixedStateReport {
            multiplicity,
            basis: vec![],
            state: None,
            residual: f64::NAN,
            unique: false,
            spectrum_moduli,
        });
    }
    // fixed spaces of Hermiticity-preserving maps are closed under †
    let mut herm = Vec::with_capacity(2 * multiplicity);
    for v in &right {
        let x = unvec(v, n);
        herm.push(vec(&linalg::hermitian_part(&x)));
        herm.push(vec(&linalg::hermitian_part(&(&x * -linalg::I))));
    }
    let basis: Vec<CMat> = orthonormalize(&herm, 1e-6)
        .into_iter()
        .take(multiplicity)
        .map(|v| linalg::hermitian_part(&unvec(&v, n)))
        .collect();

    // spectral projector R (L†R)⁻¹ L† applied to vec(𝟙/N)
    let left = null_space(&shifted.adjoint(), tol);
    let state = if left.len() == multiplicity {
        let r = CMat::from_columns(&right);
        let l = CMat::from_columns(&left);
        let gram = l.adjoint() * &r;
        let inv = gram.try_inverse().ok_or(Error::NotInvertible(0.0))?;
        let start = vec(&(linalg::identity(n) / c(n as f64, 0.0)));
        let fixed = unvec(&(&r * (inv * (l.adjoint() * start))), n);
        DensityMatrix::from_unnormalized(linalg::hermitian_part(&fixed)).ok()
    } else {
        None
    };
    let residual = state.as_ref().map_or(f64::NAN, |s| max_abs(&(sup.apply(s.matrix()) - s.matrix())));
    Ok(FixedStateReport { multiplicity, basis, state, residual, unique: multiplicity == 1, spectrum_moduli })
}

/// Invariant states of a channel.
pub fn fixed_states(ch: &QuantumChannel, tol: f64) -> Result<FixedStateReport> {
    fixed_states_of(&Superoperator::of(ch), tol, ch.trace_preserving().is_yes())
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerIteration {
    pub state: DensityMatrix,
    pub steps: usize,
    pub converged: bool,
    /// Trace distance between the last two iterates.
    pub residual: f64,
}

/// Iterate `ρ ← Λ(ρ)` until `D_tr(Λρ, ρ) < tol` or `max_steps`.
pub fn power_iteration(map: &impl DensityMap, rho0: &DensityMatrix, max_steps: usize, tol: f64) -> Result<PowerIteration> {
    check_dim(map.dim(), rho0.dim())?;
    let mut rho = rho0.clone();
    let mut residual = f64::INFINITY;
    for step in 1..=max_steps {
        let next = map.apply(&rho)?;
        residual = trace_distance(&next, &rho)?;
        rho = next;
        if residual < tol {
            return Ok(PowerIteration { state: rho, steps: step, converged: true, residual });
        }
    }
    Ok(PowerIteration { state: rho, steps: max_steps, converged: false, residual })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reducibility {
    Reducible,
    Irreducible,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutantReport {
    pub dimension: usize,
    pub verdict: Reducibility,
    /// Block sizes in the transformed basis (a single block when irreducible).
    pub blocks: Vec<usize>,
    /// Unitary whose columns span the blocks in order.
    #[serde(serialize_with = "serialize_matrix")]
    pub transform: CMat,
    /// Largest `‖UᵢX − XUᵢ‖_max` over the reported basis.
    pub residual: f64,
    /// Largest off-block entry of `Q†UᵢQ`.
    pub off_block: f64,
    #[serde(skip)]
    pub basis: Vec<CMat>,
}

fn serialize_matrix<S: serde::Serializer>(m: &CMat, s: S) -> std::result::Result<S::Ok, S::Error> {
    MatrixJson::from(m).serialize(s)
}

fn check_unitaries(us: &[CMat]) -> Result<usize> {
    let n = us.first().ok_or_else(|| Error::Invalid("empty unitary family".into()))?.nrows();
    for u in us {
        check_dim(n, u.nrows())?;
        let dev = if u.is_square() { max_abs(&(u.adjoint() * u - linalg::identity(n))) } else { f64::INFINITY };
        if !(dev <= 1e-10) {
            return Err(Error::NotUnitary(dev));
        }
    }
    Ok(n)
}

/// Largest entry of `Q†UQ` outside the diagonal blocks of the given sizes.
pub fn off_block_magnitude(u: &CMat, q: &CMat, blocks: &[usize]) -> f64 {
    let t = q.adjoint() * u * q;
    let mut label = Vec::with_capacity(t.nrows());
    for (b, &size) in blocks.iter().enumerate() {
        label.extend(std::iter::repeat_n(b, size));
    }
    let mut worst = 0.0f64;
    for i in 0..t.nrows() {
        for j in 0..t.ncols() {
            if label[i] != label[j] {
                worst = worst.max(t[(i, j)].norm());
            }
        }
    }
    worst
}

/// Matrices commuting with every `Uᵢ`, and the common blocks they reveal.
pub fn commutant<R: Rng + ?Sized>(us: &[CMat], tol: f64, rng: &mut R) -> Result<CommutantReport> {
    let n = check_unitaries(us)?;
    let id = linalg::identity(n);
    // vec(UX − XU) = (𝟙 ⊗ U − Uᵀ ⊗ 𝟙) vec(X)
    let mut stacked = CMat::zeros(n * n * us.len(), n * n);
    for (k, u) in us.iter().enumerate() {
        let block = kron(&id, u) - kron(&u.transpose(), &id);
        stacked.view_mut((k * n * n, 0), (n * n, n * n)).copy_from(&block);
    }
    let basis: Vec<CMat> = null_space(&stacked, tol).iter().map(|v| unvec(v, n)).collect();
    let dimension = basis.len();
    let residual = basis
        .iter()
        .flat_map(|x| us.iter().map(move |u| max_abs(&(u * x - x * u))))
        .fold(0.0, f64::max);
    if dimension <= 1 {
        return Ok(CommutantReport {
            dimension,
            verdict: Reducibility::Irreducible,
            blocks: vec![n],
            transform: id,
            residual,
            off_block: 0.0,
            basis,
        });
    }
    // the commutant is a *-algebra, so Hermitian parts stay inside it
    let herm: Vec<CMat> = basis
        .iter()
        .flat_map(|x| [linalg::hermitian_part(x), linalg::hermitian_part(&(x * linalg::I))])
        .collect();
    let mut best: Option<(Vec<usize>, CMat)> = None;
    for _ in 0..BLOCK_ATTEMPTS {
        let mut h = CMat::zeros(n, n);
        for x in &herm {
            let w: f64 = rng.sample(rand_distr::StandardNormal);
            h += x * c(w, 0.0);
        }
        let (values, vectors) = linalg::eigh(&h);
        let scale = values.iter().fold(1e-300f64, |a, v| a.max(v.abs()));
        let mut blocks = vec![1usize];
        let mut ambiguous = false;
        for w in values.windows(2) {
            let gap = (w[1] - w[0]) / scale;
            if gap < 1e-9 {
                *blocks.last_mut().unwrap() += 1;
            } else {
                if gap < BLOCK_GAP {
                    ambiguous = true;
                }
                blocks.push(1);
            }
        }
        let settled = !ambiguous;
        best = Some((blocks, vectors));
        if settled {
            break;
        }
    }
    let (blocks, transform) = best.expect("at least one attempt");
    let off_block = us.iter().map(|u| off_block_magnitude(u, &transform, &blocks)).fold(0.0, f64::max);
    Ok(CommutantReport { dimension, verdict: Reducibility::Reducible, blocks, transform, residual, off_block, basis })
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessReport {
    /// Verdict from the commutant: unique iff its dimension is one.
    pub unique: bool,
    pub commutant_dimension: usize,
    /// Eigenvalue-one multiplicity of the induced random external field.
    pub fixed_multiplicity: usize,
    /// Whether the two routes agree.
    pub consistent: bool,
    /// For reducible families: the direct sum `⊕ (σⱼ/αⱼ)𝟙_{αⱼ}` over the blocks.
    pub direct_sum_state: Option<DensityMatrix>,
    /// `‖Λ(ρ) − ρ‖_max` for the direct-sum state.
    pub direct_sum_residual: Option<f64>,
    pub commutant: CommutantReport,
}

/// Direct-sum state `⊕ⱼ (σⱼ/αⱼ) 𝟙_{αⱼ}` in the block basis `q`.
pub fn direct_sum_state(q: &CMat, blocks: &[usize], sigma: &[f64]) -> Result<DensityMatrix> {
    if blocks.len() != sigma.len() {
        return Err(Error::Invalid(format!("{} weights for {} blocks", sigma.len(), blocks.len())));
    }
    let mut diag = Vec::with_capacity(q.nrows());
    for (&a, &s) in blocks.iter().zip(sigma) {
        diag.extend(std::iter::repeat_n(c(s / a as f64, 0.0), a));
    }
    let d = CMat::from_diagonal(&CVec::from_vec(diag));
    DensityMatrix::new(q * d * q.adjoint())
}

/// Decide uniqueness of the invariant state of `Σ pᵢ UᵢρUᵢ†` through the
/// commutant and cross-check against the fixed-space multiplicity.
pub fn uniqueness_verdict<R: Rng + ?Sized>(probs: &[f64], us: &[CMat], tol: f64, rng: &mut R) -> Result<UniquenessReport> {
    if probs.iter().any(|p| !(*p > 0.0)) {
        return Err(Error::Invalid("uniqueness criterion needs strictly positive probabilities".into()));
    }
    let comm = commutant(us, tol, rng)?;
    let channel = random_external_field(probs, us.to_vec())?;
    let fixed = fixed_states(&channel, tol)?;
    let unique = comm.dimension == 1;
    let (direct_sum_state, direct_sum_residual) = if unique {
        (None, None)
    } else {
        // distinct per-block levels make the state differ from 𝟙/N
        let raw: Vec<f64> = comm.blocks.iter().enumerate().map(|(j, &a)| (j + 1) as f64 * a as f64).collect();
        let total: f64 = raw.iter().sum();
        let sigma: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let rho = direct_sum_state(&comm.transform, &comm.blocks, &sigma)?;
        let res = max_abs(&(channel.apply_matrix(rho.matrix()) - rho.matrix()));
        (Some(rho), Some(res))
    };
    Ok(UniquenessReport {
        unique,
        commutant_dimension: comm.dimension,
        fixed_multiplicity: fixed.multiplicity,
        consistent: unique == (fixed.multiplicity == 1),
        direct_sum_state,
        direct_sum_residual,
        commutant: comm,
    })
}

/// Common block split obtained from a fixed state `ρ ≠ 𝟙/N`: mixing with
/// `𝟙/N` until the smallest eigenvalue vanishes, the kernel of the result is
/// invariant under every `Uᵢ`. Returns the eigenbasis of `ρ` (ascending) and
/// the kernel dimension `n′`.
pub fn split_from_fixed_state(rho: &DensityMatrix, tol: f64) -> Result<(CMat, usize)> {
    let n = rho.dim();
    let (values, vectors) = linalg::eigh(rho.matrix());
    let s1 = values[0];
    if (values[n - 1] - s1).abs() <= tol {
        return Err(Error::Invalid("the maximally mixed state gives no split".into()));
    }
    let gamma = 1.0 / (1.0 - s1 * n as f64);
    let mixed: Vec<f64> = values.iter().map(|s| gamma * s + (1.0 - gamma) / n as f64).collect();
    let kernel = mixed.iter().take_while(|&&s| s.abs() <= tol).count().max(1);
    Ok((vectors, kernel))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Lemma1Outcome {
    /// The opposite block vanished within `√N·tol`.
    Holds { opposite_max: f64 },
    Violated { opposite_max: f64 },
    /// The block `U_{nm}`, `n ∈ A`, `m ∉ A` was not zero to begin with.
    PreconditionNotMet { upper_max: f64 },
}

/// For a unitary with `U_{nm} = 0` (n ∈ A, m ∉ A), check that `U_{nm} = 0`
/// also for n ∉ A, m ∈ A.
pub fn lemma1_validate(u: &CMat, a: &[usize], tol: f64) -> Result<Lemma1Outcome> {
    let n = u.nrows();
    check_unitaries(std::slice::from_ref(u))?;
    let mut in_a = vec![false; n];
    for &i in a {
        if i >= n {
            return Err(Error::Invalid(format!("index {i} out of range for N = {n}")));
        }
        in_a[i] = true;
    }
    let count = in_a.iter().filter(|&&x| x).count();
    if count == 0 || count == n {
        return Err(Error::Invalid("A must be a nonempty proper subset".into()));
    }
    let block_max = |rows_in_a: bool| {
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if in_a[i] == rows_in_a && in_a[j] != rows_in_a {
                    m = m.max(u[(i, j)].norm());
                }
            }
        }
        m
    };
    let upper_max = block_max(true);
    if upper_max > tol {
        return Ok(Lemma1Outcome::PreconditionNotMet { upper_max });
    }
    let opposite_max = block_max(false);
    Ok(if opposite_max <= (n as f64).sqrt() * tol {
        Lemma1Outcome::Holds { opposite_max }
    } else {
        Lemma1Outcome::Violated { opposite_max }
    })
}

/// `diag(A, B)` conjugated by the permutation matrix sending position `k`
/// to `perm[k]`.
pub fn permuted_direct_sum(a: &CMat, b: &CMat, perm: &[usize]) -> CMat {
    let (na, nb) = (a.nrows(), b.nrows());
    let n = na + nb;
    let mut d = CMat::zeros(n, n);
    d.view_mut((0, 0), (na, na)).copy_from(a);
    d.view_mut((na, na), (nb, nb)).copy_from(b);
    let p = DMatrix::from_fn(n, n, |i, j| if perm[j] == i { linalg::ONE } else { linalg::ZERO });
    &p * d * p.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, random_density_matrix};
    use crate::quantum::{depolarizing, MixedQIFS};
    use crate::qstate::Ket;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(phases: &[f64]) -> CMat {
        CMat::from_diagonal(&CVec::from_iterator(phases.len(), phases.iter().map(|&t| (linalg::I * t).exp())))
    }

    #[test]
    fn superoperator_matches_direct_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = crate::quantum::random_kraus_channel(3, 2, &mut rng).unwrap();
        let sup = Superoperator::of(&ch);
        let via_units = Superoperator::from_fn(3, |m| ch.apply_matrix(m));
        assert!(max_abs(&(sup.matrix() - via_units.matrix())) < 1e-14);
        for _ in 0..5 {
            let rho = random_density_matrix(3, 3, &mut rng);
            assert!(max_abs(&(sup.apply(&rho) - ch.apply_matrix(&rho))) < 1e-12);
        }
    }

    #[test]
    fn depolarizing_spectrum() {
        let p = 0.3;
        let sup = Superoperator::of(&depolarizing(p).unwrap());
        let mut ev: Vec<f64> = sup.spectrum().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        let f = 1.0 - 4.0 * p / 3.0;
        for (got, want) in ev.iter().zip([f, f, f, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn unitary_superoperator_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ch = QuantumChannel::unitary(haar_unitary(3, &mut rng)).unwrap();
        assert!(linalg::is_unitary(Superoperator::of(&ch).matrix(), 1e-12));
    }

    #[test]
    fn fixed_states_of_simple_channels() {
        let r = fixed_states(&depolarizing(0.3).unwrap(), EIGENVALUE_TOL).unwrap();
        assert_eq!(r.multiplicity, 1);
        assert!(max_abs(&(r.state.unwrap().matrix() - DensityMatrix::maximally_mixed(2).matrix())) < 1e-10);

        let ch = random_external_field(&[0.5, 0.5], vec![diag(&[0.0, 0.7]), diag(&[0.0, 1.9])]).unwrap();
        let r = fixed_states(&ch, EIGENVALUE_TOL).unwrap();
        assert_eq!(r.multiplicity, 2);
        let d = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        assert!(max_abs(&(ch.apply_matrix(d.matrix()) - d.matrix())) < 1e-14);
        for b in &r.basis {
            assert!(max_abs(&(ch.apply_matrix(b) - b)) < 1e-8);
            assert!(max_abs(&(b - b.adjoint())) < 1e-14);
        }

        let r = fixed_states(&QuantumChannel::identity(3), EIGENVALUE_TOL).unwrap();
        assert_eq!(r.multiplicity, 9);
        assert_eq!(r.basis.len(), 9);
    }

    #[test]
    fn power_iteration_examples() {
        let q = MixedQIFS::homotheties_to_basis(2);
        let r = power_iteration(&q, &DensityMatrix::from_ket(&Ket::basis(2, 0)), 40, 1e-12).unwrap();
        assert!(r.converged && r.steps <= 40);
        assert!(trace_distance(&r.state, &DensityMatrix::maximally_mixed(2)).unwrap() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho0 = DensityMatrix::new(random_density_matrix(2, 1, &mut rng)).unwrap();
        let r = power_iteration(&depolarizing(0.5).unwrap(), &rho0, 80, 1e-12).unwrap();
        assert!(r.converged && r.steps <= 80);
        assert!(trace_distance(&r.state, &DensityMatrix::maximally_mixed(2)).unwrap() < 1e-12);

        let u = QuantumChannel::unitary(haar_unitary(4, &mut rng)).unwrap();
        let r = power_iteration(&u, &DensityMatrix::maximally_mixed(4), 10, 1e-12).unwrap();
        assert_eq!(r.steps, 1);
    }

    #[test]
    fn commutant_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let [s1, s2, s3] = linalg::pauli();
        let r = commutant(&[s1, s2], 1e-8, &mut rng).unwrap();
        assert_eq!((r.dimension, r.verdict), (1, Reducibility::Irreducible));
        let r = commutant(std::slice::from_ref(&s3), 1e-8, &mut rng).unwrap();
        assert_eq!((r.dimension, r.verdict), (2, Reducibility::Reducible));
        assert_eq!(r.blocks, vec![1, 1]);
        let r = commutant(&[linalg::identity(3)], 1e-8, &mut rng).unwrap();
        assert_eq!(r.dimension, 9);
        assert!(commutant(&[linalg::identity(2) * c(2.0, 0.0)], 1e-8, &mut rng).is_err());
    }

    #[test]
    fn block_structure_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut perm: Vec<usize> = (0..5).collect();
        perm.shuffle(&mut rng);
        let us: Vec<CMat> = (0..2)
            .map(|_| permuted_direct_sum(&haar_unitary(2, &mut rng), &haar_unitary(3, &mut rng), &perm))
            .collect();
        let r = uniqueness_verdict(&[0.4, 0.6], &us, 1e-8, &mut rng).unwrap();
        assert!(!r.unique && r.consistent);
        let mut sizes = r.commutant.blocks.clone();
        sizes.sort();
        assert_eq!(sizes, vec![2, 3]);
        assert!(r.commutant.off_block < 1e-8);
        assert!(r.direct_sum_residual.unwrap() < 1e-8);
        // the converse construction finds an invariant kernel
        let (basis, kernel) = split_from_fixed_state(r.direct_sum_state.as_ref().unwrap(), 1e-9).unwrap();
        for u in &us {
            assert!(off_block_magnitude(u, &basis, &[kernel, 5 - kernel]) < 1e-8);
        }
    }

    #[test]
    fn haar_pairs_are_irreducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let us = vec![haar_unitary(4, &mut rng), haar_unitary(4, &mut rng)];
        let r = uniqueness_verdict(&[0.5, 0.5], &us, 1e-8, &mut rng).unwrap();
        assert!(r.unique && r.consistent);
        assert!(uniqueness_verdict(&[1.0, 0.0], &us, 1e-8, &mut rng).is_err());
    }

    #[test]
    fn lemma1_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = permuted_direct_sum(&haar_unitary(1, &mut rng), &haar_unitary(3, &mut rng), &[0, 1, 2, 3]);
        assert_eq!(lemma1_validate(&u, &[0], 1e-10).unwrap(), Lemma1Outcome::Holds { opposite_max: 0.0 });
        let h = haar_unitary(4, &mut rng);
        assert!(matches!(lemma1_validate(&h, &[0], 1e-10).unwrap(), Lemma1Outcome::PreconditionNotMet { .. }));
        assert!(lemma1_validate(&h, &[], 1e-10).is_err());
    }
}
