use rand::Rng;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, c, kron, max_abs, CMat};
use crate::qstate::{partial_trace_matrix, DensityMatrix, Subsystem};

/// Tolerance for the Kraus completeness and unitality identities.
pub const KRAUS_TOL: f64 = 1e-10;

/// Outcome of a property check on a channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Yes,
    No,
    /// The check could not be evaluated (non-finite entries).
    Unknown,
}

impl Flag {
    fn from_deviation(d: f64) -> Self {
        if !d.is_finite() {
            Flag::Unknown
        } else if d <= KRAUS_TOL {
            Flag::Yes
        } else {
            Flag::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Flag::Yes
    }
}

/// A linear map `ρ ↦ Σ Vⱼ ρ Vⱼ†` given by its Kraus operators.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dim: usize,
    kraus: Vec<CMat>,
    trace_preserving: Flag,
    unital: Flag,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMat>) -> Result<Self> {
        let dim = kraus.first().ok_or_else(|| Error::Invalid("a channel needs at least one Kraus operator".into()))?.nrows();
        for k in &kraus {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.nrows().max(k.ncols()) });
            }
        }
        let (tp, un) = deviations(&kraus, dim);
        Ok(Self { dim, trace_preserving: Flag::from_deviation(tp), unital: Flag::from_deviation(un), kraus })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![linalg::identity(n)]).expect("identity is a channel")
    }

    /// Conjugation by a unitary.
    pub fn unitary(u: CMat) -> Result<Self> {
        random_external_field(&[1.0], vec![u])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn trace_preserving(&self) -> Flag {
        self.trace_preserving
    }

    pub fn unital(&self) -> Flag {
        self.unital
    }

    /// Trace preserving and unital.
    pub fn is_bistochastic(&self) -> bool {
        self.trace_preserving.is_yes() && self.unital.is_yes()
    }

    /// `‖Σ V†V − 𝟙‖_max` and `‖Σ VV† − 𝟙‖_max`.
    pub fn identity_deviations(&self) -> (f64, f64) {
        deviations(&self.kraus, self.dim)
    }

    /// `Σ Vⱼ M Vⱼ†` on an arbitrary matrix.
    pub fn apply_matrix(&self, m: &CMat) -> CMat {
        self.kraus.iter().fold(CMat::zeros(self.dim, self.dim), |acc, k| acc + k * m * k.adjoint())
    }

    /// Apply to a state; the channel must be trace preserving.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_dim(self.dim, rho.dim())?;
        if !self.trace_preserving.is_yes() {
            let (d, _) = self.identity_deviations();
            return Err(Error::Invalid(format!("channel is not trace preserving (deviation {d:e})")));
        }
        DensityMatrix::new(self.apply_matrix(rho.matrix()))
    }

    /// Matrix of the map on column-major `vec(ρ)`: `Σ conj(Vⱼ) ⊗ Vⱼ`.
    pub fn superoperator(&self) -> CMat {
        let n2 = self.dim * self.dim;
        self.kraus.iter().fold(CMat::zeros(n2, n2), |acc, k| acc + kron(&k.conjugate(), k))
    }

    /// Choi matrix `Σ_{ab} |a⟩⟨b| ⊗ Λ(|a⟩⟨b|)`.
    pub fn choi(&self) -> CMat {
        let n = self.dim;
        let mut out = CMat::zeros(n * n, n * n);
        for a in 0..n {
            for b in 0..n {
                let mut e = CMat::zeros(n, n);
                e[(a, b)] = linalg::ONE;
                let img = self.apply_matrix(&e);
                out.view_mut((a * n, b * n), (n, n)).copy_from(&img);
            }
        }
        out
    }

    /// Smallest eigenvalue of the Choi matrix; a diagnostic for complete
    /// positivity, which Kraus form guarantees anyway.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        linalg::eigvalsh(&self.choi())[0]
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &QuantumChannel) -> Result<QuantumChannel> {
        check_dim(self.dim, first.dim)?;
        let mut ks = Vec::with_capacity(self.kraus.len() * first.kraus.len());
        for a in &self.kraus {
            for b in &first.kraus {
                ks.push(a * b);
            }
        }
        Self::new(ks)
    }
}

fn deviations(kraus: &[CMat], dim: usize) -> (f64, f64) {
    let id = linalg::identity(dim);
    let tp = kraus.iter().fold(CMat::zeros(dim, dim), |acc, k| acc + k.adjoint() * k) - &id;
    let un = kraus.iter().fold(CMat::zeros(dim, dim), |acc, k| acc + k * k.adjoint()) - &id;
    (max_abs(&tp), max_abs(&un))
}

pub(crate) fn check_probability_vector(probs: &[f64]) -> Result<()> {
    let sum: f64 = probs.iter().sum();
    if probs.iter().any(|p| !(*p >= 0.0)) || !((sum - 1.0).abs() <= 1e-12) {
        return Err(Error::Probability { sum, location: format!("{probs:?}") });
    }
    Ok(())
}

/// `ρ ↦ Σ pᵢ Uᵢ ρ Uᵢ†` with Kraus operators `√pᵢ Uᵢ`.
pub fn random_external_field(probs: &[f64], unitaries: Vec<CMat>) -> Result<QuantumChannel> {
    if probs.len() != unitaries.len() {
        return Err(Error::Invalid(format!("{} probabilities for {} unitaries", probs.len(), unitaries.len())));
    }
    check_probability_vector(probs)?;
    for u in &unitaries {
        let dev = if u.is_square() { max_abs(&(u.adjoint() * u - linalg::identity(u.nrows()))) } else { f64::INFINITY };
        if !(dev <= KRAUS_TOL) {
            return Err(Error::NotUnitary(dev));
        }
    }
    QuantumChannel::new(unitaries.into_iter().zip(probs).map(|(u, p)| u * c(p.sqrt(), 0.0)).collect())
}

/// Qubit depolarizing channel `(1 − p)ρ + (p/3) Σₖ σₖ ρ σₖ`.
pub fn depolarizing(p: f64) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Invalid(format!("error probability {p} outside [0, 1]")));
    }
    let [s1, s2, s3] = linalg::pauli();
    random_external_field(&[1.0 - p, p / 3.0, p / 3.0, p / 3.0], vec![linalg::identity(2), s1, s2, s3])
}

/// Split a dimension `total = n·m` given `m`.
fn system_dim(total: usize, m: usize) -> Result<usize> {
    if m == 0 || !total.is_multiple_of(m) {
        return Err(Error::Invalid(format!("dimension {total} does not factor with environment dimension {m}")));
    }
    Ok(total / m)
}

/// Channel on the system obtained by coupling to a maximally mixed
/// `m`-level environment through `u` and tracing the environment out.
///
/// Kraus operators `K_{μν} = (1/√m) (𝟙 ⊗ ⟨μ|) U (𝟙 ⊗ |ν⟩)`, with the
/// composite index `a·m + b`.
pub fn ancilla_channel(u: &CMat, m: usize) -> Result<QuantumChannel> {
    let n = system_dim(u.nrows(), m)?;
    let dev = if u.is_square() { max_abs(&(u.adjoint() * u - linalg::identity(u.nrows()))) } else { f64::INFINITY };
    if !(dev <= KRAUS_TOL) {
        return Err(Error::NotUnitary(dev));
    }
    let scale = c(1.0 / (m as f64).sqrt(), 0.0);
    let mut kraus = Vec::with_capacity(m * m);
    for mu in 0..m {
        for nu in 0..m {
            kraus.push(CMat::from_fn(n, n, |a, a2| u[(a * m + mu, a2 * m + nu)] * scale));
        }
    }
    QuantumChannel::new(kraus)
}

/// `tr_B(U (ρ ⊗ 𝟙/m) U†)` evaluated directly on the composite space.
pub fn ancilla_direct(u: &CMat, m: usize, rho: &CMat) -> Result<CMat> {
    let n = system_dim(u.nrows(), m)?;
    check_dim(n, rho.nrows())?;
    let env = linalg::identity(m) / c(m as f64, 0.0);
    let sigma = u * kron(rho, &env) * u.adjoint();
    partial_trace_matrix(&sigma, (n, m), Subsystem::B)
}

/// Random trace-preserving channel with `k` Kraus operators: the `k` blocks
/// of a Haar-random isometry `ℂᴺ → ℂᴺᵏ`. Generally not unital.
pub fn random_kraus_channel<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<QuantumChannel> {
    let u = linalg::haar_unitary(n * k.max(1), rng);
    let kraus = (0..k.max(1)).map(|j| u.view((j * n, 0), (n, n)).into_owned()).collect();
    QuantumChannel::new(kraus)
}

/// Random external field of `k` Haar unitaries with random positive weights.
pub fn random_unitary_channel<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<QuantumChannel> {
    let k = k.max(1);
    let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.05).collect();
    let s: f64 = w.iter().sum();
    let mut probs: Vec<f64> = w.iter().map(|x| x / s).collect();
    // absorb rounding so the weights sum to one exactly enough
    let rest: f64 = probs[..k - 1].iter().sum();
    probs[k - 1] = 1.0 - rest;
    random_external_field(&probs, (0..k).map(|_| linalg::haar_unitary(n, rng)).collect())
}
