use nalgebra::SVD;

use super::channel::{check_probability_vector, QuantumChannel, KRAUS_TOL};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, c, max_abs, CMat};
use crate::qstate::{DensityMatrix, Ket, PureState};

/// Images with norm or trace below this are treated as zero.
pub const VANISHING_TOL: f64 = 1e-14;
/// Smallest singular value accepted for an invertible map.
pub const INVERTIBLE_TOL: f64 = 1e-12;

/// A map of density matrices into density matrices.
pub trait DensityMap {
    fn dim(&self) -> usize;
    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix>;
}

impl DensityMap for QuantumChannel {
    fn dim(&self) -> usize {
        QuantumChannel::dim(self)
    }

    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        QuantumChannel::apply(self, rho)
    }
}

fn smallest_singular_value(m: &CMat) -> f64 {
    SVD::new(m.clone(), false, false).singular_values.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// QIFS on pure states: maps `φ ↦ Vᵢφ/‖Vᵢφ‖` chosen with probability `‖Wᵢφ‖²`.
#[derive(Clone, Debug)]
pub struct PureQIFS {
    dim: usize,
    v: Vec<CMat>,
    w: Vec<CMat>,
}

impl PureQIFS {
    pub fn new(v: Vec<CMat>, w: Vec<CMat>) -> Result<Self> {
        if v.is_empty() || v.len() != w.len() {
            return Err(Error::Invalid(format!("{} maps with {} probability operators", v.len(), w.len())));
        }
        let dim = v[0].nrows();
        for m in v.iter().chain(&w) {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.nrows().max(m.ncols()) });
            }
        }
        let resolution = w.iter().fold(CMat::zeros(dim, dim), |acc, x| acc + x.adjoint() * x) - linalg::identity(dim);
        let dev = max_abs(&resolution);
        if !(dev <= KRAUS_TOL) {
            return Err(Error::Invalid(format!("Σ W†W deviates from the identity by {dev:e}")));
        }
        for m in &v {
            let s = smallest_singular_value(m);
            if !(s > INVERTIBLE_TOL) {
                return Err(Error::NotInvertible(s));
            }
        }
        Ok(Self { dim, v, w })
    }

    /// Homogeneous system, `Wᵢ = Vᵢ`.
    pub fn homogeneous(v: Vec<CMat>) -> Result<Self> {
        Self::new(v.clone(), v)
    }

    /// Unitary maps with constant probabilities: `Vᵢ = Uᵢ`, `Wᵢ = √pᵢ 𝟙`.
    pub fn unitary(probs: &[f64], unitaries: Vec<CMat>) -> Result<Self> {
        check_probability_vector(probs)?;
        if probs.len() != unitaries.len() {
            return Err(Error::Invalid(format!("{} probabilities for {} unitaries", probs.len(), unitaries.len())));
        }
        let dim = unitaries.first().map_or(0, |u| u.nrows());
        for u in &unitaries {
            if !linalg::is_unitary(u, KRAUS_TOL) {
                return Err(Error::NotUnitary(max_abs(&(u.adjoint() * u - linalg::identity(u.nrows())))));
            }
        }
        let w = probs.iter().map(|p| linalg::identity(dim) * c(p.sqrt(), 0.0)).collect();
        Self::new(unitaries, w)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn maps(&self) -> &[CMat] {
        &self.v
    }

    pub fn probability_operators(&self) -> &[CMat] {
        &self.w
    }

    pub fn is_homogeneous(&self) -> bool {
        self.v.iter().zip(&self.w).all(|(a, b)| max_abs(&(a - b)) <= 1e-12)
    }

    /// `Fᵢ(φ) = Vᵢφ / ‖Vᵢφ‖`.
    pub fn pure_map(&self, i: usize, phi: &PureState) -> Result<PureState> {
        check_dim(self.dim, phi.dim())?;
        let image = &self.v[i] * phi.ket().amplitudes();
        let norm = image.norm();
        if !(norm > VANISHING_TOL) {
            return Err(Error::Vanishing(norm));
        }
        Ok(PureState::new(Ket::new(image)?))
    }

    /// `pᵢ(φ) = ‖Wᵢφ‖²`.
    pub fn pure_probability(&self, i: usize, phi: &PureState) -> Result<f64> {
        check_dim(self.dim, phi.dim())?;
        Ok((&self.w[i] * phi.ket().amplitudes()).norm_squared())
    }

    pub fn probabilities(&self, phi: &PureState) -> Result<Vec<f64>> {
        (0..self.len()).map(|i| self.pure_probability(i, phi)).collect()
    }

    /// The induced channel `Σ VᵢρVᵢ†`; only defined for homogeneous systems.
    pub fn channel(&self) -> Result<QuantumChannel> {
        if !self.is_homogeneous() {
            return Err(Error::Invalid("only homogeneous systems induce a linear channel".into()));
        }
        QuantumChannel::new(self.v.clone())
    }
}

/// A pure-state system with `Wᵢ = Vᵢ` together with its channel.
#[derive(Clone, Debug)]
pub struct HomogeneousQIFS {
    qifs: PureQIFS,
    channel: QuantumChannel,
}

impl HomogeneousQIFS {
    pub fn new(v: Vec<CMat>) -> Result<Self> {
        let qifs = PureQIFS::homogeneous(v)?;
        let channel = qifs.channel()?;
        Ok(Self { qifs, channel })
    }

    /// Random external field as a homogeneous system, `Vᵢ = √pᵢ Uᵢ`.
    /// All `pᵢ` must be positive so that every `Vᵢ` is invertible.
    pub fn unitary(probs: &[f64], unitaries: Vec<CMat>) -> Result<Self> {
        let channel = super::channel::random_external_field(probs, unitaries)?;
        Self::new(channel.kraus().to_vec())
    }

    pub fn qifs(&self) -> &PureQIFS {
        &self.qifs
    }

    pub fn channel(&self) -> &QuantumChannel {
        &self.channel
    }

    /// The system acting on density matrices.
    pub fn to_mixed(&self) -> MixedQIFS {
        MixedQIFS::from_pure(&self.qifs)
    }
}

impl DensityMap for HomogeneousQIFS {
    fn dim(&self) -> usize {
        self.channel.dim()
    }

    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.channel.apply(rho)
    }
}

/// A transformation of density matrices used as one map of a [`MixedQIFS`].
#[derive(Clone, Debug)]
pub enum Transformer {
    /// `ρ ↦ VρV† / tr(VρV†)`.
    Conjugate(CMat),
    /// `ρ ↦ ratio·ρ + (1 − ratio)·center`, a contraction towards `center`.
    Homothety { center: DensityMatrix, ratio: f64 },
}

impl Transformer {
    pub fn dim(&self) -> usize {
        match self {
            Transformer::Conjugate(v) => v.nrows(),
            Transformer::Homothety { center, .. } => center.dim(),
        }
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_dim(self.dim(), rho.dim())?;
        match self {
            Transformer::Conjugate(v) => {
                let m = v * rho.matrix() * v.adjoint();
                let tr = linalg::trace(&m).re;
                if !(tr > VANISHING_TOL) {
                    return Err(Error::Vanishing(tr));
                }
                DensityMatrix::new(m / c(tr, 0.0))
            }
            Transformer::Homothety { center, ratio } => {
                DensityMatrix::new(rho.matrix() * c(*ratio, 0.0) + center.matrix() * c(1.0 - ratio, 0.0))
            }
        }
    }
}

/// Selection probability of one map of a [`MixedQIFS`].
#[derive(Clone, Debug)]
pub enum ProbabilityRule {
    Constant(f64),
    /// `p(ρ) = tr(Lρ)` for a positive Hermitian `L`.
    Observable(CMat),
}

impl ProbabilityRule {
    pub fn eval(&self, rho: &DensityMatrix) -> f64 {
        match self {
            ProbabilityRule::Constant(p) => *p,
            ProbabilityRule::Observable(l) => rho.expectation(l).re,
        }
    }

    fn as_operator(&self, dim: usize) -> CMat {
        match self {
            ProbabilityRule::Constant(p) => linalg::identity(dim) * c(*p, 0.0),
            ProbabilityRule::Observable(l) => l.clone(),
        }
    }
}

/// QIFS on density matrices.
#[derive(Clone, Debug)]
pub struct MixedQIFS {
    dim: usize,
    maps: Vec<Transformer>,
    probs: Vec<ProbabilityRule>,
}

impl MixedQIFS {
    /// Checks that the probability rules add up to the identity operator, so
    /// that `Σ pᵢ(ρ) = 1` for every state.
    pub fn new(maps: Vec<Transformer>, probs: Vec<ProbabilityRule>) -> Result<Self> {
        if maps.is_empty() || maps.len() != probs.len() {
            return Err(Error::Invalid(format!("{} maps with {} probability rules", maps.len(), probs.len())));
        }
        let dim = maps[0].dim();
        for m in &maps {
            check_dim(dim, m.dim())?;
        }
        let mut total = CMat::zeros(dim, dim);
        for p in &probs {
            match p {
                ProbabilityRule::Constant(x) if !(0.0..=1.0).contains(x) => {
                    return Err(Error::Invalid(format!("constant probability {x} outside [0, 1]")));
                }
                ProbabilityRule::Observable(l) => {
                    check_dim(dim, l.nrows())?;
                    let herm = max_abs(&(l - l.adjoint()));
                    if !(herm <= KRAUS_TOL) {
                        return Err(Error::NotHermitian(herm));
                    }
                    let min = linalg::eigvalsh(l)[0];
                    if min < -KRAUS_TOL {
                        return Err(Error::NotPositive(min));
                    }
                }
                _ => {}
            }
            total += p.as_operator(dim);
        }
        let dev = max_abs(&(total - linalg::identity(dim)));
        if !(dev <= KRAUS_TOL) {
            return Err(Error::Invalid(format!("probability operators deviate from the identity by {dev:e}")));
        }
        Ok(Self { dim, maps, probs })
    }

    /// The mixed-state extension: conjugation by `Vᵢ`, `Lᵢ = Wᵢ†Wᵢ`.
    pub fn from_pure(q: &PureQIFS) -> Self {
        let maps = q.maps().iter().cloned().map(Transformer::Conjugate).collect();
        let probs = q.probability_operators().iter().map(|w| ProbabilityRule::Observable(w.adjoint() * w)).collect();
        Self { dim: q.dim(), maps, probs }
    }

    /// Homotheties with ratio 1/3 towards the basis projectors `|k⟩⟨k|`,
    /// `k = 0..n`, with equal weights.
    pub fn homotheties_to_basis(n: usize) -> Self {
        let maps = (0..n)
            .map(|k| Transformer::Homothety { center: DensityMatrix::from_ket(&Ket::basis(n, k)), ratio: 1.0 / 3.0 })
            .collect();
        Self { dim: n, maps, probs: vec![ProbabilityRule::Constant(1.0 / n as f64); n] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[Transformer] {
        &self.maps
    }

    pub fn probability_rules(&self) -> &[ProbabilityRule] {
        &self.probs
    }

    pub fn mixed_map(&self, i: usize, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.maps[i].apply(rho)
    }

    pub fn mixed_probability(&self, i: usize, rho: &DensityMatrix) -> Result<f64> {
        check_dim(self.dim, rho.dim())?;
        Ok(self.probs[i].eval(rho))
    }

    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        check_dim(self.dim, rho.dim())?;
        Ok(self.probs.iter().map(|p| p.eval(rho)).collect())
    }
}

/// `ρ ↦ Σ pᵢ(ρ) Gᵢ(ρ)`, the one-step evolution of the barycenter. For
/// homogeneous systems this is the channel `Σ VᵢρVᵢ†`.
impl DensityMap for MixedQIFS {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let ps = self.probabilities(rho)?;
        let mut acc = CMat::zeros(self.dim, self.dim);
        for (p, g) in ps.iter().zip(&self.maps) {
            if *p > VANISHING_TOL {
                acc += g.apply(rho)?.into_matrix() * c(*p, 0.0);
            }
        }
        DensityMatrix::from_unnormalized(acc)
    }
}

/// How the pulse propagator of the atomic example is built.
pub enum Pulse<'a> {
    /// Integrated pulse `A = ∫V dt`: `U₂ = exp(−i(H₀T + A))`.
    Integrated(CMat),
    /// Time-ordered product of `slices` short propagators
    /// `exp(−i(H₀ + V(tₖ))Δt)` with `V` sampled at slice midpoints.
    Trotter { v: &'a dyn Fn(f64) -> CMat, slices: usize },
}

/// Two-level atom in a field along z with randomly occurring pulses.
///
/// `U₁ = exp(−iH₀T)` with `H₀ = (B_z/2)σ₃`; the pulse propagator follows
/// [`Pulse`]. Probabilities are `(1 − p, p)`, so `p` must lie in `(0, 1)`.
pub fn atomic_qifs(bz: f64, period: f64, pulse: Pulse<'_>, p: f64) -> Result<HomogeneousQIFS> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Invalid(format!("pulse probability {p} must lie strictly between 0 and 1")));
    }
    let h0 = &linalg::pauli()[2] * c(bz / 2.0, 0.0);
    let u1 = linalg::exp_i_hermitian(&h0, -period);
    let u2 = match pulse {
        Pulse::Integrated(a) => {
            check_dim(2, a.nrows())?;
            let herm = max_abs(&(&a - a.adjoint()));
            if !(herm <= KRAUS_TOL) {
                return Err(Error::NotHermitian(herm));
            }
            linalg::exp_i_hermitian(&(&h0 * c(period, 0.0) + a), -1.0)
        }
        Pulse::Trotter { v, slices } => {
            let slices = slices.max(1);
            let dt = period / slices as f64;
            let mut u = linalg::identity(2);
            for k in 0..slices {
                let vk = v((k as f64 + 0.5) * dt);
                check_dim(2, vk.nrows())?;
                // later slices act last
                u = linalg::exp_i_hermitian(&(&h0 + vk), -dt) * u;
            }
            u
        }
    };
    HomogeneousQIFS::unitary(&[1.0 - p, p], vec![u1, u2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, random_density_matrix, random_unit_vector, CVec};
    use crate::qstate::{fubini_study, trace_distance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket(v: &[f64]) -> PureState {
        PureState::new(Ket::from_slice(&v.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>()).unwrap())
    }

    #[test]
    fn diagonal_map_image() {
        let v = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0)]));
        let q = PureQIFS::new(vec![v], vec![linalg::identity(2)]).unwrap();
        let out = q.pure_map(0, &ket(&[1.0, 1.0])).unwrap();
        assert!(out.same_state(&ket(&[1.0 / 5f64.sqrt(), 2.0 / 5f64.sqrt()]), 1e-14));
    }

    #[test]
    fn unitary_maps_are_isometries() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = haar_unitary(4, &mut rng);
        let q = PureQIFS::unitary(&[1.0], vec![u]).unwrap();
        for _ in 0..20 {
            let a = PureState::new(Ket::new(random_unit_vector(4, &mut rng)).unwrap());
            let b = PureState::new(Ket::new(random_unit_vector(4, &mut rng)).unwrap());
            let (fa, fb) = (q.pure_map(0, &a).unwrap(), q.pure_map(0, &b).unwrap());
            assert!((fubini_study(&fa, &fb).unwrap() - fubini_study(&a, &b).unwrap()).abs() < 1e-12);
        }
        assert_eq!(q.probabilities(&ket(&[1.0, 0.0, 0.0, 0.0])).unwrap(), vec![1.0]);
    }

    #[test]
    fn projective_probabilities() {
        let e1 = linalg::projector(Ket::basis(2, 0).amplitudes());
        let e2 = linalg::projector(Ket::basis(2, 1).amplitudes());
        let q = PureQIFS::new(vec![linalg::identity(2), linalg::identity(2)], vec![e1, e2]).unwrap();
        assert_eq!(q.probabilities(&ket(&[1.0, 0.0])).unwrap(), vec![1.0, 0.0]);
        assert!(!q.is_homogeneous());
        assert!(q.channel().is_err());
    }

    #[test]
    fn random_resolution_sums_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ch = super::super::channel::random_kraus_channel(3, 3, &mut rng).unwrap();
        let q = PureQIFS::new(vec![linalg::identity(3); 3], ch.kraus().to_vec()).unwrap();
        for _ in 0..20 {
            let phi = PureState::new(Ket::new(random_unit_vector(3, &mut rng)).unwrap());
            assert!((q.probabilities(&phi).unwrap().iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_singular_maps_and_incomplete_resolutions() {
        let singular = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]));
        assert!(matches!(PureQIFS::new(vec![singular], vec![linalg::identity(2)]), Err(Error::NotInvertible(_))));
        assert!(PureQIFS::new(vec![linalg::identity(2)], vec![linalg::identity(2) * c(0.5, 0.0)]).is_err());
    }

    #[test]
    fn homothety_towards_first_projector() {
        let q = MixedQIFS::homotheties_to_basis(2);
        let rho2 = DensityMatrix::from_ket(&Ket::basis(2, 1));
        let out = q.mixed_map(0, &rho2).unwrap();
        let want = DensityMatrix::diagonal(&[2.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!(trace_distance(&out, &want).unwrap() < 1e-15);
    }

    #[test]
    fn observable_probabilities() {
        let l1 = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]));
        let l2 = linalg::identity(2) - &l1;
        let q = MixedQIFS::new(
            vec![Transformer::Conjugate(linalg::identity(2)), Transformer::Conjugate(linalg::identity(2))],
            vec![ProbabilityRule::Observable(l1), ProbabilityRule::Observable(l2)],
        )
        .unwrap();
        let rho = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        assert!((q.mixed_probability(0, &rho).unwrap() - 0.75).abs() < 1e-15);
        assert!(MixedQIFS::new(
            vec![Transformer::Conjugate(linalg::identity(2))],
            vec![ProbabilityRule::Constant(0.5)]
        )
        .is_err());
    }

    #[test]
    fn conjugation_of_near_rank_one_map_stays_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let [s1, _, s3] = linalg::pauli();
        let v = linalg::projector(Ket::basis(2, 0).amplitudes()) + (s1 + s3) * c(1e-3, 0.0);
        let g = Transformer::Conjugate(v.clone());
        for _ in 0..20 {
            let rho = DensityMatrix::new(random_density_matrix(2, 2, &mut rng)).unwrap();
            let out = g.apply(&rho).unwrap();
            let direct = &v * rho.matrix() * v.adjoint();
            let direct = &direct / linalg::trace(&direct);
            assert!(max_abs(&(out.matrix() - direct)) < 1e-12);
        }
    }

    #[test]
    fn homogeneous_channel_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let q = HomogeneousQIFS::unitary(&[0.3, 0.7], vec![haar_unitary(3, &mut rng), haar_unitary(3, &mut rng)])
            .unwrap();
        let a = random_density_matrix(3, 3, &mut rng);
        let b = random_density_matrix(3, 3, &mut rng);
        let mix = &a * c(0.4, 0.0) + &b * c(0.6, 0.0);
        let ch = q.channel();
        let lhs = ch.apply_matrix(&mix);
        let rhs = ch.apply_matrix(&a) * c(0.4, 0.0) + ch.apply_matrix(&b) * c(0.6, 0.0);
        assert!(max_abs(&(lhs - rhs)) < 1e-12);
        // the averaged mixed-state map reproduces the channel
        let rho = DensityMatrix::new(a).unwrap();
        let via_mixed = DensityMap::apply(&q.to_mixed(), &rho).unwrap();
        assert!(max_abs(&(via_mixed.matrix() - ch.apply_matrix(rho.matrix()))) < 1e-12);
    }

    #[test]
    fn atomic_pulse_modes() {
        let zero = atomic_qifs(1.0, 2.0, Pulse::Integrated(CMat::zeros(2, 2)), 0.5).unwrap();
        let v = zero.qifs().maps();
        assert!(max_abs(&(&v[0] * c(0.5f64.sqrt().recip(), 0.0) - &v[1] * c(0.5f64.sqrt().recip(), 0.0))) < 1e-14);
        // constant V: time slicing is exact
        let s1 = &linalg::pauli()[0] * c(0.4, 0.0);
        let f = |_t: f64| s1.clone();
        let a = atomic_qifs(1.3, 0.7, Pulse::Integrated(&s1 * c(0.7, 0.0)), 0.25).unwrap();
        let b = atomic_qifs(1.3, 0.7, Pulse::Trotter { v: &f, slices: 16 }, 0.25).unwrap();
        assert!(max_abs(&(&a.qifs().maps()[1] - &b.qifs().maps()[1])) < 1e-12);
        assert!(atomic_qifs(1.0, 1.0, Pulse::Integrated(CMat::zeros(2, 2)), 1.0).is_err());
    }
}
