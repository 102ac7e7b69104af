use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::system::{MixedQIFS, PureQIFS};
use crate::classical::chaos::{select_index, stream_rng};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{c, CMat};
use crate::qstate::{DensityMatrix, PureState};

/// Probabilities below this are set to zero before sampling.
pub const PROBABILITY_FLOOR: f64 = 1e-15;

fn draw(probs: &mut [f64], rng: &mut ChaCha8Rng) -> usize {
    for p in probs.iter_mut() {
        if *p < PROBABILITY_FLOOR {
            *p = 0.0;
        }
    }
    select_index(rng.random::<f64>(), probs)
}

/// Random pure-state orbit `φ₀, φ₁, …, φₙ`.
pub fn pure_trajectory(q: &PureQIFS, phi0: &PureState, n: usize, seed: u64) -> Result<Vec<PureState>> {
    check_dim(q.dim(), phi0.dim())?;
    let mut rng = stream_rng(seed, 0);
    let mut out = Vec::with_capacity(n + 1);
    out.push(phi0.clone());
    let mut phi = phi0.clone();
    for _ in 0..n {
        let mut ps = q.probabilities(&phi)?;
        let i = draw(&mut ps, &mut rng);
        phi = q.pure_map(i, &phi)?;
        out.push(phi.clone());
    }
    Ok(out)
}

/// Random mixed-state orbit `ρ₀, ρ₁, …, ρₙ`.
pub fn mixed_trajectory(q: &MixedQIFS, rho0: &DensityMatrix, n: usize, seed: u64) -> Result<Vec<DensityMatrix>> {
    check_dim(q.dim(), rho0.dim())?;
    let mut rng = stream_rng(seed, 0);
    let mut out = Vec::with_capacity(n + 1);
    out.push(rho0.clone());
    let mut rho = rho0.clone();
    for _ in 0..n {
        let mut ps = q.probabilities(&rho)?;
        let i = draw(&mut ps, &mut rng);
        rho = q.mixed_map(i, &rho)?;
        out.push(rho.clone());
    }
    Ok(out)
}

/// Running mean of density matrices; merging two accumulators is the
/// count-weighted average.
#[derive(Clone, Debug)]
pub struct Barycenter {
    sum: CMat,
    count: u64,
}

impl Barycenter {
    pub fn new(dim: usize) -> Self {
        Self { sum: CMat::zeros(dim, dim), count: 0 }
    }

    pub fn add_matrix(&mut self, m: &CMat) {
        self.sum += m;
        self.count += 1;
    }

    pub fn add(&mut self, rho: &DensityMatrix) {
        self.add_matrix(rho.matrix());
    }

    /// Pure states enter as projectors.
    pub fn add_pure(&mut self, phi: &PureState) {
        self.add_matrix(&phi.projector());
    }

    pub fn merge(&mut self, other: &Barycenter) -> Result<()> {
        check_dim(self.sum.nrows(), other.sum.nrows())?;
        self.sum += &other.sum;
        self.count += other.count;
        Ok(())
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> Result<DensityMatrix> {
        if self.count == 0 {
            return Err(Error::Invalid("barycenter of an empty trajectory".into()));
        }
        DensityMatrix::new(&self.sum / c(self.count as f64, 0.0))
    }
}

/// Mean of the states after the first `burn_in`.
pub fn barycenter_estimate(states: &[DensityMatrix], burn_in: usize) -> Result<DensityMatrix> {
    let dim = states.first().map_or(0, DensityMatrix::dim);
    let mut acc = Barycenter::new(dim);
    for s in states.iter().skip(burn_in) {
        check_dim(dim, s.dim())?;
        acc.add(s);
    }
    acc.mean()
}

/// Mean projector of the pure states after the first `burn_in`.
pub fn barycenter_estimate_pure(states: &[PureState], burn_in: usize) -> Result<DensityMatrix> {
    let dim = states.first().map_or(0, PureState::dim);
    let mut acc = Barycenter::new(dim);
    for s in states.iter().skip(burn_in) {
        check_dim(dim, s.dim())?;
        acc.add_pure(s);
    }
    acc.mean()
}

/// Streaming barycenter of a mixed-state orbit, without storing it.
pub fn mixed_barycenter(q: &MixedQIFS, rho0: &DensityMatrix, n: usize, burn_in: usize, seed: u64) -> Result<DensityMatrix> {
    check_dim(q.dim(), rho0.dim())?;
    let mut rng = stream_rng(seed, 0);
    let mut acc = Barycenter::new(q.dim());
    let mut rho = rho0.clone();
    for step in 0..burn_in + n {
        let mut ps = q.probabilities(&rho)?;
        let i = draw(&mut ps, &mut rng);
        rho = q.mixed_map(i, &rho)?;
        if step >= burn_in {
            acc.add(&rho);
        }
    }
    acc.mean()
}

/// Streaming barycenter of a pure-state orbit.
pub fn pure_barycenter(q: &PureQIFS, phi0: &PureState, n: usize, burn_in: usize, seed: u64) -> Result<DensityMatrix> {
    check_dim(q.dim(), phi0.dim())?;
    let mut rng = stream_rng(seed, 0);
    let mut acc = Barycenter::new(q.dim());
    let mut phi = phi0.clone();
    for step in 0..burn_in + n {
        let mut ps = q.probabilities(&phi)?;
        let i = draw(&mut ps, &mut rng);
        phi = q.pure_map(i, &phi)?;
        if step >= burn_in {
            acc.add_pure(&phi);
        }
    }
    acc.mean()
}
