//! JSON documents describing channels and QIFSs.

use serde::{Deserialize, Serialize};

use super::channel::{ancilla_channel, depolarizing, random_external_field, QuantumChannel};
use super::system::{atomic_qifs, DensityMap, MixedQIFS, ProbabilityRule, Pulse, PureQIFS, Transformer};
use crate::invariant::Superoperator;
use crate::classical::chaos::stream_rng;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, c, CMat};
use crate::spin::{kicked_top, rotation, Axis, Spin};
use crate::qstate::{DensityMatrix, MatrixJson};

/// `{"dim": N, "kind": ..., parameters...}`; matrices use the `re`/`im`
/// row-major layout of states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum QifsDefinition {
    /// Explicit Kraus operators.
    Kraus { dim: usize, operators: Vec<MatrixJson> },
    /// Random external field `Σ pᵢ UᵢρUᵢ†`.
    Ref { dim: usize, probs: Vec<f64>, unitaries: Vec<MatrixJson> },
    Depolarizing { dim: usize, p: f64 },
    /// Environment of dimension `env_dim` coupled through `unitary` on `dim·env_dim`.
    Ancilla { dim: usize, env_dim: usize, unitary: MatrixJson },
    /// Two-level atom: field `bz`, period, integrated pulse matrix, pulse probability.
    Atomic { dim: usize, bz: f64, period: f64, pulse: MatrixJson, p: f64 },
    /// Homotheties `ρ ↦ ratio·ρ + (1 − ratio)·centerᵢ` with constant weights.
    Homothety { dim: usize, ratio: f64, centers: Vec<MatrixJson>, probs: Vec<f64> },
    /// `exp(iθ₁Jz)`, `exp(iθ₂Jx)` on spin `j`, equal weights.
    SpinRotations { j: f64, theta1: f64, theta2: f64 },
    /// Kicked tops with strengths `β` and `β + Δ`, weights `p` and `1 − p`.
    KickedTop { j: f64, alpha: f64, beta: f64, delta: f64, p: f64 },
    /// Haar-random unitaries drawn from `seed`, one per probability.
    RandomUnitaries { dim: usize, probs: Vec<f64>, seed: u64 },
}

/// What a definition builds.
#[derive(Clone, Debug)]
pub enum BuiltQifs {
    Channel(QuantumChannel),
    Mixed(MixedQIFS),
}

impl BuiltQifs {
    pub fn dim(&self) -> usize {
        match self {
            BuiltQifs::Channel(c) => c.dim(),
            BuiltQifs::Mixed(m) => m.dim(),
        }
    }

    /// Superoperator of the averaged map, when it is linear: channels, and
    /// homotheties with constant weights extended by `center·tr ρ`.
    pub fn superoperator(&self) -> Option<Superoperator> {
        match self {
            BuiltQifs::Channel(ch) => Some(Superoperator::of(ch)),
            BuiltQifs::Mixed(m) => {
                let mut terms = Vec::with_capacity(m.len());
                for (map, rule) in m.maps().iter().zip(m.probability_rules()) {
                    let (Transformer::Homothety { center, ratio }, ProbabilityRule::Constant(p)) = (map, rule) else {
                        return None;
                    };
                    terms.push((*p, *ratio, center.matrix().clone()));
                }
                Some(Superoperator::from_fn(m.dim(), |x| {
                    let tr = linalg::trace(x);
                    terms.iter().fold(CMat::zeros(x.nrows(), x.ncols()), |acc, (p, r, cen)| {
                        acc + (x * c(*r, 0.0) + cen * (tr * (1.0 - r))) * c(*p, 0.0)
                    })
                }))
            }
        }
    }

    /// The system whose random orbits realize the averaged map; Kraus
    /// operators become normalized conjugations chosen with `tr(KρK†)`.
    pub fn mixed_system(&self) -> Result<MixedQIFS> {
        Ok(match self {
            BuiltQifs::Channel(ch) => MixedQIFS::from_pure(&self.pure_system_of(ch)?),
            BuiltQifs::Mixed(m) => m.clone(),
        })
    }

    /// Pure-state system `φ ↦ Kφ/‖Kφ‖` chosen with `‖Kφ‖²`.
    pub fn pure_system(&self) -> Result<PureQIFS> {
        match self {
            BuiltQifs::Channel(ch) => self.pure_system_of(ch),
            BuiltQifs::Mixed(_) => Err(Error::Invalid("homotheties do not act on pure states".into())),
        }
    }

    fn pure_system_of(&self, ch: &QuantumChannel) -> Result<PureQIFS> {
        PureQIFS::homogeneous(ch.kraus().to_vec())
    }
}

impl DensityMap for BuiltQifs {
    fn dim(&self) -> usize {
        BuiltQifs::dim(self)
    }

    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        match self {
            BuiltQifs::Channel(ch) => ch.apply(rho),
            BuiltQifs::Mixed(m) => m.apply(rho),
        }
    }
}

fn matrices(list: &[MatrixJson], dim: usize) -> Result<Vec<CMat>> {
    list.iter()
        .map(|m| {
            let x = m.to_matrix()?;
            check_dim(dim, x.nrows())?;
            Ok(x)
        })
        .collect()
}

impl QifsDefinition {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<BuiltQifs> {
        Ok(match self {
            QifsDefinition::Kraus { dim, operators } => BuiltQifs::Channel(QuantumChannel::new(matrices(operators, *dim)?)?),
            QifsDefinition::Ref { dim, probs, unitaries } => {
                BuiltQifs::Channel(random_external_field(probs, matrices(unitaries, *dim)?)?)
            }
            QifsDefinition::Depolarizing { dim, p } => {
                check_dim(2, *dim)?;
                BuiltQifs::Channel(depolarizing(*p)?)
            }
            QifsDefinition::Ancilla { dim, env_dim, unitary } => {
                let u = unitary.to_matrix()?;
                check_dim(dim * env_dim, u.nrows())?;
                BuiltQifs::Channel(ancilla_channel(&u, *env_dim)?)
            }
            QifsDefinition::Atomic { dim, bz, period, pulse, p } => {
                check_dim(2, *dim)?;
                let a = pulse.to_matrix()?;
                BuiltQifs::Channel(atomic_qifs(*bz, *period, Pulse::Integrated(a), *p)?.channel().clone())
            }
            QifsDefinition::Homothety { dim, ratio, centers, probs } => {
                if !(0.0..1.0).contains(ratio) {
                    return Err(Error::Invalid(format!("homothety ratio {ratio} outside [0, 1)")));
                }
                let maps = matrices(centers, *dim)?
                    .into_iter()
                    .map(|m| Ok(Transformer::Homothety { center: DensityMatrix::new(m)?, ratio: *ratio }))
                    .collect::<Result<Vec<_>>>()?;
                let rules = probs.iter().map(|&p| ProbabilityRule::Constant(p)).collect();
                BuiltQifs::Mixed(MixedQIFS::new(maps, rules)?)
            }
            _ => {
                let (probs, us) = self.unitary_family()?.expect("remaining kinds are unitary families");
                BuiltQifs::Channel(random_external_field(&probs, us)?)
            }
        })
    }

    /// `(pᵢ, Uᵢ)` when the document describes a random external field.
    pub fn unitary_family(&self) -> Result<Option<(Vec<f64>, Vec<CMat>)>> {
        Ok(match self {
            QifsDefinition::Ref { dim, probs, unitaries } => Some((probs.clone(), matrices(unitaries, *dim)?)),
            QifsDefinition::Depolarizing { dim, p } => {
                check_dim(2, *dim)?;
                let [s1, s2, s3] = linalg::pauli();
                Some((vec![1.0 - p, p / 3.0, p / 3.0, p / 3.0], vec![linalg::identity(2), s1, s2, s3]))
            }
            QifsDefinition::Atomic { .. } => {
                let BuiltQifs::Channel(ch) = self.build()? else { unreachable!("atomic systems build channels") };
                let ps: Vec<f64> = ch.kraus().iter().map(|k| (k.adjoint() * k)[(0, 0)].re).collect();
                let us = ch.kraus().iter().zip(&ps).map(|(k, p)| k / c(p.sqrt(), 0.0)).collect();
                Some((ps, us))
            }
            QifsDefinition::SpinRotations { j, theta1, theta2 } => {
                let spin = Spin::new(*j)?;
                Some((vec![0.5, 0.5], vec![rotation(spin, Axis::Z, *theta1), rotation(spin, Axis::X, *theta2)]))
            }
            QifsDefinition::KickedTop { j, alpha, beta, delta, p } => {
                let spin = Spin::new(*j)?;
                Some((vec![*p, 1.0 - p], vec![kicked_top(spin, *alpha, *beta), kicked_top(spin, *alpha, beta + delta)]))
            }
            QifsDefinition::RandomUnitaries { dim, probs, seed } => {
                let mut rng = stream_rng(*seed, 0);
                Some((probs.clone(), probs.iter().map(|_| linalg::haar_unitary(*dim, &mut rng)).collect()))
            }
            _ => None,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            QifsDefinition::Kraus { dim, .. }
            | QifsDefinition::Ref { dim, .. }
            | QifsDefinition::Depolarizing { dim, .. }
            | QifsDefinition::Ancilla { dim, .. }
            | QifsDefinition::Atomic { dim, .. }
            | QifsDefinition::Homothety { dim, .. }
            | QifsDefinition::RandomUnitaries { dim, .. } => *dim,
            QifsDefinition::SpinRotations { j, .. } | QifsDefinition::KickedTop { j, .. } => (2.0 * j).round() as usize + 1,
        }
    }

    /// Kraus-form document for an existing channel.
    pub fn from_channel(ch: &QuantumChannel) -> Self {
        QifsDefinition::Kraus { dim: ch.dim(), operators: ch.kraus().iter().map(MatrixJson::from).collect() }
    }
}
