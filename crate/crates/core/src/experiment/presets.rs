//! The built-in example catalogue.

use std::f64::consts::PI;

use serde::Serialize;

use super::config::{Experiment, ExperimentConfig, InvariantMethod, OutputOptions, StateSpec, SystemSpec, TartanModeChoice};
use crate::classical::ClassicalIFS;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};
use crate::qstate::{DensityMatrix, Ket, MatrixJson};
use crate::quantum::QifsDefinition;

/// Default depolarizing strength of `example-10`.
pub const DEPOLARIZING_P: f64 = 0.5;

#[derive(Clone, Debug, Serialize)]
pub struct Preset {
    /// `example-<k>`.
    pub key: String,
    /// Short name; `example-<k>-<slug>` is accepted as well.
    pub slug: &'static str,
    pub summary: &'static str,
    pub config: ExperimentConfig,
}

impl Preset {
    pub fn full_name(&self) -> String {
        format!("{}-{}", self.key, self.slug)
    }
}

fn cfg(name: &str, seed: u64, experiment: Experiment) -> ExperimentConfig {
    ExperimentConfig { name: Some(name.to_string()), seed, out: None, output: OutputOptions::default(), experiment }
}

fn projector(n: usize, k: usize) -> MatrixJson {
    DensityMatrix::from_ket(&Ket::basis(n, k)).into()
}

fn atomic_pulse() -> CMat {
    let [s1, _, s3] = linalg::pauli();
    s1 * c(0.8, 0.0) + s3 * c(0.3, 0.0)
}

const CANTOR_SCALES: [usize; 6] = [3, 9, 27, 81, 243, 729];

fn random_unitaries() -> QifsDefinition {
    QifsDefinition::RandomUnitaries { dim: 3, probs: vec![0.5, 0.5], seed: 11 }
}

/// All presets, in catalogue order.
pub fn catalogue() -> Vec<Preset> {
    let mut out = Vec::with_capacity(14);
    let mut add = |k: usize, slug: &'static str, summary: &'static str, seed: u64, e: Experiment| {
        let key = format!("example-{k}");
        out.push(Preset { config: cfg(&format!("{key}-{slug}"), seed, e), key, slug, summary });
    };
    add(1, "cantor", "Cantor IFS x/3, x/3+2/3: chaos game, 10^6 samples, box dimension near ln2/ln3", 1, Experiment::ChaosGame {
        ifs: ClassicalIFS::cantor(),
        samples: 1_000_000,
        resolution: 729,
        start: None,
        burn_in: 100,
        streams: 4,
        dimension_scales: CANTOR_SCALES.to_vec(),
    });
    add(2, "cantor-place-dependent", "Cantor maps with place-dependent weights: Markov operator iterates", 2, Experiment::PushMeasure {
        ifs: ClassicalIFS::cantor_place_dependent(),
        resolution: 729,
        steps: 30,
        initial: Default::default(),
    });
    add(3, "tartan", "Four-map tartan on the unit square: chaos game, box dimension near 2ln2/ln3", 3, Experiment::ChaosGame {
        ifs: ClassicalIFS::tartan(),
        samples: 1_000_000,
        resolution: 729,
        start: None,
        burn_in: 100,
        streams: 4,
        dimension_scales: CANTOR_SCALES.to_vec(),
    });
    add(4, "sphere-rotations", "Rotations R_z(1.0) and 0.7 about an axis inclined by 0.5: histogram on the sphere", 4, Experiment::ChaosGame {
        ifs: ClassicalIFS::sphere_rotations(1.0, 0.7, 0.5),
        samples: 1_000_000,
        resolution: 64,
        start: None,
        burn_in: 100,
        streams: 4,
        dimension_scales: vec![],
    });
    add(5, "tent-bernoulli", "Tent and Bernoulli maps, equal weights: chaos game towards the Lebesgue measure", 5, Experiment::ChaosGame {
        ifs: ClassicalIFS::tent_bernoulli(),
        samples: 1_000_000,
        resolution: 243,
        start: None,
        burn_in: 100,
        streams: 4,
        dimension_scales: vec![],
    });
    add(6, "unitary-pure", "Two Haar unitaries on P_3: barycenter of a pure-state orbit", 6, Experiment::Barycenter {
        system: SystemSpec::Pure { qifs: random_unitaries() },
        start: StateSpec::Basis { dim: 3, index: 0 },
        steps: 100_000,
        burn_in: 100,
    });
    add(7, "unitary-mixed", "The same unitaries on density matrices: invariant state 1/N", 7, Experiment::InvariantState {
        qifs: random_unitaries(),
        method: InvariantMethod::Both,
        start: Some(StateSpec::Basis { dim: 3, index: 0 }),
        max_steps: 10_000,
        tol: 1e-12,
        history: 0,
    });
    add(8, "atomic", "Two-level atom, free Floquet step or pulsed step with p = 0.3: invariant state", 8, Experiment::InvariantState {
        qifs: QifsDefinition::Atomic { dim: 2, bz: 1.0, period: 1.0, pulse: (&atomic_pulse()).into(), p: 0.3 },
        method: InvariantMethod::Both,
        start: Some(StateSpec::Basis { dim: 2, index: 0 }),
        max_steps: 10_000,
        tol: 1e-12,
        history: 0,
    });
    add(9, "homothety", "Homotheties (rho + 2 rho_i)/3 towards |0><0| and |1><1|: fixed point diag(1/2, 1/2)", 9, Experiment::InvariantState {
        qifs: QifsDefinition::Homothety { dim: 2, ratio: 1.0 / 3.0, centers: vec![projector(2, 0), projector(2, 1)], probs: vec![0.5, 0.5] },
        method: InvariantMethod::Both,
        start: Some(StateSpec::Basis { dim: 2, index: 0 }),
        max_steps: 40,
        tol: 1e-12,
        history: 40,
    });
    add(10, "depolarizing", "Depolarizing channel, identity and Paulis with weights 1-p, p/3, p = 0.5", 10, Experiment::InvariantState {
        qifs: QifsDefinition::Depolarizing { dim: 2, p: DEPOLARIZING_P },
        method: InvariantMethod::Both,
        start: Some(StateSpec::Basis { dim: 2, index: 0 }),
        max_steps: 10_000,
        tol: 1e-12,
        history: 50,
    });
    add(11, "spin-rotations", "exp(i 1.0 Jz), exp(i 0.7 Jx) on spin 2: commutant test", 11, Experiment::Uniqueness {
        qifs: QifsDefinition::SpinRotations { j: 2.0, theta1: 1.0, theta2: 0.7 },
        tol: 1e-8,
    });
    add(12, "latitude-rotations", "Spin-5 rotations with weights 1/2 +- <Jz>/2j: orbit of |j,j> stays put", 12, Experiment::Trajectory {
        system: SystemSpec::LatitudeRotations { j: 5.0, theta1: 1.0, theta2: 0.7 },
        start: StateSpec::SpinCoherent { j: 5.0, theta: 0.0, phi: 0.0 },
        steps: 10_000,
    });
    add(13, "kicked-top", "Randomly kicked top j = 3, alpha = pi/4, beta = 2, Delta = 0.05: decay towards 1/N", 13, Experiment::InvariantState {
        qifs: QifsDefinition::KickedTop { j: 3.0, alpha: PI / 4.0, beta: 2.0, delta: 0.05, p: 0.5 },
        method: InvariantMethod::Spectral,
        start: Some(StateSpec::SpinCoherent { j: 3.0, theta: PI / 3.0, phi: PI / 5.0 }),
        max_steps: 10_000,
        tol: 1e-12,
        history: 500,
    });
    add(14, "tartan", "Quantum tartan at N = 81: invariant state, Husimi portrait, mass profile", 14, Experiment::Tartan {
        dim: 81,
        mode: TartanModeChoice::LinearSpectral,
        resolution: 81,
        tol: 1e-12,
        max_steps: 10_000,
        damping: 0.5,
        dense_dim: crate::torus::DENSE_TARTAN_DIM,
    });
    out
}

/// Look up `example-<k>` or `example-<k>-<slug>`.
pub fn preset(name: &str) -> Result<Preset> {
    catalogue()
        .into_iter()
        .find(|p| p.key == name || p.full_name() == name)
        .ok_or_else(|| Error::Invalid(format!("unknown preset {name:?}; see `qifs catalogue`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourteen_entries_that_round_trip() {
        let all = catalogue();
        assert_eq!(all.len(), 14);
        for (k, p) in all.iter().enumerate() {
            assert_eq!(p.key, format!("example-{}", k + 1));
            let text = serde_json::to_string(&p.config).unwrap();
            assert_eq!(ExperimentConfig::from_json(&text).unwrap(), p.config);
        }
        assert_eq!(preset("example-1-cantor").unwrap().key, "example-1");
        assert!(preset("example-15").is_err());
    }

    #[test]
    fn catalogue_parameters() {
        let Experiment::InvariantState { qifs: QifsDefinition::Depolarizing { p, .. }, .. } = preset("example-10").unwrap().config.experiment
        else {
            panic!("example-10 is not the depolarizing channel")
        };
        assert_eq!(p, DEPOLARIZING_P);
        let Experiment::InvariantState { qifs: QifsDefinition::KickedTop { j, alpha, beta, delta, .. }, .. } =
            preset("example-13").unwrap().config.experiment
        else {
            panic!("example-13 is not the kicked top")
        };
        assert_eq!((j, alpha, beta, delta), (3.0, PI / 4.0, 2.0, 0.05));
    }
}
