use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classical::{ClassicalIFS, Point};
use crate::error::{Error, Result};
use crate::io::{BitDepth, PgmEncoding};
use crate::linalg::random_density_matrix;
use crate::qstate::{DensityMatrix, Ket, MatrixJson, VectorJson};
use crate::quantum::QifsDefinition;
use crate::spin::{spin_coherent, Spin};
use crate::torus::{coherent_torus, TartanMode};

/// One experiment run: what to compute, its seed and where to write.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub output: OutputOptions,
    pub experiment: Experiment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Pgm,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    #[serde(default = "all_formats")]
    pub formats: Vec<Format>,
    #[serde(default = "plain")]
    pub pgm_encoding: PgmEncoding,
    #[serde(default = "sixteen")]
    pub pgm_depth: BitDepth,
}

fn all_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Pgm, Format::Json]
}

fn plain() -> PgmEncoding {
    PgmEncoding::Plain
}

fn sixteen() -> BitDepth {
    BitDepth::Sixteen
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self { formats: all_formats(), pgm_encoding: plain(), pgm_depth: sixteen() }
    }
}

impl OutputOptions {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

fn d_burn_in() -> usize {
    100
}
fn d_streams() -> usize {
    1
}
fn d_max_steps() -> usize {
    10_000
}
fn d_tol() -> f64 {
    1e-12
}
fn d_commutant_tol() -> f64 {
    1e-8
}
fn d_damping() -> f64 {
    0.5
}
fn d_dense_dim() -> usize {
    crate::torus::DENSE_TARTAN_DIM
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    /// Random iteration of a classical IFS, binned into a histogram.
    ChaosGame {
        ifs: ClassicalIFS,
        samples: usize,
        resolution: usize,
        #[serde(default)]
        start: Option<Vec<f64>>,
        #[serde(default = "d_burn_in")]
        burn_in: usize,
        #[serde(default = "d_streams")]
        streams: usize,
        /// Boxes per axis for a box-counting estimate; empty to skip it.
        #[serde(default)]
        dimension_scales: Vec<usize>,
    },
    /// Iterates of the Markov operator on a histogram.
    PushMeasure {
        ifs: ClassicalIFS,
        resolution: usize,
        steps: usize,
        #[serde(default)]
        initial: InitialMeasure,
    },
    /// Iterates of the density evolution for affine 1-D systems.
    PushDensity { ifs: ClassicalIFS, grid: usize, steps: usize },
    /// Box-counting dimension of a chaos-game sample.
    Dimension {
        ifs: ClassicalIFS,
        samples: usize,
        resolution: usize,
        scales: Vec<usize>,
        #[serde(default = "d_burn_in")]
        burn_in: usize,
        #[serde(default = "d_streams")]
        streams: usize,
    },
    /// Fixed states of a channel, or of the averaged map of a QIFS.
    InvariantState {
        qifs: QifsDefinition,
        #[serde(default)]
        method: InvariantMethod,
        #[serde(default)]
        start: Option<StateSpec>,
        #[serde(default = "d_max_steps")]
        max_steps: usize,
        #[serde(default = "d_tol")]
        tol: f64,
        /// Record `D_tr(Λⁿρ₀, target)` for `n = 0..history`; 0 to skip.
        #[serde(default)]
        history: usize,
    },
    /// Commutant test of a random external field.
    Uniqueness {
        qifs: QifsDefinition,
        #[serde(default = "d_commutant_tol")]
        tol: f64,
    },
    /// A random orbit of states.
    Trajectory { system: SystemSpec, start: StateSpec, steps: usize },
    /// Mean state along a random orbit.
    Barycenter {
        system: SystemSpec,
        start: StateSpec,
        steps: usize,
        #[serde(default = "d_burn_in")]
        burn_in: usize,
    },
    HusimiSphere { state: StateSpec, rows: usize, cols: usize },
    HusimiTorus { state: StateSpec, resolution: usize },
    /// Invariant state of the quantum tartan and its Husimi portrait.
    Tartan {
        dim: usize,
        #[serde(default)]
        mode: TartanModeChoice,
        resolution: usize,
        #[serde(default = "d_tol")]
        tol: f64,
        #[serde(default = "d_max_steps")]
        max_steps: usize,
        #[serde(default = "d_damping")]
        damping: f64,
        #[serde(default = "d_dense_dim")]
        dense_dim: usize,
    },
    /// Classical histogram against quantum Husimi grids on a common grid.
    CompareClassicalQuantum {
        classical: Source,
        quantum: Source,
        resolution: usize,
        #[serde(default)]
        dims: Vec<usize>,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::ChaosGame { .. } => "chaos-game",
            Experiment::PushMeasure { .. } => "push-measure",
            Experiment::PushDensity { .. } => "push-density",
            Experiment::Dimension { .. } => "dimension",
            Experiment::InvariantState { .. } => "invariant-state",
            Experiment::Uniqueness { .. } => "uniqueness",
            Experiment::Trajectory { .. } => "trajectory",
            Experiment::Barycenter { .. } => "barycenter",
            Experiment::HusimiSphere { .. } => "husimi-sphere",
            Experiment::HusimiTorus { .. } => "husimi-torus",
            Experiment::Tartan { .. } => "tartan",
            Experiment::CompareClassicalQuantum { .. } => "compare-classical-quantum",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialMeasure {
    #[default]
    Uniform,
    PointMass { at: Vec<f64> },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvariantMethod {
    /// Eigenvalue-one space of the superoperator.
    #[default]
    Spectral,
    /// Iteration of the averaged map from `start`.
    Power,
    Both,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TartanModeChoice {
    #[default]
    LinearSpectral,
    NonlinearNormalized,
    Both,
}

impl TartanModeChoice {
    pub fn modes(self) -> Vec<TartanMode> {
        match self {
            TartanModeChoice::LinearSpectral => vec![TartanMode::LinearSpectral],
            TartanModeChoice::NonlinearNormalized => vec![TartanMode::NonlinearNormalized],
            TartanModeChoice::Both => vec![TartanMode::LinearSpectral, TartanMode::NonlinearNormalized],
        }
    }
}

/// A system whose random orbits are followed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    /// Density matrices under the maps of a QIFS document (Kraus operators
    /// become normalized conjugations).
    Mixed { qifs: QifsDefinition },
    /// Pure states under the Kraus operators of a QIFS document.
    Pure { qifs: QifsDefinition },
    /// Spin rotations chosen with latitude-dependent probabilities.
    LatitudeRotations { j: f64, theta1: f64, theta2: f64 },
}

/// An initial or displayed state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    MaximallyMixed { dim: usize },
    Basis { dim: usize, index: usize },
    SpinCoherent { j: f64, theta: f64, phi: f64 },
    TorusCoherent { dim: usize, q: f64, p: f64 },
    /// Random density matrix of the given rank, drawn from the run seed.
    Random { dim: usize, rank: usize },
    Matrix { state: MatrixJson },
    Ket { ket: VectorJson },
}

impl StateSpec {
    pub fn dim(&self) -> usize {
        match self {
            StateSpec::MaximallyMixed { dim }
            | StateSpec::Basis { dim, .. }
            | StateSpec::TorusCoherent { dim, .. }
            | StateSpec::Random { dim, .. } => *dim,
            StateSpec::SpinCoherent { j, .. } => (2.0 * j).round() as usize + 1,
            StateSpec::Matrix { state } => state.dim,
            StateSpec::Ket { ket } => ket.dim,
        }
    }

    /// The pure state, if this spec names one.
    pub fn ket(&self) -> Result<Option<Ket>> {
        Ok(match self {
            StateSpec::Basis { dim, index } => {
                if index >= dim {
                    return Err(Error::Invalid(format!("basis index {index} out of range for dimension {dim}")));
                }
                Some(Ket::basis(*dim, *index))
            }
            StateSpec::SpinCoherent { j, theta, phi } => Some(spin_coherent(Spin::new(*j)?, *theta, *phi)),
            StateSpec::TorusCoherent { dim, q, p } => Some(coherent_torus(*q, *p, *dim)?),
            StateSpec::Ket { ket } => Some(Ket::try_from(ket.clone())?),
            _ => None,
        })
    }

    pub fn density(&self, seed: u64) -> Result<DensityMatrix> {
        if let Some(k) = self.ket()? {
            return Ok(DensityMatrix::from_ket(&k));
        }
        match self {
            StateSpec::MaximallyMixed { dim } => Ok(DensityMatrix::maximally_mixed(*dim)),
            StateSpec::Random { dim, rank } => {
                let mut rng = crate::classical::chaos::stream_rng(seed, 1);
                DensityMatrix::new(random_density_matrix(*dim, *rank, &mut rng))
            }
            StateSpec::Matrix { state } => DensityMatrix::try_from(state.clone()),
            _ => unreachable!("pure specs handled above"),
        }
    }
}

/// One side of a phase-space comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Source {
    /// Chaos-game histogram of a classical IFS on the square.
    ChaosGame {
        ifs: ClassicalIFS,
        samples: usize,
        #[serde(default = "d_burn_in")]
        burn_in: usize,
    },
    /// `steps` iterates of the Markov operator from the uniform measure.
    Markov { ifs: ClassicalIFS, steps: usize },
    /// Tartan invariant state at each compared dimension.
    Tartan {
        #[serde(default)]
        mode: TartanModeChoice,
    },
    /// `𝟙/N` at each compared dimension.
    MaximallyMixed,
    /// A fixed torus state.
    TorusState { state: StateSpec },
}

impl Source {
    pub fn is_quantum(&self) -> bool {
        matches!(self, Source::Tartan { .. } | Source::MaximallyMixed | Source::TorusState { .. })
    }
}

pub(crate) fn point(ifs: &ClassicalIFS, coords: &Option<Vec<f64>>) -> Result<Point> {
    match coords {
        Some(c) => ifs.space().point_from_coords(c),
        None => Ok(ifs.space().from_unit_coords([0.5, 0.5])),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// SHA-256 of the compact JSON echo.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("configs serialize");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
