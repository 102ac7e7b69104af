//! Classical iterated function systems on the interval, the square and the sphere.

pub mod chaos;
pub mod dimension;
pub mod hyperbolic;
pub mod ifs;
pub mod maps;
pub mod markov;
pub mod measure;
pub mod space;

pub use chaos::{chaos_game, ChaosGameOptions, ChaosGameResult};
pub use dimension::{box_counting_dimension, geometric_scales, DimensionEstimate};
pub use hyperbolic::{classify_hyperbolic, HyperbolicityReport};
pub use ifs::{ClassicalIFS, ProbabilityFunction};
pub use maps::ClassicalMap;
pub use markov::{push_density, push_measure, push_measure_n, DensityGrid};
pub use measure::EmpiricalMeasure;
pub use space::{PhaseSpace, Point};
