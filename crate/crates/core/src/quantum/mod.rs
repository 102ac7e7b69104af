//! Quantum iterated function systems and the channels they induce.

pub mod channel;
pub mod definition;
pub mod system;
pub mod trajectory;

pub use channel::{
    ancilla_channel, ancilla_direct, depolarizing, random_external_field, random_kraus_channel, random_unitary_channel,
    Flag, QuantumChannel,
};
pub use definition::{BuiltQifs, QifsDefinition};
pub use system::{atomic_qifs, DensityMap, HomogeneousQIFS, MixedQIFS, ProbabilityRule, Pulse, PureQIFS, Transformer};
pub use trajectory::{
    barycenter_estimate, barycenter_estimate_pure, mixed_barycenter, mixed_trajectory, pure_barycenter,
    pure_trajectory, Barycenter,
};
