//! Discrete-time spiking network model, simulator and hardware checks.

pub mod format;
pub mod network;
pub mod profile;
pub mod sim;
pub mod validate;

pub use network::{
    Network, NetworkError, NeuronId, NeuronKind, NeuronSpec, ResetMode, Schedule, SynapseSpec,
};
pub use profile::{HardwareProfile, ProfileError};
pub use sim::{
    dynamic_range_check, run, run_observed, DynamicRange, Injections, RunMetrics, SimError,
    SimState, Simulator, SpikeTrace,
};
pub use format::{parse_network, write_network, FormatError};
pub use validate::{validate, Violation, ViolationReport};
