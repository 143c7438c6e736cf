//! Threshold-gate circuit builders with latency bookkeeping and legalization.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::snn::{FormatError, Network, NeuronId, NeuronKind, SimError};

pub mod adder;
pub mod compose;
pub mod eval;
pub mod legalize;
pub mod parity;
pub mod popc;
pub mod repeater;
pub mod restricted;
pub mod stack;
pub mod sum;
pub mod text;

pub use compose::{compose, relay_layer, splice, Bind};
pub use eval::{bits_to_u64, evaluate, stream, stream_with_metrics, u64_to_bits, Evaluation};
pub use legalize::{
    arrival_times, legalize, legalize_fanout, live_set, path_uniform, retime, split_long_delays,
};
pub use parity::{build_parity, ParityMode};
pub use popc::build_popc_tc;
pub use repeater::{build_expander, build_repeater};
pub use restricted::build_popc_restricted;
pub use stack::{build_stack, stack_neuron, stack_weight};
pub use sum::build_sum_tc;
pub use text::{describe, parse_circuit, write_circuit};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("m = {m} exceeds the capacity 2^(S_pr-2) = {capacity}")]
    Capacity { m: usize, capacity: usize },
    #[error("profile infeasible: {0}")]
    Infeasible(String),
    #[error("composition: {0}")]
    Compose(String),
    #[error("network has a cycle through neuron {0}")]
    Cycle(NeuronId),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

/// Size figures of a circuit. `neurons` excludes input ports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub neurons: usize,
    pub synapses: usize,
    pub max_in_degree: usize,
    pub max_out_degree: usize,
    pub max_delay: u32,
}

impl Counts {
    pub fn of(net: &Network) -> Counts {
        Counts {
            neurons: net.len() - net.input_ports.len(),
            synapses: net.synapses.len(),
            max_in_degree: net.in_degrees().into_iter().max().unwrap_or(0),
            max_out_degree: net.out_degrees().into_iter().max().unwrap_or(0),
            max_delay: net.max_delay(),
        }
    }
}

/// Semantic role of every input and output port, parallel to the port lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PortMap {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub net: Network,
    /// Timesteps from an input spike to the corresponding output spike.
    pub latency: u64,
    pub initiation_interval: u64,
    /// Power-of-two fixed-point scale of the internal weights.
    pub scale: u64,
    pub counts: Counts,
    pub ports: PortMap,
    /// Named internal neuron groups, for probing.
    pub groups: BTreeMap<String, Vec<NeuronId>>,
}

impl Circuit {
    /// Wraps a finished network. Output ports become readout neurons.
    pub fn new(mut net: Network, latency: u64, initiation_interval: u64, scale: u64, ports: PortMap) -> Self {
        assert_eq!(ports.inputs.len(), net.input_ports.len(), "one role per input port");
        assert_eq!(ports.outputs.len(), net.output_ports.len(), "one role per output port");
        for o in net.output_ports.clone() {
            let n = net.neuron_mut(o);
            if matches!(n.kind, NeuronKind::Regular) {
                n.kind = NeuronKind::Readout;
            }
        }
        let counts = Counts::of(&net);
        Circuit {
            net,
            latency,
            initiation_interval,
            scale,
            counts,
            ports,
            groups: BTreeMap::new(),
        }
    }

    pub fn inputs(&self) -> &[NeuronId] {
        &self.net.input_ports
    }

    pub fn outputs(&self) -> &[NeuronId] {
        &self.net.output_ports
    }

    pub fn recount(&mut self) {
        self.counts = Counts::of(&self.net);
    }

    pub fn input_role(&self, i: usize) -> &str {
        &self.ports.inputs[i]
    }

    pub fn output_role(&self, i: usize) -> &str {
        &self.ports.outputs[i]
    }

    pub fn with_group(mut self, name: &str, ids: Vec<NeuronId>) -> Self {
        self.groups.insert(name.to_string(), ids);
        self
    }
}

pub(crate) fn indexed(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}[{i}]")).collect()
}

/// Bits needed to write `v` in binary (0 for 0).
pub fn bit_width(v: u64) -> usize {
    (u64::BITS - v.leading_zeros()) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_widths() {
        assert_eq!(bit_width(0), 0);
        assert_eq!(bit_width(1), 1);
        assert_eq!(bit_width(4), 3);
        assert_eq!(bit_width(7), 3);
        assert_eq!(bit_width(4096), 13);
    }
}
