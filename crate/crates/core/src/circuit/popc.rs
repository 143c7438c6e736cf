//! Three-level population count: thermometer, one-hot, binary.

use crate::snn::{Network, NeuronId, NeuronSpec};

use super::{bit_width, indexed, Circuit, CircuitError, PortMap};

pub(crate) struct PopcParts {
    pub level2: Vec<NeuronId>,
    pub outputs: Vec<NeuronId>,
}

/// Appends a population counter over `inputs`; outputs LSB first.
pub(crate) fn add_popc_tc(net: &mut Network, inputs: &[NeuronId]) -> PopcParts {
    let l = inputs.len();
    let level1: Vec<NeuronId> = (1..=l)
        .map(|j| net.add_neuron(NeuronSpec::gate(j as i64 - 1)))
        .collect();
    for &h in &level1 {
        for &x in inputs {
            net.connect(x, h, 0, 1);
        }
    }
    let level2: Vec<NeuronId> = (0..l).map(|_| net.add_neuron(NeuronSpec::gate(0))).collect();
    for j in 0..l {
        net.connect(level1[j], level2[j], 0, 1);
        for &above in &level1[j + 1..] {
            net.connect(above, level2[j], 0, -1);
        }
    }
    let width = bit_width(l as u64);
    let outputs: Vec<NeuronId> = (0..width).map(|_| net.add_neuron(NeuronSpec::gate(0))).collect();
    for (j, &v) in level2.iter().enumerate() {
        let value = j + 1;
        for (b, &o) in outputs.iter().enumerate() {
            if (value >> b) & 1 == 1 {
                net.connect(v, o, 0, 1);
            }
        }
    }
    PopcParts { level2, outputs }
}

pub fn build_popc_tc(l: usize) -> Result<Circuit, CircuitError> {
    if l == 0 {
        return Err(CircuitError::InvalidSize("population count needs at least one input".into()));
    }
    let mut net = Network::new();
    let inputs: Vec<NeuronId> = (0..l).map(|_| net.add_input()).collect();
    let parts = add_popc_tc(&mut net, &inputs);
    net.output_ports = parts.outputs.clone();
    let ports = PortMap {
        inputs: indexed("x", l),
        outputs: indexed("count", parts.outputs.len()),
    };
    Ok(Circuit::new(net, 3, 1, 1, ports).with_group("level2", parts.level2))
}
