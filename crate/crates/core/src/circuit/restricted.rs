//! Population count of `m` inputs under a hardware profile: small counters on
//! chunks of the input, then a tree of adders.

use crate::snn::{validate, HardwareProfile, Network, NeuronId};

use super::adder::prefix_adder_node;
use super::compose::{splice, Bind};
use super::legalize::legalize;
use super::popc::add_popc_tc;
use super::sum::{sum_node, SumShape};
use super::{bit_width, indexed, Circuit, CircuitError, PortMap};

#[derive(Clone, Debug)]
struct Value {
    bits: Vec<NeuronId>,
    max: u64,
}

/// Builds the counter with the largest chunk size `l0 <= F_in` whose
/// legalized circuit passes validation. `arity` is the adder-tree fan-in.
pub fn build_popc_restricted(
    m: usize,
    profile: &HardwareProfile,
    arity: usize,
) -> Result<Circuit, CircuitError> {
    if m < 2 {
        return Err(CircuitError::InvalidSize(format!("need m >= 2 inputs, got {m}")));
    }
    if arity < 2 {
        return Err(CircuitError::InvalidSize(format!("tree arity must be >= 2, got {arity}")));
    }
    let capacity = profile.popc_capacity();
    if m > capacity {
        return Err(CircuitError::Capacity { m, capacity });
    }
    let mut last = String::from("F_in below 2");
    for l0 in (2..=profile.f_in.min(m)).rev() {
        match build_with_chunk(m, l0, profile, arity) {
            Ok(c) => {
                let report = validate(&c.net, profile);
                if report.is_empty() {
                    return Ok(c);
                }
                last = format!("chunk size {l0}: {}", report.violations[0]);
            }
            Err(CircuitError::Infeasible(msg)) => last = format!("chunk size {l0}: {msg}"),
            Err(e) => return Err(e),
        }
    }
    Err(CircuitError::Infeasible(format!("no chunk size passes validation ({last})")))
}

fn build_with_chunk(
    m: usize,
    l0: usize,
    profile: &HardwareProfile,
    arity: usize,
) -> Result<Circuit, CircuitError> {
    let mut net = Network::new();
    let inputs: Vec<NeuronId> = (0..m).map(|_| net.add_input()).collect();
    let mut values: Vec<Value> = inputs
        .chunks(l0)
        .map(|chunk| Value {
            bits: add_popc_tc(&mut net, chunk).outputs,
            max: chunk.len() as u64,
        })
        .collect();
    let mut scale = 1u64;
    while values.len() > 1 {
        let mut next = Vec::with_capacity(values.len().div_ceil(arity));
        for group in values.chunks(arity) {
            if group.len() == 1 {
                next.push(group[0].clone());
            } else {
                next.push(add_node(&mut net, group, profile, &mut scale)?);
            }
        }
        values = next;
    }
    let root = values.pop().unwrap();
    net.output_ports = root.bits;
    let ports = PortMap {
        inputs: indexed("x", m),
        outputs: indexed("count", net.output_ports.len()),
    };
    let raw = Circuit::new(net, 0, 1, scale, ports);
    legalize(&raw, profile)
}

/// Adds `group` with a weighted parity-style node when that node fits the
/// profile, otherwise with parallel-prefix adders.
fn add_node(
    net: &mut Network,
    group: &[Value],
    profile: &HardwareProfile,
    scale: &mut u64,
) -> Result<Value, CircuitError> {
    let max: u64 = group.iter().map(|v| v.max).sum();
    let out_width = bit_width(max);
    let shape = SumShape {
        widths: group.iter().map(|v| v.bits.len()).collect(),
        maxes: group.iter().map(|v| v.max).collect(),
        out_width,
        trim: true,
        comparator_top: true,
    };
    let node = sum_node(&shape);
    // Fan-out and delays are fixed up by legalization of the whole tree.
    let relaxed = HardwareProfile {
        f_out: usize::MAX,
        m_delay: u32::MAX,
        ..*profile
    };
    if validate(&node, &relaxed).is_empty() {
        *scale = (*scale).max(1u64 << out_width.saturating_sub(2));
        return Ok(Value {
            bits: embed(net, &node, group),
            max,
        });
    }
    if group.len() > 2 {
        let mut acc = group[0].clone();
        for v in &group[1..] {
            acc = add_node(net, &[acc, v.clone()], profile, scale)?;
        }
        return Ok(acc);
    }
    let node = prefix_adder_node(group[0].bits.len(), group[1].bits.len(), out_width);
    let report = validate(&node, &relaxed);
    if !report.is_empty() {
        return Err(CircuitError::Infeasible(format!("adder node: {}", report.violations[0])));
    }
    Ok(Value {
        bits: embed(net, &node, group),
        max,
    })
}

fn embed(net: &mut Network, node: &Network, group: &[Value]) -> Vec<NeuronId> {
    let bind: Vec<Bind> = group
        .iter()
        .flat_map(|v| v.bits.iter().map(|&b| Bind::To(b)))
        .collect();
    let map = splice(net, node, &bind);
    node.output_ports.iter().map(|o| map[o.index()]).collect()
}
