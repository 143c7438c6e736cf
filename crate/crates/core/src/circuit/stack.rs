//! Bit patterns stored in one synaptic weight and replayed on a trigger.
//!
//! The trigger loads `w` into a neuron with leak 2 and threshold
//! `2^(S_pr-2) - 1`, so it fires on the current top bit; a self-synapse of
//! `-2^(S_pr-1)` clears that bit after the shift.

use crate::snn::{validate, HardwareProfile, Network, NeuronSpec, ResetMode};

use super::{Circuit, CircuitError, PortMap};

/// `sum p_i · 2^(S_pr-2-i)`: the first pattern bit sits just below the sign
/// bit.
pub fn stack_weight(pattern: &[bool], s_pr: u32) -> i64 {
    pattern
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| 1i64 << (s_pr as usize - 2 - i))
        .sum()
}

/// The pattern neuron spec for a given weight precision.
pub fn stack_neuron(s_pr: u32) -> NeuronSpec {
    NeuronSpec::gate((1i64 << (s_pr - 2)) - 1)
        .with_leak(2)
        .with_reset(ResetMode::Hold)
}

/// Trigger at `t` gives output spikes at `t + 1 + i` for every set bit `i`.
/// Latency 1, initiation interval `len(pattern)`.
pub fn build_stack(pattern: &[bool], profile: &HardwareProfile) -> Result<Circuit, CircuitError> {
    let cap = profile.s_pr as usize - 2;
    if pattern.is_empty() || pattern.len() > cap {
        return Err(CircuitError::InvalidSize(format!(
            "pattern length {} outside 1..={cap}",
            pattern.len()
        )));
    }
    let mut net = Network::new();
    let trigger = net.add_input();
    let p = net.add_neuron(stack_neuron(profile.s_pr));
    net.connect(trigger, p, 0, stack_weight(pattern, profile.s_pr));
    net.connect(p, p, 0, -(1i64 << (profile.s_pr - 1)));
    net.output_ports.push(p);
    let report = validate(&net, profile);
    if !report.is_empty() {
        return Err(CircuitError::Infeasible(report.to_string()));
    }
    let ports = PortMap {
        inputs: vec!["trigger".into()],
        outputs: vec!["pattern".into()],
    };
    Ok(Circuit::new(
        net,
        1,
        pattern.len() as u64,
        1u64 << (profile.s_pr - 2),
        ports,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snn::{run, Injections};

    fn bits(s: &str) -> Vec<bool> {
        s.bytes().map(|c| c == b'1').collect()
    }

    fn replay(c: &Circuit, triggers: &[u64], horizon: u64) -> Vec<u64> {
        let inj: Injections = triggers.iter().map(|&t| (t, vec![c.inputs()[0]])).collect();
        let (trace, _) = run(&c.net, horizon, &inj).unwrap();
        trace.of(c.outputs()[0]).to_vec()
    }

    #[test]
    fn weight_examples() {
        assert_eq!(stack_weight(&bits("010"), 8), 32);
        assert_eq!(stack_weight(&bits("000"), 8), 0);
        assert_eq!(stack_weight(&bits("111111"), 8), 126);
    }

    #[test]
    fn replays() {
        let p8 = HardwareProfile::new(8, 8, 4, 8, 8).unwrap();
        let c = build_stack(&bits("010"), &p8).unwrap();
        assert_eq!(replay(&c, &[0], 10), vec![2]);
        let c = build_stack(&bits("000"), &p8).unwrap();
        assert!(replay(&c, &[0], 10).is_empty());
        let c = build_stack(&bits("111111"), &p8).unwrap();
        assert_eq!(replay(&c, &[0, 6], 20), (1..=12).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_long_patterns() {
        let p8 = HardwareProfile::new(8, 8, 4, 8, 8).unwrap();
        assert!(build_stack(&bits("1010101"), &p8).is_err());
        assert!(build_stack(&[], &p8).is_err());
    }
}
