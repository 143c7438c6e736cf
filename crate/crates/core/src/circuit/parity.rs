//! Two-level parity circuit.

use crate::snn::{Network, NeuronId, NeuronSpec};

use super::{indexed, Circuit, CircuitError, PortMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityMode {
    /// Fires iff the number of set inputs is even. Fires when idle.
    Even,
    /// Fires iff the number of set inputs is odd. Silent when idle.
    Odd,
}

/// Level 1 has `n/2` neurons with thresholds 1, 3, 5, ...; the output weighs
/// them by ±2 against the inputs replayed one step later.
pub fn build_parity(n: usize, mode: ParityMode) -> Result<Circuit, CircuitError> {
    if n == 0 {
        return Err(CircuitError::InvalidSize("parity needs at least one input".into()));
    }
    let mut net = Network::new();
    let inputs: Vec<NeuronId> = (0..n).map(|_| net.add_input()).collect();
    let level1: Vec<NeuronId> = (1..=n / 2)
        .map(|j| net.add_neuron(NeuronSpec::gate(2 * j as i64 - 1)))
        .collect();
    for &h in &level1 {
        for &x in &inputs {
            net.connect(x, h, 0, 1);
        }
    }
    let (bias, w_level1, w_input, role) = match mode {
        ParityMode::Even => (1, 2, -1, "even"),
        ParityMode::Odd => (0, -2, 1, "odd"),
    };
    let out = net.add_neuron(NeuronSpec::gate(0).with_bias(bias));
    for &h in &level1 {
        net.connect(h, out, 0, w_level1);
    }
    for &x in &inputs {
        net.connect(x, out, 1, w_input);
    }
    net.output_ports.push(out);
    let ports = PortMap {
        inputs: indexed("x", n),
        outputs: vec![role.to_string()],
    };
    Ok(Circuit::new(net, 2, 1, 1, ports).with_group("level1", level1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::evaluate;

    fn bits(s: &str) -> Vec<bool> {
        s.bytes().map(|c| c == b'1').collect()
    }

    #[test]
    fn counts_follow_closed_form() {
        for n in 1..20 {
            let c = build_parity(n, ParityMode::Even).unwrap();
            let h = n / 2;
            assert_eq!(c.counts.neurons, h + 1);
            assert_eq!(c.counts.synapses, n * h + h + n);
            let out = c.outputs()[0];
            assert_eq!(c.net.in_degrees()[out.index()], n + h);
            assert_eq!(c.net.out_degrees()[c.inputs()[0].index()], h + 1);
        }
        let c = build_parity(8, ParityMode::Odd).unwrap();
        assert_eq!((c.counts.neurons, c.counts.synapses, c.latency), (5, 44, 2));
    }

    #[test]
    fn examples() {
        let even = build_parity(8, ParityMode::Even).unwrap();
        assert_eq!(evaluate(&even, &bits("11111111")).unwrap().outputs, vec![true]);
        let odd3 = build_parity(3, ParityMode::Odd).unwrap();
        let even3 = build_parity(3, ParityMode::Even).unwrap();
        assert_eq!(evaluate(&odd3, &bits("000")).unwrap().outputs, vec![false]);
        assert_eq!(evaluate(&even3, &bits("000")).unwrap().outputs, vec![true]);
        let odd5 = build_parity(5, ParityMode::Odd).unwrap();
        let even5 = build_parity(5, ParityMode::Even).unwrap();
        assert_eq!(evaluate(&odd5, &bits("10101")).unwrap().outputs, vec![true]);
        assert_eq!(evaluate(&even5, &bits("10101")).unwrap().outputs, vec![false]);
    }

    #[test]
    fn odd_detector_is_silent_when_idle() {
        let c = build_parity(6, ParityMode::Odd).unwrap();
        let e = evaluate(&c, &[false; 6]).unwrap();
        assert_eq!(e.metrics.total_spikes, 0);
    }

    #[test]
    fn zero_inputs_rejected() {
        assert!(matches!(build_parity(0, ParityMode::Odd), Err(CircuitError::InvalidSize(_))));
    }
}
