//! Bit expander: each bit of a `len`-bit input is emitted `factor` times.
//!
//! Ports are `data` and `sync`. A sequence `b_1..b_len` arrives on `data` at
//! `t0..t0+len-1` with one `sync` spike at `t0`. Latch `L_i` captures `b_i` by
//! coincidence with `sync` delayed `i-1`, and holds it through a self-synapse.
//! A pulse chain `P_1..P_len`, spaced `factor` apart, reads out and clears the
//! latches in turn through AND gates `E_i`. The burst neuron `B` holds
//! each `E_i` pulse for exactly `factor` steps via a delayed inhibitory copy.
//! Bit `i` occupies `t0 + Δ + (i-1)·factor .. t0 + Δ + i·factor - 1`.

use crate::snn::{validate, HardwareProfile, Network, NeuronId, NeuronSpec};

use super::legalize::split_long_delays;
use super::{Circuit, CircuitError, PortMap};

pub fn build_expander(len: usize, factor: usize, profile: &HardwareProfile) -> Result<Circuit, CircuitError> {
    if len == 0 || factor == 0 {
        return Err(CircuitError::InvalidSize(format!(
            "expander needs len >= 1 and factor >= 1, got {len} and {factor}"
        )));
    }
    if profile.f_in < 4 || profile.f_out < len + 1 {
        return Err(CircuitError::Infeasible(format!(
            "expander of {len} bits needs F_in >= 4 and F_out >= {}",
            len + 1
        )));
    }
    let f = factor as u32;
    let mut net = Network::new();
    let data = net.add_input();
    let sync = net.add_input();
    let mut latches = Vec::with_capacity(len);
    let mut pulses: Vec<NeuronId> = Vec::with_capacity(len);
    let mut gates = Vec::with_capacity(len);
    for i in 0..len {
        let l = net.add_neuron(NeuronSpec::gate(1));
        net.connect(data, l, 0, 1);
        net.connect(sync, l, i as u32, 1);
        net.connect(l, l, 0, 2);
        let p = net.add_neuron(NeuronSpec::relay());
        match pulses.last() {
            None => net.connect(sync, p, 0, 1),
            Some(&prev) => net.connect(prev, p, f - 1, 1),
        }
        net.connect(p, l, 0, -3);
        let e = net.add_neuron(NeuronSpec::gate(1));
        net.connect(l, e, 0, 1);
        net.connect(p, e, 0, 1);
        latches.push(l);
        pulses.push(p);
        gates.push(e);
    }
    let burst = net.add_neuron(NeuronSpec::relay());
    net.connect(burst, burst, 0, 1);
    let merged = 2 * len + 1 > profile.f_in;
    if merged {
        if len > profile.f_in {
            return Err(CircuitError::Infeasible(format!("expander of {len} bits exceeds F_in")));
        }
        let s = net.add_neuron(NeuronSpec::relay());
        for &e in &gates {
            net.connect(e, s, 0, 1);
        }
        net.connect(s, burst, 0, 1);
        net.connect(s, burst, f, -1);
    } else {
        for &e in &gates {
            net.connect(e, burst, 0, 1);
            net.connect(e, burst, f, -1);
        }
    }
    net.output_ports.push(burst);
    split_long_delays(&mut net, profile.m_delay);
    let report = validate(&net, profile);
    if !report.is_empty() {
        return Err(CircuitError::Infeasible(report.to_string()));
    }
    let delta = if merged { 4 } else { 3 };
    let ports = PortMap {
        inputs: vec!["data".into(), "sync".into()],
        outputs: vec!["out".into()],
    };
    Ok(Circuit::new(net, delta, (len * factor) as u64, 1, ports)
        .with_group("latches", latches)
        .with_group("pulses", pulses))
}

/// Each of `r` input bits repeated `r` times; initiation interval `r²`.
pub fn build_repeater(r: usize, profile: &HardwareProfile) -> Result<Circuit, CircuitError> {
    if r < 2 {
        return Err(CircuitError::InvalidSize(format!("repeater needs r >= 2, got {r}")));
    }
    build_expander(r, r, profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snn::{run, Injections};

    fn bits(s: &str) -> Vec<bool> {
        s.bytes().map(|c| c == b'1').collect()
    }

    /// Streams `seqs` with period `len·factor` and returns the output from
    /// `Δ` onwards.
    fn drive(c: &Circuit, seqs: &[Vec<bool>]) -> Vec<bool> {
        let period = c.initiation_interval;
        let (data, sync) = (c.inputs()[0], c.inputs()[1]);
        let mut inj = Injections::new();
        for (s, seq) in seqs.iter().enumerate() {
            let t0 = s as u64 * period;
            inj.entry(t0).or_default().push(sync);
            for (i, &b) in seq.iter().enumerate() {
                if b {
                    inj.entry(t0 + i as u64).or_default().push(data);
                }
            }
        }
        let total = seqs.len() as u64 * period;
        let (trace, _) = run(&c.net, c.latency + total + 5, &inj).unwrap();
        let out = c.outputs()[0];
        let v: Vec<bool> = (0..total + 5).map(|t| trace.fired(out, t + c.latency)).collect();
        assert!(trace.of(out).iter().all(|&t| t >= c.latency));
        assert!(v[total as usize..].iter().all(|&b| !b), "trailing spikes");
        v[..total as usize].to_vec()
    }

    #[test]
    fn three_bits_010() {
        let p = HardwareProfile::new(8, 8, 4, 8, 8).unwrap();
        let c = build_repeater(3, &p).unwrap();
        assert_eq!(c.latency, 3);
        assert_eq!(c.initiation_interval, 9);
        assert_eq!(drive(&c, &[bits("010")]), bits("000111000"));
        assert_eq!(drive(&c, &[bits("000")]), bits("000000000"));
        assert_eq!(c.counts.neurons, 10);
        assert_eq!(c.counts.synapses, 28);
    }

    #[test]
    fn four_bits_back_to_back() {
        let p = HardwareProfile::new(8, 8, 4, 16, 16).unwrap();
        let c = build_repeater(4, &p).unwrap();
        let got = drive(&c, &[bits("1011"), bits("0110")]);
        assert_eq!(got, bits("11110000111111110000111111110000"));
    }

    #[test]
    fn small_fan_in_merges_and_long_delays_split() {
        let p = HardwareProfile::new(8, 8, 2, 8, 8).unwrap();
        let c = build_expander(4, 9, &p).unwrap();
        assert_eq!(c.latency, 4);
        assert!(c.net.max_delay() <= 2);
        let got = drive(&c, &[bits("1001"), bits("0110")]);
        let want: Vec<bool> = "10010110"
            .bytes()
            .flat_map(|b| std::iter::repeat_n(b == b'1', 9))
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn rejects_r_below_two() {
        let p = HardwareProfile::new(8, 8, 4, 8, 8).unwrap();
        assert!(build_repeater(1, &p).is_err());
    }
}
