//! Driving a circuit with input vectors and reading outputs at its latency.

use crate::snn::{run_observed, Injections, RunMetrics};

use super::{Circuit, CircuitError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    /// Output port states at `t = latency`.
    pub outputs: Vec<bool>,
    pub metrics: RunMetrics,
}

/// LSB-first bits to an integer.
pub fn bits_to_u64(bits: &[bool]) -> u64 {
    bits.iter().rev().fold(0, |acc, &b| (acc << 1) | b as u64)
}

/// The low `width` bits of `v`, LSB first.
pub fn u64_to_bits(v: u64, width: usize) -> Vec<bool> {
    (0..width).map(|i| i < 64 && (v >> i) & 1 == 1).collect()
}

/// Spikes the input ports whose bit is set at `t = 0` and reads the outputs
/// at `t = latency`.
pub fn evaluate(c: &Circuit, input: &[bool]) -> Result<Evaluation, CircuitError> {
    let (mut outs, metrics) = stream_with_metrics(c, std::slice::from_ref(&input.to_vec()), 1)?;
    Ok(Evaluation {
        outputs: outs.pop().unwrap(),
        metrics,
    })
}

/// Presents `inputs[i]` at `t = i * period` and returns the outputs read at
/// `t = i * period + latency`.
pub fn stream(c: &Circuit, inputs: &[Vec<bool>], period: u64) -> Result<Vec<Vec<bool>>, CircuitError> {
    stream_with_metrics(c, inputs, period).map(|r| r.0)
}

pub fn stream_with_metrics(
    c: &Circuit,
    inputs: &[Vec<bool>],
    period: u64,
) -> Result<(Vec<Vec<bool>>, RunMetrics), CircuitError> {
    assert!(period >= 1);
    let ports = c.inputs();
    let mut inj = Injections::new();
    for (i, v) in inputs.iter().enumerate() {
        assert_eq!(v.len(), ports.len(), "input width");
        let ids: Vec<_> = ports.iter().zip(v).filter(|(_, &b)| b).map(|(&p, _)| p).collect();
        if !ids.is_empty() {
            inj.insert(i as u64 * period, ids);
        }
    }
    let mut slot = vec![None; c.net.len()];
    for (k, o) in c.outputs().iter().enumerate() {
        slot[o.index()] = Some(k);
    }
    let n = inputs.len() as u64;
    let horizon = n.saturating_sub(1) * period + c.latency + 1;
    let mut outs = vec![vec![false; c.outputs().len()]; inputs.len()];
    let metrics = run_observed(&c.net, horizon, &inj, |t, now| {
        if t < c.latency || !(t - c.latency).is_multiple_of(period) {
            return;
        }
        let i = ((t - c.latency) / period) as usize;
        if i >= outs.len() {
            return;
        }
        for id in now {
            if let Some(k) = slot[id.index()] {
                outs[i][k] = true;
            }
        }
    })?;
    Ok((outs, metrics))
}
