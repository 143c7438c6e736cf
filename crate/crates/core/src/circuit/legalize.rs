//! Fan-out relay trees, delay retiming and delay-range splitting.
//!
//! Retiming assumes a feedforward circuit whose behaviour depends only on
//! every neuron seeing all of its inputs at one common timestep. Neurons that
//! can never fire (constant-zero ports and anything fed only by them) are
//! ignored by the timing passes.

use std::collections::VecDeque;

use crate::snn::{HardwareProfile, Network, NeuronId, NeuronKind, NeuronSpec, SynapseSpec};

use super::{Circuit, CircuitError};

/// Neurons that can ever fire: input ports, scheduled programmed neurons,
/// spontaneously active neurons and everything downstream of them.
pub fn live_set(net: &Network) -> Vec<bool> {
    let mut live = vec![false; net.len()];
    let mut queue = VecDeque::new();
    let seed = |i: usize, live: &mut Vec<bool>, queue: &mut VecDeque<usize>| {
        if !live[i] {
            live[i] = true;
            queue.push_back(i);
        }
    };
    for &p in &net.input_ports {
        seed(p.index(), &mut live, &mut queue);
    }
    for (i, n) in net.neurons.iter().enumerate() {
        let spontaneous = match &n.kind {
            NeuronKind::Programmed(s) => !s.is_empty(),
            _ => n.bias > 0 || n.threshold < 0,
        };
        if spontaneous {
            seed(i, &mut live, &mut queue);
        }
    }
    let out = net.outgoing();
    while let Some(i) = queue.pop_front() {
        for &s in &out[i] {
            let p = net.synapses[s].post.index();
            if !live[p] {
                live[p] = true;
                queue.push_back(p);
            }
        }
    }
    live
}

fn topo_order(net: &Network, live: &[bool]) -> Result<Vec<usize>, CircuitError> {
    let mut indeg = vec![0usize; net.len()];
    for s in &net.synapses {
        if s.pre != s.post && live[s.pre.index()] && live[s.post.index()] {
            indeg[s.post.index()] += 1;
        }
    }
    let out = net.outgoing();
    let mut queue: VecDeque<usize> = (0..net.len()).filter(|&i| live[i] && indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(net.len());
    while let Some(i) = queue.pop_front() {
        order.push(i);
        for &si in &out[i] {
            let s = &net.synapses[si];
            let p = s.post.index();
            if s.pre == s.post || !live[p] {
                continue;
            }
            indeg[p] -= 1;
            if indeg[p] == 0 {
                queue.push_back(p);
            }
        }
    }
    let live_count = live.iter().filter(|&&l| l).count();
    if order.len() != live_count {
        let stuck = (0..net.len()).find(|&i| live[i] && indeg[i] > 0).unwrap();
        return Err(CircuitError::Cycle(NeuronId(stuck as u32)));
    }
    Ok(order)
}

fn forward(
    net: &Network,
    live: &[bool],
    order: &[usize],
    delay: impl Fn(&SynapseSpec) -> u64,
    floor: &[u64],
) -> Vec<Option<u64>> {
    let inc = net.incoming();
    let mut at: Vec<Option<u64>> = vec![None; net.len()];
    for &i in order {
        let mut a = floor[i];
        for &si in &inc[i] {
            let s = &net.synapses[si];
            if s.pre == s.post || !live[s.pre.index()] {
                continue;
            }
            let pre = at[s.pre.index()].expect("topological order");
            a = a.max(pre + delay(s) + 1);
        }
        at[i] = Some(a);
    }
    at
}

/// Earliest arrival time of every live neuron under the current delays, with
/// sources at 0. Silent neurons get `None`.
pub fn arrival_times(net: &Network) -> Result<Vec<Option<u64>>, CircuitError> {
    let live = live_set(net);
    let order = topo_order(net, &live)?;
    Ok(forward(net, &live, &order, |s| s.delay as u64, &vec![0; net.len()]))
}

/// True when every live neuron receives all of its live inputs with the
/// same total input-to-neuron delay.
pub fn path_uniform(net: &Network) -> Result<bool, CircuitError> {
    let at = arrival_times(net)?;
    Ok(net.synapses.iter().all(|s| {
        if s.pre == s.post {
            return true;
        }
        match (at[s.pre.index()], at[s.post.index()]) {
            (Some(a), Some(b)) => a + s.delay as u64 + 1 == b,
            _ => true,
        }
    }))
}

/// Recomputes every synaptic delay so each neuron sees all inputs at once,
/// using the shortest schedule. With `align_outputs` the live output ports
/// are additionally pushed to one common arrival time. Returns the arrival
/// times.
pub fn retime(net: &mut Network, align_outputs: bool) -> Result<Vec<Option<u64>>, CircuitError> {
    let live = live_set(net);
    let order = topo_order(net, &live)?;
    let mut floor = vec![0u64; net.len()];
    let mut at = forward(net, &live, &order, |_| 0, &floor);
    if align_outputs {
        loop {
            let target = net
                .output_ports
                .iter()
                .filter_map(|o| at[o.index()])
                .max()
                .unwrap_or(0);
            let mut changed = false;
            for o in &net.output_ports {
                if at[o.index()].is_some_and(|a| a < target) {
                    floor[o.index()] = target;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            at = forward(net, &live, &order, |_| 0, &floor);
        }
    }
    for s in net.synapses.iter_mut() {
        if s.pre == s.post {
            continue;
        }
        match (at[s.pre.index()], at[s.post.index()]) {
            (Some(a), Some(b)) => s.delay = (b - a - 1) as u32,
            _ => s.delay = 0,
        }
    }
    Ok(at)
}

/// Replaces every synapse with delay above `m_delay` by a chain of relays with
/// the same end-to-end delay. Degrees of existing neurons are unchanged.
pub fn split_long_delays(net: &mut Network, m_delay: u32) {
    let m = m_delay as u64;
    let n = net.synapses.len();
    for i in 0..n {
        let s = net.synapses[i];
        if s.delay <= m_delay {
            continue;
        }
        let d = s.delay as u64;
        let hops = (d - m).div_ceil(m + 1);
        let mut rest = d - hops;
        let mut prev = s.pre;
        let mut first = true;
        for _ in 0..hops {
            let r = net.add_neuron(NeuronSpec::relay());
            let step = rest.min(m);
            rest -= step;
            let syn = SynapseSpec {
                pre: prev,
                post: r,
                delay: step as u32,
                weight: 1,
            };
            if first {
                net.synapses[i] = syn;
                first = false;
            } else {
                net.synapses.push(syn);
            }
            prev = r;
        }
        net.synapses.push(SynapseSpec {
            pre: prev,
            post: s.post,
            delay: rest as u32,
            weight: s.weight,
        });
    }
}

/// Puts a relay tree of branching at most `F_out` behind every neuron whose
/// out-degree exceeds `F_out`. All leaves of a tree sit at the same depth, so
/// the added latency is uniform per source. Self-synapses stay direct.
pub fn legalize_fanout(net: &Network, profile: &HardwareProfile) -> Network {
    let f = profile.f_out.max(2);
    let outgoing = net.outgoing();
    let mut out = Network {
        neurons: net.neurons.clone(),
        synapses: Vec::new(),
        input_ports: net.input_ports.clone(),
        output_ports: net.output_ports.clone(),
    };
    let mut moved = vec![false; net.synapses.len()];
    let mut extra = Vec::new();
    for (v, syns) in outgoing.iter().enumerate() {
        if syns.len() <= profile.f_out {
            continue;
        }
        let v = NeuronId(v as u32);
        let others: Vec<usize> = syns.iter().copied().filter(|&s| net.synapses[s].post != v).collect();
        let mut level = Vec::new();
        for chunk in others.chunks(f) {
            let r = out.add_neuron(NeuronSpec::relay());
            for &si in chunk {
                moved[si] = true;
                extra.push(SynapseSpec {
                    pre: r,
                    ..net.synapses[si]
                });
            }
            level.push(r);
        }
        while level.len() > 1 {
            let mut next = Vec::new();
            for chunk in level.chunks(f) {
                let p = out.add_neuron(NeuronSpec::relay());
                for &c in chunk {
                    extra.push(SynapseSpec {
                        pre: p,
                        post: c,
                        delay: 0,
                        weight: 1,
                    });
                }
                next.push(p);
            }
            level = next;
        }
        extra.push(SynapseSpec {
            pre: v,
            post: level[0],
            delay: 0,
            weight: 1,
        });
    }
    out.synapses = net
        .synapses
        .iter()
        .zip(&moved)
        .filter(|(_, &m)| !m)
        .map(|(s, _)| *s)
        .chain(extra)
        .collect();
    out
}

/// Fan-out trees, retiming with aligned outputs and delay splitting for a
/// feedforward circuit. The reported latency is the common output arrival.
pub fn legalize(c: &Circuit, profile: &HardwareProfile) -> Result<Circuit, CircuitError> {
    let mut net = legalize_fanout(&c.net, profile);
    let at = retime(&mut net, true)?;
    let latency = net
        .output_ports
        .iter()
        .filter_map(|o| at[o.index()])
        .max()
        .unwrap_or(c.latency);
    split_long_delays(&mut net, profile.m_delay);
    let mut out = Circuit::new(net, latency, c.initiation_interval, c.scale, c.ports.clone());
    out.groups = c.groups.clone();
    Ok(out)
}
