//! Embedding one network into another and serial composition of circuits.

use crate::snn::{Network, NeuronId, NeuronKind, NeuronSpec, SynapseSpec};

use super::{Circuit, CircuitError, PortMap};

/// How an input port of an embedded network is resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bind {
    /// The port disappears; its synapses leave from this neuron instead.
    To(NeuronId),
    /// The port stays as a constant-zero neuron.
    Zero,
    /// The port becomes an input port of the destination.
    Keep,
}

/// Copies `src` into `dst`, resolving input port `i` of `src` by `bind[i]`.
/// Readout neurons of `src` are copied as regular neurons. Returns the image
/// of every `src` neuron.
pub fn splice(dst: &mut Network, src: &Network, bind: &[Bind]) -> Vec<NeuronId> {
    assert_eq!(bind.len(), src.input_ports.len());
    let mut target: Vec<Option<NeuronId>> = vec![None; src.len()];
    for (&port, b) in src.input_ports.iter().zip(bind) {
        if let Bind::To(id) = b {
            target[port.index()] = Some(*id);
        }
    }
    let mut map = Vec::with_capacity(src.len());
    for (i, spec) in src.neurons.iter().enumerate() {
        let id = match target[i] {
            Some(id) => id,
            None => {
                let mut spec = spec.clone();
                if matches!(spec.kind, NeuronKind::Readout) {
                    spec.kind = NeuronKind::Regular;
                }
                dst.add_neuron(spec)
            }
        };
        map.push(id);
    }
    for (&port, b) in src.input_ports.iter().zip(bind) {
        if *b == Bind::Keep {
            dst.input_ports.push(map[port.index()]);
        }
    }
    for s in &src.synapses {
        dst.synapses.push(SynapseSpec {
            pre: map[s.pre.index()],
            post: map[s.post.index()],
            ..*s
        });
    }
    map
}

/// Feeds outputs of `a` into inputs of `b`. `wiring` pairs an output index of
/// `a` with an input index of `b`; inputs of `b` listed in `zeros` are tied to
/// constant zero. Every input of `b` must be covered exactly once.
pub fn compose(
    a: &Circuit,
    b: &Circuit,
    wiring: &[(usize, usize)],
    zeros: &[usize],
) -> Result<Circuit, CircuitError> {
    let nb = b.inputs().len();
    let mut bind: Vec<Option<Bind>> = vec![None; nb];
    for &(ao, bi) in wiring {
        let src = *a
            .outputs()
            .get(ao)
            .ok_or_else(|| CircuitError::Compose(format!("no output {ao} on the first circuit")))?;
        let slot = bind
            .get_mut(bi)
            .ok_or_else(|| CircuitError::Compose(format!("no input {bi} on the second circuit")))?;
        if slot.is_some() {
            return Err(CircuitError::Compose(format!("input {bi} wired twice")));
        }
        *slot = Some(Bind::To(src));
    }
    for &bi in zeros {
        match bind.get_mut(bi) {
            Some(slot @ None) => *slot = Some(Bind::Zero),
            Some(Some(_)) => return Err(CircuitError::Compose(format!("input {bi} wired twice"))),
            None => return Err(CircuitError::Compose(format!("no input {bi} on the second circuit"))),
        }
    }
    let bind: Vec<Bind> = bind
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| CircuitError::Compose(format!("input {i} of the second circuit is dangling"))))
        .collect::<Result<_, _>>()?;

    let mut net = a.net.clone();
    for &o in &a.net.output_ports {
        let n = net.neuron_mut(o);
        if matches!(n.kind, NeuronKind::Readout) {
            n.kind = NeuronKind::Regular;
        }
    }
    net.output_ports.clear();
    let map = splice(&mut net, &b.net, &bind);
    net.output_ports = b.outputs().iter().map(|o| map[o.index()]).collect();
    let ports = PortMap {
        inputs: a.ports.inputs.clone(),
        outputs: b.ports.outputs.clone(),
    };
    Ok(Circuit::new(
        net,
        a.latency + b.latency,
        a.initiation_interval.max(b.initiation_interval),
        a.scale.max(b.scale),
        ports,
    ))
}

/// A layer of `n` relays, input `i` to output `i`; latency 1.
pub fn relay_layer(n: usize) -> Circuit {
    let mut net = Network::new();
    let ins: Vec<NeuronId> = (0..n).map(|_| net.add_input()).collect();
    for &i in &ins {
        let r = net.add_neuron(NeuronSpec::relay());
        net.connect(i, r, 0, 1);
        net.output_ports.push(r);
    }
    Circuit::new(
        net,
        1,
        1,
        1,
        PortMap {
            inputs: super::indexed("in", n),
            outputs: super::indexed("out", n),
        },
    )
}
