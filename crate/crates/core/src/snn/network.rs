//! Labeled digraph of neurons and synapses with ordered input/output ports.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NeuronId(pub u32);

impl NeuronId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NeuronId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// What happens to a neuron's current after it spikes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResetMode {
    /// Current is cleared to 0 after a spike.
    Zero,
    /// Current is left as computed; only stack neurons use this.
    Hold,
}

/// Explicit firing times of a programmed neuron.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Schedule(BTreeSet<u64>);

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fires(&self, t: u64) -> bool {
        self.0.contains(&t)
    }

    pub fn insert(&mut self, t: u64) {
        self.0.insert(t);
    }

    pub fn times(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<u64> for Schedule {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        Schedule(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NeuronKind {
    Regular,
    /// Spikes come only from the schedule; membrane dynamics are ignored.
    Programmed(Schedule),
    /// Regular dynamics, but its spikes are externally observable.
    Readout,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NeuronSpec {
    pub threshold: i64,
    pub leak: u32,
    pub bias: i64,
    pub reset: ResetMode,
    pub kind: NeuronKind,
}

impl NeuronSpec {
    /// Memoryless threshold gate: leak 0, bias 0, reset to zero.
    pub fn gate(threshold: i64) -> Self {
        NeuronSpec {
            threshold,
            leak: 0,
            bias: 0,
            reset: ResetMode::Zero,
            kind: NeuronKind::Regular,
        }
    }

    /// Threshold-0 unit that forwards every incoming positive spike.
    pub fn relay() -> Self {
        Self::gate(0)
    }

    pub fn programmed(schedule: Schedule) -> Self {
        NeuronSpec {
            threshold: 0,
            leak: 0,
            bias: 0,
            reset: ResetMode::Zero,
            kind: NeuronKind::Programmed(schedule),
        }
    }

    /// Externally driven port; an input neuron is a programmed neuron with an
    /// empty schedule that the harness injects spikes into.
    pub fn input() -> Self {
        Self::programmed(Schedule::new())
    }

    pub fn with_bias(mut self, bias: i64) -> Self {
        self.bias = bias;
        self
    }

    pub fn with_leak(mut self, leak: u32) -> Self {
        self.leak = leak;
        self
    }

    pub fn with_reset(mut self, reset: ResetMode) -> Self {
        self.reset = reset;
        self
    }

    pub fn readout(mut self) -> Self {
        if matches!(self.kind, NeuronKind::Regular) {
            self.kind = NeuronKind::Readout;
        }
        self
    }

    pub fn is_programmed(&self) -> bool {
        matches!(self.kind, NeuronKind::Programmed(_))
    }

    /// Programmed neuron that never fires.
    pub fn is_constant_zero(&self) -> bool {
        matches!(&self.kind, NeuronKind::Programmed(s) if s.is_empty())
    }

    pub fn schedule(&self) -> Option<&Schedule> {
        match &self.kind {
            NeuronKind::Programmed(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SynapseSpec {
    pub pre: NeuronId,
    pub post: NeuronId,
    pub delay: u32,
    pub weight: i64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("synapse {index} references unknown neuron {id}")]
    DanglingSynapse { index: usize, id: NeuronId },
    #[error("port references unknown neuron {0}")]
    UnknownPort(NeuronId),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Network {
    pub neurons: Vec<NeuronSpec>,
    pub synapses: Vec<SynapseSpec>,
    pub input_ports: Vec<NeuronId>,
    pub output_ports: Vec<NeuronId>,
}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_neuron(&mut self, spec: NeuronSpec) -> NeuronId {
        let id = NeuronId(self.neurons.len() as u32);
        self.neurons.push(spec);
        id
    }

    /// Adds an input-port neuron and registers it as the next input port.
    pub fn add_input(&mut self) -> NeuronId {
        let id = self.add_neuron(NeuronSpec::input());
        self.input_ports.push(id);
        id
    }

    pub fn connect(&mut self, pre: NeuronId, post: NeuronId, delay: u32, weight: i64) {
        self.synapses.push(SynapseSpec {
            pre,
            post,
            delay,
            weight,
        });
    }

    pub fn len(&self) -> usize {
        self.neurons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neurons.is_empty()
    }

    pub fn neuron(&self, id: NeuronId) -> &NeuronSpec {
        &self.neurons[id.index()]
    }

    pub fn neuron_mut(&mut self, id: NeuronId) -> &mut NeuronSpec {
        &mut self.neurons[id.index()]
    }

    pub fn ids(&self) -> impl Iterator<Item = NeuronId> {
        (0..self.neurons.len() as u32).map(NeuronId)
    }

    pub fn check(&self) -> Result<(), NetworkError> {
        let n = self.neurons.len();
        for (index, s) in self.synapses.iter().enumerate() {
            for id in [s.pre, s.post] {
                if id.index() >= n {
                    return Err(NetworkError::DanglingSynapse { index, id });
                }
            }
        }
        for &p in self.input_ports.iter().chain(&self.output_ports) {
            if p.index() >= n {
                return Err(NetworkError::UnknownPort(p));
            }
        }
        Ok(())
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.neurons.len()];
        for s in &self.synapses {
            deg[s.post.index()] += 1;
        }
        deg
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.neurons.len()];
        for s in &self.synapses {
            deg[s.pre.index()] += 1;
        }
        deg
    }

    pub fn max_delay(&self) -> u32 {
        self.synapses.iter().map(|s| s.delay).max().unwrap_or(0)
    }

    /// Per-neuron lists of synapse indices, keyed by presynaptic neuron.
    pub fn outgoing(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.neurons.len()];
        for (i, s) in self.synapses.iter().enumerate() {
            adj[s.pre.index()].push(i);
        }
        adj
    }

    /// Per-neuron lists of synapse indices, keyed by postsynaptic neuron.
    pub fn incoming(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.neurons.len()];
        for (i, s) in self.synapses.iter().enumerate() {
            adj[s.post.index()].push(i);
        }
        adj
    }

    pub fn readouts(&self) -> impl Iterator<Item = NeuronId> + '_ {
        self.ids()
            .filter(|&id| matches!(self.neuron(id).kind, NeuronKind::Readout))
    }
}
