//! Exact synchronous simulation of the discrete-time spiking model.
//!
//! For every regular neuron `j` the update is
//!
//! ```text
//! u_j(t+1) = m_j * u_j(t) + b_j + sum_k w_kj * x_k(t - d_kj)
//! ```
//!
//! and `j` spikes at `t+1` iff `u_j(t+1) > T_j`. A spike emitted at `t` over a
//! synapse of delay `d` therefore lands in `u(t+d+1)`; there is no same-step
//! propagation. Currents accumulate in `i128` with checked arithmetic.

use std::collections::BTreeMap;

use thiserror::Error;

use super::network::{Network, NetworkError, NeuronId, NeuronKind, ResetMode};
use super::profile::HardwareProfile;

/// Extra spikes forced at given timesteps, keyed by timestep.
pub type Injections = BTreeMap<u64, Vec<NeuronId>>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("current of neuron {neuron} overflowed at timestep {t}")]
    Overflow { neuron: NeuronId, t: u64 },
    #[error("unknown neuron {neuron} injected at timestep {t}")]
    UnknownNeuron { neuron: NeuronId, t: u64 },
    #[error("horizon must be at least one timestep")]
    EmptyHorizon,
    #[error(transparent)]
    Network(#[from] NetworkError),
}

struct Slot {
    acc: Vec<i128>,
    seen: Vec<bool>,
    touched: Vec<u32>,
}

impl Slot {
    fn new(n: usize) -> Self {
        Slot {
            acc: vec![0; n],
            seen: vec![false; n],
            touched: Vec::new(),
        }
    }
}

/// Dynamic state between steps.
pub struct SimState {
    pub t: u64,
    currents: Vec<i128>,
    slots: Vec<Slot>,
    firing: Vec<NeuronId>,
}

pub struct Simulator<'n> {
    net: &'n Network,
    out: Vec<Vec<(u32, u32, i64)>>,
    programmed: BTreeMap<u64, Vec<NeuronId>>,
    dynamic: Vec<bool>,
    always: Vec<u32>,
    live: Vec<u32>,
    stamp: Vec<u64>,
    epoch: u64,
    max_abs: i128,
    state: SimState,
}

impl<'n> Simulator<'n> {
    pub fn new(net: &'n Network) -> Result<Self, SimError> {
        Self::with_currents(net, &[])
    }

    /// Starts at `t = 0` with the given currents (all others 0). Regular
    /// neurons whose initial current exceeds their threshold fire at `t = 0`.
    pub fn with_currents(net: &'n Network, init: &[(NeuronId, i128)]) -> Result<Self, SimError> {
        net.check()?;
        let n = net.len();
        let mut out = vec![Vec::new(); n];
        for s in &net.synapses {
            out[s.pre.index()].push((s.post.0, s.delay, s.weight));
        }
        let mut programmed: BTreeMap<u64, Vec<NeuronId>> = BTreeMap::new();
        let mut dynamic = vec![false; n];
        let mut always = Vec::new();
        for id in net.ids() {
            let spec = net.neuron(id);
            match &spec.kind {
                NeuronKind::Programmed(s) => {
                    for t in s.times() {
                        programmed.entry(t).or_default().push(id);
                    }
                }
                NeuronKind::Regular | NeuronKind::Readout => {
                    dynamic[id.index()] = true;
                    if spec.bias != 0 || spec.threshold < 0 {
                        always.push(id.0);
                    }
                }
            }
        }
        let ring = net.max_delay() as usize + 2;
        let mut currents = vec![0i128; n];
        let mut max_abs = 0i128;
        let mut live = Vec::new();
        for &(id, u) in init {
            if id.index() >= n {
                return Err(SimError::UnknownNeuron { neuron: id, t: 0 });
            }
            currents[id.index()] = u;
            max_abs = max_abs.max(u.abs());
        }
        let mut firing: Vec<NeuronId> = programmed.get(&0).cloned().unwrap_or_default();
        for id in net.ids() {
            let u = currents[id.index()];
            if !dynamic[id.index()] {
                continue;
            }
            if u > net.neuron(id).threshold as i128 {
                firing.push(id);
                if net.neuron(id).reset == ResetMode::Zero {
                    currents[id.index()] = 0;
                }
            }
            if currents[id.index()] != 0 {
                live.push(id.0);
            }
        }
        firing.sort_unstable();
        firing.dedup();
        Ok(Simulator {
            net,
            out,
            programmed,
            dynamic,
            always,
            live,
            stamp: vec![0; n],
            epoch: 0,
            max_abs,
            state: SimState {
                t: 0,
                currents,
                slots: (0..ring).map(|_| Slot::new(n)).collect(),
                firing,
            },
        })
    }

    pub fn t(&self) -> u64 {
        self.state.t
    }

    pub fn current(&self, id: NeuronId) -> i128 {
        self.state.currents[id.index()]
    }

    /// Spikes at the current timestep, including merged injections.
    pub fn firing(&self) -> &[NeuronId] {
        &self.state.firing
    }

    pub fn max_abs_current(&self) -> i128 {
        self.max_abs
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    /// Adds externally forced spikes at the current timestep.
    pub fn inject(&mut self, ids: &[NeuronId]) -> Result<(), SimError> {
        if ids.is_empty() {
            return Ok(());
        }
        for &id in ids {
            if id.index() >= self.net.len() {
                return Err(SimError::UnknownNeuron {
                    neuron: id,
                    t: self.state.t,
                });
            }
        }
        self.state.firing.extend_from_slice(ids);
        self.state.firing.sort_unstable();
        self.state.firing.dedup();
        Ok(())
    }

    /// Delivers the spikes of timestep `t` and computes timestep `t+1`.
    /// Returns the spikes at `t+1`.
    pub fn advance(&mut self) -> Result<&[NeuronId], SimError> {
        let t = self.state.t;
        let next = t + 1;
        let ring = self.state.slots.len() as u64;
        let overflow = |neuron: NeuronId| SimError::Overflow { neuron, t: next };

        for &src in &self.state.firing {
            for &(post, delay, w) in &self.out[src.index()] {
                let slot = &mut self.state.slots[((t + delay as u64 + 1) % ring) as usize];
                let p = post as usize;
                slot.acc[p] = slot.acc[p]
                    .checked_add(w as i128)
                    .ok_or_else(|| overflow(NeuronId(post)))?;
                if !slot.seen[p] {
                    slot.seen[p] = true;
                    slot.touched.push(post);
                }
            }
        }

        self.epoch += 1;
        let epoch = self.epoch;
        let slot_idx = (next % ring) as usize;
        let mut firing = self.programmed.get(&next).cloned().unwrap_or_default();
        let mut live = Vec::with_capacity(self.live.len());

        let candidates = self.state.slots[slot_idx]
            .touched
            .iter()
            .chain(&self.live)
            .chain(&self.always)
            .copied()
            .collect::<Vec<u32>>();
        for j in candidates {
            let ji = j as usize;
            if self.stamp[ji] == epoch || !self.dynamic[ji] {
                continue;
            }
            self.stamp[ji] = epoch;
            let spec = &self.net.neurons[ji];
            let input = self.state.slots[slot_idx].acc[ji];
            let id = NeuronId(j);
            let u = (spec.leak as i128)
                .checked_mul(self.state.currents[ji])
                .and_then(|v| v.checked_add(spec.bias as i128))
                .and_then(|v| v.checked_add(input))
                .ok_or_else(|| overflow(id))?;
            self.max_abs = self.max_abs.max(u.checked_abs().ok_or_else(|| overflow(id))?);
            let spikes = u > spec.threshold as i128;
            let stored = if spikes && spec.reset == ResetMode::Zero {
                0
            } else {
                u
            };
            self.state.currents[ji] = stored;
            if stored != 0 {
                live.push(j);
            }
            if spikes {
                firing.push(id);
            }
        }

        let slot = &mut self.state.slots[slot_idx];
        for &p in &slot.touched {
            slot.acc[p as usize] = 0;
            slot.seen[p as usize] = false;
        }
        slot.touched.clear();

        firing.sort_unstable();
        firing.dedup();
        self.live = live;
        self.state.firing = firing;
        self.state.t = next;
        Ok(&self.state.firing)
    }

    /// One synchronous update: `injected` spike at the current timestep
    /// alongside the network's own spikes; returns the spikes at `t+1`.
    pub fn step(&mut self, injected: &[NeuronId]) -> Result<Vec<NeuronId>, SimError> {
        self.inject(injected)?;
        self.advance().map(|s| s.to_vec())
    }
}

/// Spike times of every neuron, indexed by neuron.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpikeTrace {
    pub spikes: Vec<Vec<u64>>,
}

impl SpikeTrace {
    pub fn of(&self, id: NeuronId) -> &[u64] {
        &self.spikes[id.index()]
    }

    pub fn fired(&self, id: NeuronId, t: u64) -> bool {
        self.spikes[id.index()].binary_search(&t).is_ok()
    }

    pub fn total(&self) -> u64 {
        self.spikes.iter().map(|s| s.len() as u64).sum()
    }

    /// Spike times of readout neurons only.
    pub fn readout<'a>(&'a self, net: &'a Network) -> impl Iterator<Item = (NeuronId, &'a [u64])> {
        net.readouts().map(move |id| (id, self.of(id)))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunMetrics {
    pub timesteps: u64,
    pub total_spikes: u64,
    pub per_neuron: Vec<u64>,
    pub max_abs_current: i128,
    pub max_in_degree: usize,
    pub max_out_degree: usize,
    pub max_delay: u32,
}

/// Runs `horizon` timesteps (`t = 0 .. horizon-1`) and calls `observe` with
/// the spike set of every timestep.
pub fn run_observed<F>(
    net: &Network,
    horizon: u64,
    injections: &Injections,
    mut observe: F,
) -> Result<RunMetrics, SimError>
where
    F: FnMut(u64, &[NeuronId]),
{
    if horizon == 0 {
        return Err(SimError::EmptyHorizon);
    }
    let mut sim = Simulator::new(net)?;
    let mut per_neuron = vec![0u64; net.len()];
    let mut total = 0u64;
    for t in 0..horizon {
        if let Some(ids) = injections.get(&t) {
            sim.inject(ids)?;
        }
        let now = sim.firing();
        for &id in now {
            per_neuron[id.index()] += 1;
        }
        total += now.len() as u64;
        observe(t, now);
        if t + 1 < horizon {
            sim.advance()?;
        }
    }
    Ok(RunMetrics {
        timesteps: horizon,
        total_spikes: total,
        per_neuron,
        max_abs_current: sim.max_abs_current(),
        max_in_degree: net.in_degrees().into_iter().max().unwrap_or(0),
        max_out_degree: net.out_degrees().into_iter().max().unwrap_or(0),
        max_delay: net.max_delay(),
    })
}

pub fn run(
    net: &Network,
    horizon: u64,
    injections: &Injections,
) -> Result<(SpikeTrace, RunMetrics), SimError> {
    let mut spikes = vec![Vec::new(); net.len()];
    let metrics = run_observed(net, horizon, injections, |t, now| {
        for &id in now {
            spikes[id.index()].push(t);
        }
    })?;
    Ok((SpikeTrace { spikes }, metrics))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DynamicRange {
    pub max_abs: i128,
    /// Largest representable magnitude, `2^(N_pr-1) - 1`.
    pub limit: i128,
    pub pass: bool,
}

/// Compares the peak current magnitude of a run against the profile's signed
/// current range.
pub fn dynamic_range_check(metrics: &RunMetrics, profile: &HardwareProfile) -> DynamicRange {
    let limit = profile.current_bound() as i128 - 1;
    DynamicRange {
        max_abs: metrics.max_abs_current,
        limit,
        pass: metrics.max_abs_current <= limit,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snn::network::{NeuronSpec, Schedule};

    fn inj(pairs: &[(u64, &[NeuronId])]) -> Injections {
        pairs.iter().map(|(t, ids)| (*t, ids.to_vec())).collect()
    }

    #[test]
    fn and_neuron_fires_one_step_later() {
        let mut net = Network::new();
        let a = net.add_input();
        let b = net.add_input();
        let and = net.add_neuron(NeuronSpec::gate(1));
        net.connect(a, and, 0, 1);
        net.connect(b, and, 0, 1);
        let (trace, _) = run(&net, 4, &inj(&[(0, &[a, b]), (2, &[a])])).unwrap();
        assert_eq!(trace.of(and), &[1]);
    }

    #[test]
    fn idle_neuron_never_fires() {
        let mut net = Network::new();
        let n = net.add_neuron(NeuronSpec::gate(0));
        let (trace, m) = run(&net, 20, &Injections::new()).unwrap();
        assert!(trace.of(n).is_empty());
        assert_eq!(m.total_spikes, 0);
    }

    #[test]
    fn empty_network_runs() {
        let net = Network::new();
        let (trace, m) = run(&net, 10, &Injections::new()).unwrap();
        assert_eq!(trace.total(), 0);
        assert_eq!(m.timesteps, 10);
        assert_eq!(m.total_spikes, 0);
        assert_eq!(run(&net, 0, &Injections::new()).unwrap_err(), SimError::EmptyHorizon);
    }

    #[test]
    fn stack_neuron_shifts_out_top_bits() {
        // S_pr = 8: threshold 63, self-synapse -128, held current 0b1100000.
        let mut net = Network::new();
        let n = net.add_neuron(
            NeuronSpec::gate(63).with_leak(2).with_reset(ResetMode::Hold),
        );
        net.connect(n, n, 0, -128);
        let mut sim = Simulator::with_currents(&net, &[(n, 96)]).unwrap();
        assert_eq!(sim.firing(), &[n]);
        assert_eq!(sim.advance().unwrap(), &[n]);
        assert_eq!(sim.current(n), 64);
        assert!(sim.advance().unwrap().is_empty());
        assert_eq!(sim.current(n), 0);
        assert!(sim.advance().unwrap().is_empty());
    }

    #[test]
    fn delay_lands_after_delay_plus_one() {
        let mut net = Network::new();
        let a = net.add_input();
        let r = net.add_neuron(NeuronSpec::relay());
        net.connect(a, r, 3, 1);
        let (trace, _) = run(&net, 10, &inj(&[(2, &[a])])).unwrap();
        assert_eq!(trace.of(r), &[6]);
    }

    #[test]
    fn programmed_schedule_drives_spikes() {
        let mut net = Network::new();
        let p = net.add_neuron(NeuronSpec::programmed(Schedule::from_iter([0, 3])));
        let r = net.add_neuron(NeuronSpec::relay());
        net.connect(p, r, 0, 1);
        let (trace, m) = run(&net, 6, &Injections::new()).unwrap();
        assert_eq!(trace.of(p), &[0, 3]);
        assert_eq!(trace.of(r), &[1, 4]);
        assert_eq!(m.per_neuron, vec![2, 2]);
    }

    #[test]
    fn overflow_is_a_hard_failure() {
        let mut net = Network::new();
        let n = net.add_neuron(NeuronSpec::gate(i64::MAX).with_leak(2).with_reset(ResetMode::Hold));
        let err = {
            let mut sim = Simulator::with_currents(&net, &[(n, i128::MAX / 2 + 1)]).unwrap();
            sim.advance().unwrap_err()
        };
        assert_eq!(err, SimError::Overflow { neuron: n, t: 1 });
    }

    #[test]
    fn unknown_injection_rejected() {
        let mut net = Network::new();
        net.add_input();
        let err = run(&net, 3, &inj(&[(1, &[NeuronId(9)])])).unwrap_err();
        assert_eq!(
            err,
            SimError::UnknownNeuron {
                neuron: NeuronId(9),
                t: 1
            }
        );
    }

    #[test]
    fn strict_threshold_boundary() {
        // drive a neuron with bias so that u(t) = bias each step.
        for threshold in [-3i64, 0, 5] {
            for bias in threshold - 2..=threshold + 2 {
                let mut net = Network::new();
                let n = net.add_neuron(NeuronSpec::gate(threshold).with_bias(bias));
                let (trace, _) = run(&net, 3, &Injections::new()).unwrap();
                let fires = trace.fired(n, 1);
                assert_eq!(fires, bias > threshold, "T={threshold} u={bias}");
            }
        }
    }

    #[test]
    fn reset_modes_differ_on_second_drive() {
        // Two equal supra-threshold drives: a resetting neuron sees 3 twice,
        // a holding neuron carries m*u over and sees 3 then 6.
        for (reset, expect_peak, expect_held) in [(ResetMode::Zero, 3, [0, 0]), (ResetMode::Hold, 6, [3, 6])] {
            let mut net = Network::new();
            let a = net.add_input();
            let n = net.add_neuron(NeuronSpec::gate(1).with_leak(1).with_reset(reset));
            net.connect(a, n, 0, 3);
            let mut sim = Simulator::new(&net).unwrap();
            assert_eq!(sim.step(&[a]).unwrap(), vec![n]);
            let u1 = sim.current(n);
            assert_eq!(sim.step(&[a]).unwrap(), vec![n]);
            let u2 = sim.current(n);
            assert_eq!([u1, u2], expect_held);
            assert_eq!(sim.max_abs_current(), expect_peak);
        }
    }

    #[test]
    fn dynamic_range_against_profile() {
        let m = RunMetrics {
            max_abs_current: 63,
            ..Default::default()
        };
        let wide = HardwareProfile::new(8, 8, 1, 4, 4).unwrap();
        let narrow = HardwareProfile::new(6, 6, 1, 4, 4).unwrap();
        assert!(dynamic_range_check(&m, &wide).pass);
        assert!(!dynamic_range_check(&m, &narrow).pass);
    }
}
