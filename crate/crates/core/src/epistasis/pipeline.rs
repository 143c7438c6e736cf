//! Synthesis, simulation and decoding of the detection network for one
//! class of samples.
//!
//! Every `(SNP, sample)` pair owns a stack neuron holding the one-hot code of
//! the genotype. For each SNP tuple a block of `3^k` timesteps enumerates the
//! genotype combinations, first SNP slowest. Tuple member `ρ` is replayed
//! from its stack, gated onto the role-`ρ` bus of the sample, and stretched
//! by an expander of factor `3^(k-1-ρ)`. An AND of the `k` role signals marks
//! the sample's genotype combination, and a restricted population counter
//! sums the AND outputs over the samples. The count of genotype combination
//! `e` of tuple `b` appears on the readout at `fill + 3^k·b + e`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::circuit::{
    build_expander, build_popc_restricted, split_long_delays, splice, stack_neuron, stack_weight,
    Bind, CircuitError,
};
use crate::snn::{
    run_observed, validate, HardwareProfile, Injections, Network, NeuronId, NeuronKind,
    NeuronSpec, Schedule, SimError,
};

use super::dataset::{binarize, ClassHalf, DatasetError, GenotypeDataset};
use super::table::{snp_tuples, ContingencyTable};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EpistasisError {
    #[error("interaction order must be 2 or 3, got {0}")]
    Order(usize),
    #[error("need at least {needed} SNPs for order {order}, dataset has {snps}")]
    TooFewSnps { order: usize, needed: usize, snps: usize },
    #[error("profile infeasible for the pipeline: {0}")]
    Infeasible(String),
    #[error("trigger conflict on SNP {snp} at t = {t}")]
    Schedule { snp: usize, t: u64 },
    #[error("readout bit {bit} fired at t = {t}, outside the readout window")]
    Integrity { bit: usize, t: u64 },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Timetable of one synthesized network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineSchedule {
    pub order: usize,
    pub tuples: Vec<Vec<usize>>,
    /// `3^k` timesteps per tuple.
    pub block: u64,
    /// Time of the first readout.
    pub fill: u64,
    /// Simulation length covering every readout.
    pub horizon: u64,
    /// Readout width in bits, LSB first.
    pub width: usize,
    /// `triggers[b][ρ]`: stack trigger time of tuple `b`'s role-`ρ` SNP
    /// for each use of it within the block.
    pub triggers: Vec<Vec<Vec<u64>>>,
}

impl PipelineSchedule {
    pub fn readout_time(&self, tuple: usize, genotype: usize) -> u64 {
        self.fill + self.block * tuple as u64 + genotype as u64
    }

    pub fn window(&self) -> std::ops::Range<u64> {
        self.fill..self.fill + self.block * self.tuples.len() as u64
    }
}

/// A synthesized network for one shard of one class.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub net: Network,
    pub schedule: PipelineSchedule,
    /// Readout neurons, LSB first.
    pub readouts: Vec<NeuronId>,
    /// Per-sample coincidence neurons; the one for genotype entry `e` of
    /// tuple `b` fires at `fill - popc_latency + 3^k·b + e`.
    pub and_layer: Vec<NeuronId>,
    pub class: u8,
    pub samples: usize,
    pub popc_latency: u64,
}

/// Size and activity of one simulated network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunSummary {
    pub class: u8,
    pub shard: usize,
    pub samples: usize,
    pub neurons: usize,
    pub synapses: usize,
    pub max_in_degree: usize,
    pub max_out_degree: usize,
    pub max_delay: u32,
    pub spikes: u64,
    pub timesteps: u64,
    pub fill: u64,
    pub popc_latency: u64,
    pub max_abs_current: i128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub order: usize,
    pub tables: Vec<ContingencyTable>,
    pub runs: Vec<RunSummary>,
}

impl Detection {
    pub fn total_spikes(&self) -> u64 {
        self.runs.iter().map(|r| r.spikes).sum()
    }

    pub fn total_neurons(&self) -> usize {
        self.runs.iter().map(|r| r.neurons).sum()
    }

    pub fn total_synapses(&self) -> usize {
        self.runs.iter().map(|r| r.synapses).sum()
    }

    /// Longest simulation; the networks run side by side.
    pub fn timesteps(&self) -> u64 {
        self.runs.iter().map(|r| r.timesteps).max().unwrap_or(0)
    }

    pub fn fill(&self) -> u64 {
        self.runs.iter().map(|r| r.fill).max().unwrap_or(0)
    }
}

/// Tree arity of the population counter.
const POPC_ARITY: usize = 2;

/// Relay tree giving each of `n` targets a source at uniform depth below
/// `root`, with at most `f` targets per neuron.
fn fanout(net: &mut Network, root: NeuronId, n: usize, f: usize) -> (Vec<NeuronId>, u64) {
    if n <= f {
        return (vec![root; n], 0);
    }
    let leaves: Vec<NeuronId> = (0..n.div_ceil(f)).map(|_| net.add_neuron(NeuronSpec::relay())).collect();
    let mut level = leaves.clone();
    let mut depth = 1;
    while level.len() > f {
        let mut parents = Vec::with_capacity(level.len().div_ceil(f));
        for chunk in level.chunks(f) {
            let p = net.add_neuron(NeuronSpec::relay());
            for &c in chunk {
                net.connect(p, c, 0, 1);
            }
            parents.push(p);
        }
        level = parents;
        depth += 1;
    }
    for &c in &level {
        net.connect(root, c, 0, 1);
    }
    ((0..n).map(|i| leaves[i / f]).collect(), depth)
}

/// OR tree of depth at least one over `inputs`, fan-in at most `f`.
fn or_tree(net: &mut Network, inputs: Vec<NeuronId>, f: usize) -> (NeuronId, u64) {
    let mut level = inputs;
    let mut depth = 0;
    loop {
        let mut next = Vec::with_capacity(level.len().div_ceil(f));
        for chunk in level.chunks(f) {
            let o = net.add_neuron(NeuronSpec::relay());
            for &c in chunk {
                net.connect(c, o, 0, 1);
            }
            next.push(o);
        }
        level = next;
        depth += 1;
        if level.len() == 1 {
            return (level[0], depth);
        }
    }
}

fn set_schedule(net: &mut Network, id: NeuronId, times: impl IntoIterator<Item = i64>, shift: i64) {
    let mut s = Schedule::new();
    for t in times {
        s.insert((t + shift) as u64);
    }
    net.neuron_mut(id).kind = NeuronKind::Programmed(s);
}

fn check_order(order: usize, snps: usize) -> Result<(), EpistasisError> {
    if !(2..=3).contains(&order) {
        return Err(EpistasisError::Order(order));
    }
    if snps < order {
        return Err(EpistasisError::TooFewSnps {
            order,
            needed: order,
            snps,
        });
    }
    Ok(())
}

/// Builds the network for one shard of samples. The shard must hold at least
/// one sample and no more than the counter capacity.
pub fn synthesize_half(
    half: &ClassHalf,
    order: usize,
    profile: &HardwareProfile,
) -> Result<Synthesis, EpistasisError> {
    let k = order;
    let n_snps = half.snps();
    check_order(k, n_snps)?;
    let m = half.len();
    if m == 0 {
        return Err(EpistasisError::Infeasible("empty shard".into()));
    }
    if profile.f_out < k + 1 || profile.f_in < k.max(2) || profile.s_pr < 5 {
        return Err(EpistasisError::Infeasible(format!(
            "order {k} needs F_out >= {}, F_in >= {} and S_pr >= 5",
            k + 1,
            k.max(2)
        )));
    }
    let popc = build_popc_restricted(m.max(2), profile, POPC_ARITY)?;
    let factors: Vec<usize> = (0..k).map(|r| 3usize.pow((k - 1 - r) as u32)).collect();
    let expanders = factors
        .iter()
        .map(|&f| if f > 1 { build_expander(3, f, profile).map(Some) } else { Ok(None) })
        .collect::<Result<Vec<_>, _>>()?;

    let mut net = Network::new();
    let fo = profile.f_out;
    let eligible = |a: usize, r: usize| r <= a && a + k <= n_snps + r;

    // Stacks and their triggers.
    let mut triggers = Vec::with_capacity(n_snps);
    let mut stacks = vec![Vec::with_capacity(m); n_snps];
    let mut h_t = 0;
    for (a, row) in stacks.iter_mut().enumerate() {
        let trig = net.add_neuron(NeuronSpec::programmed(Schedule::new()));
        let (src, h) = fanout(&mut net, trig, m, fo);
        h_t = h;
        for (s, &leaf) in src.iter().enumerate() {
            let p = net.add_neuron(stack_neuron(profile.s_pr));
            net.connect(leaf, p, 0, stack_weight(&half.patterns[a][s], profile.s_pr));
            net.connect(p, p, 0, -(1i64 << (profile.s_pr - 1)));
            row.push(p);
        }
        triggers.push(trig);
    }

    // Role gates and buses.
    let mut enables = vec![vec![None; k]; n_snps];
    let mut gates: Vec<Vec<Vec<NeuronId>>> = vec![vec![Vec::new(); k]; m];
    let mut h_e = 0;
    for a in 0..n_snps {
        for r in 0..k {
            if !eligible(a, r) {
                continue;
            }
            let en = net.add_neuron(NeuronSpec::programmed(Schedule::new()));
            let (src, h) = fanout(&mut net, en, m, fo);
            h_e = h;
            for (s, &leaf) in src.iter().enumerate() {
                let g = net.add_neuron(NeuronSpec::gate(1));
                net.connect(stacks[a][s], g, 0, 1);
                net.connect(leaf, g, 0, 1);
                gates[s][r].push(g);
            }
            enables[a][r] = Some(en);
        }
    }
    let fan_in = profile.f_in.max(2);
    let mut h_b = 0;
    let buses: Vec<Vec<NeuronId>> = gates
        .into_iter()
        .map(|per_role| {
            per_role
                .into_iter()
                .map(|g| {
                    let (root, h) = or_tree(&mut net, g, fan_in);
                    h_b = h;
                    root
                })
                .collect()
        })
        .collect();

    // Expanders with per-sample sync relays.
    let mut syncs = vec![None; k];
    let mut h_s = 0;
    let mut role_out: Vec<Vec<NeuronId>> = buses.clone();
    for (r, exp) in expanders.iter().enumerate() {
        let Some(exp) = exp else { continue };
        let ctrl = net.add_neuron(NeuronSpec::programmed(Schedule::new()));
        let (src, h) = fanout(&mut net, ctrl, m, fo);
        h_s = h + 1;
        for (s, &leaf) in src.iter().enumerate() {
            let y = net.add_neuron(NeuronSpec::relay());
            net.connect(leaf, y, 0, 1);
            let map = splice(&mut net, &exp.net, &[Bind::To(buses[s][r]), Bind::To(y)]);
            role_out[s][r] = map[exp.outputs()[0].index()];
        }
        syncs[r] = Some(ctrl);
    }

    // Alignment: role signal starts D_ρ after its trigger; pads make every
    // D_ρ + pad_ρ congruent mod 3 so triggers of one SNP never overlap.
    let deltas: Vec<i64> = expanders
        .iter()
        .map(|e| e.as_ref().map_or(0, |c| c.latency as i64))
        .collect();
    let d: Vec<i64> = deltas.iter().map(|&dl| (h_t + h_b + 2) as i64 + dl).collect();
    let residue = d.iter().max().unwrap().rem_euclid(3);
    let pads: Vec<i64> = d.iter().map(|&x| (residue - x).rem_euclid(3)).collect();

    // Coincidence per sample feeding the counter.
    let ands: Vec<NeuronId> = (0..m)
        .map(|s| {
            let g = net.add_neuron(NeuronSpec::gate(k as i64 - 1));
            for r in 0..k {
                net.connect(role_out[s][r], g, pads[r] as u32, 1);
            }
            g
        })
        .collect();
    let mut bind: Vec<Bind> = ands.iter().map(|&g| Bind::To(g)).collect();
    if m == 1 {
        bind.push(Bind::Zero);
    }
    let map = splice(&mut net, &popc.net, &bind);
    let readouts: Vec<NeuronId> = popc.outputs().iter().map(|o| map[o.index()]).collect();
    for &o in &readouts {
        net.neuron_mut(o).kind = NeuronKind::Readout;
    }
    net.output_ports = readouts.clone();

    // Timetable with a0 = 0, shifted afterwards so every time is >= 0.
    let tuples = snp_tuples(n_snps, k);
    let block = 3i64.pow(k as u32);
    let mut trig_times: Vec<BTreeSet<i64>> = vec![BTreeSet::new(); n_snps];
    let mut en_times: Vec<Vec<Vec<i64>>> = vec![vec![Vec::new(); k]; n_snps];
    let mut sync_times: Vec<Vec<i64>> = vec![Vec::new(); k];
    let mut per_tuple = Vec::with_capacity(tuples.len());
    for (b, tuple) in tuples.iter().enumerate() {
        let mut roles = Vec::with_capacity(k);
        for (r, &a) in tuple.iter().enumerate() {
            let f = factors[r] as i64;
            let mut uses = Vec::new();
            for j in 0..block / (3 * f) {
                let start = block * b as i64 + j * 3 * f - pads[r];
                let t = start - d[r];
                trig_times[a].insert(t);
                for i in 1..=3 {
                    en_times[a][r].push(t + h_t as i64 + i - h_e as i64);
                }
                if syncs[r].is_some() {
                    sync_times[r].push(t + (h_t + h_b + 2) as i64 - h_s as i64);
                }
                uses.push(t);
            }
            roles.push(uses);
        }
        per_tuple.push(roles);
    }
    let min_time = trig_times
        .iter()
        .flatten()
        .chain(en_times.iter().flatten().flatten())
        .chain(sync_times.iter().flatten())
        .copied()
        .min()
        .unwrap_or(0);
    let shift = (-min_time).max(0);
    for (a, times) in trig_times.iter().enumerate() {
        let v: Vec<i64> = times.iter().copied().collect();
        if let Some(w) = v.windows(2).find(|w| w[1] - w[0] < 3) {
            return Err(EpistasisError::Schedule {
                snp: a,
                t: (w[1] + shift) as u64,
            });
        }
        set_schedule(&mut net, triggers[a], v, shift);
        for r in 0..k {
            if let Some(en) = enables[a][r] {
                set_schedule(&mut net, en, en_times[a][r].iter().copied(), shift);
            }
        }
    }
    for r in 0..k {
        if let Some(ctrl) = syncs[r] {
            set_schedule(&mut net, ctrl, sync_times[r].iter().copied(), shift);
        }
    }

    split_long_delays(&mut net, profile.m_delay);
    let report = validate(&net, profile);
    if !report.is_empty() {
        return Err(EpistasisError::Infeasible(report.violations[0].to_string()));
    }

    let fill = shift as u64 + 1 + popc.latency;
    let block = block as u64;
    let schedule = PipelineSchedule {
        order: k,
        block,
        fill,
        horizon: fill + block * tuples.len() as u64,
        width: readouts.len(),
        triggers: per_tuple
            .into_iter()
            .map(|roles| {
                roles
                    .into_iter()
                    .map(|u| u.into_iter().map(|t| (t + shift) as u64).collect())
                    .collect()
            })
            .collect(),
        tuples,
    };
    Ok(Synthesis {
        net,
        schedule,
        readouts,
        and_layer: ands,
        class: half.class,
        samples: m,
        popc_latency: popc.latency,
    })
}

/// Splits each class into shards within the counter capacity and builds one
/// network per shard. Empty classes produce no network.
pub fn synthesize(
    split: &super::BinarizedSplit,
    order: usize,
    profile: &HardwareProfile,
) -> Result<Vec<Synthesis>, EpistasisError> {
    let cap = profile.popc_capacity().max(1);
    let mut out = Vec::new();
    for half in [&split.controls, &split.cases] {
        let m = half.len();
        if m == 0 {
            continue;
        }
        let shards = m.div_ceil(cap);
        let base = m / shards;
        let extra = m % shards;
        let mut start = 0;
        for i in 0..shards {
            let len = base + usize::from(i < extra);
            out.push(synthesize_half(&half.slice(start..start + len), order, profile)?);
            start += len;
        }
    }
    Ok(out)
}

/// Decodes per-bit readout spike times into `counts[tuple][genotype]`.
/// A spike outside the readout window is an integrity error.
pub fn decode_readout(spikes: &[Vec<u64>], schedule: &PipelineSchedule) -> Result<Vec<Vec<u64>>, EpistasisError> {
    let window = schedule.window();
    let mut counts = vec![vec![0u64; schedule.block as usize]; schedule.tuples.len()];
    for (bit, times) in spikes.iter().enumerate() {
        for &t in times {
            if !window.contains(&t) {
                return Err(EpistasisError::Integrity { bit, t });
            }
            let off = t - schedule.fill;
            let (b, e) = ((off / schedule.block) as usize, (off % schedule.block) as usize);
            counts[b][e] += 1u64 << bit;
        }
    }
    Ok(counts)
}

/// Runs a synthesized network and returns decoded counts and its summary.
pub fn simulate(syn: &Synthesis, shard: usize) -> Result<(Vec<Vec<u64>>, RunSummary), EpistasisError> {
    let mut index = vec![usize::MAX; syn.net.len()];
    for (bit, &o) in syn.readouts.iter().enumerate() {
        index[o.index()] = bit;
    }
    let mut spikes = vec![Vec::new(); syn.readouts.len()];
    let metrics = run_observed(&syn.net, syn.schedule.horizon, &Injections::new(), |t, now| {
        for &id in now {
            let bit = index[id.index()];
            if bit != usize::MAX {
                spikes[bit].push(t);
            }
        }
    })?;
    let counts = decode_readout(&spikes, &syn.schedule)?;
    let summary = RunSummary {
        class: syn.class,
        shard,
        samples: syn.samples,
        neurons: syn.net.len(),
        synapses: syn.net.synapses.len(),
        max_in_degree: metrics.max_in_degree,
        max_out_degree: metrics.max_out_degree,
        max_delay: metrics.max_delay,
        spikes: metrics.total_spikes,
        timesteps: metrics.timesteps,
        fill: syn.schedule.fill,
        popc_latency: syn.popc_latency,
        max_abs_current: metrics.max_abs_current,
    };
    Ok((counts, summary))
}

/// Full detection: binarize, synthesize per class shard, simulate the shards
/// in parallel and merge the decoded counts into one table per SNP tuple.
pub fn run_detection(
    ds: &GenotypeDataset,
    order: usize,
    profile: &HardwareProfile,
) -> Result<Detection, EpistasisError> {
    check_order(order, ds.snps())?;
    let split = binarize(ds);
    let syns = synthesize(&split, order, profile)?;
    let results: Vec<Result<_, EpistasisError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = syns
            .iter()
            .enumerate()
            .map(|(i, syn)| scope.spawn(move || simulate(syn, i)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    });
    let mut tables: Vec<ContingencyTable> = snp_tuples(ds.snps(), order)
        .into_iter()
        .map(ContingencyTable::zeros)
        .collect();
    let mut runs = Vec::with_capacity(results.len());
    for (syn, res) in syns.iter().zip(results) {
        let (counts, mut summary) = res?;
        summary.shard = runs.iter().filter(|r: &&RunSummary| r.class == syn.class).count();
        for (table, row) in tables.iter_mut().zip(&counts) {
            for (cell, &c) in table.cells.iter_mut().zip(row) {
                if syn.class == 1 {
                    cell.0 += c;
                } else {
                    cell.1 += c;
                }
            }
        }
        runs.push(summary);
    }
    Ok(Detection {
        order,
        tables,
        runs,
    })
}
