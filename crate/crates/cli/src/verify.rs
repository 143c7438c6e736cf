//! Differential verification of the circuit builders against the reference
//! functions, with counterexample minimization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcepi::circuit::{
    bits_to_u64, stream, u64_to_bits, Circuit, CircuitError, ParityMode,
};
use tcepi::oracle::{parity_ref, popcount_ref, repeat_ref, replay_ref, sum_ref};
use tcepi::snn::{run, validate, HardwareProfile, Injections, SpikeTrace};

use crate::circuits::{build, format_bits, Kind, Mode, Shape};

/// Inputs up to this many bits are checked exhaustively.
const EXHAUSTIVE_BITS: usize = 12;

pub struct VerifyPlan {
    pub kind: Kind,
    pub sizes: Vec<usize>,
    pub widths: Vec<usize>,
    pub cases: usize,
    pub seed: u64,
    pub fault: bool,
    pub shape: Shape,
    pub profile: HardwareProfile,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub input: String,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteResult {
    pub label: String,
    pub cases: usize,
    pub outcome: Result<Option<Failure>, String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        matches!(self.outcome, Ok(None))
    }

    pub fn line(&self) -> String {
        match &self.outcome {
            Ok(None) => format!("PASS {} cases={}", self.label, self.cases),
            Ok(Some(f)) => format!(
                "FAIL {} input={} expected={} got={}",
                self.label, f.input, f.expected, f.got
            ),
            Err(e) => format!("FAIL {} error: {e}", self.label),
        }
    }
}

struct Suite {
    label: String,
    kind: Kind,
    size: usize,
    shape: Shape,
}

pub fn default_sizes(kind: Kind) -> Vec<usize> {
    match kind {
        Kind::Parity => (1..=12).chain([64, 256]).collect(),
        Kind::Popc => (1..=10).chain([32, 64]).collect(),
        Kind::Sum => vec![2, 3, 4],
        Kind::PopcRestricted => vec![16, 64, 256, 1024],
        Kind::Stack => vec![1, 2, 3, 8],
        Kind::Repeater => vec![2, 3, 4],
    }
}

fn suites(plan: &VerifyPlan) -> Vec<Suite> {
    let mut out = Vec::new();
    for &size in &plan.sizes {
        match plan.kind {
            Kind::Parity => {
                for (mode, name) in [(Mode::Even, "even"), (Mode::Odd, "odd")] {
                    out.push(Suite {
                        label: format!("parity n={size} mode={name}"),
                        kind: plan.kind,
                        size,
                        shape: Shape { mode, ..plan.shape.clone() },
                    });
                }
            }
            Kind::Sum => {
                for &width in &plan.widths {
                    out.push(Suite {
                        label: format!("sum n={size} l={width}"),
                        kind: plan.kind,
                        size,
                        shape: Shape { width, ..plan.shape.clone() },
                    });
                }
            }
            Kind::Stack => out.push(Suite {
                label: format!("stack len={size}"),
                kind: plan.kind,
                size,
                shape: plan.shape.clone(),
            }),
            kind => out.push(Suite {
                label: format!("{} n={size}", kind.name()),
                kind,
                size,
                shape: plan.shape.clone(),
            }),
        }
    }
    out
}

/// Runs every suite of the plan; results are in plan order.
pub fn run_verify(plan: &VerifyPlan) -> Vec<SuiteResult> {
    let suites = suites(plan);
    std::thread::scope(|scope| {
        let handles: Vec<_> = suites
            .iter()
            .enumerate()
            .map(|(i, s)| scope.spawn(move || run_suite(plan, s, plan.seed.wrapping_add(i as u64))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("verification thread panicked")).collect()
    })
}

/// Negates the first synapse leaving input port 0.
pub fn inject_fault(c: &mut Circuit) {
    let port = c.inputs()[0];
    if let Some(s) = c.net.synapses.iter_mut().find(|s| s.pre == port) {
        s.weight = if s.weight == 0 { 1 } else { -s.weight };
    }
}

fn run_suite(plan: &VerifyPlan, suite: &Suite, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (cases, outcome) = match suite.kind {
        Kind::Stack => check_stack(plan, suite.size, &mut rng),
        Kind::Repeater => check_repeater(plan, suite.size, &mut rng),
        _ => check_combinational(plan, suite, &mut rng),
    };
    SuiteResult {
        label: suite.label.clone(),
        cases,
        outcome,
    }
}

fn build_checked(plan: &VerifyPlan, kind: Kind, size: usize, shape: &Shape) -> Result<Circuit, CircuitError> {
    let mut c = build(kind, size, shape, &plan.profile)?;
    if plan.fault {
        inject_fault(&mut c);
    }
    Ok(c)
}

/// Expected output bits of a combinational circuit.
fn expected(kind: Kind, shape: &Shape, input: &[bool], width: usize) -> Vec<bool> {
    match kind {
        Kind::Parity => {
            let odd = parity_ref(input);
            vec![if ParityMode::from(shape.mode) == ParityMode::Even { !odd } else { odd }]
        }
        Kind::Sum => {
            let values: Vec<u64> = input.chunks(shape.width).map(bits_to_u64).collect();
            let bin = format!("{:b}", sum_ref(&values));
            let mut bits: Vec<bool> = bin.bytes().rev().map(|b| b == b'1').collect();
            bits.resize(width, false);
            bits
        }
        _ => u64_to_bits(popcount_ref(input), width),
    }
}

/// Outputs at the latency plus the full trace of a single evaluation.
fn observe(c: &Circuit, input: &[bool]) -> Result<(Vec<bool>, SpikeTrace), CircuitError> {
    let ids: Vec<_> = c.inputs().iter().zip(input).filter(|(_, &b)| b).map(|(&p, _)| p).collect();
    let mut inj = Injections::new();
    if !ids.is_empty() {
        inj.insert(0, ids);
    }
    let (trace, _) = run(&c.net, c.latency + 1, &inj)?;
    let out = c.outputs().iter().map(|&o| trace.fired(o, c.latency)).collect();
    Ok((out, trace))
}

/// `Some((expected, got))` when the circuit disagrees on `input`.
fn mismatch(c: &Circuit, kind: Kind, shape: &Shape, input: &[bool]) -> Result<Option<(String, String)>, CircuitError> {
    let (got, trace) = observe(c, input)?;
    let want = expected(kind, shape, input, got.len());
    if got != want {
        return Ok(Some((format_bits(&want), format_bits(&got))));
    }
    if let Some(level2) = c.groups.get("level2").filter(|_| kind == Kind::Popc) {
        for t in 0..=c.latency {
            let active = level2.iter().filter(|&&id| trace.fired(id, t)).count();
            if active > 1 {
                return Ok(Some(("one-hot level 2".into(), format!("{active} active at t={t}"))));
            }
        }
    }
    Ok(None)
}

/// Greedily clears set bits while the input still fails.
fn shrink(c: &Circuit, kind: Kind, shape: &Shape, mut input: Vec<bool>) -> Result<Vec<bool>, CircuitError> {
    loop {
        let mut improved = false;
        for i in 0..input.len() {
            if !input[i] {
                continue;
            }
            input[i] = false;
            if mismatch(c, kind, shape, &input)?.is_some() {
                improved = true;
            } else {
                input[i] = true;
            }
        }
        if !improved {
            return Ok(input);
        }
    }
}

/// All inputs of `n` bits ordered by popcount, then value.
fn exhaustive(n: usize) -> Vec<Vec<bool>> {
    let mut values: Vec<u64> = (0..1u64 << n).collect();
    values.sort_by_key(|v| (v.count_ones(), *v));
    values.into_iter().map(|v| u64_to_bits(v, n)).collect()
}

fn check_combinational(
    plan: &VerifyPlan,
    suite: &Suite,
    rng: &mut ChaCha8Rng,
) -> (usize, Result<Option<Failure>, String>) {
    let kind = suite.kind;
    let c = match build_checked(plan, kind, suite.size, &suite.shape) {
        Ok(c) => c,
        Err(e) => return (0, Err(e.to_string())),
    };
    if kind == Kind::PopcRestricted {
        let report = validate(&c.net, &plan.profile);
        if !report.is_empty() {
            return (0, Err(format!("validation: {}", report.violations[0])));
        }
    }
    let n = c.inputs().len();
    let inputs = if n <= EXHAUSTIVE_BITS {
        exhaustive(n)
    } else {
        let mut v = vec![vec![false; n], vec![true; n]];
        v.extend((0..plan.cases).map(|_| (0..n).map(|_| rng.gen_bool(0.5)).collect()));
        v
    };
    let run = || -> Result<Option<Failure>, CircuitError> {
        if kind == Kind::PopcRestricted {
            // Streamed back to back to exercise the initiation interval of 1.
            let outs = stream(&c, &inputs, 1)?;
            if let Some((input, got)) = inputs
                .iter()
                .zip(&outs)
                .find(|(i, o)| expected(kind, &suite.shape, i, o.len()) != **o)
            {
                return Ok(Some(Failure {
                    input: format_bits(input),
                    expected: format_bits(&expected(kind, &suite.shape, input, got.len())),
                    got: format_bits(got),
                }));
            }
            return Ok(None);
        }
        for input in &inputs {
            if mismatch(&c, kind, &suite.shape, input)?.is_some() {
                let small = if n <= EXHAUSTIVE_BITS {
                    input.clone()
                } else {
                    shrink(&c, kind, &suite.shape, input.clone())?
                };
                let (expected, got) = mismatch(&c, kind, &suite.shape, &small)?.expect("still failing");
                return Ok(Some(Failure {
                    input: format_bits(&small),
                    expected,
                    got,
                }));
            }
        }
        Ok(None)
    };
    (inputs.len(), run().map_err(|e| e.to_string()))
}

fn check_stack(plan: &VerifyPlan, len: usize, rng: &mut ChaCha8Rng) -> (usize, Result<Option<Failure>, String>) {
    let patterns: Vec<Vec<bool>> = if len <= 3 {
        exhaustive(len)
    } else {
        (0..plan.cases).map(|_| (0..len).map(|_| rng.gen_bool(0.5)).collect()).collect()
    };
    let mut count = 0;
    for pattern in &patterns {
        let shape = Shape {
            pattern: format_bits(pattern),
            ..plan.shape.clone()
        };
        let c = match build_checked(plan, Kind::Stack, len, &shape) {
            Ok(c) => c,
            Err(e) => return (count, Err(e.to_string())),
        };
        // Back-to-back replays at the initiation interval.
        let triggers = [0, len as u64];
        let mut inj = Injections::new();
        for &t in &triggers {
            inj.insert(t, vec![c.inputs()[0]]);
        }
        let horizon = triggers[1] + len as u64 + 2;
        let trace = match run(&c.net, horizon, &inj) {
            Ok((t, _)) => t,
            Err(e) => return (count, Err(e.to_string())),
        };
        let got: Vec<u64> = trace.of(c.outputs()[0]).to_vec();
        let want: Vec<u64> = replay_ref(pattern, &triggers).into_iter().collect();
        count += 1;
        if got != want {
            return (
                count,
                Ok(Some(Failure {
                    input: format_bits(pattern),
                    expected: format!("{want:?}"),
                    got: format!("{got:?}"),
                })),
            );
        }
    }
    (count, Ok(None))
}

/// Drives a repeater with back-to-back sequences and returns its output
/// from `Δ` onwards.
pub fn drive_repeater(c: &Circuit, seqs: &[Vec<bool>]) -> Result<Vec<bool>, CircuitError> {
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
    let (trace, _) = run(&c.net, c.latency + total, &inj)?;
    let out = c.outputs()[0];
    Ok((0..total).map(|t| trace.fired(out, t + c.latency)).collect())
}

fn check_repeater(plan: &VerifyPlan, r: usize, rng: &mut ChaCha8Rng) -> (usize, Result<Option<Failure>, String>) {
    let c = match build_checked(plan, Kind::Repeater, r, &plan.shape) {
        Ok(c) => c,
        Err(e) => return (0, Err(e.to_string())),
    };
    let mut batches: Vec<Vec<Vec<bool>>> = exhaustive(r).into_iter().map(|v| vec![v]).collect();
    batches.push((0..3).map(|_| (0..r).map(|_| rng.gen_bool(0.5)).collect()).collect());
    for (i, seqs) in batches.iter().enumerate() {
        let got = match drive_repeater(&c, seqs) {
            Ok(g) => g,
            Err(e) => return (i, Err(e.to_string())),
        };
        let want: Vec<bool> = seqs.iter().flat_map(|s| repeat_ref(s, r)).collect();
        if got != want {
            let input: Vec<String> = seqs.iter().map(|s| format_bits(s)).collect();
            return (
                i + 1,
                Ok(Some(Failure {
                    input: input.join("+"),
                    expected: format_bits(&want),
                    got: format_bits(&got),
                })),
            );
        }
    }
    (batches.len(), Ok(None))
}
