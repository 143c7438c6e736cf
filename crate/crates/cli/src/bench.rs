//! Size sweeps reporting counts, latency and spikes with ratio columns for
//! checking asymptotic envelopes.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcepi::circuit::{evaluate, CircuitError};
use tcepi::snn::HardwareProfile;

use crate::circuits::{build, Kind, Shape};
use crate::OutputFormat;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub size: usize,
    pub neurons: usize,
    pub synapses: usize,
    pub latency: u64,
    /// Latency increase over the previous row.
    pub dlatency: i64,
    pub spikes_mean: f64,
    pub spikes_max: u64,
}

impl BenchRow {
    fn lg(&self) -> f64 {
        (self.size.max(2) as f64).log2()
    }

    pub fn neurons_per_m(&self) -> f64 {
        self.neurons as f64 / self.size as f64
    }

    pub fn synapses_per_m_lg3(&self) -> f64 {
        self.synapses as f64 / (self.size as f64 * self.lg().powi(3))
    }

    pub fn spikes_per_m_lg(&self) -> f64 {
        self.spikes_mean / (self.size as f64 * self.lg())
    }
}

/// `from, 2·from, 4·from, ... <= to`; empty when `from > to` or `from = 0`.
pub fn doubling(from: usize, to: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut s = from;
    while s >= 1 && s <= to {
        out.push(s);
        s *= 2;
    }
    out
}

/// Builds each size and measures spikes over all-ones plus `cases` random
/// inputs, evaluated one at a time.
pub fn run_bench(
    kind: Kind,
    sizes: &[usize],
    shape: &Shape,
    profile: &HardwareProfile,
    cases: usize,
    seed: u64,
) -> Result<Vec<BenchRow>, CircuitError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<BenchRow> = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let c = build(kind, size, shape, profile)?;
        let n = c.inputs().len();
        let mut inputs = vec![vec![true; n]];
        inputs.extend((0..cases).map(|_| (0..n).map(|_| rng.gen_bool(0.5)).collect()));
        let mut total = 0u64;
        let mut max = 0u64;
        for input in &inputs {
            let s = evaluate(&c, input)?.metrics.total_spikes;
            total += s;
            max = max.max(s);
        }
        let dlatency = rows.last().map_or(0, |r| c.latency as i64 - r.latency as i64);
        rows.push(BenchRow {
            size,
            neurons: c.counts.neurons,
            synapses: c.counts.synapses,
            latency: c.latency,
            dlatency,
            spikes_mean: total as f64 / inputs.len() as f64,
            spikes_max: max,
        });
    }
    Ok(rows)
}

const HEADER: [&str; 10] = [
    "size",
    "neurons",
    "synapses",
    "latency",
    "dlatency",
    "spikes_mean",
    "spikes_max",
    "neurons_per_m",
    "synapses_per_m_lg3m",
    "spikes_per_m_lgm",
];

pub fn render(rows: &[BenchRow], format: OutputFormat) -> String {
    let cells: Vec<[String; 10]> = rows
        .iter()
        .map(|r| {
            [
                r.size.to_string(),
                r.neurons.to_string(),
                r.synapses.to_string(),
                r.latency.to_string(),
                r.dlatency.to_string(),
                format!("{:.2}", r.spikes_mean),
                r.spikes_max.to_string(),
                format!("{:.4}", r.neurons_per_m()),
                format!("{:.6}", r.synapses_per_m_lg3()),
                format!("{:.6}", r.spikes_per_m_lg()),
            ]
        })
        .collect();
    let mut out = String::new();
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{}", HEADER.join(",")).unwrap();
            for row in &cells {
                writeln!(out, "{}", row.join(",")).unwrap();
            }
        }
        OutputFormat::Text => {
            let widths: Vec<usize> = (0..HEADER.len())
                .map(|i| cells.iter().map(|r| r[i].len()).chain([HEADER[i].len()]).max().unwrap())
                .collect();
            let line = |fields: Vec<&str>| -> String {
                let padded: Vec<String> = fields
                    .iter()
                    .zip(&widths)
                    .map(|(f, w)| format!("{f:>w$}"))
                    .collect();
                padded.join("  ")
            };
            writeln!(out, "{}", line(HEADER.to_vec())).unwrap();
            for row in &cells {
                writeln!(out, "{}", line(row.iter().map(String::as_str).collect())).unwrap();
            }
        }
    }
    out
}
