//! Epistasis detection output: tables and the metrics report.

use std::fmt::Write;

use serde_json::{json, Value};
use tcepi::epistasis::{chi_square, tables_to_csv, ContingencyTable, Detection, GenotypeDataset};
use tcepi::snn::HardwareProfile;

use crate::OutputFormat;

pub fn render_tables(tables: &[ContingencyTable], format: OutputFormat, with_chi2: bool) -> String {
    match format {
        OutputFormat::Csv => tables_to_csv(tables, with_chi2),
        OutputFormat::Text => {
            let mut out = String::new();
            for t in tables {
                let ids: Vec<String> = t.snps.iter().map(|s| s.to_string()).collect();
                write!(out, "snps ({})", ids.join(",")).unwrap();
                if with_chi2 {
                    write!(out, " chi2={:.6}", chi_square(t)).unwrap();
                }
                out.push('\n');
                for (g, &(cases, controls)) in t.cells.iter().enumerate() {
                    let digits: Vec<String> = tcepi::epistasis::genotype_tuple(g, t.order())
                        .iter()
                        .map(|d| d.to_string())
                        .collect();
                    writeln!(out, "  ({}) cases={cases} controls={controls}", digits.join(",")).unwrap();
                }
            }
            out
        }
    }
}

pub fn metrics_report(ds: &GenotypeDataset, det: &Detection, profile: &HardwareProfile) -> Value {
    let tuples = det.tables.len() as u64;
    let block = 3u64.pow(det.order as u32);
    let runs: Vec<Value> = det
        .runs
        .iter()
        .map(|r| {
            json!({
                "class": r.class,
                "shard": r.shard,
                "samples": r.samples,
                "neurons": r.neurons,
                "synapses": r.synapses,
                "spikes": r.spikes,
                "timesteps": r.timesteps,
                "fill_latency": r.fill,
                "popc_latency": r.popc_latency,
                "max_in_degree": r.max_in_degree,
                "max_out_degree": r.max_out_degree,
                "max_delay": r.max_delay,
                "max_abs_current": r.max_abs_current as i64,
            })
        })
        .collect();
    json!({
        "order": det.order,
        "samples": ds.samples(),
        "snps": ds.snps(),
        "cases": ds.count_class(1),
        "controls": ds.count_class(0),
        "tuples": tuples,
        "entries": block * tuples,
        "timesteps": det.timesteps(),
        "latency": det.fill(),
        "neurons": det.total_neurons(),
        "synapses": det.total_synapses(),
        "spikes": det.total_spikes(),
        "profile": {
            "s_pr": profile.s_pr,
            "n_pr": profile.n_pr,
            "m_delay": profile.m_delay,
            "f_in": profile.f_in,
            "f_out": profile.f_out,
        },
        "runs": runs,
    })
}
