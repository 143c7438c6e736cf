//! Circuit text form: the network records followed by a `PORTMAP` section.
//!
//! ```text
//! PORTMAP
//! META <latency> <ii> <scale>
//! RIN <role>        # one per input port, in order
//! ROUT <role>       # one per output port, in order
//! GROUP <name> <id> <id> ...
//! ```

use std::fmt::Write;

use crate::snn::{parse_network, write_network, FormatError, NeuronId};

use super::{Circuit, CircuitError, PortMap};

pub fn write_circuit(c: &Circuit) -> String {
    let mut out = write_network(&c.net);
    writeln!(out, "PORTMAP").unwrap();
    writeln!(out, "META {} {} {}", c.latency, c.initiation_interval, c.scale).unwrap();
    for r in &c.ports.inputs {
        writeln!(out, "RIN {r}").unwrap();
    }
    for r in &c.ports.outputs {
        writeln!(out, "ROUT {r}").unwrap();
    }
    for (name, ids) in &c.groups {
        let ids: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
        writeln!(out, "GROUP {name} {}", ids.join(" ")).unwrap();
    }
    out
}

pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let lines: Vec<&str> = text.lines().collect();
    let split = lines
        .iter()
        .position(|l| l.trim() == "PORTMAP")
        .ok_or_else(|| FormatError {
            line: lines.len(),
            msg: "missing PORTMAP section".into(),
        })?;
    let net = parse_network(&lines[..split].join("\n"))?;
    let mut meta = None;
    let mut ports = PortMap::default();
    let mut groups = Vec::new();
    for (i, raw) in lines.iter().enumerate().skip(split + 1) {
        let err = |msg: String| FormatError { line: i + 1, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
        match tag {
            "META" => {
                let v: Vec<u64> = rest
                    .split_whitespace()
                    .map(|f| f.parse().map_err(|e| err(format!("bad META field `{f}`: {e}"))))
                    .collect::<Result<_, _>>()?;
                if v.len() != 3 {
                    return Err(err("META expects latency, ii and scale".into()).into());
                }
                meta = Some((v[0], v[1], v[2]));
            }
            "RIN" => ports.inputs.push(rest.trim().to_string()),
            "ROUT" => ports.outputs.push(rest.trim().to_string()),
            "GROUP" => {
                let mut f = rest.split_whitespace();
                let name = f.next().ok_or_else(|| err("GROUP needs a name".into()))?;
                let ids = f
                    .map(|s| {
                        s.parse::<u32>()
                            .map(NeuronId)
                            .map_err(|e| err(format!("bad neuron id `{s}`: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                groups.push((name.to_string(), ids));
            }
            other => return Err(err(format!("unknown PORTMAP record `{other}`")).into()),
        }
    }
    let (latency, ii, scale) = meta.ok_or_else(|| FormatError {
        line: split + 1,
        msg: "missing META record".into(),
    })?;
    if ports.inputs.len() != net.input_ports.len() || ports.outputs.len() != net.output_ports.len() {
        return Err(FormatError {
            line: split + 1,
            msg: "every port needs exactly one role".into(),
        }
        .into());
    }
    let mut c = Circuit::new(net, latency, ii, scale, ports);
    c.groups = groups.into_iter().collect();
    Ok(c)
}

/// One-line summary: counts, latency, initiation interval, scale.
pub fn describe(c: &Circuit) -> String {
    let k = &c.counts;
    format!(
        "neurons={} synapses={} latency={} ii={} scale={} inputs={} outputs={} max_in_degree={} max_out_degree={} max_delay={}",
        k.neurons,
        k.synapses,
        c.latency,
        c.initiation_interval,
        c.scale,
        c.inputs().len(),
        c.outputs().len(),
        k.max_in_degree,
        k.max_out_degree,
        k.max_delay
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_parity, build_popc_tc, build_sum_tc, ParityMode};

    #[test]
    fn round_trips() {
        for c in [
            build_parity(5, ParityMode::Even).unwrap(),
            build_popc_tc(6).unwrap(),
            build_sum_tc(3, 2).unwrap(),
        ] {
            let text = write_circuit(&c);
            assert_eq!(parse_circuit(&text).unwrap(), c);
        }
    }

    #[test]
    fn describe_parity_eight() {
        let c = build_parity(8, ParityMode::Even).unwrap();
        assert!(describe(&c).starts_with("neurons=5 synapses=44 latency=2 ii=1"));
    }

    #[test]
    fn missing_sections_are_errors() {
        let c = build_popc_tc(2).unwrap();
        let text = write_circuit(&c);
        let net_only = text.split("PORTMAP").next().unwrap();
        assert!(parse_circuit(net_only).is_err());
        let no_roles: String = text.lines().filter(|l| !l.starts_with("RIN")).map(|l| format!("{l}\n")).collect();
        assert!(parse_circuit(&no_roles).is_err());
    }
}
