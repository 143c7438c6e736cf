//! Line-oriented text form of a network.
//!
//! ```text
//! N <id> <T> <m> <b> <to_zero|none> <regular|programmed|readout>
//! S <pre> <post> <delay> <weight>
//! P <id> <t1,t2,...>
//! IN <id> <id> ...
//! OUT <id> <id> ...
//! ```
//!
//! Neuron ids are dense and listed in order. `#` starts a comment.

use std::fmt::Write;

use thiserror::Error;

use super::network::{Network, NeuronId, NeuronKind, NeuronSpec, ResetMode, Schedule};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

pub fn write_network(net: &Network) -> String {
    let mut out = String::new();
    for id in net.ids() {
        let n = net.neuron(id);
        let reset = match n.reset {
            ResetMode::Zero => "to_zero",
            ResetMode::Hold => "none",
        };
        let kind = match n.kind {
            NeuronKind::Regular => "regular",
            NeuronKind::Programmed(_) => "programmed",
            NeuronKind::Readout => "readout",
        };
        writeln!(out, "N {id} {} {} {} {reset} {kind}", n.threshold, n.leak, n.bias).unwrap();
    }
    for id in net.ids() {
        if let Some(s) = net.neuron(id).schedule() {
            if !s.is_empty() {
                let times: Vec<String> = s.times().map(|t| t.to_string()).collect();
                writeln!(out, "P {id} {}", times.join(",")).unwrap();
            }
        }
    }
    for s in &net.synapses {
        writeln!(out, "S {} {} {} {}", s.pre, s.post, s.delay, s.weight).unwrap();
    }
    let ports = |ids: &[NeuronId]| {
        ids.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(out, "IN {}", ports(&net.input_ports)).unwrap();
    writeln!(out, "OUT {}", ports(&net.output_ports)).unwrap();
    out
}

pub fn parse_network(text: &str) -> Result<Network, FormatError> {
    let mut net = Network::new();
    let mut schedules: Vec<(usize, NeuronId, Schedule)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: String| FormatError { line: line_no, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let tag = fields.next().unwrap();
        let rest: Vec<&str> = fields.collect();
        let int = |s: &str| -> Result<i64, FormatError> {
            s.parse::<i64>().map_err(|e| err(format!("bad integer `{s}`: {e}")))
        };
        let id = |s: &str| -> Result<NeuronId, FormatError> {
            s.parse::<u32>()
                .map(NeuronId)
                .map_err(|e| err(format!("bad neuron id `{s}`: {e}")))
        };
        match tag {
            "N" => {
                if rest.len() != 6 {
                    return Err(err(format!("N expects 6 fields, got {}", rest.len())));
                }
                let nid = id(rest[0])?;
                if nid.index() != net.len() {
                    return Err(err(format!("neuron id {nid} out of order, expected {}", net.len())));
                }
                let leak = u32::try_from(int(rest[2])?).map_err(|_| err("leak must be non-negative".into()))?;
                let reset = match rest[4] {
                    "to_zero" | "zero" => ResetMode::Zero,
                    "none" | "hold" => ResetMode::Hold,
                    other => return Err(err(format!("unknown reset mode `{other}`"))),
                };
                let kind = match rest[5] {
                    "regular" => NeuronKind::Regular,
                    "programmed" => NeuronKind::Programmed(Schedule::new()),
                    "readout" => NeuronKind::Readout,
                    other => return Err(err(format!("unknown neuron kind `{other}`"))),
                };
                net.add_neuron(NeuronSpec {
                    threshold: int(rest[1])?,
                    leak,
                    bias: int(rest[3])?,
                    reset,
                    kind,
                });
            }
            "S" => {
                if rest.len() != 4 {
                    return Err(err(format!("S expects 4 fields, got {}", rest.len())));
                }
                let delay = u32::try_from(int(rest[2])?).map_err(|_| err("delay must be non-negative".into()))?;
                net.connect(id(rest[0])?, id(rest[1])?, delay, int(rest[3])?);
            }
            "P" => {
                if rest.is_empty() || rest.len() > 2 {
                    return Err(err("P expects an id and a time list".into()));
                }
                let mut sched = Schedule::new();
                if let Some(list) = rest.get(1) {
                    for t in list.split(',').filter(|t| !t.is_empty()) {
                        let v = t.parse::<u64>().map_err(|e| err(format!("bad time `{t}`: {e}")))?;
                        sched.insert(v);
                    }
                }
                schedules.push((line_no, id(rest[0])?, sched));
            }
            "IN" => {
                net.input_ports = rest.iter().map(|s| id(s)).collect::<Result<_, _>>()?;
            }
            "OUT" => {
                net.output_ports = rest.iter().map(|s| id(s)).collect::<Result<_, _>>()?;
            }
            other => return Err(err(format!("unknown record `{other}`"))),
        }
    }
    for (line, nid, sched) in schedules {
        match net.neurons.get_mut(nid.index()) {
            Some(NeuronSpec {
                kind: NeuronKind::Programmed(s),
                ..
            }) => *s = sched,
            _ => {
                return Err(FormatError {
                    line,
                    msg: format!("schedule for non-programmed neuron {nid}"),
                })
            }
        }
    }
    net.check().map_err(|e| FormatError {
        line: 0,
        msg: e.to_string(),
    })?;
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_network() -> impl Strategy<Value = Network> {
        (1usize..8).prop_flat_map(|n| {
            let neuron = (
                -50i64..50,
                0u32..3,
                -5i64..5,
                any::<bool>(),
                0u8..3,
                proptest::collection::btree_set(0u64..20, 0..4),
            );
            let syn = (0..n as u32, 0..n as u32, 0u32..5, -100i64..100);
            (
                proptest::collection::vec(neuron, n),
                proptest::collection::vec(syn, 0..12),
                proptest::collection::vec(0..n as u32, 0..3),
                proptest::collection::vec(0..n as u32, 0..3),
            )
                .prop_map(|(ns, ss, ins, outs)| {
                    let mut net = Network::new();
                    for (t, m, b, hold, kind, sched) in ns {
                        let kind = match kind {
                            0 => NeuronKind::Regular,
                            1 => NeuronKind::Readout,
                            _ => NeuronKind::Programmed(sched.into_iter().collect()),
                        };
                        net.add_neuron(NeuronSpec {
                            threshold: t,
                            leak: m,
                            bias: b,
                            reset: if hold { ResetMode::Hold } else { ResetMode::Zero },
                            kind,
                        });
                    }
                    for (a, b, d, w) in ss {
                        net.connect(NeuronId(a), NeuronId(b), d, w);
                    }
                    net.input_ports = ins.into_iter().map(NeuronId).collect();
                    net.output_ports = outs.into_iter().map(NeuronId).collect();
                    net
                })
        })
    }

    proptest! {
        #[test]
        fn text_form_round_trips(net in arb_network()) {
            let text = write_network(&net);
            prop_assert_eq!(parse_network(&text).unwrap(), net);
        }
    }

    #[test]
    fn rejects_malformed_records() {
        assert_eq!(parse_network("N 1 0 0 0 to_zero regular").unwrap_err().line, 1);
        assert!(parse_network("N 0 0 0 0 sometimes regular").is_err());
        assert!(parse_network("N 0 0 0 0 to_zero regular\nP 0 1,2").is_err());
        assert!(parse_network("N 0 0 0 0 to_zero regular\nS 0 3 0 1").is_err());
        assert!(parse_network("X 1").is_err());
    }
}
