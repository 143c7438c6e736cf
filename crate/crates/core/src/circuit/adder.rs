//! Two-operand parallel-prefix adder from threshold gates of fan-in at most 3.
//!
//! Generate `g = a AND b`, transmit `t = a OR b`, half sum `p = a + b - 2g > 0`.
//! Prefix steps combine spans with `G' = [2G + T + G_low > 1]` and
//! `T' = T AND T_low`; sum bit `i` is `p_i XOR G_{i-1}`. Delays are assigned
//! by retiming.

use crate::snn::{Network, NeuronId, NeuronSpec};

use super::legalize::retime;

fn gate(net: &mut Network, threshold: i64, inputs: &[(NeuronId, i64)]) -> NeuronId {
    let g = net.add_neuron(NeuronSpec::gate(threshold));
    for &(x, w) in inputs {
        net.connect(x, g, 0, w);
    }
    g
}

/// Standalone adder of an `wa`-bit and a `wb`-bit operand producing
/// `out_width` bits. Input ports: the bits of `a` then of `b`, LSB first.
pub(crate) fn prefix_adder_node(wa: usize, wb: usize, out_width: usize) -> Network {
    assert!(wa >= 1 && wb >= 1 && out_width >= 1);
    let mut net = Network::new();
    let a: Vec<NeuronId> = (0..wa).map(|_| net.add_input()).collect();
    let b: Vec<NeuronId> = (0..wb).map(|_| net.add_input()).collect();
    let w = wa.max(wb);
    let mut g: Vec<Option<NeuronId>> = Vec::with_capacity(w);
    let mut t: Vec<NeuronId> = Vec::with_capacity(w);
    let mut p: Vec<NeuronId> = Vec::with_capacity(w);
    for i in 0..w {
        match (a.get(i), b.get(i)) {
            (Some(&x), Some(&y)) => {
                let gi = gate(&mut net, 1, &[(x, 1), (y, 1)]);
                t.push(gate(&mut net, 0, &[(x, 1), (y, 1)]));
                p.push(gate(&mut net, 0, &[(x, 1), (y, 1), (gi, -2)]));
                g.push(Some(gi));
            }
            (Some(&x), None) | (None, Some(&x)) => {
                g.push(None);
                t.push(x);
                p.push(x);
            }
            (None, None) => unreachable!(),
        }
    }
    let mut s = 1;
    while s < w {
        let (old_g, old_t) = (g.clone(), t.clone());
        for i in s..w {
            if let Some(low) = old_g[i - s] {
                let mut ins = vec![(old_t[i], 1), (low, 1)];
                if let Some(gi) = old_g[i] {
                    ins.push((gi, 2));
                }
                g[i] = Some(gate(&mut net, 1, &ins));
            }
            if 2 * s < w && i >= 2 * s {
                t[i] = gate(&mut net, 1, &[(old_t[i], 1), (old_t[i - s], 1)]);
            }
        }
        s *= 2;
    }
    for i in 0..w.min(out_width) {
        let carry = if i == 0 { None } else { g[i - 1] };
        let bit = match carry {
            None => gate(&mut net, 0, &[(p[i], 1)]),
            Some(c) => {
                let h = gate(&mut net, 1, &[(p[i], 1), (c, 1)]);
                gate(&mut net, 0, &[(p[i], 1), (c, 1), (h, -2)])
            }
        };
        net.output_ports.push(bit);
    }
    if out_width > w {
        let top = g[w - 1].expect("both operands have a low bit");
        let bit = gate(&mut net, 0, &[(top, 1)]);
        net.output_ports.push(bit);
    }
    retime(&mut net, true).expect("adder is feedforward");
    net
}
