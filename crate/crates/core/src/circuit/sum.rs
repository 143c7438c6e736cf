//! Binary array sum, one modified parity sub-circuit per output bit.
//!
//! Sub-circuit `k` (1-based) works in fixed-point scale `2^(k-1)`: input bit
//! `i <= k` of every addend carries weight `2^(i-1)`, so the scaled current is
//! `c = sum of the low k bits`. Level-1 neuron `j` has threshold
//! `(2j-1)·2^(k-1) - 1`, i.e. fires iff `floor(c / 2^(k-1)) >= 2j-1`, and the
//! output compares `2^k` times the level-1 count against `c` one step later.

use crate::snn::{Network, NeuronId, NeuronSpec};

use super::{indexed, Circuit, CircuitError, PortMap};

pub(crate) fn ceil_log2(n: usize) -> usize {
    (usize::BITS - (n.max(1) - 1).leading_zeros()) as usize
}

/// Shape of one adder node: addend bit widths and value bounds.
#[derive(Clone, Debug)]
pub(crate) struct SumShape {
    pub widths: Vec<usize>,
    pub maxes: Vec<u64>,
    pub out_width: usize,
    /// Build only the level-1 neurons that can fire given `maxes`.
    pub trim: bool,
    /// Compute the top output bit with a single comparator.
    pub comparator_top: bool,
}

/// Standalone adder node. Input ports are addend-major, LSB first.
pub(crate) fn sum_node(shape: &SumShape) -> Network {
    let mut net = Network::new();
    let addends: Vec<Vec<NeuronId>> = shape
        .widths
        .iter()
        .map(|&w| (0..w).map(|_| net.add_input()).collect())
        .collect();
    let n = addends.len();
    for k in 1..=shape.out_width {
        let used: Vec<(NeuronId, i64)> = addends
            .iter()
            .flat_map(|bits| bits.iter().take(k).enumerate().map(|(i, &b)| (b, 1i64 << i)))
            .collect();
        if shape.comparator_top && k == shape.out_width {
            let cmp = net.add_neuron(NeuronSpec::gate((1i64 << (k - 1)) - 1));
            for bits in &addends {
                for (i, &b) in bits.iter().enumerate() {
                    net.connect(b, cmp, 1, 1i64 << i);
                }
            }
            net.output_ports.push(cmp);
            continue;
        }
        let level1_count = if shape.trim {
            let c_max: u64 = shape
                .widths
                .iter()
                .zip(&shape.maxes)
                .map(|(&w, &m)| m.min((1u64 << w.min(k)) - 1))
                .sum();
            let v_max = c_max >> (k - 1);
            v_max.div_ceil(2) as usize
        } else {
            n
        };
        let scale = 1i64 << (k - 1);
        let level1: Vec<NeuronId> = (1..=level1_count as i64)
            .map(|j| net.add_neuron(NeuronSpec::gate((2 * j - 1) * scale - 1)))
            .collect();
        for &h in &level1 {
            for &(b, w) in &used {
                net.connect(b, h, 0, w);
            }
        }
        let out = net.add_neuron(NeuronSpec::gate(0));
        for &h in &level1 {
            net.connect(h, out, 0, 1i64 << k);
        }
        for &(b, w) in &used {
            net.connect(b, out, 1, -w);
        }
        net.output_ports.push(out);
    }
    net
}

/// Sum of `n` addends of `l` bits each; `l + ceil(log2 n)` output bits.
pub fn build_sum_tc(n: usize, l: usize) -> Result<Circuit, CircuitError> {
    if n < 2 || l == 0 {
        return Err(CircuitError::InvalidSize(format!(
            "sum needs n >= 2 addends of l >= 1 bits, got n={n}, l={l}"
        )));
    }
    let out_width = l + ceil_log2(n);
    if out_width > 62 {
        return Err(CircuitError::InvalidSize(format!("{out_width} output bits exceed 62")));
    }
    let shape = SumShape {
        widths: vec![l; n],
        maxes: vec![(1u64 << l) - 1; n],
        out_width,
        trim: false,
        comparator_top: false,
    };
    let net = sum_node(&shape);
    let inputs = (0..n)
        .flat_map(|j| (0..l).map(move |i| format!("a[{j}].bit[{i}]")))
        .collect();
    let ports = PortMap {
        inputs,
        outputs: indexed("sum", out_width),
    };
    Ok(Circuit::new(net, 2, 1, 1u64 << (out_width - 1), ports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{bits_to_u64, evaluate, u64_to_bits};

    fn encode(values: &[u64], l: usize) -> Vec<bool> {
        values.iter().flat_map(|&v| u64_to_bits(v, l)).collect()
    }

    #[test]
    fn examples() {
        let c = build_sum_tc(2, 1).unwrap();
        assert_eq!(evaluate(&c, &encode(&[1, 1], 1)).unwrap().outputs, vec![false, true]);
        let c = build_sum_tc(3, 2).unwrap();
        let out = evaluate(&c, &encode(&[3, 3, 3], 2)).unwrap().outputs;
        assert_eq!(out, vec![true, false, false, true]);
        let c = build_sum_tc(4, 3).unwrap();
        let e = evaluate(&c, &encode(&[0, 0, 0, 0], 3)).unwrap();
        assert_eq!(e.metrics.total_spikes, 0);
    }

    #[test]
    fn level1_width_is_n_per_bit() {
        let c = build_sum_tc(3, 2).unwrap();
        assert_eq!(c.counts.neurons, 4 * (3 + 1));
        assert_eq!(c.scale, 8);
    }

    #[test]
    fn trimmed_comparator_node_adds_two_values() {
        let shape = SumShape {
            widths: vec![3, 2],
            maxes: vec![5, 3],
            out_width: 4,
            trim: true,
            comparator_top: true,
        };
        let net = sum_node(&shape);
        let c = Circuit::new(net, 2, 1, 1, PortMap {
            inputs: indexed("x", 5),
            outputs: indexed("s", 4),
        });
        for a in 0..=5u64 {
            for b in 0..=3u64 {
                let mut v = u64_to_bits(a, 3);
                v.extend(u64_to_bits(b, 2));
                assert_eq!(bits_to_u64(&evaluate(&c, &v).unwrap().outputs), a + b);
            }
        }
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(build_sum_tc(1, 3).is_err());
        assert!(build_sum_tc(2, 0).is_err());
    }
}
