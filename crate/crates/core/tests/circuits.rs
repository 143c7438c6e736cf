use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcepi::circuit::{
    bits_to_u64, build_parity, build_popc_restricted, build_popc_tc, build_sum_tc, compose, evaluate,
    legalize, parse_circuit, path_uniform, stream, write_circuit, Circuit, ParityMode, PortMap,
};
use tcepi::oracle::{parity_ref, popcount_ref, sum_ref};
use tcepi::snn::{validate, HardwareProfile, Network, NeuronSpec};

/// `m` two-input AND neurons; inputs are `a_0, b_0, a_1, b_1, ...`.
fn and_layer(m: usize) -> Circuit {
    let mut net = Network::new();
    let ins: Vec<_> = (0..2 * m).map(|_| net.add_input()).collect();
    for pair in ins.chunks(2) {
        let g = net.add_neuron(NeuronSpec::gate(1));
        net.connect(pair[0], g, 0, 1);
        net.connect(pair[1], g, 0, 1);
        net.output_ports.push(g);
    }
    let ports = PortMap {
        inputs: (0..2 * m).map(|i| format!("in[{i}]")).collect(),
        outputs: (0..m).map(|i| format!("and[{i}]")).collect(),
    };
    Circuit::new(net, 1, 1, 1, ports)
}

#[test]
fn and_layer_feeding_restricted_counter() {
    let p = HardwareProfile::new(16, 16, 4, 8, 8).unwrap();
    let m = 100;
    let counter = build_popc_restricted(m, &p, 2).unwrap();
    let wiring: Vec<(usize, usize)> = (0..m).map(|i| (i, i)).collect();
    let c = compose(&and_layer(m), &counter, &wiring, &[]).unwrap();
    assert_eq!(c.latency, 1 + counter.latency);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let inputs: Vec<Vec<bool>> = (0..50).map(|_| (0..2 * m).map(|_| rng.gen_bool(0.6)).collect()).collect();
    let outs = stream(&c, &inputs, 1).unwrap();
    for (i, o) in inputs.iter().zip(&outs) {
        let ands: Vec<bool> = i.chunks(2).map(|p| p[0] && p[1]).collect();
        assert_eq!(bits_to_u64(o), popcount_ref(&ands));
    }
}

#[test]
fn restricted_counter_text_round_trip() {
    let p = HardwareProfile::new(12, 12, 3, 6, 6).unwrap();
    let c = build_popc_restricted(50, &p, 3).unwrap();
    let back = parse_circuit(&write_circuit(&c)).unwrap();
    assert_eq!(back, c);
}

fn tight(f_out: usize, m_delay: u32) -> HardwareProfile {
    HardwareProfile::new(16, 16, m_delay, 1024, f_out).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn legalized_parity_keeps_function(
        n in 1usize..10,
        odd in any::<bool>(),
        f_out in 2usize..5,
        m_delay in 1u32..3,
    ) {
        let mode = if odd { ParityMode::Odd } else { ParityMode::Even };
        let p = tight(f_out, m_delay);
        let c = legalize(&build_parity(n, mode).unwrap(), &p).unwrap();
        prop_assert!(validate(&c.net, &p).is_empty());
        prop_assert!(path_uniform(&c.net).unwrap());
        let inputs: Vec<Vec<bool>> = (0..1u64 << n).map(|v| (0..n).map(|i| v >> i & 1 == 1).collect()).collect();
        let outs = stream(&c, &inputs, 1).unwrap();
        for (i, o) in inputs.iter().zip(&outs) {
            prop_assert_eq!(o[0], parity_ref(i) == odd);
        }
    }

    #[test]
    fn legalized_popc_keeps_function(l in 1usize..9, f_out in 2usize..5, m_delay in 1u32..3) {
        let p = tight(f_out, m_delay);
        let c = legalize(&build_popc_tc(l).unwrap(), &p).unwrap();
        prop_assert!(validate(&c.net, &p).is_empty());
        for v in 0..1u64 << l {
            let input: Vec<bool> = (0..l).map(|i| v >> i & 1 == 1).collect();
            prop_assert_eq!(bits_to_u64(&evaluate(&c, &input).unwrap().outputs), popcount_ref(&input));
        }
    }

    #[test]
    fn restricted_counter_counts(
        m in 2usize..300,
        f in 4usize..20,
        arity in 2usize..5,
        m_delay in 1u32..5,
        seed in any::<u64>(),
    ) {
        let p = HardwareProfile::new(12, 14, m_delay, f, f).unwrap();
        let c = build_popc_restricted(m, &p, arity).unwrap();
        prop_assert!(validate(&c.net, &p).is_empty());
        prop_assert!(path_uniform(&c.net).unwrap());
        prop_assert_eq!(c.outputs().len(), 64 - (m as u64).leading_zeros() as usize);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs: Vec<Vec<bool>> = (0..12)
            .map(|_| {
                let d = rng.gen_range(0.0..1.0);
                (0..m).map(|_| rng.gen_bool(d)).collect()
            })
            .collect();
        let outs = stream(&c, &inputs, 1).unwrap();
        for (i, o) in inputs.iter().zip(&outs) {
            prop_assert_eq!(bits_to_u64(o), popcount_ref(i));
        }
    }

    #[test]
    fn binary_sum_adds(values in prop::collection::vec(0u64..4096, 2..9), l in 1usize..13) {
        let mask = (1u64 << l) - 1;
        let values: Vec<u64> = values.into_iter().map(|v| v & mask).collect();
        let c = build_sum_tc(values.len(), l).unwrap();
        let input: Vec<bool> = values.iter().flat_map(|&v| (0..l).map(move |i| v >> i & 1 == 1)).collect();
        let out = evaluate(&c, &input).unwrap().outputs;
        prop_assert_eq!(num_bigint::BigUint::from(bits_to_u64(&out)), sum_ref(&values));
    }
}
