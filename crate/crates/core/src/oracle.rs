//! Brute-force reference answers used to check circuit outputs.

use std::collections::BTreeSet;

use num_bigint::BigUint;

use crate::epistasis::{ContingencyTable, GenotypeDataset};

pub fn parity_ref(bits: &[bool]) -> bool {
    bits.iter().fold(false, |acc, &b| acc ^ b)
}

pub fn popcount_ref(bits: &[bool]) -> u64 {
    bits.iter().filter(|&&b| b).count() as u64
}

pub fn sum_ref(values: &[u64]) -> BigUint {
    values.iter().map(|&v| BigUint::from(v)).sum()
}

pub fn repeat_ref(bits: &[bool], r: usize) -> Vec<bool> {
    bits.iter().flat_map(|&b| std::iter::repeat_n(b, r)).collect()
}

/// Bit `i` (0-based) of `pattern` set means a spike at `t + 1 + i` for every
/// trigger time `t`.
pub fn replay_ref(pattern: &[bool], triggers: &[u64]) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for &t in triggers {
        for (i, &b) in pattern.iter().enumerate() {
            if b {
                out.insert(t + 1 + i as u64);
            }
        }
    }
    out
}

/// One table per k-subset of SNPs, subsets in lexicographic order.
pub fn contingency_ref(ds: &GenotypeDataset, k: usize) -> Vec<ContingencyTable> {
    let n = ds.snps();
    let mut tables = Vec::new();
    let mut subset = Vec::with_capacity(k);
    subsets(n, k, 0, &mut subset, &mut |snps| {
        let mut cells = vec![(0u64, 0u64); 3usize.pow(k as u32)];
        for s in 0..ds.samples() {
            let mut idx = 0;
            for &j in snps {
                idx = idx * 3 + ds.genotype(s, j) as usize;
            }
            if ds.class(s) == 1 {
                cells[idx].0 += 1;
            } else {
                cells[idx].1 += 1;
            }
        }
        tables.push(ContingencyTable {
            snps: snps.to_vec(),
            cells,
        });
    });
    tables
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for j in start..n {
        cur.push(j);
        subsets(n, k, j + 1, cur, f);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits(s: &str) -> Vec<bool> {
        s.bytes().map(|c| c == b'1').collect()
    }

    #[test]
    fn parity_examples() {
        assert!(parity_ref(&bits("1011")));
        assert!(!parity_ref(&[]));
        assert!(!parity_ref(&bits("111111")));
    }

    #[test]
    fn popcount_examples() {
        assert_eq!(popcount_ref(&bits("1011011")), 5);
        assert_eq!(popcount_ref(&[false; 9]), 0);
        assert_eq!(popcount_ref(&[true; 64]), 64);
    }

    #[test]
    fn sum_examples() {
        assert_eq!(sum_ref(&[3, 3, 3]), BigUint::from(9u32));
        assert_eq!(sum_ref(&[]), BigUint::from(0u32));
        assert_eq!(sum_ref(&[(1 << 20) - 1; 8]), BigUint::from(8_388_600u32));
        assert_eq!(
            sum_ref(&[u64::MAX, u64::MAX]),
            BigUint::from(u64::MAX) * BigUint::from(2u32)
        );
    }

    #[test]
    fn repeat_examples() {
        assert_eq!(repeat_ref(&bits("010"), 3), bits("000111000"));
        assert!(repeat_ref(&[], 5).is_empty());
        assert_eq!(repeat_ref(&bits("1011"), 4), bits("1111000011111111"));
    }

    #[test]
    fn replay_offsets() {
        let got: Vec<u64> = replay_ref(&bits("101"), &[0, 10]).into_iter().collect();
        assert_eq!(got, vec![1, 3, 11, 13]);
    }

    #[test]
    fn single_sample_table() {
        let ds = GenotypeDataset::new(vec![vec![1, 2]], vec![1]).unwrap();
        let t = contingency_ref(&ds, 2);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].get(&[1, 2]), (1, 0));
        assert_eq!(t[0].cells.iter().filter(|c| **c != (0, 0)).count(), 1);
    }

    #[test]
    fn constant_snp_puts_all_mass_in_row_zero() {
        let rows = vec![vec![0, 1, 2], vec![0, 2, 2], vec![0, 0, 1]];
        let ds = GenotypeDataset::new(rows, vec![0, 1, 1]).unwrap();
        for t in contingency_ref(&ds, 2).iter().filter(|t| t.snps[0] == 0) {
            let outside: u64 = t.cells[3..].iter().map(|c| c.0 + c.1).sum();
            assert_eq!(outside, 0);
        }
    }

    // Second scan: genotype tuple outer, sample inner, explicit matching.
    fn contingency_by_tuple(ds: &GenotypeDataset, k: usize) -> Vec<ContingencyTable> {
        let n = ds.snps();
        let mut snps_list = Vec::new();
        match k {
            2 => {
                for a in 0..n {
                    for b in a + 1..n {
                        snps_list.push(vec![a, b]);
                    }
                }
            }
            3 => {
                for a in 0..n {
                    for b in a + 1..n {
                        for c in b + 1..n {
                            snps_list.push(vec![a, b, c]);
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        snps_list
            .into_iter()
            .map(|snps| {
                let mut cells = Vec::new();
                for g in 0..3usize.pow(k as u32) {
                    let mut want = vec![0u8; k];
                    let mut v = g;
                    for i in (0..k).rev() {
                        want[i] = (v % 3) as u8;
                        v /= 3;
                    }
                    let mut cases = 0;
                    let mut controls = 0;
                    for s in 0..ds.samples() {
                        if snps.iter().zip(&want).all(|(&j, &w)| ds.genotype(s, j) == w) {
                            if ds.class(s) == 1 {
                                cases += 1;
                            } else {
                                controls += 1;
                            }
                        }
                    }
                    cells.push((cases, controls));
                }
                ContingencyTable { snps, cells }
            })
            .collect()
    }

    fn random_dataset(rng: &mut ChaCha8Rng, m: usize, n: usize) -> GenotypeDataset {
        let rows = (0..m)
            .map(|_| (0..n).map(|_| rng.gen_range(0..3)).collect())
            .collect();
        let classes = (0..m).map(|_| rng.gen_range(0..2)).collect();
        GenotypeDataset::new(rows, classes).unwrap()
    }

    #[test]
    fn random_64x8_matches_reordered_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ds = random_dataset(&mut rng, 64, 8);
        for k in [2, 3] {
            let a = contingency_ref(&ds, k);
            assert_eq!(a, contingency_by_tuple(&ds, k));
            for t in &a {
                assert_eq!(t.cases() as usize, ds.count_class(1));
                assert_eq!(t.controls() as usize, ds.count_class(0));
            }
        }
    }

    proptest! {
        #[test]
        fn popcount_of_complement(v in proptest::collection::vec(any::<bool>(), 0..200)) {
            let not: Vec<bool> = v.iter().map(|b| !b).collect();
            prop_assert_eq!(popcount_ref(&v) + popcount_ref(&not), v.len() as u64);
        }

        #[test]
        fn parity_is_popcount_mod_two(v in proptest::collection::vec(any::<bool>(), 0..200)) {
            prop_assert_eq!(parity_ref(&v), popcount_ref(&v) % 2 == 1);
        }

        #[test]
        fn tables_conserve_class_counts(seed in any::<u64>(), m in 1usize..40, n in 2usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ds = random_dataset(&mut rng, m, n);
            for t in contingency_ref(&ds, 2) {
                prop_assert_eq!(t.cases() + t.controls(), m as u64);
                prop_assert_eq!(t.cases() as usize, ds.count_class(1));
            }
        }
    }
}
