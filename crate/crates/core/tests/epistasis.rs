use proptest::prelude::*;
use tcepi::epistasis::{
    binarize, chi_square, load_dataset, one_hot, run_detection, synthesize, GenotypeDataset,
};
use tcepi::oracle::contingency_ref;
use tcepi::snn::{validate, HardwareProfile};

fn profile() -> HardwareProfile {
    HardwareProfile::new(16, 16, 4, 16, 16).unwrap()
}

fn arb_dataset(max_samples: usize, max_snps: usize) -> impl Strategy<Value = GenotypeDataset> {
    (1..=max_samples, 3..=max_snps).prop_flat_map(|(m, n)| {
        (
            prop::collection::vec(prop::collection::vec(0u8..3, n), m),
            prop::collection::vec(0u8..2, m),
        )
            .prop_map(|(rows, classes)| GenotypeDataset::new(rows, classes).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn detection_matches_reference(ds in arb_dataset(24, 6), k in 2usize..4) {
        let det = run_detection(&ds, k, &profile()).unwrap();
        let want = contingency_ref(&ds, k);
        prop_assert_eq!(&det.tables, &want);
        for t in &det.tables {
            prop_assert_eq!(t.cases() as usize, ds.count_class(1));
            prop_assert_eq!(t.controls() as usize, ds.count_class(0));
        }
    }

    #[test]
    fn tight_profiles_stay_legal_and_exact(
        ds in arb_dataset(12, 4),
        f in 4usize..9,
        m_delay in 1u32..4,
    ) {
        let p = HardwareProfile::new(10, 12, m_delay, f, f).unwrap();
        for syn in synthesize(&binarize(&ds), 2, &p).unwrap() {
            prop_assert!(validate(&syn.net, &p).is_empty());
        }
        prop_assert_eq!(run_detection(&ds, 2, &p).unwrap().tables, contingency_ref(&ds, 2));
    }
}

#[test]
fn parses_the_documented_example() {
    let ds = load_dataset("0,1,2,1\n2,2,0,0\n").unwrap();
    assert_eq!((ds.samples(), ds.snps()), (2, 3));
    assert_eq!(ds.classes(), &[1, 0]);
    assert!(load_dataset("0,3,1,0\n").is_err());
    assert!(load_dataset("").is_err());
}

#[test]
fn one_hot_layout() {
    assert_eq!(one_hot(0), [true, false, false]);
    assert_eq!(one_hot(1), [false, true, false]);
    assert_eq!(one_hot(2), [false, false, true]);
}

#[test]
fn identical_rows_put_all_mass_in_one_cell() {
    let rows = vec![vec![2, 0, 1, 1]; 10];
    let classes = (0..10).map(|s| (s % 3 == 0) as u8).collect();
    let ds = GenotypeDataset::new(rows, classes).unwrap();
    let det = run_detection(&ds, 2, &profile()).unwrap();
    for t in &det.tables {
        let g: Vec<u8> = t.snps.iter().map(|&j| ds.genotype(0, j)).collect();
        assert_eq!(t.get(&g), (4, 6));
        assert_eq!(t.cells.iter().filter(|c| **c != (0, 0)).count(), 1);
    }
}

#[test]
fn no_cases_gives_zero_case_counts() {
    let rows = vec![vec![0, 1, 2], vec![1, 1, 0], vec![2, 0, 0]];
    let ds = GenotypeDataset::new(rows, vec![0, 0, 0]).unwrap();
    let det = run_detection(&ds, 2, &profile()).unwrap();
    assert_eq!(det.runs.len(), 1);
    assert!(det.tables.iter().all(|t| t.cases() == 0 && t.controls() == 3));
    assert_eq!(det.tables, contingency_ref(&ds, 2));
}

#[test]
fn eight_snps_give_28_tables_and_run_length() {
    let rows: Vec<Vec<u8>> = (0..20).map(|s| (0..8).map(|j| ((s * 7 + j * 3) % 3) as u8).collect()).collect();
    let classes = (0..20).map(|s| (s % 2) as u8).collect();
    let ds = GenotypeDataset::new(rows, classes).unwrap();
    let det = run_detection(&ds, 2, &profile()).unwrap();
    assert_eq!(det.tables.len(), 28);
    for r in &det.runs {
        assert_eq!(r.timesteps, 9 * 28 + r.fill);
    }
}

#[test]
fn planted_interaction_scores_highest() {
    // Class is 1 exactly when SNPs 1 and 3 are both minor homozygous.
    let mut rows = Vec::new();
    let mut classes = Vec::new();
    for s in 0..81u32 {
        let g: Vec<u8> = (0..4).map(|j| ((s / 3u32.pow(j)) % 3) as u8).collect();
        classes.push((g[1] == 2 && g[3] == 2) as u8);
        rows.push(g);
    }
    let ds = GenotypeDataset::new(rows, classes).unwrap();
    let det = run_detection(&ds, 2, &profile()).unwrap();
    let best = det
        .tables
        .iter()
        .max_by(|a, b| chi_square(a).partial_cmp(&chi_square(b)).unwrap())
        .unwrap();
    assert_eq!(best.snps, vec![1, 3]);
}
