//! Per-tuple case/control counts and the χ² score.

use std::fmt::Write;

/// Counts for one SNP tuple. `cells[g]` holds `(cases, controls)` for the
/// genotype tuple whose base-3 digits, first SNP most significant, equal `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContingencyTable {
    pub snps: Vec<usize>,
    pub cells: Vec<(u64, u64)>,
}

impl ContingencyTable {
    pub fn zeros(snps: Vec<usize>) -> Self {
        let n = 3usize.pow(snps.len() as u32);
        ContingencyTable {
            snps,
            cells: vec![(0, 0); n],
        }
    }

    pub fn order(&self) -> usize {
        self.snps.len()
    }

    pub fn get(&self, genotypes: &[u8]) -> (u64, u64) {
        self.cells[genotype_index(genotypes)]
    }

    pub fn cases(&self) -> u64 {
        self.cells.iter().map(|c| c.0).sum()
    }

    pub fn controls(&self) -> u64 {
        self.cells.iter().map(|c| c.1).sum()
    }

    /// Adds another table over the same tuple cell by cell.
    pub fn merge(&mut self, other: &ContingencyTable) {
        assert_eq!(self.snps, other.snps);
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            a.0 += b.0;
            a.1 += b.1;
        }
    }
}

pub fn genotype_index(genotypes: &[u8]) -> usize {
    genotypes.iter().fold(0, |acc, &g| acc * 3 + g as usize)
}

pub fn genotype_tuple(index: usize, k: usize) -> Vec<u8> {
    let mut out = vec![0u8; k];
    let mut v = index;
    for slot in out.iter_mut().rev() {
        *slot = (v % 3) as u8;
        v /= 3;
    }
    out
}

/// All k-subsets of `0..n` in lexicographic order.
pub fn snp_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Pearson χ² over the 2×3^k table. Cells with zero expected count add 0.
pub fn chi_square(table: &ContingencyTable) -> f64 {
    let cases = table.cases() as f64;
    let controls = table.controls() as f64;
    let total = cases + controls;
    if total == 0.0 {
        return 0.0;
    }
    let mut score = 0.0;
    for &(a, b) in &table.cells {
        let col = (a + b) as f64;
        for (obs, row) in [(a as f64, cases), (b as f64, controls)] {
            let expected = row * col / total;
            if expected > 0.0 {
                score += (obs - expected).powi(2) / expected;
            }
        }
    }
    score
}

/// One CSV row per cell: `snp_ids..., genotype_tuple..., cases, controls[, chi2]`.
pub fn tables_to_csv(tables: &[ContingencyTable], with_chi2: bool) -> String {
    let mut out = String::new();
    let k = tables.first().map_or(0, |t| t.order());
    let mut header: Vec<String> = (0..k).map(|i| format!("snp{}", i + 1)).collect();
    header.extend((0..k).map(|i| format!("g{}", i + 1)));
    header.push("cases".into());
    header.push("controls".into());
    if with_chi2 {
        header.push("chi2".into());
    }
    writeln!(out, "{}", header.join(",")).unwrap();
    for t in tables {
        let chi = chi_square(t);
        for (g, &(a, b)) in t.cells.iter().enumerate() {
            let mut row: Vec<String> = t.snps.iter().map(|s| s.to_string()).collect();
            row.extend(genotype_tuple(g, t.order()).iter().map(|v| v.to_string()));
            row.push(a.to_string());
            row.push(b.to_string());
            if with_chi2 {
                row.push(format!("{chi:.6}"));
            }
            writeln!(out, "{}", row.join(",")).unwrap();
        }
    }
    out
}
