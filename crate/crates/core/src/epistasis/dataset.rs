//! Genotype matrices and their one-hot, class-split form.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DatasetError {
    #[error("dataset is empty")]
    Empty,
    #[error("row {row}: expected {expected} columns, found {found}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("row {row}, column {col}: genotype `{value}` is not 0, 1 or 2")]
    Genotype { row: usize, col: usize, value: String },
    #[error("row {row}: class `{value}` is not 0 or 1")]
    Class { row: usize, value: String },
    #[error("need at least 2 SNP columns, found {0}")]
    TooFewSnps(usize),
}

/// `M` samples by `N` SNPs, genotypes in {0,1,2}, plus one class label per
/// sample (0 control, 1 case).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenotypeDataset {
    samples: usize,
    snps: usize,
    genotypes: Vec<u8>,
    classes: Vec<u8>,
}

impl GenotypeDataset {
    pub fn new(rows: Vec<Vec<u8>>, classes: Vec<u8>) -> Result<Self, DatasetError> {
        if rows.is_empty() {
            return Err(DatasetError::Empty);
        }
        let snps = rows[0].len();
        if snps < 2 {
            return Err(DatasetError::TooFewSnps(snps));
        }
        if classes.len() != rows.len() {
            return Err(DatasetError::Ragged {
                row: classes.len().min(rows.len()),
                expected: rows.len(),
                found: classes.len(),
            });
        }
        let mut genotypes = Vec::with_capacity(rows.len() * snps);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != snps {
                return Err(DatasetError::Ragged {
                    row,
                    expected: snps + 1,
                    found: r.len() + 1,
                });
            }
            for (col, &g) in r.iter().enumerate() {
                if g > 2 {
                    return Err(DatasetError::Genotype {
                        row,
                        col,
                        value: g.to_string(),
                    });
                }
            }
            genotypes.extend_from_slice(r);
        }
        for (row, &c) in classes.iter().enumerate() {
            if c > 1 {
                return Err(DatasetError::Class {
                    row,
                    value: c.to_string(),
                });
            }
        }
        Ok(GenotypeDataset {
            samples: rows.len(),
            snps,
            genotypes,
            classes,
        })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn snps(&self) -> usize {
        self.snps
    }

    pub fn genotype(&self, sample: usize, snp: usize) -> u8 {
        self.genotypes[sample * self.snps + snp]
    }

    pub fn class(&self, sample: usize) -> u8 {
        self.classes[sample]
    }

    pub fn classes(&self) -> &[u8] {
        &self.classes
    }

    pub fn count_class(&self, class: u8) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    /// Restricts the dataset to the given samples, preserving order.
    pub fn subset(&self, samples: &[usize]) -> Self {
        let mut genotypes = Vec::with_capacity(samples.len() * self.snps);
        for &s in samples {
            genotypes.extend_from_slice(&self.genotypes[s * self.snps..(s + 1) * self.snps]);
        }
        GenotypeDataset {
            samples: samples.len(),
            snps: self.snps,
            genotypes,
            classes: samples.iter().map(|&s| self.classes[s]).collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for s in 0..self.samples {
            for j in 0..self.snps {
                out.push((b'0' + self.genotype(s, j)) as char);
                out.push(',');
            }
            out.push((b'0' + self.classes[s]) as char);
            out.push('\n');
        }
        out
    }
}

/// Parses comma-separated rows: `N` genotype columns then the class column.
/// A first line that does not parse as integers is treated as a header.
pub fn load_dataset(text: &str) -> Result<GenotypeDataset, DatasetError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let is_header = |l: &str| l.split(',').any(|f| f.trim().parse::<i64>().is_err());
    let body = match lines.first() {
        Some((_, first)) if is_header(first) => &lines[1..],
        _ => &lines[..],
    };
    if body.is_empty() {
        return Err(DatasetError::Empty);
    }
    let width = body[0].1.split(',').count();
    if width < 3 {
        return Err(DatasetError::TooFewSnps(width.saturating_sub(1)));
    }
    let mut rows = Vec::with_capacity(body.len());
    let mut classes = Vec::with_capacity(body.len());
    for (row, &(_, line)) in body.iter().enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != width {
            return Err(DatasetError::Ragged {
                row,
                expected: width,
                found: fields.len(),
            });
        }
        let mut genos = Vec::with_capacity(width - 1);
        for (col, f) in fields[..width - 1].iter().enumerate() {
            match f.parse::<u8>() {
                Ok(g) if g <= 2 => genos.push(g),
                _ => {
                    return Err(DatasetError::Genotype {
                        row,
                        col,
                        value: f.to_string(),
                    })
                }
            }
        }
        let cls = fields[width - 1];
        match cls.parse::<u8>() {
            Ok(c) if c <= 1 => classes.push(c),
            _ => {
                return Err(DatasetError::Class {
                    row,
                    value: cls.to_string(),
                })
            }
        }
        rows.push(genos);
    }
    GenotypeDataset::new(rows, classes)
}

/// 3-bit one-hot genotype code: 0 -> 100, 1 -> 010, 2 -> 001.
pub fn one_hot(genotype: u8) -> [bool; 3] {
    let mut bits = [false; 3];
    bits[genotype as usize] = true;
    bits
}

/// The samples of one class with their one-hot SNP patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassHalf {
    pub class: u8,
    /// Indices into the original dataset.
    pub samples: Vec<usize>,
    /// `patterns[snp][i]` is the one-hot code of SNP `snp` in sample `samples[i]`.
    pub patterns: Vec<Vec<[bool; 3]>>,
}

impl ClassHalf {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn snps(&self) -> usize {
        self.patterns.len()
    }

    /// Keeps only the samples at positions `range` (used for sharding).
    pub fn slice(&self, range: std::ops::Range<usize>) -> ClassHalf {
        ClassHalf {
            class: self.class,
            samples: self.samples[range.clone()].to_vec(),
            patterns: self.patterns.iter().map(|p| p[range.clone()].to_vec()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinarizedSplit {
    pub controls: ClassHalf,
    pub cases: ClassHalf,
}

pub fn binarize(ds: &GenotypeDataset) -> BinarizedSplit {
    let half = |class: u8| {
        let samples: Vec<usize> = (0..ds.samples()).filter(|&s| ds.class(s) == class).collect();
        let patterns = (0..ds.snps())
            .map(|j| samples.iter().map(|&s| one_hot(ds.genotype(s, j))).collect())
            .collect();
        ClassHalf {
            class,
            samples,
            patterns,
        }
    };
    BinarizedSplit {
        controls: half(0),
        cases: half(1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rows_and_class_column() {
        let ds = load_dataset("0,1,2,1\n2,2,0,0\n").unwrap();
        assert_eq!((ds.samples(), ds.snps()), (2, 3));
        assert_eq!(ds.classes(), &[1, 0]);
        assert_eq!(ds.genotype(0, 2), 2);
        assert_eq!(load_dataset(&ds.to_csv()).unwrap(), ds);
    }

    #[test]
    fn header_is_optional() {
        let ds = load_dataset("a,b,c,class\n0,1,2,1\n").unwrap();
        assert_eq!(ds.samples(), 1);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(
            load_dataset("0,3,1,0\n"),
            Err(DatasetError::Genotype { row: 0, col: 1, .. })
        ));
        assert!(matches!(
            load_dataset("0,1,1,2\n"),
            Err(DatasetError::Class { row: 0, .. })
        ));
        assert!(matches!(
            load_dataset("0,1,1,0\n0,1,0\n"),
            Err(DatasetError::Ragged { row: 1, .. })
        ));
        assert_eq!(load_dataset(""), Err(DatasetError::Empty));
        assert_eq!(load_dataset("\n\n"), Err(DatasetError::Empty));
    }

    #[test]
    fn one_hot_codes() {
        assert_eq!(one_hot(0), [true, false, false]);
        assert_eq!(one_hot(1), [false, true, false]);
        assert_eq!(one_hot(2), [false, false, true]);
    }

    #[test]
    fn binarize_splits_by_class() {
        let ds = load_dataset("0,1,2,1\n2,2,0,0\n").unwrap();
        let split = binarize(&ds);
        assert_eq!(split.cases.samples, vec![0]);
        assert_eq!(split.controls.samples, vec![1]);
        assert_eq!(split.cases.patterns[1], vec![one_hot(1)]);
        for half in [&split.cases, &split.controls] {
            for snp in &half.patterns {
                for p in snp {
                    assert_eq!(p.iter().filter(|&&b| b).count(), 1);
                }
            }
        }
        assert_eq!(split.cases.len() + split.controls.len(), ds.samples());
    }
}
