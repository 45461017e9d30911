//! Multi-label datasets in the extreme-classification text format.
//!
//! The first line is `m n L`. Each of the following `m` lines is
//! `l1,l2,... f1:v1 f2:v2 ...`: comma-separated 0-based label indices
//! (possibly empty) followed by 0-based `feature:value` pairs with strictly
//! increasing feature indices.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Paired feature matrix `A` (m x n) and binary label matrix `Y` (m x L).
#[derive(Clone, Debug, PartialEq)]
pub struct MultiLabelDataset {
    features: SparseMatrix,
    labels: SparseMatrix,
}

impl MultiLabelDataset {
    pub fn new(features: SparseMatrix, labels: SparseMatrix) -> Result<Self> {
        if features.n_rows() != labels.n_rows() {
            return Err(Error::domain(format!(
                "features have {} rows, labels have {}",
                features.n_rows(),
                labels.n_rows()
            )));
        }
        if labels.values().iter().any(|&v| v != 1.0) {
            return Err(Error::domain("label matrix must be binary"));
        }
        Ok(MultiLabelDataset { features, labels })
    }

    /// Dataset with no labels, used to store bare feature matrices.
    pub fn unlabeled(features: SparseMatrix) -> Self {
        let labels = SparseMatrix::zeros(features.n_rows(), 0);
        MultiLabelDataset { features, labels }
    }

    pub fn features(&self) -> &SparseMatrix {
        &self.features
    }

    pub fn labels(&self) -> &SparseMatrix {
        &self.labels
    }

    pub fn n_instances(&self) -> usize {
        self.features.n_rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_cols()
    }

    pub fn n_labels(&self) -> usize {
        self.labels.n_cols()
    }

    pub fn into_parts(self) -> (SparseMatrix, SparseMatrix) {
        (self.features, self.labels)
    }

    /// Keeps only the listed instances, in order.
    pub fn select_rows(&self, rows: &[usize]) -> MultiLabelDataset {
        MultiLabelDataset {
            features: self.features.select_rows(rows),
            labels: self.labels.select_rows(rows),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        Self::read(BufReader::new(file))
    }

    pub fn read(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(line) => line?,
            None => return Err(Error::parse(1, "missing header")),
        };
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 3 {
            return Err(Error::parse(1, "header must be `m n L`"));
        }
        let parse_count = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(1, format!("bad count `{s}` in header")))
        };
        let (m, n, n_labels) = (parse_count(dims[0])?, parse_count(dims[1])?, parse_count(dims[2])?);

        let mut feat_offsets = Vec::with_capacity(m + 1);
        let mut feat_cols = Vec::new();
        let mut feat_vals = Vec::new();
        let mut label_offsets = Vec::with_capacity(m + 1);
        let mut label_cols = Vec::new();
        feat_offsets.push(0);
        label_offsets.push(0);

        let mut row = 0;
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let line = line?;
            if row == m {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(Error::parse(line_no, format!("more than {m} instance lines")));
            }
            parse_instance(
                &line,
                line_no,
                n,
                n_labels,
                &mut label_cols,
                &mut feat_cols,
                &mut feat_vals,
            )?;
            feat_offsets.push(feat_cols.len());
            label_offsets.push(label_cols.len());
            row += 1;
        }
        if row != m {
            return Err(Error::parse(m + 1, format!("expected {m} instance lines, found {row}")));
        }

        let label_vals = vec![1.0; label_cols.len()];
        let features = SparseMatrix::from_csr(m, n, feat_offsets, feat_cols, feat_vals)?;
        let labels = SparseMatrix::from_csr(m, n_labels, label_offsets, label_cols, label_vals)?;
        Ok(MultiLabelDataset { features, labels })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Writes the text format; values use the shortest round-tripping representation.
    pub fn write(&self, w: &mut impl Write) -> Result<()> {
        writeln!(
            w,
            "{} {} {}",
            self.n_instances(),
            self.n_features(),
            self.n_labels()
        )?;
        let mut line = String::new();
        for i in 0..self.n_instances() {
            line.clear();
            let (labels, _) = self.labels.row(i);
            for (k, l) in labels.iter().enumerate() {
                if k > 0 {
                    line.push(',');
                }
                line.push_str(&l.to_string());
            }
            let (cols, vals) = self.features.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                line.push(' ');
                line.push_str(&format!("{j}:{v:?}"));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

fn parse_instance(
    line: &str,
    line_no: usize,
    n: usize,
    n_labels: usize,
    label_cols: &mut Vec<usize>,
    feat_cols: &mut Vec<usize>,
    feat_vals: &mut Vec<f64>,
) -> Result<()> {
    let line = line.trim_end_matches('\r');
    let mut tokens = line.split(' ').filter(|t| !t.is_empty()).peekable();
    let row_start = label_cols.len();
    // The label list is the first token unless it looks like a feature pair.
    if let Some(first) = tokens.peek() {
        if !first.contains(':') {
            let first = tokens.next().unwrap_or_default();
            for tok in first.split(',').filter(|t| !t.is_empty()) {
                let l: usize = tok
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad label `{tok}`")))?;
                if l >= n_labels {
                    return Err(Error::parse(
                        line_no,
                        format!("label index {l} >= L = {n_labels}"),
                    ));
                }
                label_cols.push(l);
            }
        }
    }
    let labels = &mut label_cols[row_start..];
    labels.sort_unstable();
    if labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::parse(line_no, "duplicate label"));
    }

    let mut prev: Option<usize> = None;
    for tok in tokens {
        let (idx, val) = tok
            .split_once(':')
            .ok_or_else(|| Error::parse(line_no, format!("expected index:value, got `{tok}`")))?;
        let j: usize = idx
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad feature index `{idx}`")))?;
        let v: f64 = val
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad feature value `{val}`")))?;
        if j >= n {
            return Err(Error::parse(line_no, format!("feature index {j} >= n = {n}")));
        }
        if !v.is_finite() {
            return Err(Error::parse(line_no, format!("non-finite value for feature {j}")));
        }
        match prev {
            Some(p) if p == j => {
                return Err(Error::parse(line_no, format!("duplicate feature {j}")));
            }
            Some(p) if p > j => {
                return Err(Error::parse(line_no, "feature indices must be strictly increasing"));
            }
            _ => {}
        }
        prev = Some(j);
        if v != 0.0 {
            feat_cols.push(j);
            feat_vals.push(v);
        }
    }
    Ok(())
}
