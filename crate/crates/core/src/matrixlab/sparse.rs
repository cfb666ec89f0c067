use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// A finite section of an evolution matrix, stored by columns.
///
/// `interior_cols` and `interior_rows` name the indices whose column or row
/// is complete, i.e. unaffected by the truncation. Only those are ever used
/// in unitarity claims.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedMatrix {
    rows: usize,
    cols: usize,
    /// `columns[c]` is sorted by row and has no explicit zeros.
    columns: Vec<Vec<(usize, Complex64)>>,
    pub interior_cols: Vec<usize>,
    pub interior_rows: Vec<usize>,
    /// Optional basis labels, one per row.
    pub labels: Vec<String>,
}

impl TruncatedMatrix {
    /// Builds from unsorted `(row, value)` lists; duplicates are summed.
    /// Every index is interior.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, Complex64)>>) -> Result<Self> {
        let cols = columns.len();
        let mut out = Vec::with_capacity(cols);
        for col in columns {
            let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
            for (r, v) in col {
                if r >= rows {
                    return Err(Error::Dimension(format!("row {r} outside 0..{rows}")));
                }
                *acc.entry(r).or_default() += v;
            }
            out.push(
                acc.into_iter()
                    .filter(|(_, v)| *v != Complex64::default())
                    .collect(),
            );
        }
        Ok(TruncatedMatrix {
            rows,
            cols,
            columns: out,
            interior_cols: (0..cols).collect(),
            interior_rows: (0..rows).collect(),
            labels: Vec::new(),
        })
    }

    pub fn from_dense(dense: &[Vec<Complex64>]) -> Result<Self> {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        if dense.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged dense matrix".into()));
        }
        let columns = (0..cols)
            .map(|c| (0..rows).map(|r| (r, dense[r][c])).collect())
            .collect();
        TruncatedMatrix::from_columns(rows, columns)
    }

    pub fn identity(n: usize) -> Self {
        let columns = (0..n)
            .map(|i| vec![(i, Complex64::new(1.0, 0.0))])
            .collect();
        TruncatedMatrix::from_columns(n, columns).expect("square identity")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, c: usize) -> &[(usize, Complex64)] {
        &self.columns[c]
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        match self.columns[c].binary_search_by_key(&r, |e| e.0) {
            Ok(i) => self.columns[c][i].1,
            Err(_) => Complex64::default(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Row-major view: `rows[r]` lists `(col, value)` sorted by column.
    pub fn row_lists(&self) -> Vec<Vec<(usize, Complex64)>> {
        let mut rows = vec![Vec::new(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                rows[r].push((c, v));
            }
        }
        rows
    }

    /// `(r, c, value)` in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let mut d = vec![vec![Complex64::default(); self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    /// `self · other`.
    pub fn mul(&self, other: &TruncatedMatrix) -> Result<TruncatedMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let columns = other
            .columns
            .iter()
            .map(|bcol| {
                let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
                for &(k, b) in bcol {
                    for &(r, a) in &self.columns[k] {
                        *acc.entry(r).or_default() += a * b;
                    }
                }
                acc.into_iter().collect()
            })
            .collect();
        TruncatedMatrix::from_columns(self.rows, columns)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &TruncatedMatrix) -> Result<f64> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension("shapes differ".into()));
        }
        let mut worst: f64 = 0.0;
        for c in 0..self.cols {
            let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
            for &(r, v) in &self.columns[c] {
                *acc.entry(r).or_default() += v;
            }
            for &(r, v) in &other.columns[c] {
                *acc.entry(r).or_default() -= v;
            }
            for v in acc.values() {
                worst = worst.max(v.norm());
            }
        }
        Ok(worst)
    }

    /// Submatrix on the given rows and columns, reindexed in the given order.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> TruncatedMatrix {
        let mut row_pos = vec![None; self.rows];
        for (i, &r) in rows.iter().enumerate() {
            row_pos[r] = Some(i);
        }
        let columns = cols
            .iter()
            .map(|&c| {
                self.columns[c]
                    .iter()
                    .filter_map(|&(r, v)| row_pos[r].map(|i| (i, v)))
                    .collect()
            })
            .collect();
        TruncatedMatrix::from_columns(rows.len(), columns).expect("indices come from self")
    }

    pub fn to_dump(&self) -> MatrixDump {
        MatrixDump {
            dim: self.rows.max(self.cols),
            rows: self.rows,
            cols: self.cols,
            triplets: self
                .triplets()
                .map(|(r, c, v)| (r, c, v.re, v.im))
                .collect(),
            labels: self.labels.clone(),
        }
    }

    /// Plain-text grid; entries are printed to four decimals.
    pub fn to_grid(&self) -> String {
        let cell = |v: Complex64| {
            if v == Complex64::default() {
                "0".to_string()
            } else if v.im == 0.0 {
                format!("{:.4}", v.re)
            } else {
                format!("({:.4},{:.4})", v.re, v.im)
            }
        };
        let dense = self.to_dense();
        let cells: Vec<Vec<String>> = dense
            .iter()
            .map(|row| row.iter().map(|&v| cell(v)).collect())
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        let mut out = String::new();
        for (r, row) in cells.iter().enumerate() {
            let line: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
            out.push_str(&line.join(" "));
            if let Some(l) = self.labels.get(r) {
                out.push_str("  ");
                out.push_str(l);
            }
            out.push('\n');
        }
        out
    }
}

/// JSON form of a truncated matrix: `triplets` are `[row, col, re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixDump {
    pub dim: usize,
    pub rows: usize,
    pub cols: usize,
    pub triplets: Vec<(usize, usize, f64, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}
