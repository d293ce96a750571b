//! Coordinate and compressed-row sparse matrices.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Triplet accumulator. Duplicates are summed on conversion to CSR.
#[derive(Clone, Debug, Default)]
pub struct CooMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CooMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        CooMatrix {
            nrows,
            ncols,
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.rows.push(row);
        self.cols.push(col);
        self.vals.push(value);
    }

    pub fn nnz_stored(&self) -> usize {
        self.vals.len()
    }

    /// Duplicates are summed in insertion order, so the result does not
    /// depend on anything but the push sequence.
    pub fn to_csr(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.nrows + 1];
        for &r in &self.rows {
            counts[r + 1] += 1;
        }
        for i in 0..self.nrows {
            counts[i + 1] += counts[i];
        }
        // bucket by row, stable
        let mut order = vec![0usize; self.vals.len()];
        let mut next = counts.clone();
        for (k, &r) in self.rows.iter().enumerate() {
            order[next[r]] = k;
            next[r] += 1;
        }
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.nrows {
            let slice = &mut order[counts[r]..counts[r + 1]];
            slice.sort_by_key(|&k| self.cols[k]);
            let mut last = usize::MAX;
            for &k in slice.iter() {
                if self.cols[k] == last {
                    *values.last_mut().unwrap() += self.vals[k];
                } else {
                    col_idx.push(self.cols[k]);
                    values.push(self.vals[k]);
                    last = self.cols[k];
                }
            }
            row_ptr[r + 1] = col_idx.len();
        }
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of one row, columns ascending.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(&c, v)| v * x[c]).sum()
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (r, row) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                row[c] = v;
            }
        }
        d
    }

    /// max |A_ij - A_ji| over stored entries.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    /// One `row col value` line per stored entry, row-major.
    pub fn to_coordinate_text(&self) -> String {
        let mut s = String::new();
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                writeln!(s, "{r} {c} {v:?}").unwrap();
            }
        }
        s
    }

    pub fn write_coordinate(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_coordinate_text()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_summed_and_sorted() {
        let mut coo = CooMatrix::new(3, 3);
        coo.push(2, 0, 1.0);
        coo.push(0, 2, 2.0);
        coo.push(0, 0, 1.5);
        coo.push(0, 2, 0.25);
        coo.push(1, 1, 4.0);
        let a = coo.to_csr();
        assert_eq!(a.nnz(), 4);
        assert_eq!(a.get(0, 2), 2.25);
        assert_eq!(a.row(0).0, &[0, 2]);
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![3.75, 4.0, 1.0]);
        assert_eq!(
            a.to_coordinate_text(),
            "0 0 1.5\n0 2 2.25\n1 1 4.0\n2 0 1.0\n"
        );
        assert_eq!(a.asymmetry(), 2.25 - 1.0);
    }

    #[test]
    fn empty_rows() {
        let mut coo = CooMatrix::new(3, 2);
        coo.push(1, 1, 1.0);
        let a = coo.to_csr();
        assert_eq!(a.row(0).0.len(), 0);
        assert_eq!(a.row(2).0.len(), 0);
        assert_eq!(
            a.to_dense(),
            vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]
        );
    }
}
