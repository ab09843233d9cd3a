//! A small compressed-sparse-row matrix.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Square matrix from per-row `(column, value)` lists sorted by column.
    pub fn from_rows(n: usize, rows: Vec<Vec<(u32, f64)>>) -> Self {
        Self::from_rows_rect(n, rows)
    }

    pub fn from_rows_rect(n_cols: usize, rows: Vec<Vec<(u32, f64)>>) -> Self {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        indptr.push(0);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for r in &rows {
            for &(j, v) in r {
                indices.push(j);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        CsrMatrix { n_rows: rows.len(), n_cols, indptr, indices, values }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let rows = d.iter().enumerate().map(|(i, &v)| if v == 0.0 { vec![] } else { vec![(i as u32, v)] }).collect();
        Self::from_rows(d.len(), rows)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().zip(&self.values[r]).map(|(&j, &v)| (j as usize, v))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|e| e.0 == j).map_or(0.0, |e| e.1)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_cols {
            return Err(Error::Shape { expected: self.n_cols, got: x.len() });
        }
        Ok((0..self.n_rows).into_par_iter().map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect())
    }

    pub fn transpose(&self) -> Self {
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); self.n_cols];
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                rows[j].push((i as u32, v));
            }
        }
        Self::from_rows_rect(self.n_rows, rows)
    }

    /// `self · other`.
    pub fn matmul(&self, other: &CsrMatrix) -> Result<Self> {
        if self.n_cols != other.n_rows {
            return Err(Error::Shape { expected: self.n_cols, got: other.n_rows });
        }
        let rows = (0..self.n_rows)
            .into_par_iter()
            .map(|i| {
                let mut acc: HashMap<u32, f64> = HashMap::new();
                for (k, a) in self.row(i) {
                    for (j, b) in other.row(k) {
                        *acc.entry(j as u32).or_default() += a * b;
                    }
                }
                let mut r: Vec<(u32, f64)> = acc.into_iter().filter(|e| e.1 != 0.0).collect();
                r.sort_unstable_by_key(|e| e.0);
                r
            })
            .collect();
        Ok(Self::from_rows_rect(other.n_cols, rows))
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: f64, other: &CsrMatrix, b: f64) -> Result<Self> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::Shape { expected: self.n_rows, got: other.n_rows });
        }
        let rows = (0..self.n_rows)
            .map(|i| {
                let mut acc: Vec<(u32, f64)> =
                    self.row(i).map(|(j, v)| (j as u32, a * v)).chain(other.row(i).map(|(j, v)| (j as u32, b * v))).collect();
                acc.sort_by_key(|e| e.0);
                let mut merged: Vec<(u32, f64)> = Vec::with_capacity(acc.len());
                for (j, v) in acc {
                    match merged.last_mut() {
                        Some(l) if l.0 == j => l.1 += v,
                        _ => merged.push((j, v)),
                    }
                }
                merged
            })
            .collect();
        Ok(Self::from_rows_rect(self.n_cols, rows))
    }

    /// `diag(left) · self · diag(right)`.
    pub fn scale(&self, left: &[f64], right: &[f64]) -> Self {
        let rows = (0..self.n_rows)
            .map(|i| self.row(i).map(|(j, v)| (j as u32, left[i] * v * right[j])).filter(|e| e.1 != 0.0).collect())
            .collect();
        Self::from_rows_rect(self.n_cols, rows)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|a_ij − a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        self.axpby(1.0, &self.transpose(), -1.0).map_or(f64::INFINITY, |d| d.max_abs())
    }

    /// Submatrix on the given rows and columns.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_map = vec![u32::MAX; self.n_cols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new as u32;
        }
        let out = rows
            .iter()
            .map(|&i| self.row(i).filter_map(|(j, v)| (col_map[j] != u32::MAX).then(|| (col_map[j], v))).collect())
            .collect();
        Self::from_rows_rect(cols.len(), out)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    /// Rows as `i,j,value` CSV lines, for inspection of small matrices.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,col,value\n");
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                s.push_str(&format!("{i},{j},{v:?}\n"));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_match_dense() {
        let a = CsrMatrix::from_rows_rect(3, vec![vec![(0, 1.0), (2, 2.0)], vec![(1, -1.0)]]);
        let b = a.transpose();
        let ab = a.matmul(&b).unwrap().to_dense();
        let expect = a.to_dense() * b.to_dense();
        assert_eq!(ab, expect);
        assert_eq!(a.matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![7.0, -2.0]);
        let s = a.axpby(2.0, &a, -1.0).unwrap();
        assert_eq!(s.to_dense(), a.to_dense());
        assert_eq!(a.restrict(&[1], &[1, 2]).to_dense()[(0, 0)], -1.0);
    }
}
