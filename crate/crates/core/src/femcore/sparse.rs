use std::io::{self, Write};

use crate::{Error, Real, Result};

/// Symmetric sparse matrix in compressed row storage.
///
/// Both triangles are stored, so a row slice lists every nonzero of that
/// row and `matvec` is a plain CSR product. Column indices are sorted
/// within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> SparseSym<T> {
    /// Builds from `(row, col, value)` triplets, summing duplicates.
    ///
    /// The caller supplies both `(i, j)` and `(j, i)` for off-diagonal entries.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut counts = vec![0usize; dim + 1];
        for &(i, _, _) in triplets {
            counts[i + 1] += 1;
        }
        for i in 0..dim {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![T::zero(); triplets.len()];
        for &(i, j, v) in triplets {
            let p = next[i];
            cols[p] = j;
            vals[p] = v;
            next[i] += 1;
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut scratch: Vec<(usize, T)> = Vec::new();
        for i in 0..dim {
            scratch.clear();
            scratch.extend((counts[i]..counts[i + 1]).map(|p| (cols[p], vals[p])));
            scratch.sort_by_key(|e| e.0);
            let mut last = usize::MAX;
            for &(j, v) in &scratch {
                if j == last {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                    last = j;
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            dim,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: (0..=dim).collect(),
            col_idx: (0..dim).collect(),
            values: vec![T::one(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(p) => self.values[r.start + p],
            Err(_) => T::zero(),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        for i in 0..self.dim {
            let mut s = T::zero();
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[p] * x[self.col_idx[p]];
            }
            y[i] = s;
        }
    }

    pub fn mul(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim];
        self.matvec(x, &mut y);
        y
    }

    /// `y += a A x`.
    pub fn matvec_add(&self, a: T, x: &[T], y: &mut [T]) {
        for i in 0..self.dim {
            let mut s = T::zero();
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[p] * x[self.col_idx[p]];
            }
            y[i] += a * s;
        }
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        let mut s = T::zero();
        for i in 0..self.dim {
            let mut r = T::zero();
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                r += self.values[p] * y[self.col_idx[p]];
            }
            s += x[i] * r;
        }
        s
    }

    pub fn scaled(&self, a: T) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= a);
        out
    }

    pub fn same_pattern(&self, other: &Self) -> bool {
        self.dim == other.dim && self.row_ptr == other.row_ptr && self.col_idx == other.col_idx
    }

    /// `a A + b B` for two matrices with an identical sparsity pattern.
    pub fn combine(a: T, ma: &Self, b: T, mb: &Self) -> Result<Self> {
        if !ma.same_pattern(mb) {
            return Err(Error::Invalid(
                "combine needs identical sparsity patterns".into(),
            ));
        }
        let values = ma
            .values
            .iter()
            .zip(&mb.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Ok(Self {
            dim: ma.dim,
            row_ptr: ma.row_ptr.clone(),
            col_idx: ma.col_idx.clone(),
            values,
        })
    }

    /// Largest `|a_ij − a_ji|`.
    pub fn symmetry_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.dim]; self.dim];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }

    /// Matrix Market coordinate dump of the full matrix.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.dim, self.dim, self.nnz())?;
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let a = SparseSym::from_triplets(
            2,
            &[
                (1, 1, 2.0),
                (0, 1, 1.0),
                (0, 0, 1.0),
                (1, 0, 1.0),
                (1, 1, 3.0),
            ],
        );
        assert_eq!(a.col_idx(), &[0, 1, 0, 1]);
        assert_eq!(a.get(1, 1), 5.0);
        assert_eq!(a.mul(&[1.0, 1.0]), vec![2.0, 6.0]);
        assert_eq!(a.bilinear(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
    }
}
