//! Sparse LDLᵀ factorization without pivoting.
//!
//! Up-looking algorithm driven by the elimination tree. It is stable for
//! symmetric positive definite and for symmetric quasidefinite matrices,
//! which covers every matrix the solver factors. Fill is controlled by a
//! geometric nested-dissection ordering of the interior grid.

use super::SparseSym;
use crate::{Error, Real, Result};

/// Nested-dissection ordering of the `(n−1)²` interior nodes of the uniform
/// mesh, dofs numbered lexicographically.
///
/// A full grid line separates the two halves even with the diagonal
/// couplings of the triangulation, so the recursion splits along the
/// longer side.
pub fn grid_nested_dissection(n: usize) -> Vec<usize> {
    let m = n.saturating_sub(1);
    let mut order = Vec::with_capacity(m * m);
    dissect(m, 0, m, 0, m, &mut order);
    order
}

fn dissect(m: usize, x0: usize, x1: usize, y0: usize, y1: usize, out: &mut Vec<usize>) {
    let (w, h) = (x1 - x0, y1 - y0);
    if w == 0 || h == 0 {
        return;
    }
    if w * h <= 16 {
        for j in y0..y1 {
            for i in x0..x1 {
                out.push(j * m + i);
            }
        }
        return;
    }
    if w >= h {
        let s = x0 + w / 2;
        dissect(m, x0, s, y0, y1, out);
        dissect(m, s + 1, x1, y0, y1, out);
        for j in y0..y1 {
            out.push(j * m + s);
        }
    } else {
        let s = y0 + h / 2;
        dissect(m, x0, x1, y0, s, out);
        dissect(m, x0, x1, s + 1, y1, out);
        for i in x0..x1 {
            out.push(s * m + i);
        }
    }
}

/// Expands a node ordering to `blocks` interleaved unknowns per node, for
/// block systems laid out as `[block 0 | block 1 | …]`.
pub fn interleave(node_order: &[usize], blocks: usize) -> Vec<usize> {
    let nd = node_order.len();
    let mut perm = Vec::with_capacity(nd * blocks);
    for &v in node_order {
        for b in 0..blocks {
            perm.push(b * nd + v);
        }
    }
    perm
}

#[derive(Debug, Clone)]
pub struct SparseLdlt<T> {
    dim: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    l_values: Vec<T>,
    d: Vec<T>,
}

impl<T: Real> SparseLdlt<T> {
    /// Factors `P A Pᵀ = L D Lᵀ`, with `perm[new] = old` (identity if `None`).
    pub fn factor(a: &SparseSym<T>, perm: Option<&[usize]>) -> Result<Self> {
        let n = a.dim();
        let perm: Vec<usize> = match perm {
            Some(p) => {
                if p.len() != n {
                    return Err(Error::Dimension {
                        expected: n,
                        got: p.len(),
                    });
                }
                p.to_vec()
            }
            None => (0..n).collect(),
        };
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        // upper triangle of the permuted matrix, column by column
        let mut cnt = vec![0usize; n + 1];
        for old_i in 0..n {
            let i = inv[old_i];
            for (old_j, _) in a.row(old_i) {
                let j = inv[old_j];
                if i <= j {
                    cnt[j + 1] += 1;
                }
            }
        }
        for k in 0..n {
            cnt[k + 1] += cnt[k];
        }
        let ap = cnt.clone();
        let mut ai = vec![0usize; ap[n]];
        let mut ax = vec![T::zero(); ap[n]];
        let mut next = cnt;
        for old_i in 0..n {
            let i = inv[old_i];
            for (old_j, v) in a.row(old_i) {
                let j = inv[old_j];
                if i <= j {
                    ai[next[j]] = i;
                    ax[next[j]] = v;
                    next[j] += 1;
                }
            }
        }

        // symbolic: elimination tree and column counts
        const NONE: usize = usize::MAX;
        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for p in ap[k]..ap[k + 1] {
                let mut i = ai[p];
                while i < k && flag[i] != k {
                    if parent[i] == NONE {
                        parent[i] = k;
                    }
                    lnz[i] += 1;
                    flag[i] = k;
                    i = parent[i];
                }
            }
        }
        let mut lp = vec![0usize; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + lnz[k];
        }

        // numeric
        let total = lp[n];
        let mut li = vec![0usize; total];
        let mut lx = vec![T::zero(); total];
        let mut d = vec![T::zero(); n];
        let mut y = vec![T::zero(); n];
        let mut pattern = vec![0usize; n];
        lnz.iter_mut().for_each(|c| *c = 0);
        flag.iter_mut().for_each(|f| *f = NONE);
        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            for p in ap[k]..ap[k + 1] {
                let mut i = ai[p];
                y[i] += ax[p];
                let mut len = 0;
                while flag[i] != k {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = k;
                    i = parent[i];
                }
                while len > 0 {
                    top -= 1;
                    len -= 1;
                    pattern[top] = pattern[len];
                }
            }
            d[k] = y[k];
            y[k] = T::zero();
            while top < n {
                let i = pattern[top];
                top += 1;
                let yi = y[i];
                y[i] = T::zero();
                let end = lp[i] + lnz[i];
                for p in lp[i]..end {
                    y[li[p]] -= lx[p] * yi;
                }
                let l_ki = yi / d[i];
                d[k] -= l_ki * yi;
                li[end] = k;
                lx[end] = l_ki;
                lnz[i] += 1;
            }
            if d[k] == T::zero() || !d[k].is_finite() {
                return Err(Error::ZeroPivot(k));
            }
        }

        Ok(Self {
            dim: n,
            perm,
            col_ptr: lp,
            row_idx: li,
            l_values: lx,
            d,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nonzeros of the strictly lower factor.
    pub fn nnz_l(&self) -> usize {
        self.l_values.len()
    }

    /// Number of negative pivots, the inertia count of negative eigenvalues.
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&v| v < T::zero()).count()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T], x: &mut [T]) {
        let n = self.dim;
        let mut w: Vec<T> = self.perm.iter().map(|&old| b[old]).collect();
        for j in 0..n {
            let wj = w[j];
            if wj != T::zero() {
                for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                    w[self.row_idx[p]] -= self.l_values[p] * wj;
                }
            }
        }
        for j in 0..n {
            w[j] /= self.d[j];
        }
        for j in (0..n).rev() {
            let mut s = w[j];
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                s -= self.l_values[p] * w[self.row_idx[p]];
            }
            w[j] = s;
        }
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = w[new];
        }
    }

    pub fn solve_vec(&self, b: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.dim];
        self.solve(b, &mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_dissection_is_a_permutation() {
        for n in [1, 2, 3, 9, 17, 32] {
            let mut p = grid_nested_dissection(n);
            p.sort_unstable();
            let m = n.saturating_sub(1);
            assert_eq!(p, (0..m * m).collect::<Vec<_>>());
        }
    }

    #[test]
    fn quasidefinite_two_by_two() {
        let a =
            SparseSym::from_triplets(2, &[(0, 0, 2.0f64), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -3.0)]);
        let f = SparseLdlt::factor(&a, Some(&[1, 0])).unwrap();
        let x = f.solve_vec(&[3.0, -2.0]);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        assert_eq!(f.negative_pivots(), 1);
    }
}
