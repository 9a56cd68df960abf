//! Exact rational Gaussian elimination: reduced row echelon forms, kernels,
//! linear solves, and a canonical subspace representation.

use num::{One, Zero};

use crate::kernel::rat::{is_zero_vec, Rat};

/// Reduced row echelon form of `rows`, selecting pivots in the given column
/// priority order. Returns the nonzero rref rows together with the pivot
/// column of each row (in elimination order).
pub fn rref_with_order(rows: &[Vec<Rat>], col_order: &[usize]) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let mut work: Vec<Vec<Rat>> = rows.iter().filter(|r| !is_zero_vec(r)).cloned().collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut done_rows = 0usize;
    for &col in col_order {
        if done_rows == work.len() {
            break;
        }
        let Some(pos) = (done_rows..work.len()).find(|&r| !work[r][col].is_zero()) else {
            continue;
        };
        work.swap(done_rows, pos);
        let inv = work[done_rows][col].clone();
        for x in work[done_rows].iter_mut() {
            *x = &*x / &inv;
        }
        for r in 0..work.len() {
            if r != done_rows && !work[r][col].is_zero() {
                let factor = work[r][col].clone();
                let pivot_row = work[done_rows].clone();
                for (x, p) in work[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(p * &factor);
                }
            }
        }
        pivots.push(col);
        done_rows += 1;
    }
    work.truncate(done_rows);
    (work, pivots)
}

pub fn rref(rows: &[Vec<Rat>]) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let cols = rows.first().map_or(0, Vec::len);
    let order: Vec<usize> = (0..cols).collect();
    rref_with_order(rows, &order)
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    rref(rows).0.len()
}

/// Basis of the right kernel `{x : A x = 0}`.
pub fn kernel_basis(rows: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let (r, pivots) = rref(rows);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::one();
        for (row, &p) in r.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solve `A x = b` for one solution, if any.
pub fn solve(a_rows: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    assert_eq!(a_rows.len(), b.len());
    let cols = a_rows.first().map_or(0, Vec::len);
    let aug: Vec<Vec<Rat>> = a_rows
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let order: Vec<usize> = (0..cols).collect();
    let (r, pivots) = rref_with_order(&aug, &order);
    let mut x = vec![Rat::zero(); cols];
    for (row, &p) in r.iter().zip(&pivots) {
        x[p] = row[cols].clone();
    }
    // Verify consistency directly; rows reduced to (0 | nonzero) have no pivot.
    for (row, bi) in a_rows.iter().zip(b) {
        let lhs: Rat = row.iter().zip(&x).map(|(a, xi)| a * xi).sum();
        if lhs != *bi {
            return None;
        }
    }
    Some(x)
}

/// Express `b` in the spanning set `gens` (columns), if possible.
pub fn coordinates_in_span(gens: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let dim = b.len();
    let rows: Vec<Vec<Rat>> = (0..dim)
        .map(|i| gens.iter().map(|g| g[i].clone()).collect())
        .collect();
    solve(&rows, b)
}

/// A linear subspace of `Q^dim` held in canonical rref form, so equality of
/// subspaces is literal equality of representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    dim: usize,
    rows: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(dim: usize) -> Self {
        Subspace { dim, rows: vec![], pivots: vec![] }
    }

    pub fn from_spanning(dim: usize, vectors: &[Vec<Rat>]) -> Self {
        let (rows, pivots) = rref(vectors);
        Subspace { dim, rows, pivots }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.rows
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let factor = v[p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x = &*x - &(r * &factor);
                }
            }
        }
        is_zero_vec(&v)
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.dim, other.dim);
        let mut all = self.rows.clone();
        all.extend(other.rows.iter().cloned());
        Subspace::from_spanning(self.dim, &all)
    }

    /// Intersection computed via coefficients of combined kernels.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.dim, other.dim);
        if self.rows.is_empty() || other.rows.is_empty() {
            return Subspace::zero(self.dim);
        }
        // x = a^T U = b^T V; solve [U^T | -V^T] (a; b) = 0.
        let na = self.rows.len();
        let nb = other.rows.len();
        let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut row = Vec::with_capacity(na + nb);
            for a in &self.rows {
                row.push(a[i].clone());
            }
            for b in &other.rows {
                row.push(-b[i].clone());
            }
            rows.push(row);
        }
        let ker = kernel_basis(&rows, na + nb);
        let vectors: Vec<Vec<Rat>> = ker
            .into_iter()
            .map(|coef| {
                let mut v = vec![Rat::zero(); self.dim];
                for (c, a) in coef[..na].iter().zip(&self.rows) {
                    for (x, ai) in v.iter_mut().zip(a) {
                        *x = &*x + &(c * ai);
                    }
                }
                v
            })
            .collect();
        Subspace::from_spanning(self.dim, &vectors)
    }

    /// First basis vector of `self` outside `other`, if any. Used as a
    /// deterministic witness for failed space equalities.
    pub fn witness_not_in(&self, other: &Subspace) -> Option<Vec<Rat>> {
        self.rows.iter().find(|r| !other.contains(r)).cloned()
    }
}
