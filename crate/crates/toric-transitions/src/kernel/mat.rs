//! Arbitrary-precision integer matrices, Smith normal form, cokernel
//! presentations and overlattice coset enumeration.

use num::bigint::BigInt;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::kernel::rat::{rat, Rat};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        IntMatrix { rows, cols, entries }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix::new(rows, cols, vec![BigInt::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix::new(r, c, entries)
    }

    /// Build from rows of `BigInt` vectors.
    pub fn from_rows(rows: &[Vec<BigInt>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row.iter().cloned());
        }
        IntMatrix::new(r, c, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut BigInt {
        &mut self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> Vec<BigInt> {
        (0..self.cols).map(|c| self.at(r, c).clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *t.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let add = a * other.at(k, c);
                    *out.at_mut(r, c) += add;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.at(r, c) * &v[c]).sum())
            .collect()
    }

    /// Exact determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m: Vec<Vec<BigInt>> = (0..n).map(|r| self.row(r)).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                let swap = (k + 1..n).find(|&r| !m[r][k].is_zero());
                match swap {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = &num / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        sign * m[n - 1][n - 1].clone()
    }

    pub fn to_rat_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| Rat::from(self.at(r, c).clone())).collect())
            .collect()
    }
}

/// Result of a Smith normal form computation: `m = u * s * v` with `u`, `v`
/// unimodular and `s` diagonal with nonnegative, divisibility-chained entries.
#[derive(Debug, Clone)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `u`, tracked during elimination.
    pub u_inv: IntMatrix,
    /// Inverse of `v`, tracked during elimination.
    pub v_inv: IntMatrix,
    /// Number of nonzero diagonal entries of `s`.
    pub rank: usize,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s.at(i, i).clone()).collect()
    }
}

struct SnfState {
    s: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SnfState {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.s.cols() {
            let tmp = self.s.at(a, c).clone();
            *self.s.at_mut(a, c) = self.s.at(b, c).clone();
            *self.s.at_mut(b, c) = tmp;
        }
        // S := R S with R the swap; U := U R, U_inv := R U_inv.
        for r in 0..self.u.rows() {
            let tmp = self.u.at(r, a).clone();
            *self.u.at_mut(r, a) = self.u.at(r, b).clone();
            *self.u.at_mut(r, b) = tmp;
        }
        for c in 0..self.u_inv.cols() {
            let tmp = self.u_inv.at(a, c).clone();
            *self.u_inv.at_mut(a, c) = self.u_inv.at(b, c).clone();
            *self.u_inv.at_mut(b, c) = tmp;
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.s.rows() {
            let tmp = self.s.at(r, a).clone();
            *self.s.at_mut(r, a) = self.s.at(r, b).clone();
            *self.s.at_mut(r, b) = tmp;
        }
        // S := S C; V := C V (row swap), V_inv := V_inv C (col swap).
        for c in 0..self.v.cols() {
            let tmp = self.v.at(a, c).clone();
            *self.v.at_mut(a, c) = self.v.at(b, c).clone();
            *self.v.at_mut(b, c) = tmp;
        }
        for r in 0..self.v_inv.rows() {
            let tmp = self.v_inv.at(r, a).clone();
            *self.v_inv.at_mut(r, a) = self.v_inv.at(r, b).clone();
            *self.v_inv.at_mut(r, b) = tmp;
        }
    }

    /// row[i] += q * row[j] on S.
    fn add_row(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.s.cols() {
            let add = q * self.s.at(j, c);
            *self.s.at_mut(i, c) += add;
        }
        // U := U R^{-1}: col_j -= q * col_i; U_inv := R U_inv: row_i += q*row_j.
        for r in 0..self.u.rows() {
            let sub = q * self.u.at(r, i);
            *self.u.at_mut(r, j) -= sub;
        }
        for c in 0..self.u_inv.cols() {
            let add = q * self.u_inv.at(j, c);
            *self.u_inv.at_mut(i, c) += add;
        }
    }

    /// col[i] += q * col[j] on S.
    fn add_col(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.s.rows() {
            let add = q * self.s.at(r, j);
            *self.s.at_mut(r, i) += add;
        }
        // S := S C with C: col_i += q col_j. V := C^{-1} V: row_j -= q row_i.
        for c in 0..self.v.cols() {
            let sub = q * self.v.at(i, c);
            *self.v.at_mut(j, c) -= sub;
        }
        // V_inv := V_inv C: col_i += q col_j.
        for r in 0..self.v_inv.rows() {
            let add = q * self.v_inv.at(r, j);
            *self.v_inv.at_mut(r, i) += add;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.s.cols() {
            let v = -self.s.at(i, c).clone();
            *self.s.at_mut(i, c) = v;
        }
        for r in 0..self.u.rows() {
            let v = -self.u.at(r, i).clone();
            *self.u.at_mut(r, i) = v;
        }
        for c in 0..self.u_inv.cols() {
            let v = -self.u_inv.at(i, c).clone();
            *self.u_inv.at_mut(i, c) = v;
        }
    }
}

/// Smith normal form with transformation matrices and their inverses.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let rows = m.rows();
    let cols = m.cols();
    let mut st = SnfState {
        s: m.clone(),
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        v_inv: IntMatrix::identity(cols),
    };

    let mut n = 0usize;
    while n < rows && n < cols {
        // Reselect a pivot of minimal absolute value on every sweep; this
        // keeps quotients gcd-sized and entry growth under control.
        let select_pivot = |s: &IntMatrix| -> Option<(usize, usize)> {
            let mut pivot: Option<(usize, usize)> = None;
            for r in n..rows {
                for c in n..cols {
                    if s.at(r, c).is_zero() {
                        continue;
                    }
                    match &pivot {
                        None => pivot = Some((r, c)),
                        Some((pr, pc)) => {
                            if s.at(r, c).abs() < s.at(*pr, *pc).abs() {
                                pivot = Some((r, c));
                            }
                        }
                    }
                }
            }
            pivot
        };
        if select_pivot(&st.s).is_none() {
            break;
        }
        loop {
            let Some((pr, pc)) = select_pivot(&st.s) else { break };
            st.swap_rows(n, pr);
            st.swap_cols(n, pc);
            // One mod-reduction sweep of column n and row n.
            let mut clean = true;
            for r in n + 1..rows {
                if !st.s.at(r, n).is_zero() {
                    let q = -(st.s.at(r, n) / st.s.at(n, n));
                    st.add_row(r, n, &q);
                    if !st.s.at(r, n).is_zero() {
                        clean = false;
                    }
                }
            }
            for c in n + 1..cols {
                if !st.s.at(n, c).is_zero() {
                    let q = -(st.s.at(n, c) / st.s.at(n, n));
                    st.add_col(c, n, &q);
                    if !st.s.at(n, c).is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // Enforce divisibility of the trailing block by the pivot.
            let mut fixed = true;
            'scan: for r in n + 1..rows {
                for c in n + 1..cols {
                    if !(st.s.at(r, c) % st.s.at(n, n)).is_zero() {
                        let one = BigInt::one();
                        st.add_row(n, r, &one);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if st.s.at(n, n).is_negative() {
            st.negate_row(n);
        }
        n += 1;
    }

    let rank = (0..rows.min(cols)).take_while(|&i| !st.s.at(i, i).is_zero()).count();
    SnfResult {
        u: st.u,
        s: st.s,
        v: st.v,
        u_inv: st.u_inv,
        v_inv: st.v_inv,
        rank,
    }
}

/// Presentation of the cokernel of `m: Z^cols -> Z^rows`.
///
/// `projection` realizes the quotient map `Z^rows -> Z^free_rank (+) torsion`:
/// its first `free_rank` rows are the free coordinates, the remaining rows are
/// torsion coordinates to be read modulo the listed factors.
#[derive(Debug, Clone)]
pub struct CokernelPresentation {
    pub free_rank: usize,
    pub torsion_factors: Vec<BigInt>,
    pub projection: IntMatrix,
}

pub fn cokernel_presentation(m: &IntMatrix) -> CokernelPresentation {
    let snf = smith_normal_form(m);
    let rows = m.rows();
    let mut free_rows: Vec<usize> = Vec::new();
    let mut torsion_rows: Vec<usize> = Vec::new();
    let mut torsion_factors: Vec<BigInt> = Vec::new();
    for i in 0..rows {
        let d = if i < snf.rank { snf.s.at(i, i).clone() } else { BigInt::zero() };
        if d.is_zero() {
            free_rows.push(i);
        } else if !d.is_one() {
            torsion_rows.push(i);
            torsion_factors.push(d);
        }
    }
    let free_rank = free_rows.len();
    let mut proj = IntMatrix::zero(free_rank + torsion_rows.len(), rows);
    for (out_r, &src) in free_rows.iter().chain(torsion_rows.iter()).enumerate() {
        for c in 0..rows {
            *proj.at_mut(out_r, c) = snf.u_inv.at(src, c).clone();
        }
    }
    CokernelPresentation {
        free_rank,
        torsion_factors,
        projection: proj,
    }
}

/// Coset representatives of `{v in Q^cols : M v integral} / Z^cols`,
/// canonicalized with every coordinate in `[0, 1)` and sorted.
pub fn overlattice_cosets(m: &IntMatrix) -> Result<Vec<Vec<Rat>>> {
    let cols = m.cols();
    let snf = smith_normal_form(m);
    if snf.rank < cols {
        return Err(Error::NotFiniteIndex);
    }
    let diag = snf.diagonal();
    let mut cosets: Vec<Vec<Rat>> = vec![vec![]];
    for d in diag.iter().take(cols) {
        let mut next = Vec::new();
        for w in &cosets {
            let mut j = BigInt::zero();
            while &j < d {
                let mut ext = w.clone();
                ext.push(rat(j.clone(), d.clone()));
                next.push(ext);
                j += 1;
            }
        }
        cosets = next;
    }
    let vinv = snf.v_inv.to_rat_rows();
    let mut out: Vec<Vec<Rat>> = cosets
        .into_iter()
        .map(|w| {
            (0..cols)
                .map(|i| {
                    let mut acc = Rat::zero();
                    for (j, wj) in w.iter().enumerate() {
                        acc += &vinv[i][j] * wj;
                    }
                    crate::kernel::rat::frac_part(&acc)
                })
                .collect::<Vec<Rat>>()
        })
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}
