//! Exact rational linear programming, specialized to the strict feasibility
//! test behind anticone membership.
//!
//! Strictness is realized by maximizing a slack `s` subject to `a_i >= s` and
//! `sum a_i v_i = target`; the query is strictly feasible iff the optimum is
//! positive. A cap `s <= 1` keeps the program bounded without changing the
//! sign of the optimum.

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::kernel::rat::{is_zero_vec, Rat};

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Infeasible,
    Optimal { value: Rat, solution: Vec<Rat> },
}

/// Maximize `c . x` over `{x >= 0 : A x = b}` with the two-phase simplex
/// method and Bland's pivoting rule. Errors on unbounded programs.
pub fn simplex_maximize(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> Result<LpOutcome> {
    let m = a.len();
    let n = c.len();
    // Tableau columns: n structural + m artificial + rhs.
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for (row, bi) in a.iter().zip(b) {
        assert_eq!(row.len(), n);
        let flip = bi.is_negative();
        let mut r: Vec<Rat> = row
            .iter()
            .map(|x| if flip { -x.clone() } else { x.clone() })
            .collect();
        r.extend(std::iter::repeat(Rat::zero()).take(m + 1));
        let rhs = if flip { -bi.clone() } else { bi.clone() };
        *r.last_mut().unwrap() = rhs;
        t.push(r);
    }
    for (i, row) in t.iter_mut().enumerate() {
        row[n + i] = Rat::one();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let phase1_cost = |j: usize| -> Rat {
        if j < n {
            Rat::zero()
        } else {
            -Rat::one()
        }
    };
    run_simplex(&mut t, &mut basis, n + m, &phase1_cost)?;
    let phase1_value: Rat = basis
        .iter()
        .zip(t.iter())
        .map(|(&bj, row)| phase1_cost(bj) * row.last().unwrap())
        .sum();
    if phase1_value.is_negative() {
        return Ok(LpOutcome::Infeasible);
    }
    // Drive remaining artificial variables out of the basis.
    let mut drop_rows: Vec<usize> = Vec::new();
    for i in 0..basis.len() {
        if basis[i] >= n {
            match (0..n).find(|&j| !t[i][j].is_zero()) {
                Some(j) => pivot(&mut t, &mut basis, i, j),
                None => drop_rows.push(i),
            }
        }
    }
    for &i in drop_rows.iter().rev() {
        t.remove(i);
        basis.remove(i);
    }

    let phase2_cost = |j: usize| -> Rat {
        if j < n {
            c[j].clone()
        } else {
            Rat::zero()
        }
    };
    // Artificial columns are excluded from entering in phase 2.
    run_simplex(&mut t, &mut basis, n, &phase2_cost)?;
    let value: Rat = basis
        .iter()
        .zip(t.iter())
        .map(|(&bj, row)| phase2_cost(bj) * row.last().unwrap())
        .sum();
    let mut solution = vec![Rat::zero(); n];
    for (&bj, row) in basis.iter().zip(t.iter()) {
        if bj < n {
            solution[bj] = row.last().unwrap().clone();
        }
    }
    Ok(LpOutcome::Optimal { value, solution })
}

fn pivot(t: &mut [Vec<Rat>], basis: &mut [usize], row: usize, col: usize) {
    let inv = t[row][col].clone();
    for x in t[row].iter_mut() {
        *x = &*x / &inv;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let factor = r[col].clone();
        for (x, p) in r.iter_mut().zip(&pivot_row) {
            *x = &*x - &(p * &factor);
        }
    }
    basis[row] = col;
}

fn run_simplex(
    t: &mut Vec<Vec<Rat>>,
    basis: &mut Vec<usize>,
    entering_limit: usize,
    cost: &dyn Fn(usize) -> Rat,
) -> Result<()> {
    loop {
        let m = t.len();
        // Reduced costs: c_j - c_B . column_j, entering by Bland's rule.
        let mut entering: Option<usize> = None;
        for j in 0..entering_limit {
            if basis.contains(&j) {
                continue;
            }
            let mut reduced = cost(j);
            for i in 0..m {
                reduced = reduced - cost(basis[i]) * &t[i][j];
            }
            if reduced.is_positive() {
                entering = Some(j);
                break;
            }
        }
        let Some(j) = entering else { return Ok(()) };
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..m {
            if t[i][j].is_positive() {
                let ratio = t[i].last().unwrap() / &t[i][j];
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((i, _)) = leave else {
            return Err(Error::Internal("unbounded linear program".into()));
        };
        pivot(t, basis, i, j);
    }
}

/// Decide whether `target` is a strictly positive combination of `vectors`,
/// i.e. whether it lies in the open cone `{sum a_i v_i : a_i > 0}`.
/// Returns the witness coefficients when feasible.
pub fn strict_cone_feasibility(
    vectors: &[Vec<Rat>],
    target: &[Rat],
) -> Result<(bool, Option<Vec<Rat>>)> {
    if vectors.is_empty() {
        // The empty sum only expresses zero.
        return Ok((is_zero_vec(target), is_zero_vec(target).then(Vec::new)));
    }
    let d = target.len();
    let nv = vectors.len();
    for v in vectors {
        assert_eq!(v.len(), d, "generator dimension mismatch");
    }
    let sum: Vec<Rat> = (0..d)
        .map(|j| vectors.iter().map(|v| v[j].clone()).sum())
        .collect();
    // Variables: p_1..p_nv, s_plus, s_minus, cap slack.
    let n = nv + 3;
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(d + 1);
    for j in 0..d {
        let mut row = Vec::with_capacity(n);
        for v in vectors {
            row.push(v[j].clone());
        }
        row.push(sum[j].clone());
        row.push(-sum[j].clone());
        row.push(Rat::zero());
        a.push(row);
    }
    let mut cap = vec![Rat::zero(); n];
    cap[nv] = Rat::one();
    cap[nv + 2] = Rat::one();
    a.push(cap);
    let mut b: Vec<Rat> = target.to_vec();
    b.push(Rat::one());
    let mut c = vec![Rat::zero(); n];
    c[nv] = Rat::one();
    c[nv + 1] = -Rat::one();

    match simplex_maximize(&a, &b, &c)? {
        LpOutcome::Infeasible => Ok((false, None)),
        LpOutcome::Optimal { value, solution } => {
            if value.is_positive() {
                let s = &solution[nv] - &solution[nv + 1];
                let witness: Vec<Rat> = solution[..nv].iter().map(|p| p + &s).collect();
                debug_assert!(witness.iter().all(Signed::is_positive));
                Ok((true, Some(witness)))
            } else {
                Ok((false, None))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rat::{dot, int};

    fn feas(vs: &[Vec<i64>], t: &[i64]) -> (bool, Option<Vec<Rat>>) {
        let vectors: Vec<Vec<Rat>> = vs
            .iter()
            .map(|v| v.iter().map(|&x| int(x)).collect())
            .collect();
        let target: Vec<Rat> = t.iter().map(|&x| int(x)).collect();
        strict_cone_feasibility(&vectors, &target).unwrap()
    }

    #[test]
    fn single_generator() {
        let (ok, w) = feas(&[vec![1]], &[1]);
        assert!(ok);
        let w = w.unwrap();
        assert_eq!(dot(&w, &[int(1)]), int(1));
    }

    #[test]
    fn empty_generators() {
        let (ok, _) = feas(&[], &[1]);
        assert!(!ok);
        let (ok, w) = feas(&[], &[0]);
        assert!(ok);
        assert_eq!(w.unwrap().len(), 0);
    }

    #[test]
    fn quadrant_excludes_lower_half() {
        // Cone between (1,0) and (1,1) does not contain (1,-1).
        let (ok, _) = feas(&[vec![1, 1], vec![1, 0]], &[1, -1]);
        assert!(!ok);
    }

    #[test]
    fn boundary_is_rejected() {
        // (1,0) is on the boundary of the open cone spanned by (1,1),(1,0),
        // yet it is a strictly positive combination of none... of the pair it
        // needs a_1 > 0 which forces a second coordinate.
        let (ok, _) = feas(&[vec![1, 1], vec![0, 1]], &[1, 0]);
        assert!(!ok);
        // Interior point passes with a witness.
        let (ok, w) = feas(&[vec![1, 1], vec![0, 1]], &[1, 2]);
        assert!(ok);
        let w = w.unwrap();
        assert!(w.iter().all(|x| x.is_positive()));
    }

    #[test]
    fn line_through_origin_unbounded_slack() {
        // Opposite generators express zero with arbitrarily large slack; the
        // cap keeps the program bounded and the verdict positive.
        let (ok, w) = feas(&[vec![1, 0], vec![-1, 0]], &[0, 0]);
        assert!(ok);
        assert!(w.unwrap().iter().all(|x| x.is_positive()));
    }

    #[test]
    fn affinely_infeasible_target() {
        let (ok, _) = feas(&[vec![1, 0]], &[0, 1]);
        assert!(!ok);
    }
}
