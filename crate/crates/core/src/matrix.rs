//! Determinants of square matrices with polynomial or integer entries.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::poly::Poly;

/// Dense square matrix of polynomials, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    pub rows: Vec<Vec<Poly>>,
}

impl PolyMatrix {
    pub fn zeros(n: usize) -> Self {
        PolyMatrix { rows: vec![vec![Poly::zero(); n]; n] }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Drops the given rows and columns (indices into the current matrix).
    pub fn minor(&self, drop_rows: &[usize], drop_cols: &[usize]) -> PolyMatrix {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop_rows.contains(i))
            .map(|(_, r)| {
                r.iter().enumerate().filter(|(j, _)| !drop_cols.contains(j)).map(|(_, x)| x.clone()).collect()
            })
            .collect();
        PolyMatrix { rows }
    }

    pub fn determinant(&self) -> Poly {
        det(self.rows.clone())
    }
}

/// Determinant by unit-pivot elimination followed by fraction-free Bareiss.
pub fn det(mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "matrix must be square");
    let mut sign_neg = false;
    let mut scale = Poly::one();

    // Phase 1: pivot on constant +-1 entries; elimination needs no division.
    loop {
        let k = m.len();
        if k == 0 {
            break;
        }
        if has_zero_line(&m) {
            return Poly::zero();
        }
        if k <= 3 {
            let d = cofactor(&m);
            return signed(&(&scale * &d), sign_neg);
        }
        let Some((pi, pj, pneg)) = unit_pivot(&m) else { break };
        let pivot_row = m.swap_remove(pi);
        // swap_remove moves the last row into pi: that is a transposition unless pi was last.
        if pi != k - 1 {
            sign_neg = !sign_neg;
        }
        let mut prow: Vec<Poly> = pivot_row;
        let pcol_last = k - 1;
        for row in m.iter_mut() {
            row.swap(pj, pcol_last);
        }
        prow.swap(pj, pcol_last);
        if pj != pcol_last {
            sign_neg = !sign_neg;
        }
        // Now pivot sits at (k-1, k-1) of the conceptual matrix.
        let pval = prow.pop().unwrap();
        debug_assert!(pval.is_unit());
        for row in m.iter_mut() {
            let f = row.pop().unwrap();
            if f.is_zero() {
                continue;
            }
            // row -= (f / p) * prow, with 1/p = p for p = +-1
            let factor = if pneg { -&f } else { f };
            for (x, y) in row.iter_mut().zip(prow.iter()) {
                if !y.is_zero() {
                    *x -= &(&factor * y);
                }
            }
        }
        if pneg {
            scale = -&scale;
        }
    }
    if m.is_empty() {
        return signed(&scale, sign_neg);
    }
    let d = bareiss(m);
    signed(&(&scale * &d), sign_neg)
}

fn signed(p: &Poly, neg: bool) -> Poly {
    if neg {
        -p
    } else {
        p.clone()
    }
}

fn has_zero_line(m: &[Vec<Poly>]) -> bool {
    let n = m.len();
    if m.iter().any(|r| r.iter().all(Poly::is_zero)) {
        return true;
    }
    (0..n).any(|j| m.iter().all(|r| r[j].is_zero()))
}

/// Cheapest constant +-1 entry by Markowitz cost.
fn unit_pivot(m: &[Vec<Poly>]) -> Option<(usize, usize, bool)> {
    let n = m.len();
    let row_nnz: Vec<usize> = m.iter().map(|r| r.iter().filter(|x| !x.is_zero()).count()).collect();
    let col_nnz: Vec<usize> = (0..n).map(|j| m.iter().filter(|r| !r[j].is_zero()).count()).collect();
    let mut best: Option<(usize, usize, usize, bool)> = None;
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if x.num_terms() != 1 {
                continue;
            }
            if let Some(c) = x.as_constant() {
                if c.abs().is_one() {
                    let cost = (row_nnz[i] - 1) * (col_nnz[j] - 1);
                    if best.as_ref().is_none_or(|b| cost < b.2) {
                        best = Some((i, j, cost, c.is_negative()));
                    }
                }
            }
        }
    }
    best.map(|(i, j, _, neg)| (i, j, neg))
}

fn bareiss(mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    let mut neg = false;
    let mut prev = Poly::one();
    for k in 0..n {
        // Full pivoting: smallest nonzero entry in the trailing block.
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, x) in row.iter().enumerate().skip(k) {
                if !x.is_zero() && best.is_none_or(|b| x.num_terms() < b.2) {
                    best = Some((i, j, x.num_terms()));
                }
            }
        }
        let Some((pi, pj, _)) = best else { return Poly::zero() };
        if pi != k {
            m.swap(pi, k);
            neg = !neg;
        }
        if pj != k {
            for row in m.iter_mut() {
                row.swap(pj, k);
            }
            neg = !neg;
        }
        if k + 1 == n {
            break;
        }
        let (top, bottom) = m.split_at_mut(k + 1);
        let prow = &top[k];
        let p = &prow[k];
        for row in bottom.iter_mut() {
            let f = row[k].clone();
            for j in k + 1..n {
                let mut v = p * &row[j];
                if !f.is_zero() && !prow[j].is_zero() {
                    v -= &(&f * &prow[j]);
                }
                row[j] = if prev.is_one() { v } else { v.div_exact(&prev).expect("Bareiss division is exact") };
            }
            row[k] = Poly::zero();
        }
        prev = m[k][k].clone();
    }
    signed(&m[n - 1][n - 1], neg)
}

fn cofactor(m: &[Vec<Poly>]) -> Poly {
    match m.len() {
        0 => Poly::one(),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        n => {
            let mut acc = Poly::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let sub: Vec<Vec<Poly>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let t = &m[0][j] * &cofactor(&sub);
                if j % 2 == 0 {
                    acc += &t;
                } else {
                    acc -= &t;
                }
            }
            acc
        }
    }
}

/// Exact determinant of an integer matrix (Bareiss).
pub fn int_det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut neg = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(pi) = (k..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
        if pi != k {
            a.swap(pi, k);
            neg = !neg;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if neg {
        -d
    } else {
        d
    }
}
