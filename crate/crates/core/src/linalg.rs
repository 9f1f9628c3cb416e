//! Exact linear algebra over the rationals.
//!
//! Rank uses fraction-free elimination on sparse integer rows with pivots
//! chosen by lowest column index. Nullspaces and solves use a dense rational
//! reduced row echelon form.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::{self, Scalar};

/// Dense matrix stored as a list of rows.
pub type Matrix = Vec<Vec<Scalar>>;

/// Sparse rational row: `(column, value)` pairs.
pub type SparseRow = Vec<(usize, Scalar)>;

type IntRow = Vec<(usize, BigInt)>;

fn to_int_row(row: &[(usize, Scalar)]) -> IntRow {
    let l = scalar::denominator_lcm(row.iter().map(|(_, v)| v));
    let mut out: IntRow = row
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| (*c, (v * BigRational::from_integer(l.clone())).to_integer()))
        .collect();
    out.sort_by_key(|(c, _)| *c);
    merge_duplicates(&mut out);
    make_primitive(&mut out);
    out
}

fn merge_duplicates(row: &mut IntRow) {
    let mut merged: IntRow = Vec::with_capacity(row.len());
    for (c, v) in row.drain(..) {
        match merged.last_mut() {
            Some((lc, lv)) if *lc == c => *lv += v,
            _ => merged.push((c, v)),
        }
    }
    merged.retain(|(_, v)| !v.is_zero());
    *row = merged;
}

fn make_primitive(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    let flip = row.first().is_some_and(|(_, v)| v.is_negative());
    if g.is_zero() {
        return;
    }
    if flip {
        g = -g;
    }
    if !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

/// `a*r - b*p` on sorted sparse rows.
fn combine(a: &BigInt, r: &IntRow, b: &BigInt, p: &IntRow) -> IntRow {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let take_r = j >= p.len() || (i < r.len() && r[i].0 < p[j].0);
        let take_p = i >= r.len() || (j < p.len() && p[j].0 < r[i].0);
        if take_r {
            out.push((r[i].0, a * &r[i].1));
            i += 1;
        } else if take_p {
            out.push((p[j].0, -(b * &p[j].1)));
            j += 1;
        } else {
            let v = a * &r[i].1 - b * &p[j].1;
            if !v.is_zero() {
                out.push((r[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incremental row echelon form with lowest-index pivots.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, IntRow>,
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon::default()
    }

    /// Adds a row; returns true when it was independent of the rows so far.
    pub fn insert(&mut self, row: &[(usize, Scalar)]) -> bool {
        let mut r = to_int_row(row);
        while let Some((c, lead)) = r.first().cloned() {
            match self.rows.get(&c) {
                Some(p) => {
                    let plead = &p[0].1;
                    let g = plead.gcd(&lead);
                    let a = plead / &g;
                    let b = &lead / &g;
                    r = combine(&a, &r, &b, p);
                    make_primitive(&mut r);
                }
                None => {
                    self.rows.insert(c, r);
                    return true;
                }
            }
        }
        false
    }

    /// Adds a dense row.
    pub fn insert_dense(&mut self, row: &[Scalar]) -> bool {
        let sparse: SparseRow = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(c, v)| (c, v.clone()))
            .collect();
        self.insert(&sparse)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Pivot columns in increasing order.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.keys().copied().collect()
    }

    /// The stored independent rows, as rationals.
    pub fn rows(&self) -> Vec<SparseRow> {
        self.rows
            .values()
            .map(|r| {
                r.iter()
                    .map(|(c, v)| (*c, BigRational::from_integer(v.clone())))
                    .collect()
            })
            .collect()
    }
}

/// Rank of a dense matrix.
pub fn rank(m: &[Vec<Scalar>]) -> usize {
    let mut e = Echelon::new();
    for row in m {
        e.insert_dense(row);
    }
    e.rank()
}

/// Rank of a matrix given by sparse rows.
pub fn rank_sparse<'a>(rows: impl IntoIterator<Item = &'a SparseRow>) -> usize {
    let mut e = Echelon::new();
    for row in rows {
        e.insert(row);
    }
    e.rank()
}

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Scalar::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Scalar::one();
    }
    m
}

pub fn transpose(m: &[Vec<Scalar>], cols: usize) -> Matrix {
    let mut t = zeros(cols, m.len());
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            t[j][i] = v.clone();
        }
    }
    t
}

/// Product `a · b` where `b` has `b_cols` columns.
pub fn matmul(a: &[Vec<Scalar>], b: &[Vec<Scalar>], b_cols: usize) -> Matrix {
    let mut out = zeros(a.len(), b_cols);
    for (i, row) in a.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            for j in 0..b_cols {
                if !b[k][j].is_zero() {
                    out[i][j] += v * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &[Vec<Scalar>], x: &[Scalar]) -> Vec<Scalar> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .filter(|(r, v)| !r.is_zero() && !v.is_zero())
                .fold(Scalar::zero(), |acc, (r, v)| acc + r * v)
        })
        .collect()
}

pub fn is_zero_matrix(m: &[Vec<Scalar>]) -> bool {
    m.iter().all(|r| r.iter().all(Zero::is_zero))
}

/// Reduced row echelon form over `cols` columns, pivoting through the
/// columns in the order given by `col_order`. Returns the nonzero rows and
/// their pivot columns.
pub fn rref_with_order(m: &[Vec<Scalar>], col_order: &[usize]) -> (Matrix, Vec<usize>) {
    let mut a: Matrix = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for &c in col_order {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Reduced row echelon form with natural column order.
pub fn rref(m: &[Vec<Scalar>], cols: usize) -> (Matrix, Vec<usize>) {
    let order: Vec<usize> = (0..cols).collect();
    rref_with_order(m, &order)
}

fn nullspace_from_rref(r: &[Vec<Scalar>], pivots: &[usize], cols: usize) -> Vec<Vec<Scalar>> {
    let mut is_pivot = vec![None; cols];
    for (i, &p) in pivots.iter().enumerate() {
        is_pivot[p] = Some(i);
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = vec![Scalar::zero(); cols];
        v[free] = Scalar::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -r[i][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Basis of `{x : m x = 0}` for a matrix with `cols` columns.
pub fn nullspace(m: &[Vec<Scalar>], cols: usize) -> Vec<Vec<Scalar>> {
    let (r, pivots) = rref(m, cols);
    nullspace_from_rref(&r, &pivots, cols)
}

/// Nullspace of a tall sparse system: independent rows are extracted first.
pub fn nullspace_sparse<'a>(
    rows: impl IntoIterator<Item = &'a SparseRow>,
    cols: usize,
) -> Vec<Vec<Scalar>> {
    let mut e = Echelon::new();
    for row in rows {
        e.insert(row);
    }
    let dense: Matrix = e
        .rows()
        .into_iter()
        .map(|r| {
            let mut d = vec![Scalar::zero(); cols];
            for (c, v) in r {
                d[c] = v;
            }
            d
        })
        .collect();
    nullspace(&dense, cols)
}

/// A solution of `m x = rhs` with every free variable zero, pivoting through
/// columns in `col_order`; `None` when the system is inconsistent.
pub fn solve_with_order(
    m: &[Vec<Scalar>],
    rhs: &[Scalar],
    cols: usize,
    col_order: &[usize],
) -> Option<Vec<Scalar>> {
    let aug: Matrix = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut order = col_order.to_vec();
    order.push(cols);
    let (r, pivots) = rref_with_order(&aug, &order);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Scalar::zero(); cols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r[i][cols].clone();
    }
    Some(x)
}

/// A solution of `m x = rhs` with free variables zero.
pub fn solve(m: &[Vec<Scalar>], rhs: &[Scalar], cols: usize) -> Option<Vec<Scalar>> {
    let order: Vec<usize> = (0..cols).collect();
    solve_with_order(m, rhs, cols, &order)
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(m: &[Vec<Scalar>]) -> Option<Matrix> {
    let n = m.len();
    let aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, n);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| i != p) {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&m(&[&[1, 2], &[3, 4]])), 2);
        assert_eq!(rank(&m(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(&[vec![frac(1, 2), frac(1, 3)], vec![int(3), int(2)]]), 1);
    }

    #[test]
    fn inverse_and_solve() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(matmul(&a, &inv, 2), identity(2));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
        let x = solve(&a, &[int(3), int(2)], 2).unwrap();
        assert_eq!(x, vec![int(1), int(1)]);
        assert!(solve(&m(&[&[1, 1], &[1, 1]]), &[int(1), int(2)], 2).is_none());
    }

    fn arb_matrix() -> impl Strategy<Value = Matrix> {
        (1..6usize, 1..6usize).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-3i64..=3, c), r)
        })
        .prop_map(|rows| rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect())
    }

    proptest! {
        #[test]
        fn rank_nullity(a in arb_matrix()) {
            let cols = a[0].len();
            let ns = nullspace(&a, cols);
            prop_assert_eq!(rank(&a) + ns.len(), cols);
            for v in &ns {
                prop_assert!(mat_vec(&a, v).iter().all(Zero::is_zero));
            }
            prop_assert_eq!(rank(&a), rref(&a, cols).1.len());
            prop_assert_eq!(rank(&a), rank(&transpose(&a, cols)));
        }

        #[test]
        fn solve_consistent(a in arb_matrix(), seed in proptest::collection::vec(-3i64..=3, 6)) {
            let cols = a[0].len();
            let x0: Vec<Scalar> = seed[..cols].iter().map(|&v| int(v)).collect();
            let b = mat_vec(&a, &x0);
            let x = solve(&a, &b, cols).unwrap();
            prop_assert_eq!(mat_vec(&a, &x), b.clone());
            let rev: Vec<usize> = (0..cols).rev().collect();
            let y = solve_with_order(&a, &b, cols, &rev).unwrap();
            prop_assert_eq!(mat_vec(&a, &y), b);
        }
    }
}
