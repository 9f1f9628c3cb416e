//! Differential operators with polynomial coefficients on trivial bundles
//! over `ℝ^m`, their iterated commutators, symbols, and jets.

use std::collections::BTreeMap;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{domain, mismatch, Error, Result};
use crate::index::{IndexSet, MultiDegree};
use crate::linalg::{self, Matrix};
use crate::poly::{Poly, PolyTerm};
use crate::scalar::{self, Scalar};

/// A section of the trivial rank-`r` bundle.
pub type PolySection = Vec<Poly>;

/// A matrix of polynomials; rows index outputs.
pub type PolyMatrix = Vec<Vec<Poly>>;

/// `D = Σ_α P_α ∂^α` with `P_α` an `r_out × r_in` matrix of polynomials
/// (rows are output components).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyDiffOp {
    pub m: usize,
    pub r_in: usize,
    pub r_out: usize,
    coeffs: BTreeMap<MultiDegree, PolyMatrix>,
}

fn zero_matrix(m: usize, rows: usize, cols: usize) -> PolyMatrix {
    vec![vec![Poly::zero(m); cols]; rows]
}

fn is_zero_pm(p: &PolyMatrix) -> bool {
    p.iter().flatten().all(Poly::is_zero)
}

fn pm_mul(a: &PolyMatrix, b: &PolyMatrix, m: usize) -> PolyMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(Poly::zero(m), |acc, (x, brow)| acc.add(&x.mul(&brow[j]))))
                .collect()
        })
        .collect()
}

fn pm_axpy(a: &mut PolyMatrix, f: &Scalar, b: &PolyMatrix) {
    for (ra, rb) in a.iter_mut().zip(b) {
        for (x, y) in ra.iter_mut().zip(rb) {
            x.axpy(f, y);
        }
    }
}

fn multi_binomial(a: &MultiDegree, g: &MultiDegree) -> Scalar {
    a.0.iter().zip(&g.0).fold(Scalar::one(), |acc, (&x, &y)| acc * Scalar::from_integer(scalar::binomial(x.into(), y.into()).into()))
}

fn sub_degrees(a: &MultiDegree) -> Vec<MultiDegree> {
    MultiDegree::up_to_degree(a.vars(), a.total()).into_iter().filter(|g| g.divides(a)).collect()
}

impl PolyDiffOp {
    pub fn zero(m: usize, r_in: usize, r_out: usize) -> PolyDiffOp {
        PolyDiffOp { m, r_in, r_out, coeffs: BTreeMap::new() }
    }

    /// Builds from `(α, P_α)` pairs, checking shapes.
    pub fn new(m: usize, r_in: usize, r_out: usize, items: impl IntoIterator<Item = (MultiDegree, PolyMatrix)>) -> Result<PolyDiffOp> {
        let mut op = PolyDiffOp::zero(m, r_in, r_out);
        for (alpha, p) in items {
            if alpha.vars() != m {
                return mismatch(format!("multi-index {alpha:?} for {m} variables"));
            }
            if p.len() != r_out || p.iter().any(|r| r.len() != r_in) || p.iter().flatten().any(|x| x.vars() != m) {
                return mismatch(format!("coefficient at {alpha:?} is not {r_out}×{r_in} over {m} variables"));
            }
            op.add_coeff(alpha, &p);
        }
        Ok(op)
    }

    fn add_coeff(&mut self, alpha: MultiDegree, p: &PolyMatrix) {
        let (m, ri, ro) = (self.m, self.r_in, self.r_out);
        let entry = self.coeffs.entry(alpha.clone()).or_insert_with(|| zero_matrix(m, ro, ri));
        pm_axpy(entry, &Scalar::one(), p);
        if is_zero_pm(entry) {
            self.coeffs.remove(&alpha);
        }
    }

    /// Multiplication by `f` on the rank-`r` bundle.
    pub fn multiplication(f: &Poly, r: usize) -> PolyDiffOp {
        let m = f.vars();
        let mut p = zero_matrix(m, r, r);
        for (i, row) in p.iter_mut().enumerate() {
            row[i] = f.clone();
        }
        let mut op = PolyDiffOp::zero(m, r, r);
        op.add_coeff(MultiDegree::zero(m), &p);
        op
    }

    /// The identity on the rank-`r` bundle.
    pub fn identity(m: usize, r: usize) -> PolyDiffOp {
        PolyDiffOp::multiplication(&Poly::one(m), r)
    }

    /// `∂^α` on the rank-`r` bundle.
    pub fn partial(alpha: &MultiDegree, r: usize) -> PolyDiffOp {
        let m = alpha.vars();
        let id = PolyDiffOp::identity(m, r);
        let mut op = PolyDiffOp::zero(m, r, r);
        op.add_coeff(alpha.clone(), &id.coeffs[&MultiDegree::zero(m)]);
        op
    }

    pub fn coefficients(&self) -> &BTreeMap<MultiDegree, PolyMatrix> {
        &self.coeffs
    }

    pub fn coefficient(&self, alpha: &MultiDegree) -> PolyMatrix {
        self.coeffs.get(alpha).cloned().unwrap_or_else(|| zero_matrix(self.m, self.r_out, self.r_in))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Structural order `max |α|`; `None` for the zero operator.
    pub fn order(&self) -> Option<u32> {
        self.coeffs.keys().map(MultiDegree::total).max()
    }

    pub fn add(&self, other: &PolyDiffOp) -> Result<PolyDiffOp> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (a, p) in &other.coeffs {
            out.add_coeff(a.clone(), p);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PolyDiffOp) -> Result<PolyDiffOp> {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, f: &Scalar) -> PolyDiffOp {
        let mut out = PolyDiffOp::zero(self.m, self.r_in, self.r_out);
        for (a, p) in &self.coeffs {
            let q: PolyMatrix = p.iter().map(|r| r.iter().map(|x| x.scale(f)).collect()).collect();
            out.add_coeff(a.clone(), &q);
        }
        out
    }

    fn check_same_shape(&self, other: &PolyDiffOp) -> Result<()> {
        if (self.m, self.r_in, self.r_out) != (other.m, other.r_in, other.r_out) {
            return mismatch("operators of different shapes");
        }
        Ok(())
    }

    /// `Σ_α P_α ∂^α s`.
    pub fn apply(&self, s: &[Poly]) -> Result<PolySection> {
        if s.len() != self.r_in {
            return mismatch(format!("section of rank {} for an operator on rank {}", s.len(), self.r_in));
        }
        let mut out = vec![Poly::zero(self.m); self.r_out];
        for (alpha, p) in &self.coeffs {
            let ds: Vec<Poly> = s.iter().map(|x| x.deriv_multi(alpha)).collect();
            for (o, row) in out.iter_mut().zip(p) {
                for (c, d) in row.iter().zip(&ds) {
                    *o = o.add(&c.mul(d));
                }
            }
        }
        Ok(out)
    }

    /// `self ∘ other`, expanded with the Leibniz rule
    /// `∂^α(Q ∂^β) = Σ_{γ≤α} C(α,γ) (∂^γ Q) ∂^{α−γ+β}`.
    pub fn compose(&self, other: &PolyDiffOp) -> Result<PolyDiffOp> {
        if self.r_in != other.r_out || self.m != other.m {
            return mismatch("composition of incompatible operators");
        }
        let mut out = PolyDiffOp::zero(self.m, other.r_in, self.r_out);
        for (alpha, p) in &self.coeffs {
            for gamma in sub_degrees(alpha) {
                let rest = alpha.sub(&gamma).expect("γ ≤ α");
                let c = multi_binomial(alpha, &gamma);
                for (beta, q) in &other.coeffs {
                    let dq: PolyMatrix = q.iter().map(|r| r.iter().map(|x| x.deriv_multi(&gamma)).collect()).collect();
                    let mut term = pm_mul(p, &dq, self.m);
                    if c != Scalar::one() {
                        term = term.iter().map(|r| r.iter().map(|x| x.scale(&c)).collect()).collect();
                    }
                    out.add_coeff(rest.add(beta), &term);
                }
            }
        }
        Ok(out)
    }

    /// `[D, f] = D∘f − f∘D`.
    pub fn commutator(&self, f: &Poly) -> PolyDiffOp {
        let left = self.compose(&PolyDiffOp::multiplication(f, self.r_in)).expect("shapes");
        let right = PolyDiffOp::multiplication(f, self.r_out).compose(self).expect("shapes");
        left.sub(&right).expect("shapes")
    }

    pub fn to_json(&self) -> Vec<OpTermJson> {
        self.coeffs
            .iter()
            .map(|(a, p)| OpTermJson { alpha: a.clone(), matrix: p.iter().map(|r| r.iter().map(Poly::to_json).collect()).collect() })
            .collect()
    }

    /// Parses the JSON form; `m`, `r_in` and `r_out` are read off the first term.
    pub fn from_json(terms: &[OpTermJson]) -> Result<PolyDiffOp> {
        let Some(first) = terms.first() else {
            return domain("an operator needs at least one term to fix its shape");
        };
        let m = first.alpha.vars();
        let r_out = first.matrix.len();
        let r_in = first.matrix.first().map_or(0, Vec::len);
        let items = terms
            .iter()
            .map(|t| {
                let p = t.matrix.iter().map(|r| r.iter().map(|x| Poly::from_json(m, x)).collect::<Result<Vec<_>>>()).collect::<Result<PolyMatrix>>()?;
                Ok((t.alpha.clone(), p))
            })
            .collect::<Result<Vec<_>>>()?;
        PolyDiffOp::new(m, r_in, r_out, items)
    }
}

/// JSON term `{"alpha": [..], "matrix": [[Poly]]}`; rows are outputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpTermJson {
    pub alpha: MultiDegree,
    pub matrix: Vec<Vec<Vec<PolyTerm>>>,
}

/// `Σ_{A⊆K} (−1)^{|A|} f_A ∘ D ∘ f_{K−A}`.
pub fn iterated_commutator(d: &PolyDiffOp, fs: &[Poly]) -> PolyDiffOp {
    let k = fs.len();
    let mut out = PolyDiffOp::zero(d.m, d.r_in, d.r_out);
    for a in IndexSet::all_subsets(k) {
        let prod = |set: IndexSet| set.iter().fold(Poly::one(d.m), |acc, i| acc.mul(&fs[i - 1]));
        let right = prod(IndexSet::full(k).difference(a));
        let left = prod(a);
        let term = PolyDiffOp::multiplication(&left, d.r_out)
            .compose(&d.compose(&PolyDiffOp::multiplication(&right, d.r_in)).expect("shapes"))
            .expect("shapes");
        out = out.add(&term.scale(&scalar::sign(a.len() % 2 == 1))).expect("shapes");
    }
    out
}

/// `[[…[D, f_1], …], f_k]`.
pub fn nested_commutator(d: &PolyDiffOp, fs: &[Poly]) -> PolyDiffOp {
    fs.iter().fold(d.clone(), |acc, f| acc.commutator(f))
}

/// Outcome of probing the order with commutators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderProbe {
    Order(u32),
    Indeterminate,
}

/// Smallest `n ≤ max_probe` such that every `(n+1)`-fold commutator with
/// monomials of degree 1 and 2 vanishes.
pub fn detect_order(d: &PolyDiffOp, max_probe: u32) -> OrderProbe {
    if d.is_zero() {
        return OrderProbe::Order(0);
    }
    let probes: Vec<Poly> = [1, 2]
        .iter()
        .flat_map(|&deg| MultiDegree::of_degree(d.m, deg))
        .map(|a| Poly::monomial(a, Scalar::one()))
        .collect();
    for n in 0..=max_probe {
        if multisets(probes.len(), n as usize + 1).iter().all(|ix| {
            let fs: Vec<Poly> = ix.iter().map(|&i| probes[i].clone()).collect();
            iterated_commutator(d, &fs).is_zero()
        }) {
            return OrderProbe::Order(n);
        }
    }
    OrderProbe::Indeterminate
}

/// All non-decreasing index tuples of length `k` over `0..n`.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v: Vec<usize>| {
                let start = v.last().copied().unwrap_or(0);
                (start..n).map(move |i| {
                    let mut w = v.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    out
}

/// The `k`-fold commutator of an order-`k` operator with `fs`, as the
/// matrix of its multiplication operator.
pub fn principal_symbol(d: &PolyDiffOp, fs: &[Poly]) -> Result<PolyMatrix> {
    let k = d.order().unwrap_or(0);
    if fs.len() != k as usize {
        return domain(format!("principal symbol of an order-{k} operator takes {k} functions, got {}", fs.len()));
    }
    let c = iterated_commutator(d, fs);
    if c.order().unwrap_or(0) > 0 {
        return Err(Error::Internal("k-fold commutator is not a multiplication operator".into()));
    }
    Ok(c.coefficient(&MultiDegree::zero(d.m)))
}

/// A `k`-jet at `p`, represented by a section of degree at most `k` in `x − p`
/// written in the original coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetClass {
    pub p: Vec<Scalar>,
    pub k: u32,
    pub repr: PolySection,
}

impl JetClass {
    /// Taylor coefficients `∂^β s(p)/β!` ordered by `(β, j)`, with `β` in
    /// graded lexicographic order over `|β| ≤ k` and `j` the component.
    pub fn coefficient_vector(&self) -> Vec<Scalar> {
        let m = self.p.len();
        let neg: Vec<Scalar> = self.p.clone();
        let shifted: Vec<Poly> = self.repr.iter().map(|s| s.shift(&neg)).collect();
        MultiDegree::up_to_degree(m, self.k)
            .iter()
            .flat_map(|b| shifted.iter().map(move |s| s.coeff(b)))
            .collect()
    }
}

/// Taylor truncation of `s` at `p` to total degree `k`.
pub fn jet(s: &[Poly], k: u32, p: &[Scalar]) -> JetClass {
    let back: Vec<Scalar> = p.iter().map(|x| -x.clone()).collect();
    let repr = s.iter().map(|x| x.shift(p).truncate(k).shift(&back)).collect();
    JetClass { p: p.to_vec(), k, repr }
}

/// The matrix `D̂_p` with `D(s)(p) = D̂_p · coefficient_vector(jet(s, k, p))`:
/// entry `[i][(β, j)] = β!·P_β(p)[i][j]`.
pub fn factor_through_jet(d: &PolyDiffOp, k: u32, p: &[Scalar]) -> Result<Matrix> {
    if d.order().unwrap_or(0) > k {
        return Err(Error::Precondition(format!("operator of order {:?} does not factor through {k}-jets", d.order())));
    }
    if p.len() != d.m {
        return mismatch("point has the wrong number of coordinates");
    }
    let betas = MultiDegree::up_to_degree(d.m, k);
    let mut out = linalg::zeros(d.r_out, betas.len() * d.r_in);
    for (bi, beta) in betas.iter().enumerate() {
        let pb = d.coefficient(beta);
        let fact = beta.factorial();
        for i in 0..d.r_out {
            for j in 0..d.r_in {
                out[i][bi * d.r_in + j] = &fact * pb[i][j].eval(p);
            }
        }
    }
    Ok(out)
}

/// A connection `∇_i = ∂_i + A_i` on the trivial rank-`r` bundle; `a[i]` is the
/// `r×r` matrix `A_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    pub m: usize,
    pub r: usize,
    pub a: Vec<PolyMatrix>,
}

impl Connection {
    pub fn flat(m: usize, r: usize) -> Connection {
        Connection { m, r, a: vec![zero_matrix(m, r, r); m] }
    }

    pub fn new(m: usize, r: usize, a: Vec<PolyMatrix>) -> Result<Connection> {
        if a.len() != m || a.iter().any(|x| x.len() != r || x.iter().any(|row| row.len() != r)) {
            return mismatch(format!("connection must be {m} matrices of size {r}×{r}"));
        }
        Ok(Connection { m, r, a })
    }

    /// `∇_i s` (1-based `i`).
    pub fn covariant(&self, i: usize, s: &[Poly]) -> PolySection {
        let a = &self.a[i - 1];
        s.iter()
            .enumerate()
            .map(|(row, x)| a[row].iter().zip(s).fold(x.deriv(i), |acc, (c, y)| acc.add(&c.mul(y))))
            .collect()
    }

    /// `∇_{i_1} ⋯ ∇_{i_l} s` along coordinate fields with a flat base connection.
    pub fn iterated(&self, indices: &[usize], s: &[Poly]) -> PolySection {
        indices.iter().rev().fold(s.to_vec(), |acc, &i| self.covariant(i, &acc))
    }
}

/// The symmetrized iterated covariant derivative `(1/l!) Σ_σ ∇_{i_σ1}⋯∇_{i_σl} s`
/// for every non-decreasing index tuple of length `l`.
pub fn symmetrized_covariant_jet(s: &[Poly], l: usize, conn: &Connection) -> BTreeMap<Vec<usize>, PolySection> {
    let mut out = BTreeMap::new();
    let lf = scalar::factorial(l as u32);
    for ix in multisets(conn.m, l) {
        let idx: Vec<usize> = ix.iter().map(|i| i + 1).collect();
        let mut acc = vec![Poly::zero(conn.m); s.len()];
        for perm in crate::index::Permutation::all(l) {
            let order: Vec<usize> = (0..l).map(|t| idx[perm.apply(t + 1) - 1]).collect();
            for (a, b) in acc.iter_mut().zip(conn.iterated(&order, s)) {
                *a = a.add(&b);
            }
        }
        out.insert(idx, acc.iter().map(|x| x.scale(&(Scalar::one() / &lf))).collect());
    }
    out
}

/// The values at `p` of the symmetrized covariant jets of orders `0..=k`,
/// stacked in the order of [`symmetrized_covariant_jet`].
pub fn covariant_jet_values(s: &[Poly], k: u32, conn: &Connection, p: &[Scalar]) -> Vec<Scalar> {
    (0..=k as usize)
        .flat_map(|l| symmetrized_covariant_jet(s, l, conn).into_values().flat_map(|sec| sec.into_iter().map(|x| x.eval(p)).collect::<Vec<_>>()))
        .collect()
}

/// An operator along a polynomial map: `η ↦ op(η ∘ φ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpAlong {
    /// Images of the target coordinates, polynomials on the source.
    pub phi: Vec<Poly>,
    /// Operator on source sections.
    pub op: PolyDiffOp,
}

impl OpAlong {
    /// Pullback by `φ` on rank-`r` sections.
    pub fn pullback(phi: Vec<Poly>, r: usize) -> OpAlong {
        let m = phi.first().map_or(0, Poly::vars);
        OpAlong { phi, op: PolyDiffOp::identity(m, r) }
    }

    pub fn apply(&self, eta: &[Poly]) -> Result<PolySection> {
        let pulled = eta.iter().map(|x| x.compose(&self.phi)).collect::<Result<Vec<_>>>()?;
        self.op.apply(&pulled)
    }
}

/// `[Φ, f](η) = Φ(fη) − (f∘φ)·Φ(η)`.
pub fn commutator_along(phi_op: &OpAlong, f: &Poly) -> Result<OpAlong> {
    if f.vars() != phi_op.phi.len() {
        return mismatch("function does not live on the target");
    }
    let fphi = f.compose(&phi_op.phi)?;
    Ok(OpAlong { phi: phi_op.phi.clone(), op: phi_op.op.commutator(&fphi) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::poly::tests_support::arb_poly;
    use crate::scalar::int;
    use proptest::prelude::*;

    fn x(m: usize, i: usize) -> Poly {
        Poly::var(m, i)
    }

    fn c(m: usize, v: i64) -> Poly {
        Poly::constant(m, int(v))
    }

    fn scalar_op(m: usize, items: Vec<(Vec<u32>, Poly)>) -> PolyDiffOp {
        PolyDiffOp::new(m, 1, 1, items.into_iter().map(|(a, p)| (MultiDegree(a), vec![vec![p]]))).unwrap()
    }

    #[test]
    fn apply_examples() {
        let dx = scalar_op(1, vec![(vec![1], c(1, 1))]);
        assert_eq!(dx.apply(&[x(1, 1).pow(2)]).unwrap(), vec![x(1, 1).scale(&int(2))]);
        let mx = PolyDiffOp::multiplication(&x(1, 1), 1);
        assert_eq!(mx.apply(&[c(1, 1)]).unwrap(), vec![x(1, 1)]);
        let xd2 = scalar_op(1, vec![(vec![2], x(1, 1))]);
        assert_eq!(xd2.apply(&[x(1, 1).pow(3)]).unwrap(), vec![x(1, 1).pow(2).scale(&int(6))]);
        assert!(dx.apply(&[c(1, 1), c(1, 1)]).is_err());
    }

    #[test]
    fn commutator_examples() {
        let dx = scalar_op(1, vec![(vec![1], c(1, 1))]);
        assert_eq!(dx.commutator(&x(1, 1)), PolyDiffOp::identity(1, 1));
        let d2 = scalar_op(1, vec![(vec![2], c(1, 1))]);
        let f = x(1, 1).pow(2);
        let g = x(1, 1).pow(3).add(&x(1, 1));
        let expect = PolyDiffOp::multiplication(&f.deriv(1).mul(&g.deriv(1)).scale(&int(2)), 1);
        assert_eq!(iterated_commutator(&d2, &[f.clone(), g.clone()]), expect);
        assert_eq!(nested_commutator(&d2, &[f.clone(), g.clone()]), expect);
        assert!(iterated_commutator(&d2, &[f, g, x(1, 1)]).is_zero());
    }

    #[test]
    fn order_detection() {
        assert_eq!(detect_order(&PolyDiffOp::identity(2, 1), 4), OrderProbe::Order(0));
        let d = scalar_op(2, vec![(vec![1, 0], c(2, 1)), (vec![0, 0], x(2, 2))]);
        assert_eq!(detect_order(&d, 4), OrderProbe::Order(1));
        let d2 = scalar_op(1, vec![(vec![2], c(1, 1))]);
        assert_eq!(detect_order(&d2, 4), OrderProbe::Order(2));
        assert_eq!(detect_order(&d2, 1), OrderProbe::Indeterminate);
    }

    #[test]
    fn principal_symbol_examples() {
        let d2 = scalar_op(1, vec![(vec![2], c(1, 1))]);
        assert_eq!(principal_symbol(&d2, &[x(1, 1), x(1, 1)]).unwrap(), vec![vec![c(1, 2)]]);
        assert_eq!(principal_symbol(&d2, &[x(1, 1), x(1, 1).pow(2)]).unwrap(), vec![vec![x(1, 1).scale(&int(4))]]);
        assert!(principal_symbol(&d2, &[x(1, 1)]).is_err());
    }

    #[test]
    fn jet_examples() {
        assert_eq!(jet(&[x(1, 1).pow(3)], 2, &[int(0)]).repr, vec![Poly::zero(1)]);
        assert_eq!(jet(&[x(1, 1).pow(2)], 1, &[int(1)]).repr, vec![x(1, 1).scale(&int(2)).sub(&c(1, 1))]);
        assert_eq!(jet(&[c(2, 5)], 3, &[int(1), int(2)]).repr, vec![c(2, 5)]);
    }

    #[test]
    fn factor_examples() {
        let id = PolyDiffOp::identity(1, 1);
        assert_eq!(factor_through_jet(&id, 1, &[int(0)]).unwrap(), vec![vec![int(1), int(0)]]);
        let dx = scalar_op(1, vec![(vec![1], c(1, 1))]);
        assert_eq!(factor_through_jet(&dx, 2, &[int(0)]).unwrap(), vec![vec![int(0), int(1), int(0)]]);
        let d2 = scalar_op(1, vec![(vec![2], c(1, 1))]);
        assert!(matches!(factor_through_jet(&d2, 1, &[int(0)]), Err(Error::Precondition(_))));
    }

    #[test]
    fn covariant_jet_examples() {
        let flat = Connection::flat(2, 1);
        let s = vec![x(2, 1).mul(&x(2, 2))];
        let j1 = symmetrized_covariant_jet(&s, 1, &flat);
        assert_eq!(j1[&vec![1]], vec![x(2, 2)]);
        let j2 = symmetrized_covariant_jet(&s, 2, &flat);
        assert_eq!(j2[&vec![1, 2]], vec![c(2, 1)]);
        assert_eq!(j2[&vec![1, 1]], vec![Poly::zero(2)]);
    }

    #[test]
    fn commutator_along_examples() {
        let phi = vec![x(1, 1).pow(2)];
        let pb = OpAlong::pullback(phi.clone(), 1);
        assert!(commutator_along(&pb, &x(1, 1).add(&c(1, 3))).unwrap().op.is_zero());
        let along = OpAlong { phi, op: scalar_op(1, vec![(vec![1], c(1, 1))]) };
        let com = commutator_along(&along, &x(1, 1)).unwrap();
        assert_eq!(com.op, PolyDiffOp::multiplication(&x(1, 1).scale(&int(2)), 1));
        assert!(commutator_along(&com, &x(1, 1)).unwrap().op.is_zero());
    }

    #[test]
    fn json_roundtrip() {
        let d = scalar_op(2, vec![(vec![1, 0], x(2, 2)), (vec![0, 2], c(2, 3))]);
        let s = serde_json::to_string(&d.to_json()).unwrap();
        let back: Vec<OpTermJson> = serde_json::from_str(&s).unwrap();
        assert_eq!(PolyDiffOp::from_json(&back).unwrap(), d);
    }

    fn arb_op(m: usize, r: usize, k: u32) -> impl Strategy<Value = PolyDiffOp> {
        let alphas = MultiDegree::up_to_degree(m, k);
        let n = alphas.len();
        proptest::collection::vec((0..n, proptest::collection::vec(arb_poly(m, 2), r * r)), 1..4).prop_map(move |v| {
            PolyDiffOp::new(m, r, r, v.into_iter().map(|(i, ps)| (alphas[i].clone(), ps.chunks(r).map(|c| c.to_vec()).collect()))).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn formula_matches_nested(d in arb_op(2, 1, 2), fs in proptest::collection::vec(arb_poly(2, 2), 0..=3)) {
            prop_assert_eq!(iterated_commutator(&d, &fs), nested_commutator(&d, &fs));
        }

        #[test]
        fn commutator_is_symmetric(d in arb_op(2, 2, 2), f in arb_poly(2, 2), g in arb_poly(2, 2)) {
            prop_assert_eq!(iterated_commutator(&d, &[f.clone(), g.clone()]), iterated_commutator(&d, &[g, f]));
        }

        #[test]
        fn order_k_kills_k_plus_one(d in arb_op(2, 1, 2), fs in proptest::collection::vec(arb_poly(2, 2), 3)) {
            prop_assert!(iterated_commutator(&d, &fs).is_zero());
            let k = d.order().unwrap_or(0);
            prop_assert_eq!(detect_order(&d, 4), OrderProbe::Order(k));
        }

        #[test]
        fn compose_matches_apply(a in arb_op(2, 1, 2), b in arb_op(2, 1, 2), s in arb_poly(2, 3)) {
            let ab = a.compose(&b).unwrap();
            prop_assert_eq!(ab.apply(&[s.clone()]).unwrap(), a.apply(&b.apply(&[s]).unwrap()).unwrap());
        }

        #[test]
        fn jet_factorization(d in arb_op(2, 2, 2), s in proptest::collection::vec(arb_poly(2, 4), 2), p in proptest::collection::vec(-3i64..=3, 2)) {
            let p: Vec<Scalar> = p.into_iter().map(int).collect();
            let dhat = factor_through_jet(&d, 2, &p).unwrap();
            let lhs: Vec<Scalar> = d.apply(&s).unwrap().iter().map(|x| x.eval(&p)).collect();
            prop_assert_eq!(lhs, linalg::mat_vec(&dhat, &jet(&s, 2, &p).coefficient_vector()));
        }

        #[test]
        fn jet_is_order_k(s in arb_poly(2, 4), fs in proptest::collection::vec(arb_poly(2, 2), 3), p in proptest::collection::vec(-2i64..=2, 2)) {
            let p: Vec<Scalar> = p.into_iter().map(int).collect();
            let k = 2;
            let mut acc = vec![Scalar::zero(); jet(&[s.clone()], k, &p).coefficient_vector().len()];
            for a in IndexSet::all_subsets(3) {
                let fa = a.iter().fold(Scalar::one(), |t, i| t * fs[i - 1].eval(&p));
                let rest = IndexSet::full(3).difference(a).iter().fold(s.clone(), |t, i| t.mul(&fs[i - 1]));
                let v = jet(&[rest], k, &p).coefficient_vector();
                let sg = scalar::sign(a.len() % 2 == 1) * fa;
                for (x, y) in acc.iter_mut().zip(v) {
                    *x += &sg * y;
                }
            }
            prop_assert!(acc.iter().all(Zero::is_zero));
        }

        #[test]
        fn principal_symbol_is_order_zero(d in arb_op(2, 1, 2), f in arb_poly(2, 2), g in arb_poly(2, 2)) {
            let k = d.order().unwrap_or(0) as usize;
            let fs = vec![f, g];
            let c = iterated_commutator(&d, &fs[..k]);
            prop_assert!(c.order().unwrap_or(0) == 0);
        }

        #[test]
        fn covariant_jets_are_symmetric_and_jet_determined(
            a in proptest::collection::vec(arb_poly(2, 1), 2), s in arb_poly(2, 4), p in proptest::collection::vec(-2i64..=2, 2),
        ) {
            let conn = Connection::new(2, 1, a.into_iter().map(|x| vec![vec![x]]).collect()).unwrap();
            let p: Vec<Scalar> = p.into_iter().map(int).collect();
            let j2 = symmetrized_covariant_jet(&[s.clone()], 2, &conn);
            let mut sym = j2[&vec![1, 2]][0].clone().scale(&int(2));
            sym = sym.sub(&conn.iterated(&[1, 2], &[s.clone()])[0]).sub(&conn.iterated(&[2, 1], &[s.clone()])[0]);
            prop_assert!(sym.is_zero());
            let js = jet(&[s.clone()], 2, &p);
            prop_assert_eq!(covariant_jet_values(&[s], 2, &conn, &p), covariant_jet_values(&js.repr, 2, &conn, &p));
        }
    }

    #[test]
    fn covariant_jet_map_is_an_isomorphism() {
        let m = 2;
        let a1 = x(2, 2).add(&c(2, 1));
        let conn = Connection::new(m, 1, vec![vec![vec![a1]], vec![vec![x(2, 1)]]]).unwrap();
        let p = vec![int(1), int(-1)];
        let k = 2;
        let cols: Vec<Vec<Scalar>> = MultiDegree::up_to_degree(m, k)
            .into_iter()
            .map(|b| {
                let back: Vec<Scalar> = p.iter().map(|t| -t.clone()).collect();
                let s = Poly::monomial(b, int(1)).shift(&back);
                covariant_jet_values(&[s], k, &conn, &p)
            })
            .collect();
        let mat = linalg::transpose(&cols, cols[0].len());
        assert_eq!(linalg::rank(&mat), cols.len());
    }
}
