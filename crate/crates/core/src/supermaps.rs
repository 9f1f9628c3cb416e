//! Morphisms between polynomial superfunction algebras `Poly(ℝ^m) ⊗ ΛS*`.

use std::collections::HashMap;
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{domain, mismatch, Result};
use crate::exterior::ExtElem;
use crate::index::{IndexSet, MultiDegree, Parity};
use crate::lin::{self, Terms};
use crate::poly::Poly;
use crate::polydiff_jets::PolyMatrix;
use crate::report::Report;
use crate::scalar::{self, Scalar};

/// A superfunction `Σ c · x^α ⊗ ds_I` with `m` even and `n` odd generators.
#[derive(Clone, PartialEq, Eq)]
pub struct PolySuperFunc {
    pub m: usize,
    pub n: usize,
    pub terms: Terms<(MultiDegree, IndexSet)>,
}

/// JSON term `{"exps": [..], "ext": [..], "coeff": "p/q"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperFuncTerm {
    pub exps: MultiDegree,
    pub ext: IndexSet,
    #[serde(with = "scalar::serde_str")]
    pub coeff: Scalar,
}

impl PolySuperFunc {
    pub fn zero(m: usize, n: usize) -> PolySuperFunc {
        PolySuperFunc { m, n, terms: Terms::new() }
    }

    pub fn one(m: usize, n: usize) -> PolySuperFunc {
        PolySuperFunc::monomial(n, MultiDegree::zero(m), IndexSet::EMPTY, Scalar::one())
    }

    pub fn monomial(n: usize, alpha: MultiDegree, set: IndexSet, c: Scalar) -> PolySuperFunc {
        let m = alpha.vars();
        let mut terms = Terms::new();
        lin::add_term(&mut terms, (alpha, set), c);
        PolySuperFunc { m, n, terms }
    }

    /// The coordinate `x_i` (1-based).
    pub fn coord(m: usize, n: usize, i: usize) -> PolySuperFunc {
        PolySuperFunc::monomial(n, MultiDegree::unit(m, i), IndexSet::EMPTY, Scalar::one())
    }

    /// The odd generator `ds_a` (1-based).
    pub fn generator(m: usize, n: usize, a: usize) -> PolySuperFunc {
        PolySuperFunc::monomial(n, MultiDegree::zero(m), IndexSet::singleton(a), Scalar::one())
    }

    pub fn from_poly(p: &Poly, n: usize) -> PolySuperFunc {
        let terms = p.terms().iter().map(|(a, c)| ((a.clone(), IndexSet::EMPTY), c.clone())).collect();
        PolySuperFunc { m: p.vars(), n, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &PolySuperFunc) -> PolySuperFunc {
        PolySuperFunc { m: self.m, n: self.n, terms: lin::add(&self.terms, &other.terms) }
    }

    pub fn sub(&self, other: &PolySuperFunc) -> PolySuperFunc {
        PolySuperFunc { m: self.m, n: self.n, terms: lin::sub(&self.terms, &other.terms) }
    }

    pub fn scale(&self, f: &Scalar) -> PolySuperFunc {
        PolySuperFunc { m: self.m, n: self.n, terms: lin::scale(&self.terms, f) }
    }

    pub fn mul(&self, other: &PolySuperFunc) -> PolySuperFunc {
        let mut terms = Terms::new();
        for ((a, i), c) in &self.terms {
            for ((b, j), d) in &other.terms {
                if let Some(neg) = i.wedge_sign(*j) {
                    let v = c * d;
                    lin::add_term(&mut terms, (a.add(b), i.union(*j)), if neg { -v } else { v });
                }
            }
        }
        PolySuperFunc { m: self.m, n: self.n, terms }
    }

    pub fn pow(&self, k: u32) -> PolySuperFunc {
        (0..k).fold(PolySuperFunc::one(self.m, self.n), |acc, _| acc.mul(self))
    }

    /// Terms of Λ-degree `k`.
    pub fn lambda_part(&self, k: usize) -> PolySuperFunc {
        let terms = self.terms.iter().filter(|((_, i), _)| i.len() == k).map(|(key, c)| (key.clone(), c.clone())).collect();
        PolySuperFunc { m: self.m, n: self.n, terms }
    }

    /// Terms of Λ-degree at least `k`.
    pub fn lambda_at_least(&self, k: usize) -> PolySuperFunc {
        let terms = self.terms.iter().filter(|((_, i), _)| i.len() >= k).map(|(key, c)| (key.clone(), c.clone())).collect();
        PolySuperFunc { m: self.m, n: self.n, terms }
    }

    /// Smallest Λ-degree present; `n + 1` for zero.
    pub fn filtration_degree(&self) -> usize {
        self.terms.keys().map(|(_, i)| i.len()).min().unwrap_or(self.n + 1)
    }

    /// Parity when homogeneous; zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|(_, i)| Parity::of(i.len()));
        let Some(first) = it.next() else { return Some(Parity::Even) };
        it.all(|p| p == first).then_some(first)
    }

    /// The augmentation `ε`: the Λ⁰ part as a polynomial.
    pub fn augmentation(&self) -> Poly {
        Poly::from_terms(self.m, self.terms.iter().filter(|((_, i), _)| i.is_empty()).map(|((a, _), c)| (a.clone(), c.clone())))
            .expect("consistent arity")
    }

    /// The polynomial coefficient of `ds_I`.
    pub fn coefficient(&self, set: IndexSet) -> Poly {
        Poly::from_terms(self.m, self.terms.iter().filter(|((_, i), _)| *i == set).map(|((a, _), c)| (a.clone(), c.clone())))
            .expect("consistent arity")
    }

    /// Coefficients evaluated at `p`.
    pub fn eval_at(&self, p: &[Scalar]) -> ExtElem {
        let mut out: Terms<IndexSet> = Terms::new();
        for ((a, i), c) in &self.terms {
            let v = Poly::monomial(a.clone(), c.clone()).eval(p);
            lin::add_term(&mut out, *i, v);
        }
        ExtElem::from_terms(self.n, out).expect("indices within rank")
    }

    pub fn to_json(&self) -> Vec<SuperFuncTerm> {
        self.terms.iter().map(|((a, i), c)| SuperFuncTerm { exps: a.clone(), ext: *i, coeff: c.clone() }).collect()
    }

    pub fn from_json(m: usize, n: usize, terms: &[SuperFuncTerm]) -> Result<PolySuperFunc> {
        if let Some(t) = terms.iter().find(|t| t.exps.vars() != m || t.ext.max_index() > n) {
            return domain(format!("term {t:?} does not fit dimensions ({m}|{n})"));
        }
        Ok(PolySuperFunc { m, n, terms: lin::collect(terms.iter().map(|t| ((t.exps.clone(), t.ext), t.coeff.clone()))) })
    }
}

impl fmt::Debug for PolySuperFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|((a, i), c)| format!("{}·x{:?}·ds{:?}", scalar::format(c), a, i)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A unital superalgebra morphism from functions on the target `(n|q)` to
/// functions on the source `(m|p)`, given by the images of the target
/// coordinates `y_j` and odd generators `σ_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperMapData {
    pub m: usize,
    pub p: usize,
    pub coord_images: Vec<PolySuperFunc>,
    pub odd_images: Vec<PolySuperFunc>,
}

/// JSON form of [`SuperMapData`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperMapJson {
    /// `[m, p]`.
    pub source_dims: [usize; 2],
    pub coord_images: Vec<Vec<SuperFuncTerm>>,
    pub odd_images: Vec<Vec<SuperFuncTerm>>,
}

impl SuperMapData {
    pub fn new(m: usize, p: usize, coord_images: Vec<PolySuperFunc>, odd_images: Vec<PolySuperFunc>) -> Result<SuperMapData> {
        if coord_images.iter().chain(&odd_images).any(|f| f.m != m || f.n != p) {
            return mismatch(format!("images must be superfunctions on ({m}|{p})"));
        }
        if let Some(j) = coord_images.iter().position(|f| f.parity() != Some(Parity::Even)) {
            return domain(format!("image of coordinate y{} is not even", j + 1));
        }
        if let Some(a) = odd_images.iter().position(|f| !f.is_zero() && f.parity() != Some(Parity::Odd)) {
            return domain(format!("image of generator σ{} is not odd", a + 1));
        }
        Ok(SuperMapData { m, p, coord_images, odd_images })
    }

    /// The identity on `(m|p)`.
    pub fn identity(m: usize, p: usize) -> SuperMapData {
        SuperMapData {
            m,
            p,
            coord_images: (1..=m).map(|i| PolySuperFunc::coord(m, p, i)).collect(),
            odd_images: (1..=p).map(|a| PolySuperFunc::generator(m, p, a)).collect(),
        }
    }

    /// Target dimensions `(n, q)`.
    pub fn target_dims(&self) -> (usize, usize) {
        (self.coord_images.len(), self.odd_images.len())
    }

    /// The base map `φ = ε∘Φ` on coordinates.
    pub fn base_map(&self) -> Vec<Poly> {
        self.coord_images.iter().map(PolySuperFunc::augmentation).collect()
    }

    /// `f ∘ φ` for a polynomial on the target.
    pub fn pullback(&self, f: &Poly) -> Result<Poly> {
        if self.coord_images.is_empty() {
            return Ok(Poly::constant(self.m, f.coeff(&MultiDegree::zero(0))));
        }
        f.compose(&self.base_map())
    }

    pub fn to_json(&self) -> SuperMapJson {
        SuperMapJson {
            source_dims: [self.m, self.p],
            coord_images: self.coord_images.iter().map(PolySuperFunc::to_json).collect(),
            odd_images: self.odd_images.iter().map(PolySuperFunc::to_json).collect(),
        }
    }

    pub fn from_json(j: &SuperMapJson) -> Result<SuperMapData> {
        let [m, p] = j.source_dims;
        let parse = |v: &Vec<Vec<SuperFuncTerm>>| v.iter().map(|t| PolySuperFunc::from_json(m, p, t)).collect::<Result<Vec<_>>>();
        SuperMapData::new(m, p, parse(&j.coord_images)?, parse(&j.odd_images)?)
    }
}

/// `Φ(f)`: substitutes the images of coordinates and generators.
pub fn apply(phi: &SuperMapData, f: &PolySuperFunc) -> Result<PolySuperFunc> {
    let (n, q) = phi.target_dims();
    if f.m != n || f.n != q {
        return mismatch(format!("superfunction on ({}|{}) for a map with target ({n}|{q})", f.m, f.n));
    }
    let mut powers: HashMap<(usize, u32), PolySuperFunc> = HashMap::new();
    let mut out = PolySuperFunc::zero(phi.m, phi.p);
    for ((alpha, set), c) in &f.terms {
        let mut t = PolySuperFunc::one(phi.m, phi.p).scale(c);
        for j in 1..=n {
            let e = alpha.get(j);
            if e > 0 {
                let pw = powers.entry((j, e)).or_insert_with(|| phi.coord_images[j - 1].pow(e));
                t = t.mul(pw);
            }
        }
        for a in set.iter() {
            t = t.mul(&phi.odd_images[a - 1]);
        }
        out = out.add(&t);
    }
    Ok(out)
}

/// `[Φ, f](η) = Φ(fη) − (f∘φ)Φ(η)`, iterated over `fs` by the definition.
pub fn twisted_commutator(phi: &SuperMapData, fs: &[Poly], eta: &PolySuperFunc) -> Result<PolySuperFunc> {
    let Some((last, rest)) = fs.split_last() else {
        return apply(phi, eta);
    };
    let (_, q) = phi.target_dims();
    let f_eta = PolySuperFunc::from_poly(last, q).mul(eta);
    let a = twisted_commutator(phi, rest, &f_eta)?;
    let b = twisted_commutator(phi, rest, eta)?;
    let fphi = PolySuperFunc::from_poly(&phi.pullback(last)?, phi.p);
    Ok(a.sub(&fphi.mul(&b)))
}

/// `Π_i (Φ(f_i) − f_i∘φ) · Φ(η)`.
pub fn twisted_commutator_closed(phi: &SuperMapData, fs: &[Poly], eta: &PolySuperFunc) -> Result<PolySuperFunc> {
    let (_, q) = phi.target_dims();
    let mut acc = apply(phi, eta)?;
    for f in fs {
        let d = apply(phi, &PolySuperFunc::from_poly(f, q))?.sub(&PolySuperFunc::from_poly(&phi.pullback(f)?, phi.p));
        acc = d.mul(&acc);
    }
    Ok(acc)
}

/// The order bound `⌊p/2⌋`, `p` the odd rank of the source.
pub fn order_bound(phi: &SuperMapData) -> usize {
    phi.p / 2
}

fn probe_functions(n: usize) -> Vec<Poly> {
    [1, 2].iter().flat_map(|&d| MultiDegree::of_degree(n, d)).map(|a| Poly::monomial(a, Scalar::one())).collect()
}

fn probe_superfunctions(n: usize, q: usize) -> Vec<PolySuperFunc> {
    let mut out: Vec<PolySuperFunc> = IndexSet::all_subsets(q)
        .into_iter()
        .map(|s| PolySuperFunc::monomial(q, MultiDegree::zero(n), s, Scalar::one()))
        .collect();
    if n > 0 {
        out.push(PolySuperFunc::monomial(q, MultiDegree::unit(n, 1), IndexSet::EMPTY, Scalar::one()));
    }
    out
}

/// Checks with coordinate and quadratic probes that iterated twisted
/// commutators of depth `⌊p/2⌋ + 1` vanish, and that the definition agrees
/// with the closed form `Π(Φ(f_i) − f_i∘φ)·Φ(η)`.
pub fn order_bound_check(phi: &SuperMapData) -> Result<Report> {
    let (n, q) = phi.target_dims();
    let probes = probe_functions(n);
    let etas = probe_superfunctions(n, q);
    let k = order_bound(phi);
    let mut vanish = Vec::new();
    let mut closed = Vec::new();
    let mut sharp = false;
    for depth in [k, k + 1] {
        for ix in multisets(probes.len(), depth) {
            let fs: Vec<Poly> = ix.iter().map(|&i| probes[i].clone()).collect();
            for eta in &etas {
                let nested = twisted_commutator(phi, &fs, eta)?;
                if nested != twisted_commutator_closed(phi, &fs, eta)? {
                    closed.push(format!("fs = {fs:?}, η = {eta:?}"));
                }
                if depth == k + 1 && !nested.is_zero() {
                    vanish.push(format!("fs = {fs:?}, η = {eta:?}"));
                }
                if depth == k && !nested.is_zero() {
                    sharp = true;
                }
            }
        }
    }
    let mut r = Report::new();
    r.push_failures("closed_form", &closed);
    r.push_failures(format!("vanishes_at_depth_{}", k + 1), &vanish);
    r.push("depth_bound_attained", true, if sharp { format!("nonzero at depth {k}") } else { format!("already zero at depth {k}") });
    Ok(r)
}

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

/// Checks `Φ(Λ^{≥k}) ⊆ Λ^{≥k}` on monomials `y^β σ_J` with `|β| ≤ 2`.
pub fn filtration_check(phi: &SuperMapData) -> Result<Report> {
    let (n, q) = phi.target_dims();
    let mut fails = Vec::new();
    for beta in MultiDegree::up_to_degree(n, 2) {
        for set in IndexSet::all_subsets(q) {
            let img = apply(phi, &PolySuperFunc::monomial(q, beta.clone(), set, Scalar::one()))?;
            if img.filtration_degree() < set.len() {
                fails.push(format!("y^{beta:?} σ{set:?}"));
            }
        }
    }
    let mut r = Report::new();
    r.push_failures("filtration", &fails);
    Ok(r)
}

/// `Φ^k : Λ^k S*_target → Λ^k S*_source` as a matrix of polynomials; rows
/// index source subsets, columns target subsets, both in lexicographic order.
pub fn induced_grade_map(phi: &SuperMapData, k: usize) -> Result<PolyMatrix> {
    let (n, q) = phi.target_dims();
    let rows = IndexSet::subsets(phi.p, k);
    let cols = IndexSet::subsets(q, k);
    let mut out = vec![vec![Poly::zero(phi.m); cols.len()]; rows.len()];
    for (c, j) in cols.iter().enumerate() {
        let img = apply(phi, &PolySuperFunc::monomial(q, MultiDegree::zero(n), *j, Scalar::one()))?;
        for (r, i) in rows.iter().enumerate() {
            out[r][c] = img.coefficient(*i);
        }
    }
    Ok(out)
}

/// The `Λ²` part of `Φ(f) − f∘φ` evaluated at `p`.
pub fn aux_codifferential(phi: &SuperMapData, f: &Poly, p: &[Scalar]) -> Result<ExtElem> {
    let (_, q) = phi.target_dims();
    let d = apply(phi, &PolySuperFunc::from_poly(f, q))?.sub(&PolySuperFunc::from_poly(&phi.pullback(f)?, phi.p));
    Ok(d.lambda_part(2).eval_at(p))
}

/// True iff every higher truncation defect vanishes: coordinate images are
/// purely of Λ-degree 0 and generator images purely of Λ-degree 1.
pub fn order_zero_criterion(phi: &SuperMapData) -> bool {
    phi.coord_images.iter().all(|f| f.lambda_at_least(1).is_zero()) && phi.odd_images.iter().all(|f| f.lambda_at_least(2).is_zero())
}

/// Checks `Φ(fη) = (f∘φ)·Φ(η)` directly for `f` among coordinates and
/// quadratic monomials and `η` among odd monomials and a coordinate.
pub fn is_module_linear(phi: &SuperMapData) -> Result<bool> {
    let (n, q) = phi.target_dims();
    for f in probe_functions(n) {
        let fphi = PolySuperFunc::from_poly(&phi.pullback(&f)?, phi.p);
        for eta in probe_superfunctions(n, q) {
            let lhs = apply(phi, &PolySuperFunc::from_poly(&f, q).mul(&eta))?;
            if lhs != fphi.mul(&apply(phi, &eta)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use proptest::prelude::*;

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::new(v).unwrap()
    }

    fn sf(m: usize, n: usize, items: &[(&[u32], &[usize], i64)]) -> PolySuperFunc {
        let terms = lin::collect(items.iter().map(|(a, i, c)| ((MultiDegree(a.to_vec()), set(i)), int(*c))));
        PolySuperFunc { m, n, terms }
    }

    fn nilpotent_map() -> SuperMapData {
        // Φ(y) = x + ds1∧ds2 on (1|2) → (1|2), Φ(σ_a) = ds_a.
        let y = sf(1, 2, &[(&[1], &[], 1), (&[0], &[1, 2], 1)]);
        SuperMapData::new(1, 2, vec![y], vec![PolySuperFunc::generator(1, 2, 1), PolySuperFunc::generator(1, 2, 2)]).unwrap()
    }

    #[test]
    fn apply_examples() {
        let id = SuperMapData::identity(2, 2);
        let f = sf(2, 2, &[(&[2, 1], &[1], 3), (&[0, 0], &[1, 2], -1)]);
        assert_eq!(apply(&id, &f).unwrap(), f);
        let phi = nilpotent_map();
        let y2 = sf(1, 2, &[(&[2], &[], 1)]);
        assert_eq!(apply(&phi, &y2).unwrap(), sf(1, 2, &[(&[2], &[], 1), (&[1], &[1, 2], 2)]));
        assert_eq!(apply(&phi, &PolySuperFunc::one(1, 2)).unwrap(), PolySuperFunc::one(1, 2));
    }

    #[test]
    fn parity_violations_are_rejected() {
        let bad = SuperMapData::new(1, 1, vec![PolySuperFunc::generator(1, 1, 1)], vec![]);
        assert!(bad.is_err());
        let bad = SuperMapData::new(1, 1, vec![], vec![PolySuperFunc::one(1, 1).add(&PolySuperFunc::generator(1, 1, 1))]);
        assert!(bad.is_err());
    }

    #[test]
    fn order_bound_examples() {
        let id = SuperMapData::identity(1, 2);
        let r = order_bound_check(&id).unwrap();
        assert!(r.passed());
        assert!(twisted_commutator(&id, &[Poly::var(1, 1)], &PolySuperFunc::one(1, 2)).unwrap().is_zero());
        let phi = nilpotent_map();
        assert!(order_bound_check(&phi).unwrap().passed());
        let f = Poly::var(1, 1);
        assert!(!twisted_commutator(&phi, &[f.clone()], &PolySuperFunc::one(1, 2)).unwrap().is_zero());
        assert!(twisted_commutator(&phi, &[f.clone(), f], &PolySuperFunc::one(1, 2)).unwrap().is_zero());
    }

    #[test]
    fn order_bound_is_sharp_for_rank_four() {
        // Φ(y1) = x1 + ds1 ds2, Φ(y2) = x2 + ds3 ds4 on (2|4).
        let y1 = sf(2, 4, &[(&[1, 0], &[], 1), (&[0, 0], &[1, 2], 1)]);
        let y2 = sf(2, 4, &[(&[0, 1], &[], 1), (&[0, 0], &[3, 4], 1)]);
        let gens = (1..=4).map(|a| PolySuperFunc::generator(2, 4, a)).collect();
        let phi = SuperMapData::new(2, 4, vec![y1, y2], gens).unwrap();
        let one = PolySuperFunc::one(2, 4);
        let (x1, x2) = (Poly::var(2, 1), Poly::var(2, 2));
        assert!(!twisted_commutator(&phi, &[x1.clone(), x2.clone()], &one).unwrap().is_zero());
        assert!(twisted_commutator(&phi, &[x1.clone(), x2.clone(), x1], &one).unwrap().is_zero());
        let r = order_bound_check(&phi).unwrap();
        assert!(r.passed());
        assert!(r.checks.iter().any(|c| c.name == "depth_bound_attained" && c.detail.starts_with("nonzero")));
    }

    #[test]
    fn target_rank_bound_fails_without_odd_target() {
        // Target (1|0), source (1|2): ⌊q/2⌋ = 0 but the commutator is nonzero.
        let y = sf(1, 2, &[(&[1], &[], 1), (&[0], &[1, 2], 1)]);
        let phi = SuperMapData::new(1, 2, vec![y], vec![]).unwrap();
        let one = PolySuperFunc::one(1, 0);
        assert!(!twisted_commutator(&phi, &[Poly::var(1, 1)], &one).unwrap().is_zero());
        assert!(order_bound_check(&phi).unwrap().passed());
    }

    #[test]
    fn filtration_and_grade_maps() {
        let s = sf(1, 3, &[(&[0], &[1], 1), (&[0], &[1, 2, 3], 1)]);
        let gens = vec![s, PolySuperFunc::generator(1, 3, 2), PolySuperFunc::generator(1, 3, 3)];
        let phi = SuperMapData::new(1, 3, vec![PolySuperFunc::coord(1, 3, 1)], gens).unwrap();
        assert!(filtration_check(&phi).unwrap().passed());
        let g1 = induced_grade_map(&phi, 1).unwrap();
        assert_eq!(g1[0][0], Poly::one(1));
        assert_eq!(g1[1][0], Poly::zero(1));
        assert!(!order_zero_criterion(&phi));
        let id = SuperMapData::identity(1, 2);
        assert_eq!(induced_grade_map(&id, 1).unwrap(), vec![vec![Poly::one(1), Poly::zero(1)], vec![Poly::zero(1), Poly::one(1)]]);
    }

    #[test]
    fn aux_examples() {
        let id = SuperMapData::identity(1, 2);
        let p = [int(2)];
        assert!(aux_codifferential(&id, &Poly::var(1, 1).pow(3), &p).unwrap().is_zero());
        let phi = nilpotent_map();
        assert_eq!(aux_codifferential(&phi, &Poly::var(1, 1), &p).unwrap(), ExtElem::monomial(2, set(&[1, 2]), int(1)));
        assert!(aux_codifferential(&phi, &Poly::constant(1, int(7)), &p).unwrap().is_zero());
        assert!(!order_zero_criterion(&phi));
        assert!(!is_module_linear(&phi).unwrap());
    }

    #[test]
    fn order_zero_examples() {
        // Exterior lift of the bundle map x ↦ x², σ1 ↦ x·ds1 + ds2, σ2 ↦ ds2.
        let y = sf(1, 2, &[(&[2], &[], 1)]);
        let s1 = sf(1, 2, &[(&[1], &[1], 1), (&[0], &[2], 1)]);
        let phi = SuperMapData::new(1, 2, vec![y], vec![s1, PolySuperFunc::generator(1, 2, 2)]).unwrap();
        assert!(order_zero_criterion(&phi));
        assert!(is_module_linear(&phi).unwrap());
    }

    #[test]
    fn module_linearity_does_not_see_generator_corrections() {
        // Φ(σ1) = ds1 + ds1 ds2 ds3 with pure coordinate images: the cubic term
        // is a nonzero truncation defect, yet Φ(fη) = (f∘φ)Φ(η) still holds.
        let s1 = sf(1, 3, &[(&[0], &[1], 1), (&[0], &[1, 2, 3], 1)]);
        let gens = vec![s1, PolySuperFunc::generator(1, 3, 2), PolySuperFunc::generator(1, 3, 3)];
        let phi = SuperMapData::new(1, 3, vec![PolySuperFunc::coord(1, 3, 1)], gens).unwrap();
        assert!(!order_zero_criterion(&phi));
        assert!(is_module_linear(&phi).unwrap());
    }

    #[test]
    fn json_roundtrip() {
        let phi = nilpotent_map();
        let s = serde_json::to_string(&phi.to_json()).unwrap();
        let back: SuperMapJson = serde_json::from_str(&s).unwrap();
        assert_eq!(SuperMapData::from_json(&back).unwrap(), phi);
    }

    fn arb_sf(m: usize, n: usize, parity: Parity) -> impl Strategy<Value = PolySuperFunc> {
        let sets: Vec<IndexSet> = IndexSet::all_subsets(n).into_iter().filter(|s| Parity::of(s.len()) == parity).collect();
        let degs = MultiDegree::up_to_degree(m, 2);
        let (ns, nd) = (sets.len(), degs.len());
        proptest::collection::vec((0..nd, 0..ns, -2i64..=2), 0..4).prop_map(move |v| PolySuperFunc {
            m,
            n,
            terms: lin::collect(v.into_iter().map(|(a, s, c)| ((degs[a].clone(), sets[s]), int(c)))),
        })
    }

    fn arb_map() -> impl Strategy<Value = SuperMapData> {
        (proptest::collection::vec(arb_sf(2, 3, Parity::Even), 2), proptest::collection::vec(arb_sf(2, 3, Parity::Odd), 3))
            .prop_map(|(c, o)| {
                let c = c.into_iter().map(|f| if f.is_zero() { PolySuperFunc::coord(2, 3, 1) } else { f }).collect();
                let o = o.into_iter().map(|f| f.lambda_at_least(1)).collect();
                SuperMapData::new(2, 3, c, o).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn apply_is_multiplicative(phi in arb_map(), f in arb_sf(2, 3, Parity::Even), g in arb_sf(2, 3, Parity::Odd)) {
            let fg = apply(&phi, &f.mul(&g)).unwrap();
            prop_assert_eq!(fg, apply(&phi, &f).unwrap().mul(&apply(&phi, &g).unwrap()));
        }

        #[test]
        fn augmentation_commutes(phi in arb_map(), f in arb_sf(2, 3, Parity::Even)) {
            let lhs = apply(&phi, &f).unwrap().augmentation();
            prop_assert_eq!(lhs, phi.pullback(&f.augmentation()).unwrap());
        }

        #[test]
        fn commutator_closed_form(phi in arb_map(), f in arb_sf(2, 0, Parity::Even), eta in arb_sf(2, 3, Parity::Odd)) {
            let f = f.augmentation();
            prop_assert_eq!(twisted_commutator(&phi, &[f.clone()], &eta).unwrap(), twisted_commutator_closed(&phi, &[f], &eta).unwrap());
        }

        #[test]
        fn aux_is_derivation_along(phi in arb_map(), f in arb_sf(2, 0, Parity::Even), g in arb_sf(2, 0, Parity::Even), p in proptest::collection::vec(-2i64..=2, 2)) {
            let p: Vec<Scalar> = p.into_iter().map(int).collect();
            let (f, g) = (f.augmentation(), g.augmentation());
            let lhs = aux_codifferential(&phi, &f.mul(&g), &p).unwrap();
            let fp = phi.pullback(&f).unwrap().eval(&p);
            let gp = phi.pullback(&g).unwrap().eval(&p);
            let rhs = aux_codifferential(&phi, &f, &p).unwrap().scale(&gp).add(&aux_codifferential(&phi, &g, &p).unwrap().scale(&fp)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn grade_two_is_exterior_square(phi in arb_map()) {
            let g1 = induced_grade_map(&phi, 1).unwrap();
            let g2 = induced_grade_map(&phi, 2).unwrap();
            let pairs = IndexSet::subsets(3, 2);
            for (r, i) in pairs.iter().enumerate() {
                for (c, j) in pairs.iter().enumerate() {
                    let (i1, i2) = (i.to_vec()[0] - 1, i.to_vec()[1] - 1);
                    let (j1, j2) = (j.to_vec()[0] - 1, j.to_vec()[1] - 1);
                    let minor = g1[i1][j1].mul(&g1[i2][j2]).sub(&g1[i1][j2].mul(&g1[i2][j1]));
                    prop_assert_eq!(&g2[r][c], &minor);
                }
            }
        }

        #[test]
        fn order_zero_implies_module_linear(phi in arb_map()) {
            let phi0 = SuperMapData {
                coord_images: phi.coord_images.iter().map(|f| f.lambda_part(0)).collect(),
                odd_images: phi.odd_images.iter().map(|f| f.lambda_part(1)).collect(),
                ..phi
            };
            prop_assert!(order_zero_criterion(&phi0));
            prop_assert!(is_module_linear(&phi0).unwrap());
        }

        #[test]
        fn bounds_hold(phi in arb_map()) {
            prop_assert!(order_bound_check(&phi).unwrap().passed());
            prop_assert!(filtration_check(&phi).unwrap().passed());
        }
    }
}
