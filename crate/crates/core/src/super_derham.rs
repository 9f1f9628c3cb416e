//! Superdifferential forms on the split polynomial supermanifold
//! `(ℝ^m | ℝ^m × S)` with `S` trivial of rank `n` and an odd connection
//! `∇ = d + A`.
//!
//! A form is a sum of monomials `p(x) · dx^a · ds̄^b · θ^c`: `dx` are the
//! 1-forms of the base, `ds̄` the symmetric odd codirections and `θ` the odd
//! generators of `ΛS*`. Generators carry a form degree and a parity,
//! `x:(0,0)`, `θ:(0,1)`, `dx:(1,0)`, `ds̄:(1,1)`, and swapping two of them
//! costs `(−1)^{deg·deg + par·par}`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{domain, mismatch, Result};
use crate::index::{relative_signature_odd, IndexSet, MultiDegree, Parity, Permutation};
use crate::lin::{self, Terms};
use crate::linalg::{self, Echelon};
use crate::poly::{Poly, PolyTerm};
use crate::polydiff_jets::{Connection, PolyMatrix};
use crate::report::Report;
use crate::scalar::{self, Scalar};
use crate::supermaps::PolySuperFunc;

/// `∇_i s_μ = Σ_ν A_i[ν][μ] s_ν` on the trivial odd bundle.
pub type OddConnection = Connection;

/// Monomial key `x^x · dx^a · ds̄^b · θ^c`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormKey {
    pub x: MultiDegree,
    pub a: IndexSet,
    pub b: MultiDegree,
    pub c: IndexSet,
}

impl FormKey {
    /// Total form degree `|a| + |b|`.
    pub fn degree(&self) -> usize {
        self.a.len() + self.b.total() as usize
    }

    /// `|x| + |a| + |b| + |c|`, preserved by the flat differential.
    pub fn weight(&self) -> usize {
        self.x.total() as usize + self.a.len() + self.b.total() as usize + self.c.len()
    }

    fn eps_odd(&self) -> bool {
        (self.a.len() + self.b.total() as usize) % 2 == 1
    }
}

/// A superdifferential form with polynomial coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct SuperForm {
    pub m: usize,
    pub n: usize,
    pub terms: Terms<FormKey>,
}

/// JSON term of a [`SuperForm`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormTerm {
    pub x: MultiDegree,
    pub dx: IndexSet,
    pub ds: MultiDegree,
    pub theta: IndexSet,
    #[serde(with = "scalar::serde_str")]
    pub coeff: Scalar,
}

fn key(x: MultiDegree, a: IndexSet, b: MultiDegree, c: IndexSet) -> FormKey {
    FormKey { x, a, b, c }
}

impl SuperForm {
    pub fn zero(m: usize, n: usize) -> SuperForm {
        SuperForm { m, n, terms: Terms::new() }
    }

    pub fn monomial(m: usize, n: usize, k: FormKey, c: Scalar) -> SuperForm {
        let mut f = SuperForm::zero(m, n);
        lin::add_term(&mut f.terms, k, c);
        f
    }

    /// `p · dx^a · ds̄^b · θ^c`.
    pub fn from_parts(p: &Poly, a: IndexSet, b: MultiDegree, c: IndexSet, n: usize) -> SuperForm {
        let m = p.vars();
        let terms = p.terms().iter().map(|(x, v)| (key(x.clone(), a, b.clone(), c), v.clone())).collect();
        SuperForm { m, n, terms }
    }

    /// The superfunction `f` as a 0-form.
    pub fn from_function(f: &PolySuperFunc) -> SuperForm {
        let terms = f.terms.iter().map(|((x, c), v)| (key(x.clone(), IndexSet::EMPTY, MultiDegree::zero(f.n), *c), v.clone())).collect();
        SuperForm { m: f.m, n: f.n, terms }
    }

    /// The generator `dx_i`.
    pub fn dx(m: usize, n: usize, i: usize) -> SuperForm {
        SuperForm::monomial(m, n, key(MultiDegree::zero(m), IndexSet::singleton(i), MultiDegree::zero(n), IndexSet::EMPTY), Scalar::one())
    }

    /// The generator `ds̄_μ`.
    pub fn ds(m: usize, n: usize, mu: usize) -> SuperForm {
        SuperForm::monomial(m, n, key(MultiDegree::zero(m), IndexSet::EMPTY, MultiDegree::unit(n, mu), IndexSet::EMPTY), Scalar::one())
    }

    /// The generator `θ_μ`.
    pub fn theta(m: usize, n: usize, mu: usize) -> SuperForm {
        SuperForm::monomial(m, n, key(MultiDegree::zero(m), IndexSet::EMPTY, MultiDegree::zero(n), IndexSet::singleton(mu)), Scalar::one())
    }

    /// The coordinate `x_i` as a 0-form.
    pub fn coord(m: usize, n: usize, i: usize) -> SuperForm {
        SuperForm::monomial(m, n, key(MultiDegree::unit(m, i), IndexSet::EMPTY, MultiDegree::zero(n), IndexSet::EMPTY), Scalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &SuperForm) -> SuperForm {
        SuperForm { m: self.m, n: self.n, terms: lin::add(&self.terms, &other.terms) }
    }

    pub fn sub(&self, other: &SuperForm) -> SuperForm {
        SuperForm { m: self.m, n: self.n, terms: lin::sub(&self.terms, &other.terms) }
    }

    pub fn scale(&self, f: &Scalar) -> SuperForm {
        SuperForm { m: self.m, n: self.n, terms: lin::scale(&self.terms, f) }
    }

    /// Terms of total degree `k`.
    pub fn degree_part(&self, k: usize) -> SuperForm {
        self.filter(|key| key.degree() == k)
    }

    /// Terms of bidegree `(|a|, |b|) = (a, b)`.
    pub fn component(&self, a: usize, b: usize) -> SuperForm {
        self.filter(|key| key.a.len() == a && key.b.total() as usize == b)
    }

    fn filter(&self, keep: impl Fn(&FormKey) -> bool) -> SuperForm {
        SuperForm { m: self.m, n: self.n, terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (k.clone(), v.clone())).collect() }
    }

    /// Total degree when homogeneous.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(FormKey::degree);
        let first = it.next().unwrap_or(0);
        it.all(|d| d == first).then_some(first)
    }

    /// Parity `|b| + |c|` when homogeneous.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|k| Parity::of(k.b.total() as usize + k.c.len()));
        let Some(first) = it.next() else { return Some(Parity::Even) };
        it.all(|p| p == first).then_some(first)
    }

    /// Set of `(|a|, |b|)` bidegrees present.
    pub fn bidegrees(&self) -> BTreeSet<(usize, usize)> {
        self.terms.keys().map(|k| (k.a.len(), k.b.total() as usize)).collect()
    }

    /// `p · self` for a polynomial `p`.
    pub fn mul_poly(&self, p: &Poly) -> SuperForm {
        let mut out = Terms::new();
        for (k, v) in &self.terms {
            for (x, c) in p.terms() {
                lin::add_term(&mut out, key(k.x.add(x), k.a, k.b.clone(), k.c), v * c);
            }
        }
        SuperForm { m: self.m, n: self.n, terms: out }
    }

    /// The product of forms.
    pub fn wedge(&self, other: &SuperForm) -> SuperForm {
        let mut out = Terms::new();
        for (k, v) in &self.terms {
            for (l, w) in &other.terms {
                if let Some(t) = wedge_keys(k, l) {
                    let (kk, neg) = t;
                    let c = v * w;
                    lin::add_term(&mut out, kk, if neg { -c } else { c });
                }
            }
        }
        SuperForm { m: self.m, n: self.n, terms: out }
    }

    /// The coefficient superfunction of the `(a=∅, b=0)` part.
    pub fn function_part(&self) -> PolySuperFunc {
        let mut out = PolySuperFunc::zero(self.m, self.n);
        for (k, v) in &self.terms {
            if k.a.is_empty() && k.b.total() == 0 {
                lin::add_term(&mut out.terms, (k.x.clone(), k.c), v.clone());
            }
        }
        out
    }

    pub fn to_json(&self) -> Vec<FormTerm> {
        self.terms
            .iter()
            .map(|(k, v)| FormTerm { x: k.x.clone(), dx: k.a, ds: k.b.clone(), theta: k.c, coeff: v.clone() })
            .collect()
    }

    pub fn from_json(m: usize, n: usize, terms: &[FormTerm]) -> Result<SuperForm> {
        if let Some(t) = terms.iter().find(|t| t.x.vars() != m || t.ds.vars() != n || t.dx.max_index() > m || t.theta.max_index() > n) {
            return domain(format!("term {t:?} does not fit dimensions ({m}|{n})"));
        }
        Ok(SuperForm { m, n, terms: lin::collect(terms.iter().map(|t| (key(t.x.clone(), t.dx, t.ds.clone(), t.theta), t.coeff.clone()))) })
    }
}

impl fmt::Debug for SuperForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, v)| format!("{}·x{:?}·dx{:?}·ds{:?}·θ{:?}", scalar::format(v), k.x, k.a, k.b, k.c))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Product of two monomials; the flag is true for a minus sign.
fn wedge_keys(k: &FormKey, l: &FormKey) -> Option<(FormKey, bool)> {
    let a_neg = k.a.wedge_sign(l.a)?;
    let c_neg = k.c.wedge_sign(l.c)?;
    let cross = (l.a.len() * k.b.total() as usize + l.b.total() as usize * k.c.len()) % 2 == 1;
    Some((key(k.x.add(&l.x), k.a.union(l.a), k.b.add(&l.b), k.c.union(l.c)), a_neg ^ c_neg ^ cross))
}

fn below(set: IndexSet, i: usize) -> usize {
    set.count_below(i)
}

/// `(θ-set after replacing θ_μ by θ_ν in place, minus sign)`.
fn replace_theta(c: IndexSet, mu: usize, nu: usize) -> Option<(IndexSet, bool)> {
    let rest = c.difference(IndexSet::singleton(mu));
    let s1 = below(c, mu) % 2 == 1;
    let s2 = IndexSet::singleton(nu).wedge_sign(rest)?;
    Some((rest.union(IndexSet::singleton(nu)), s1 ^ s2))
}

fn add_scaled(out: &mut Terms<FormKey>, k: FormKey, v: &Scalar, p: &Poly) {
    for (x, c) in p.terms() {
        lin::add_term(out, key(k.x.add(x), k.a, k.b.clone(), k.c), v * c);
    }
}

/// The even derivation `∇̃_i = ∂_i + A_i★`, with `A★ ds̄_μ = −Σ_ν A[μ][ν] ds̄_ν`
/// and the same rule on `θ`.
pub fn nabla_tilde(conn: &OddConnection, i: usize, w: &SuperForm) -> SuperForm {
    let a = &conn.a[i - 1];
    let mut out = Terms::new();
    for (k, v) in &w.terms {
        if let Some(x) = k.x.dec(i) {
            lin::add_term(&mut out, key(x, k.a, k.b.clone(), k.c), v * Scalar::from_integer(k.x.get(i).into()));
        }
        for mu in 1..=w.n {
            let bm = k.b.get(mu);
            if bm == 0 {
                continue;
            }
            let base = k.b.dec(mu).expect("positive exponent");
            let f = -(v * Scalar::from_integer(bm.into()));
            for nu in 1..=w.n {
                add_scaled(&mut out, key(k.x.clone(), k.a, base.inc(nu), k.c), &f, &a[mu - 1][nu - 1]);
            }
        }
        for mu in k.c.iter() {
            for nu in 1..=w.n {
                if let Some((c2, neg)) = replace_theta(k.c, mu, nu) {
                    let f = if neg { v.clone() } else { -v.clone() };
                    add_scaled(&mut out, key(k.x.clone(), k.a, k.b.clone(), c2), &f, &a[mu - 1][nu - 1]);
                }
            }
        }
    }
    SuperForm { m: w.m, n: w.n, terms: out }
}

/// `dx_i ∧ ·`.
fn dx_wedge(i: usize, w: &SuperForm) -> SuperForm {
    let s = IndexSet::singleton(i);
    let mut out = Terms::new();
    for (k, v) in &w.terms {
        if let Some(neg) = s.wedge_sign(k.a) {
            lin::add_term(&mut out, key(k.x.clone(), k.a.union(s), k.b.clone(), k.c), if neg { -v.clone() } else { v.clone() });
        }
    }
    SuperForm { m: w.m, n: w.n, terms: out }
}

/// `id◁ = Σ_μ ds̄_μ· ⊗ s_μ⌟` on the `Sym ⊗ Λ` factor, without signs from `dx`.
pub fn shift_left(w: &SuperForm) -> SuperForm {
    let mut out = Terms::new();
    for (k, v) in &w.terms {
        for mu in k.c.iter() {
            let c = if below(k.c, mu) % 2 == 1 { -v.clone() } else { v.clone() };
            lin::add_term(&mut out, key(k.x.clone(), k.a, k.b.inc(mu), k.c.difference(IndexSet::singleton(mu))), c);
        }
    }
    SuperForm { m: w.m, n: w.n, terms: out }
}

/// `B▷ = Σ_μ s_μ⌟ ⊗ B(…)` acting as `ds̄_μ ↦ Σ_λ B[μ][λ] θ_λ`, with `B` a
/// matrix of polynomials; `id▷` for `B = 1`.
fn shift_right_by(w: &SuperForm, b: &PolyMatrix) -> SuperForm {
    let mut out = Terms::new();
    for (k, v) in &w.terms {
        for mu in 1..=w.n {
            let bm = k.b.get(mu);
            if bm == 0 {
                continue;
            }
            let base = k.b.dec(mu).expect("positive exponent");
            for lam in 1..=w.n {
                if b[mu - 1][lam - 1].is_zero() {
                    continue;
                }
                if let Some(neg) = IndexSet::singleton(lam).wedge_sign(k.c) {
                    let f = v * Scalar::from_integer(bm.into());
                    let f = if neg { -f } else { f };
                    add_scaled(&mut out, key(k.x.clone(), k.a, base.clone(), k.c.union(IndexSet::singleton(lam))), &f, &b[mu - 1][lam - 1]);
                }
            }
        }
    }
    SuperForm { m: w.m, n: w.n, terms: out }
}

/// `id▷ = Σ_μ s_μ⌟ ⊗ θ_μ∧` on the `Sym ⊗ Λ` factor, without signs from `dx`.
pub fn shift_right(w: &SuperForm) -> SuperForm {
    let id: PolyMatrix = (0..w.n).map(|i| (0..w.n).map(|j| if i == j { Poly::one(w.m) } else { Poly::zero(w.m) }).collect()).collect();
    shift_right_by(w, &id)
}

/// `(−1)^N` with `N = |a| + |b|` read on the input.
fn eps(w: &SuperForm) -> SuperForm {
    SuperForm { m: w.m, n: w.n, terms: w.terms.iter().map(|(k, v)| (k.clone(), if k.eps_odd() { -v.clone() } else { v.clone() })).collect() }
}

/// Curvature components `R_ij = ∂_iA_j − ∂_jA_i + [A_i, A_j]` for `i < j`.
pub fn curvature(conn: &OddConnection) -> BundleForm {
    let (m, n) = (conn.m, conn.r);
    let mut comps = BTreeMap::new();
    for set in IndexSet::subsets(m, 2) {
        let v = set.to_vec();
        let (i, j) = (v[0], v[1]);
        let (ai, aj) = (&conn.a[i - 1], &conn.a[j - 1]);
        let mut r = vec![vec![Poly::zero(m); n]; n];
        for (row, rrow) in r.iter_mut().enumerate() {
            for (col, e) in rrow.iter_mut().enumerate() {
                let mut acc = aj[row][col].deriv(i).sub(&ai[row][col].deriv(j));
                for t in 0..n {
                    acc = acc.add(&ai[row][t].mul(&aj[t][col])).sub(&aj[row][t].mul(&ai[t][col]));
                }
                *e = acc;
            }
        }
        if r.iter().flatten().any(|p| !p.is_zero()) {
            comps.insert(set, r);
        }
    }
    BundleForm { m, n, values: BundleValues::Endo, comps }
}

/// The super exterior derivative
/// `d = Σ_i dx_i∧∇̃_i + (−1)^N (id◁ − Σ_{i<j} dx_i∧dx_j∧R_ij▷)`, `N = |a|+|b|`
/// read on the input.
pub fn super_d(conn: &OddConnection, w: &SuperForm) -> Result<SuperForm> {
    if conn.m != w.m || conn.r != w.n {
        return mismatch("connection and form over different dimensions");
    }
    let mut out = SuperForm::zero(w.m, w.n);
    for i in 1..=w.m {
        out = out.add(&dx_wedge(i, &nabla_tilde(conn, i, w)));
    }
    let ew = eps(w);
    out = out.add(&shift_left(&ew));
    let r = curvature(conn);
    for (set, rij) in &r.comps {
        let v = set.to_vec();
        let t = dx_wedge(v[0], &dx_wedge(v[1], &shift_right_by(&ew, rij)));
        out = out.sub(&t);
    }
    Ok(out)
}

/// `{d, (−1)^N id▷} − {id◁, id▷}` with `(−1)^N` read on the input.
pub fn delta_operator(conn: &OddConnection, w: &SuperForm) -> Result<SuperForm> {
    let ep = |f: &SuperForm| shift_right(&eps(f));
    let a = super_d(conn, &ep(w))?;
    let b = ep(&super_d(conn, w)?);
    let c = shift_left(&shift_right(w));
    let d = shift_right(&shift_left(w));
    Ok(a.add(&b).sub(&c).sub(&d))
}

/// What a bundle-valued form takes values in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BundleValues {
    /// Sections of `S`: `n×1` matrices, `∇ = ∂ + A`.
    Section,
    /// Endomorphisms of `S`: `n×n` matrices, `∇ = ∂ + [A, ·]`.
    Endo,
}

/// A form on `ℝ^m` with values in `S` or `End S`; `comps[I]` is the value
/// on `(∂_{i_1}, …, ∂_{i_k})` for increasing `I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleForm {
    pub m: usize,
    pub n: usize,
    pub values: BundleValues,
    pub comps: BTreeMap<IndexSet, PolyMatrix>,
}

impl BundleForm {
    /// A section viewed as a 0-form.
    pub fn section(s: &[Poly]) -> BundleForm {
        let m = s.first().map_or(0, Poly::vars);
        let mut comps = BTreeMap::new();
        comps.insert(IndexSet::EMPTY, s.iter().map(|p| vec![p.clone()]).collect());
        BundleForm { m, n: s.len(), values: BundleValues::Section, comps }
    }

    pub fn get(&self, set: IndexSet) -> PolyMatrix {
        let cols = match self.values {
            BundleValues::Section => 1,
            BundleValues::Endo => self.n,
        };
        self.comps.get(&set).cloned().unwrap_or_else(|| vec![vec![Poly::zero(self.m); cols]; self.n])
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().flatten().flatten().all(Poly::is_zero)
    }
}

fn pm_mul(a: &PolyMatrix, b: &PolyMatrix, m: usize) -> PolyMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter().map(|row| (0..cols).map(|j| row.iter().zip(b).fold(Poly::zero(m), |acc, (x, br)| acc.add(&x.mul(&br[j])))).collect()).collect()
}

fn pm_add(a: &PolyMatrix, b: &PolyMatrix, f: &Scalar) -> PolyMatrix {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| { let mut z = x.clone(); z.axpy(f, y); z }).collect()).collect()
}

/// `d^∇ω(∂_{j_0}, …, ∂_{j_k}) = Σ_{t=0}^{k} (−1)^t ∇_{j_t} ω(…, ∂̂_{j_t}, …)`;
/// coordinate fields commute so the bracket sum vanishes.
pub fn twisted_d(conn: &OddConnection, w: &BundleForm) -> Result<BundleForm> {
    if conn.m != w.m || conn.r != w.n {
        return mismatch("connection and form over different dimensions");
    }
    let k = w.comps.keys().map(|s| s.len()).max();
    let mut comps = BTreeMap::new();
    let Some(k) = k else { return Ok(BundleForm { comps, ..w.clone() }) };
    for deg in 0..=k {
        for set in IndexSet::subsets(w.m, deg + 1) {
            let js = set.to_vec();
            let mut acc: Option<PolyMatrix> = None;
            for (t, &j) in js.iter().enumerate() {
                let inner = w.get(set.difference(IndexSet::singleton(j)));
                let a = &conn.a[j - 1];
                let mut cov: PolyMatrix = inner.iter().map(|r| r.iter().map(|p| p.deriv(j)).collect()).collect();
                cov = pm_add(&cov, &pm_mul(a, &inner, w.m), &Scalar::one());
                if w.values == BundleValues::Endo {
                    cov = pm_add(&cov, &pm_mul(&inner, a, w.m), &-Scalar::one());
                }
                let f = scalar::sign(t % 2 == 1);
                acc = Some(match acc {
                    None => cov.iter().map(|r| r.iter().map(|p| p.scale(&f)).collect()).collect(),
                    Some(x) => pm_add(&x, &cov, &f),
                });
            }
            if let Some(x) = acc {
                if x.iter().flatten().any(|p| !p.is_zero()) {
                    comps.insert(set, x);
                }
            }
        }
    }
    Ok(BundleForm { comps, ..w.clone() })
}

/// `R·s` on 2-form components.
pub fn curvature_times(r: &BundleForm, s: &[Poly]) -> BundleForm {
    let m = r.m;
    let col: PolyMatrix = s.iter().map(|p| vec![p.clone()]).collect();
    let comps = r.comps.iter().map(|(k, v)| (*k, pm_mul(v, &col, m))).collect();
    BundleForm { m, n: r.n, values: BundleValues::Section, comps }
}

/// Generating fields: `ψ(∂/∂x_i) = ∇̃_i` (even) and `ψ(s_μ) = s_μ⌟` (odd).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    Coord(usize),
    Odd(usize),
}

impl FieldKind {
    pub fn parity(self) -> Parity {
        match self {
            FieldKind::Coord(_) => Parity::Even,
            FieldKind::Odd(_) => Parity::Odd,
        }
    }
}

/// A generating field with a superfunction coefficient on the left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperVectorFieldGen {
    pub coeff: PolySuperFunc,
    pub kind: FieldKind,
}

impl SuperVectorFieldGen {
    pub fn plain(m: usize, n: usize, kind: FieldKind) -> SuperVectorFieldGen {
        SuperVectorFieldGen { coeff: PolySuperFunc::one(m, n), kind }
    }

    pub fn parity(&self) -> Option<Parity> {
        self.coeff.parity().map(|p| p + self.kind.parity())
    }
}

/// A superderivation of `Poly ⊗ ΛS*` given by the images of `x_i` and `θ_μ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDerivation {
    pub parity: Parity,
    pub x_images: Vec<PolySuperFunc>,
    pub theta_images: Vec<PolySuperFunc>,
}

/// `A★θ_μ` for the field `∇̃_i`.
fn frame_theta_image(conn: &OddConnection, i: usize, mu: usize) -> PolySuperFunc {
    let (m, n) = (conn.m, conn.r);
    let mut out = PolySuperFunc::zero(m, n);
    for nu in 1..=n {
        let p = &conn.a[i - 1][mu - 1][nu - 1];
        for (x, c) in p.terms() {
            lin::add_term(&mut out.terms, (x.clone(), IndexSet::singleton(nu)), -c.clone());
        }
    }
    out
}

impl FieldDerivation {
    pub fn from_gen(conn: &OddConnection, g: &SuperVectorFieldGen) -> Result<FieldDerivation> {
        let (m, n) = (conn.m, conn.r);
        let Some(parity) = g.parity() else {
            return domain("field coefficient is not homogeneous");
        };
        let zero = PolySuperFunc::zero(m, n);
        let (xi, th) = match g.kind {
            FieldKind::Coord(i) => (
                (1..=m).map(|j| if j == i { g.coeff.clone() } else { zero.clone() }).collect(),
                (1..=n).map(|mu| g.coeff.mul(&frame_theta_image(conn, i, mu))).collect(),
            ),
            FieldKind::Odd(mu) => (
                vec![zero.clone(); m],
                (1..=n).map(|nu| if nu == mu { g.coeff.clone() } else { zero.clone() }).collect(),
            ),
        };
        Ok(FieldDerivation { parity, x_images: xi, theta_images: th })
    }

    /// Applies the derivation to a superfunction.
    pub fn apply(&self, f: &PolySuperFunc) -> PolySuperFunc {
        let (m, n) = (f.m, f.n);
        let mut out = PolySuperFunc::zero(m, n);
        for ((x, c), v) in &f.terms {
            let theta = PolySuperFunc::monomial(n, MultiDegree::zero(m), *c, Scalar::one());
            for i in 1..=m {
                if let Some(x2) = x.dec(i) {
                    let p = PolySuperFunc::monomial(n, x2, IndexSet::EMPTY, v * Scalar::from_integer(x.get(i).into()));
                    out = out.add(&self.x_images[i - 1].mul(&p.mul(&theta)));
                }
            }
            let gens = c.to_vec();
            for (t, &mu) in gens.iter().enumerate() {
                let mut term = PolySuperFunc::monomial(n, x.clone(), IndexSet::EMPTY, v.clone());
                for (s, &nu) in gens.iter().enumerate() {
                    let factor = if s == t { self.theta_images[mu - 1].clone() } else { PolySuperFunc::generator(m, n, nu) };
                    term = term.mul(&factor);
                }
                if self.parity.is_odd() && t % 2 == 1 {
                    term = term.scale(&-Scalar::one());
                }
                out = out.add(&term);
            }
        }
        out
    }

    /// The supercommutator `XY − (−1)^{|X||Y|} YX`.
    pub fn bracket(&self, other: &FieldDerivation) -> FieldDerivation {
        let f = scalar::sign(self.parity.koszul(other.parity));
        let img = |a: &PolySuperFunc, b: &PolySuperFunc| self.apply(b).sub(&other.apply(a).scale(&f));
        FieldDerivation {
            parity: self.parity + other.parity,
            x_images: self.x_images.iter().zip(&other.x_images).map(|(a, b)| img(a, b)).collect(),
            theta_images: self.theta_images.iter().zip(&other.theta_images).map(|(a, b)| img(a, b)).collect(),
        }
    }

    /// `X = Σ_i X(x_i)·∇̃_i + Σ_μ h_μ·s_μ⌟` with `h_μ = X(θ_μ) − Σ_i X(x_i)·∇̃_i(θ_μ)`.
    pub fn decompose(&self, conn: &OddConnection) -> Vec<SuperVectorFieldGen> {
        let mut out = Vec::new();
        for (i, g) in self.x_images.iter().enumerate() {
            if !g.is_zero() {
                out.push(SuperVectorFieldGen { coeff: g.clone(), kind: FieldKind::Coord(i + 1) });
            }
        }
        for (mu, t) in self.theta_images.iter().enumerate() {
            let mut h = t.clone();
            for (i, g) in self.x_images.iter().enumerate() {
                h = h.sub(&g.mul(&frame_theta_image(conn, i + 1, mu + 1)));
            }
            if !h.is_zero() {
                out.push(SuperVectorFieldGen { coeff: h, kind: FieldKind::Odd(mu + 1) });
            }
        }
        out
    }
}

/// Interior product with a generating field.
fn interior(kind: FieldKind, w: &SuperForm) -> SuperForm {
    let mut out = Terms::new();
    for (k, v) in &w.terms {
        match kind {
            FieldKind::Coord(i) => {
                if k.a.contains(i) {
                    let c = if below(k.a, i) % 2 == 1 { -v.clone() } else { v.clone() };
                    lin::add_term(&mut out, key(k.x.clone(), k.a.difference(IndexSet::singleton(i)), k.b.clone(), k.c), c);
                }
            }
            FieldKind::Odd(mu) => {
                if let Some(b) = k.b.dec(mu) {
                    let c = v * Scalar::from_integer(k.b.get(mu).into());
                    let c = if k.a.len() % 2 == 1 { -c } else { c };
                    lin::add_term(&mut out, key(k.x.clone(), k.a, b, k.c), c);
                }
            }
        }
    }
    SuperForm { m: w.m, n: w.n, terms: out }
}

/// `ω(X_1, …, X_k)` for the degree-`k` part of `ω`: coefficients are pulled
/// to the left past earlier fields with the Koszul sign, and on generating
/// fields `ω(K_1, …, K_k) = (−1)^{k(k−1)/2} ι_{K_1}⋯ι_{K_k} ω`.
pub fn evaluate(w: &SuperForm, fields: &[SuperVectorFieldGen]) -> Result<PolySuperFunc> {
    let k = fields.len();
    let mut coeff = PolySuperFunc::one(w.m, w.n);
    let mut passed = Parity::Even;
    for f in fields {
        let Some(p) = f.coeff.parity() else {
            return domain("field coefficient is not homogeneous");
        };
        let c = if p.koszul(passed) { f.coeff.scale(&-Scalar::one()) } else { f.coeff.clone() };
        coeff = coeff.mul(&c);
        passed = passed + f.kind.parity();
    }
    let mut cur = w.degree_part(k);
    for f in fields.iter().rev() {
        cur = interior(f.kind, &cur);
    }
    let mut val = cur.function_part();
    if (k * k.saturating_sub(1) / 2) % 2 == 1 {
        val = val.scale(&-Scalar::one());
    }
    Ok(coeff.mul(&val))
}

/// Evaluation extended linearly over a sum of generating fields in the first slot.
fn evaluate_sum_first(w: &SuperForm, first: &[SuperVectorFieldGen], rest: &[SuperVectorFieldGen]) -> Result<PolySuperFunc> {
    let mut out = PolySuperFunc::zero(w.m, w.n);
    for g in first {
        let mut args = vec![g.clone()];
        args.extend_from_slice(rest);
        out = out.add(&evaluate(w, &args)?);
    }
    Ok(out)
}

/// `sgn σ / sgn⁻ σ` for the permutation listing the arguments in `order`.
fn shuffle_weight(order: &[usize], parities: &[Parity]) -> Result<Scalar> {
    let w = Permutation::new(order.iter().map(|i| i + 1).collect())?;
    let sigma = w.inverse();
    let odd: Vec<usize> = (0..parities.len()).filter(|&i| parities[i].is_odd()).map(|i| i + 1).collect();
    let neg = sigma.is_odd() ^ relative_signature_odd(&sigma, &odd)?;
    Ok(scalar::sign(neg))
}

/// `dω(D_0, …, D_k)` by the coset-sum formula: derivative terms over
/// `S_{k+1}/S_1×S_k` minus bracket terms over `S_{k+1}/S_2×S_{k−1}`.
pub fn super_d_by_fields(conn: &OddConnection, w: &SuperForm, fields: &[SuperVectorFieldGen]) -> Result<PolySuperFunc> {
    if fields.is_empty() {
        return mismatch("a k-form's derivative takes k+1 ≥ 1 fields");
    }
    let k = fields.len() - 1;
    let parities = fields.iter().map(|f| f.parity().ok_or_else(|| crate::Error::Domain("inhomogeneous field".into()))).collect::<Result<Vec<_>>>()?;
    let ders = fields.iter().map(|f| FieldDerivation::from_gen(conn, f)).collect::<Result<Vec<_>>>()?;
    let wk = w.degree_part(k);
    let mut out = PolySuperFunc::zero(w.m, w.n);
    for j in 0..=k {
        let mut order = vec![j];
        order.extend((0..=k).filter(|&t| t != j));
        let rest: Vec<SuperVectorFieldGen> = order[1..].iter().map(|&t| fields[t].clone()).collect();
        let inner = evaluate(&wk, &rest)?;
        out = out.add(&ders[j].apply(&inner).scale(&shuffle_weight(&order, &parities)?));
    }
    for j in 0..=k {
        for l in j + 1..=k {
            let mut order = vec![j, l];
            order.extend((0..=k).filter(|&t| t != j && t != l));
            let br = ders[j].bracket(&ders[l]).decompose(conn);
            let rest: Vec<SuperVectorFieldGen> = order[2..].iter().map(|&t| fields[t].clone()).collect();
            let val = evaluate_sum_first(&wk, &br, &rest)?;
            out = out.sub(&val.scale(&shuffle_weight(&order, &parities)?));
        }
    }
    Ok(out)
}

/// All monomials with `|a| + |b| = k` and weight at most `cutoff`.
pub fn basis(m: usize, n: usize, k: usize, cutoff: usize) -> Vec<FormKey> {
    let mut out = Vec::new();
    for na in 0..=k.min(m) {
        let nb = k - na;
        for a in IndexSet::subsets(m, na) {
            for b in MultiDegree::of_degree(n, nb as u32) {
                for nc in 0..=n {
                    if k + nc > cutoff {
                        continue;
                    }
                    for c in IndexSet::subsets(n, nc) {
                        for x in MultiDegree::up_to_degree(m, (cutoff - k - nc) as u32) {
                            out.push(key(x, a, b.clone(), c));
                        }
                    }
                }
            }
        }
    }
    out
}

fn truncated_rank(conn: &OddConnection, k: usize, cutoff: usize) -> Result<usize> {
    let (m, n) = (conn.m, conn.r);
    let src = basis(m, n, k, cutoff);
    let mut index: HashMap<FormKey, usize> = HashMap::new();
    let mut ech = Echelon::new();
    for s in src {
        let img = super_d(conn, &SuperForm::monomial(m, n, s, Scalar::one()))?;
        let mut row: Vec<(usize, Scalar)> = Vec::new();
        for (kk, v) in img.terms {
            if kk.weight() <= cutoff {
                let next = index.len();
                let i = *index.entry(kk).or_insert(next);
                row.push((i, v));
            }
        }
        row.sort_by_key(|(i, _)| *i);
        ech.insert(&row);
    }
    Ok(ech.rank())
}

/// `dim H^k` of the quotient complex of forms of weight at most `cutoff`
/// (weight `|x| + |a| + |b| + |c|`; `d` never lowers it, so higher weights
/// form a subcomplex).
pub fn cohomology_dims(conn: &OddConnection, k: usize, cutoff: usize) -> Result<usize> {
    let dim = basis(conn.m, conn.r, k, cutoff).len();
    let out_rank = truncated_rank(conn, k, cutoff)?;
    let in_rank = if k == 0 { 0 } else { truncated_rank(conn, k - 1, cutoff)? };
    Ok(dim - out_rank - in_rank)
}

/// Assembles `Δ` on every component with fixed `(|a|, |b|, |c|)`,
/// `|b| ≤ cutoff` and polynomial degree `≤ cutoff`, and checks that it
/// preserves the component, is diagonalizable, and has kernel exactly the
/// components with `b = 0` and `c = ∅`.
pub fn delta_kernel_check(conn: &OddConnection, cutoff: usize) -> Result<Report> {
    let (m, n) = (conn.m, conn.r);
    let mut closed = Vec::new();
    let mut kernel = Vec::new();
    let mut diag = Vec::new();
    let mut eigen: BTreeSet<String> = BTreeSet::new();
    for na in 0..=m {
        for nb in 0..=cutoff {
            for nc in 0..=n {
                let keys: Vec<FormKey> = IndexSet::subsets(m, na)
                    .into_iter()
                    .flat_map(|a| {
                        MultiDegree::of_degree(n, nb as u32).into_iter().flat_map(move |b| {
                            IndexSet::subsets(n, nc).into_iter().flat_map(move |c| {
                                let b = b.clone();
                                MultiDegree::up_to_degree(m, cutoff as u32).into_iter().map(move |x| key(x, a, b.clone(), c))
                            })
                        })
                    })
                    .collect();
                let pos: HashMap<&FormKey, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
                let mut mat = linalg::zeros(keys.len(), keys.len());
                let tag = format!("(|a|,|b|,|c|) = ({na},{nb},{nc})");
                for (col, kk) in keys.iter().enumerate() {
                    let img = delta_operator(conn, &SuperForm::monomial(m, n, kk.clone(), Scalar::one()))?;
                    for (out_key, v) in img.terms {
                        match pos.get(&out_key) {
                            Some(&row) => mat[row][col] = v,
                            None => closed.push(format!("{tag}: Δ leaves the component at {out_key:?}")),
                        }
                    }
                }
                let r = linalg::rank(&mat);
                let expect_kernel = if nb == 0 && nc == 0 { keys.len() } else { 0 };
                if keys.len() - r != expect_kernel {
                    kernel.push(format!("{tag}: kernel dimension {} instead of {expect_kernel}", keys.len() - r));
                }
                let vals: BTreeSet<Scalar> = (0..keys.len()).map(|i| mat[i][i].clone()).collect();
                for v in &vals {
                    eigen.insert(scalar::format(v));
                }
                let mut prod = linalg::identity(keys.len());
                for v in &vals {
                    let mut shifted = mat.clone();
                    for (i, row) in shifted.iter_mut().enumerate() {
                        row[i] -= v;
                    }
                    prod = linalg::matmul(&prod, &shifted, keys.len());
                }
                if !linalg::is_zero_matrix(&prod) {
                    diag.push(format!("{tag}: Π(Δ − λ) ≠ 0 over the diagonal values"));
                }
            }
        }
    }
    let mut rep = Report::new();
    rep.push_failures("delta_preserves_components", &closed);
    rep.push_failures("delta_diagonalizable", &diag);
    rep.push_failures("delta_kernel_is_base_forms", &kernel);
    rep.push("delta_eigenvalues", true, eigen.into_iter().collect::<Vec<_>>().join(", "));
    Ok(rep)
}

/// JSON form of an odd connection: `a[i][μ][ν]` is the `(μ, ν)` entry of `A_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionJson {
    pub m: usize,
    pub n: usize,
    pub a: Vec<Vec<Vec<Vec<PolyTerm>>>>,
}

pub fn connection_from_json(j: &ConnectionJson) -> Result<OddConnection> {
    let a = j
        .a
        .iter()
        .map(|mat| mat.iter().map(|row| row.iter().map(|p| Poly::from_json(j.m, p)).collect::<Result<Vec<_>>>()).collect::<Result<PolyMatrix>>())
        .collect::<Result<Vec<_>>>()?;
    if a.is_empty() && j.m > 0 {
        return Ok(Connection::flat(j.m, j.n));
    }
    Connection::new(j.m, j.n, a)
}

pub fn connection_to_json(c: &OddConnection) -> ConnectionJson {
    ConnectionJson { m: c.m, n: c.r, a: c.a.iter().map(|mat| mat.iter().map(|row| row.iter().map(Poly::to_json).collect()).collect()).collect() }
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;
    use crate::poly::tests_support::arb_poly;
    use proptest::prelude::*;

    pub fn arb_conn(m: usize, n: usize, deg: u32) -> impl Strategy<Value = OddConnection> {
        proptest::collection::vec(arb_poly(m, deg), m * n * n).prop_map(move |v| {
            let a = v.chunks(n * n).map(|c| c.chunks(n).map(|r| r.to_vec()).collect()).collect();
            Connection::new(m, n, a).unwrap()
        })
    }

    pub fn arb_form(m: usize, n: usize, k: usize, deg: u32) -> impl Strategy<Value = SuperForm> {
        let keys: Vec<FormKey> = basis(m, n, k, k + n + deg as usize).into_iter().filter(|kk| kk.x.total() <= deg).collect();
        let nk = keys.len();
        proptest::collection::vec((0..nk, -3i64..=3), 1..5).prop_map(move |v| SuperForm {
            m,
            n,
            terms: lin::collect(v.into_iter().map(|(i, c)| (keys[i].clone(), scalar::int(c)))),
        })
    }
}
