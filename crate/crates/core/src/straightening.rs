//! The composition algebra `ΛS* ⊗ S` and the iterative solver producing a
//! straightening `G` for a commuting family of odd derivations.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::derivations::{superbracket, GenImageMap, SuperDerivation};
use crate::error::{domain, mismatch, Error, Result};
use crate::exterior::{ExtElem, ExtTerm};
use crate::index::{IndexSet, MultiDegree, Parity};
use crate::lin::{self, Terms};
use crate::linalg::{self, Matrix};
use crate::report::Report;
use crate::scalar::{self, Scalar};

/// Element of the composition algebra `ΛS* ⊗ S`; keys are `(σ, s)` with
/// `s` a 1-based basis index of `S`.
#[derive(Clone, PartialEq, Eq)]
pub struct CompElem {
    pub n: usize,
    pub terms: Terms<(IndexSet, usize)>,
}

impl CompElem {
    pub fn zero(n: usize) -> CompElem {
        CompElem { n, terms: Terms::new() }
    }

    pub fn monomial(n: usize, sigma: IndexSet, s: usize, c: Scalar) -> CompElem {
        let mut terms = Terms::new();
        lin::add_term(&mut terms, (sigma, s), c);
        CompElem { n, terms }
    }

    /// `Σ_k ω_k ⊗ s_k` from the Λ-parts `ω_k`.
    pub fn from_parts(parts: &[ExtElem]) -> CompElem {
        let n = parts.len();
        let mut terms = Terms::new();
        for (k, w) in parts.iter().enumerate() {
            for (set, c) in w.terms() {
                lin::add_term(&mut terms, (*set, k + 1), c.clone());
            }
        }
        CompElem { n, terms }
    }

    /// The Λ-part paired with `s_k`.
    pub fn part(&self, k: usize) -> ExtElem {
        let items = self.terms.iter().filter(|((_, s), _)| *s == k).map(|((set, _), c)| (*set, c.clone()));
        ExtElem::from_terms(self.n, items).expect("indices within dimension")
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &CompElem) -> CompElem {
        CompElem { n: self.n, terms: lin::add(&self.terms, &other.terms) }
    }

    pub fn sub(&self, other: &CompElem) -> CompElem {
        CompElem { n: self.n, terms: lin::sub(&self.terms, &other.terms) }
    }

    pub fn scale(&self, f: &Scalar) -> CompElem {
        CompElem { n: self.n, terms: lin::scale(&self.terms, f) }
    }

    /// Terms whose Λ-degree is `d`.
    pub fn degree_part(&self, d: usize) -> CompElem {
        CompElem {
            n: self.n,
            terms: self.terms.iter().filter(|((set, _), _)| set.len() == d).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    /// Parity of the Λ-part when homogeneous; zero counts as even.
    pub fn lambda_parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|(set, _)| Parity::of(set.len()));
        let Some(first) = it.next() else { return Some(Parity::Even) };
        it.all(|p| p == first).then_some(first)
    }

    /// The action `Ψ(a)(ω) = Σ σ ∧ (s⌟ω)` on the exterior algebra.
    pub fn act(&self, w: &ExtElem) -> ExtElem {
        let mut out = ExtElem::zero(self.n);
        let mut inserted: HashMap<usize, ExtElem> = HashMap::new();
        for ((sigma, s), c) in &self.terms {
            let ins = inserted.entry(*s).or_insert_with(|| w.insert_basis(*s));
            if ins.is_zero() {
                continue;
            }
            out.axpy(c, &ExtElem::monomial(self.n, *sigma, Scalar::one()).wedge_unchecked(ins));
        }
        out
    }

    /// The superderivation `Ψ(a)`, of parity `|σ| + 1`.
    pub fn to_derivation(&self) -> Result<SuperDerivation> {
        let Some(p) = self.lambda_parity() else {
            return domain("Ψ is only defined here for homogeneous elements");
        };
        let images = (1..=self.n).map(|k| self.part(k)).collect();
        SuperDerivation::new(GenImageMap::new(images)?, p + Parity::Odd)
    }

    /// `Σ_k D(ds_k) ⊗ s_k`.
    pub fn from_derivation(d: &SuperDerivation) -> CompElem {
        CompElem::from_parts(d.gen_images().images())
    }

    pub fn to_json(&self) -> Vec<CompTerm> {
        self.terms.iter().map(|((set, s), c)| CompTerm { coeff: c.clone(), ext: *set, s: *s }).collect()
    }

    pub fn from_json(n: usize, terms: &[CompTerm]) -> Result<CompElem> {
        if let Some(t) = terms.iter().find(|t| t.s == 0 || t.s > n || t.ext.max_index() > n) {
            return domain(format!("term {t:?} does not fit dim S = {n}"));
        }
        Ok(CompElem { n, terms: lin::collect(terms.iter().map(|t| ((t.ext, t.s), t.coeff.clone()))) })
    }
}

impl fmt::Debug for CompElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((set, s), c)| format!("{}·{:?}⊗s{}", scalar::format(c), set, s))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// JSON term `{"coeff": "p/q", "ext": [...], "s": k}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompTerm {
    #[serde(with = "scalar::serde_str")]
    pub coeff: Scalar,
    pub ext: IndexSet,
    pub s: usize,
}

/// `(ω⊗s)·(ω̃⊗s̃) = ω∧(s⌟ω̃) ⊗ s̃`.
pub fn comp_product(a: &CompElem, b: &CompElem) -> Result<CompElem> {
    if a.n != b.n {
        return mismatch("composition elements over different S");
    }
    let parts: Vec<ExtElem> = (1..=b.n).map(|k| a.act(&b.part(k))).collect();
    Ok(CompElem::from_parts(&parts))
}

/// `a·b − (−1)^{(|σ|+1)(|σ̂|+1)} b·a` for homogeneous `a`, `b`.
pub fn comp_bracket(a: &CompElem, b: &CompElem) -> Result<CompElem> {
    let (Some(pa), Some(pb)) = (a.lambda_parity(), b.lambda_parity()) else {
        return domain("bracket of non-homogeneous composition elements");
    };
    let ab = comp_product(a, b)?;
    let ba = comp_product(b, a)?;
    let neg = (pa + Parity::Odd).koszul(pb + Parity::Odd);
    Ok(if neg { ab.add(&ba) } else { ab.sub(&ba) })
}

/// Element of `Sym V* ⊗ ΛS* ⊗ S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCompElem {
    pub r: usize,
    pub n: usize,
    pub terms: Terms<(MultiDegree, IndexSet, usize)>,
}

impl PolyCompElem {
    pub fn zero(r: usize, n: usize) -> PolyCompElem {
        PolyCompElem { r, n, terms: Terms::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `p ⊗ a` for a monomial `p`.
    pub fn from_comp(r: usize, p: &MultiDegree, a: &CompElem) -> PolyCompElem {
        let terms = a.terms.iter().map(|((set, s), c)| ((p.clone(), *set, *s), c.clone())).collect();
        PolyCompElem { r, n: a.n, terms }
    }

    pub fn add(&self, other: &PolyCompElem) -> PolyCompElem {
        PolyCompElem { r: self.r, n: self.n, terms: lin::add(&self.terms, &other.terms) }
    }

    /// The coefficient of the monomial `p`, as a composition element.
    pub fn coefficient(&self, p: &MultiDegree) -> CompElem {
        let terms = self.terms.iter().filter(|((q, _, _), _)| q == p).map(|((_, set, s), c)| ((*set, *s), c.clone())).collect();
        CompElem { n: self.n, terms }
    }

    /// Distinct Sym monomials present.
    pub fn monomials(&self) -> Vec<MultiDegree> {
        let mut v: Vec<MultiDegree> = self.terms.keys().map(|(p, _, _)| p.clone()).collect();
        v.dedup();
        v.sort();
        v.dedup();
        v
    }

    /// `(p⊗σ⊗s)·(q⊗σ̂⊗ŝ) = pq ⊗ σ∧(s⌟σ̂) ⊗ ŝ`.
    pub fn product(&self, other: &PolyCompElem) -> PolyCompElem {
        let mut out = PolyCompElem::zero(self.r, self.n);
        for p in self.monomials() {
            let a = self.coefficient(&p);
            for q in other.monomials() {
                let b = other.coefficient(&q);
                let ab = comp_product(&a, &b).expect("same S");
                out = out.add(&PolyCompElem::from_comp(self.r, &p.add(&q), &ab));
            }
        }
        out
    }
}

/// A linear map `v ↦ D_v` from `V` (basis `v_1..v_r`) to odd superderivations
/// of `ΛS*`, each stored as an element of `Λ₊S* ⊗ S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddFamily {
    pub r: usize,
    pub n: usize,
    pub d: Vec<CompElem>,
}

impl OddFamily {
    pub fn new(n: usize, d: Vec<CompElem>) -> Result<OddFamily> {
        if d.iter().any(|e| e.n != n) {
            return mismatch("family members over different S");
        }
        if d.iter().any(|e| e.lambda_parity() != Some(Parity::Even)) {
            return domain("family members need Λ-parts of even degree");
        }
        Ok(OddFamily { r: d.len(), n, d })
    }

    /// `f = pr∘D` as an `n×r` matrix: `f[k][v]` is the `s_k` coefficient of `f(v_v)`.
    pub fn f_matrix(&self) -> Matrix {
        let mut m = linalg::zeros(self.n, self.r);
        for (v, e) in self.d.iter().enumerate() {
            for ((set, s), c) in &e.terms {
                if set.is_empty() {
                    m[s - 1][v] = c.clone();
                }
            }
        }
        m
    }

    /// The component `D_μ` of Λ-degree `2μ`, as an element of `V* ⊗ Λ^{2μ} ⊗ S`.
    pub fn component(&self, mu: usize) -> PolyCompElem {
        self.as_poly_filtered(|set| set.len() == 2 * mu)
    }

    /// `D = Σ_v dv ⊗ D_v`.
    pub fn as_poly(&self) -> PolyCompElem {
        self.as_poly_filtered(|_| true)
    }

    fn as_poly_filtered(&self, keep: impl Fn(IndexSet) -> bool) -> PolyCompElem {
        let mut out = PolyCompElem::zero(self.r, self.n);
        for (v, e) in self.d.iter().enumerate() {
            for ((set, s), c) in &e.terms {
                if keep(*set) {
                    lin::add_term(&mut out.terms, (MultiDegree::unit(self.r, v + 1), *set, *s), c.clone());
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> FamilyJson {
        FamilyJson { dim_v: self.r, dim_s: self.n, family: self.d.iter().map(CompElem::to_json).collect() }
    }

    pub fn from_json(j: &FamilyJson) -> Result<OddFamily> {
        if j.family.len() != j.dim_v {
            return mismatch(format!("{} family members for dim V = {}", j.family.len(), j.dim_v));
        }
        let d = j.family.iter().map(|t| CompElem::from_json(j.dim_s, t)).collect::<Result<Vec<_>>>()?;
        OddFamily::new(j.dim_s, d)
    }
}

/// JSON form `{"dim_v": r, "dim_s": n, "family": [[CompTerm, …], …]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub dim_v: usize,
    pub dim_s: usize,
    pub family: Vec<Vec<CompTerm>>,
}

/// True when all superbrackets `⟦D_v, D_w⟧` vanish.
pub fn family_is_commuting(fam: &OddFamily) -> Result<bool> {
    let ders = fam.d.iter().map(CompElem::to_derivation).collect::<Result<Vec<_>>>()?;
    for i in 0..ders.len() {
        for j in i..ders.len() {
            let b = superbracket(&ders[i], &ders[j])?;
            if b.gen_images().images().iter().any(|e| !e.is_zero()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True when `D·D = 0` in `Sym V* ⊗ ΛS* ⊗ S`.
pub fn family_square_vanishes(fam: &OddFamily) -> bool {
    let d = fam.as_poly();
    d.product(&d).is_zero()
}

/// A straightening: generator images `G(ds_k)`, with `G = G_0 + G_1 + …`
/// and `G_μ ∈ Λ^{2μ+1}S* ⊗ S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Straightening {
    pub n: usize,
    pub components: Vec<CompElem>,
}

impl Straightening {
    pub fn identity(n: usize) -> Straightening {
        Straightening { n, components: vec![identity_comp(n)] }
    }

    /// `Σ_μ G_μ` as a composition element.
    pub fn total(&self) -> CompElem {
        self.components.iter().fold(CompElem::zero(self.n), |a, b| a.add(b))
    }

    /// Images `G(ds_k)`.
    pub fn images(&self) -> Vec<ExtElem> {
        let t = self.total();
        (1..=self.n).map(|k| t.part(k)).collect()
    }

    /// The unital algebra morphism extending the generator images.
    pub fn apply(&self, w: &ExtElem) -> ExtElem {
        substitute(&self.images(), w)
    }

    pub fn to_json(&self) -> Vec<Vec<ExtTerm>> {
        self.images().iter().map(ExtElem::to_json).collect()
    }
}

/// `Σ_k ds_k ⊗ s_k`.
pub fn identity_comp(n: usize) -> CompElem {
    CompElem::from_parts(&(1..=n).map(|k| ExtElem::generator(n, k)).collect::<Vec<_>>())
}

/// The unital algebra morphism of `ΛS*` sending `ds_k` to `images[k-1]`,
/// applied to `w`. Images are expected to be odd.
pub fn substitute(images: &[ExtElem], w: &ExtElem) -> ExtElem {
    let n = w.dim();
    let mut out = ExtElem::zero(n);
    for (set, c) in w.terms() {
        let mut prod = ExtElem::one(n);
        for k in set.iter() {
            prod = prod.wedge_unchecked(&images[k - 1]);
            if prod.is_zero() {
                break;
            }
        }
        out.axpy(c, &prod);
    }
    out
}

/// Inverse of the automorphism `ds_k ↦ ds_k + h_k` with `h_k ∈ Λ^{≥2}`,
/// by the fixed point `K(ds_k) = ds_k − h_k(K(ds))`.
pub fn invert_automorphism(images: &[ExtElem]) -> Result<Vec<ExtElem>> {
    let n = images.len();
    let h: Vec<ExtElem> = images
        .iter()
        .enumerate()
        .map(|(k, im)| im.sub(&ExtElem::generator(n, k + 1)))
        .collect::<Result<_>>()?;
    if h.iter().any(|e| e.filtration_degree() < 2) {
        return domain("automorphism must be the identity modulo Λ^{≥2}");
    }
    let mut k: Vec<ExtElem> = (1..=n).map(|i| ExtElem::generator(n, i)).collect();
    for _ in 0..n {
        k = (0..n)
            .map(|i| ExtElem::generator(n, i + 1).sub(&substitute(&k, &h[i])))
            .collect::<Result<_>>()?;
    }
    Ok(k)
}

/// The family `v ↦ H ∘ f(v)⌟ ∘ H⁻¹` for the automorphism `H` with the given
/// generator images; `f` is `n×r`.
pub fn conjugate_family(f: &[Vec<Scalar>], h: &[ExtElem]) -> Result<OddFamily> {
    let n = h.len();
    let r = f.first().map_or(0, Vec::len);
    if f.len() != n {
        return mismatch("f must have one row per basis vector of S");
    }
    let k = invert_automorphism(h)?;
    let mut d = Vec::new();
    for v in 0..r {
        let vec: Vec<Scalar> = (0..n).map(|i| f[i][v].clone()).collect();
        let parts: Vec<ExtElem> = k
            .iter()
            .map(|kk| Ok(substitute(h, &kk.insert(&vec)?)))
            .collect::<Result<_>>()?;
        d.push(CompElem::from_parts(&parts));
    }
    OddFamily::new(n, d)
}

/// How to pick the solution of each linear step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveMode {
    /// Remove the component along `Λ^{2μ+1}(ker f*) ⊗ S` (orthogonal
    /// projection in the monomial basis); independent of pivot order.
    Canonical,
    /// Free variables zero, pivoting through unknowns in natural order.
    RawNatural,
    /// Free variables zero, pivoting through unknowns in reverse order.
    RawReversed,
}

/// Matrix of `D₀· : Λ^{d}S*⊗S → V*⊗Λ^{d-1}S*⊗S` for `D₀ = f`.
/// Columns index `(I, s)` with `|I| = d`; rows index `(v, J, t)`.
fn d0_matrix(f: &[Vec<Scalar>], r: usize, n: usize, d: usize) -> (Matrix, Vec<(IndexSet, usize)>, Vec<(usize, IndexSet, usize)>) {
    let cols: Vec<(IndexSet, usize)> = IndexSet::subsets(n, d).into_iter().flat_map(|i| (1..=n).map(move |s| (i, s))).collect();
    let rows: Vec<(usize, IndexSet, usize)> = (1..=r)
        .flat_map(|v| IndexSet::subsets(n, d.saturating_sub(1)).into_iter().flat_map(move |j| (1..=n).map(move |t| (v, j, t))))
        .collect();
    let pos: HashMap<(usize, IndexSet, usize), usize> = rows.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut m = linalg::zeros(if d == 0 { 0 } else { rows.len() }, cols.len());
    if d == 0 {
        return (m, cols, vec![]);
    }
    for (c, (set, s)) in cols.iter().enumerate() {
        for v in 1..=r {
            let vec: Vec<Scalar> = (0..n).map(|i| f[i][v - 1].clone()).collect();
            let img = ExtElem::monomial(n, *set, Scalar::one()).insert(&vec).expect("shape");
            for (j, coef) in img.terms() {
                m[pos[&(v, *j, *s)]][c] += coef;
            }
        }
    }
    (m, cols, rows)
}

fn poly_to_vec(x: &PolyCompElem, rows: &[(usize, IndexSet, usize)]) -> Result<Vec<Scalar>> {
    let pos: HashMap<(usize, IndexSet, usize), usize> = rows.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut out = vec![Scalar::zero(); rows.len()];
    for ((p, set, s), c) in &x.terms {
        let v = (1..=p.vars()).find(|&i| p.get(i) == 1).filter(|_| p.total() == 1);
        let Some(v) = v else {
            return Err(Error::Internal("right-hand side is not linear in V".into()));
        };
        let Some(&i) = pos.get(&(v, *set, *s)) else {
            return Err(Error::Internal("right-hand side has an unexpected Λ-degree".into()));
        };
        out[i] = c.clone();
    }
    Ok(out)
}

/// Solves `D·G = pr∘D` degree by degree.
pub fn straighten(fam: &OddFamily) -> Result<Straightening> {
    straighten_with(fam, &SolveMode::Canonical)
}

/// [`straighten`] with an explicit choice of solution at each step.
pub fn straighten_with(fam: &OddFamily, mode: &SolveMode) -> Result<Straightening> {
    let (r, n) = (fam.r, fam.n);
    if !family_is_commuting(fam)? {
        return Err(Error::Precondition("the family does not supercommute".into()));
    }
    let f = fam.f_matrix();
    if linalg::rank(&f) < r {
        return Err(Error::Precondition("pr∘D is not injective".into()));
    }
    let g0 = PolyCompElem::from_comp(r, &MultiDegree::zero(r), &identity_comp(n));
    let mut gs: Vec<PolyCompElem> = vec![g0];
    let mut mu = 1;
    while 2 * mu + 1 <= n {
        let mut x = PolyCompElem::zero(r, n);
        for alpha in 1..=mu {
            let prod = fam.component(alpha).product(&gs[mu - alpha]);
            x = x.add(&prod);
        }
        let x = PolyCompElem { terms: lin::scale(&x.terms, &-Scalar::one()), ..x };
        let d0 = fam.component(0);
        if !d0.product(&x).is_zero() {
            return Err(Error::Internal(format!("D₀·X ≠ 0 at step {mu}")));
        }
        let d = 2 * mu + 1;
        let (m, cols, rows) = d0_matrix(&f, r, n, d);
        let rhs = poly_to_vec(&x, &rows)?;
        let order: Vec<usize> = match mode {
            SolveMode::RawReversed => (0..cols.len()).rev().collect(),
            _ => (0..cols.len()).collect(),
        };
        let Some(mut sol) = linalg::solve_with_order(&m, &rhs, cols.len(), &order) else {
            return Err(Error::Internal(format!("inconsistent straightening system at step {mu}")));
        };
        if *mode == SolveMode::Canonical {
            sol = remove_kernel_component(&m, sol, cols.len());
        }
        let comp = CompElem {
            n,
            terms: lin::collect(cols.iter().zip(sol).map(|((set, s), c)| ((*set, *s), c))),
        };
        gs.push(PolyCompElem::from_comp(r, &MultiDegree::zero(r), &comp));
        mu += 1;
    }
    let components = gs.iter().map(|g| g.coefficient(&MultiDegree::zero(r))).collect();
    Ok(Straightening { n, components })
}

/// `x − P x` with `P` the orthogonal projection onto `ker m`.
fn remove_kernel_component(m: &[Vec<Scalar>], x: Vec<Scalar>, cols: usize) -> Vec<Scalar> {
    let ker = linalg::nullspace(m, cols);
    if ker.is_empty() {
        return x;
    }
    let k = ker.len();
    let dot = |a: &[Scalar], b: &[Scalar]| a.iter().zip(b).fold(Scalar::zero(), |acc, (p, q)| acc + p * q);
    let gram: Matrix = (0..k).map(|i| (0..k).map(|j| dot(&ker[i], &ker[j])).collect()).collect();
    let rhs: Vec<Scalar> = ker.iter().map(|v| dot(v, &x)).collect();
    let c = linalg::solve(&gram, &rhs, k).expect("Gram matrix of a basis is invertible");
    let mut out = x;
    for (ci, v) in c.iter().zip(&ker) {
        for (o, vi) in out.iter_mut().zip(v) {
            *o -= ci * vi;
        }
    }
    out
}

/// Checks `D_v(Gσ) = G(f(v)⌟σ)` for every basis vector `v` and every basis
/// monomial `σ`, and that `G` induces the identity on generators.
pub fn verify_straightening(fam: &OddFamily, g: &Straightening) -> Result<Report> {
    if g.n != fam.n {
        return mismatch("straightening and family over different S");
    }
    let n = fam.n;
    let f = fam.f_matrix();
    let images = g.images();
    let ders = fam.d.iter().map(CompElem::to_derivation).collect::<Result<Vec<_>>>()?;
    let mut fails = Vec::new();
    for (v, d) in ders.iter().enumerate() {
        let vec: Vec<Scalar> = (0..n).map(|i| f[i][v].clone()).collect();
        for set in IndexSet::all_subsets(n) {
            let sigma = ExtElem::monomial(n, set, Scalar::one());
            let lhs = d.extend(&substitute(&images, &sigma))?;
            let rhs = substitute(&images, &sigma.insert(&vec)?);
            if lhs != rhs {
                fails.push(format!("v{} on σ = {:?}", v + 1, set));
            }
        }
    }
    let mut gen_fail = Vec::new();
    for (k, im) in images.iter().enumerate() {
        if im.degree_part(1) != ExtElem::generator(n, k + 1) || im.parity() != Some(Parity::Odd) {
            gen_fail.push(format!("G(ds{})", k + 1));
        }
    }
    let mut r = Report::new();
    r.push_failures("d_o_g", &fails);
    r.push_failures("identity_on_generators", &gen_fail);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan_poincare::{self, BigradedElem};
    use crate::exterior::tests_support::arb_ext;
    use crate::scalar::int;
    use proptest::prelude::*;

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::new(v).unwrap()
    }

    fn cm(n: usize, s: &[usize], k: usize, c: i64) -> CompElem {
        CompElem::monomial(n, set(s), k, int(c))
    }

    #[test]
    fn product_examples() {
        assert_eq!(comp_product(&cm(2, &[], 1, 1), &cm(2, &[1], 2, 1)).unwrap(), cm(2, &[], 2, 1));
        assert!(comp_product(&cm(2, &[], 1, 1), &cm(2, &[2], 2, 1)).unwrap().is_zero());
    }

    #[test]
    fn product_is_not_associative() {
        let n = 2;
        let mut basis = Vec::new();
        for s in IndexSet::all_subsets(n) {
            for k in 1..=n {
                basis.push(CompElem::monomial(n, s, k, int(1)));
            }
        }
        let mut found = false;
        'outer: for a in &basis {
            for b in &basis {
                for c in &basis {
                    let l = comp_product(&comp_product(a, b).unwrap(), c).unwrap();
                    let r = comp_product(a, &comp_product(b, c).unwrap()).unwrap();
                    if l != r {
                        found = true;
                        break 'outer;
                    }
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn bracket_examples() {
        let a = cm(2, &[], 1, 1);
        assert!(comp_bracket(&a, &a).unwrap().is_zero());
        let x = cm(3, &[1, 2], 1, 1);
        let y = cm(3, &[], 2, 1);
        let direct = superbracket(&x.to_derivation().unwrap(), &y.to_derivation().unwrap()).unwrap();
        assert_eq!(comp_bracket(&x, &y).unwrap(), CompElem::from_derivation(&direct));
    }

    #[test]
    fn left_multiplication_is_not_always_a_boundary() {
        let x = cm(2, &[1], 1, 1);
        let y = cm(2, &[1], 2, 1);
        assert_eq!(comp_product(&x, &y).unwrap(), y);
        assert!(!comp_product(&x, &comp_product(&x, &y).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn family_examples() {
        let pure = OddFamily::new(3, vec![cm(3, &[], 1, 1), cm(3, &[], 2, 1)]).unwrap();
        assert!(family_is_commuting(&pure).unwrap());
        assert!(family_square_vanishes(&pure));
        let g = straighten(&pure).unwrap();
        assert_eq!(g.images(), (1..=3).map(|k| ExtElem::generator(3, k)).collect::<Vec<_>>());
        // D = s₁⌟ + ds₂∧ds₃ ⊗ s₁ in dim V = 1.
        let d = cm(3, &[], 1, 1).add(&cm(3, &[2, 3], 1, 1));
        let fam = OddFamily::new(3, vec![d]).unwrap();
        assert_eq!(family_is_commuting(&fam).unwrap(), family_square_vanishes(&fam));
        // D_1 = ds₁∧ds₂ ⊗ s₃ and D_2 = s₃⌟ do not commute.
        let bad = OddFamily::new(3, vec![cm(3, &[], 1, 1).add(&cm(3, &[1, 2], 3, 1)), cm(3, &[], 3, 1)]).unwrap();
        assert!(!family_is_commuting(&bad).unwrap());
        assert!(!family_square_vanishes(&bad));
        assert!(matches!(straighten(&bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn nontrivial_straightening() {
        let fam = OddFamily::new(3, vec![cm(3, &[], 1, 1).add(&cm(3, &[2, 3], 1, 2))]).unwrap();
        assert!(family_is_commuting(&fam).unwrap());
        let g = straighten(&fam).unwrap();
        assert!(g.components.len() == 2 && !g.components[1].is_zero());
        assert!(verify_straightening(&fam, &g).unwrap().passed());
        let id = Straightening::identity(3);
        assert_eq!(verify_straightening(&fam, &id).unwrap().get("d_o_g"), Some(false));
    }

    #[test]
    fn non_injective_is_rejected() {
        let fam = OddFamily::new(2, vec![cm(2, &[], 1, 1), cm(2, &[], 1, 1)]).unwrap();
        assert!(matches!(straighten(&fam), Err(Error::Precondition(_))));
    }

    #[test]
    fn kernel_perturbation_still_passes() {
        // dim S = 4, dim V = 1, f(v) = s1: ker f* = span(ds2, ds3, ds4).
        let fam = OddFamily::new(4, vec![cm(4, &[], 1, 1).add(&cm(4, &[2, 3], 1, 1))]).unwrap();
        let g = straighten(&fam).unwrap();
        let mut perturbed = g.clone();
        perturbed.components[1] = perturbed.components[1].add(&cm(4, &[2, 3, 4], 3, 5));
        assert!(verify_straightening(&fam, &perturbed).unwrap().passed());
    }

    #[test]
    fn d0_is_cartan_poincare_codifferential() {
        let f = vec![vec![int(1), int(0)], vec![int(2), int(1)], vec![int(0), int(-1)]];
        let (r, n) = (2, 3);
        let fam = OddFamily::new(n, (0..r).map(|v| {
            (0..n).fold(CompElem::zero(n), |a, k| a.add(&CompElem::monomial(n, IndexSet::EMPTY, k + 1, f[k][v].clone())))
        }).collect()).unwrap();
        let d0 = fam.component(0);
        let ft = linalg::transpose(&f, r);
        for k in 0..=2u32 {
            for l in 0..=n {
                for alpha in MultiDegree::of_degree(r, k) {
                    for s in IndexSet::subsets(n, l) {
                        for t in 1..=n {
                            let x = PolyCompElem::from_comp(r, &alpha, &CompElem::monomial(n, s, t, int(1)));
                            let lhs = d0.product(&x);
                            let y = BigradedElem::monomial(r, n, alpha.clone(), s, int(1));
                            let rhs = cartan_poincare::d_star_g(&ft, &y).unwrap();
                            let expect: Terms<(MultiDegree, IndexSet, usize)> = rhs.terms.into_iter().map(|((a, i), c)| ((a, i, t), c)).collect();
                            assert_eq!(lhs.terms, expect);
                        }
                    }
                }
            }
        }
    }

    fn arb_comp(n: usize) -> impl Strategy<Value = CompElem> {
        proptest::collection::vec((0u64..(1 << n), 1..=n, -3i64..=3), 0..5).prop_map(move |v| {
            CompElem { n, terms: lin::collect(v.into_iter().map(|(m, s, c)| ((IndexSet::from_mask(m), s), int(c)))) }
        })
    }

    proptest! {
        #[test]
        fn bracket_matches_superbracket(a in arb_comp(3), b in arb_comp(3), pa in any::<bool>(), pb in any::<bool>()) {
            let par = |x: &CompElem, odd: bool| CompElem {
                n: x.n,
                terms: x.terms.iter().filter(|((s, _), _)| (s.len() % 2 == 1) == odd).map(|(k, v)| (*k, v.clone())).collect(),
            };
            let (a, b) = (par(&a, pa), par(&b, pb));
            let direct = superbracket(&a.to_derivation().unwrap(), &b.to_derivation().unwrap()).unwrap();
            prop_assert_eq!(comp_bracket(&a, &b).unwrap(), CompElem::from_derivation(&direct));
        }

        #[test]
        fn product_degree_bookkeeping(a in arb_comp(4), b in arb_comp(4), da in 0..=4usize, db in 0..=4usize) {
            let (a, b) = (a.degree_part(da), b.degree_part(db));
            let p = comp_product(&a, &b).unwrap();
            prop_assert!(p.terms.keys().all(|(s, _)| s.len() + 1 == da + db));
        }

        #[test]
        fn psi_matches_derivation(a in arb_comp(3), w in arb_ext(3), odd in any::<bool>()) {
            let a = CompElem { n: 3, terms: a.terms.into_iter().filter(|((s, _), _)| (s.len() % 2 == 1) == odd).collect() };
            prop_assert_eq!(a.act(&w), a.to_derivation().unwrap().extend(&w).unwrap());
        }

        #[test]
        fn degree_zero_left_multiplication_is_boundary(x in arb_comp(3), y in arb_comp(3), z in arb_comp(3)) {
            let r = 2;
            let x0 = PolyCompElem::from_comp(r, &MultiDegree::unit(r, 1), &x.degree_part(0))
                .add(&PolyCompElem::from_comp(r, &MultiDegree::unit(r, 2), &z.degree_part(0)));
            let yy = PolyCompElem::from_comp(r, &MultiDegree::zero(r), &y);
            prop_assert!(x0.product(&x0.product(&yy)).is_zero());
        }

        #[test]
        fn conjugated_families_straighten(h3 in proptest::collection::vec(arb_ext(4), 4), fcol in proptest::collection::vec(-2i64..=2, 4)) {
            let n = 4;
            let h: Vec<ExtElem> = h3.iter().enumerate().map(|(k, e)| ExtElem::generator(n, k + 1).add(&e.degree_part(3)).unwrap()).collect();
            let k = invert_automorphism(&h).unwrap();
            for i in 1..=n {
                prop_assert_eq!(substitute(&h, &k[i - 1]), ExtElem::generator(n, i));
            }
            let mut f: Matrix = fcol.iter().map(|&c| vec![int(c)]).collect();
            if f.iter().all(|r| r[0].is_zero()) {
                f[0][0] = int(1);
            }
            let fam = conjugate_family(&f, &h).unwrap();
            prop_assert_eq!(fam.f_matrix(), f);
            prop_assert!(family_is_commuting(&fam).unwrap());
            prop_assert!(family_square_vanishes(&fam));
            let g = straighten(&fam).unwrap();
            prop_assert!(verify_straightening(&fam, &g).unwrap().passed());
        }
    }
}
