//! The acceptance criteria as seeded, timed runners.
//!
//! Each runner draws its cases from [`case_seed`] and compares library
//! results against the oracles of [`crate::oracle`] or against a second
//! library route. A failing case is reported with its sub-seed.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};

use superlin::cartan_poincare::{self, Assembly, BigradedElem};
use superlin::derivations::{self, DerivationClassification, GenImageMap, Grading};
use superlin::lie_super::{self, RepAndForm};
use superlin::linalg::{self, Matrix};
use superlin::poly::Poly;
use superlin::polydiff_jets::{self, Connection, PolyDiffOp, PolyMatrix};
use superlin::scalar::int;
use superlin::straightening::{self, SolveMode};
use superlin::super_derham::{self, FieldKind, FormKey, OddConnection, SuperForm, SuperVectorFieldGen};
use superlin::super_tensor::{self, Gen as TGen, SuperSpace, TensorWord};
use superlin::supermaps::{self, PolySuperFunc, SuperMapData};
use superlin::{lin, ExtElem, IndexSet, MultiDegree, Parity, Permutation, Scalar};

use crate::gen::{case_seed, Gen};
use crate::oracle::{self, LeibnizMode, ShiftOp};

/// Case counts: `Small` runs the counts of the acceptance criteria, `Medium`
/// four times as many.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Small,
    Medium,
}

impl Budget {
    fn factor(self) -> usize {
        match self {
            Budget::Small => 1,
            Budget::Medium => 4,
        }
    }

    pub fn count(self, base: usize) -> usize {
        base * self.factor()
    }
}

/// Identifier, name and time limit (seconds, at `Small`) of each criterion.
pub const CRITERIA: [(u32, &str, u64); 11] = [
    (1, "derivation_dimensions", 10),
    (2, "classification_roundtrip", 10),
    (3, "cartan_poincare_homology", 60),
    (4, "twisted_shift_identities", 30),
    (5, "straightening", 60),
    (6, "supertensor_quotients", 20),
    (7, "lie_superalgebra_biconditional", 30),
    (8, "jets", 30),
    (9, "supermaps", 30),
    (10, "super_de_rham", 120),
    (11, "delta_kernel", 60),
];

/// Outcome of one criterion run.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl CriterionResult {
    pub fn within_limit(&self) -> bool {
        self.elapsed <= self.limit
    }

    /// One status line: `[PASS] 3 name (1.23 s / 60 s): detail`.
    pub fn line(&self) -> String {
        let tag = if self.passed && self.within_limit() { "PASS" } else { "FAIL" };
        format!(
            "[{tag}] {:>2} {} ({:.2} s / {} s): {}",
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

/// Case counter and failure log of one criterion.
#[derive(Default)]
struct Tally {
    cases: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn case(&mut self) {
        self.cases += 1;
    }

    fn check(&mut self, ok: bool, sub: u64, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(format!("sub-seed {sub:#018x}: {}", what()));
        }
    }

    fn error(&mut self, sub: u64, e: superlin::Error) {
        self.failures.push(format!("sub-seed {sub:#018x}: error {e}"));
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self) -> (bool, String) {
        let mut detail = if self.failures.is_empty() {
            format!("{} case(s) ok", self.cases)
        } else {
            format!("{} failure(s) in {} case(s); first: {}", self.failures.len(), self.cases, self.failures[0])
        };
        for n in &self.notes {
            let _ = write!(detail, "; {n}");
        }
        (self.failures.is_empty(), detail)
    }
}

/// Runs criterion `id` (1..=11).
pub fn run(id: u32, seed: u64, budget: Budget) -> CriterionResult {
    let (_, name, limit) = CRITERIA[(id - 1) as usize];
    let start = Instant::now();
    let mut t = Tally::default();
    match id {
        1 => derivation_dimensions(&mut t),
        2 => classification_roundtrip(seed, budget, &mut t),
        3 => cartan_poincare_homology(seed, budget, &mut t),
        4 => twisted_shift_identities(seed, budget, &mut t),
        5 => straightening_families(seed, budget, &mut t),
        6 => supertensor_quotients(seed, budget, &mut t),
        7 => lie_biconditional(seed, budget, &mut t),
        8 => jets(seed, budget, &mut t),
        9 => supermap_checks(seed, budget, &mut t),
        10 => super_de_rham(seed, budget, &mut t),
        11 => delta_kernel(seed, budget, &mut t),
        _ => t.failures.push(format!("unknown criterion {id}")),
    }
    let elapsed = start.elapsed();
    let (passed, detail) = t.finish();
    let limit = Duration::from_secs(limit * budget.factor() as u64);
    CriterionResult { id, name, passed, detail, elapsed, limit }
}

/// Runs all criteria in order.
pub fn run_all(seed: u64, budget: Budget) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|(id, _, _)| run(*id, seed, budget)).collect()
}

fn to_ext(n: usize, m: &oracle::MaskElem) -> ExtElem {
    ExtElem::from_terms(n, m.iter().map(|(k, c)| (IndexSet::from_mask(*k), c.clone()))).expect("masks within dimension")
}

fn exact_degree(g: &mut Gen, vars: usize, k: u32) -> MultiDegree {
    let mut e = MultiDegree::zero(vars);
    for _ in 0..k {
        let i = g.size(0, vars - 1);
        e.0[i] += 1;
    }
    e
}

fn derivation_dimensions(t: &mut Tally) {
    for n in 1..=4usize {
        t.case();
        let all = oracle::derivation_space(n, LeibnizMode::Ungraded).dim() as u64;
        let even = oracle::derivation_space(n, LeibnizMode::SuperEven).dim() as u64;
        let odd = oracle::derivation_space(n, LeibnizMode::SuperOdd).dim() as u64;
        let z = oracle::derivation_space(n, LeibnizMode::ZGraded).dim() as u64;
        let lib = |g| derivations::dimension_of_derivation_space(n, g).expect("n in range");
        let formula = oracle::derivation_dimension_formula(n);
        t.check(all == formula && lib(Grading::All) == all, n as u64, || {
            format!("n = {n}: brute force {all}, formula {formula}, library {}", lib(Grading::All))
        });
        let sder = (n as u64) << n;
        t.check(even + odd == sder && derivations::superderivation_space_dimension(n) == sder, n as u64, || {
            format!("n = {n}: even {even} + odd {odd} ≠ n·2ⁿ = {sder}")
        });
        t.check(lib(Grading::Z2) == even, n as u64, || format!("n = {n}: parity-preserving {even}, library {}", lib(Grading::Z2)));
        t.check(z == (n * n) as u64 && lib(Grading::Z) == z, n as u64, || format!("n = {n}: degree-preserving {z}"));
    }
}

fn classification_roundtrip(seed: u64, budget: Budget, t: &mut Tally) {
    let spaces: Vec<oracle::DerivationSpace> = (1..=4).map(|n| oracle::derivation_space(n, LeibnizMode::Ungraded)).collect();
    for case in 0..budget.count(200) as u64 {
        let sub = case_seed(seed, 2, case);
        let mut g = Gen::new(sub);
        t.case();
        let n = g.size(1, 4);
        let sp = &spaces[n - 1];
        let mut v = vec![Scalar::zero(); sp.unknowns.len()];
        for _ in 0..g.size(1, 4) {
            let b = &sp.basis[g.size(0, sp.dim() - 1)];
            let c = g.nonzero();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += &c * bi;
            }
        }
        let images: Vec<ExtElem> = (1..=n).map(|mu| to_ext(n, &sp.apply(&v, &oracle::mask_generator(mu)))).collect();
        let map = GenImageMap::new(images).expect("n images");
        let c = derivations::classify(&map);
        t.check(derivations::reconstruct(&c) == map, sub, || format!("n = {n}: reconstruct∘classify ≠ id"));

        let a = g.ext(n, 4, |_| true);
        match derivations::extend_ungraded(&map, &a) {
            Ok(e) => t.check(oracle::from_ext(&e) == sp.apply(&v, &oracle::from_ext(&a)), sub, || format!("n = {n}: extension differs from the solved operator")),
            Err(e) => t.error(sub, e),
        }

        let f_minus: Vec<ExtElem> = (0..n).map(|_| g.ext(n, 3, |d| d % 2 == 1)).collect();
        let eta = g.ext(n, 3, |d| d % 2 == 1 && d < n);
        let c2 = DerivationClassification { f_minus: GenImageMap::new(f_minus).expect("n images"), eta };
        let r = derivations::reconstruct(&c2);
        t.check(derivations::classify(&r) == c2, sub, || format!("n = {n}: classify∘reconstruct ≠ id"));
        let (x, y) = (g.ext(n, 3, |_| true), g.ext(n, 3, |_| true));
        let (mx, my) = (oracle::from_ext(&x), oracle::from_ext(&y));
        let xy = to_ext(n, &oracle::mask_wedge(&mx, &my));
        let ext = |e: &ExtElem| derivations::extend_ungraded(&r, e).map(|z| oracle::from_ext(&z));
        match (ext(&xy), ext(&x), ext(&y)) {
            (Ok(dxy), Ok(dx), Ok(dy)) => {
                let mut rhs = oracle::mask_wedge(&dx, &my);
                for (k, c) in oracle::mask_wedge(&mx, &dy) {
                    let e = rhs.entry(k).or_insert_with(Scalar::zero);
                    *e += c;
                }
                rhs.retain(|_, c| !c.is_zero());
                t.check(dxy == rhs, sub, || format!("n = {n}: reconstructed map violates Leibniz"));
            }
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => t.error(sub, e),
        }
    }
}

fn cartan_poincare_homology(seed: u64, budget: Budget, t: &mut Tally) {
    for case in 0..budget.count(50) as u64 {
        let sub = case_seed(seed, 3, case);
        let mut g = Gen::new(sub);
        t.case();
        let (n, m) = (g.size(1, 4), g.size(1, 4));
        let r = g.size(0, n.min(m));
        let f = g.low_rank_matrix(m, n, r);
        let rk = oracle::rank(&f) as u64;
        let expected: Vec<Vec<u64>> = (0..=4u64).map(|k| (0..=4u64).map(|l| oracle::sym_dim(n as u64 - rk, k) * oracle::choose(m as u64 - rk, l)).collect()).collect();
        for how in [Assembly::Generic, Assembly::Direct] {
            match cartan_poincare::homology_dims(&f, n, m, 4, 4, how) {
                Ok(tab) => {
                    t.check(tab.computed == expected, sub, || format!("{how:?}: computed {:?}, expected {expected:?}", tab.computed));
                    t.check(tab.predicted == expected, sub, || format!("{how:?}: predicted {:?}, expected {expected:?}", tab.predicted));
                }
                Err(e) => t.error(sub, e),
            }
        }
    }
}

fn random_bigraded(g: &mut Gen, n: usize, k: u32, l: usize) -> BigradedElem {
    let mut x = BigradedElem::zero(n, n);
    let sets = IndexSet::subsets(n, l);
    for _ in 0..g.size(1, 3) {
        let sym = exact_degree(g, n, k);
        let ext = *g.pick(&sets);
        let c = g.nonzero();
        x = x.add(&BigradedElem::monomial(n, n, sym, ext, c));
    }
    x
}

fn twisted_shift_identities(seed: u64, budget: Budget, t: &mut Tally) {
    type CoreOp = fn(&[Vec<Scalar>], &BigradedElem) -> superlin::Result<BigradedElem>;
    let ops: [(ShiftOp, CoreOp); 4] = [
        (ShiftOp::Left, cartan_poincare::twisted_shift_left),
        (ShiftOp::Right, cartan_poincare::twisted_shift_right),
        (ShiftOp::StarSym, cartan_poincare::star_sym),
        (ShiftOp::StarExt, cartan_poincare::star_ext),
    ];
    let left = |a: &Matrix, x: &BigradedElem| cartan_poincare::twisted_shift_left(a, x).expect("square");
    let right = |a: &Matrix, x: &BigradedElem| cartan_poincare::twisted_shift_right(a, x).expect("square");
    for case in 0..budget.count(50) as u64 {
        let sub = case_seed(seed, 4, case);
        let mut g = Gen::new(sub);
        t.case();
        let n = g.size(1, 4);
        let (a, b) = (g.matrix(n, n), g.matrix(n, n));
        let id = linalg::identity(n);
        let (ab, ba) = (linalg::matmul(&a, &b, n), linalg::matmul(&b, &a, n));
        for _ in 0..3 {
            let k = g.size(0, 3) as u32;
            let l = g.size(0, n);
            let x = random_bigraded(&mut g, n, k, l);
            let ox = oracle::from_bigraded(&x);
            for (op, core) in &ops {
                for mat in [&a, &b] {
                    let lib = core(mat, &x).map(|y| oracle::from_bigraded(&y));
                    let want = oracle::shift_op(*op, mat, &ox);
                    t.check(lib.as_ref().ok() == Some(&want), sub, || format!("{op:?} differs from the oracle on bidegree ({k},{l})"));
                }
            }
            let ll = left(&a, &left(&b, &x)).add(&left(&b, &left(&a, &x)));
            t.check(ll.is_zero(), sub, || format!("{{A◁,B◁}} ≠ 0 on ({k},{l})"));
            let rr = right(&a, &right(&b, &x)).add(&right(&b, &right(&a, &x)));
            t.check(rr.is_zero(), sub, || format!("{{A▷,B▷}} ≠ 0 on ({k},{l})"));
            let mixed = right(&a, &left(&b, &x)).add(&left(&b, &right(&a, &x)));
            let stars = cartan_poincare::star_sym(&ab, &x).expect("square").add(&cartan_poincare::star_ext(&ba, &x).expect("square"));
            t.check(mixed.add(&stars).is_zero(), sub, || format!("{{A▷,B◁}} ≠ −(AB)★⊗id − id⊗(BA)★ on ({k},{l})"));
            let idid = right(&id, &left(&id, &x)).add(&left(&id, &right(&id, &x)));
            t.check(idid == x.scale(&int((k as usize + l) as i64)), sub, || format!("{{id▷,id◁}} ≠ (k+l)·id on ({k},{l})"));
        }
    }
}

fn straightening_families(seed: u64, budget: Budget, t: &mut Tally) {
    let mut nontrivial = 0;
    let mut compared = 0;
    for case in 0..budget.count(30) as u64 {
        let sub = case_seed(seed, 5, case);
        let mut g = Gen::new(sub);
        t.case();
        let r = g.size(1, 2);
        let n = g.size(r.max(2), 4);
        let f = g.injective_matrix(n, r);
        let h: Vec<ExtElem> = (1..=n)
            .map(|i| ExtElem::generator(n, i).add(&g.ext(n, 3, |d| d == 3)).expect("same dimension"))
            .collect();
        let fam = match straightening::conjugate_family(&f, &h) {
            Ok(fam) => fam,
            Err(e) => {
                t.error(sub, e);
                continue;
            }
        };
        let st = match straightening::straighten(&fam) {
            Ok(s) => s,
            Err(e) => {
                t.error(sub, e);
                continue;
            }
        };
        if st.components.iter().skip(1).any(|c| !c.is_zero()) {
            nontrivial += 1;
        }
        match straightening::verify_straightening(&fam, &st) {
            Ok(rep) => t.check(rep.passed(), sub, || format!("(n, r) = ({n}, {r}): library verification failed")),
            Err(e) => t.error(sub, e),
        }
        let fails = oracle::straightening_failures(&fam, &st);
        t.check(fails.is_empty(), sub, || format!("(n, r) = ({n}, {r}): oracle finds D_v∘G ≠ G∘f(v)⌟ at {:?}", &fails[..fails.len().min(3)]));
        if n - r <= 2 {
            compared += 1;
            let solves = (straightening::straighten_with(&fam, &SolveMode::RawNatural), straightening::straighten_with(&fam, &SolveMode::RawReversed));
            match solves {
                (Ok(a), Ok(b)) => {
                    t.check(a == b && a == st, sub, || format!("(n, r) = ({n}, {r}): independent solves disagree"));
                    t.check(oracle::straightening_failures(&fam, &a).is_empty(), sub, || format!("(n, r) = ({n}, {r}): raw solve fails the oracle"));
                }
                (Err(e), _) | (_, Err(e)) => t.error(sub, e),
            }
        }
    }
    t.note(format!("{nontrivial} with nontrivial correction, {compared} compared across solves"));
}

fn word_key(w: &TensorWord) -> Vec<(bool, usize)> {
    w.factors.iter().map(|g| (g.parity == Parity::Odd, g.index)).collect()
}

fn degree_of(vars: usize, idx: &[usize]) -> MultiDegree {
    let mut e = MultiDegree::zero(vars);
    for &i in idx {
        e.0[i - 1] += 1;
    }
    e
}

fn supertensor_quotients(seed: u64, budget: Budget, t: &mut Tally) {
    for p in 0..=3usize {
        for q in 0..=3usize {
            if p + q == 0 {
                continue;
            }
            let space = SuperSpace::new(p, q);
            let tag = (p * 4 + q) as u64;
            for k in 0..=4usize {
                t.case();
                let (pu, qu, ku) = (p as u64, q as u64, k as u64);
                let sym = oracle::supersym_dim(pu, qu, ku);
                let ext = oracle::superext_dim(pu, qu, ku);
                t.check(super_tensor::supersym_normal_form_count(space, k) as u64 == sym && super_tensor::supersym_dimension(space, k) == sym, tag, || {
                    format!("(p|q) = ({p}|{q}), k = {k}: supersymmetric count ≠ {sym}")
                });
                t.check(super_tensor::superext_normal_form_count(space, k) as u64 == ext && super_tensor::superext_dimension(space, k) == ext, tag, || {
                    format!("(p|q) = ({p}|{q}), k = {k}: superexterior count ≠ {ext}")
                });
            }
            let gens = space.generators();
            for k in 1..=4usize {
                let perms = Permutation::all(k);
                for case in 0..budget.count(4) as u64 {
                    let sub = case_seed(seed, 6, tag * 100 + k as u64 * 10 + case);
                    let mut g = Gen::new(sub);
                    t.case();
                    let factors: Vec<TGen> = (0..k).map(|_| *g.pick(&gens)).collect();
                    let w = TensorWord::new(space, factors, Scalar::one()).expect("generators of the space");
                    let key = word_key(&w);
                    let sym_nf = super_tensor::normalize_supersym(&w);
                    let want_sym = lin::collect(oracle::word_normal_form(&key, true).map(|(e, o, neg)| ((degree_of(p, &e), IndexSet::new(&o).expect("distinct")), superlin::scalar::sign(neg))));
                    t.check(sym_nf.terms == want_sym, sub, || format!("{key:?}: supersymmetric normal form differs from the oracle"));
                    let ext_nf = super_tensor::normalize_superext(&w);
                    let want_ext = lin::collect(oracle::word_normal_form(&key, false).map(|(e, o, neg)| ((IndexSet::new(&e).expect("distinct"), degree_of(q, &o)), superlin::scalar::sign(neg))));
                    t.check(ext_nf.terms == want_ext, sub, || format!("{key:?}: superexterior normal form differs from the oracle"));
                    for sigma in &perms {
                        let s = super_tensor::act_sym(sigma, &w).map(|x| super_tensor::normalize_supersym(&x));
                        t.check(s.as_ref().ok() == Some(&sym_nf), sub, || format!("{key:?}, σ = {:?}: symmetric action does not descend", sigma.images()));
                        let a = super_tensor::act_alt(sigma, &w).map(|x| super_tensor::normalize_superext(&x));
                        t.check(a.as_ref().ok() == Some(&ext_nf), sub, || format!("{key:?}, σ = {:?}: alternating action does not descend", sigma.images()));
                    }
                }
            }
        }
    }
}

type Structure = Vec<Vec<Vec<Scalar>>>;

fn structure(p: usize, brackets: &[(usize, usize, usize, i64)]) -> Structure {
    let mut g = vec![vec![vec![Scalar::zero(); p]; p]; p];
    for &(i, j, k, c) in brackets {
        g[i][j][k] += int(c);
        g[j][i][k] -= int(c);
    }
    g
}

fn unit_matrix(q: usize, i: usize, j: usize, c: Scalar) -> Matrix {
    let mut m = linalg::zeros(q, q);
    m[i][j] = c;
    m
}

fn adjoint(g: &Structure) -> Vec<Matrix> {
    let p = g.len();
    (0..p).map(|i| (0..p).map(|k| (0..p).map(|j| g[i][j][k].clone()).collect()).collect()).collect()
}

/// A Lie algebra with a representation, drawn from a small catalog.
fn lie_catalog(g: &mut Gen) -> (Structure, Vec<Matrix>, &'static str) {
    let sl2 = structure(3, &[(2, 0, 0, 2), (2, 1, 1, -2), (0, 1, 2, 1)]);
    match g.size(0, 5) {
        0 => {
            let p = g.size(1, 3);
            let q = g.size(1, 3);
            let base = g.matrix(q, q);
            let rho = (0..p)
                .map(|_| {
                    let (c, d) = (g.scalar(), g.scalar());
                    (0..q).map(|a| (0..q).map(|b| &c * &base[a][b] + if a == b { d.clone() } else { Scalar::zero() }).collect()).collect()
                })
                .collect();
            (structure(p, &[]), rho, "abelian")
        }
        1 => {
            let h = vec![vec![int(1), int(0)], vec![int(0), int(-1)]];
            (sl2, vec![unit_matrix(2, 0, 1, int(1)), unit_matrix(2, 1, 0, int(1)), h], "sl2 standard")
        }
        2 => {
            let rho = adjoint(&sl2);
            (sl2, rho, "sl2 adjoint")
        }
        3 => {
            let q = g.size(1, 3);
            (sl2, vec![linalg::zeros(q, q); 3], "sl2 trivial")
        }
        4 => {
            let a = g.scalar();
            let tt = g.scalar();
            let rho1 = vec![vec![&a + int(1), int(0)], vec![int(0), a]];
            (structure(2, &[(0, 1, 1, 1)]), vec![rho1, unit_matrix(2, 0, 1, tt)], "aff(1)")
        }
        _ => {
            let (a, b) = (g.nonzero(), g.nonzero());
            let ab = &a * &b;
            let rho = vec![unit_matrix(3, 0, 1, a), unit_matrix(3, 1, 2, b), unit_matrix(3, 0, 2, ab)];
            (structure(3, &[(0, 1, 2, 1)]), rho, "heisenberg")
        }
    }
}

/// Basis of the symmetric `𝔤`-equivariant forms `B`, as `b[a][c][k]` arrays.
fn equivariant_forms(gs: &Structure, rho: &[Matrix], q: usize) -> Vec<Structure> {
    let p = gs.len();
    let pairs: Vec<(usize, usize)> = (0..q).flat_map(|a| (a..q).map(move |c| (a, c))).collect();
    let col = |a: usize, c: usize, k: usize| {
        let (a, c) = (a.min(c), a.max(c));
        pairs.iter().position(|&x| x == (a, c)).expect("pair") * p + k
    };
    let mut sys = oracle::SparseSystem::new();
    for i in 0..p {
        for a in 0..q {
            for c in 0..q {
                for k in 0..p {
                    let mut row = std::collections::BTreeMap::new();
                    let mut put = |j: usize, v: Scalar| {
                        let e = row.entry(j).or_insert_with(Scalar::zero);
                        *e += v;
                    };
                    for j in 0..p {
                        if !gs[i][j][k].is_zero() {
                            put(col(a, c, j), gs[i][j][k].clone());
                        }
                    }
                    for d in 0..q {
                        if !rho[i][d][a].is_zero() {
                            put(col(d, c, k), -rho[i][d][a].clone());
                        }
                        if !rho[i][d][c].is_zero() {
                            put(col(a, d, k), -rho[i][d][c].clone());
                        }
                    }
                    sys.push(row);
                }
            }
        }
    }
    sys.nullspace(pairs.len() * p)
        .into_iter()
        .map(|v| (0..q).map(|a| (0..q).map(|c| (0..p).map(|k| v[col(a, c, k)].clone()).collect()).collect()).collect())
        .collect()
}

fn lie_biconditional(seed: u64, budget: Budget, t: &mut Tally) {
    let (mut both, mut neither) = (0, 0);
    for case in 0..budget.count(100) as u64 {
        let sub = case_seed(seed, 7, case);
        let mut g = Gen::new(sub);
        t.case();
        let (gs, rho, label) = lie_catalog(&mut g);
        let (p, q) = (gs.len(), rho[0].len());
        let mut b = vec![vec![vec![Scalar::zero(); p]; q]; q];
        for basis in equivariant_forms(&gs, &rho, q) {
            let c = g.scalar();
            for a in 0..q {
                for d in 0..q {
                    for k in 0..p {
                        b[a][d][k] += &c * &basis[a][d][k];
                    }
                }
            }
        }
        if g.chance(0.3) {
            let (a, d, k) = (g.size(0, q - 1), g.size(0, q - 1), g.size(0, p - 1));
            let c = g.nonzero();
            b[a][d][k] += &c;
            if a != d && !g.chance(0.2) {
                b[d][a][k] += c;
            }
        }
        let data = RepAndForm { g: gs, rho, b, s_dim: q };
        let cond = lie_super::check_structure_conditions(&data).map(|r| r.passed());
        let lie = lie_super::build_from_rho_b(&data).and_then(|l| lie_super::check_lie_superalgebra(&l)).map(|r| r.passed());
        match (cond, lie) {
            (Ok(c), Ok(l)) => {
                if c && l {
                    both += 1;
                } else if !c && !l {
                    neither += 1;
                }
                t.check(c == l, sub, || format!("{label}: conditions {c}, super-Jacobi {l}"));
            }
            (Err(e), _) | (_, Err(e)) => t.error(sub, e),
        }
    }
    t.note(format!("{both} Lie superalgebras, {neither} rejected by both"));
}

fn random_op(g: &mut Gen, m: usize, r_in: usize, r_out: usize, order: u32) -> PolyDiffOp {
    let items: Vec<(MultiDegree, PolyMatrix)> = MultiDegree::up_to_degree(m, order)
        .into_iter()
        .map(|alpha| {
            let mat = (0..r_out).map(|_| (0..r_in).map(|_| if g.chance(0.6) { g.poly(m, 2, 2) } else { Poly::zero(m) }).collect()).collect();
            (alpha, mat)
        })
        .collect();
    PolyDiffOp::new(m, r_in, r_out, items).expect("shapes")
}

fn jets(seed: u64, budget: Budget, t: &mut Tally) {
    for case in 0..budget.count(20) as u64 {
        let sub = case_seed(seed, 8, case);
        let mut g = Gen::new(sub);
        t.case();
        let m = g.size(1, 2);
        let (r_in, r_out) = (g.size(1, 2), g.size(1, 2));
        let order = g.size(0, 2) as u32;
        let d = random_op(&mut g, m, r_in, r_out, order);
        for k in 1..=4 {
            let fs: Vec<Poly> = (0..k).map(|_| g.poly(m, 2, 3)).collect();
            t.check(polydiff_jets::iterated_commutator(&d, &fs) == polydiff_jets::nested_commutator(&d, &fs), sub, || {
                format!("m = {m}, order {order}: commutator formula ≠ nested commutators for k = {k}")
            });
        }
        let fs: Vec<Poly> = (0..=order).map(|_| g.poly(m, 2, 3)).collect();
        t.check(polydiff_jets::iterated_commutator(&d, &fs).is_zero(), sub, || format!("m = {m}: order-{order} operator survives {} commutators", order + 1));
        for _ in 0..10 {
            let p = g.point(m);
            let s: Vec<Poly> = (0..r_in).map(|_| g.poly(m, 3, 4)).collect();
            let direct: Vec<Scalar> = match d.apply(&s) {
                Ok(v) => v.iter().map(|x| x.eval(&p)).collect(),
                Err(e) => {
                    t.error(sub, e);
                    break;
                }
            };
            match polydiff_jets::factor_through_jet(&d, order, &p) {
                Ok(mat) => {
                    let via = linalg::mat_vec(&mat, &polydiff_jets::jet(&s, order, &p).coefficient_vector());
                    t.check(via == direct, sub, || format!("m = {m}, order {order}: D ≠ D̂∘jet at {p:?}"));
                }
                Err(e) => t.error(sub, e),
            }
        }
    }
}

/// Which corrections a random supermap carries.
#[derive(Debug, Clone, Copy)]
enum MapKind {
    Linear,
    CoordCorrection,
    CubicCorrection,
    Both,
}

fn random_supermap(g: &mut Gen, kind: MapKind) -> SuperMapData {
    let m = g.size(1, 2);
    let n = g.size(1, 2);
    let p = g.size(1, 4);
    let coord = matches!(kind, MapKind::CoordCorrection | MapKind::Both);
    let cubic = matches!(kind, MapKind::CubicCorrection | MapKind::Both);
    let coord_images = (0..n)
        .map(|_| {
            let base = PolySuperFunc::from_poly(&g.poly(m, 2, 3), p);
            if coord {
                base.add(&g.super_func(m, p, Parity::Even, 1, 4, |d| d >= 2))
            } else {
                base
            }
        })
        .collect();
    let odd_images = (0..p)
        .map(|_| {
            let mut f = PolySuperFunc::zero(m, p);
            for k in 1..=p {
                if g.chance(0.6) {
                    f = f.add(&PolySuperFunc::from_poly(&g.poly(m, 1, 2), p).mul(&PolySuperFunc::generator(m, p, k)));
                }
            }
            if cubic {
                f = f.add(&g.super_func(m, p, Parity::Odd, 1, 6, |d| d >= 3));
            }
            f
        })
        .collect();
    SuperMapData::new(m, p, coord_images, odd_images).expect("shapes")
}

fn supermap_checks(seed: u64, budget: Budget, t: &mut Tally) {
    let kinds = [MapKind::Linear, MapKind::CoordCorrection, MapKind::CubicCorrection, MapKind::Both];
    let mut bicond_fail = 0;
    for case in 0..budget.count(50) as u64 {
        let sub = case_seed(seed, 9, case);
        let mut g = Gen::new(sub);
        t.case();
        let kind = kinds[case as usize % kinds.len()];
        let phi = random_supermap(&mut g, kind);
        let (n, q) = phi.target_dims();
        match supermaps::order_bound_check(&phi) {
            Ok(r) => t.check(r.passed(), sub, || format!("{kind:?}, q = {q}: commutators survive depth ⌊q/2⌋ + 1")),
            Err(e) => t.error(sub, e),
        }
        for _ in 0..3 {
            let parity = if g.chance(0.5) { Parity::Even } else { Parity::Odd };
            let f = g.super_func(n, q, parity, 2, 4, |_| true);
            let ok = match (supermaps::apply(&phi, &f), phi.pullback(&f.augmentation())) {
                (Ok(img), Ok(pb)) => img.augmentation() == pb,
                _ => false,
            };
            t.check(ok, sub, || format!("{kind:?}: ε∘Φ ≠ φ*∘ε"));
        }
        match supermaps::is_module_linear(&phi) {
            Ok(lin) => {
                let oz = supermaps::order_zero_criterion(&phi);
                if oz != lin {
                    bicond_fail += 1;
                }
                t.check(oz == lin, sub, || format!("{kind:?}, p = {}: order zero {oz}, module-linear {lin}", phi.p));
            }
            Err(e) => t.error(sub, e),
        }
    }
    t.note(format!("order-zero ⇔ module-linear fails on {bicond_fail} map(s)"));
}

fn random_connection(g: &mut Gen, m: usize, n: usize, deg: u32) -> OddConnection {
    let a = (0..m).map(|_| (0..n).map(|_| (0..n).map(|_| if g.chance(0.5) { g.poly(m, deg, 2) } else { Poly::zero(m) }).collect()).collect()).collect();
    Connection::new(m, n, a).expect("shapes")
}

/// A connection with zero curvature: random for `m = 1`, zero otherwise.
fn flat_connection(g: &mut Gen, m: usize, n: usize, deg: u32) -> OddConnection {
    if m == 1 {
        random_connection(g, m, n, deg)
    } else {
        Connection::flat(m, n)
    }
}

/// A connection whose curvature is nonzero (`m = 2`).
fn curved_connection(g: &mut Gen, n: usize, deg: u32) -> OddConnection {
    loop {
        let c = random_connection(g, 2, n, deg);
        if oracle::curvature(&c).values().any(|r| r.iter().flatten().any(|p| !p.is_zero())) {
            return c;
        }
    }
}

fn random_form(g: &mut Gen, m: usize, n: usize, k: usize, deg: u32) -> SuperForm {
    let keys: Vec<FormKey> = super_derham::basis(m, n, k, k + n + deg as usize).into_iter().filter(|kk| kk.x.total() <= deg).collect();
    let mut w = SuperForm::zero(m, n);
    for _ in 0..g.size(1, 4) {
        let key = g.pick(&keys).clone();
        w = w.add(&SuperForm::monomial(m, n, key, g.nonzero()));
    }
    w
}

fn parity_part(w: &SuperForm, odd: bool) -> SuperForm {
    let terms = w.terms.iter().filter(|(k, _)| ((k.b.total() as usize + k.c.len()) % 2 == 1) == odd).map(|(k, v)| (k.clone(), v.clone())).collect();
    SuperForm { m: w.m, n: w.n, terms }
}

fn tuples(kinds: &[FieldKind], len: usize) -> Vec<Vec<FieldKind>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|v: Vec<FieldKind>| kinds.iter().map(move |k| [v.clone(), vec![*k]].concat())).collect();
    }
    out
}

fn super_de_rham(seed: u64, budget: Budget, t: &mut Tally) {
    for case in 0..budget.count(40) as u64 {
        let sub = case_seed(seed, 10, case);
        let mut g = Gen::new(sub);
        t.case();
        let curved = case % 2 == 1;
        let n = g.size(1, 3);
        let (m, conn) = if curved {
            (2, curved_connection(&mut g, n, 2))
        } else {
            let m = g.size(1, 2);
            (m, flat_connection(&mut g, m, n, 2))
        };
        let k = g.size(0, 2);
        let w = random_form(&mut g, m, n, k, 2);
        match super_derham::super_d(&conn, &w) {
            Ok(dw) => {
                t.check(dw == oracle::d_by_generators(&conn, &w), sub, || format!("(m|n) = ({m}|{n}), curved {curved}: d differs from the generator extension"));
                match super_derham::super_d(&conn, &dw) {
                    Ok(ddw) => t.check(ddw.is_zero(), sub, || format!("(m|n) = ({m}|{n}), curved {curved}: d² ≠ 0 on a {k}-form")),
                    Err(e) => t.error(sub, e),
                }
            }
            Err(e) => t.error(sub, e),
        }
    }
    for case in 0..budget.count(20) as u64 {
        let sub = case_seed(seed, 10, 1000 + case);
        let mut g = Gen::new(sub);
        t.case();
        let n = g.size(1, 2);
        let (m, conn) = if case % 2 == 1 { (2, curved_connection(&mut g, n, 1)) } else { (2, flat_connection(&mut g, 2, n, 1)) };
        let k = g.size(0, 2);
        let w = random_form(&mut g, m, n, k, 1);
        let kinds: Vec<FieldKind> = (1..=m).map(FieldKind::Coord).chain((1..=n).map(FieldKind::Odd)).collect();
        let mut bad = 0;
        let mut total = 0;
        for odd in [false, true] {
            let part = parity_part(&w, odd);
            let dw = match super_derham::super_d(&conn, &part) {
                Ok(x) => x,
                Err(e) => {
                    t.error(sub, e);
                    continue;
                }
            };
            for tuple in tuples(&kinds, k + 1) {
                let fields: Vec<SuperVectorFieldGen> = tuple.iter().map(|&kk| SuperVectorFieldGen::plain(m, n, kk)).collect();
                total += 1;
                let lhs = super_derham::super_d_by_fields(&conn, &part, &fields);
                let rhs = super_derham::evaluate(&dw, &fields);
                if !matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b) {
                    bad += 1;
                }
            }
        }
        t.check(bad == 0, sub, || format!("(m|n) = ({m}|{n}): field formula differs on {bad} of {total} tuples"));
    }
    for case in 0..budget.count(6) as u64 {
        let sub = case_seed(seed, 10, 2000 + case);
        let mut g = Gen::new(sub);
        t.case();
        let n = g.size(1, 2);
        let (m, conn) = if case % 2 == 1 {
            (2, curved_connection(&mut g, n, 1))
        } else {
            let m = g.size(1, 2);
            (m, flat_connection(&mut g, m, n, 1))
        };
        let cutoff = 3;
        let dims: superlin::Result<Vec<usize>> = (0..=2).map(|k| super_derham::cohomology_dims(&conn, k, cutoff)).collect();
        match dims {
            Ok(d) => t.check(d == vec![1, 0, 0], sub, || format!("(m|n) = ({m}|{n}), cutoff {cutoff}: cohomology {d:?}")),
            Err(e) => t.error(sub, e),
        }
    }
}

fn delta_kernel(seed: u64, budget: Budget, t: &mut Tally) {
    let mut case = 0u64;
    for m in 1..=2usize {
        for n in 1..=2usize {
            for curved in [false, true] {
                if curved && m == 1 {
                    continue;
                }
                for _ in 0..budget.count(1) {
                    let sub = case_seed(seed, 11, case);
                    case += 1;
                    let mut g = Gen::new(sub);
                    t.case();
                    let conn = if curved { curved_connection(&mut g, n, 1) } else { flat_connection(&mut g, m, n, 1) };
                    match super_derham::delta_kernel_check(&conn, 2) {
                        Ok(r) => t.check(r.passed(), sub, || format!("(m|n) = ({m}|{n}), curved {curved}: {:?}", r.checks.iter().filter(|c| !c.passed).map(|c| &c.name).collect::<Vec<_>>())),
                        Err(e) => t.error(sub, e),
                    }
                    for _ in 0..5 {
                        let k = g.size(0, 2);
                        let w = random_form(&mut g, m, n, k, 2);
                        let mut want = SuperForm::zero(m, n);
                        for (key, c) in &w.terms {
                            let ev = -2 * (key.b.total() as i64 + key.c.len() as i64);
                            want = want.add(&SuperForm::monomial(m, n, key.clone(), c * int(ev)));
                        }
                        match super_derham::delta_operator(&conn, &w) {
                            Ok(dw) => t.check(dw == want, sub, || format!("(m|n) = ({m}|{n}): Δ ≠ −2(|b|+|c|)·id")),
                            Err(e) => t.error(sub, e),
                        }
                    }
                }
            }
        }
    }
}
