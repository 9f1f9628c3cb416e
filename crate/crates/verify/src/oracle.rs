//! Brute-force oracles, written independently of the library routines they check.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use superlin::cartan_poincare::BigradedElem;
use superlin::exterior::ExtElem;
use superlin::linalg::Matrix;
use superlin::poly::Poly;
use superlin::straightening::{OddFamily, Straightening};
use superlin::super_derham::{OddConnection, SuperForm};
use superlin::{IndexSet, MultiDegree, Scalar};

/// Element of `Λ` keyed by bitmask (bit `i−1` for generator `i`).
pub type MaskElem = BTreeMap<u64, Scalar>;

fn add_to(map: &mut MaskElem, k: u64, c: Scalar) {
    let e = map.entry(k).or_insert_with(Scalar::zero);
    *e += c;
    if e.is_zero() {
        map.remove(&k);
    }
}

/// Sign of `e_a ∧ e_b` as `Some(negative)`, or `None` when they overlap.
pub fn mask_wedge_sign(a: u64, b: u64) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(inversions % 2 == 1)
}

pub fn mask_wedge(x: &MaskElem, y: &MaskElem) -> MaskElem {
    let mut out = MaskElem::new();
    for (a, c) in x {
        for (b, d) in y {
            if let Some(neg) = mask_wedge_sign(*a, *b) {
                let v = c * d;
                add_to(&mut out, a | b, if neg { -v } else { v });
            }
        }
    }
    out
}

/// `s_i⌟` on a single monomial: `(remaining mask, negative)`.
fn contract(i: usize, mask: u64) -> Option<(u64, bool)> {
    let bit = 1u64 << (i - 1);
    if mask & bit == 0 {
        return None;
    }
    Some((mask & !bit, (mask & (bit - 1)).count_ones() % 2 == 1))
}

pub fn mask_contract(i: usize, x: &MaskElem) -> MaskElem {
    let mut out = MaskElem::new();
    for (m, c) in x {
        if let Some((r, neg)) = contract(i, *m) {
            add_to(&mut out, r, if neg { -c.clone() } else { c.clone() });
        }
    }
    out
}

pub fn from_ext(e: &ExtElem) -> MaskElem {
    e.terms().iter().map(|(s, c)| (s.mask(), c.clone())).collect()
}

pub fn mask_generator(i: usize) -> MaskElem {
    [(1u64 << (i - 1), Scalar::one())].into_iter().collect()
}

/// Incremental sparse row echelon form over the rationals.
#[derive(Default)]
pub struct SparseSystem {
    pivots: BTreeMap<usize, BTreeMap<usize, Scalar>>,
}

impl SparseSystem {
    pub fn new() -> SparseSystem {
        SparseSystem::default()
    }

    /// Adds a row; returns true when it increases the rank.
    pub fn push(&mut self, row: BTreeMap<usize, Scalar>) -> bool {
        let mut row: BTreeMap<usize, Scalar> = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        while let Some((&lead, lc)) = row.iter().next() {
            let lc = lc.clone();
            match self.pivots.get(&lead) {
                Some(p) => {
                    for (c, v) in p {
                        let e = row.entry(*c).or_insert_with(Scalar::zero);
                        *e -= &lc * v;
                        if e.is_zero() {
                            row.remove(c);
                        }
                    }
                }
                None => {
                    let inv = lc.recip();
                    let normalized = row.into_iter().map(|(c, v)| (c, v * &inv)).collect();
                    self.pivots.insert(lead, normalized);
                    return true;
                }
            }
        }
        false
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Basis of the solution space of the homogeneous system in `cols` unknowns.
    pub fn nullspace(&self, cols: usize) -> Vec<Vec<Scalar>> {
        let mut out = Vec::new();
        for free in (0..cols).filter(|c| !self.pivots.contains_key(c)) {
            let mut x = vec![Scalar::zero(); cols];
            x[free] = Scalar::one();
            for (p, row) in self.pivots.iter().rev() {
                let mut acc = Scalar::zero();
                for (c, v) in row.iter().skip(1) {
                    acc -= v * &x[*c];
                }
                x[*p] = acc;
            }
            out.push(x);
        }
        out
    }
}

/// Exact rank of a dense matrix.
pub fn rank(m: &Matrix) -> usize {
    let mut sys = SparseSystem::new();
    for row in m {
        sys.push(row.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect());
    }
    sys.rank()
}

/// Which Leibniz rule the brute-force solver imposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeibnizMode {
    /// `D(ab) = D(a)b + aD(b)`, any images.
    Ungraded,
    /// Even superderivations.
    SuperEven,
    /// Odd superderivations: `D(ab) = D(a)b + (−1)^{|a|} aD(b)`.
    SuperOdd,
    /// Degree-preserving derivations.
    ZGraded,
}

/// Solution space of the Leibniz equations on all pairs of basis monomials.
/// Unknown `(K, I)` is the coefficient of `e_K` in `D(e_I)`.
pub struct DerivationSpace {
    pub n: usize,
    pub unknowns: Vec<(u64, u64)>,
    pub basis: Vec<Vec<Scalar>>,
}

impl DerivationSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The operator given by coefficients `v` on the unknowns.
    pub fn apply(&self, v: &[Scalar], x: &MaskElem) -> MaskElem {
        let mut out = MaskElem::new();
        for ((k, i), c) in self.unknowns.iter().zip(v) {
            if c.is_zero() {
                continue;
            }
            if let Some(xi) = x.get(i) {
                add_to(&mut out, *k, c * xi);
            }
        }
        out
    }
}

pub fn derivation_space(n: usize, mode: LeibnizMode) -> DerivationSpace {
    let size = 1u64 << n;
    let allowed = |k: u64, i: u64| {
        let (dk, di) = (k.count_ones(), i.count_ones());
        match mode {
            LeibnizMode::Ungraded => true,
            LeibnizMode::SuperEven => (dk + di) % 2 == 0,
            LeibnizMode::SuperOdd => (dk + di) % 2 == 1,
            LeibnizMode::ZGraded => dk == di,
        }
    };
    let unknowns: Vec<(u64, u64)> = (0..size).flat_map(|k| (0..size).map(move |i| (k, i))).filter(|&(k, i)| allowed(k, i)).collect();
    let col: HashMap<(u64, u64), usize> = unknowns.iter().enumerate().map(|(c, u)| (*u, c)).collect();
    let mut sys = SparseSystem::new();
    let term = |row: &mut BTreeMap<usize, Scalar>, k: u64, i: u64, c: Scalar| {
        if let Some(&j) = col.get(&(k, i)) {
            let e = row.entry(j).or_insert_with(Scalar::zero);
            *e += c;
        }
    };
    for i in 0..size {
        for j in 0..size {
            let s_neg = mode == LeibnizMode::SuperOdd && i.count_ones() % 2 == 1;
            for k in 0..size {
                let mut row = BTreeMap::new();
                if let Some(neg) = mask_wedge_sign(i, j) {
                    term(&mut row, k, i | j, sign(neg));
                }
                if k & j == j {
                    let l = k & !j;
                    if let Some(neg) = mask_wedge_sign(l, j) {
                        term(&mut row, l, i, -sign(neg));
                    }
                }
                if k & i == i {
                    let l = k & !i;
                    if let Some(neg) = mask_wedge_sign(i, l) {
                        term(&mut row, l, j, -sign(neg ^ s_neg));
                    }
                }
                sys.push(row);
            }
        }
    }
    let basis = sys.nullspace(unknowns.len());
    DerivationSpace { n, unknowns, basis }
}

fn sign(neg: bool) -> Scalar {
    if neg {
        -Scalar::one()
    } else {
        Scalar::one()
    }
}

/// `n·2^{n−1} + dim(Λ₋ / (Λ₋ ∩ Λⁿ))`.
pub fn derivation_dimension_formula(n: usize) -> u64 {
    let half = 1u64 << (n - 1);
    let odd_part = half - u64::from(n % 2 == 1);
    n as u64 * half + odd_part
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim Sym^k` of an `n`-dimensional space.
pub fn sym_dim(n: u64, k: u64) -> u64 {
    if n == 0 {
        return u64::from(k == 0);
    }
    binomial(n + k - 1, k)
}

pub fn choose(n: u64, k: u64) -> u64 {
    binomial(n, k)
}

/// `Σ_{a+b=k} dim Sym^a(p) · C(q, b)`.
pub fn supersym_dim(p: u64, q: u64, k: u64) -> u64 {
    (0..=k).map(|a| sym_dim(p, a) * binomial(q, k - a)).sum()
}

/// `Σ_{a+b=k} C(p, a) · dim Sym^b(q)`.
pub fn superext_dim(p: u64, q: u64, k: u64) -> u64 {
    (0..=k).map(|a| binomial(p, a) * sym_dim(q, k - a)).sum()
}

/// Normal form of a word of generators `(odd, index)` in a quotient where the
/// generators of parity `anti` anticommute and square to zero and all other
/// pairs commute: `(sorted evens, sorted odds, negative)`, or `None` if zero.
pub fn word_normal_form(word: &[(bool, usize)], anti: bool) -> Option<(Vec<usize>, Vec<usize>, bool)> {
    let pick = |odd: bool| -> Vec<usize> { word.iter().filter(|g| g.0 == odd).map(|g| g.1).collect() };
    let (mut evens, mut odds) = (pick(false), pick(true));
    let seq = if anti { &mut odds } else { &mut evens };
    let mut neg = false;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] == seq[j] {
                return None;
            }
            if seq[i] > seq[j] {
                neg = !neg;
            }
        }
    }
    evens.sort_unstable();
    odds.sort_unstable();
    Some((evens, odds, neg))
}

/// Element of `Sym S* ⊗ Λ S*` keyed by (exponents, mask).
pub type BiElem = BTreeMap<(Vec<u32>, u64), Scalar>;

pub fn from_bigraded(x: &BigradedElem) -> BiElem {
    x.terms.iter().map(|((a, s), c)| ((a.0.clone(), s.mask()), c.clone())).collect()
}

fn add_bi(out: &mut BiElem, k: (Vec<u32>, u64), c: Scalar) {
    let e = out.entry(k.clone()).or_insert_with(Scalar::zero);
    *e += c;
    if e.is_zero() {
        out.remove(&k);
    }
}

fn bump(a: &[u32], i: usize, up: bool) -> Vec<u32> {
    let mut v = a.to_vec();
    if up {
        v[i - 1] += 1;
    } else {
        v[i - 1] -= 1;
    }
    v
}

/// Shapes of twisted-shift-type operators: `a[i][μ]` is the coefficient of
/// `s_i` in `A s_μ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftOp {
    /// `Σ_μ ds_μ· ⊗ (A s_μ)⌟`.
    Left,
    /// `Σ_μ (A s_μ)⌟ ⊗ ds_μ∧`.
    Right,
    /// `−Σ_μ ds_μ·(A s_μ)⌟` on the Sym factor.
    StarSym,
    /// `−Σ_μ ds_μ∧(A s_μ)⌟` on the Λ factor.
    StarExt,
}

pub fn shift_op(op: ShiftOp, a: &Matrix, x: &BiElem) -> BiElem {
    let n = a.len();
    let mut out = BiElem::new();
    for ((alpha, mask), c) in x {
        for mu in 1..=n {
            for i in 1..=n {
                let coef = &a[i - 1][mu - 1];
                if coef.is_zero() {
                    continue;
                }
                let v = c * coef;
                match op {
                    ShiftOp::Left => {
                        if let Some((r, neg)) = contract(i, *mask) {
                            add_bi(&mut out, (bump(alpha, mu, true), r), if neg { -v } else { v });
                        }
                    }
                    ShiftOp::Right => {
                        let e = alpha[i - 1];
                        if e == 0 {
                            continue;
                        }
                        if let Some(neg) = mask_wedge_sign(1u64 << (mu - 1), *mask) {
                            let v = v * Scalar::from_integer(e.into());
                            add_bi(&mut out, (bump(alpha, i, false), mask | (1u64 << (mu - 1))), if neg { -v } else { v });
                        }
                    }
                    ShiftOp::StarSym => {
                        let e = alpha[i - 1];
                        if e == 0 {
                            continue;
                        }
                        let v = v * Scalar::from_integer(e.into());
                        add_bi(&mut out, (bump(&bump(alpha, i, false), mu, true), *mask), -v);
                    }
                    ShiftOp::StarExt => {
                        if let Some((r, n1)) = contract(i, *mask) {
                            if let Some(n2) = mask_wedge_sign(1u64 << (mu - 1), r) {
                                add_bi(&mut out, (alpha.clone(), r | (1u64 << (mu - 1))), if n1 ^ n2 { v } else { -v });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Checks `D_v(Gσ) = G(f(v)⌟σ)` on every monomial `σ` and basis vector `v`,
/// with `G` extended multiplicatively from its generator images. Returns the
/// failing `(v, σ)` pairs.
pub fn straightening_failures(fam: &OddFamily, g: &Straightening) -> Vec<(usize, u64)> {
    let n = fam.n;
    let f = fam.f_matrix();
    let images: Vec<MaskElem> = g.images().iter().map(from_ext).collect();
    let g_of = |mask: u64| -> MaskElem {
        let mut acc: MaskElem = [(0u64, Scalar::one())].into_iter().collect();
        for i in 1..=n {
            if mask & (1u64 << (i - 1)) != 0 {
                acc = mask_wedge(&acc, &images[i - 1]);
            }
        }
        acc
    };
    let g_lin = |x: &MaskElem| -> MaskElem {
        let mut out = MaskElem::new();
        for (m, c) in x {
            for (k, v) in g_of(*m) {
                add_to(&mut out, k, c * v);
            }
        }
        out
    };
    let mut fails = Vec::new();
    for (v, d) in fam.d.iter().enumerate() {
        let act = |x: &MaskElem| -> MaskElem {
            let mut out = MaskElem::new();
            for ((sigma, s), c) in &d.terms {
                let part = mask_wedge(&[(sigma.mask(), c.clone())].into_iter().collect(), &mask_contract(*s, x));
                for (k, val) in part {
                    add_to(&mut out, k, val);
                }
            }
            out
        };
        for mask in 0..(1u64 << n) {
            let lhs = act(&g_of(mask));
            let mut ins = MaskElem::new();
            for i in 1..=n {
                let coef = &f[i - 1][v];
                if !coef.is_zero() {
                    for (k, c) in mask_contract(i, &[(mask, Scalar::one())].into_iter().collect()) {
                        add_to(&mut ins, k, c * coef);
                    }
                }
            }
            if lhs != g_lin(&ins) {
                fails.push((v + 1, mask));
            }
        }
    }
    fails
}

/// Curvature `R_ij = ∂_iA_j − ∂_jA_i + A_iA_j − A_jA_i` for `i < j`.
pub fn curvature(conn: &OddConnection) -> BTreeMap<(usize, usize), Vec<Vec<Poly>>> {
    let (m, n) = (conn.m, conn.r);
    let mut out = BTreeMap::new();
    for i in 1..=m {
        for j in i + 1..=m {
            let (ai, aj) = (&conn.a[i - 1], &conn.a[j - 1]);
            let r: Vec<Vec<Poly>> = (0..n)
                .map(|row| {
                    (0..n)
                        .map(|col| {
                            let mut p = aj[row][col].deriv(i).sub(&ai[row][col].deriv(j));
                            for t in 0..n {
                                p = p.add(&ai[row][t].mul(&aj[t][col])).sub(&aj[row][t].mul(&ai[t][col]));
                            }
                            p
                        })
                        .collect()
                })
                .collect();
            out.insert((i, j), r);
        }
    }
    out
}

/// `d` computed as the unique derivation with
/// `x ↦ dx`, `dx ↦ 0`, `θ_μ ↦ ds̄_μ − Σ A_i[μ][ν] dx_i θ_ν`,
/// `ds̄_μ ↦ −Σ A_i[μ][ν] dx_i ds̄_ν + Σ_{i<j} R_ij[μ][λ] dx_i dx_j θ_λ`,
/// applied factor by factor with the sign `(−1)^{form degree passed}`.
pub fn d_by_generators(conn: &OddConnection, w: &SuperForm) -> SuperForm {
    let (m, n) = (conn.m, conn.r);
    let r = curvature(conn);
    let d_theta: Vec<SuperForm> = (1..=n)
        .map(|mu| {
            let mut acc = SuperForm::ds(m, n, mu);
            for i in 1..=m {
                for nu in 1..=n {
                    let t = SuperForm::dx(m, n, i).wedge(&SuperForm::theta(m, n, nu)).mul_poly(&conn.a[i - 1][mu - 1][nu - 1]);
                    acc = acc.sub(&t);
                }
            }
            acc
        })
        .collect();
    let d_ds: Vec<SuperForm> = (1..=n)
        .map(|mu| {
            let mut acc = SuperForm::zero(m, n);
            for i in 1..=m {
                for nu in 1..=n {
                    let t = SuperForm::dx(m, n, i).wedge(&SuperForm::ds(m, n, nu)).mul_poly(&conn.a[i - 1][mu - 1][nu - 1]);
                    acc = acc.sub(&t);
                }
            }
            for ((i, j), rij) in &r {
                for lam in 1..=n {
                    let t = SuperForm::dx(m, n, *i).wedge(&SuperForm::dx(m, n, *j)).wedge(&SuperForm::theta(m, n, lam)).mul_poly(&rij[mu - 1][lam - 1]);
                    acc = acc.add(&t);
                }
            }
            acc
        })
        .collect();
    let mut out = SuperForm::zero(m, n);
    for (k, c) in &w.terms {
        // Factors in normal order: x^α, dx_a…, ds̄ with multiplicity, θ_c….
        let mut factors: Vec<(SuperForm, SuperForm, usize)> = Vec::new();
        let xa = Poly::monomial(k.x.clone(), Scalar::one());
        let mut dxa = SuperForm::zero(m, n);
        for i in 1..=m {
            dxa = dxa.add(&SuperForm::dx(m, n, i).mul_poly(&xa.deriv(i)));
        }
        let zero_form = SuperForm::from_parts(&xa, IndexSet::EMPTY, MultiDegree::zero(n), IndexSet::EMPTY, n);
        factors.push((zero_form, dxa, 0));
        for i in k.a.iter() {
            factors.push((SuperForm::dx(m, n, i), SuperForm::zero(m, n), 1));
        }
        for mu in 1..=n {
            for _ in 0..k.b.get(mu) {
                factors.push((SuperForm::ds(m, n, mu), d_ds[mu - 1].clone(), 1));
            }
        }
        for mu in k.c.iter() {
            factors.push((SuperForm::theta(m, n, mu), d_theta[mu - 1].clone(), 0));
        }
        let mut passed = 0usize;
        for t in 0..factors.len() {
            let mut prod = SuperForm::monomial(m, n, unit_key(m, n), c.clone());
            for (s, f) in factors.iter().enumerate() {
                prod = prod.wedge(if s == t { &f.1 } else { &f.0 });
            }
            out = if passed % 2 == 1 { out.sub(&prod) } else { out.add(&prod) };
            passed += factors[t].2;
        }
    }
    out
}

fn unit_key(m: usize, n: usize) -> superlin::super_derham::FormKey {
    superlin::super_derham::FormKey { x: MultiDegree::zero(m), a: IndexSet::EMPTY, b: MultiDegree::zero(n), c: IndexSet::EMPTY }
}

/// Normalizes the product of repeated `ds̄` factors: a monomial with `b_μ`
/// copies equals `(ds̄_μ)^{b_μ}` with unit coefficient in the normal basis.
pub fn ds_power(m: usize, n: usize, b: &MultiDegree) -> SuperForm {
    let mut acc = SuperForm::monomial(m, n, unit_key(m, n), Scalar::one());
    for mu in 1..=n {
        for _ in 0..b.get(mu) {
            acc = acc.wedge(&SuperForm::ds(m, n, mu));
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use superlin::scalar::int;

    #[test]
    fn mask_signs() {
        assert_eq!(mask_wedge_sign(0b01, 0b10), Some(false));
        assert_eq!(mask_wedge_sign(0b10, 0b01), Some(true));
        assert_eq!(mask_wedge_sign(0b11, 0b01), None);
        assert_eq!(mask_wedge_sign(0b101, 0b010), Some(true));
    }

    #[test]
    fn sparse_nullspace() {
        let mut s = SparseSystem::new();
        s.push([(0, int(1)), (1, int(1))].into_iter().collect());
        s.push([(1, int(1)), (2, int(-1))].into_iter().collect());
        assert_eq!(s.rank(), 2);
        let ns = s.nullspace(3);
        assert_eq!(ns, vec![vec![int(-1), int(1), int(1)]]);
    }

    #[test]
    fn small_derivation_spaces() {
        assert_eq!(derivation_space(1, LeibnizMode::Ungraded).dim(), 1);
        assert_eq!(derivation_space(2, LeibnizMode::Ungraded).dim(), 6);
        assert_eq!(derivation_space(2, LeibnizMode::ZGraded).dim(), 4);
        assert_eq!(derivation_space(2, LeibnizMode::SuperEven).dim() + derivation_space(2, LeibnizMode::SuperOdd).dim(), 8);
    }

    #[test]
    fn word_normal_forms() {
        let w = [(true, 2), (false, 1), (true, 1)];
        assert_eq!(word_normal_form(&w, true), Some((vec![1], vec![1, 2], true)));
        assert_eq!(word_normal_form(&w, false), Some((vec![1], vec![1, 2], false)));
        assert_eq!(word_normal_form(&[(true, 1), (true, 1)], true), None);
    }

    #[test]
    fn ds_powers_have_unit_coefficient() {
        let b = MultiDegree(vec![2, 1]);
        let p = ds_power(1, 2, &b);
        assert_eq!(p.terms.len(), 1);
        assert_eq!(p.terms.values().next().unwrap(), &int(1));
    }
}
