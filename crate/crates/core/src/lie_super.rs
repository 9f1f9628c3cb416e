//! Lie superalgebras given by structure constants on a homogeneous basis.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, mismatch, Error, Result};
use crate::index::Parity;
use crate::linalg::{self, Matrix};
use crate::report::Report;
use crate::scalar::{self, Scalar};

/// Bracket `⟦L_i, L_j⟧ = Σ_k c[i][j][k] L_k` on a basis with the even
/// elements first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieSuperData {
    pub even_dim: usize,
    pub odd_dim: usize,
    pub c: Vec<Vec<Vec<Scalar>>>,
}

impl LieSuperData {
    /// All brackets zero.
    pub fn abelian(even_dim: usize, odd_dim: usize) -> LieSuperData {
        let d = even_dim + odd_dim;
        LieSuperData { even_dim, odd_dim, c: vec![vec![vec![Scalar::zero(); d]; d]; d] }
    }

    pub fn dim(&self) -> usize {
        self.even_dim + self.odd_dim
    }

    /// Parity of the 0-based basis element `i`.
    pub fn parity(&self, i: usize) -> Parity {
        if i < self.even_dim {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Sets `⟦L_i, L_j⟧` (0-based).
    pub fn set(&mut self, i: usize, j: usize, coeffs: Vec<Scalar>) {
        self.c[i][j] = coeffs;
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let d = self.dim();
        let mut out = vec![Scalar::zero(); d];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let f = xi * yj;
                for (k, c) in self.c[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &f * c;
                    }
                }
            }
        }
        out
    }

    fn basis(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.dim()];
        v[i] = Scalar::one();
        v
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim();
        if self.c.len() != d || self.c.iter().any(|r| r.len() != d || r.iter().any(|v| v.len() != d)) {
            return mismatch(format!("structure constants must be {d}×{d}×{d}"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> LieJson {
        let mut brackets = Vec::new();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if self.c[i][j].iter().any(|v| !v.is_zero()) {
                    brackets.push(BracketJson { i: i + 1, j: j + 1, coeffs: self.c[i][j].clone() });
                }
            }
        }
        LieJson { even_dim: self.even_dim, odd_dim: self.odd_dim, brackets }
    }

    pub fn from_json(j: &LieJson) -> Result<LieSuperData> {
        let mut l = LieSuperData::abelian(j.even_dim, j.odd_dim);
        let d = l.dim();
        for b in &j.brackets {
            if b.i == 0 || b.j == 0 || b.i > d || b.j > d || b.coeffs.len() != d {
                return domain(format!("bracket entry ({}, {}) does not fit dimension {d}", b.i, b.j));
            }
            l.set(b.i - 1, b.j - 1, b.coeffs.clone());
        }
        Ok(l)
    }
}

/// JSON form `{"even_dim": p, "odd_dim": q, "brackets": [{"i", "j", "coeffs"}]}`
/// with 1-based `i`, `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieJson {
    pub even_dim: usize,
    pub odd_dim: usize,
    pub brackets: Vec<BracketJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketJson {
    pub i: usize,
    pub j: usize,
    #[serde(with = "scalar::serde_vec")]
    pub coeffs: Vec<Scalar>,
}

fn is_zero(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn sub(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn signed(neg: bool, v: Vec<Scalar>) -> Vec<Scalar> {
    if neg {
        v.into_iter().map(|x| -x).collect()
    } else {
        v
    }
}

/// `⟦X,⟦Y,Z⟧⟧ − ⟦⟦X,Y⟧,Z⟧ − (−1)^{|X||Y|}⟦Y,⟦X,Z⟧⟧` on basis elements (0-based).
pub fn jacobi_residual(l: &LieSuperData, i: usize, j: usize, k: usize) -> Vec<Scalar> {
    let (x, y, z) = (l.basis(i), l.basis(j), l.basis(k));
    let neg = l.parity(i).koszul(l.parity(j));
    let lhs = l.bracket(&x, &l.bracket(&y, &z));
    let r1 = l.bracket(&l.bracket(&x, &y), &z);
    let r2 = signed(neg, l.bracket(&y, &l.bracket(&x, &z)));
    sub(&lhs, &add(&r1, &r2))
}

/// Checks parity additivity, superalternation and the super-Jacobi identity
/// on all homogeneous basis pairs and triples.
///
/// The check `superalternating` uses `⟦X,Y⟧ = −(−1)^{|X||Y|}⟦Y,X⟧`; the
/// informational check `printed_symmetry` records whether the data instead
/// obeys `⟦X,Y⟧ = (−1)^{|X||Y|}⟦Y,X⟧`. The overall verdict ignores the latter.
pub fn check_lie_superalgebra(l: &LieSuperData) -> Result<Report> {
    l.validate()?;
    let d = l.dim();
    let mut parity_fail = Vec::new();
    let mut alt_fail = Vec::new();
    let mut printed_fail = Vec::new();
    let mut jacobi_fail = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let target = l.parity(i) + l.parity(j);
            if (0..d).any(|k| !l.c[i][j][k].is_zero() && l.parity(k) != target) {
                parity_fail.push(format!("[L{},L{}]", i + 1, j + 1));
            }
            let neg = l.parity(i).koszul(l.parity(j));
            let swapped = &l.c[j][i];
            if !is_zero(&add(&l.c[i][j], &signed(neg, swapped.clone()))) {
                alt_fail.push(format!("(L{},L{})", i + 1, j + 1));
            }
            if !is_zero(&sub(&l.c[i][j], &signed(neg, swapped.clone()))) {
                printed_fail.push(format!("(L{},L{})", i + 1, j + 1));
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                if !is_zero(&jacobi_residual(l, i, j, k)) {
                    jacobi_fail.push(format!("(L{},L{},L{})", i + 1, j + 1, k + 1));
                }
            }
        }
    }
    let mut r = Report::new();
    r.push_failures("jacobi", &jacobi_fail);
    r.push_failures("parity_additive", &parity_fail);
    r.push_failures("superalternating", &alt_fail);
    let n = printed_fail.len();
    r.push(
        "printed_symmetry",
        true,
        if n == 0 { "data also obeys the printed symmetric sign".into() } else { format!("data violates the printed sign on {n} pair(s)") },
    );
    Ok(r)
}

/// A Lie algebra `𝔤`, a representation `ρ` of it on `S` and a symmetric
/// `𝔤`-valued form `B` on `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepAndForm {
    /// Structure constants of `𝔤`: `[X_i, X_j] = Σ_k g[i][j][k] X_k`.
    pub g: Vec<Vec<Vec<Scalar>>>,
    /// `rho[i]` is the matrix of `ρ(X_i)`, rows indexing outputs.
    pub rho: Vec<Matrix>,
    /// `b[a][c]` is the coordinate vector of `B(s_a, s_c)` in `𝔤`.
    pub b: Vec<Vec<Vec<Scalar>>>,
    pub s_dim: usize,
}

impl RepAndForm {
    pub fn g_dim(&self) -> usize {
        self.g.len()
    }

    fn validate(&self) -> Result<()> {
        let p = self.g_dim();
        let q = self.s_dim;
        let g_ok = self.g.iter().all(|r| r.len() == p && r.iter().all(|v| v.len() == p));
        let rho_ok = self.rho.len() == p && self.rho.iter().all(|m| m.len() == q && m.iter().all(|r| r.len() == q));
        let b_ok = self.b.len() == q && self.b.iter().all(|r| r.len() == q && r.iter().all(|v| v.len() == p));
        if !(g_ok && rho_ok && b_ok) {
            return mismatch(format!("representation data shapes do not match dim 𝔤 = {p}, dim S = {q}"));
        }
        Ok(())
    }

    /// `ρ(X)` for a coordinate vector `X` of `𝔤`.
    fn rho_of(&self, x: &[Scalar]) -> Matrix {
        let q = self.s_dim;
        let mut m = linalg::zeros(q, q);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for a in 0..q {
                for c in 0..q {
                    m[a][c] += xi * &self.rho[i][a][c];
                }
            }
        }
        m
    }

    fn g_bracket(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let p = self.g_dim();
        let mut out = vec![Scalar::zero(); p];
        for i in 0..p {
            for j in 0..p {
                let f = &x[i] * &y[j];
                if f.is_zero() {
                    continue;
                }
                for k in 0..p {
                    out[k] += &f * &self.g[i][j][k];
                }
            }
        }
        out
    }

    /// `B(s, t)` for coordinate vectors of `S`.
    fn b_of(&self, s: &[Scalar], t: &[Scalar]) -> Vec<Scalar> {
        let p = self.g_dim();
        let mut out = vec![Scalar::zero(); p];
        for (a, sa) in s.iter().enumerate() {
            for (c, tc) in t.iter().enumerate() {
                let f = sa * tc;
                if f.is_zero() {
                    continue;
                }
                for k in 0..p {
                    out[k] += &f * &self.b[a][c][k];
                }
            }
        }
        out
    }

    fn rep_failures(&self) -> Vec<String> {
        let p = self.g_dim();
        let q = self.s_dim;
        let mut out = Vec::new();
        for i in 0..p {
            for j in 0..p {
                let lhs = self.rho_of(&self.g[i][j]);
                let ab = linalg::matmul(&self.rho[i], &self.rho[j], q);
                let ba = linalg::matmul(&self.rho[j], &self.rho[i], q);
                let comm: Matrix = ab.iter().zip(&ba).map(|(r, s)| sub(r, s)).collect();
                if lhs != comm {
                    out.push(format!("ρ([X{},X{}])", i + 1, j + 1));
                }
            }
        }
        out
    }
}

fn unit(d: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); d];
    v[i] = Scalar::one();
    v
}

/// Assembles `𝔤 ⊕ S` with `⟦X,s⟧ = ρ(X)s`, `⟦s,X⟧ = −ρ(X)s`, `⟦s,t⟧ = B(s,t)`.
pub fn build_from_rho_b(data: &RepAndForm) -> Result<LieSuperData> {
    data.validate()?;
    let fails = data.rep_failures();
    if !fails.is_empty() {
        return Err(Error::Domain(format!("ρ is not a representation: {}", fails.join(", "))));
    }
    let p = data.g_dim();
    let q = data.s_dim;
    let mut l = LieSuperData::abelian(p, q);
    for i in 0..p {
        for j in 0..p {
            let mut v = data.g[i][j].clone();
            v.extend(std::iter::repeat_with(Scalar::zero).take(q));
            l.set(i, j, v);
        }
        for a in 0..q {
            let mut xs = vec![Scalar::zero(); p + q];
            for c in 0..q {
                xs[p + c] = data.rho[i][c][a].clone();
            }
            let sx = xs.iter().map(|v| -v.clone()).collect();
            l.set(i, p + a, xs);
            l.set(p + a, i, sx);
        }
    }
    for a in 0..q {
        for c in 0..q {
            let mut v = data.b[a][c].clone();
            v.extend(std::iter::repeat_with(Scalar::zero).take(q));
            l.set(p + a, p + c, v);
        }
    }
    Ok(l)
}

/// Checks the conditions on `(𝔤, ρ, B)` under which the assembled bracket is a
/// Lie superalgebra.
pub fn check_structure_conditions(data: &RepAndForm) -> Result<Report> {
    data.validate()?;
    let p = data.g_dim();
    let q = data.s_dim;
    let mut r = Report::new();

    let mut lie_fail = Vec::new();
    for i in 0..p {
        for j in 0..p {
            if !is_zero(&add(&data.g[i][j], &data.g[j][i])) {
                lie_fail.push(format!("[X{},X{}] not antisymmetric", i + 1, j + 1));
            }
            for k in 0..p {
                let (x, y, z) = (unit(p, i), unit(p, j), unit(p, k));
                let a = data.g_bracket(&x, &data.g_bracket(&y, &z));
                let b = data.g_bracket(&y, &data.g_bracket(&z, &x));
                let c = data.g_bracket(&z, &data.g_bracket(&x, &y));
                if !is_zero(&add(&add(&a, &b), &c)) {
                    lie_fail.push(format!("Jacobi (X{},X{},X{})", i + 1, j + 1, k + 1));
                }
            }
        }
    }
    r.push_failures("g_is_lie_algebra", &lie_fail);
    r.push_failures("rho_is_representation", &data.rep_failures());

    let mut sym_fail = Vec::new();
    for a in 0..q {
        for c in 0..q {
            if data.b[a][c] != data.b[c][a] {
                sym_fail.push(format!("B(s{},s{})", a + 1, c + 1));
            }
        }
    }
    r.push_failures("b_symmetric", &sym_fail);

    let mut eq_fail = Vec::new();
    for i in 0..p {
        let x = unit(p, i);
        let rho = &data.rho[i];
        for a in 0..q {
            for c in 0..q {
                let (s, t) = (unit(q, a), unit(q, c));
                let lhs = data.g_bracket(&x, &data.b_of(&s, &t));
                let rs = linalg::mat_vec(rho, &s);
                let rt = linalg::mat_vec(rho, &t);
                let rhs = add(&data.b_of(&rs, &t), &data.b_of(&s, &rt));
                if lhs != rhs {
                    eq_fail.push(format!("X{} on (s{},s{})", i + 1, a + 1, c + 1));
                }
            }
        }
    }
    r.push_failures("b_equivariant", &eq_fail);

    let mut sym3_fail = Vec::new();
    for a in 0..q {
        for c in a..q {
            for e in c..q {
                let (s, t, u) = (unit(q, a), unit(q, c), unit(q, e));
                let term = |x: &[Scalar], y: &[Scalar], z: &[Scalar]| linalg::mat_vec(&data.rho_of(&data.b_of(x, y)), z);
                let total = add(&add(&term(&s, &t, &u), &term(&t, &u, &s)), &term(&u, &s, &t));
                if !is_zero(&total) {
                    sym3_fail.push(format!("(s{},s{},s{})", a + 1, c + 1, e + 1));
                }
            }
        }
    }
    r.push_failures("sym3_kernel", &sym3_fail);
    Ok(r)
}

/// Semidirect product `𝔤 ⋉ S` (the form `B` is zero).
pub fn semidirect(g: Vec<Vec<Vec<Scalar>>>, rho: Vec<Matrix>, s_dim: usize) -> Result<LieSuperData> {
    let p = g.len();
    let b = vec![vec![vec![Scalar::zero(); p]; s_dim]; s_dim];
    build_from_rho_b(&RepAndForm { g, rho, b, s_dim })
}

/// `End(ℝ^p|ℝ^q)` with the supercommutator on matrix units `E_ab`, even units
/// first, each group in lexicographic order of `(a, b)`.
pub fn endo_superalgebra(p: usize, q: usize) -> Result<LieSuperData> {
    if p + q == 0 {
        return domain("End(ℝ^0|ℝ^0) is empty");
    }
    let n = p + q;
    let par = |a: usize| if a < p { Parity::Even } else { Parity::Odd };
    let mut evens = Vec::new();
    let mut odds = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if par(a) == par(b) {
                evens.push((a, b));
            } else {
                odds.push((a, b));
            }
        }
    }
    let basis: Vec<(usize, usize)> = evens.iter().chain(&odds).copied().collect();
    let pos = |ab: (usize, usize)| basis.iter().position(|&x| x == ab).expect("basis element");
    let mut l = LieSuperData::abelian(evens.len(), odds.len());
    for (i, &(a, b)) in basis.iter().enumerate() {
        for (j, &(c, e)) in basis.iter().enumerate() {
            let mut v = vec![Scalar::zero(); basis.len()];
            if b == c {
                v[pos((a, e))] += Scalar::one();
            }
            let neg = l.parity(i).koszul(l.parity(j));
            if e == a {
                let k = pos((c, b));
                if neg {
                    v[k] += Scalar::one();
                } else {
                    v[k] -= Scalar::one();
                }
            }
            l.set(i, j, v);
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn ex_rep(rho_val: i64) -> RepAndForm {
        // 𝔤 = ⟨X⟩, S = ⟨s⟩, ρ(X) = rho_val, B(s,s) = X.
        RepAndForm { g: vec![vec![vec![int(0)]]], rho: vec![vec![vec![int(rho_val)]]], b: vec![vec![vec![int(1)]]], s_dim: 1 }
    }

    #[test]
    fn abelian_passes() {
        assert!(check_lie_superalgebra(&LieSuperData::abelian(2, 2)).unwrap().passed());
    }

    #[test]
    fn one_one_examples() {
        let good = build_from_rho_b(&ex_rep(0)).unwrap();
        assert!(check_lie_superalgebra(&good).unwrap().passed());
        assert!(check_structure_conditions(&ex_rep(0)).unwrap().passed());
        let bad = build_from_rho_b(&ex_rep(1)).unwrap();
        let rep = check_lie_superalgebra(&bad).unwrap();
        assert_eq!(rep.get("jacobi"), Some(false));
        assert!(!is_zero(&jacobi_residual(&bad, 1, 1, 1)));
        assert!(!check_structure_conditions(&ex_rep(1)).unwrap().passed());
    }

    #[test]
    fn so2_on_plane() {
        let data = RepAndForm {
            g: vec![vec![vec![int(0)]]],
            rho: vec![vec![vec![int(0), int(-1)], vec![int(1), int(0)]]],
            b: vec![vec![vec![int(0)]; 2]; 2],
            s_dim: 2,
        };
        assert!(check_structure_conditions(&data).unwrap().passed());
        assert!(check_lie_superalgebra(&build_from_rho_b(&data).unwrap()).unwrap().passed());
    }

    #[test]
    fn semidirect_examples() {
        let abel = semidirect(vec![vec![vec![int(0)]]], vec![vec![vec![int(0)]]], 1).unwrap();
        assert_eq!(abel, LieSuperData::abelian(1, 1));
        let gl1 = semidirect(vec![vec![vec![int(0)]]], vec![vec![vec![int(1)]]], 1).unwrap();
        assert!(check_lie_superalgebra(&gl1).unwrap().passed());
        let z = || vec![vec![int(0); 2]; 2];
        let nil = vec![vec![int(0), int(1)], vec![int(0), int(0)]];
        let heis = semidirect(vec![vec![vec![int(0); 2]; 2]; 2], vec![nil.clone(), z()], 2).unwrap();
        assert!(check_lie_superalgebra(&heis).unwrap().passed());
        let bad_rho = vec![nil.clone(), linalg::transpose(&nil, 2)];
        assert!(semidirect(vec![vec![vec![int(0); 2]; 2]; 2], bad_rho, 2).is_err());
    }

    #[test]
    fn endo_examples() {
        let e = endo_superalgebra(1, 0).unwrap();
        assert_eq!(e, LieSuperData::abelian(1, 0));
        let e = endo_superalgebra(1, 1).unwrap();
        assert_eq!((e.even_dim, e.odd_dim), (2, 2));
        // Basis: E11, E22, E12, E21.
        let odd12 = unit(4, 2);
        let odd21 = unit(4, 3);
        assert_eq!(e.bracket(&odd12, &odd21), vec![int(1), int(1), int(0), int(0)]);
        assert!(check_lie_superalgebra(&e).unwrap().passed());
        let e = endo_superalgebra(2, 1).unwrap();
        assert_eq!(e.dim(), 9);
        assert!(check_lie_superalgebra(&e).unwrap().passed());
        assert!(endo_superalgebra(0, 0).is_err());
    }

    #[test]
    fn even_part_is_lie_algebra() {
        let e = endo_superalgebra(2, 2).unwrap();
        let rep = check_lie_superalgebra(&e).unwrap();
        assert!(rep.passed());
        let rep_printed = rep.checks.iter().find(|c| c.name == "printed_symmetry").unwrap();
        assert!(rep_printed.detail.contains("violates"));
    }

    #[test]
    fn json_roundtrip() {
        let e = endo_superalgebra(1, 1).unwrap();
        let text = serde_json::to_string(&e.to_json()).unwrap();
        let back: LieJson = serde_json::from_str(&text).unwrap();
        assert_eq!(LieSuperData::from_json(&back).unwrap(), e);
    }
}
