//! Supertensor words, twisted symmetric group actions and the normal forms
//! of the supersymmetric and superexterior algebras.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, mismatch, Result};
use crate::index::{relative_signature_odd, IndexSet, MultiDegree, Parity, Permutation};
use crate::lin::{self, Terms};
use crate::scalar::{self, Scalar};

/// Supervector space `(V₀|V₁)` with even generators `e1…` and odd generators `o1…`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SuperSpace {
    pub even_dim: usize,
    pub odd_dim: usize,
}

impl SuperSpace {
    pub fn new(even_dim: usize, odd_dim: usize) -> SuperSpace {
        SuperSpace { even_dim, odd_dim }
    }

    /// All generators, evens first.
    pub fn generators(&self) -> Vec<Gen> {
        (1..=self.even_dim)
            .map(Gen::even)
            .chain((1..=self.odd_dim).map(Gen::odd))
            .collect()
    }

    fn contains(&self, g: Gen) -> bool {
        let bound = match g.parity {
            Parity::Even => self.even_dim,
            Parity::Odd => self.odd_dim,
        };
        g.index >= 1 && g.index <= bound
    }
}

/// A basis generator: its parity and 1-based index within that parity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Gen {
    pub parity: Parity,
    pub index: usize,
}

impl Gen {
    pub fn even(index: usize) -> Gen {
        Gen { parity: Parity::Even, index }
    }

    pub fn odd(index: usize) -> Gen {
        Gen { parity: Parity::Odd, index }
    }
}

impl fmt::Debug for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.parity {
            Parity::Even => write!(f, "e{}", self.index),
            Parity::Odd => write!(f, "o{}", self.index),
        }
    }
}

/// A coefficient times a tensor product of generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorWord {
    pub space: SuperSpace,
    pub factors: Vec<Gen>,
    pub coeff: Scalar,
}

impl TensorWord {
    pub fn new(space: SuperSpace, factors: Vec<Gen>, coeff: Scalar) -> Result<TensorWord> {
        if let Some(g) = factors.iter().find(|g| !space.contains(**g)) {
            return domain(format!("generator {g:?} not in space {space:?}"));
        }
        Ok(TensorWord { space, factors, coeff })
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// 1-based positions of factors of parity `p`.
    pub fn positions(&self, p: Parity) -> Vec<usize> {
        (1..=self.rank()).filter(|&i| self.factors[i - 1].parity == p).collect()
    }

    /// Places factor `i` at slot `σ(i)`.
    fn permuted(&self, sigma: &Permutation) -> Vec<Gen> {
        let mut out = self.factors.clone();
        for (i, g) in self.factors.iter().enumerate() {
            out[sigma.apply(i + 1) - 1] = *g;
        }
        out
    }

    fn check_rank(&self, sigma: &Permutation) -> Result<()> {
        if sigma.len() != self.rank() {
            return domain(format!("permutation of {} letters on a word of rank {}", sigma.len(), self.rank()));
        }
        Ok(())
    }
}

/// Relative signature of `σ` on the odd positions of the word.
pub fn odd_signature(sigma: &Permutation, word: &TensorWord) -> Result<Scalar> {
    word.check_rank(sigma)?;
    Ok(scalar::sign(relative_signature_odd(sigma, &word.positions(Parity::Odd))?))
}

/// Symmetric twisted action: permute factors and multiply by the odd signature.
pub fn act_sym(sigma: &Permutation, word: &TensorWord) -> Result<TensorWord> {
    let s = odd_signature(sigma, word)?;
    Ok(TensorWord { space: word.space, factors: word.permuted(sigma), coeff: &word.coeff * s })
}

/// Alternating twisted action: permute factors and multiply by the relative
/// signature on the even positions.
///
/// This differs from `sgn⁻σ · sgn σ` by the sign of the even/odd crossings;
/// only this form is compatible with [`normalize_superext`], in which even and
/// odd generators commute.
pub fn act_alt(sigma: &Permutation, word: &TensorWord) -> Result<TensorWord> {
    word.check_rank(sigma)?;
    let neg = relative_signature_odd(sigma, &word.positions(Parity::Even))?;
    Ok(TensorWord { space: word.space, factors: word.permuted(sigma), coeff: &word.coeff * scalar::sign(neg) })
}

/// The sign `sgn⁻σ · sgn σ` as printed for the alternating action.
pub fn printed_alt_sign(sigma: &Permutation, word: &TensorWord) -> Result<Scalar> {
    Ok(odd_signature(sigma, word)? * scalar::sign(sigma.is_odd()))
}

/// Element of `Sym V₀ ⊗ Λ V₁`.
#[derive(Clone, PartialEq, Eq)]
pub struct SuperSymElem {
    pub space: SuperSpace,
    pub terms: Terms<(MultiDegree, IndexSet)>,
}

/// Element of `Λ V₀ ⊗ Sym V₁`.
#[derive(Clone, PartialEq, Eq)]
pub struct SuperExtElem {
    pub space: SuperSpace,
    pub terms: Terms<(IndexSet, MultiDegree)>,
}

/// Separates a word into its even and odd index sequences.
fn split(word: &TensorWord) -> (Vec<usize>, Vec<usize>) {
    let even = word.factors.iter().filter(|g| g.parity == Parity::Even).map(|g| g.index).collect();
    let odd = word.factors.iter().filter(|g| g.parity == Parity::Odd).map(|g| g.index).collect();
    (even, odd)
}

fn multidegree(vars: usize, indices: &[usize]) -> MultiDegree {
    let mut e = MultiDegree::zero(vars);
    for &i in indices {
        e.0[i - 1] += 1;
    }
    e
}

/// Normal form in `Sym V₀ ⊗ Λ V₁`: evens commute with everything, odds
/// anticommute among themselves and square to zero.
pub fn normalize_supersym(word: &TensorWord) -> SuperSymElem {
    let (even, odd) = split(word);
    let mut terms = Terms::new();
    if let Some((set, neg)) = IndexSet::from_unsorted(&odd) {
        let c = if neg { -word.coeff.clone() } else { word.coeff.clone() };
        lin::add_term(&mut terms, (multidegree(word.space.even_dim, &even), set), c);
    }
    SuperSymElem { space: word.space, terms }
}

/// Normal form in `Λ V₀ ⊗ Sym V₁`: evens anticommute among themselves and
/// square to zero, odds commute with everything.
pub fn normalize_superext(word: &TensorWord) -> SuperExtElem {
    let (even, odd) = split(word);
    let mut terms = Terms::new();
    if let Some((set, neg)) = IndexSet::from_unsorted(&even) {
        let c = if neg { -word.coeff.clone() } else { word.coeff.clone() };
        lin::add_term(&mut terms, (set, multidegree(word.space.odd_dim, &odd)), c);
    }
    SuperExtElem { space: word.space, terms }
}

/// Homogeneous vector of `(V|S)` for insertion: coordinates on the even and
/// on the odd generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperVector {
    pub even: Vec<Scalar>,
    pub odd: Vec<Scalar>,
}

impl SuperVector {
    /// Parity when homogeneous; `None` for a mixed vector. Zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let has_even = self.even.iter().any(|c| !c.is_zero());
        let has_odd = self.odd.iter().any(|c| !c.is_zero());
        match (has_even, has_odd) {
            (true, true) => None,
            (false, true) => Some(Parity::Odd),
            _ => Some(Parity::Even),
        }
    }
}

impl SuperExtElem {
    pub fn zero(space: SuperSpace) -> SuperExtElem {
        SuperExtElem { space, terms: Terms::new() }
    }

    pub fn monomial(space: SuperSpace, ext: IndexSet, sym: MultiDegree, c: Scalar) -> SuperExtElem {
        let mut terms = Terms::new();
        lin::add_term(&mut terms, (ext, sym), c);
        SuperExtElem { space, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &SuperExtElem) -> Result<SuperExtElem> {
        if self.space != other.space {
            return mismatch("superexterior spaces differ");
        }
        Ok(SuperExtElem { space: self.space, terms: lin::add(&self.terms, &other.terms) })
    }

    pub fn scale(&self, f: &Scalar) -> SuperExtElem {
        SuperExtElem { space: self.space, terms: lin::scale(&self.terms, f) }
    }

    /// Parity of the Λ-factor when homogeneous; zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|(e, _)| Parity::of(e.len()));
        let Some(first) = it.next() else { return Some(Parity::Even) };
        it.all(|p| p == first).then_some(first)
    }

    /// Product: concatenate and normalize.
    pub fn super_wedge(&self, other: &SuperExtElem) -> Result<SuperExtElem> {
        if self.space != other.space {
            return mismatch("superexterior spaces differ");
        }
        let mut terms = Terms::new();
        for ((e1, s1), c1) in &self.terms {
            for ((e2, s2), c2) in &other.terms {
                if let Some(neg) = e1.wedge_sign(*e2) {
                    let c = c1 * c2;
                    lin::add_term(&mut terms, (e1.union(*e2), s1.add(s2)), if neg { -c } else { c });
                }
            }
        }
        Ok(SuperExtElem { space: self.space, terms })
    }

    /// Insertion of a homogeneous vector: an even vector contracts the
    /// Λ-factor, an odd vector differentiates the Sym factor.
    pub fn super_insert(&self, x: &SuperVector) -> Result<SuperExtElem> {
        if x.even.len() != self.space.even_dim || x.odd.len() != self.space.odd_dim {
            return mismatch("vector shape does not match the superspace");
        }
        let Some(parity) = x.parity() else {
            return domain("insertion of a non-homogeneous vector");
        };
        let mut terms = Terms::new();
        for ((e, s), c) in &self.terms {
            match parity {
                Parity::Even => {
                    for (mu, xm) in x.even.iter().enumerate() {
                        let mu = mu + 1;
                        if xm.is_zero() || !e.contains(mu) {
                            continue;
                        }
                        let neg = e.count_below(mu) % 2 == 1;
                        let v = c * xm;
                        lin::add_term(&mut terms, (e.difference(IndexSet::singleton(mu)), s.clone()), if neg { -v } else { v });
                    }
                }
                Parity::Odd => {
                    for (j, xj) in x.odd.iter().enumerate() {
                        let j = j + 1;
                        if xj.is_zero() {
                            continue;
                        }
                        if let Some(lower) = s.dec(j) {
                            let v = c * xj * scalar::int(s.get(j) as i64);
                            lin::add_term(&mut terms, (*e, lower), v);
                        }
                    }
                }
            }
        }
        Ok(SuperExtElem { space: self.space, terms })
    }

    pub fn to_json(&self) -> Vec<SuperMonomial> {
        self.terms
            .iter()
            .map(|((e, s), c)| SuperMonomial { coeff: c.clone(), even: e.to_vec(), odd: multiset(s) })
            .collect()
    }
}

impl SuperSymElem {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_json(&self) -> Vec<SuperMonomial> {
        self.terms
            .iter()
            .map(|((s, o), c)| SuperMonomial { coeff: c.clone(), even: multiset(s), odd: o.to_vec() })
            .collect()
    }
}

impl fmt::Debug for SuperSymElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_json())
    }
}

impl fmt::Debug for SuperExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_json())
    }
}

fn multiset(m: &MultiDegree) -> Vec<usize> {
    m.0.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat(i + 1).take(e as usize)).collect()
}

/// JSON monomial `{"coeff": "p/q", "even": [...], "odd": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperMonomial {
    #[serde(with = "scalar::serde_str")]
    pub coeff: Scalar,
    pub even: Vec<usize>,
    pub odd: Vec<usize>,
}

/// All words of rank `k` over the generators of `space`, coefficient one.
pub fn all_words(space: SuperSpace, k: usize) -> Vec<TensorWord> {
    let gens = space.generators();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    if gens.is_empty() {
        if k == 0 {
            out.push(TensorWord { space, factors: vec![], coeff: Scalar::one() });
        }
        return out;
    }
    loop {
        out.push(TensorWord { space, factors: idx.iter().map(|&i| gens[i]).collect(), coeff: Scalar::one() });
        let mut p = 0;
        loop {
            if p == k {
                return out;
            }
            idx[p] += 1;
            if idx[p] < gens.len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

/// Number of distinct nonzero supersymmetric normal forms of rank `k`.
pub fn supersym_normal_form_count(space: SuperSpace, k: usize) -> usize {
    let keys: std::collections::BTreeSet<_> =
        all_words(space, k).iter().flat_map(|w| normalize_supersym(w).terms.into_keys()).collect();
    keys.len()
}

/// Number of distinct nonzero superexterior normal forms of rank `k`.
pub fn superext_normal_form_count(space: SuperSpace, k: usize) -> usize {
    let keys: std::collections::BTreeSet<_> =
        all_words(space, k).iter().flat_map(|w| normalize_superext(w).terms.into_keys()).collect();
    keys.len()
}

/// `Σ_{a+b=k} C(p+a−1, a)·C(q, b)` for `Sym^k(V₀|V₁)`.
pub fn supersym_dimension(space: SuperSpace, k: usize) -> u64 {
    let (p, q) = (space.even_dim as u64, space.odd_dim as u64);
    (0..=k as u64).map(|a| sym_dim(p, a) * scalar::binomial(q, k as u64 - a)).sum()
}

/// `Σ_{a+b=k} C(p, a)·C(q+b−1, b)` for `Λ^k(V₀|V₁)`.
pub fn superext_dimension(space: SuperSpace, k: usize) -> u64 {
    let (p, q) = (space.even_dim as u64, space.odd_dim as u64);
    (0..=k as u64).map(|a| scalar::binomial(p, a) * sym_dim(q, k as u64 - a)).sum()
}

/// `dim Sym^k` of an `n`-dimensional space.
pub fn sym_dim(n: u64, k: u64) -> u64 {
    if n == 0 {
        return u64::from(k == 0);
    }
    scalar::binomial(n + k - 1, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use proptest::prelude::*;

    fn word(space: SuperSpace, f: &[Gen]) -> TensorWord {
        TensorWord::new(space, f.to_vec(), int(1)).unwrap()
    }

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    const S: SuperSpace = SuperSpace { even_dim: 2, odd_dim: 2 };

    #[test]
    fn odd_signature_examples() {
        let sw = perm(&[2, 1]);
        assert_eq!(odd_signature(&sw, &word(S, &[Gen::even(1), Gen::even(2)])).unwrap(), int(1));
        assert_eq!(odd_signature(&sw, &word(S, &[Gen::odd(1), Gen::odd(2)])).unwrap(), int(-1));
        assert_eq!(odd_signature(&sw, &word(S, &[Gen::even(1), Gen::odd(1)])).unwrap(), int(1));
        assert!(odd_signature(&Permutation::identity(3), &word(S, &[Gen::odd(1)])).is_err());
    }

    #[test]
    fn action_examples() {
        let sw = perm(&[2, 1]);
        let oo = word(S, &[Gen::odd(1), Gen::odd(2)]);
        let ee = word(S, &[Gen::even(1), Gen::even(2)]);
        assert_eq!(act_sym(&Permutation::identity(2), &oo).unwrap(), oo);
        let r = act_sym(&sw, &oo).unwrap();
        assert_eq!((r.factors.clone(), r.coeff), (vec![Gen::odd(2), Gen::odd(1)], int(-1)));
        let r = act_sym(&sw, &ee).unwrap();
        assert_eq!((r.factors.clone(), r.coeff), (vec![Gen::even(2), Gen::even(1)], int(1)));
        assert_eq!(act_alt(&Permutation::identity(2), &oo).unwrap(), oo);
        assert_eq!(act_alt(&sw, &oo).unwrap().coeff, int(1));
        assert_eq!(act_alt(&sw, &ee).unwrap().coeff, int(-1));
        assert_eq!(printed_alt_sign(&sw, &oo).unwrap(), int(1));
        assert_eq!(printed_alt_sign(&sw, &ee).unwrap(), int(-1));
    }

    #[test]
    fn normal_form_examples() {
        let s = SuperSpace::new(1, 2);
        let n = normalize_supersym(&word(s, &[Gen::odd(1), Gen::even(1)]));
        assert_eq!(n.terms.into_iter().collect::<Vec<_>>(), vec![((MultiDegree(vec![1]), IndexSet::new(&[1]).unwrap()), int(1))]);
        let n = normalize_supersym(&word(s, &[Gen::odd(2), Gen::odd(1)]));
        assert_eq!(n.terms.into_iter().collect::<Vec<_>>(), vec![((MultiDegree(vec![0]), IndexSet::new(&[1, 2]).unwrap()), int(-1))]);
        assert!(normalize_supersym(&word(s, &[Gen::odd(1), Gen::odd(1)])).is_zero());
        let s = SuperSpace::new(2, 2);
        assert!(normalize_superext(&word(s, &[Gen::even(1), Gen::even(1)])).is_zero());
        let n = normalize_superext(&word(s, &[Gen::odd(2), Gen::odd(1)]));
        assert_eq!(n.terms.into_iter().collect::<Vec<_>>(), vec![((IndexSet::EMPTY, MultiDegree(vec![1, 1])), int(1))]);
        let n = normalize_superext(&word(s, &[Gen::even(2), Gen::even(1)]));
        assert_eq!(n.terms.into_iter().collect::<Vec<_>>(), vec![((IndexSet::new(&[1, 2]).unwrap(), MultiDegree(vec![0, 0])), int(-1))]);
    }

    fn ext(s: SuperSpace, e: &[usize], o: &[u32], c: i64) -> SuperExtElem {
        SuperExtElem::monomial(s, IndexSet::new(e).unwrap(), MultiDegree(o.to_vec()), int(c))
    }

    #[test]
    fn wedge_and_insert_examples() {
        let s = SuperSpace::new(2, 1);
        assert_eq!(ext(s, &[1], &[0], 1).super_wedge(&ext(s, &[2], &[0], 1)).unwrap(), ext(s, &[1, 2], &[0], 1));
        assert_eq!(ext(s, &[1], &[1], 1).super_wedge(&ext(s, &[], &[1], 1)).unwrap(), ext(s, &[1], &[2], 1));
        assert!(ext(s, &[1], &[0], 1).super_wedge(&ext(s, &[1], &[0], 1)).unwrap().is_zero());

        let v1 = SuperVector { even: vec![int(1), int(0)], odd: vec![int(0)] };
        let s1 = SuperVector { even: vec![int(0), int(0)], odd: vec![int(1)] };
        assert_eq!(ext(s, &[1, 2], &[0], 1).super_insert(&v1).unwrap(), ext(s, &[2], &[0], 1));
        assert_eq!(ext(s, &[], &[2], 1).super_insert(&s1).unwrap(), ext(s, &[], &[1], 2));
        assert!(ext(s, &[], &[0], 1).super_insert(&s1).unwrap().is_zero());
        let mixed = SuperVector { even: vec![int(1), int(0)], odd: vec![int(1)] };
        assert!(ext(s, &[1], &[0], 1).super_insert(&mixed).is_err());
    }

    #[test]
    fn normal_form_dimensions() {
        for p in 0..=3 {
            for q in 0..=3 {
                let s = SuperSpace::new(p, q);
                for k in 0..=4 {
                    if (p + q) == 0 && k > 0 {
                        continue;
                    }
                    assert_eq!(supersym_normal_form_count(s, k) as u64, supersym_dimension(s, k), "sym {p}|{q} k={k}");
                    assert_eq!(superext_normal_form_count(s, k) as u64, superext_dimension(s, k), "ext {p}|{q} k={k}");
                }
            }
        }
    }

    #[test]
    fn actions_descend_to_quotients() {
        let s = SuperSpace::new(2, 2);
        for k in 0..=3 {
            let perms = Permutation::all(k);
            for w in all_words(s, k) {
                let ns = normalize_supersym(&w);
                let ne = normalize_superext(&w);
                for sigma in &perms {
                    assert_eq!(normalize_supersym(&act_sym(sigma, &w).unwrap()), ns);
                    assert_eq!(normalize_superext(&act_alt(sigma, &w).unwrap()), ne);
                }
            }
        }
    }

    #[test]
    fn printed_alt_sign_fails_on_mixed_swap() {
        let w = word(S, &[Gen::even(1), Gen::odd(1)]);
        let sw = perm(&[2, 1]);
        assert_eq!(act_alt(&sw, &w).unwrap().coeff, int(1));
        assert_eq!(printed_alt_sign(&sw, &w).unwrap(), int(-1));
    }

    fn arb_word(k: usize) -> impl Strategy<Value = TensorWord> {
        proptest::collection::vec((any::<bool>(), 1..=2usize), k).prop_map(|v| {
            let f = v.into_iter().map(|(odd, i)| if odd { Gen::odd(i) } else { Gen::even(i) }).collect();
            TensorWord::new(S, f, int(1)).unwrap()
        })
    }

    fn arb_perm(k: usize) -> impl Strategy<Value = Permutation> {
        Just((1..=k).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Permutation::new(v).unwrap())
    }

    fn arb_ext_elem() -> impl Strategy<Value = SuperExtElem> {
        proptest::collection::vec((0u64..4, 0u32..3, 0u32..3, -3i64..=3), 0..4).prop_map(|v| {
            let mut e = SuperExtElem::zero(S);
            for (m, a, b, c) in v {
                e = e.add(&SuperExtElem::monomial(S, IndexSet::from_mask(m), MultiDegree(vec![a, b]), int(c))).unwrap();
            }
            e
        })
    }

    fn parity_part(a: &SuperExtElem, p: Parity) -> SuperExtElem {
        SuperExtElem { space: a.space, terms: a.terms.iter().filter(|((e, _), _)| Parity::of(e.len()) == p).map(|(k, v)| (k.clone(), v.clone())).collect() }
    }

    proptest! {
        #[test]
        fn actions_are_group_actions((w, s, t) in (1..=5usize).prop_flat_map(|k| (arb_word(k), arb_perm(k), arb_perm(k)))) {
            let st = s.compose(&t);
            prop_assert_eq!(act_sym(&st, &w).unwrap(), act_sym(&s, &act_sym(&t, &w).unwrap()).unwrap());
            prop_assert_eq!(act_alt(&st, &w).unwrap(), act_alt(&s, &act_alt(&t, &w).unwrap()).unwrap());
        }

        #[test]
        fn rule_of_signs(a in arb_ext_elem(), b in arb_ext_elem(), ap in any::<bool>(), odd_x in any::<bool>(), i in 1..=2usize) {
            // T = x⌟ is an odd operator for even x and even for odd x.
            let a = parity_part(&a, if ap { Parity::Odd } else { Parity::Even });
            let x = if odd_x {
                let mut o = vec![int(0), int(0)]; o[i - 1] = int(1);
                SuperVector { even: vec![int(0), int(0)], odd: o }
            } else {
                let mut e = vec![int(0), int(0)]; e[i - 1] = int(1);
                SuperVector { even: e, odd: vec![int(0), int(0)] }
            };
            let t_parity = if odd_x { Parity::Even } else { Parity::Odd };
            let a_par = if ap { Parity::Odd } else { Parity::Even };
            let lhs = a.super_wedge(&b).unwrap().super_insert(&x).unwrap();
            let rhs = a.super_insert(&x).unwrap().super_wedge(&b).unwrap()
                .add(&a.super_wedge(&b.super_insert(&x).unwrap()).unwrap().scale(&scalar::sign(a_par.koszul(t_parity)))).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
