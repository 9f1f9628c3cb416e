//! Parities, ordered index sets, multidegrees and permutation signs.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{self, Scalar};

/// Largest supported basis size for [`IndexSet`].
pub const MAX_DIM: usize = 62;

/// Element of the two-element group of parities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Parity of an integer degree.
    pub fn of(degree: usize) -> Parity {
        if degree % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// 0 for even, 1 for odd.
    pub fn bit(self) -> usize {
        self as usize
    }

    /// True when the Koszul sign `(-1)^{|self||other|}` is negative.
    pub fn koszul(self, other: Parity) -> bool {
        self.is_odd() && other.is_odd()
    }
}

impl std::ops::Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Strictly increasing set of 1-based basis indices, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(u64);

impl IndexSet {
    /// The empty set.
    pub const EMPTY: IndexSet = IndexSet(0);

    /// Builds a set from strictly increasing indices in `1..=MAX_DIM`.
    pub fn new(indices: &[usize]) -> Result<IndexSet> {
        let mut mask = 0u64;
        let mut prev = 0usize;
        for &i in indices {
            if i == 0 || i > MAX_DIM {
                return domain(format!("index {i} outside 1..={MAX_DIM}"));
            }
            if i <= prev {
                return domain(format!("indices {indices:?} not strictly increasing"));
            }
            prev = i;
            mask |= 1 << (i - 1);
        }
        Ok(IndexSet(mask))
    }

    /// Builds a set from arbitrary distinct indices, returning the set and
    /// whether sorting them needed an odd number of transpositions.
    /// Returns `None` when an index repeats.
    pub fn from_unsorted(indices: &[usize]) -> Option<(IndexSet, bool)> {
        let mut mask = 0u64;
        let mut negative = false;
        for &i in indices {
            let bit = 1u64 << (i - 1);
            if mask & bit != 0 {
                return None;
            }
            negative ^= (mask >> i).count_ones() % 2 == 1;
            mask |= bit;
        }
        Some((IndexSet(mask), negative))
    }

    pub fn from_mask(mask: u64) -> IndexSet {
        IndexSet(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn singleton(i: usize) -> IndexSet {
        debug_assert!((1..=MAX_DIM).contains(&i));
        IndexSet(1 << (i - 1))
    }

    /// The full set `{1..n}`.
    pub fn full(n: usize) -> IndexSet {
        if n == 64 {
            IndexSet(u64::MAX)
        } else {
            IndexSet((1u64 << n) - 1)
        }
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i >= 1 && i <= 64 && self.0 & (1 << (i - 1)) != 0
    }

    /// Largest index, or 0 for the empty set.
    pub fn max_index(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let t = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(t + 1)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & other.0)
    }

    pub fn difference(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: IndexSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: IndexSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Number of elements strictly smaller than `i`.
    pub fn count_below(self, i: usize) -> usize {
        (self.0 & ((1u64 << (i - 1)) - 1)).count_ones() as usize
    }

    /// Sign of `e_self ∧ e_other` relative to `e_{self ∪ other}`:
    /// `None` if the sets meet, otherwise `Some(negative)` where the inversion
    /// count is #{(i, j) : i in self, j in other, i > j}.
    pub fn wedge_sign(self, other: IndexSet) -> Option<bool> {
        if !self.is_disjoint(other) {
            return None;
        }
        let mut inv = 0u32;
        for j in other.iter() {
            inv += (self.0 >> j).count_ones();
        }
        Some(inv % 2 == 1)
    }

    /// All subsets of `{1..n}` of cardinality `k`, in lexicographic order.
    pub fn subsets(n: usize, k: usize) -> Vec<IndexSet> {
        let mut out = Vec::new();
        if k > n {
            return out;
        }
        let mut cur: Vec<usize> = (1..=k).collect();
        loop {
            out.push(IndexSet::new(&cur).expect("valid combination"));
            let mut i = k;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < n - (k - 1 - i) {
                    cur[i] += 1;
                    for j in i + 1..k {
                        cur[j] = cur[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// All subsets of `{1..n}` ordered by cardinality then lexicographically.
    pub fn all_subsets(n: usize) -> Vec<IndexSet> {
        (0..=n).flat_map(|k| IndexSet::subsets(n, k)).collect()
    }
}

impl Ord for IndexSet {
    /// Cardinality first, then lexicographic order of the sorted indices.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.len().cmp(&other.len()) {
            Ordering::Equal => {}
            o => return o,
        }
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let low = diff & diff.wrapping_neg();
        if self.0 & low != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_vec())
    }
}

impl Serialize for IndexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        IndexSet::new(&v).map_err(serde::de::Error::custom)
    }
}

/// Exponent vector of a monomial; one entry per generator.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiDegree(pub Vec<u32>);

impl MultiDegree {
    pub fn zero(vars: usize) -> MultiDegree {
        MultiDegree(vec![0; vars])
    }

    /// The exponent vector of the `i`-th generator (1-based).
    pub fn unit(vars: usize, i: usize) -> MultiDegree {
        let mut e = vec![0; vars];
        e[i - 1] = 1;
        MultiDegree(e)
    }

    pub fn vars(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Exponent of the `i`-th generator (1-based).
    pub fn get(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    pub fn add(&self, other: &MultiDegree) -> MultiDegree {
        MultiDegree(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference, or `None` if some entry would go negative.
    pub fn sub(&self, other: &MultiDegree) -> Option<MultiDegree> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiDegree(out))
    }

    /// Raise the exponent of generator `i` (1-based) by one.
    pub fn inc(&self, i: usize) -> MultiDegree {
        let mut e = self.0.clone();
        e[i - 1] += 1;
        MultiDegree(e)
    }

    /// Lower the exponent of generator `i` (1-based) by one, if positive.
    pub fn dec(&self, i: usize) -> Option<MultiDegree> {
        if self.0[i - 1] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[i - 1] -= 1;
        Some(MultiDegree(e))
    }

    /// `α!` = product of factorials of the exponents.
    pub fn factorial(&self) -> Scalar {
        self.0
            .iter()
            .map(|&e| scalar::factorial(e))
            .fold(scalar::int(1), |a, b| a * b)
    }

    /// True when `self ≤ other` componentwise.
    pub fn divides(&self, other: &MultiDegree) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// All exponent vectors in `vars` variables of total degree exactly `d`,
    /// in graded-lexicographic order.
    pub fn of_degree(vars: usize, d: u32) -> Vec<MultiDegree> {
        fn rec(vars: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiDegree>) {
            if prefix.len() + 1 == vars {
                prefix.push(d);
                out.push(MultiDegree(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in (0..=d).rev() {
                prefix.push(e);
                rec(vars, d - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if vars == 0 {
            if d == 0 {
                out.push(MultiDegree(vec![]));
            }
            return out;
        }
        rec(vars, d, &mut Vec::new(), &mut out);
        out
    }

    /// All exponent vectors of total degree at most `d`, graded order.
    pub fn up_to_degree(vars: usize, d: u32) -> Vec<MultiDegree> {
        (0..=d).flat_map(|k| MultiDegree::of_degree(vars, k)).collect()
    }
}

impl Ord for MultiDegree {
    /// Graded lexicographic: total degree first, then a larger exponent of
    /// an earlier generator comes first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiDegree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Bijection of `{1..k}` given by its images `(σ(1), …, σ(k))`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Validates that `images` is a permutation of `1..=k`.
    pub fn new(images: Vec<usize>) -> Result<Permutation> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &i in &images {
            if i == 0 || i > k || seen[i - 1] {
                return domain(format!("{images:?} is not a permutation of 1..={k}"));
            }
            seen[i - 1] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(k: usize) -> Permutation {
        Permutation((1..=k).collect())
    }

    /// The transposition of `i` and `j` in `S_k`.
    pub fn transposition(k: usize, i: usize, j: usize) -> Permutation {
        let mut v: Vec<usize> = (1..=k).collect();
        v.swap(i - 1, j - 1);
        Permutation(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `σ(i)` for 1-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    /// The composite `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "composing permutations of different size");
        Permutation(other.0.iter().map(|&i| self.0[i - 1]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &s) in self.0.iter().enumerate() {
            inv[s - 1] = i + 1;
        }
        Permutation(inv)
    }

    /// True when the inversion count is odd.
    pub fn is_odd(&self) -> bool {
        inversions_odd(&self.0)
    }

    /// All permutations of `1..=k` in lexicographic order.
    pub fn all(k: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (1..=k).collect();
        loop {
            out.push(Permutation(cur.clone()));
            let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                return out;
            };
            let j = (i + 1..k).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ{:?}", self.0)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Permutation::new(v).map_err(serde::de::Error::custom)
    }
}

/// True when the sequence has an odd number of inversions.
pub fn inversions_odd<T: Ord>(seq: &[T]) -> bool {
    let mut inv = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

/// The sign `(-1)^{inversions}` of `sigma` as a scalar.
pub fn signature(sigma: &Permutation) -> Scalar {
    scalar::sign(sigma.is_odd())
}

/// Sign of sorting `(σ(a_1), …, σ(a_r))` for the increasing enumeration of `a`.
pub fn relative_signature(sigma: &Permutation, a: &[usize]) -> Result<Scalar> {
    Ok(scalar::sign(relative_signature_odd(sigma, a)?))
}

/// Boolean form of [`relative_signature`]: true when the sign is `-1`.
pub fn relative_signature_odd(sigma: &Permutation, a: &[usize]) -> Result<bool> {
    let k = sigma.len();
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&bad) = sorted.iter().find(|&&i| i == 0 || i > k) {
        return domain(format!("index {bad} outside 1..={k}"));
    }
    let images: Vec<usize> = sorted.iter().map(|&i| sigma.apply(i)).collect();
    Ok(inversions_odd(&images))
}

/// Splits `sigma` as `shuffle ∘ tau` with `tau ∈ S_B × S_C` and the shuffle
/// monotone on `B` and on `C`. Returns `(tau, shuffle)`.
pub fn shuffle_representative(
    sigma: &Permutation,
    b: &[usize],
    c: &[usize],
) -> Result<(Permutation, Permutation)> {
    let k = sigma.len();
    let mut seen = vec![false; k];
    for &i in b.iter().chain(c) {
        if i == 0 || i > k || seen[i - 1] {
            return domain(format!("{b:?} and {c:?} do not partition 1..={k}"));
        }
        seen[i - 1] = true;
    }
    if seen.iter().any(|s| !s) {
        return domain(format!("{b:?} and {c:?} do not partition 1..={k}"));
    }
    let mut tau = vec![0usize; k];
    for block in [b, c] {
        let mut pos = block.to_vec();
        pos.sort_unstable();
        let mut by_image = pos.clone();
        by_image.sort_by_key(|&i| sigma.apply(i));
        // tau sends the block element with the j-th smallest image to pos[j].
        for (j, &i) in by_image.iter().enumerate() {
            tau[i - 1] = pos[j];
        }
    }
    let tau = Permutation(tau);
    let shuffle = sigma.compose(&tau.inverse());
    Ok((tau, shuffle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn signature_examples() {
        assert_eq!(signature(&Permutation::identity(3)), scalar::int(1));
        assert_eq!(signature(&perm(&[2, 1])), scalar::int(-1));
        assert_eq!(signature(&perm(&[2, 3, 1])), scalar::int(1));
    }

    #[test]
    fn relative_signature_examples() {
        assert_eq!(relative_signature(&perm(&[2, 1]), &[]).unwrap(), scalar::int(1));
        assert_eq!(relative_signature(&perm(&[2, 1]), &[1, 2]).unwrap(), scalar::int(-1));
        assert_eq!(relative_signature(&perm(&[2, 3, 1]), &[1, 2]).unwrap(), scalar::int(1));
        assert!(relative_signature(&perm(&[2, 1]), &[3]).is_err());
    }

    #[test]
    fn shuffle_examples() {
        let id = Permutation::identity(3);
        let (t, s) = shuffle_representative(&id, &[1, 2], &[3]).unwrap();
        assert_eq!((t, s), (id.clone(), id));
        let sigma = perm(&[2, 1, 3]);
        let (t, s) = shuffle_representative(&sigma, &[1, 2], &[3]).unwrap();
        assert_eq!(t, perm(&[2, 1, 3]));
        assert_eq!(s, Permutation::identity(3));
        let sw = perm(&[2, 1]);
        let (t, s) = shuffle_representative(&sw, &[1], &[2]).unwrap();
        assert_eq!(t, Permutation::identity(2));
        assert_eq!(s, sw);
        assert!(shuffle_representative(&sw, &[1], &[1]).is_err());
    }

    #[test]
    fn index_set_order_and_subsets() {
        let s = IndexSet::subsets(4, 2);
        assert_eq!(s.len(), 6);
        assert_eq!(s[0].to_vec(), vec![1, 2]);
        assert_eq!(s[5].to_vec(), vec![3, 4]);
        let mut sorted = s.clone();
        sorted.sort();
        assert_eq!(sorted, s);
        for n in 0..=6 {
            for k in 0..=n {
                assert_eq!(IndexSet::subsets(n, k).len() as u64, scalar::binomial(n as u64, k as u64));
            }
        }
    }

    #[test]
    fn multidegree_enumeration() {
        let d = MultiDegree::of_degree(2, 2);
        assert_eq!(d, vec![MultiDegree(vec![2, 0]), MultiDegree(vec![1, 1]), MultiDegree(vec![0, 2])]);
        let mut sorted = MultiDegree::up_to_degree(3, 3);
        let orig = sorted.clone();
        sorted.sort();
        assert_eq!(sorted, orig);
    }

    fn arb_perm(max: usize) -> impl Strategy<Value = Permutation> {
        (1..=max).prop_flat_map(|k| Just((1..=k).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn signature_is_homomorphism(v in Just((1..=6usize).collect::<Vec<_>>()).prop_shuffle(),
                                     w in Just((1..=6usize).collect::<Vec<_>>()).prop_shuffle()) {
            let s = Permutation::new(v).unwrap();
            let t = Permutation::new(w).unwrap();
            prop_assert_eq!(signature(&s.compose(&t)), signature(&s) * signature(&t));
        }

        #[test]
        fn shuffle_factorization(sigma in arb_perm(6), mask in any::<u64>()) {
            let k = sigma.len();
            let b: Vec<usize> = (1..=k).filter(|i| mask >> i & 1 == 1).collect();
            let c: Vec<usize> = (1..=k).filter(|i| mask >> i & 1 == 0).collect();
            let (tau, sh) = shuffle_representative(&sigma, &b, &c).unwrap();
            prop_assert_eq!(sh.compose(&tau), sigma);
            for block in [&b, &c] {
                let imgs: Vec<usize> = block.iter().map(|&i| sh.apply(i)).collect();
                prop_assert!(imgs.windows(2).all(|w| w[0] < w[1]));
                for &i in block.iter() {
                    prop_assert!(block.contains(&tau.apply(i)));
                }
            }
        }

        #[test]
        fn relative_signature_ignores_outside(sigma in arb_perm(6), mask in any::<u64>(), seed in any::<u64>()) {
            let k = sigma.len();
            let a: Vec<usize> = (1..=k).filter(|i| mask >> i & 1 == 1).collect();
            let rest: Vec<usize> = (1..=k).filter(|i| !a.contains(i)).collect();
            let mut shuffled = rest.clone();
            let n = shuffled.len();
            for i in 0..n {
                let j = (seed as usize).wrapping_mul(i + 7) % n;
                shuffled.swap(i, j);
            }
            let mut rho: Vec<usize> = (1..=k).collect();
            for (x, y) in rest.iter().zip(&shuffled) {
                rho[x - 1] = *y;
            }
            let rho = Permutation::new(rho).unwrap();
            prop_assert_eq!(relative_signature(&sigma.compose(&rho), &a).unwrap(),
                            relative_signature(&sigma, &a).unwrap());
        }

        #[test]
        fn from_unsorted_matches_inversions(v in Just((1..=8usize).collect::<Vec<_>>()).prop_shuffle(), len in 0..=8usize) {
            let seq = &v[..len];
            let (set, neg) = IndexSet::from_unsorted(seq).unwrap();
            prop_assert_eq!(set.len(), len);
            prop_assert_eq!(neg, inversions_odd(seq));
        }
    }

    #[test]
    fn all_permutations() {
        assert_eq!(Permutation::all(4).len(), 24);
        assert_eq!(Permutation::all(0).len(), 1);
    }
}
