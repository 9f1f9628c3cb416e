//! The exterior algebra of a based finite-dimensional space.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, mismatch, Error, Result};
use crate::index::{IndexSet, Parity, MAX_DIM};
use crate::lin::{self, Terms};
use crate::scalar::{self, Scalar};

/// Based space of dimension `dim` with generator labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtSpace {
    pub dim: usize,
    pub names: Vec<String>,
}

impl ExtSpace {
    /// Space with generators named `dv1 … dvn`.
    pub fn new(dim: usize) -> Result<ExtSpace> {
        if dim == 0 || dim > MAX_DIM {
            return domain(format!("dimension {dim} outside 1..={MAX_DIM}"));
        }
        Ok(ExtSpace { dim, names: (1..=dim).map(|i| format!("dv{i}")).collect() })
    }
}

/// Element of `ΛV*`: index sets of generators to coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct ExtElem {
    dim: usize,
    terms: Terms<IndexSet>,
}

impl ExtElem {
    pub fn zero(dim: usize) -> ExtElem {
        ExtElem { dim, terms: Terms::new() }
    }

    pub fn one(dim: usize) -> ExtElem {
        ExtElem::constant(dim, Scalar::one())
    }

    pub fn constant(dim: usize, c: Scalar) -> ExtElem {
        ExtElem::monomial(dim, IndexSet::EMPTY, c)
    }

    /// The generator `dv_i` (1-based).
    pub fn generator(dim: usize, i: usize) -> ExtElem {
        ExtElem::monomial(dim, IndexSet::singleton(i), Scalar::one())
    }

    pub fn monomial(dim: usize, set: IndexSet, c: Scalar) -> ExtElem {
        debug_assert!(set.max_index() <= dim);
        let mut terms = Terms::new();
        lin::add_term(&mut terms, set, c);
        ExtElem { dim, terms }
    }

    /// Builds from terms, checking indices against `dim`.
    pub fn from_terms(dim: usize, items: impl IntoIterator<Item = (IndexSet, Scalar)>) -> Result<ExtElem> {
        let terms = lin::collect(items);
        if let Some(k) = terms.keys().find(|k| k.max_index() > dim) {
            return domain(format!("index set {k:?} exceeds dimension {dim}"));
        }
        Ok(ExtElem { dim, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &Terms<IndexSet> {
        &self.terms
    }

    pub fn into_terms(self) -> Terms<IndexSet> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, set: IndexSet) -> Scalar {
        self.terms.get(&set).cloned().unwrap_or_else(Scalar::zero)
    }

    fn check(&self, other: &ExtElem) -> Result<()> {
        if self.dim != other.dim {
            return mismatch(format!("exterior dimensions {} and {}", self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &ExtElem) -> Result<ExtElem> {
        self.check(other)?;
        Ok(ExtElem { dim: self.dim, terms: lin::add(&self.terms, &other.terms) })
    }

    pub fn sub(&self, other: &ExtElem) -> Result<ExtElem> {
        self.check(other)?;
        Ok(ExtElem { dim: self.dim, terms: lin::sub(&self.terms, &other.terms) })
    }

    pub fn scale(&self, f: &Scalar) -> ExtElem {
        ExtElem { dim: self.dim, terms: lin::scale(&self.terms, f) }
    }

    pub fn neg(&self) -> ExtElem {
        self.scale(&-Scalar::one())
    }

    /// In-place `self += f·other`; dimensions must agree.
    pub fn axpy(&mut self, f: &Scalar, other: &ExtElem) {
        debug_assert_eq!(self.dim, other.dim);
        lin::axpy(&mut self.terms, f, &other.terms);
    }

    /// The component of degree `k`.
    pub fn degree_part(&self, k: usize) -> ExtElem {
        self.filter(|s| s.len() == k)
    }

    /// The components of degree at least `k`.
    pub fn degree_at_least(&self, k: usize) -> ExtElem {
        self.filter(|s| s.len() >= k)
    }

    /// The component of the given parity.
    pub fn parity_part(&self, p: Parity) -> ExtElem {
        self.filter(|s| Parity::of(s.len()) == p)
    }

    fn filter(&self, keep: impl Fn(IndexSet) -> bool) -> ExtElem {
        ExtElem {
            dim: self.dim,
            terms: self.terms.iter().filter(|(k, _)| keep(**k)).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    /// The degree when homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|k| k.len());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// The parity when homogeneous in parity; zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|k| Parity::of(k.len()));
        let Some(first) = it.next() else { return Some(Parity::Even) };
        it.all(|p| p == first).then_some(first)
    }

    /// Wedge product.
    pub fn wedge(&self, other: &ExtElem) -> Result<ExtElem> {
        self.check(other)?;
        Ok(self.wedge_unchecked(other))
    }

    pub(crate) fn wedge_unchecked(&self, other: &ExtElem) -> ExtElem {
        let mut terms = Terms::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if let Some(neg) = a.wedge_sign(*b) {
                    let c = x * y;
                    lin::add_term(&mut terms, a.union(*b), if neg { -c } else { c });
                }
            }
        }
        ExtElem { dim: self.dim, terms }
    }

    /// Insertion `v⌟a` of a vector given by its coordinates in the dual basis.
    pub fn insert(&self, v: &[Scalar]) -> Result<ExtElem> {
        if v.len() != self.dim {
            return mismatch(format!("vector of length {} for dimension {}", v.len(), self.dim));
        }
        let mut out = ExtElem::zero(self.dim);
        for (mu, c) in v.iter().enumerate() {
            if !c.is_zero() {
                out.axpy(c, &self.insert_basis(mu + 1));
            }
        }
        Ok(out)
    }

    /// Insertion of the basis vector `v_mu` (1-based).
    pub fn insert_basis(&self, mu: usize) -> ExtElem {
        let mut terms = Terms::new();
        for (s, c) in &self.terms {
            if s.contains(mu) {
                let neg = s.count_below(mu) % 2 == 1;
                let rest = s.difference(IndexSet::singleton(mu));
                lin::add_term(&mut terms, rest, if neg { -c.clone() } else { c.clone() });
            }
        }
        ExtElem { dim: self.dim, terms }
    }

    /// Coefficient of the empty index set.
    pub fn augmentation(&self) -> Scalar {
        self.coeff(IndexSet::EMPTY)
    }

    /// Largest `k` with `self ∈ Λ^{≥k}`; `dim + 1` for zero.
    pub fn filtration_degree(&self) -> usize {
        self.terms.keys().map(|k| k.len()).min().unwrap_or(self.dim + 1)
    }

    /// Inverse of a unit via the finite geometric series in its nilpotent part.
    pub fn invert_unit(&self) -> Result<ExtElem> {
        let eps = self.augmentation();
        if eps.is_zero() {
            return Err(Error::NotInvertible("augmentation is zero".into()));
        }
        let inv_eps = eps.recip();
        // a = eps(1 - x) with x nilpotent; a^{-1} = eps^{-1} Σ x^k.
        let mut x = self.scale(&-inv_eps.clone());
        x.terms.remove(&IndexSet::EMPTY);
        let mut sum = ExtElem::one(self.dim);
        let mut power = ExtElem::one(self.dim);
        for _ in 0..self.dim {
            power = power.wedge_unchecked(&x);
            if power.is_zero() {
                break;
            }
            sum.axpy(&Scalar::one(), &power);
        }
        Ok(sum.scale(&inv_eps))
    }

    /// Serializable form.
    pub fn to_json(&self) -> Vec<ExtTerm> {
        self.terms.iter().map(|(k, v)| ExtTerm { coeff: v.clone(), ext: *k }).collect()
    }

    pub fn from_json(dim: usize, terms: &[ExtTerm]) -> Result<ExtElem> {
        ExtElem::from_terms(dim, terms.iter().map(|t| (t.ext, t.coeff.clone())))
    }
}

impl fmt::Debug for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, v)| {
                if k.is_empty() {
                    scalar::format(v)
                } else {
                    let m: Vec<String> = k.iter().map(|i| format!("dv{i}")).collect();
                    format!("{}·{}", scalar::format(v), m.join("∧"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// JSON term `{"coeff": "p/q", "ext": [i1, …]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtTerm {
    #[serde(with = "scalar::serde_str")]
    pub coeff: Scalar,
    pub ext: IndexSet,
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;
    use crate::scalar::int;
    use proptest::prelude::*;

    pub(crate) fn arb_ext(dim: usize) -> impl Strategy<Value = ExtElem> {
        proptest::collection::vec((0u64..(1 << dim), -3i64..=3), 0..6).prop_map(move |v| {
            ExtElem::from_terms(dim, v.into_iter().map(|(m, c)| (IndexSet::from_mask(m), int(c)))).unwrap()
        })
    }
}
