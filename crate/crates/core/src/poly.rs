//! Polynomials in `m` commuting variables with exact rational coefficients.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, mismatch, Result};
use crate::index::MultiDegree;
use crate::lin::{self, Terms};
use crate::scalar::{self, Scalar};

/// A polynomial in `x_1..x_m`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    m: usize,
    terms: Terms<MultiDegree>,
}

/// JSON term `{"exps": [..], "coeff": "p/q"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub exps: MultiDegree,
    #[serde(with = "scalar::serde_str")]
    pub coeff: Scalar,
}

impl Poly {
    pub fn zero(m: usize) -> Poly {
        Poly { m, terms: Terms::new() }
    }

    pub fn one(m: usize) -> Poly {
        Poly::constant(m, Scalar::one())
    }

    pub fn constant(m: usize, c: Scalar) -> Poly {
        Poly::monomial(MultiDegree::zero(m), c)
    }

    /// The variable `x_i` (1-based).
    pub fn var(m: usize, i: usize) -> Poly {
        Poly::monomial(MultiDegree::unit(m, i), Scalar::one())
    }

    pub fn monomial(alpha: MultiDegree, c: Scalar) -> Poly {
        let m = alpha.vars();
        let mut terms = Terms::new();
        lin::add_term(&mut terms, alpha, c);
        Poly { m, terms }
    }

    pub fn from_terms(m: usize, items: impl IntoIterator<Item = (MultiDegree, Scalar)>) -> Result<Poly> {
        let terms = lin::collect(items);
        if let Some(a) = terms.keys().find(|a| a.vars() != m) {
            return domain(format!("exponent vector {a:?} does not have {m} entries"));
        }
        Ok(Poly { m, terms })
    }

    pub fn vars(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &Terms<MultiDegree> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, alpha: &MultiDegree) -> Scalar {
        self.terms.get(alpha).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiDegree::total).max()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.m, other.m);
        Poly { m: self.m, terms: lin::add(&self.terms, &other.terms) }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.m, other.m);
        Poly { m: self.m, terms: lin::sub(&self.terms, &other.terms) }
    }

    pub fn scale(&self, f: &Scalar) -> Poly {
        Poly { m: self.m, terms: lin::scale(&self.terms, f) }
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Scalar::one())
    }

    pub fn axpy(&mut self, f: &Scalar, other: &Poly) {
        lin::axpy(&mut self.terms, f, &other.terms);
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.m, other.m);
        let mut terms = Terms::new();
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                lin::add_term(&mut terms, a.add(b), c * d);
            }
        }
        Poly { m: self.m, terms }
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::one(self.m), |acc, _| acc.mul(self))
    }

    /// `∂/∂x_i` (1-based).
    pub fn deriv(&self, i: usize) -> Poly {
        let mut terms = Terms::new();
        for (a, c) in &self.terms {
            if let Some(b) = a.dec(i) {
                lin::add_term(&mut terms, b, c * Scalar::from_integer(a.get(i).into()));
            }
        }
        Poly { m: self.m, terms }
    }

    /// `∂^α`.
    pub fn deriv_multi(&self, alpha: &MultiDegree) -> Poly {
        let mut out = self.clone();
        for i in 1..=alpha.vars() {
            for _ in 0..alpha.get(i) {
                out = out.deriv(i);
            }
        }
        out
    }

    pub fn eval(&self, p: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (a, c) in &self.terms {
            let mut t = c.clone();
            for (x, e) in p.iter().zip(&a.0) {
                for _ in 0..*e {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes `x_i ↦ images[i-1]`; images live in a common ring.
    pub fn compose(&self, images: &[Poly]) -> Result<Poly> {
        if images.len() != self.m {
            return mismatch(format!("{} images for {} variables", images.len(), self.m));
        }
        let target = images.first().map_or(0, Poly::vars);
        let mut out = Poly::zero(target);
        for (a, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (img, e) in images.iter().zip(&a.0) {
                t = t.mul(&img.pow(*e));
            }
            out.axpy(&Scalar::one(), &t);
        }
        Ok(out)
    }

    /// `x ↦ f(x + p)`.
    pub fn shift(&self, p: &[Scalar]) -> Poly {
        let images: Vec<Poly> = (1..=self.m).map(|i| Poly::var(self.m, i).add(&Poly::constant(self.m, p[i - 1].clone()))).collect();
        self.compose(&images).expect("one image per variable")
    }

    /// Terms of total degree at most `k`.
    pub fn truncate(&self, k: u32) -> Poly {
        Poly { m: self.m, terms: self.terms.iter().filter(|(a, _)| a.total() <= k).map(|(a, c)| (a.clone(), c.clone())).collect() }
    }

    pub fn to_json(&self) -> Vec<PolyTerm> {
        self.terms.iter().map(|(a, c)| PolyTerm { exps: a.clone(), coeff: c.clone() }).collect()
    }

    pub fn from_json(m: usize, terms: &[PolyTerm]) -> Result<Poly> {
        Poly::from_terms(m, terms.iter().map(|t| (t.exps.clone(), t.coeff.clone())))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(a, c)| format!("{}·x{:?}", scalar::format(c), a)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;
    use proptest::prelude::*;

    /// Random polynomial in `m` variables of degree at most `d`.
    pub fn arb_poly(m: usize, d: u32) -> impl Strategy<Value = Poly> {
        let basis = MultiDegree::up_to_degree(m, d);
        let n = basis.len();
        proptest::collection::vec((0..n, -3i64..=3), 0..5).prop_map(move |v| {
            Poly::from_terms(m, v.into_iter().map(|(i, c)| (basis[i].clone(), scalar::int(c)))).unwrap()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::tests_support::arb_poly;
    use super::*;
    use crate::scalar::int;
    use proptest::prelude::*;

    #[test]
    fn basic_arithmetic() {
        let x = Poly::var(1, 1);
        let f = x.pow(2);
        assert_eq!(f.deriv(1), x.scale(&int(2)));
        assert_eq!(f.eval(&[int(3)]), int(9));
        assert_eq!(f.shift(&[int(1)]), f.add(&x.scale(&int(2))).add(&Poly::one(1)));
        assert_eq!(Poly::zero(2).degree(), None);
    }

    #[test]
    fn json_roundtrip() {
        let p = Poly::var(2, 1).mul(&Poly::var(2, 2)).add(&Poly::constant(2, scalar::frac(1, 2)));
        let s = serde_json::to_string(&p.to_json()).unwrap();
        assert_eq!(s, r#"[{"exps":[0,0],"coeff":"1/2"},{"exps":[1,1],"coeff":"1"}]"#);
        let back: Vec<PolyTerm> = serde_json::from_str(&s).unwrap();
        assert_eq!(Poly::from_json(2, &back).unwrap(), p);
        assert!(Poly::from_json(3, &back).is_err());
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(2, 3), b in arb_poly(2, 3), c in arb_poly(2, 3)) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn derivative_is_leibniz(a in arb_poly(2, 3), b in arb_poly(2, 3), i in 1..=2usize) {
            prop_assert_eq!(a.mul(&b).deriv(i), a.deriv(i).mul(&b).add(&a.mul(&b.deriv(i))));
        }

        #[test]
        fn eval_is_multiplicative(a in arb_poly(2, 3), b in arb_poly(2, 3), p in proptest::collection::vec(-3i64..=3, 2)) {
            let p: Vec<Scalar> = p.into_iter().map(int).collect();
            prop_assert_eq!(a.mul(&b).eval(&p), a.eval(&p) * b.eval(&p));
        }

        #[test]
        fn shift_evaluates_at_translate(a in arb_poly(2, 3), p in proptest::collection::vec(-3i64..=3, 2), q in proptest::collection::vec(-3i64..=3, 2)) {
            let p: Vec<Scalar> = p.into_iter().map(int).collect();
            let q: Vec<Scalar> = q.into_iter().map(int).collect();
            let pq: Vec<Scalar> = p.iter().zip(&q).map(|(x, y)| x + y).collect();
            prop_assert_eq!(a.shift(&p).eval(&q), a.eval(&pq));
        }
    }
}
