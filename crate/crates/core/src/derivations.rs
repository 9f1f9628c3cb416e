//! Derivations and superderivations of the exterior algebra `ΛV*`, stored by
//! their values on the generators `dv_μ`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, mismatch, Error, Result};
use crate::exterior::{ExtElem, ExtTerm};
use crate::index::{IndexSet, Parity};
use crate::linalg::Matrix;
use crate::scalar::{self, Scalar};

/// Images `F(dv_1), …, F(dv_n)` of the generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenImageMap {
    dim: usize,
    images: Vec<ExtElem>,
}

impl GenImageMap {
    pub fn new(images: Vec<ExtElem>) -> Result<GenImageMap> {
        let Some(dim) = images.first().map(ExtElem::dim) else {
            return domain("a generator image map needs at least one generator");
        };
        if images.len() != dim || images.iter().any(|e| e.dim() != dim) {
            return mismatch(format!("expected {dim} images in dimension {dim}"));
        }
        Ok(GenImageMap { dim, images })
    }

    pub fn zero(dim: usize) -> GenImageMap {
        GenImageMap { dim, images: vec![ExtElem::zero(dim); dim] }
    }

    /// The map `dv_μ ↦ dv_μ`.
    pub fn identity(dim: usize) -> GenImageMap {
        GenImageMap { dim, images: (1..=dim).map(|i| ExtElem::generator(dim, i)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn images(&self) -> &[ExtElem] {
        &self.images
    }

    /// Image of `dv_mu` (1-based).
    pub fn image(&self, mu: usize) -> &ExtElem {
        &self.images[mu - 1]
    }

    pub fn scale(&self, f: &Scalar) -> GenImageMap {
        GenImageMap { dim: self.dim, images: self.images.iter().map(|e| e.scale(f)).collect() }
    }

    /// Parity shared by all images, if any.
    pub fn parity(&self) -> Option<Parity> {
        let mut out: Option<Parity> = None;
        for im in &self.images {
            if im.is_zero() {
                continue;
            }
            let p = im.parity()?;
            match out {
                None => out = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(out.unwrap_or(Parity::Even))
    }
}

/// A superderivation of declared parity, determined by its generator images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperDerivation {
    map: GenImageMap,
    parity: Parity,
}

impl SuperDerivation {
    /// Even superderivations send generators to odd elements and odd ones to
    /// even elements.
    pub fn new(map: GenImageMap, parity: Parity) -> Result<SuperDerivation> {
        let want = parity + Parity::Odd;
        for (mu, im) in map.images.iter().enumerate() {
            if !im.parity_part(parity).is_zero() {
                return domain(format!(
                    "image of dv{} has a component of the wrong parity for a {parity:?} superderivation",
                    mu + 1
                ));
            }
            debug_assert!(im.parity_part(want) == *im);
        }
        Ok(SuperDerivation { map, parity })
    }

    pub fn dim(&self) -> usize {
        self.map.dim
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn gen_images(&self) -> &GenImageMap {
        &self.map
    }

    /// The unique extension by the graded Leibniz rule.
    pub fn extend(&self, a: &ExtElem) -> Result<ExtElem> {
        if a.dim() != self.dim() {
            return mismatch(format!("element of dimension {} for derivation of dimension {}", a.dim(), self.dim()));
        }
        Ok(extend_with(&self.map, a, self.parity.is_odd()))
    }

    /// Operator matrix on the basis [`IndexSet::all_subsets`], columns are inputs.
    pub fn matrix(&self) -> Matrix {
        operator_matrix(self.dim(), |a| extend_with(&self.map, a, self.parity.is_odd()))
    }

    pub fn to_json(&self) -> DerivationJson {
        DerivationJson { parity: self.parity, images: self.map.images.iter().map(ExtElem::to_json).collect() }
    }

    pub fn from_json(dim: usize, j: &DerivationJson) -> Result<SuperDerivation> {
        let images = j.images.iter().map(|t| ExtElem::from_json(dim, t)).collect::<Result<Vec<_>>>()?;
        SuperDerivation::new(GenImageMap::new(images)?, j.parity)
    }
}

/// JSON form `{"parity": "even|odd", "images": [ExtElem, …]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationJson {
    pub parity: Parity,
    pub images: Vec<Vec<ExtTerm>>,
}

/// Applies the derivation with images `map` to `a`; `graded_odd` selects the
/// sign `(-1)^{j-1}` for the `j`-th factor, otherwise no sign is used.
fn extend_with(map: &GenImageMap, a: &ExtElem, graded_odd: bool) -> ExtElem {
    let dim = map.dim;
    let mut out = ExtElem::zero(dim);
    for (set, c) in a.terms() {
        let idx = set.to_vec();
        for (j, &mu) in idx.iter().enumerate() {
            let image = map.image(mu);
            if image.is_zero() {
                continue;
            }
            let before = IndexSet::new(&idx[..j]).expect("sorted");
            let after = IndexSet::new(&idx[j + 1..]).expect("sorted");
            let term = ExtElem::monomial(dim, before, Scalar::one())
                .wedge_unchecked(image)
                .wedge_unchecked(&ExtElem::monomial(dim, after, Scalar::one()));
            let neg = graded_odd && j % 2 == 1;
            out.axpy(&if neg { -c.clone() } else { c.clone() }, &term);
        }
    }
    out
}

/// Extension of arbitrary generator images by the ungraded Leibniz rule.
pub fn extend_ungraded(map: &GenImageMap, a: &ExtElem) -> Result<ExtElem> {
    if a.dim() != map.dim {
        return mismatch("dimension mismatch");
    }
    Ok(extend_with(map, a, false))
}

/// Matrix of a linear operator on `ΛV*` in the basis [`IndexSet::all_subsets`].
pub fn operator_matrix(dim: usize, op: impl Fn(&ExtElem) -> ExtElem) -> Matrix {
    let basis = IndexSet::all_subsets(dim);
    let pos: std::collections::HashMap<IndexSet, usize> = basis.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut m = vec![vec![Scalar::zero(); basis.len()]; basis.len()];
    for (j, s) in basis.iter().enumerate() {
        let img = op(&ExtElem::monomial(dim, *s, Scalar::one()));
        for (k, c) in img.terms() {
            m[pos[k]][j] = c.clone();
        }
    }
    m
}

/// The even superderivation determined by odd images `F`.
pub fn build_df(f: &GenImageMap) -> Result<SuperDerivation> {
    SuperDerivation::new(f.clone(), Parity::Even)
}

/// `D_F(a) = Σ_μ F(dv_μ) ∧ (v_μ⌟a)` evaluated directly.
pub fn apply_df(f: &GenImageMap, a: &ExtElem) -> Result<ExtElem> {
    if a.dim() != f.dim {
        return mismatch("dimension mismatch");
    }
    let mut out = ExtElem::zero(f.dim);
    for mu in 1..=f.dim {
        out.axpy(&Scalar::one(), &f.image(mu).wedge_unchecked(&a.insert_basis(mu)));
    }
    Ok(out)
}

/// The operator of numbers `N`, acting as `k` on `Λ^k`.
pub fn number_operator(dim: usize) -> SuperDerivation {
    SuperDerivation { map: GenImageMap::identity(dim), parity: Parity::Even }
}

/// The odd superderivation with `dv_μ ↦ δ_{μν}`; it equals insertion of `v_ν`.
pub fn insertion(dim: usize, nu: usize) -> SuperDerivation {
    let images = (1..=dim)
        .map(|mu| if mu == nu { ExtElem::one(dim) } else { ExtElem::zero(dim) })
        .collect();
    SuperDerivation { map: GenImageMap { dim, images }, parity: Parity::Odd }
}

/// Decomposition of an ungraded derivation: the odd parts of its images and
/// the odd form `η` determining the even parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationClassification {
    pub f_minus: GenImageMap,
    pub eta: ExtElem,
}

/// Splits the images of an ungraded derivation into `F⁻` and `η = −Σ v_μ⌟F⁺(dv_μ)`.
/// For odd `n` the top-degree part of `η` is dropped.
pub fn classify(map: &GenImageMap) -> DerivationClassification {
    let n = map.dim;
    let f_minus = GenImageMap { dim: n, images: map.images.iter().map(|im| im.parity_part(Parity::Odd)).collect() };
    let mut eta = ExtElem::zero(n);
    for mu in 1..=n {
        let plus = map.image(mu).parity_part(Parity::Even);
        eta.axpy(&-Scalar::one(), &plus.insert_basis(mu));
    }
    if n % 2 == 1 {
        let top = eta.degree_part(n);
        eta = eta.sub(&top).expect("same dimension");
    }
    DerivationClassification { f_minus, eta }
}

/// Generator images of `D_{F⁻} + (α ↦ (n−N+1)⁻¹ η∧α)`.
pub fn reconstruct(c: &DerivationClassification) -> GenImageMap {
    let n = c.f_minus.dim;
    let images = (1..=n)
        .map(|mu| {
            let mut im = c.f_minus.image(mu).clone();
            let prod = c.eta.wedge_unchecked(&ExtElem::generator(n, mu));
            for d in 1..=n {
                let part = prod.degree_part(d);
                if !part.is_zero() {
                    im.axpy(&scalar::frac(1, (n - d + 1) as i64), &part);
                }
            }
            im
        })
        .collect();
    GenImageMap { dim: n, images }
}

/// Which derivations to count in [`dimension_of_derivation_space`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grading {
    /// All derivations (ungraded Leibniz rule).
    All,
    /// Derivations preserving the parity grading.
    Z2,
    /// Derivations preserving the integer grading.
    Z,
}

/// Dimension of the space of derivations of `ΛV*` for `dim V = n`.
pub fn dimension_of_derivation_space(n: usize, grading: Grading) -> Result<u64> {
    if n < 1 || n > 62 {
        return Err(Error::Domain(format!("n = {n} outside 1..=62")));
    }
    let n64 = n as u64;
    let half = 1u64 << (n - 1);
    Ok(match grading {
        Grading::All => n64 * half + half - u64::from(n % 2 == 1),
        Grading::Z2 => n64 * half,
        Grading::Z => n64 * n64,
    })
}

/// Dimension `n·2ⁿ` of the space of superderivations.
pub fn superderivation_space_dimension(n: usize) -> u64 {
    (n as u64) << n
}

/// Supercommutator `D₁D₂ − (−1)^{|D₁||D₂|} D₂D₁`, returned by generator images.
pub fn superbracket(d1: &SuperDerivation, d2: &SuperDerivation) -> Result<SuperDerivation> {
    if d1.dim() != d2.dim() {
        return mismatch("superbracket of derivations of different dimension");
    }
    let n = d1.dim();
    let neg = d1.parity.koszul(d2.parity);
    let images = (1..=n)
        .map(|mu| {
            let g = ExtElem::generator(n, mu);
            let a = d1.extend(&d2.extend(&g)?)?;
            let b = d2.extend(&d1.extend(&g)?)?;
            if neg { a.add(&b) } else { a.sub(&b) }
        })
        .collect::<Result<Vec<_>>>()?;
    SuperDerivation::new(GenImageMap { dim: n, images }, d1.parity + d2.parity)
}
