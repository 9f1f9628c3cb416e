//! Exact superlinear algebra over the rationals.

pub mod cartan_poincare;
pub mod derivations;
pub mod error;
pub mod exterior;
pub mod index;
pub mod lie_super;
pub mod lin;
pub mod linalg;
pub mod poly;
pub mod polydiff_jets;
pub mod report;
pub mod scalar;
pub mod straightening;
pub mod super_derham;
pub mod super_tensor;
pub mod supermaps;

pub use error::{Error, Result};
pub use exterior::{ExtElem, ExtSpace};
pub use index::{IndexSet, MultiDegree, Parity, Permutation};
pub use scalar::Scalar;
