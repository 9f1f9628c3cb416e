//! Seeded random inputs.
//!
//! Every suite derives from one 64-bit seed. Criterion `c` runs its case `i`
//! on `case_seed(seed, c, i)`, so a failing case is reproduced from the
//! printed sub-seed alone.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use superlin::exterior::ExtElem;
use superlin::linalg::{self, Matrix};
use superlin::poly::Poly;
use superlin::scalar::{frac, int};
use superlin::supermaps::PolySuperFunc;
use superlin::{IndexSet, MultiDegree, Parity, Scalar};

/// The splitmix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sub-seed of stream `stream` under `seed`.
pub fn sub_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

/// Seed of case `case` of criterion `criterion`.
pub fn case_seed(seed: u64, criterion: u64, case: u64) -> u64 {
    sub_seed(sub_seed(seed, criterion), case)
}

/// Random generator for the algebraic objects of the suites.
pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    /// Uniform index in `lo..=hi`.
    pub fn size(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    /// Small integer, occasionally a fraction with denominator 2 or 3.
    pub fn scalar(&mut self) -> Scalar {
        let n = self.int(-3, 3);
        if self.chance(0.15) {
            frac(n, self.int(2, 3))
        } else {
            int(n)
        }
    }

    /// Nonzero small scalar.
    pub fn nonzero(&mut self) -> Scalar {
        loop {
            let c = self.scalar();
            if !c.is_zero() {
                return c;
            }
        }
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        (0..rows).map(|_| (0..cols).map(|_| int(self.int(-2, 2))).collect()).collect()
    }

    /// `rows × cols` matrix of rank at most `rank`, as a product of random factors.
    pub fn low_rank_matrix(&mut self, rows: usize, cols: usize, rank: usize) -> Matrix {
        let a = self.matrix(rows, rank);
        let b = self.matrix(rank, cols);
        if rank == 0 {
            return linalg::zeros(rows, cols);
        }
        linalg::matmul(&a, &b, cols)
    }

    /// `rows × cols` matrix of full column rank (`rows ≥ cols`).
    pub fn injective_matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        loop {
            let m = self.matrix(rows, cols);
            if linalg::rank(&m) == cols {
                return m;
            }
        }
    }

    pub fn index_set(&mut self, n: usize) -> IndexSet {
        IndexSet::from_mask(self.rng.gen_range(0..(1u64 << n)))
    }

    /// Random element of `Λ` on `n` generators with up to `terms` terms,
    /// restricted to degrees accepted by `keep`.
    pub fn ext(&mut self, n: usize, terms: usize, keep: impl Fn(usize) -> bool) -> ExtElem {
        let mut e = ExtElem::zero(n);
        for _ in 0..terms {
            let s = self.index_set(n);
            if keep(s.len()) {
                e.axpy(&self.scalar(), &ExtElem::monomial(n, s, int(1)));
            }
        }
        e
    }

    pub fn multidegree(&mut self, vars: usize, max_total: u32) -> MultiDegree {
        let d = self.rng.gen_range(0..=max_total);
        let mut e = MultiDegree::zero(vars);
        if vars == 0 {
            return e;
        }
        for _ in 0..d {
            let i = self.rng.gen_range(0..vars);
            e.0[i] += 1;
        }
        e
    }

    /// Random polynomial in `m` variables of degree at most `deg`.
    pub fn poly(&mut self, m: usize, deg: u32, terms: usize) -> Poly {
        let mut p = Poly::zero(m);
        for _ in 0..terms {
            let a = self.multidegree(m, deg);
            p = p.add(&Poly::monomial(a, self.scalar()));
        }
        p
    }

    /// Random superfunction on `(m|n)` of the given parity whose `Λ`-degrees
    /// are accepted by `keep`.
    pub fn super_func(&mut self, m: usize, n: usize, parity: Parity, deg: u32, terms: usize, keep: impl Fn(usize) -> bool) -> PolySuperFunc {
        let mut f = PolySuperFunc::zero(m, n);
        for _ in 0..terms {
            let s = self.index_set(n);
            if Parity::of(s.len()) != parity || !keep(s.len()) {
                continue;
            }
            let a = self.multidegree(m, deg);
            f = f.add(&PolySuperFunc::monomial(n, a, s, self.scalar()));
        }
        f
    }

    /// Picks one element of a slice.
    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.rng.gen_range(0..items.len())]
    }

    /// Random point with small integer coordinates.
    pub fn point(&mut self, m: usize) -> Vec<Scalar> {
        (0..m).map(|_| int(self.int(-2, 2))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_deterministic_and_distinct() {
        assert_eq!(case_seed(7, 3, 11), case_seed(7, 3, 11));
        assert_ne!(case_seed(7, 3, 11), case_seed(7, 3, 12));
        assert_ne!(case_seed(7, 3, 11), case_seed(7, 4, 11));
        let mut a = Gen::new(5);
        let mut b = Gen::new(5);
        assert_eq!(a.matrix(3, 3), b.matrix(3, 3));
    }

    #[test]
    fn low_rank_matrices_respect_the_bound() {
        let mut g = Gen::new(1);
        for r in 0..=3 {
            let m = g.low_rank_matrix(4, 4, r);
            assert!(linalg::rank(&m) <= r);
        }
        let inj = g.injective_matrix(4, 2);
        assert_eq!(linalg::rank(&inj), 2);
    }
}
