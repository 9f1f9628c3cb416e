//! Cross-module checks through the public API, against closed forms computed here.

use proptest::prelude::*;

use superlin::cartan_poincare::{self, Assembly};
use superlin::derivations;
use superlin::lie_super;
use superlin::polydiff_jets::Connection;
use superlin::scalar::int;
use superlin::super_derham::{self, FormKey, SuperForm};
use superlin::super_tensor::{self, SuperSpace};
use superlin::{IndexSet, MultiDegree, Scalar};

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim W × dim V` matrix with `r` ones on the diagonal.
fn partial_identity(m: usize, n: usize, r: usize) -> Vec<Vec<Scalar>> {
    (0..m).map(|i| (0..n).map(|j| int(i64::from(i == j && i < r))).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn homology_of_partial_identity(n in 0usize..4, m in 0usize..4, r in 0usize..4) {
        let r = r.min(n).min(m);
        let f = partial_identity(m, n, r);
        let (ker, coker) = ((n - r) as u64, (m - r) as u64);
        for how in [Assembly::Generic, Assembly::Direct] {
            let t = cartan_poincare::homology_dims(&f, n, m, 3, 3, how).unwrap();
            for k in 0..=3u64 {
                for l in 0..=3u64 {
                    let sym = if ker == 0 { u64::from(k == 0) } else { binom(ker + k - 1, k) };
                    prop_assert_eq!(t.computed[k as usize][l as usize], sym * binom(coker, l));
                }
            }
        }
    }

    #[test]
    fn flat_d_squares_to_zero(x in prop::collection::vec(0u32..3, 2), a in 0u64..4, b in prop::collection::vec(0u32..3, 2), c in 0u64..4) {
        let (m, n) = (2, 2);
        let key = FormKey { x: MultiDegree(x), a: IndexSet::from_mask(a), b: MultiDegree(b), c: IndexSet::from_mask(c) };
        let w = SuperForm::monomial(m, n, key, int(3));
        let conn = Connection::flat(m, n);
        let dw = super_derham::super_d(&conn, &w).unwrap();
        prop_assert!(super_derham::super_d(&conn, &dw).unwrap().is_zero());
    }
}

#[test]
fn superderivation_dimension_is_n_two_to_the_n() {
    for n in 0..6 {
        assert_eq!(derivations::superderivation_space_dimension(n), (n as u64) << n);
    }
}

#[test]
fn general_linear_superalgebras_satisfy_the_axioms() {
    for (p, q) in [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)] {
        let l = lie_super::endo_superalgebra(p, q).unwrap();
        assert!(lie_super::check_lie_superalgebra(&l).unwrap().passed(), "gl({p}|{q})");
    }
}

#[test]
fn supersymmetric_counts_match_closed_forms() {
    for p in 0..3usize {
        for q in 0..3usize {
            for k in 0..4usize {
                let s = SuperSpace::new(p, q);
                // Sym V0 ⊗ Λ V1 in degree k.
                let sym: u64 = (0..=k).map(|j| if p == 0 { u64::from(j == 0) } else { binom((p + j - 1) as u64, j as u64) } * binom(q as u64, (k - j) as u64)).sum();
                let ext: u64 = (0..=k).map(|j| binom(p as u64, j as u64) * if q == 0 { u64::from(k == j) } else { binom((q + k - j - 1) as u64, (k - j) as u64) }).sum();
                assert_eq!(super_tensor::supersym_normal_form_count(s, k) as u64, sym, "Sym ({p}|{q}) k = {k}");
                assert_eq!(super_tensor::superext_normal_form_count(s, k) as u64, ext, "Λ ({p}|{q}) k = {k}");
            }
        }
    }
}
