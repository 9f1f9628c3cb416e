//! Acceptance criteria at the `small` budget under seed 7.
//!
//! Each test prints one `[PASS]`/`[FAIL]` line and asserts both the exact
//! outcome and the time limit pinned in [`CRITERIA`].

use superlin_verify::criteria::{run, Budget, CRITERIA};

const SEED: u64 = 7;

fn criterion(id: u32) {
    let (_, name, limit) = CRITERIA[(id - 1) as usize];
    let r = run(id, SEED, Budget::Small);
    println!("{}", r.line());
    assert_eq!(r.name, name);
    assert_eq!(r.limit.as_secs(), limit);
    assert!(r.passed, "criterion {id} failed: {}", r.detail);
    assert!(r.within_limit(), "criterion {id} took {:.2} s, limit {limit} s", r.elapsed.as_secs_f64());
}

#[test]
fn c01_derivation_dimensions() {
    criterion(1);
}

#[test]
fn c02_classification_roundtrip() {
    criterion(2);
}

#[test]
fn c03_cartan_poincare_homology() {
    criterion(3);
}

#[test]
fn c04_twisted_shift_identities() {
    criterion(4);
}

#[test]
fn c05_straightening() {
    criterion(5);
}

#[test]
fn c06_supertensor_quotients() {
    criterion(6);
}

#[test]
fn c07_lie_superalgebra_biconditional() {
    criterion(7);
}

#[test]
fn c08_jets() {
    criterion(8);
}

#[test]
fn c09_supermaps() {
    criterion(9);
}

#[test]
fn c10_super_de_rham() {
    criterion(10);
}

#[test]
fn c11_delta_kernel() {
    criterion(11);
}

#[test]
fn limits_are_pinned() {
    let limits: Vec<u64> = CRITERIA.iter().map(|c| c.2).collect();
    assert_eq!(limits, vec![10, 10, 60, 30, 60, 20, 30, 30, 30, 120, 60]);
}
