//! Helpers for sparse linear combinations keyed by basis labels.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::scalar::Scalar;

/// Sparse linear combination: basis label to nonzero coefficient.
pub type Terms<K> = BTreeMap<K, Scalar>;

/// Adds `c·k` to `map`, dropping the entry if it cancels.
pub fn add_term<K: Ord>(map: &mut Terms<K>, k: K, c: Scalar) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(k) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// `a + f·b`.
pub fn axpy<K: Ord + Clone>(a: &mut Terms<K>, f: &Scalar, b: &Terms<K>) {
    if f.is_zero() {
        return;
    }
    for (k, v) in b {
        add_term(a, k.clone(), f * v);
    }
}

pub fn add<K: Ord + Clone>(a: &Terms<K>, b: &Terms<K>) -> Terms<K> {
    let mut out = a.clone();
    for (k, v) in b {
        add_term(&mut out, k.clone(), v.clone());
    }
    out
}

pub fn sub<K: Ord + Clone>(a: &Terms<K>, b: &Terms<K>) -> Terms<K> {
    let mut out = a.clone();
    for (k, v) in b {
        add_term(&mut out, k.clone(), -v.clone());
    }
    out
}

pub fn scale<K: Ord + Clone>(a: &Terms<K>, f: &Scalar) -> Terms<K> {
    if f.is_zero() {
        return Terms::new();
    }
    a.iter().map(|(k, v)| (k.clone(), v * f)).collect()
}

/// Collects `(key, coeff)` pairs, summing duplicates and dropping zeros.
pub fn collect<K: Ord>(items: impl IntoIterator<Item = (K, Scalar)>) -> Terms<K> {
    let mut out = Terms::new();
    for (k, v) in items {
        add_term(&mut out, k, v);
    }
    out
}
