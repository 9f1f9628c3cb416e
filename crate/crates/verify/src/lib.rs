//! Verification harness: seeded generators, brute-force oracles and the
//! acceptance criterion runners.

pub mod gen;
pub mod oracle;
pub mod criteria;
