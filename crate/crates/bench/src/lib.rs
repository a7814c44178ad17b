//! Shared fixtures for the criterion benches.

use cosupp_core::dercat::Complex;
use cosupp_core::finmod::{cokernel_presentation, ring_module, FinModule, ModuleMap};
use cosupp_core::finring::{build_ring, Ring, RingSpec};
use cosupp_core::linalg::Mat;
use std::sync::Arc;

pub fn z12() -> Arc<Ring> {
    build_ring(&RingSpec::Zmod { n: 12 }).expect("catalog ring")
}

pub fn z4() -> Arc<Ring> {
    build_ring(&RingSpec::Zmod { n: 4 }).expect("catalog ring")
}

pub fn z2_over_z4(ring: &Arc<Ring>) -> FinModule {
    cokernel_presentation(ring, 1, &[vec![vec![2]]]).expect("cyclic cut")
}

/// The standard two-term multiplication complex over Z/4.
pub fn two_term(ring: &Arc<Ring>) -> Complex {
    let rm = ring_module(ring);
    let d = ModuleMap::new(rm.clone(), rm.clone(), Mat::from_rows(vec![vec![2]])).expect("map");
    Complex::build(ring.clone(), 0, vec![rm.clone(), rm], vec![d]).expect("two-term complex")
}

/// A mid-sized integer matrix with a known nontrivial Smith form.
pub fn snf_fixture() -> Mat {
    let n = 12;
    Mat::from_fn(n, n, |i, j| ((3 * i + 5 * j + 1) % 17) as i128 - 8)
}
