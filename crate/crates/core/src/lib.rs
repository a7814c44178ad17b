//! Exact-arithmetic laboratory for support and cosupport of complexes over
//! finite commutative rings, with a symbolic complete-DVR layer for the
//! examples that need a non-artinian spectrum.

// dense matrix code indexes several arrays per loop; plain index loops read
// better than zipped enumerations there
#![allow(clippy::needless_range_loop)]

pub mod dercat;
pub mod dvr;
pub mod finmod;
pub mod finring;
pub mod linalg;
pub mod supports;
pub mod verify;

pub use dercat::{Complex, HomologyProfile};
pub use finmod::{FinModule, ModuleMap};
pub use finring::{build_ring, Ideal, PrimeIdeal, Ring, RingSpec};
pub use linalg::{Mat, Subgroup};
pub use supports::{Route, SupportKind, SupportSet};
