//! Exact rangespace and nullspace LLL reformulations of knapsack feasibility
//! problems.
//!
//! The crate reformulates `beta1 <= a x <= beta2, 0 <= x <= v` by LLL
//! reduction, extracts a near-parallel integral direction `p` from the
//! transformation matrices, and certifies the resulting width bounds using
//! nothing but exact integer and rational arithmetic. Independent brute-force
//! oracles (vertex enumeration, integer point enumeration) cross-check the
//! simplex-based width computations.

pub mod approx;
pub mod error;
pub mod exact;
pub mod harness;
pub mod lattice;
pub mod oracle;
pub mod reform;
pub mod width;

pub use error::{Error, Result};
