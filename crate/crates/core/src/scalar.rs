//! Cost-scalar abstraction for the flow kernel.
//!
//! The solver itself is written once, generic over the arc-cost scalar.
//! Exact objective evaluation instantiates it at `i64` (all instance data is
//! integral), while the LP-relaxation bound instantiates it at
//! [`num_rational::BigRational`] so that fixed costs folded into unit costs
//! stay exact. Concrete aliases live at the crate root.

use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed};
use std::fmt::Debug;

/// Scalar type usable as an arc cost: an ordered signed field-ish number that
/// integral flow amounts can be lifted into.
pub trait CostScalar: Num + Signed + Ord + Clone + Debug {
    /// Lift a flow amount (product units) into the cost scalar.
    fn from_units(units: i64) -> Self;

    /// Best-effort conversion for reporting.
    fn to_f64_lossy(&self) -> f64;
}

impl CostScalar for i64 {
    fn from_units(units: i64) -> Self {
        units
    }

    fn to_f64_lossy(&self) -> f64 {
        *self as f64
    }
}

impl CostScalar for BigRational {
    fn from_units(units: i64) -> Self {
        BigRational::from_i64(units).expect("i64 always lifts to BigRational")
    }

    fn to_f64_lossy(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}
