use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Commutative semiring the counting routines are generic over: `f64` for
/// weighted counts and [`BigUint`] for exact counts on plain graphs.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add_assign_ref(&mut self, rhs: &Self);
    fn mul_ref(&self, rhs: &Self) -> Self;

    fn mul_assign_ref(&mut self, rhs: &Self) {
        *self = self.mul_ref(rhs);
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn mul_assign_ref(&mut self, rhs: &Self) {
        *self *= rhs;
    }
}

impl Scalar for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn mul_assign_ref(&mut self, rhs: &Self) {
        *self *= rhs;
    }
}
