//! Exact arithmetic: integer polynomials, Sturm sequences, real-root
//! isolation and certified sign evaluation at real algebraic numbers.
//!
//! Rationals are `num_rational::BigRational`, which keeps every value in
//! lowest terms with a positive denominator.

mod factor;
mod poly;
mod roots;

use std::ops::Mul;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub use num_bigint::BigInt;
pub use num_rational::BigRational as BigRat;
pub use factor::{has_rational_root, is_irreducible, quadratic_split};
pub use poly::IntPoly;
pub use roots::{
    algebraic_sign, isolate_real_roots, real_root_count, sturm_count, sturm_sequence,
    RealAlgebraic, DEFAULT_BUDGET,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_int(x: &BigInt) -> Sign {
        if x.is_zero() {
            Sign::Zero
        } else if x.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn of_rat(x: &BigRational) -> Sign {
        Self::of_int(x.numer())
    }

    pub fn of_i128(x: i128) -> Sign {
        match x.signum() {
            0 => Sign::Zero,
            1 => Sign::Positive,
            _ => Sign::Negative,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, o: Sign) -> Sign {
        match self.as_i8() * o.as_i8() {
            0 => Sign::Zero,
            1 => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}
