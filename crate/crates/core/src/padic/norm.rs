use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A p-adic absolute value. Every nonzero norm is a power `p^(-val)`; a value
/// known only to some precision has a norm known only as an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    Zero,
    Exact { val: i64 },
    AtMost { prec: i64 },
}

impl Norm {
    pub const ONE: Norm = Norm::Exact { val: 0 };

    /// `p^(-val)`.
    pub fn from_val(val: i64) -> Self {
        Norm::Exact { val }
    }

    /// A guaranteed lower bound on the valuation, so that `self <= p^(-bound)`.
    pub fn val_bound(&self) -> i64 {
        match *self {
            Norm::Zero => i64::MAX,
            Norm::Exact { val } => val,
            Norm::AtMost { prec } => prec,
        }
    }

    /// Certifies `self <= other`. `other` is read as its upper bound.
    pub fn certainly_le(&self, other: &Norm) -> bool {
        match other {
            Norm::Zero => matches!(self, Norm::Zero),
            _ => self.val_bound() >= other.val_bound(),
        }
    }

    /// The larger of two bounds (the maximum of the upper bounds).
    pub fn max(self, other: Norm) -> Norm {
        if self.val_bound() <= other.val_bound() {
            self
        } else {
            other
        }
    }

    pub fn to_f64(&self, p: u32) -> f64 {
        match *self {
            Norm::Zero => 0.0,
            Norm::Exact { val } => (p as f64).powi(-(val as i32)),
            Norm::AtMost { prec } => (p as f64).powi(-(prec as i32)),
        }
    }

    /// The value (or bound) as an exact rational.
    pub fn to_ratio(&self, p: u32) -> BigRational {
        let pow = |v: i64| -> BigRational {
            let base = BigInt::from(p).pow(v.unsigned_abs() as u32);
            if v >= 0 {
                BigRational::new(BigInt::one(), base)
            } else {
                BigRational::from_integer(base)
            }
        };
        match *self {
            Norm::Zero => BigRational::zero(),
            Norm::Exact { val } => pow(val),
            Norm::AtMost { prec } => pow(prec),
        }
    }

    /// Orders by the upper bound each variant guarantees.
    pub fn cmp_bound(&self, other: &Norm) -> Ordering {
        other.val_bound().cmp(&self.val_bound())
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Norm::Zero => write!(f, "0"),
            Norm::Exact { val } => write!(f, "p^{}", -val),
            Norm::AtMost { prec } => write!(f, "<= p^{}", -prec),
        }
    }
}
