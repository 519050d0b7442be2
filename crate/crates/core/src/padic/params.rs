use std::fmt;

use num_bigint::BigInt;

use super::literal::parse_exact;
use super::scalar::{ExactScalar, PadicScalar};
use crate::error::{Error, Result};

/// Trial division; p is always small here.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Field and map parameters: the prime `p` (the residue field has `q = p`
/// elements), the coefficients `a`, `b` of `T(x, y) = (a y + b (x^p - x), x)`
/// and a default working precision.
///
/// Invariants checked at construction: `p` prime, `0 < |a| < 1`, `|b| = p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldParams {
    p: u32,
    a: ExactScalar,
    b: ExactScalar,
    default_precision: i64,
}

impl FieldParams {
    pub fn new(p: u32, a: ExactScalar, b: ExactScalar, default_precision: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParams(format!("p = {p} is not prime")));
        }
        if a.p() != p || b.p() != p {
            return Err(Error::InvalidParams(
                "a and b must be elements of Q_p for the same p".into(),
            ));
        }
        match a.valuation() {
            Some(v) if v >= 1 => {}
            Some(_) => {
                return Err(Error::InvalidParams(format!(
                    "a = {a} violates 0 < |a| < 1 (|a| must be a negative power of p)"
                )))
            }
            None => return Err(Error::InvalidParams("a = 0 violates 0 < |a| < 1".into())),
        }
        if b.valuation() != Some(-1) {
            return Err(Error::InvalidParams(format!(
                "b = {b} violates |b| = q (b must have valuation -1)"
            )));
        }
        if default_precision < 1 {
            return Err(Error::InvalidParams("precision must be positive".into()));
        }
        Ok(Self {
            p,
            a,
            b,
            default_precision,
        })
    }

    /// Reads `a` and `b` from literals (see [`crate::padic::literal`]).
    pub fn from_literals(p: u32, a: &str, b: &str, default_precision: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParams(format!("p = {p} is not prime")));
        }
        Self::new(p, parse_exact(p, a)?, parse_exact(p, b)?, default_precision)
    }

    /// p = 3, a = 3, b = 1/3: |a| = 1/3, |b| = 3, attractor dimension 3/2.
    pub fn canonical() -> Self {
        Self::new(
            3,
            ExactScalar::from_i64(3, 3),
            ExactScalar::new(3, BigInt::from(1), -1),
            64,
        )
        .expect("canonical parameters are valid")
    }

    /// Canonical field with `a = 9` (|a| = 1/9, dimension 4/3).
    pub fn variant() -> Self {
        Self::new(
            3,
            ExactScalar::from_i64(3, 9),
            ExactScalar::new(3, BigInt::from(1), -1),
            64,
        )
        .expect("variant parameters are valid")
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Residue field order (equal to p over Q_p).
    pub fn q(&self) -> u32 {
        self.p
    }

    pub fn a(&self) -> &ExactScalar {
        &self.a
    }

    pub fn b(&self) -> &ExactScalar {
        &self.b
    }

    /// `v(a) >= 1`, so `|a| = p^(-val_a)`.
    pub fn val_a(&self) -> i64 {
        self.a.valuation().expect("a is nonzero")
    }

    pub fn default_precision(&self) -> i64 {
        self.default_precision
    }

    pub fn with_precision(&self, default_precision: i64) -> Result<Self> {
        Self::new(self.p, self.a.clone(), self.b.clone(), default_precision)
    }

    /// p = 2 runs but is flagged: the characteristic-2 residue field is not
    /// treated separately anywhere.
    pub fn is_experimental(&self) -> bool {
        self.p == 2
    }

    pub fn a_scalar(&self, prec: i64) -> Result<PadicScalar> {
        self.a.to_scalar(prec)
    }

    pub fn b_scalar(&self, prec: i64) -> Result<PadicScalar> {
        self.b.to_scalar(prec)
    }
}

impl fmt::Display for FieldParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p = {}, a = {}, b = {}", self.p, self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let primes: Vec<u32> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FieldParams::from_literals(4, "4", "1/4", 10).is_err());
        assert!(matches!(
            FieldParams::from_literals(3, "1", "1/3", 10),
            Err(Error::InvalidParams(_))
        ));
        assert!(FieldParams::from_literals(3, "0", "1/3", 10).is_err());
        assert!(FieldParams::from_literals(3, "3", "1/9", 10).is_err());
        assert!(FieldParams::from_literals(3, "3", "3", 10).is_err());
        assert!(FieldParams::from_literals(3, "3", "1/3", 0).is_err());
    }

    #[test]
    fn accepts_valid_parameters() {
        let fp = FieldParams::from_literals(5, "10", "2/5", 20).unwrap();
        assert_eq!(fp.val_a(), 1);
        let fp = FieldParams::from_literals(3, "…100", "-1/3", 20).unwrap();
        assert_eq!(fp.val_a(), 2);
        assert_eq!(FieldParams::canonical().val_a(), 1);
        assert_eq!(FieldParams::variant().val_a(), 2);
        assert!(FieldParams::from_literals(2, "2", "1/2", 8).unwrap().is_experimental());
    }
}
