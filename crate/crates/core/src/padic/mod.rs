//! Precision-tracked arithmetic in Q_p.
//!
//! Values are residue classes `c * p^(-e) + p^k Z_p`. Every operation
//! propagates the absolute precision `k` by the ultrametric worst case, so a
//! digit that a result claims is a digit of the true value.

pub mod literal;
pub mod norm;
pub mod params;
pub mod point;
pub mod sample;
pub mod scalar;

pub use literal::{format_digits, parse_exact, parse_literal, DigitRecord};
pub use norm::Norm;
pub use params::FieldParams;
pub use point::{Point, PointRecord};
pub use sample::{haar_point, haar_sample, haar_sample_unit, seeded_rng};
pub use scalar::{ExactScalar, PadicScalar};

use crate::error::Result;

/// The three ring operations by name, for callers that dispatch on an
/// operator (the CLI, table-driven tests).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn arith(op: ArithOp, u: &PadicScalar, v: &PadicScalar) -> Result<PadicScalar> {
    match op {
        ArithOp::Add => u.add(v),
        ArithOp::Sub => u.sub(v),
        ArithOp::Mul => u.mul(v),
    }
}

pub fn pdiv(u: &PadicScalar, v: &PadicScalar) -> Result<PadicScalar> {
    u.div(v)
}

pub fn pnorm(u: &PadicScalar) -> Norm {
    u.pnorm()
}
