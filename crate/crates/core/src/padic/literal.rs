//! Text forms of p-adic values.
//!
//! Three literal shapes are accepted everywhere a value is read:
//!
//! * an integer, `-5`
//! * a fraction whose denominator is a power of p, `1/3` or `2/27`
//! * a digit string in the usual p-adic orientation, most significant digit
//!   on the left, prefixed with `…` or `...`: `…0012` is 5 when p = 3. A point
//!   separates the negative positions, `…1.2` is 1 + 2/p. For p > 10 the
//!   digits are comma separated: `…12,0,3`.
//!
//! Integers and fractions are exact and take the caller's precision; a digit
//! string carries its own precision, one past its most significant position.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::scalar::{ExactScalar, PadicScalar};
use crate::error::{Error, Result};

enum Literal {
    Rational { num: BigInt, den_exp: u32 },
    Digits { digits_le: Vec<u32>, low: i64 },
}

fn parse_int(text: &str) -> Result<BigInt> {
    text.trim()
        .parse::<BigInt>()
        .map_err(|_| Error::MalformedLiteral(text.to_string()))
}

fn parse_digit_block(p: u32, block: &str, whole: &str) -> Result<Vec<u32>> {
    if block.is_empty() {
        return Ok(Vec::new());
    }
    let digits: Vec<u32> = if p > 10 {
        block
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::MalformedLiteral(whole.to_string()))?
    } else {
        block
            .chars()
            .map(|c| c.to_digit(10))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::MalformedLiteral(whole.to_string()))?
    };
    if let Some(d) = digits.iter().find(|&&d| d >= p) {
        return Err(Error::MalformedLiteral(format!(
            "{whole}: digit {d} out of range for p = {p}"
        )));
    }
    Ok(digits)
}

fn parse(p: u32, text: &str) -> Result<Literal> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::MalformedLiteral(text.to_string()));
    }
    let body = t.strip_prefix('…').or_else(|| t.strip_prefix("..."));
    if let Some(body) = body {
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        let int_digits = parse_digit_block(p, int_part, t)?;
        let frac_digits = parse_digit_block(p, frac_part, t)?;
        if int_digits.is_empty() && frac_digits.is_empty() {
            return Err(Error::MalformedLiteral(text.to_string()));
        }
        // written most significant first; store least significant first
        let low = -(frac_digits.len() as i64);
        let digits_le: Vec<u32> = frac_digits
            .iter()
            .rev()
            .chain(int_digits.iter().rev())
            .copied()
            .collect();
        return Ok(Literal::Digits { digits_le, low });
    }
    if let Some((num, den)) = t.split_once('/') {
        let num = parse_int(num)?;
        let den = parse_int(den)?;
        if den <= BigInt::zero() {
            return Err(Error::DenominatorNotPPower(t.to_string()));
        }
        let pb = BigInt::from(p);
        let mut rest = den;
        let mut den_exp = 0u32;
        while !rest.is_one() {
            if (&rest % &pb).is_zero() {
                rest /= &pb;
                den_exp += 1;
            } else {
                return Err(Error::DenominatorNotPPower(t.to_string()));
            }
        }
        return Ok(Literal::Rational { num, den_exp });
    }
    Ok(Literal::Rational {
        num: parse_int(t)?,
        den_exp: 0,
    })
}

/// Parses a literal. `prec` applies to exact literals (integers, fractions);
/// digit strings carry their own precision.
pub fn parse_literal(p: u32, text: &str, prec: i64) -> Result<PadicScalar> {
    match parse(p, text)? {
        Literal::Rational { num, den_exp } => PadicScalar::from_rational(p, &num, den_exp, prec),
        Literal::Digits { digits_le, low } => {
            let top = low + digits_le.len() as i64;
            PadicScalar::from_digits(p, &digits_le, low, top)
        }
    }
}

/// Parses a literal as an exact value; a digit string denotes the finite
/// expansion it spells.
pub fn parse_exact(p: u32, text: &str) -> Result<ExactScalar> {
    match parse(p, text)? {
        Literal::Rational { num, den_exp } => Ok(ExactScalar::new(p, num, -(den_exp as i64))),
        Literal::Digits { digits_le, low } => {
            let mut n = BigUint::zero();
            for &d in digits_le.iter().rev() {
                n = n * p + d;
            }
            Ok(ExactScalar::new(p, BigInt::from(n), low))
        }
    }
}

/// Formats the digits of `u` at positions below `min(j, prec)`, most
/// significant first, in the grammar `parse_literal` reads back.
pub fn format_digits(u: &PadicScalar, j: i64) -> String {
    let p = u.p();
    let top = j.min(u.prec());
    let low = -(u.scale() as i64);
    let digit_at = |i: i64| u.digit(i).unwrap_or(0);
    let render = |range: Vec<i64>| -> String {
        let parts: Vec<String> = range.into_iter().map(|i| digit_at(i).to_string()).collect();
        if p > 10 {
            parts.join(",")
        } else {
            parts.concat()
        }
    };
    let int_part = render((0.max(low)..top.max(0)).rev().collect());
    let frac_part = render((low..0.min(top)).rev().collect());
    let mut out = String::from("…");
    if int_part.is_empty() && frac_part.is_empty() {
        // nothing known below the precision: spell the zero digit string
        out.push('0');
        return out;
    }
    out.push_str(&int_part);
    if low < 0 {
        out.push('.');
        out.push_str(&frac_part);
    }
    out
}

/// JSON/CSV interchange form: little-endian digits starting at `valuation`,
/// known to absolute precision `precision`. A value zero to precision has no
/// digits and `valuation == precision`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitRecord {
    pub digits: Vec<u32>,
    pub valuation: i64,
    pub precision: i64,
}

impl DigitRecord {
    pub fn from_scalar(u: &PadicScalar) -> Self {
        match u.valuation() {
            None => Self {
                digits: Vec::new(),
                valuation: u.prec(),
                precision: u.prec(),
            },
            Some(v) => {
                let all = u.digits_le();
                let offset = (v + u.scale() as i64) as usize;
                Self {
                    digits: all[offset..].to_vec(),
                    valuation: v,
                    precision: u.prec(),
                }
            }
        }
    }

    pub fn to_scalar(&self, p: u32) -> Result<PadicScalar> {
        PadicScalar::from_digits(p, &self.digits, self.valuation, self.precision)
    }
}
