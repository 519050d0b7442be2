use std::cell::RefCell;
use std::cmp::{max, min};
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::norm::Norm;
use crate::error::{Error, Result};

thread_local! {
    static POW_CACHE: RefCell<HashMap<(u32, u32), Rc<BigUint>>> = RefCell::new(HashMap::new());
}

const POW_CACHE_LIMIT: usize = 8192;

/// `p^e`, memoized per thread. Long orbits ask for the same handful of
/// moduli over and over.
pub(crate) fn ppow(p: u32, e: u32) -> Rc<BigUint> {
    POW_CACHE.with(|cache| {
        let mut cache = cache.borrow_mut();
        if let Some(v) = cache.get(&(p, e)) {
            return Rc::clone(v);
        }
        if cache.len() >= POW_CACHE_LIMIT {
            cache.clear();
        }
        let v = Rc::new(BigUint::from(p).pow(e));
        cache.insert((p, e), Rc::clone(&v));
        v
    })
}

/// Exponent of `p` dividing `n` (n > 0).
pub(crate) fn valuation_of(p: u32, n: &BigUint) -> u64 {
    debug_assert!(!n.is_zero());
    let pb = BigUint::from(p);
    let mut count = 0;
    let mut cur = n.clone();
    loop {
        let (q, r) = cur.div_rem(&pb);
        if !r.is_zero() {
            return count;
        }
        cur = q;
        count += 1;
    }
}

fn to_u32(e: i64) -> u32 {
    u32::try_from(e).expect("p-adic exponent out of range")
}

/// An element of Q_p known to a finite absolute precision.
///
/// The represented class is `coeff * p^(-scale) + p^prec * Z_p`. The
/// representation is canonical: `0 <= coeff < p^(scale + prec)`, and `scale`
/// is the smallest nonnegative shift that makes `coeff` an integer, so two
/// scalars are equal exactly when they denote the same class.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    p: u32,
    coeff: BigUint,
    scale: u32,
    prec: i64,
}

impl PadicScalar {
    /// Builds a canonical scalar from `coeff * p^(-scale)` known modulo `p^prec`.
    ///
    /// Fails with `PrecisionExhausted` when the class is not even known to lie
    /// in Z_p, i.e. the value is zero to a negative absolute precision.
    pub(crate) fn normalize(p: u32, coeff: BigUint, scale: i64, prec: i64) -> Result<Self> {
        let (mut coeff, mut scale) = if scale < 0 {
            (coeff * &*ppow(p, to_u32(-scale)), 0i64)
        } else {
            (coeff, scale)
        };
        let modexp = scale + prec;
        if modexp <= 0 {
            coeff = BigUint::zero();
        } else {
            coeff %= &*ppow(p, to_u32(modexp));
        }
        if coeff.is_zero() {
            if prec < 0 {
                return Err(Error::PrecisionExhausted { index: None });
            }
            return Ok(Self {
                p,
                coeff,
                scale: 0,
                prec,
            });
        }
        if scale > 0 {
            let pb = BigUint::from(p);
            while scale > 0 {
                let (q, r) = coeff.div_rem(&pb);
                if !r.is_zero() {
                    break;
                }
                coeff = q;
                scale -= 1;
            }
        }
        Ok(Self {
            p,
            coeff,
            scale: to_u32(scale),
            prec,
        })
    }

    pub fn zero(p: u32, prec: i64) -> Self {
        assert!(prec >= 0, "zero needs a nonnegative precision");
        Self {
            p,
            coeff: BigUint::zero(),
            scale: 0,
            prec,
        }
    }

    pub fn from_i64(p: u32, value: i64, prec: i64) -> Result<Self> {
        Self::from_bigint(p, &BigInt::from(value), prec)
    }

    pub fn from_bigint(p: u32, value: &BigInt, prec: i64) -> Result<Self> {
        Self::from_rational(p, value, 0, prec)
    }

    /// The class of `num / p^den_exp` at absolute precision `prec`.
    pub fn from_rational(p: u32, num: &BigInt, den_exp: u32, prec: i64) -> Result<Self> {
        let modexp = den_exp as i64 + prec;
        let coeff = if modexp <= 0 {
            BigUint::zero()
        } else {
            let m = BigInt::from_biguint(Sign::Plus, (*ppow(p, to_u32(modexp))).clone());
            num.mod_floor(&m).to_biguint().expect("mod_floor is nonnegative")
        };
        Self::normalize(p, coeff, den_exp as i64, prec)
    }

    /// Builds from base-p digits, `digits[i]` being the coefficient of
    /// `p^(valuation + i)`, known to absolute precision `prec`.
    pub fn from_digits(p: u32, digits: &[u32], valuation: i64, prec: i64) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::MalformedLiteral(format!("digit {d} out of range for p = {p}")));
        }
        let coeff = if digits.is_empty() {
            BigUint::zero()
        } else {
            from_digits_le(p, digits)
        };
        Self::normalize(p, coeff, -valuation, prec)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeff(&self) -> &BigUint {
        &self.coeff
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// Absolute precision exponent `k`: the true value lies within `p^(-k)`.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// True when the representative is zero, i.e. the value is only known to
    /// have norm at most `p^(-prec)`.
    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Valuation of the representative, or `None` when it is zero to precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeff.is_zero() {
            None
        } else if self.scale > 0 {
            Some(-(self.scale as i64))
        } else {
            Some(valuation_of(self.p, &self.coeff) as i64)
        }
    }

    /// A guaranteed lower bound for the valuation of the true value.
    pub fn valuation_lower_bound(&self) -> i64 {
        self.valuation().unwrap_or(self.prec)
    }

    /// Relative precision in digits (0 for values zero to precision).
    pub fn relative_prec(&self) -> i64 {
        match self.valuation() {
            Some(v) => self.prec - v,
            None => 0,
        }
    }

    /// Integrality is always decidable in this representation: a zero
    /// representative carries a nonnegative precision.
    pub fn is_integral(&self) -> bool {
        self.scale == 0
    }

    /// Is the value a unit of Z_p (norm exactly 1)?
    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    fn aligned(&self, other: &Self) -> (BigUint, BigUint, u32) {
        let e = max(self.scale, other.scale);
        let a = if e > self.scale {
            &self.coeff * &*ppow(self.p, e - self.scale)
        } else {
            self.coeff.clone()
        };
        let b = if e > other.scale {
            &other.coeff * &*ppow(self.p, e - other.scale)
        } else {
            other.coeff.clone()
        };
        (a, b, e)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let (a, b, e) = self.aligned(other);
        Self::normalize(self.p, a + b, e as i64, min(self.prec, other.prec))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let (a, b, e) = self.aligned(other);
        let prec = min(self.prec, other.prec);
        let modexp = e as i64 + prec;
        if modexp <= 0 {
            return Self::normalize(self.p, BigUint::zero(), e as i64, prec);
        }
        let m = ppow(self.p, to_u32(modexp));
        let diff = (a % &*m + &*m - b % &*m) % &*m;
        Self::normalize(self.p, diff, e as i64, prec)
    }

    pub fn neg(&self) -> Self {
        if self.coeff.is_zero() {
            return self.clone();
        }
        let m = ppow(self.p, to_u32(self.scale as i64 + self.prec));
        Self {
            p: self.p,
            coeff: &*m - &self.coeff,
            scale: self.scale,
            prec: self.prec,
        }
    }

    /// Product with precision `min(k_u + v(v), k_v + v(u))`, valuations taken
    /// as their guaranteed lower bounds.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let prec = min(
            self.prec + other.valuation_lower_bound(),
            other.prec + self.valuation_lower_bound(),
        );
        let scale = self.scale as i64 + other.scale as i64;
        let modexp = scale + prec;
        if modexp <= 0 || self.coeff.is_zero() || other.coeff.is_zero() {
            return Self::normalize(self.p, BigUint::zero(), scale, prec);
        }
        let m = ppow(self.p, to_u32(modexp));
        let prod = (&self.coeff % &*m) * (&other.coeff % &*m);
        Self::normalize(self.p, prod, scale, prec)
    }

    /// Quotient. Dividing by a value of valuation `w` costs `w` digits, plus
    /// the error of the divisor itself.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let vv = other.valuation().ok_or(Error::DivisionByZero)?;
        let prec = min(self.prec - vv, self.valuation_lower_bound() + other.prec - 2 * vv);
        // other = unit * p^vv with unit = coeff / p^(vv + scale)
        let strip = to_u32(vv + other.scale as i64);
        let unit = &other.coeff / &*ppow(self.p, strip);
        let scale = self.scale as i64 + vv;
        self.times_unit_inverse(&unit, false, scale, prec)
    }

    /// `self.coeff * unit^(-1) * (-1 if negate)` placed at `scale`, reduced at `prec`.
    pub(crate) fn times_unit_inverse(&self, unit: &BigUint, negate: bool, scale: i64, prec: i64) -> Result<Self> {
        let (coeff, scale) = if scale < 0 {
            (&self.coeff * &*ppow(self.p, to_u32(-scale)), 0)
        } else {
            (self.coeff.clone(), scale)
        };
        let modexp = scale + prec;
        if modexp <= 0 || coeff.is_zero() {
            return Self::normalize(self.p, BigUint::zero(), scale, prec);
        }
        let m = ppow(self.p, to_u32(modexp));
        let inv = unit.modinv(&m).expect("p-adic unit is invertible modulo p^k");
        let mut prod = (coeff % &*m) * inv % &*m;
        if negate && !prod.is_zero() {
            prod = &*m - prod;
        }
        Self::normalize(self.p, prod, scale, prec)
    }

    /// `self^n` with the binomial precision bound
    /// `min_j v(C(n,j)) + (n-j) v(x) + j k`, which is sharper than repeated
    /// multiplication (for a unit and `n = p` it gains a digit).
    pub fn pow(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Self::normalize(self.p, BigUint::one(), 0, i64::MAX / 4);
        }
        let lam = self.valuation_lower_bound();
        let k = self.prec;
        let prec = (1..=n)
            .map(|j| binomial_valuation(self.p, n as u64, j as u64) + (n - j) as i64 * lam + j as i64 * k)
            .min()
            .expect("n >= 1");
        let scale = self.scale as i64 * n as i64;
        let modexp = scale + prec;
        if modexp <= 0 || self.coeff.is_zero() {
            return Self::normalize(self.p, BigUint::zero(), scale, prec);
        }
        let m = ppow(self.p, to_u32(modexp));
        let pw = self.coeff.modpow(&BigUint::from(n), &m);
        Self::normalize(self.p, pw, scale, prec)
    }

    /// Drops precision to `prec` (no-op if already coarser).
    pub fn truncate(&self, prec: i64) -> Result<Self> {
        if prec >= self.prec {
            return Ok(self.clone());
        }
        Self::normalize(self.p, self.coeff.clone(), self.scale as i64, prec)
    }

    /// Reinterprets the representative as known to `prec` digits. This is a
    /// claim about the representative, used where a concrete iterate (not an
    /// uncertain measurement) is fed back into a computation.
    pub fn lift(&self, prec: i64) -> Self {
        if prec <= self.prec {
            return self.clone();
        }
        Self { prec, ..self.clone() }
    }

    /// Norm of the value: `p^(-v)` when the valuation is determined, otherwise
    /// only the bound `<= p^(-prec)`.
    pub fn pnorm(&self) -> Norm {
        match self.valuation() {
            Some(v) => Norm::Exact { val: v },
            None => Norm::AtMost { prec: self.prec },
        }
    }

    /// Norm of the representative taken as an exact number.
    pub fn pnorm_exact(&self) -> Norm {
        match self.valuation() {
            Some(v) => Norm::Exact { val: v },
            None => Norm::Zero,
        }
    }

    /// The representative of `u mod p^j` in `[0, p^j)`.
    pub fn reduce_mod(&self, j: u32) -> Result<BigUint> {
        if !self.is_integral() {
            return Err(Error::NotIntegral);
        }
        if self.prec < j as i64 {
            return Err(Error::InsufficientPrecision {
                needed: j as i64,
                available: self.prec,
            });
        }
        Ok(&self.coeff % &*ppow(self.p, j))
    }

    /// `reduce_mod(1)` as a symbol.
    pub fn residue(&self) -> Result<u32> {
        Ok(self.reduce_mod(1)?.to_u32().expect("residue below p"))
    }

    /// The coefficient of `p^i` in the canonical expansion. Positions at or
    /// beyond the precision are unknown and reported as `None`.
    pub fn digit(&self, i: i64) -> Option<u32> {
        if i >= self.prec {
            return None;
        }
        let shift = i + self.scale as i64;
        if shift < 0 {
            return Some(0);
        }
        let d = (&self.coeff / &*ppow(self.p, to_u32(shift))) % BigUint::from(self.p);
        Some(d.to_u32().expect("digit below p"))
    }

    /// Known digits from position `-scale` up to `prec - 1`, little-endian.
    pub fn digits_le(&self) -> Vec<u32> {
        let count = self.scale as i64 + self.prec;
        if count <= 0 {
            return Vec::new();
        }
        let mut digits = self.coeff.to_radix_le(self.p);
        if digits.len() == 1 && digits[0] == 0 {
            digits.clear();
        }
        let mut out: Vec<u32> = digits.into_iter().map(u32::from).collect();
        out.resize(count as usize, 0);
        out
    }

    /// The representative as a signed integer when integral and small.
    pub fn to_bigint(&self) -> Option<BigInt> {
        self.is_integral()
            .then(|| BigInt::from_biguint(Sign::Plus, self.coeff.clone()))
    }

    /// The representative nearest zero in the archimedean sense, as
    /// `(numerator, p-exponent of denominator)`. Useful to print small
    /// negative integers as such.
    pub fn balanced_rational(&self) -> (BigInt, u32) {
        let c = BigInt::from_biguint(Sign::Plus, self.coeff.clone());
        let modexp = self.scale as i64 + self.prec;
        if modexp <= 0 {
            return (c, self.scale);
        }
        let m = BigInt::from_biguint(Sign::Plus, (*ppow(self.p, to_u32(modexp))).clone());
        let half: BigInt = &m >> 1;
        let num = if c > half { c - m } else { c };
        (num, self.scale)
    }
}

fn from_digits_le(p: u32, digits: &[u32]) -> BigUint {
    if p <= 256 {
        let bytes: Vec<u8> = digits.iter().map(|&d| d as u8).collect();
        BigUint::from_radix_le(&bytes, p).expect("digits below p")
    } else {
        digits.iter().rev().fold(BigUint::zero(), |acc, &d| acc * p + d)
    }
}

/// v_p(n!) by Legendre's formula.
fn factorial_valuation(p: u64, n: u64) -> i64 {
    let mut total = 0;
    let mut pk = p;
    while pk <= n {
        total += n / pk;
        match pk.checked_mul(p) {
            Some(next) => pk = next,
            None => break,
        }
    }
    total as i64
}

fn binomial_valuation(p: u32, n: u64, j: u64) -> i64 {
    let p = p as u64;
    factorial_valuation(p, n) - factorial_valuation(p, j) - factorial_valuation(p, n - j)
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (p={}, O(p^{}))",
            super::literal::format_digits(self, self.prec),
            self.p,
            self.prec
        )
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = self.balanced_rational();
        if den == 0 {
            write!(f, "{num}")?;
        } else {
            write!(f, "{num}/{}^{den}", self.p)?;
        }
        write!(f, " + O({}^{})", self.p, self.prec)
    }
}

/// An exactly known element of Q_p: `num * p^val` with `num` prime to `p`
/// (or zero). Map parameters are held this way so they can be used at any
/// working precision without loss.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    p: u32,
    num: BigInt,
    val: i64,
}

impl ExactScalar {
    pub fn new(p: u32, num: BigInt, val: i64) -> Self {
        if num.is_zero() {
            return Self { p, num, val: 0 };
        }
        let pb = BigInt::from(p);
        let (mut num, mut val) = (num, val);
        loop {
            let (q, r) = num.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            num = q;
            val += 1;
        }
        Self { p, num, val }
    }

    pub fn from_i64(p: u32, v: i64) -> Self {
        Self::new(p, BigInt::from(v), 0)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Valuation; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.num.is_zero()).then_some(self.val)
    }

    pub fn unit_part(&self) -> &BigInt {
        &self.num
    }

    pub fn to_scalar(&self, prec: i64) -> Result<PadicScalar> {
        if self.val >= 0 {
            let n = &self.num * BigInt::from_biguint(Sign::Plus, (*ppow(self.p, to_u32(self.val))).clone());
            PadicScalar::from_rational(self.p, &n, 0, prec)
        } else {
            PadicScalar::from_rational(self.p, &self.num, to_u32(-self.val), prec)
        }
    }

    pub fn as_rational(&self) -> (BigInt, u32) {
        if self.val >= 0 {
            let n = &self.num * BigInt::from_biguint(Sign::Plus, (*ppow(self.p, to_u32(self.val))).clone());
            (n, 0)
        } else {
            (self.num.clone(), to_u32(-self.val))
        }
    }

    /// Magnitude of the unit part, with its sign split off.
    fn unit_mod(&self, m: &BigUint) -> (BigUint, bool) {
        let neg = self.num.is_negative();
        let mag = self.num.abs().to_biguint().expect("abs is nonnegative");
        (mag % m, neg)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.as_rational();
        if d == 0 {
            write!(f, "{n}")
        } else {
            write!(f, "{n}/{}", BigUint::from(self.p).pow(d))
        }
    }
}

impl PadicScalar {
    /// Product with an exactly known constant: precision shifts by `v(c)`.
    pub fn scale_by(&self, c: &ExactScalar) -> Result<Self> {
        if self.p != c.p {
            return Err(Error::PrimeMismatch(self.p, c.p));
        }
        if c.is_zero() {
            return Ok(Self::zero(self.p, max(self.prec, 0)));
        }
        let prec = self.prec + c.val;
        let scale = self.scale as i64 - c.val;
        let (coeff, scale) = if scale < 0 {
            (&self.coeff * &*ppow(self.p, to_u32(-scale)), 0)
        } else {
            (self.coeff.clone(), scale)
        };
        let modexp = scale + prec;
        if modexp <= 0 || coeff.is_zero() {
            return Self::normalize(self.p, BigUint::zero(), scale, prec);
        }
        let m = ppow(self.p, to_u32(modexp));
        let (u, neg) = c.unit_mod(&m);
        let mut prod = (coeff % &*m) * u % &*m;
        if neg && !prod.is_zero() {
            prod = &*m - prod;
        }
        Self::normalize(self.p, prod, scale, prec)
    }

    /// Quotient by an exactly known nonzero constant: precision drops by `v(c)`.
    pub fn div_by(&self, c: &ExactScalar) -> Result<Self> {
        if self.p != c.p {
            return Err(Error::PrimeMismatch(self.p, c.p));
        }
        if c.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let prec = self.prec - c.val;
        let scale = self.scale as i64 + c.val;
        let modexp = max(scale, 0) + prec;
        let m = if modexp > 0 {
            ppow(self.p, to_u32(modexp))
        } else {
            ppow(self.p, 0)
        };
        let (u, neg) = c.unit_mod(&m);
        let u = if u.is_zero() { BigUint::one() } else { u };
        self.times_unit_inverse(&u, neg, scale, prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: u32, v: i64, k: i64) -> PadicScalar {
        PadicScalar::from_i64(p, v, k).unwrap()
    }

    fn frac(p: u32, num: i64, den_exp: u32, k: i64) -> PadicScalar {
        PadicScalar::from_rational(p, &BigInt::from(num), den_exp, k).unwrap()
    }

    #[test]
    fn add_small_integers() {
        let r = s(3, 1, 10).add(&s(3, 2, 10)).unwrap();
        assert_eq!(r, s(3, 3, 10));
        assert_eq!(r.pnorm(), Norm::Exact { val: 1 });
    }

    #[test]
    fn multiply_by_zero_absorbs() {
        let x = s(3, 7, 10);
        let z = PadicScalar::zero(3, 10);
        let r = x.mul(&z).unwrap();
        assert!(r.is_zero());
        assert_eq!(r.prec(), 10);
    }

    #[test]
    fn inverse_pair_multiplies_to_one() {
        let r = frac(3, 1, 1, 10).mul(&s(3, 3, 10)).unwrap();
        assert_eq!(r.valuation(), Some(0));
        assert_eq!(r.reduce_mod(5).unwrap(), BigUint::from(1u32));
        assert_eq!(r.pnorm(), Norm::Exact { val: 0 });
    }

    #[test]
    fn division_examples() {
        let third = s(3, 1, 10).div(&s(3, 3, 20)).unwrap();
        assert_eq!(third.pnorm(), Norm::Exact { val: -1 });
        assert_eq!(third.scale(), 1);
        assert_eq!(third.coeff(), &BigUint::from(1u32));

        let two = s(3, 6, 10).div(&s(3, 3, 20)).unwrap();
        assert_eq!(two.reduce_mod(3).unwrap(), BigUint::from(2u32));
        assert_eq!(two.pnorm(), Norm::Exact { val: 0 });
    }

    #[test]
    fn division_by_exact_valuation_one_loses_one_digit() {
        let x = s(3, 17, 10);
        let a = ExactScalar::from_i64(3, 3);
        let q = x.div_by(&a).unwrap();
        assert_eq!(q.prec(), 9);
        // check against exact rational arithmetic: 17/3
        assert_eq!(q, frac(3, 17, 1, 9));
    }

    #[test]
    fn division_by_zero_to_precision() {
        assert_eq!(s(3, 1, 5).div(&PadicScalar::zero(3, 5)), Err(Error::DivisionByZero));
    }

    #[test]
    fn norms() {
        assert_eq!(s(3, 3, 10).pnorm(), Norm::Exact { val: 1 });
        assert_eq!(frac(3, 1, 1, 10).pnorm(), Norm::Exact { val: -1 });
        assert_eq!(s(3, 7, 10).pnorm(), Norm::Exact { val: 0 });
        assert_eq!(PadicScalar::zero(3, 4).pnorm(), Norm::AtMost { prec: 4 });
        assert_eq!(PadicScalar::zero(3, 4).pnorm_exact(), Norm::Zero);
    }

    #[test]
    fn reduce_mod_examples() {
        assert_eq!(s(3, 7, 10).reduce_mod(1).unwrap(), BigUint::from(1u32));
        assert_eq!(s(3, 7, 10).reduce_mod(2).unwrap(), BigUint::from(7u32));
        assert_eq!(frac(3, 1, 1, 10).reduce_mod(1), Err(Error::NotIntegral));
        assert_eq!(
            s(3, 7, 2).reduce_mod(3),
            Err(Error::InsufficientPrecision {
                needed: 3,
                available: 2
            })
        );
    }

    #[test]
    fn negative_integers_wrap() {
        let m1 = s(3, -1, 4);
        assert_eq!(m1.coeff(), &BigUint::from(80u32));
        assert_eq!(m1.add(&s(3, 1, 4)).unwrap(), PadicScalar::zero(3, 4));
        assert_eq!(m1.neg(), s(3, 1, 4));
        assert_eq!(m1.balanced_rational(), (BigInt::from(-1), 0));
    }

    #[test]
    fn sub_across_scales() {
        // 1/3 - 1/9 = 2/9
        let r = frac(3, 1, 1, 5).sub(&frac(3, 1, 2, 5)).unwrap();
        assert_eq!(r, frac(3, 2, 2, 5));
        // 1/3 - 1/3 = 0 at the common precision
        let z = frac(3, 1, 1, 5).sub(&frac(3, 1, 1, 7)).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.prec(), 5);
    }

    #[test]
    fn pow_gains_a_digit_for_units_at_exponent_p() {
        let x = s(3, 2, 5);
        let c = x.pow(3).unwrap();
        assert_eq!(c.prec(), 6);
        assert_eq!(c, s(3, 8, 6));
        // repeated multiplication stays at 5
        let m = x.mul(&x).unwrap().mul(&x).unwrap();
        assert_eq!(m.prec(), 5);
    }

    #[test]
    fn zero_below_integrality_is_exhausted() {
        let a = frac(3, 1, 1, 0);
        assert_eq!(a.prec(), 0);
        let z = PadicScalar::zero(3, 0);
        assert_eq!(a.mul(&z), Err(Error::PrecisionExhausted { index: None }));
    }

    #[test]
    fn exact_constants() {
        let b = ExactScalar::new(3, BigInt::from(1), -1);
        assert_eq!(b.valuation(), Some(-1));
        let x = s(3, 6, 10);
        let bx = x.scale_by(&b).unwrap();
        assert_eq!(bx, s(3, 2, 9));
        let neg = ExactScalar::from_i64(3, -6);
        assert_eq!(neg.valuation(), Some(1));
        assert_eq!(s(3, 1, 5).scale_by(&neg).unwrap(), s(3, -6, 6));
        assert_eq!(s(3, 12, 5).div_by(&neg).unwrap(), s(3, -2, 4));
    }

    #[test]
    fn digits_and_positions() {
        let x = s(3, 7, 4); // 7 = 1 + 2*3
        assert_eq!(x.digits_le(), vec![1, 2, 0, 0]);
        assert_eq!(x.digit(0), Some(1));
        assert_eq!(x.digit(1), Some(2));
        assert_eq!(x.digit(4), None);
        let y = frac(3, 5, 1, 2); // 5/3 = 2/3 + 1
        assert_eq!(y.digits_le(), vec![2, 1, 0]);
        assert_eq!(y.digit(-1), Some(2));
    }
}
