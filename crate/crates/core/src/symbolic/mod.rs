//! Coding of the attractor by bisequences.
//!
//! A window `s_-m … s_n` is decoded as the orbit `(x_k)` of the scalar
//! recurrence `x_{k+1} = a x_{k-1} + φ(x_k)` with `x_k ≡ s_k (mod p)` for
//! `-m <= k <= n` and `x_{-m-1} = x_{n+1} = 0`. The decoded point is
//! `(x_0, x_{-1})`: the intersection of the vertical curve of `s_0 … s_n 0`
//! with the horizontal curve of `0 s_-m … s_-1`. Two routes compute it:
//! a Gauss-Seidel sweep over the window ([`Coder::decode`]) and the nested
//! curve evaluators of [`curves`] ([`Coder::decode_reference`]).

pub mod curves;
pub mod window;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

pub use curves::{CurveEvaluator, CurveKind};
pub use window::ItineraryWindow;

use crate::dynamics::PlaneMap;
use crate::error::{Error, Result};
use crate::padic::{FieldParams, Norm, PadicScalar, Point, PointRecord};

/// Default cap on fixed-point solves in one curve evaluation.
pub const DEFAULT_RECURSION_LIMIT: usize = 2_000_000;

/// `p^(-e)` as an exact rational.
pub fn inverse_power(p: u32, e: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(p).pow(e))
}

/// `(δ_n, ε_m)` with `δ_n = q^-(n+1)` and `ε_m = |a|^m q^-(m+1)`.
pub fn tube_radii(params: &FieldParams, m: usize, n: usize) -> (BigRational, BigRational) {
    let p = params.p();
    let v = params.val_a() as u32;
    let delta = inverse_power(p, n as u32 + 1);
    let eps = inverse_power(p, v * m as u32 + m as u32 + 1);
    (delta, eps)
}

/// Radius of the ball known to contain `ω(s)` for every bisequence `s`
/// extending a window of shape `(m, n)`: `max(δ_n, ε_{m-1})`, or 1 when no
/// backward symbol is known.
pub fn window_radius(params: &FieldParams, m: usize, n: usize) -> BigRational {
    if m == 0 {
        return BigRational::one();
    }
    let (delta, _) = tube_radii(params, 0, n);
    let (_, eps) = tube_radii(params, m - 1, 0);
    delta.max(eps)
}

/// A decoded window with its guaranteed radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedPoint {
    pub window: ItineraryWindow,
    pub point: Point,
    pub radius: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedRecord {
    pub window: String,
    #[serde(flatten)]
    pub point: PointRecord,
    pub radius: String,
}

impl DecodedPoint {
    pub fn record(&self) -> DecodedRecord {
        DecodedRecord {
            window: self.window.to_string(),
            point: PointRecord::from(&self.point),
            radius: self.radius.to_string(),
        }
    }
}

/// Encoder/decoder for one map at a working precision.
#[derive(Debug, Clone)]
pub struct Coder {
    map: PlaneMap,
    precision: i64,
    recursion_limit: usize,
}

impl Coder {
    pub fn new(map: PlaneMap) -> Self {
        let precision = map.params().default_precision();
        Self {
            map,
            precision,
            recursion_limit: DEFAULT_RECURSION_LIMIT,
        }
    }

    pub fn canonical() -> Self {
        Self::new(PlaneMap::canonical())
    }

    pub fn with_precision(mut self, precision: i64) -> Self {
        self.precision = precision;
        self
    }

    pub fn with_recursion_limit(mut self, limit: usize) -> Self {
        self.recursion_limit = limit;
        self
    }

    pub fn map(&self) -> &PlaneMap {
        &self.map
    }

    pub fn params(&self) -> &FieldParams {
        self.map.params()
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn tube_radii(&self, m: usize, n: usize) -> (BigRational, BigRational) {
        tube_radii(self.params(), m, n)
    }

    pub fn radius(&self, w: &ItineraryWindow) -> BigRational {
        window_radius(self.params(), w.m(), w.n())
    }

    /// Enough digits to decode `w` and still re-encode it in both directions.
    pub fn working_precision(&self, w: &ItineraryWindow) -> i64 {
        let v = self.params().val_a();
        self.precision.max(w.m() as i64 * (1 + v) + 2).max(w.n() as i64 + 2)
    }

    /// The `x ≡ s (mod p)` with `φ(x) + drag = t_next`, to one digit more
    /// than `t_next - drag` carries.
    pub fn local_digit_solve(&self, t_next: &PadicScalar, drag: &PadicScalar, s: u32) -> Result<PadicScalar> {
        self.solve_phi(&t_next.sub(drag)?, s, None)
    }

    /// Iterates `x ← x^p - c/b` in the disc of `s`. The map contracts by
    /// `1/p`, so two equal iterates mean the fixed point is reached.
    fn solve_phi(&self, c: &PadicScalar, s: u32, start: Option<&PadicScalar>) -> Result<PadicScalar> {
        let p = self.map.p();
        if s >= p {
            return Err(Error::InvalidSymbol { symbol: s, p });
        }
        if !c.is_integral() {
            return Err(Error::NotIntegral);
        }
        if c.prec() < 0 {
            return Err(Error::PrecisionExhausted { index: None });
        }
        let target = c.prec() + 1;
        let shift = c.div_by(self.params().b())?;
        let mut x = match start {
            Some(x0) if x0.residue() == Ok(s) => x0.lift(target).truncate(target)?,
            _ => PadicScalar::from_i64(p, s as i64, target)?,
        };
        for _ in 0..=target + 1 {
            let next = x.pow(p)?.sub(&shift)?.truncate(target)?;
            if next == x {
                if x.residue() != Ok(s) {
                    return Err(Error::NoSolutionInDisc);
                }
                return Ok(x);
            }
            x = next;
        }
        Err(Error::NoSolutionInDisc)
    }

    /// Solves the recurrence along `chain` (time order) by Gauss-Seidel
    /// sweeps, with zero boundary values or cyclic ones.
    fn solve_chain(&self, chain: &[u32], cyclic: bool, prec: i64) -> Result<Vec<PadicScalar>> {
        let p = self.map.p();
        let a = self.params().a();
        let len = chain.len();
        let boundary = PadicScalar::zero(p, prec);
        let mut xs = chain
            .iter()
            .map(|&s| PadicScalar::from_i64(p, s as i64, prec))
            .collect::<Result<Vec<_>>>()?;
        for _ in 0..=prec + 2 {
            let mut changed = false;
            for k in 0..len {
                let next = match (k + 1 < len, cyclic) {
                    (true, _) => &xs[k + 1],
                    (false, true) => &xs[0],
                    (false, false) => &boundary,
                };
                let prev = match (k > 0, cyclic) {
                    (true, _) => &xs[k - 1],
                    (false, true) => &xs[len - 1],
                    (false, false) => &boundary,
                };
                let c = next.sub(&prev.scale_by(a)?)?;
                let x = self.solve_phi(&c, chain[k], Some(&xs[k]))?.truncate(prec)?;
                if x != xs[k] {
                    xs[k] = x;
                    changed = true;
                }
            }
            if !changed {
                return Ok(xs);
            }
        }
        Err(Error::PrecisionExhausted { index: None })
    }

    /// Symbols `s_0 … s_n` of the forward orbit of `pt`.
    pub fn encode_forward(&self, pt: &Point, n: usize) -> Result<Vec<u32>> {
        if !pt.in_unit_polydisc() {
            return Err(Error::NotInUnitPolydisc);
        }
        let seg = self.map.forward_orbit(pt, n)?;
        seg.points.iter().map(|q| q.x.residue()).collect()
    }

    /// Symbols `s_-1 … s_-m`, after certifying `pt ∈ T^m(R^2)`.
    pub fn encode_backward(&self, pt: &Point, m: usize) -> Result<Vec<u32>> {
        let seg = self.map.backward_orbit(pt, m)?;
        (0..m as i64)
            .map(|k| seg.at(-k).expect("segment covers [-m, 0]").y.residue())
            .collect()
    }

    pub fn encode(&self, pt: &Point, m: usize, n: usize) -> Result<ItineraryWindow> {
        ItineraryWindow::new(self.map.p(), self.encode_backward(pt, m)?, self.encode_forward(pt, n)?)
    }

    /// The decoded point of `w` to `prec` digits, without re-encoding.
    pub fn decode_point(&self, w: &ItineraryWindow, prec: i64) -> Result<Point> {
        self.check_prime(w)?;
        let xs = self.solve_chain(&w.chain(), false, prec)?;
        let m = w.m();
        let y = if m > 0 {
            xs[m - 1].clone()
        } else {
            PadicScalar::zero(self.map.p(), prec)
        };
        Point::new(xs[m].clone(), y)
    }

    /// `(x_0 mod p^prec, x_-1 mod p^prec)` by the same sweep in machine
    /// integers. Falls back to [`Coder::decode_point`] when `p^prec` does not
    /// fit in 62 bits.
    pub fn decode_residues(&self, w: &ItineraryWindow, prec: u32) -> Result<(u64, u64)> {
        self.check_prime(w)?;
        let p = self.map.p() as u128;
        let modulus = match p.checked_pow(prec) {
            Some(m) if m < 1 << 62 => m,
            _ => {
                let pt = self.decode_point(w, prec as i64)?;
                let to_u64 = |u: num_bigint::BigUint| {
                    u.to_u64()
                        .ok_or_else(|| Error::InvalidParams("residue exceeds 64 bits".into()))
                };
                return Ok((to_u64(pt.x.reduce_mod(prec)?)?, to_u64(pt.y.reduce_mod(prec)?)?));
            }
        };
        let reduce = |z: &BigInt| -> u128 {
            z.mod_floor(&BigInt::from(modulus))
                .to_u128()
                .expect("reduced below the modulus")
        };
        let params = self.params();
        let a = reduce(params.a().unit_part()) * reduce(&BigInt::from(p).pow(params.val_a() as u32)) % modulus;
        // c / b = c * p * b_unit^-1
        let b_unit = reduce(params.b().unit_part()) as i128;
        let inv = (b_unit.extended_gcd(&(modulus as i128)).x).rem_euclid(modulus as i128) as u128;
        let coef = p * inv % modulus;
        let chain = w.chain();
        let len = chain.len();
        let mut xs: Vec<u128> = chain.iter().map(|&s| s as u128).collect();
        let pow = |x: u128| -> u128 {
            let mut acc = 1u128;
            for _ in 0..p {
                acc = acc * x % modulus;
            }
            acc
        };
        for _ in 0..=prec + 2 {
            let mut changed = false;
            for k in 0..len {
                let next = if k + 1 < len { xs[k + 1] } else { 0 };
                let prev = if k > 0 { xs[k - 1] } else { 0 };
                let c = (next + modulus - a * prev % modulus) % modulus;
                let shift = c * coef % modulus;
                let mut x = xs[k];
                for _ in 0..=prec + 1 {
                    let nx = (pow(x) + modulus - shift) % modulus;
                    if nx == x {
                        break;
                    }
                    x = nx;
                }
                if x % p != chain[k] as u128 {
                    return Err(Error::NoSolutionInDisc);
                }
                if x != xs[k] {
                    xs[k] = x;
                    changed = true;
                }
            }
            if !changed {
                let m = w.m();
                let y = if m > 0 { xs[m - 1] } else { 0 };
                return Ok((xs[m] as u64, y as u64));
            }
        }
        Err(Error::PrecisionExhausted { index: None })
    }

    /// `ω` at finite depth: the decoded point, re-encoded to confirm it
    /// reproduces `w`, with its radius.
    pub fn decode(&self, w: &ItineraryWindow) -> Result<DecodedPoint> {
        let point = self.decode_point(w, self.working_precision(w))?;
        let fwd = self.encode_forward(&point, w.n())?;
        let back = self.encode_backward(&point, w.m())?;
        if fwd != w.fwd() || back != w.back() {
            return Err(Error::CodingMismatch { window: w.to_string() });
        }
        Ok(DecodedPoint {
            window: w.clone(),
            radius: self.radius(w),
            point,
        })
    }

    /// Decoding by alternating the curve evaluators from `y = 0`.
    pub fn decode_reference(&self, w: &ItineraryWindow) -> Result<DecodedPoint> {
        let prec = self.working_precision(w);
        let start = PadicScalar::zero(self.map.p(), prec);
        let point = self.decode_reference_from(w, &start, prec)?;
        Ok(DecodedPoint {
            window: w.clone(),
            radius: self.radius(w),
            point,
        })
    }

    /// Alternates `x = f(y)`, `y = g(x)` from an arbitrary `y ∈ Z_p`. Round
    /// `r` fixes `r` digits of both coordinates.
    pub fn decode_reference_from(&self, w: &ItineraryWindow, start_y: &PadicScalar, prec: i64) -> Result<Point> {
        self.check_prime(w)?;
        if !start_y.is_integral() {
            return Err(Error::NotIntegral);
        }
        let mut fwd = w.fwd().to_vec();
        fwd.push(0);
        let mut back = w.back().to_vec();
        back.push(0);
        let mut f = CurveEvaluator::new(&self.map, CurveKind::Vertical, &fwd, self.recursion_limit)?;
        let mut g = CurveEvaluator::new(&self.map, CurveKind::Horizontal, &back, self.recursion_limit)?;
        let mut x = PadicScalar::zero(self.map.p(), 0);
        let mut y = start_y.truncate(0)?;
        for r in 1..=prec {
            x = f.eval_top(&y, r)?;
            y = g.eval_top(&x, r)?;
        }
        Point::new(x, y)
    }

    /// `f_n` of the symbols `s_0 … s_n` at `t`, to `prec` digits.
    pub fn vertical_curve_eval(&self, fwd: &[u32], t: &PadicScalar, prec: i64) -> Result<PadicScalar> {
        CurveEvaluator::new(&self.map, CurveKind::Vertical, fwd, self.recursion_limit)?.eval_top(t, prec)
    }

    /// `g_m` of the symbols `s_-1 … s_-m` (in that order) at `t`.
    pub fn horizontal_curve_eval(&self, back: &[u32], t: &PadicScalar, prec: i64) -> Result<PadicScalar> {
        CurveEvaluator::new(&self.map, CurveKind::Horizontal, back, self.recursion_limit)?.eval_top(t, prec)
    }

    /// `‖T(ω(w)) - ω(σ w)‖`.
    pub fn conjugacy_residual(&self, w: &ItineraryWindow) -> Result<Norm> {
        let shifted = w.shift()?;
        let here = self.decode(w)?;
        let there = self.decode(&shifted)?;
        self.map.step(&here.point)?.distance(&there.point)
    }

    /// The point with the forward itinerary of `pt` to depth `n` and the
    /// backward symbols `new_back` (`s_-1` first).
    pub fn stable_companion(&self, pt: &Point, new_back: &[u32], n: usize) -> Result<DecodedPoint> {
        let fwd = self.encode_forward(pt, n)?;
        let w = ItineraryWindow::new(self.map.p(), new_back.to_vec(), fwd)?;
        self.decode(&w)
    }

    /// The periodic point whose itinerary repeats `s_-m … s_n`, so that
    /// `T^(m+n+1)` fixes it and its coding extends `w`.
    pub fn periodic_point(&self, w: &ItineraryWindow) -> Result<Point> {
        self.check_prime(w)?;
        let chain = w.chain();
        let prec = self.working_precision(w);
        let xs = self.solve_chain(&chain, true, prec)?;
        let m = w.m();
        let len = chain.len();
        Point::new(xs[m].clone(), xs[(m + len - 1) % len].clone())
    }

    fn check_prime(&self, w: &ItineraryWindow) -> Result<()> {
        if w.p() != self.map.p() {
            return Err(Error::PrimeMismatch(w.p(), self.map.p()));
        }
        Ok(())
    }
}
