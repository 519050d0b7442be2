//! Pointwise evaluation of the vertical curves `x = f_n(y)` and horizontal
//! curves `y = g_m(x)` as nested fixed points.
//!
//! A level-`L` vertical curve with symbols `s_0 … s_L` solves, for each `t`,
//! `x = x^p + (a t - f_{L-1}(x)) / b` in the disc `x ≡ s_0`, where `f_{L-1}`
//! carries `s_1 … s_L` and `f_0 ≡ s_L`. The horizontal curve solves
//! `y = y^p - (t - a g_{L-1}(y)) / b` in `y ≡ s_-1`. Both maps contract by
//! `1/p`, so iteration `i` produces `i + 1` correct digits and only needs the
//! inner curve to `i` digits (`i - v(a)` for the horizontal one).

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::dynamics::PlaneMap;
use crate::error::{Error, Result};
use crate::padic::PadicScalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Vertical,
    Horizontal,
}

/// A memoized evaluator for one symbol list (outermost symbol first).
pub struct CurveEvaluator<'a> {
    map: &'a PlaneMap,
    symbols: &'a [u32],
    kind: CurveKind,
    memo: HashMap<(usize, i64, i64, BigUint), PadicScalar>,
    calls: usize,
    limit: usize,
}

impl<'a> CurveEvaluator<'a> {
    pub fn new(map: &'a PlaneMap, kind: CurveKind, symbols: &'a [u32], limit: usize) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyForwardPart);
        }
        let p = map.p();
        if let Some(&symbol) = symbols.iter().find(|&&s| s >= p) {
            return Err(Error::InvalidSymbol { symbol, p });
        }
        Ok(Self {
            map,
            symbols,
            kind,
            memo: HashMap::new(),
            calls: 0,
            limit,
        })
    }

    pub fn top_level(&self) -> usize {
        self.symbols.len() - 1
    }

    /// Number of fixed-point solves performed so far (memo hits excluded).
    pub fn calls(&self) -> usize {
        self.calls
    }

    /// The top-level curve at `t`, to `k` digits.
    pub fn eval_top(&mut self, t: &PadicScalar, k: i64) -> Result<PadicScalar> {
        self.eval(self.top_level(), t, k)
    }

    pub fn eval(&mut self, level: usize, t: &PadicScalar, k: i64) -> Result<PadicScalar> {
        let p = self.map.p();
        if k <= 0 {
            return Ok(PadicScalar::zero(p, 0));
        }
        if !t.is_integral() {
            return Err(Error::NotIntegral);
        }
        let s = self.symbols[self.symbols.len() - 1 - level];
        if level == 0 {
            return PadicScalar::from_i64(p, s as i64, k);
        }
        let t = t.truncate(k - 1)?;
        let key = (level, k, t.prec(), t.coeff().clone());
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        self.calls += 1;
        if self.calls > self.limit {
            return Err(Error::RecursionBudgetExceeded { limit: self.limit });
        }
        let params = self.map.params().clone();
        let (a, b, v) = (params.a(), params.b(), params.val_a());
        let mut x = PadicScalar::from_i64(p, s as i64, 1)?;
        for i in 1..k {
            let next = match self.kind {
                CurveKind::Vertical => {
                    let inner = self.eval(level - 1, &x, i)?;
                    let pull = t.scale_by(a)?.sub(&inner)?.div_by(b)?;
                    x.pow(p)?.add(&pull)?
                }
                CurveKind::Horizontal => {
                    let inner = self.eval(level - 1, &x, i - v)?;
                    let push = t.sub(&inner.scale_by(a)?)?.div_by(b)?;
                    x.pow(p)?.sub(&push)?
                }
            };
            if next.prec() < i + 1 {
                return Err(Error::PrecisionExhausted { index: Some(i) });
            }
            x = next.truncate(i + 1)?;
        }
        self.memo.insert(key, x.clone());
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{haar_sample, seeded_rng, FieldParams};

    fn eval(kind: CurveKind, syms: &[u32], t: &PadicScalar, k: i64) -> PadicScalar {
        let map = PlaneMap::canonical();
        let mut ev = CurveEvaluator::new(&map, kind, syms, 100_000).unwrap();
        ev.eval_top(t, k).unwrap()
    }

    #[test]
    fn base_levels_are_constant() {
        let mut rng = seeded_rng(1);
        for _ in 0..5 {
            let t = haar_sample(3, &mut rng, 10);
            assert_eq!(
                eval(CurveKind::Vertical, &[2], &t, 8),
                PadicScalar::from_i64(3, 2, 8).unwrap()
            );
            assert_eq!(
                eval(CurveKind::Horizontal, &[1], &t, 8),
                PadicScalar::from_i64(3, 1, 8).unwrap()
            );
        }
    }

    #[test]
    fn zero_symbols_at_zero() {
        let zero = PadicScalar::zero(3, 20);
        assert!(eval(CurveKind::Vertical, &[0, 0, 0, 0], &zero, 12).is_zero());
        assert!(eval(CurveKind::Horizontal, &[0, 0, 0], &zero, 12).is_zero());
    }

    #[test]
    fn curves_satisfy_their_defining_equation() {
        // x = f(t) means T(x, t) has x-coordinate f_inner(x)
        let map = PlaneMap::canonical();
        let mut rng = seeded_rng(2);
        let syms = [1u32, 2, 0, 1];
        for _ in 0..10 {
            let t = haar_sample(3, &mut rng, 16);
            let mut ev = CurveEvaluator::new(&map, CurveKind::Vertical, &syms, 100_000).unwrap();
            let x = ev.eval_top(&t, 12).unwrap();
            assert_eq!(x.residue().unwrap(), 1);
            let image = map
                .step(&crate::padic::Point::new(x.clone(), t.clone()).unwrap())
                .unwrap();
            let mut inner = CurveEvaluator::new(&map, CurveKind::Vertical, &syms[1..], 100_000).unwrap();
            let fx = inner.eval_top(&x, 11).unwrap();
            assert_eq!(image.x.truncate(10).unwrap(), fx.truncate(10).unwrap());
        }
    }

    #[test]
    fn lipschitz_spot_checks() {
        let mut rng = seeded_rng(3);
        for fp in [FieldParams::canonical(), FieldParams::variant()] {
            let map = PlaneMap::new(fp);
            for kind in [CurveKind::Vertical, CurveKind::Horizontal] {
                let syms = [2u32, 0, 1, 1, 2];
                for _ in 0..10 {
                    let t1 = haar_sample(3, &mut rng, 14);
                    let mut t2 = haar_sample(3, &mut rng, 14);
                    if rng_coin(&mut rng) {
                        // a nearby pair as well as a far one
                        t2 = t1
                            .add(&t2.scale_by(&crate::padic::ExactScalar::from_i64(3, 27)).unwrap())
                            .unwrap();
                    }
                    let mut ev = CurveEvaluator::new(&map, kind, &syms, 100_000).unwrap();
                    let f1 = ev.eval_top(&t1, 12).unwrap();
                    let f2 = ev.eval_top(&t2, 12).unwrap();
                    let lhs = f1.sub(&f2).unwrap().pnorm();
                    let dt = t1.sub(&t2).unwrap().truncate(11).unwrap().pnorm();
                    // |f(t1) - f(t2)| <= |t1 - t2| / p
                    assert!(lhs.val_bound() >= dt.val_bound().saturating_add(1).min(12), "{kind:?}");
                }
            }
        }
    }

    fn rng_coin(rng: &mut impl rand::Rng) -> bool {
        rng.gen_bool(0.5)
    }

    #[test]
    fn budget_is_enforced() {
        let map = PlaneMap::canonical();
        let syms = [1u32; 8];
        let mut ev = CurveEvaluator::new(&map, CurveKind::Vertical, &syms, 3).unwrap();
        let t = PadicScalar::zero(3, 20);
        assert_eq!(ev.eval_top(&t, 15), Err(Error::RecursionBudgetExceeded { limit: 3 }));
    }
}
