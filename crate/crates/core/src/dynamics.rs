//! The map `T(x, y) = (a y + φ(x), x)` with `φ(t) = b (t^p - t)`, its
//! inverse `T^-1(x, y) = (y, (x - φ(y)) / a)`, and orbit computations.
//!
//! Precision costs are exact: `φ` expands distances by exactly `p` on discs
//! of radius `1/p`, so a forward step spends one digit of the x-coordinate and
//! a backward step spends `1 + v(a)` digits of the new y-coordinate.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{FieldParams, Norm, PadicScalar, Point, PointRecord};

/// The automorphism `T` for one parameter set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneMap {
    params: FieldParams,
}

/// Outcome of [`PlaneMap::basin_entry_time`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasinStatus {
    /// The least `n` with `T^n(pt)` in the unit polydisc.
    Entered(usize),
    /// The escape heuristic fired after this many steps.
    Diverging(usize),
    Indeterminate,
}

impl PlaneMap {
    pub fn new(params: FieldParams) -> Self {
        Self { params }
    }

    pub fn canonical() -> Self {
        Self::new(FieldParams::canonical())
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn p(&self) -> u32 {
        self.params.p()
    }

    /// `φ(t) = b (t^p - t)` on Z_p, where it takes values in Z_p. The result
    /// carries one digit less than `t`.
    pub fn phi(&self, t: &PadicScalar) -> Result<PadicScalar> {
        if !t.is_integral() {
            return Err(Error::NotIntegral);
        }
        self.phi_raw(t)
    }

    /// `φ` on all of Q_p, for basin experiments.
    pub fn phi_raw(&self, t: &PadicScalar) -> Result<PadicScalar> {
        t.pow(self.params.p())?.sub(t)?.scale_by(self.params.b())
    }

    /// One forward step.
    pub fn step(&self, pt: &Point) -> Result<Point> {
        let drift = pt.y.scale_by(self.params.a())?;
        let x = drift.add(&self.phi_raw(&pt.x)?)?;
        Point::new(x, pt.x.clone())
    }

    /// One backward step.
    pub fn step_inv(&self, pt: &Point) -> Result<Point> {
        let y = pt.x.sub(&self.phi_raw(&pt.y)?)?.div_by(self.params.a())?;
        Point::new(pt.y.clone(), y)
    }

    /// `T^n(pt)`, keeping only the final point.
    pub fn iterate(&self, pt: &Point, n: usize) -> Result<Point> {
        let mut cur = pt.clone();
        for i in 0..n {
            cur = self.step(&cur).map_err(|e| at_index(e, i as i64 + 1))?;
        }
        Ok(cur)
    }

    /// The points `T^0(pt), …, T^n(pt)`. Every returned point keeps at least
    /// one digit; the budget dies at the first index where that fails.
    pub fn forward_orbit(&self, pt: &Point, n: usize) -> Result<OrbitSegment> {
        let mut points = Vec::with_capacity(n + 1);
        let mut cur = pt.clone();
        for k in 0..=n {
            if cur.prec() < 1 {
                return Err(Error::PrecisionExhausted { index: Some(k as i64) });
            }
            if k < n {
                let next = self.step(&cur).map_err(|e| at_index(e, k as i64 + 1))?;
                points.push(cur);
                cur = next;
            } else {
                points.push(cur.clone());
            }
        }
        Ok(OrbitSegment {
            params: self.params.clone(),
            start: 0,
            points,
        })
    }

    /// `T^0(pt), T^-1(pt), …, T^-m(pt)`, certified to stay in the unit
    /// polydisc. Leaving it at backward step `k` proves `pt ∉ T^k(R^2)`.
    ///
    /// The segment is stored in increasing time order, from `-m` to `0`.
    pub fn backward_orbit(&self, pt: &Point, m: usize) -> Result<OrbitSegment> {
        if !pt.in_unit_polydisc() {
            return Err(Error::ExitsUnitPolydisc { step: 0 });
        }
        let mut rev = Vec::with_capacity(m + 1);
        let mut cur = pt.clone();
        for step in 1..=m {
            let prev = match self.step_inv(&cur) {
                Ok(q) => q,
                Err(Error::PrecisionExhausted { .. }) => return Err(Error::Indeterminate { step }),
                Err(e) => return Err(e),
            };
            if !prev.in_unit_polydisc() {
                return Err(Error::ExitsUnitPolydisc { step });
            }
            if prev.prec() < 1 {
                return Err(Error::PrecisionExhausted {
                    index: Some(-(step as i64)),
                });
            }
            rev.push(cur);
            cur = prev;
        }
        rev.push(cur);
        rev.reverse();
        Ok(OrbitSegment {
            params: self.params.clone(),
            start: -(m as i64),
            points: rev,
        })
    }

    /// Number of consecutive strict increases of the sup-norm (with `|x| > 1`)
    /// after which an orbit is declared divergent.
    pub fn divergence_threshold(&self) -> usize {
        (self.params.val_a() as usize + 2).max(3)
    }

    /// When does the forward orbit of `pt` enter the unit polydisc?
    ///
    /// `Diverging` is a heuristic verdict: while `|x| > 1` the `φ`-term has
    /// norm `p |x|^p` and usually dominates, but cancellation is possible.
    pub fn basin_entry_time(&self, pt: &Point, budget: usize) -> Result<BasinStatus> {
        let threshold = self.divergence_threshold();
        let mut cur = pt.clone();
        let mut prev_norm = cur.norm_sup();
        let mut streak = 0usize;
        for n in 0..=budget {
            if cur.in_unit_polydisc() {
                return Ok(BasinStatus::Entered(n));
            }
            if n == budget {
                break;
            }
            let next = self.step(&cur).map_err(|e| at_index(e, n as i64 + 1))?;
            let norm = next.norm_sup();
            let x_large = matches!(next.x.pnorm(), Norm::Exact { val } if val < 0);
            let grew = matches!(norm, Norm::Exact { val } if val < prev_norm.val_bound());
            streak = if x_large && grew { streak + 1 } else { 0 };
            if streak >= threshold {
                return Ok(BasinStatus::Diverging(n + 1));
            }
            prev_norm = norm;
            cur = next;
        }
        Ok(BasinStatus::Indeterminate)
    }

    /// Norms of the Jacobian eigenvalues at `pt`, read off the Newton polygon
    /// of `λ² - b(p x^(p-1) - 1) λ - a`. On the unit polydisc these are
    /// `(|a|/p, p)` whatever the point.
    pub fn eigen_norms(&self, pt: &Point) -> Result<(Norm, Norm)> {
        if !pt.in_unit_polydisc() {
            return Err(Error::NotInUnitPolydisc);
        }
        let p = self.params.p();
        let prec = pt.x.prec().max(1) + 2;
        let x = pt.x.lift(pt.x.prec().max(0));
        let inner = x
            .pow(p - 1)?
            .mul(&PadicScalar::from_i64(p, p as i64, prec)?)?
            .sub(&PadicScalar::from_i64(p, 1, prec)?)?;
        let linear = inner.scale_by(self.params.b())?.neg();
        let val_linear = linear.valuation().ok_or(Error::PrecisionExhausted { index: None })?;
        let val_const = self.params.val_a();
        let polygon = NewtonPolygon::from_points(&[(0, val_const), (1, val_linear), (2, 0)]);
        let segments = polygon.segments();
        let expected_small = val_const + 1;
        match segments.as_slice() {
            [first, second]
                if first.length == 1
                    && second.length == 1
                    && first.root_valuation() == Some(expected_small)
                    && second.root_valuation() == Some(-1) =>
            {
                Ok((Norm::from_val(expected_small), Norm::from_val(-1)))
            }
            _ => Err(Error::InvalidParams(format!(
                "unexpected Newton polygon {segments:?} at {pt}"
            ))),
        }
    }
}

fn at_index(e: Error, index: i64) -> Error {
    match e {
        Error::PrecisionExhausted { index: None } => Error::PrecisionExhausted { index: Some(index) },
        other => other,
    }
}

/// One edge of a Newton polygon: `length` roots of valuation `-rise/length`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolygonSegment {
    pub length: i64,
    pub rise: i64,
}

impl PolygonSegment {
    /// The common valuation of the roots on this edge, when integral.
    pub fn root_valuation(&self) -> Option<i64> {
        (self.rise % self.length == 0).then(|| -self.rise / self.length)
    }
}

/// Lower convex hull of `(degree, valuation)` pairs.
#[derive(Debug, Clone)]
pub struct NewtonPolygon {
    vertices: Vec<(i64, i64)>,
}

impl NewtonPolygon {
    pub fn from_points(points: &[(i64, i64)]) -> Self {
        let mut pts = points.to_vec();
        pts.sort();
        let mut hull: Vec<(i64, i64)> = Vec::new();
        for pt in pts {
            while hull.len() >= 2 {
                let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                let cross = (a.0 - o.0) * (pt.1 - o.1) - (a.1 - o.1) * (pt.0 - o.0);
                if cross <= 0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        Self { vertices: hull }
    }

    pub fn segments(&self) -> Vec<PolygonSegment> {
        self.vertices
            .windows(2)
            .map(|w| PolygonSegment {
                length: w[1].0 - w[0].0,
                rise: w[1].1 - w[0].1,
            })
            .collect()
    }
}

/// A stretch of an orbit, `points[i]` at time `start + i`, with
/// `points[i + 1] = T(points[i])` to the recorded precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSegment {
    pub params: FieldParams,
    pub start: i64,
    pub points: Vec<Point>,
}

/// One line of the JSON-lines orbit dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub k: i64,
    #[serde(flatten)]
    pub point: PointRecord,
    pub precision: i64,
}

impl OrbitSegment {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn end(&self) -> i64 {
        self.start + self.points.len() as i64 - 1
    }

    pub fn at(&self, k: i64) -> Option<&Point> {
        let i = k.checked_sub(self.start)?;
        usize::try_from(i).ok().and_then(|i| self.points.get(i))
    }

    /// Guaranteed precision of each point, in time order.
    pub fn precisions(&self) -> Vec<i64> {
        self.points.iter().map(Point::prec).collect()
    }

    pub fn records(&self) -> impl Iterator<Item = OrbitRecord> + '_ {
        self.points.iter().enumerate().map(move |(i, pt)| OrbitRecord {
            k: self.start + i as i64,
            point: PointRecord::from(pt),
            precision: pt.prec(),
        })
    }

    pub fn write_json_lines<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for rec in self.records() {
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{haar_point, seeded_rng};
    use num_bigint::BigInt;

    fn pt(x: i64, y: i64, k: i64) -> Point {
        Point::from_i64(3, x, y, k).unwrap()
    }

    fn s(v: i64, k: i64) -> PadicScalar {
        PadicScalar::from_i64(3, v, k).unwrap()
    }

    #[test]
    fn phi_examples() {
        let t = PlaneMap::canonical();
        assert!(t.phi(&s(0, 10)).unwrap().is_zero());
        assert!(t.phi(&s(1, 10)).unwrap().is_zero());
        let two = t.phi(&s(2, 10)).unwrap();
        assert_eq!(two, s(2, 9));
        assert_eq!(two.prec(), 9);
        let third = PadicScalar::from_rational(3, &BigInt::from(1), 1, 10).unwrap();
        assert_eq!(t.phi(&third), Err(Error::NotIntegral));
        assert!(t.phi_raw(&third).is_ok());
    }

    #[test]
    fn step_examples() {
        let t = PlaneMap::canonical();
        assert_eq!(t.step(&pt(0, 0, 10)).unwrap(), Point::new(s(0, 9), s(0, 10)).unwrap());
        let r = t.step(&pt(1, 1, 10)).unwrap();
        assert_eq!(r.x.truncate(9).unwrap(), s(3, 9));
        assert_eq!(r.y, s(1, 10));
        let r = t.step(&pt(2, 0, 10)).unwrap();
        assert_eq!(r.x, s(2, 9));
        assert_eq!(r.y, s(2, 10));
    }

    #[test]
    fn step_precision_contract() {
        let t = PlaneMap::canonical();
        let r = t.step(&pt(5, 7, 20)).unwrap();
        assert_eq!(r.x.prec(), 19);
        let r = t.step(&Point::new(s(5, 20), s(7, 3)).unwrap()).unwrap();
        assert_eq!(r.x.prec(), 4); // k_y + v(a)
    }

    #[test]
    fn step_inv_leaves_the_polydisc() {
        let t = PlaneMap::canonical();
        let r = t.step_inv(&pt(1, 0, 10)).unwrap();
        assert!(r.x.is_zero());
        assert_eq!(r.y.pnorm(), Norm::Exact { val: -1 });
        assert!(!r.in_unit_polydisc());
        let r = t.step_inv(&pt(0, 0, 10)).unwrap();
        assert!(r.x.is_zero() && r.y.is_zero());
        // precision: min(k_x, k_y - 1) - v(a)
        assert_eq!(r.y.prec(), 8);
    }

    #[test]
    fn inverse_round_trips() {
        let t = PlaneMap::canonical();
        let mut rng = seeded_rng(5);
        for _ in 0..200 {
            let q = haar_point(3, &mut rng, 30);
            let fwd = t.step(&q).unwrap();
            let back = t.step_inv(&fwd).unwrap();
            assert_eq!(back.truncate(back.prec()).unwrap(), q.truncate(back.prec()).unwrap());
            let inv = t.step_inv(&q).unwrap();
            let again = t.step(&inv).unwrap();
            assert_eq!(again.truncate(again.prec()).unwrap(), q.truncate(again.prec()).unwrap());
        }
    }

    #[test]
    fn forward_orbit_ledger() {
        let t = PlaneMap::canonical();
        let seg = t.forward_orbit(&pt(0, 0, 50), 10).unwrap();
        assert_eq!(seg.len(), 11);
        assert!(seg.points.iter().all(|q| q.x.is_zero() && q.y.is_zero()));
        let last = seg.at(10).unwrap();
        assert_eq!(last.x.prec(), 40);
        let precs = seg.precisions();
        for w in precs.windows(2) {
            assert_eq!(w[0] - w[1], 1);
        }
    }

    #[test]
    fn forward_orbit_budget() {
        let t = PlaneMap::canonical();
        let err = t.forward_orbit(&pt(2, 1, 5), 10).unwrap_err();
        assert_eq!(err, Error::PrecisionExhausted { index: Some(5) });
    }

    #[test]
    fn backward_orbit_examples() {
        let t = PlaneMap::canonical();
        assert_eq!(
            t.backward_orbit(&pt(1, 0, 10), 1),
            Err(Error::ExitsUnitPolydisc { step: 1 })
        );
        let seg = t.backward_orbit(&pt(0, 0, 100), 20).unwrap();
        assert_eq!(seg.start, -20);
        assert_eq!(seg.len(), 21);
        let precs = seg.precisions();
        for w in precs.windows(2) {
            assert_eq!(w[1] - w[0], 2, "1 + v(a) digits per backward step");
        }
        // at one digit the preimage of (1, 0) + O(3) may or may not be integral
        assert_eq!(t.backward_orbit(&pt(1, 0, 1), 1), Err(Error::Indeterminate { step: 1 }));
    }

    #[test]
    fn basin_examples() {
        let t = PlaneMap::canonical();
        assert_eq!(t.basin_entry_time(&pt(4, 2, 10), 5).unwrap(), BasinStatus::Entered(0));
        let third = PadicScalar::from_rational(3, &BigInt::from(1), 1, 20).unwrap();
        let q = Point::new(s(0, 20), third.clone()).unwrap();
        assert_eq!(t.basin_entry_time(&q, 5).unwrap(), BasinStatus::Entered(1));
        let q = Point::new(third, s(0, 60)).unwrap();
        assert!(matches!(t.basin_entry_time(&q, 20).unwrap(), BasinStatus::Diverging(_)));
    }

    #[test]
    fn eigen_norms_on_the_polydisc() {
        let t = PlaneMap::canonical();
        for (x, y) in [(0, 0), (1, 1), (2, 5), (-4, 9)] {
            assert_eq!(
                t.eigen_norms(&pt(x, y, 10)).unwrap(),
                (Norm::from_val(2), Norm::from_val(-1))
            );
        }
        let v = PlaneMap::new(FieldParams::variant());
        assert_eq!(
            v.eigen_norms(&pt(1, 2, 10)).unwrap(),
            (Norm::from_val(3), Norm::from_val(-1))
        );
        let off = Point::new(PadicScalar::from_rational(3, &BigInt::from(1), 1, 5).unwrap(), s(0, 5)).unwrap();
        assert_eq!(t.eigen_norms(&off), Err(Error::NotInUnitPolydisc));
    }

    #[test]
    fn newton_polygon_hull() {
        let np = NewtonPolygon::from_points(&[(0, 3), (1, 1), (2, 0), (3, 0)]);
        let segs = np.segments();
        assert_eq!(segs[0], PolygonSegment { length: 1, rise: -2 });
        assert_eq!(segs[1], PolygonSegment { length: 1, rise: -1 });
        assert_eq!(segs[2], PolygonSegment { length: 1, rise: 0 });
        // a point above the hull is dropped
        let np = NewtonPolygon::from_points(&[(0, 2), (1, 5), (2, 0)]);
        assert_eq!(np.segments(), vec![PolygonSegment { length: 2, rise: -2 }]);
    }

    #[test]
    fn orbit_json_lines() {
        let t = PlaneMap::canonical();
        let seg = t.forward_orbit(&pt(2, 0, 6), 2).unwrap();
        let mut buf = Vec::new();
        seg.write_json_lines(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        let rec: OrbitRecord = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(rec.k, 1);
        assert_eq!(rec.precision, 5);
        assert_eq!(rec.point.to_point(3).unwrap(), seg.points[1]);
    }
}
