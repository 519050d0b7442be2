//! Exact ball counts over the attractor and the dimension they imply.
//!
//! Balls of radius `p^-j` in `Z_p^2` are residue classes mod `p^j`, so the
//! number of balls meeting the attractor is an exact integer. It is computed
//! by decoding every window long enough that its decoded point pins down its
//! ball.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::PlaneMap;
use crate::error::{Error, Result};
use crate::padic::{FieldParams, Point};
use crate::symbolic::{inverse_power, tube_radii, window_radius, Coder, ItineraryWindow};

/// The ball `{(x, y) : x ≡ x_res, y ≡ y_res mod p^depth}` of radius `p^-depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BallId {
    pub x_res: u64,
    pub y_res: u64,
    pub depth: u32,
}

impl BallId {
    pub fn whole_space() -> Self {
        Self {
            x_res: 0,
            y_res: 0,
            depth: 0,
        }
    }

    /// The depth-`depth` ball containing `pt`.
    pub fn containing(pt: &Point, depth: u32) -> Result<Self> {
        let to_u64 = |u: num_bigint::BigUint| {
            u.to_u64()
                .ok_or_else(|| Error::InvalidParams(format!("p^{depth} does not fit in 64 bits")))
        };
        Ok(Self {
            x_res: to_u64(pt.x.reduce_mod(depth)?)?,
            y_res: to_u64(pt.y.reduce_mod(depth)?)?,
            depth,
        })
    }

    /// The enclosing ball at a coarser depth.
    pub fn ancestor(&self, p: u32, depth: u32) -> Self {
        assert!(depth <= self.depth, "ancestor must be coarser");
        let m = (p as u64).pow(depth);
        Self {
            x_res: self.x_res % m,
            y_res: self.y_res % m,
            depth,
        }
    }

    pub fn radius(&self, p: u32) -> BigRational {
        inverse_power(p, self.depth)
    }
}

/// `1 + 1 / (1 + log_q(1/|a|))`.
pub fn theoretical_dimension(params: &FieldParams) -> f64 {
    1.0 + 1.0 / (1.0 + params.val_a() as f64)
}

/// The default enumeration cap: `p^10` windows.
pub fn default_window_cap(p: u32) -> u128 {
    (p as u128).pow(10)
}

/// Smallest window shape `(m, n)` whose radius is at most `p^-depth`.
pub fn window_shape_for_depth(params: &FieldParams, depth: u32) -> (usize, usize) {
    if depth == 0 {
        return (0, 0);
    }
    let v = params.val_a() as usize;
    let n = depth as usize - 1;
    // ε_{m-1} = p^-((m-1)(v+1)+1)
    let m = 1 + (depth as usize - 1).div_ceil(v + 1);
    (m, n)
}

/// Checks that windows of shape `(m, n)` resolve balls of depth `depth`.
pub fn check_depths(params: &FieldParams, depth: u32, m: usize, n: usize) -> Result<()> {
    if window_radius(params, m, n) > inverse_power(params.p(), depth) {
        return Err(Error::DepthInsufficient { depth, m, n });
    }
    Ok(())
}

pub fn window_count(p: u32, m: usize, n: usize) -> u128 {
    (p as u128).pow((m + n + 1) as u32)
}

/// Deepest ball depth whose minimal windows fit under `cap`.
pub fn max_feasible_depth(params: &FieldParams, cap: u128) -> u32 {
    let mut j = 0;
    loop {
        let (m, n) = window_shape_for_depth(params, j + 1);
        if window_count(params.p(), m, n) > cap || j + 1 > 40 {
            return j;
        }
        j += 1;
    }
}

/// How many windows of one shape decode into each occupied ball.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallCensus {
    p: u32,
    depth: u32,
    m: usize,
    n: usize,
    counts: BTreeMap<BallId, u64>,
}

impl BallCensus {
    /// Decodes all `p^(m+n+1)` windows of shape `(m, n)`.
    pub fn enumerate(params: &FieldParams, depth: u32, m: usize, n: usize, cap: u128) -> Result<Self> {
        check_depths(params, depth, m, n)?;
        let p = params.p();
        let windows = window_count(p, m, n);
        if windows > cap {
            return Err(Error::WindowCapExceeded { windows, cap });
        }
        let coder = Coder::new(PlaneMap::new(params.clone())).with_precision(depth.max(1) as i64);
        let total = windows as u64;
        let chunk = 1024u64;
        let counts = (0..total.div_ceil(chunk))
            .into_par_iter()
            .map(|c| -> Result<BTreeMap<BallId, u64>> {
                let mut local = BTreeMap::new();
                for idx in c * chunk..((c + 1) * chunk).min(total) {
                    let w = ItineraryWindow::from_index(p, m, n, idx);
                    let ball = if depth == 0 {
                        BallId::whole_space()
                    } else {
                        let (x_res, y_res) = coder.decode_residues(&w, depth)?;
                        BallId { x_res, y_res, depth }
                    };
                    *local.entry(ball).or_insert(0) += 1;
                }
                Ok(local)
            })
            .try_reduce(BTreeMap::new, |mut acc, part| {
                for (k, v) in part {
                    *acc.entry(k).or_insert(0) += v;
                }
                Ok(acc)
            })?;
        Ok(Self { p, depth, m, n, counts })
    }

    /// Census with the minimal window shape for `depth`.
    pub fn for_depth(params: &FieldParams, depth: u32, cap: u128) -> Result<Self> {
        let (m, n) = window_shape_for_depth(params, depth);
        Self::enumerate(params, depth, m, n, cap)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// The window shape `(m, n)` enumerated.
    pub fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn total_windows(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Number of occupied balls.
    pub fn occupied(&self) -> usize {
        self.counts.len()
    }

    pub fn balls(&self) -> impl Iterator<Item = (&BallId, &u64)> {
        self.counts.iter()
    }

    pub fn ball_ids(&self) -> BTreeSet<BallId> {
        self.counts.keys().copied().collect()
    }

    /// The same census read at a coarser depth.
    pub fn coarsen(&self, depth: u32) -> Self {
        let mut counts = BTreeMap::new();
        for (ball, &c) in &self.counts {
            *counts.entry(ball.ancestor(self.p, depth)).or_insert(0) += c;
        }
        Self {
            p: self.p,
            depth,
            m: self.m,
            n: self.n,
            counts,
        }
    }

    /// `μ_T(ball)`: windows landing in the ball, each of mass `p^-(m+n+1)`.
    pub fn mu(&self, ball: &BallId) -> Result<BigRational> {
        if ball.depth > self.depth {
            return Err(Error::DepthInsufficient {
                depth: ball.depth,
                m: self.m,
                n: self.n,
            });
        }
        let hits: u64 = self
            .counts
            .iter()
            .filter(|(b, _)| b.ancestor(self.p, ball.depth) == *ball)
            .map(|(_, c)| c)
            .sum();
        Ok(BigRational::from_integer(BigInt::from(hits)) * inverse_power(self.p, (self.m + self.n + 1) as u32))
    }
}

/// The occupied balls of depth `depth` seen through windows of shape `(m, n)`.
pub fn attractor_ball_ids(params: &FieldParams, depth: u32, m: usize, n: usize, cap: u128) -> Result<BTreeSet<BallId>> {
    Ok(BallCensus::enumerate(params, depth, m, n, cap)?.ball_ids())
}

/// `μ_T(ball)` by enumerating windows of shape `(m, n)`.
pub fn mu_ball(params: &FieldParams, ball: &BallId, m: usize, n: usize, cap: u128) -> Result<BigRational> {
    BallCensus::enumerate(params, ball.depth, m, n, cap)?.mu(ball)
}

/// One radius of a count series.
#[derive(Debug, Clone, PartialEq)]
pub struct CountEntry {
    pub depth: u32,
    pub radius: BigRational,
    pub count: u64,
    /// `q^n / ε_n` when the radius is the tube scale `ε_n`.
    pub cover_upper_bound: Option<BigRational>,
    /// `r^-α / q^2`.
    pub mass_lower_bound: f64,
}

impl CountEntry {
    /// The `n` with `ε_n` equal to this radius, if any.
    pub fn tube_index(&self, params: &FieldParams) -> Option<usize> {
        tube_index(params, self.depth)
    }
}

fn tube_index(params: &FieldParams, depth: u32) -> Option<usize> {
    let step = params.val_a() as u32 + 1;
    (depth >= 1 && (depth - 1).is_multiple_of(step)).then(|| ((depth - 1) / step) as usize)
}

/// `q^n / ε_n`.
pub fn cover_bound(params: &FieldParams, n: usize) -> BigRational {
    let (_, eps) = tube_radii(params, n, 0);
    BigRational::from_integer(BigInt::from(params.q()).pow(n as u32)) / eps
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountSeries {
    pub params: FieldParams,
    pub entries: Vec<CountEntry>,
}

#[derive(Debug, Serialize)]
struct CountRow {
    radius: f64,
    count: u64,
    cover_upper_bound: Option<f64>,
    mass_lower_bound: f64,
}

impl CountSeries {
    /// A series from given `(radius, count)` pairs, for estimator checks.
    pub fn from_counts(params: FieldParams, data: &[(u32, u64)]) -> Self {
        let alpha = theoretical_dimension(&params);
        let entries = data
            .iter()
            .map(|&(depth, count)| entry(&params, alpha, depth, count))
            .collect();
        Self { params, entries }
    }

    /// The entries at the tube scales `ε_n`.
    pub fn tube_entries(&self) -> impl Iterator<Item = (usize, &CountEntry)> {
        self.entries
            .iter()
            .filter_map(|e| e.tube_index(&self.params).map(|n| (n, e)))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for e in &self.entries {
            w.serialize(CountRow {
                radius: ratio_f64(&e.radius),
                count: e.count,
                cover_upper_bound: e.cover_upper_bound.as_ref().map(ratio_f64),
                mass_lower_bound: e.mass_lower_bound,
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

fn entry(params: &FieldParams, alpha: f64, depth: u32, count: u64) -> CountEntry {
    let p = params.p() as f64;
    CountEntry {
        depth,
        radius: inverse_power(params.p(), depth),
        count,
        cover_upper_bound: tube_index(params, depth).map(|n| cover_bound(params, n)),
        mass_lower_bound: p.powf(alpha * depth as f64) / (p * p),
    }
}

pub fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact counts `N(p^-j)` for each requested depth, from a single census at
/// the deepest one.
pub fn box_count(params: &FieldParams, depths: &[u32], cap: u128) -> Result<CountSeries> {
    let deepest = depths.iter().copied().max().unwrap_or(0);
    let census = BallCensus::for_depth(params, deepest, cap)?;
    let alpha = theoretical_dimension(params);
    let mut depths = depths.to_vec();
    depths.sort_unstable();
    depths.dedup();
    let entries = depths
        .iter()
        .map(|&j| entry(params, alpha, j, census.coarsen(j).occupied() as u64))
        .collect();
    Ok(CountSeries {
        params: params.clone(),
        entries,
    })
}

/// Least-squares slope of `log N(r)` against `log(1/r)`.
pub fn dimension_estimate(series: &CountSeries) -> Result<f64> {
    if series.entries.len() < 3 {
        return Err(Error::DegenerateSeries(format!(
            "{} entries, need at least 3",
            series.entries.len()
        )));
    }
    let pts: Vec<(f64, f64)> = series
        .entries
        .iter()
        .map(|e| (-ratio_f64(&e.radius).ln(), (e.count as f64).ln()))
        .collect();
    slope(&pts)
}

/// Least-squares slope through `(x, y)` pairs.
pub fn slope(pts: &[(f64, f64)]) -> Result<f64> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx.is_zero() || !sxx.is_finite() {
        return Err(Error::DegenerateSeries("all radii coincide".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthRegularity {
    pub depth: u32,
    pub balls: usize,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub alpha: f64,
    pub per_depth: Vec<DepthRegularity>,
    pub max_ratio: f64,
}

/// `max μ_T(B) / diam(B)^α` over the occupied balls at each depth.
pub fn regularity_check(params: &FieldParams, depths: &[u32], cap: u128) -> Result<RegularityReport> {
    let deepest = depths.iter().copied().max().unwrap_or(0);
    let census = BallCensus::for_depth(params, deepest, cap)?;
    let alpha = theoretical_dimension(params);
    let p = params.p() as f64;
    let mut per_depth = Vec::new();
    for &j in depths {
        let coarse = census.coarsen(j);
        let mut max_ratio = 0f64;
        for (ball, _) in coarse.balls() {
            let mu = ratio_f64(&coarse.mu(ball)?);
            max_ratio = max_ratio.max(mu * p.powf(alpha * j as f64));
        }
        per_depth.push(DepthRegularity {
            depth: j,
            balls: coarse.occupied(),
            max_ratio,
        });
    }
    let max_ratio = per_depth.iter().map(|d| d.max_ratio).fold(0.0, f64::max);
    Ok(RegularityReport {
        alpha,
        per_depth,
        max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula() {
        assert_eq!(theoretical_dimension(&FieldParams::canonical()), 1.5);
        assert!((theoretical_dimension(&FieldParams::variant()) - 4.0 / 3.0).abs() < 1e-15);
        let big = FieldParams::from_literals(3, &format!("{}", 3i64.pow(30)), "1/3", 8).unwrap();
        let d = theoretical_dimension(&big);
        assert!(d > 1.0 && d < 2.0);
    }

    #[test]
    fn shapes() {
        let fp = FieldParams::canonical();
        assert_eq!(window_shape_for_depth(&fp, 1), (1, 0));
        assert_eq!(window_shape_for_depth(&fp, 4), (3, 3));
        assert_eq!(window_shape_for_depth(&fp, 6), (4, 5));
        assert_eq!(window_shape_for_depth(&FieldParams::variant(), 7), (3, 6));
        assert_eq!(max_feasible_depth(&fp, default_window_cap(3)), 6);
        assert_eq!(max_feasible_depth(&FieldParams::variant(), default_window_cap(3)), 7);
        assert_eq!(
            check_depths(&fp, 3, 1, 2),
            Err(Error::DepthInsufficient { depth: 3, m: 1, n: 2 })
        );
    }

    #[test]
    fn depth_zero_and_one() {
        let fp = FieldParams::canonical();
        let ids = attractor_ball_ids(&fp, 0, 1, 1, default_window_cap(3)).unwrap();
        assert_eq!(ids.into_iter().collect::<Vec<_>>(), vec![BallId::whole_space()]);
        let census = BallCensus::for_depth(&fp, 1, default_window_cap(3)).unwrap();
        // (x_0, x_-1) mod 3 is (s_0, s_-1)
        assert_eq!(census.occupied(), 9);
        for (ball, &c) in census.balls() {
            assert_eq!(c, 1);
            assert_eq!(census.mu(ball).unwrap(), inverse_power(3, 2));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let fp = FieldParams::canonical();
        assert_eq!(
            BallCensus::enumerate(&fp, 1, 5, 5, 1000),
            Err(Error::WindowCapExceeded {
                windows: 177147,
                cap: 1000
            })
        );
    }

    #[test]
    fn synthetic_power_law() {
        let fp = FieldParams::canonical();
        // N = r^-1.5 with r = 3^-2k
        let data: Vec<(u32, u64)> = (1..=5).map(|k| (2 * k, 27u64.pow(k))).collect();
        let s = CountSeries::from_counts(fp.clone(), &data);
        assert!((dimension_estimate(&s).unwrap() - 1.5).abs() < 1e-12);
        let short = CountSeries::from_counts(fp.clone(), &data[..2]);
        assert!(matches!(dimension_estimate(&short), Err(Error::DegenerateSeries(_))));
        let flat = CountSeries::from_counts(fp, &[(2, 9), (2, 9), (2, 9)]);
        assert!(matches!(dimension_estimate(&flat), Err(Error::DegenerateSeries(_))));
    }

    #[test]
    fn cover_bound_values() {
        let fp = FieldParams::canonical();
        assert_eq!(cover_bound(&fp, 1), BigRational::from_integer(BigInt::from(81)));
        assert_eq!(tube_index(&fp, 3), Some(1));
        assert_eq!(tube_index(&fp, 2), None);
        assert_eq!(tube_index(&FieldParams::variant(), 4), Some(1));
    }

    #[test]
    fn csv_columns() {
        let s = CountSeries::from_counts(FieldParams::canonical(), &[(1, 9), (2, 27)]);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("radius,count,cover_upper_bound,mass_lower_bound"));
        assert!(lines.next().unwrap().starts_with("0.333"));
        assert!(lines.next().unwrap().contains(",27,,"));
    }
}
