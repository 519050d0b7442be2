//! The acceptance suite: nine end-to-end checks with fixed thresholds,
//! shared by the `acceptance` test target and `padic-attractor --acceptance`.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::dimension::{
    box_count, default_window_cap, dimension_estimate, max_feasible_depth, theoretical_dimension, BallCensus,
    CountSeries,
};
use crate::dynamics::PlaneMap;
use crate::error::{Error, Result};
use crate::measure::{equidistribution_report, Bands, EquidistributionConfig, OrbitStart};
use crate::padic::{haar_point, haar_sample, seeded_rng, FieldParams, Norm, PadicScalar, Point};
use crate::symbolic::{tube_radii, Coder, ItineraryWindow};

#[derive(Debug, Clone)]
pub struct AcceptanceConfig {
    pub seed: u64,
    pub orbit_length: usize,
    pub window_cap: u128,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            orbit_length: 10_000,
            window_cap: default_window_cap(3),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}. {}: {} ({:.2} s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

fn timed(
    id: u8,
    title: &'static str,
    limit: Option<Duration>,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> CriterionOutcome {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match result {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            pass = false;
            detail.push_str(&format!("; over the {} s limit", limit.as_secs()));
        }
    }
    CriterionOutcome {
        id,
        title,
        pass,
        detail,
        elapsed,
    }
}

pub fn run_all(config: &AcceptanceConfig) -> Vec<CriterionOutcome> {
    vec![
        phi_expansion(config),
        strict_attractor(),
        conjugacy(config),
        fixed_point(),
        equidistribution(config),
        stable_manifold(),
        dimension(config),
        regularity(config),
        eigen_norms(config),
    ]
}

/// Criterion 1: `|φ(t1) - φ(t2)| = 3 |t1 - t2|` on 10^4 pairs with `|t1 - t2| <= 1/3`.
pub fn phi_expansion(config: &AcceptanceConfig) -> CriterionOutcome {
    timed(1, "phi expansion", Some(Duration::from_secs(5)), || {
        let map = PlaneMap::canonical();
        let mut rng = seeded_rng(config.seed);
        let mut bad = 0usize;
        let pairs = 10_000;
        for _ in 0..pairs {
            let t1 = haar_sample(3, &mut rng, 30);
            let k: u32 = rng.gen_range(1..=20);
            let unit = 1 + rng.gen_range(0..2) + 3 * rng.gen_range(0..3i64.pow(8));
            let offset = PadicScalar::from_bigint(3, &(BigInt::from(unit) * BigInt::from(3).pow(k)), 30)?;
            let t2 = t1.add(&offset)?;
            let dt = t1.sub(&t2)?.pnorm();
            let dphi = map.phi(&t1)?.sub(&map.phi(&t2)?)?.pnorm();
            let ok =
                matches!((dt, dphi), (Norm::Exact { val: a }, Norm::Exact { val: b }) if a == k as i64 && b == a - 1);
            bad += usize::from(!ok);
        }
        Ok((
            bad == 0,
            format!("{} of {pairs} pairs expand by exactly 3", pairs - bad),
        ))
    })
}

/// Criterion 2: `(1, 0)` has no preimage in the unit polydisc.
pub fn strict_attractor() -> CriterionOutcome {
    timed(2, "strict attractor witness", None, || {
        let map = PlaneMap::canonical();
        let result = map.backward_orbit(&Point::from_i64(3, 1, 0, 20)?, 1);
        let pass = result == Err(Error::ExitsUnitPolydisc { step: 1 });
        Ok((pass, format!("backward orbit of (1, 0): {:?}", result.map(|_| "stays"))))
    })
}

/// Criterion 3: 500 windows at depth 6 on both sides: conjugacy residual within
/// `max(δ_5, ε_7)` and exact re-encoding.
pub fn conjugacy(config: &AcceptanceConfig) -> CriterionOutcome {
    timed(3, "conjugacy", Some(Duration::from_secs(120)), || {
        let coder = Coder::canonical().with_precision(32);
        let (delta5, _) = tube_radii(coder.params(), 0, 5);
        let (_, eps7) = tube_radii(coder.params(), 7, 0);
        let bound = delta5.max(eps7);
        let mut rng = seeded_rng(config.seed);
        let mut worst = BigRational::zero();
        let mut over = 0usize;
        let mut mismatched = 0usize;
        for _ in 0..500 {
            let w = ItineraryWindow::random(3, 6, 6, &mut rng);
            let resid = coder.conjugacy_residual(&w)?.to_ratio(3);
            if resid > bound {
                over += 1;
            }
            worst = worst.max(resid);
            let decoded = coder.decode(&w)?;
            if coder.encode(&decoded.point, 6, 6)? != w {
                mismatched += 1;
            }
        }
        Ok((
            over == 0 && mismatched == 0,
            format!("max residual {worst} <= {bound} ({over} over), {mismatched} round-trip mismatches"),
        ))
    })
}

/// Root of `x^2 + 5` that is `≡ 1 (mod 3)`, modulo `3^k`, found one digit
/// at a time.
pub fn hensel_sqrt_minus_five(k: u32) -> u64 {
    let mut root = 1u64;
    for j in 2..=k {
        let m = 3u64.pow(j);
        root = (0..3)
            .map(|d| root + d * 3u64.pow(j - 1))
            .find(|&c| (c as u128 * c as u128 + 5).is_multiple_of(m as u128))
            .expect("the root lifts");
    }
    root % 3u64.pow(k)
}

/// Criterion 4: The constant-1 window decodes to the fixed point `x = y`, `x^2 = -5`.
pub fn fixed_point() -> CriterionOutcome {
    timed(4, "fixed point", None, || {
        let coder = Coder::canonical();
        let w = ItineraryWindow::constant(3, 1, 3, 3)?;
        let d = coder.decode(&w)?;
        let oracle = BigUint::from(hensel_sqrt_minus_five(4));
        let x = d.point.x.reduce_mod(4)?;
        let y = d.point.y.reduce_mod(4)?;
        Ok((
            x == oracle && y == oracle,
            format!("decode({w}) = ({x}, {y}) mod 81, Hensel root {oracle}"),
        ))
    })
}

/// Criterion 5: Symbol and length-2 word frequencies along orbits of length 10^4.
pub fn equidistribution(config: &AcceptanceConfig) -> CriterionOutcome {
    timed(5, "equidistribution", Some(Duration::from_secs(600)), || {
        let map = PlaneMap::canonical();
        let n = config.orbit_length;
        let prec = n as i64 + 2;
        let a_inv = PadicScalar::from_rational(3, &BigInt::one(), 1, prec)?;
        let starts = vec![
            OrbitStart::Haar { seed: config.seed },
            OrbitStart::Point {
                label: "(0, 1/a)".into(),
                point: Point::new(PadicScalar::zero(3, prec), a_inv)?,
            },
        ];
        let eq = EquidistributionConfig {
            orbit_length: n,
            word_lengths: vec![1, 2],
            bands: Bands::Fixed([(1, 0.02), (2, 0.015)].into_iter().collect()),
            entry_budget: 10,
        };
        let report = equidistribution_report(&map, &starts, &eq)?;
        let worst = |len: usize| {
            report
                .rows()
                .filter(|r| r.word.len() == len)
                .map(|r| (r.observed - r.expected).abs())
                .fold(0.0, f64::max)
        };
        let failing: Vec<String> = report
            .rows()
            .filter(|r| !r.pass)
            .map(|r| format!("{}:{}", r.seed, r.word))
            .collect();
        Ok((
            report.all_pass(),
            format!(
                "N = {n}, max deviation {:.4} (symbols, band 0.02), {:.4} (pairs, band 0.015); failing: {:?}",
                worst(1),
                worst(2),
                failing
            ),
        ))
    })
}

/// Criterion 6: A companion of the fixed point with one changed backward symbol
/// converges to it at rate `ε_{k-1}`.
pub fn stable_manifold() -> CriterionOutcome {
    timed(6, "stable manifold", None, || {
        let coder = Coder::canonical();
        let fixed = coder.periodic_point(&ItineraryWindow::parse(3, ".1")?)?;
        let mut back = vec![1u32; 8];
        back[0] = 0;
        let companion = coder.stable_companion(&fixed, &back, 40)?.point;
        let map = coder.map();
        let mut ok = companion != fixed;
        let mut vals = Vec::new();
        for k in 1..=8usize {
            let d = map.iterate(&fixed, k)?.distance(&map.iterate(&companion, k)?)?;
            let (_, eps) = tube_radii(coder.params(), k - 1, 0);
            ok &= d.to_ratio(3) <= eps && d != Norm::Zero;
            vals.push(format!("{}", d.val_bound()));
        }
        Ok((ok, format!("-log_3 of distances for k = 1..8: [{}]", vals.join(", "))))
    })
}

fn count_line(series: &CountSeries) -> String {
    series
        .entries
        .iter()
        .map(|e| e.count.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Criterion 7: Count sandwich and the log-log slope.
pub fn dimension(config: &AcceptanceConfig) -> CriterionOutcome {
    timed(7, "dimension", Some(Duration::from_secs(600)), || {
        let fp = FieldParams::canonical();
        let jmax = max_feasible_depth(&fp, config.window_cap);
        let depths: Vec<u32> = (1..=jmax).collect();
        let series = box_count(&fp, &depths, config.window_cap)?;
        let mut notes = vec![format!("N(3^-j), j = 1..{jmax}: [{}]", count_line(&series))];

        // (1/9) r^-1.5 <= N(r)  <=>  81 N^2 >= 3^(3j)
        let lower_ok = series
            .entries
            .iter()
            .filter(|e| e.depth <= 4)
            .all(|e| BigInt::from(81u64) * BigInt::from(e.count).pow(2) >= BigInt::from(3).pow(3 * e.depth));
        notes.push(format!(
            "lower bound at j = 1..4: {}",
            if lower_ok { "ok" } else { "violated" }
        ));

        let mut upper_ok = true;
        for (n, e) in series.tube_entries() {
            let bound = e.cover_upper_bound.clone().expect("tube entry");
            let count = BigRational::from_integer(BigInt::from(e.count));
            let holds = count <= bound;
            upper_ok &= holds;
            let (_, eps) = tube_radii(&fp, n, 0);
            let q_bound = BigRational::from_integer(BigInt::from(3).pow(n as u32 + 1)) / eps;
            notes.push(format!(
                "N(eps_{n}) = {} vs 3^{n}/eps_{n} = {} [{}] (3^{}/eps_{n} = {})",
                e.count,
                bound,
                if holds { "ok" } else { "exceeded" },
                n + 1,
                q_bound
            ));
        }

        let d = dimension_estimate(&series)?;
        let target = theoretical_dimension(&fp);
        let slope_ok = (d - target).abs() <= 0.1;
        notes.push(format!("slope {d:.4} vs {target}"));

        let vp = FieldParams::variant();
        let vmax = max_feasible_depth(&vp, config.window_cap);
        let vseries = box_count(&vp, &(1..=vmax).collect::<Vec<_>>(), config.window_cap)?;
        let vd = dimension_estimate(&vseries)?;
        let vtarget = theoretical_dimension(&vp);
        let vslope_ok = (vd - vtarget).abs() <= 0.1;
        notes.push(format!(
            "a = 9: N(3^-j), j = 1..{vmax}: [{}], slope {vd:.4} vs {vtarget:.4}",
            count_line(&vseries)
        ));

        Ok((lower_ok && upper_ok && slope_ok && vslope_ok, notes.join("; ")))
    })
}

/// Criterion 8: `μ_T(B) <= 9 diam(B)^1.5` for every occupied ball of depth at most 3.
pub fn regularity(config: &AcceptanceConfig) -> CriterionOutcome {
    timed(8, "measure regularity", None, || {
        let fp = FieldParams::canonical();
        let census = BallCensus::for_depth(&fp, 3, config.window_cap)?;
        let mut ok = true;
        let mut worst = 0f64;
        let mut balls = 0usize;
        for j in 0..=3u32 {
            let coarse = census.coarsen(j);
            // μ^2 <= 81 * 3^(-3j)
            let cap = BigRational::new(BigInt::from(81), BigInt::from(3).pow(3 * j));
            for (ball, _) in coarse.balls() {
                let mu = coarse.mu(ball)?;
                ok &= &mu * &mu <= cap;
                worst = worst.max(mu.to_f64().unwrap_or(f64::NAN) * 3f64.powf(1.5 * j as f64));
                balls += 1;
            }
        }
        Ok((ok, format!("{balls} balls, max mu/diam^1.5 = {worst:.4} <= 9")))
    })
}

/// Criterion 9: Eigenvalue norms `(1/9, 3)` at 100 random points.
pub fn eigen_norms(config: &AcceptanceConfig) -> CriterionOutcome {
    timed(9, "eigen-norm constancy", None, || {
        let map = PlaneMap::canonical();
        let mut rng = seeded_rng(config.seed);
        let expected = (Norm::from_val(2), Norm::from_val(-1));
        let mut hits = 0;
        for _ in 0..100 {
            let pt = haar_point(3, &mut rng, 20);
            hits += usize::from(map.eigen_norms(&pt)? == expected);
        }
        Ok((hits == 100, format!("{hits} of 100 points give (1/9, 3)")))
    })
}
