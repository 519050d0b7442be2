//! Symbol statistics along forward orbits, compared with the uniform
//! Bernoulli measure on itineraries.
//!
//! A word `w` of length `L` read along an orbit is a cylinder of the shift;
//! its `μ_T`-mass is `p^-L`. A generic orbit sees each cylinder with that
//! frequency.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimension::ratio_f64;
use crate::dynamics::{BasinStatus, PlaneMap};
use crate::error::{Error, Result};
use crate::padic::{haar_point, seeded_rng, Point};
use crate::symbolic::{inverse_power, ItineraryWindow};

pub use crate::dimension::{mu_ball, BallCensus, BallId};

/// A window of i.i.d. uniform symbols, fixed by `seed`.
pub fn bernoulli_window(p: u32, seed: u64, m: usize, n: usize) -> ItineraryWindow {
    ItineraryWindow::random(p, m, n, &mut seeded_rng(seed))
}

/// `s_0, …, s_{len-1}`: residues of the x-coordinates of `T^k(pt)`.
/// Needs `len` digits of `pt`.
pub fn itinerary(map: &PlaneMap, pt: &Point, len: usize) -> Result<Vec<u32>> {
    if !pt.in_unit_polydisc() {
        return Err(Error::NotInUnitPolydisc);
    }
    let mut out = Vec::with_capacity(len);
    let mut cur = pt.clone();
    for k in 0..len {
        if cur.x.prec() < 1 {
            return Err(Error::PrecisionExhausted { index: Some(k as i64) });
        }
        out.push(cur.x.residue()?);
        if k + 1 < len {
            // only the x-coordinate's digits matter downstream
            cur = map.step(&cur).map_err(|e| match e {
                Error::PrecisionExhausted { .. } => Error::PrecisionExhausted {
                    index: Some(k as i64 + 1),
                },
                other => other,
            })?;
        }
    }
    Ok(out)
}

/// How often a word occurs along an orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyReport {
    pub word: String,
    pub observed_count: u64,
    pub total: u64,
    pub expected: BigRational,
    pub z_score: f64,
}

impl FrequencyReport {
    fn new(p: u32, word: &[u32], observed_count: u64, total: u64) -> Self {
        let expected = inverse_power(p, word.len() as u32);
        let e = ratio_f64(&expected);
        let f = observed_count as f64 / total as f64;
        let sigma = (e * (1.0 - e) / total as f64).sqrt();
        Self {
            word: format_word(p, word),
            observed_count,
            total,
            expected,
            z_score: (f - e) / sigma,
        }
    }

    pub fn frequency(&self) -> f64 {
        self.observed_count as f64 / self.total as f64
    }

    pub fn expected_f64(&self) -> f64 {
        ratio_f64(&self.expected)
    }

    pub fn deviation(&self) -> f64 {
        (self.frequency() - self.expected_f64()).abs()
    }

    pub fn within(&self, band: f64) -> bool {
        self.deviation() <= band
    }

    pub fn frequency_ratio(&self) -> BigRational {
        BigRational::new(BigInt::from(self.observed_count), BigInt::from(self.total))
    }
}

pub fn format_word(p: u32, word: &[u32]) -> String {
    let parts: Vec<String> = word.iter().map(u32::to_string).collect();
    if p > 10 {
        parts.join(",")
    } else {
        parts.concat()
    }
}

/// Sliding counts of every word of length `len` in `symbols`, divided by
/// the number of symbols. Words are listed in lexicographic order.
pub fn word_frequencies(p: u32, symbols: &[u32], len: usize) -> Vec<FrequencyReport> {
    let total = symbols.len() as u64;
    let mut counts: BTreeMap<Vec<u32>, u64> = all_words(p, len).into_iter().map(|w| (w, 0)).collect();
    if len > 0 {
        for w in symbols.windows(len) {
            *counts.get_mut(w).expect("symbols are below p") += 1;
        }
    }
    counts
        .into_iter()
        .map(|(w, c)| FrequencyReport::new(p, &w, c, total))
        .collect()
}

fn all_words(p: u32, len: usize) -> Vec<Vec<u32>> {
    let mut words = vec![Vec::new()];
    for _ in 0..len {
        words = words
            .into_iter()
            .flat_map(|w| {
                (0..p).map(move |s| {
                    let mut w = w.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
    }
    words
}

/// Frequencies of the symbols `0 … p-1` among `s_0 … s_{n-1}`.
pub fn symbol_frequencies(map: &PlaneMap, pt: &Point, n: usize) -> Result<Vec<FrequencyReport>> {
    Ok(word_frequencies(map.p(), &itinerary(map, pt, n)?, 1))
}

/// Sliding count of `word` among `s_0 … s_{n-1}`, divided by `n`.
pub fn cylinder_frequency(map: &PlaneMap, pt: &Point, word: &[u32], n: usize) -> Result<FrequencyReport> {
    let p = map.p();
    if let Some(&symbol) = word.iter().find(|&&s| s >= p) {
        return Err(Error::InvalidSymbol { symbol, p });
    }
    let symbols = itinerary(map, pt, n)?;
    let count = if word.is_empty() {
        symbols.len() as u64
    } else {
        symbols.windows(word.len()).filter(|w| *w == word).count() as u64
    };
    Ok(FrequencyReport::new(p, word, count, n as u64))
}

/// Where an orbit starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitStart {
    /// A Haar-random point of the unit polydisc drawn from this seed.
    Haar { seed: u64 },
    /// A given point, possibly outside the unit polydisc but in the basin.
    Point { label: String, point: Point },
}

impl OrbitStart {
    pub fn label(&self) -> String {
        match self {
            OrbitStart::Haar { seed } => seed.to_string(),
            OrbitStart::Point { label, .. } => label.clone(),
        }
    }
}

/// Band around `p^-L` that a frequency must fall in.
#[derive(Debug, Clone, PartialEq)]
pub enum Bands {
    /// `sigmas` binomial standard deviations.
    Binomial { sigmas: f64 },
    /// A fixed half-width per word length.
    Fixed(BTreeMap<usize, f64>),
}

impl Default for Bands {
    fn default() -> Self {
        Bands::Binomial { sigmas: 4.0 }
    }
}

impl Bands {
    pub fn width(&self, p: u32, len: usize, total: usize) -> f64 {
        match self {
            Bands::Binomial { sigmas } => {
                let e = (p as f64).powi(-(len as i32));
                sigmas * (e * (1.0 - e) / total as f64).sqrt()
            }
            Bands::Fixed(widths) => widths.get(&len).copied().unwrap_or(f64::INFINITY),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquidistributionConfig {
    pub orbit_length: usize,
    pub word_lengths: Vec<usize>,
    pub bands: Bands,
    /// Steps allowed for a basin start to reach the unit polydisc.
    pub entry_budget: usize,
}

impl Default for EquidistributionConfig {
    fn default() -> Self {
        Self {
            orbit_length: 10_000,
            word_lengths: vec![1, 2],
            bands: Bands::default(),
            entry_budget: 50,
        }
    }
}

/// One line of the report: fields `seed, word, observed, expected, z_score, pass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub seed: String,
    pub word: String,
    pub observed: f64,
    pub expected: f64,
    pub z_score: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartReport {
    pub seed: String,
    pub entry_time: usize,
    /// All bands passed.
    pub generic: bool,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquidistributionReport {
    pub orbit_length: usize,
    pub starts: Vec<StartReport>,
}

impl EquidistributionReport {
    pub fn rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.starts.iter().flat_map(|s| s.rows.iter())
    }

    pub fn all_pass(&self) -> bool {
        self.starts.iter().all(|s| s.generic)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for row in self.rows() {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

/// Runs every start (in parallel; results keep the order of `starts`).
pub fn equidistribution_report(
    map: &PlaneMap,
    starts: &[OrbitStart],
    config: &EquidistributionConfig,
) -> Result<EquidistributionReport> {
    let starts = starts
        .par_iter()
        .map(|start| run_start(map, start, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(EquidistributionReport {
        orbit_length: config.orbit_length,
        starts,
    })
}

fn run_start(map: &PlaneMap, start: &OrbitStart, config: &EquidistributionConfig) -> Result<StartReport> {
    let p = map.p();
    let n = config.orbit_length;
    let (entry_time, pt) = match start {
        OrbitStart::Haar { seed } => (0, haar_point(p, &mut seeded_rng(*seed), n as u32 + 1)),
        OrbitStart::Point { point, .. } => match map.basin_entry_time(point, config.entry_budget)? {
            BasinStatus::Entered(k) => (k, map.iterate(point, k)?),
            _ => return Err(Error::NotInUnitPolydisc),
        },
    };
    let symbols = itinerary(map, &pt, n)?;
    let seed = start.label();
    let mut rows = Vec::new();
    for &len in &config.word_lengths {
        let band = config.bands.width(p, len, n);
        for rep in word_frequencies(p, &symbols, len) {
            rows.push(ReportRow {
                seed: seed.clone(),
                word: rep.word.clone(),
                observed: rep.frequency(),
                expected: rep.expected_f64(),
                z_score: rep.z_score,
                pass: rep.within(band),
            });
        }
    }
    Ok(StartReport {
        generic: rows.iter().all(|r| r.pass),
        seed,
        entry_time,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{FieldParams, PadicScalar};
    use crate::symbolic::Coder;

    #[test]
    fn bernoulli_windows() {
        let a = bernoulli_window(3, 5, 4, 6);
        assert_eq!(a, bernoulli_window(3, 5, 4, 6));
        assert_eq!((a.m(), a.n()), (4, 6));
        let mut counts = [0usize; 3];
        for seed in 0..1000 {
            for &s in bernoulli_window(3, seed, 4, 5).chain().iter() {
                counts[s as usize] += 1;
            }
        }
        // 10^4 draws, 4 sigma band
        let sigma = (2.0f64 / 9.0 / 10_000.0).sqrt();
        for c in counts {
            assert!((c as f64 / 10_000.0 - 1.0 / 3.0).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn origin_is_all_zero() {
        let map = PlaneMap::canonical();
        let o = Point::origin(3, 60);
        let reps = symbol_frequencies(&map, &o, 50).unwrap();
        assert_eq!(reps[0].frequency(), 1.0);
        assert_eq!(reps[1].observed_count, 0);
        assert_eq!(cylinder_frequency(&map, &o, &[0], 50).unwrap().frequency(), 1.0);
        assert!(matches!(
            symbol_frequencies(&map, &o, 70),
            Err(Error::PrecisionExhausted { index: Some(60) })
        ));
    }

    #[test]
    fn period_two_point() {
        let map = PlaneMap::canonical();
        let coder = Coder::new(map.clone()).with_precision(120);
        let pt = coder
            .periodic_point(&ItineraryWindow::parse(3, ".01").unwrap())
            .unwrap();
        let reps = symbol_frequencies(&map, &pt, 100).unwrap();
        let freqs: Vec<f64> = reps.iter().map(|r| r.frequency()).collect();
        assert_eq!(freqs, vec![0.5, 0.5, 0.0]);
    }

    #[test]
    fn cylinder_additivity_and_shift() {
        let map = PlaneMap::canonical();
        let pt = haar_point(3, &mut seeded_rng(21), 2001);
        let symbols = itinerary(&map, &pt, 2000).unwrap();
        for len in 1..=3 {
            let reps = word_frequencies(3, &symbols, len);
            assert_eq!(reps.len(), 3usize.pow(len as u32));
            let sum: u64 = reps.iter().map(|r| r.observed_count).sum();
            assert_eq!(sum, 2000 - len as u64 + 1);
        }
        // the orbit of T(pt) sees the same statistics up to one symbol
        let next = map.step(&pt).unwrap();
        let a = cylinder_frequency(&map, &pt, &[1, 2], 1999).unwrap();
        let b = cylinder_frequency(&map, &next, &[1, 2], 1999).unwrap();
        assert!((a.observed_count as i64 - b.observed_count as i64).abs() <= 1);
    }

    #[test]
    fn haar_itinerary_is_equidistributed() {
        let map = PlaneMap::canonical();
        let pt = haar_point(3, &mut seeded_rng(4), 3001);
        for rep in symbol_frequencies(&map, &pt, 3000).unwrap() {
            assert!(rep.z_score.abs() < 4.0, "{rep:?}");
        }
        let rep = cylinder_frequency(&map, &pt, &[2, 0, 1], 3000).unwrap();
        assert!(rep.z_score.abs() < 4.0);
    }

    #[test]
    fn report_flags_the_fixed_point() {
        let map = PlaneMap::new(FieldParams::canonical());
        let config = EquidistributionConfig {
            orbit_length: 1500,
            ..Default::default()
        };
        let third = PadicScalar::from_rational(3, &BigInt::from(1), 1, 1600).unwrap();
        let starts = vec![
            OrbitStart::Point {
                label: "origin".into(),
                point: Point::origin(3, 1600),
            },
            OrbitStart::Haar { seed: 1 },
            OrbitStart::Point {
                label: "(0, 1/a)".into(),
                point: Point::new(PadicScalar::zero(3, 1600), third).unwrap(),
            },
        ];
        let report = equidistribution_report(&map, &starts, &config).unwrap();
        assert!(!report.starts[0].generic);
        assert!(report.starts[1].generic);
        assert_eq!(report.starts[2].entry_time, 1);
        assert!(report.starts[2].generic);
        assert_eq!(report.rows().count(), 3 * 12);
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("seed,word,observed,expected,z_score,pass\n"));
        assert!(report.to_json().unwrap().contains("\"z_score\""));
    }

    #[test]
    fn stable_companion_is_not_generic() {
        let map = PlaneMap::canonical();
        let coder = Coder::new(map.clone()).with_precision(200);
        let companion = coder.stable_companion(&Point::origin(3, 200), &[1, 2], 150).unwrap();
        let reps = symbol_frequencies(&map, &companion.point, 150).unwrap();
        assert_eq!(reps[0].frequency(), 1.0);
    }
}
