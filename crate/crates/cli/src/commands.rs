use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::{bail, Context, Result};
use padic_attractor::acceptance::{run_all, AcceptanceConfig, CriterionOutcome};
use padic_attractor::dimension::{box_count, dimension_estimate, theoretical_dimension};
use padic_attractor::dynamics::PlaneMap;
use padic_attractor::measure::{equidistribution_report, Bands, EquidistributionConfig, OrbitStart};
use padic_attractor::padic::{format_digits, parse_literal, seeded_rng, PadicScalar, Point};
use padic_attractor::symbolic::{Coder, ItineraryWindow};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    parse_depths, ConjugacyOpts, DecodeOpts, DimensionOpts, EmbedOpts, EncodeOpts, EquidistributionOpts, FileConfig,
    Format, OrbitOpts, RunConfig,
};
use crate::embed::{embed_real, write_svg};
use crate::{Cli, Command};

/// Runs one invocation; the value is the process exit status.
pub fn run(cli: Cli) -> Result<i32> {
    let file = match &cli.global.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(&cli.global, &file)?;
    if cfg.params.is_experimental() {
        eprintln!("warning: p = 2 is experimental");
    }
    if cfg.acceptance {
        return acceptance(&cfg);
    }
    let Some(command) = cli.command else {
        bail!("no subcommand given (try --help)");
    };
    match command {
        Command::Orbit(o) => orbit(&cfg, o.or(file.orbit)),
        Command::Encode(o) => encode(&cfg, o.or(file.encode)),
        Command::Decode(o) => decode(&cfg, o.or(file.decode)),
        Command::CheckConjugacy(o) => check_conjugacy(&cfg, o.or(file.check_conjugacy)),
        Command::Equidistribution(o) => equidistribution(&cfg, o.or(file.equidistribution)),
        Command::Dimension(o) => dimension(&cfg, o.or(file.dimension)),
        Command::Embed(o) => embed(&cfg, o.or(file.embed)),
    }
}

fn sink(cfg: &RunConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn format(cfg: &RunConfig, default: Format, allowed: &[Format]) -> Result<Format> {
    let f = cfg.format.unwrap_or(default);
    if !allowed.contains(&f) {
        bail!("format {f:?} is not available for this subcommand (choose from {allowed:?})");
    }
    Ok(f)
}

fn coder(cfg: &RunConfig) -> Coder {
    Coder::new(PlaneMap::new(cfg.params.clone())).with_precision(cfg.precision)
}

fn point(cfg: &RunConfig, x: Option<&str>, y: Option<&str>) -> Result<Point> {
    let p = cfg.params.p();
    let coord = |name: &str, v: Option<&str>| {
        let v = v.with_context(|| format!("--{name} is required"))?;
        parse_literal(p, v, cfg.precision).with_context(|| format!("--{name}"))
    };
    Ok(Point::new(coord("x", x)?, coord("y", y)?)?)
}

fn write_json<T: Serialize>(cfg: &RunConfig, value: &T) -> Result<()> {
    let mut out = sink(cfg)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn write_csv<T: Serialize>(cfg: &RunConfig, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink(cfg)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn digits(t: &PadicScalar) -> String {
    format_digits(t, t.prec())
}

fn acceptance(cfg: &RunConfig) -> Result<i32> {
    let config = AcceptanceConfig {
        seed: cfg.seed,
        window_cap: cfg.window_cap,
        ..AcceptanceConfig::default()
    };
    let outcomes = run_all(&config);
    let mut out = sink(cfg)?;
    for o in &outcomes {
        writeln!(out, "{o}")?;
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    writeln!(out, "{passed}/{} criteria passed", outcomes.len())?;
    out.flush()?;
    Ok(acceptance_status(&outcomes))
}

/// Zero iff every criterion passed.
pub fn acceptance_status(outcomes: &[CriterionOutcome]) -> i32 {
    i32::from(!outcomes.iter().all(|o| o.pass))
}

#[derive(Serialize)]
struct PointRow {
    k: i64,
    x: String,
    y: String,
    precision: i64,
}

fn orbit(cfg: &RunConfig, o: OrbitOpts) -> Result<i32> {
    let map = PlaneMap::new(cfg.params.clone());
    let start = point(
        cfg,
        Some(o.x.as_deref().unwrap_or("0")),
        Some(o.y.as_deref().unwrap_or("0")),
    )?;
    let steps = o.steps.unwrap_or(10);
    let seg = if o.backward {
        map.backward_orbit(&start, steps).context("backward orbit")?
    } else {
        map.forward_orbit(&start, steps).context("forward orbit")?
    };
    match format(cfg, Format::Json, &[Format::Json, Format::Csv])? {
        Format::Json => {
            let mut out = sink(cfg)?;
            seg.write_json_lines(&mut out)?;
            out.flush()?;
        }
        _ => write_csv(
            cfg,
            seg.points.iter().enumerate().map(|(i, pt)| PointRow {
                k: seg.start + i as i64,
                x: digits(&pt.x),
                y: digits(&pt.y),
                precision: pt.prec(),
            }),
        )?,
    }
    Ok(0)
}

#[derive(Serialize)]
struct EncodeRow {
    window: String,
    m: usize,
    n: usize,
}

fn encode(cfg: &RunConfig, o: EncodeOpts) -> Result<i32> {
    let pt = point(cfg, o.x.as_deref(), o.y.as_deref())?;
    let (m, n) = (o.back.unwrap_or(4), o.fwd.unwrap_or(4));
    let w = coder(cfg).encode(&pt, m, n).context("encode")?;
    let row = EncodeRow {
        window: w.to_string(),
        m,
        n,
    };
    match format(cfg, Format::Json, &[Format::Json, Format::Csv])? {
        Format::Json => write_json(cfg, &row)?,
        _ => write_csv(cfg, [row])?,
    }
    Ok(0)
}

#[derive(Serialize)]
struct DecodeRow {
    window: String,
    x: String,
    y: String,
    radius: String,
}

fn decode(cfg: &RunConfig, o: DecodeOpts) -> Result<i32> {
    let text = o.window.context("--window is required")?;
    let w = ItineraryWindow::parse(cfg.params.p(), &text)?;
    let d = coder(cfg).decode(&w).context("decode")?;
    match format(cfg, Format::Json, &[Format::Json, Format::Csv])? {
        Format::Json => write_json(cfg, &d.record())?,
        _ => write_csv(
            cfg,
            [DecodeRow {
                window: d.window.to_string(),
                x: digits(&d.point.x),
                y: digits(&d.point.y),
                radius: d.radius.to_string(),
            }],
        )?,
    }
    Ok(0)
}

#[derive(Serialize)]
struct ConjugacyRow {
    window: String,
    residual: String,
    radius: String,
    within: bool,
    round_trip: bool,
}

#[derive(Serialize)]
struct ConjugacySummary {
    windows: usize,
    depth: usize,
    max_residual: String,
    all_within: bool,
    all_round_trip: bool,
    rows: Vec<ConjugacyRow>,
}

fn check_conjugacy(cfg: &RunConfig, o: ConjugacyOpts) -> Result<i32> {
    let count = o.windows.unwrap_or(100);
    let depth = o.depth.unwrap_or(6);
    let coder = coder(cfg);
    let p = cfg.params.p();
    let mut rng = seeded_rng(cfg.seed);
    let windows: Vec<ItineraryWindow> = (0..count)
        .map(|_| ItineraryWindow::random(p, depth, depth, &mut rng))
        .collect();
    let results = windows
        .par_iter()
        .map(|w| -> padic_attractor::Result<_> {
            let resid = coder.conjugacy_residual(w)?.to_ratio(p);
            let radius = coder.radius(w);
            let decoded = coder.decode(w)?;
            let round_trip = coder.encode(&decoded.point, depth, depth)? == *w;
            Ok((resid, radius, round_trip))
        })
        .collect::<padic_attractor::Result<Vec<_>>>()
        .context("conjugacy sweep")?;
    let max_residual = results
        .iter()
        .map(|r| &r.0)
        .max()
        .map(ToString::to_string)
        .unwrap_or_else(|| "0".into());
    let rows: Vec<ConjugacyRow> = windows
        .iter()
        .zip(&results)
        .map(|(w, (resid, radius, rt))| ConjugacyRow {
            window: w.to_string(),
            residual: resid.to_string(),
            radius: radius.to_string(),
            within: resid <= radius,
            round_trip: *rt,
        })
        .collect();
    let all_within = rows.iter().all(|r| r.within);
    let all_round_trip = rows.iter().all(|r| r.round_trip);
    eprintln!(
        "{count} windows at depth {depth}: max residual {max_residual}, all within radius: {all_within}, all round trips: {all_round_trip}"
    );
    let summary = ConjugacySummary {
        windows: count,
        depth,
        max_residual,
        all_within,
        all_round_trip,
        rows,
    };
    match format(cfg, Format::Csv, &[Format::Json, Format::Csv])? {
        Format::Json => write_json(cfg, &summary)?,
        _ => write_csv(cfg, summary.rows)?,
    }
    Ok(if all_within && all_round_trip { 0 } else { 1 })
}

fn equidistribution(cfg: &RunConfig, o: EquidistributionOpts) -> Result<i32> {
    let map = PlaneMap::new(cfg.params.clone());
    let p = cfg.params.p();
    let length = o.length.unwrap_or(10_000);
    let eq = EquidistributionConfig {
        orbit_length: length,
        word_lengths: o.word_lengths.unwrap_or_else(|| vec![1, 2]),
        bands: Bands::Binomial {
            sigmas: o.sigmas.unwrap_or(4.0),
        },
        ..EquidistributionConfig::default()
    };
    let mut starts: Vec<OrbitStart> = (0..o.starts.unwrap_or(1) as u64)
        .map(|i| OrbitStart::Haar { seed: cfg.seed + i })
        .collect();
    if o.basin_start {
        let prec = (length + eq.entry_budget + 2) as i64;
        let a_inv = PadicScalar::from_i64(p, 1, prec)?.div_by(cfg.params.a())?;
        starts.push(OrbitStart::Point {
            label: "(0, 1/a)".into(),
            point: Point::new(PadicScalar::zero(p, a_inv.prec()), a_inv)?,
        });
    }
    let report = equidistribution_report(&map, &starts, &eq).context("equidistribution")?;
    eprintln!(
        "{} starts, orbit length {length}: {}",
        starts.len(),
        if report.all_pass() {
            "all bands passed"
        } else {
            "some bands failed"
        }
    );
    match format(cfg, Format::Csv, &[Format::Json, Format::Csv])? {
        Format::Json => {
            let mut out = sink(cfg)?;
            writeln!(out, "{}", report.to_json()?)?;
            out.flush()?;
        }
        _ => {
            let mut out = sink(cfg)?;
            report.write_csv(&mut out)?;
            out.flush()?;
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct DimensionEntry {
    depth: u32,
    radius: String,
    count: u64,
    cover_upper_bound: Option<String>,
    mass_lower_bound: f64,
}

#[derive(Serialize)]
struct DimensionSummary {
    estimate: f64,
    theoretical: f64,
    entries: Vec<DimensionEntry>,
}

fn dimension(cfg: &RunConfig, o: DimensionOpts) -> Result<i32> {
    let depths = parse_depths(o.depths.as_deref().unwrap_or("1..4"))?;
    let series = box_count(&cfg.params, &depths, cfg.window_cap).context("box count")?;
    let estimate = dimension_estimate(&series)?;
    let theoretical = theoretical_dimension(&cfg.params);
    eprintln!("slope {estimate:.4}, theoretical dimension {theoretical:.4}");
    match format(cfg, Format::Csv, &[Format::Json, Format::Csv])? {
        Format::Json => write_json(
            cfg,
            &DimensionSummary {
                estimate,
                theoretical,
                entries: series
                    .entries
                    .iter()
                    .map(|e| DimensionEntry {
                        depth: e.depth,
                        radius: e.radius.to_string(),
                        count: e.count,
                        cover_upper_bound: e.cover_upper_bound.as_ref().map(ToString::to_string),
                        mass_lower_bound: e.mass_lower_bound,
                    })
                    .collect(),
            },
        )?,
        _ => {
            let mut out = sink(cfg)?;
            series.write_csv(&mut out)?;
            out.flush()?;
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct EmbedRow {
    window: String,
    u: f64,
    v: f64,
}

fn embed(cfg: &RunConfig, o: EmbedOpts) -> Result<i32> {
    let count = o.windows.unwrap_or(300);
    let (m, n) = (o.back.unwrap_or(4), o.fwd.unwrap_or(4));
    let d = o.digits.unwrap_or(6);
    let coder = coder(cfg);
    let p = cfg.params.p();
    let mut rng = seeded_rng(cfg.seed);
    let windows: Vec<ItineraryWindow> = (0..count).map(|_| ItineraryWindow::random(p, m, n, &mut rng)).collect();
    let rows = windows
        .par_iter()
        .map(|w| -> padic_attractor::Result<EmbedRow> {
            let (u, v) = embed_real(&coder.decode(w)?.point, d)?;
            Ok(EmbedRow {
                window: w.to_string(),
                u,
                v,
            })
        })
        .collect::<padic_attractor::Result<Vec<_>>>()
        .context("embed")?;
    match format(cfg, Format::Csv, &[Format::Csv, Format::Svg, Format::Json])? {
        Format::Svg => {
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.u, r.v)).collect();
            let mut out = sink(cfg)?;
            write_svg(&pts, &format!("attractor, {}", cfg.params), &mut out)?;
            out.flush()?;
        }
        Format::Json => write_json(cfg, &rows)?,
        Format::Csv => write_csv(cfg, rows)?,
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use std::time::Duration;

    use super::*;

    fn outcome(pass: bool) -> CriterionOutcome {
        CriterionOutcome {
            id: 1,
            title: "t",
            pass,
            detail: String::new(),
            elapsed: Duration::ZERO,
        }
    }

    #[test]
    fn status_reflects_failures() {
        assert_eq!(acceptance_status(&[outcome(true), outcome(true)]), 0);
        assert_eq!(acceptance_status(&[outcome(true), outcome(false)]), 1);
    }
}
