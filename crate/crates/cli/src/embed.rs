use std::io::{self, Write};

use padic_attractor::padic::{PadicScalar, Point};
use padic_attractor::{Error, Result};

fn embed_coordinate(t: &PadicScalar, digits: u32) -> f64 {
    let p = t.p() as f64;
    let mut u = 0.0;
    let mut w = 1.0 / p;
    for i in 0..digits as i64 {
        u += t.digit(i).unwrap_or(0) as f64 * w;
        w /= p;
    }
    u
}

/// `u = Σ_{i<d} digit_i(x) p^(-i-1)`, likewise `v` from `y`: reflects the
/// digit tree of `R^2` into `[0, 1)^2`, one cell of side `p^-d` per ball of
/// depth `d`.
pub fn embed_real(pt: &Point, digits: u32) -> Result<(f64, f64)> {
    if !pt.in_unit_polydisc() {
        return Err(Error::NotInUnitPolydisc);
    }
    let available = pt.x.prec().min(pt.y.prec());
    if available < digits as i64 {
        return Err(Error::InsufficientPrecision {
            needed: digits as i64,
            available,
        });
    }
    Ok((embed_coordinate(&pt.x, digits), embed_coordinate(&pt.y, digits)))
}

const SIZE: f64 = 512.0;
const MARGIN: f64 = 16.0;

/// A static scatter of points in the unit square.
pub fn write_svg<W: Write>(points: &[(f64, f64)], title: &str, mut out: W) -> io::Result<()> {
    let full = SIZE + 2.0 * MARGIN;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{full}" height="{full}" viewBox="0 0 {full} {full}">"#
    )?;
    writeln!(out, "<title>{}</title>", escape(title))?;
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="none" stroke="gray"/>"#
    )?;
    writeln!(out, r#"<g fill="black">"#)?;
    for &(u, v) in points {
        let cx = MARGIN + u * SIZE;
        let cy = MARGIN + (1.0 - v) * SIZE;
        writeln!(out, r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="1.5"/>"#)?;
    }
    writeln!(out, "</g>")?;
    writeln!(out, "</svg>")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
