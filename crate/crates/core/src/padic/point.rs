use std::fmt;

use serde::{Deserialize, Serialize};

use super::literal::DigitRecord;
use super::norm::Norm;
use super::scalar::PadicScalar;
use crate::error::{Error, Result};

/// A point `(x, y)` of the plane over Q_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: PadicScalar,
    pub y: PadicScalar,
}

impl Point {
    pub fn new(x: PadicScalar, y: PadicScalar) -> Result<Self> {
        if x.p() != y.p() {
            return Err(Error::PrimeMismatch(x.p(), y.p()));
        }
        Ok(Self { x, y })
    }

    pub fn from_i64(p: u32, x: i64, y: i64, prec: i64) -> Result<Self> {
        Self::new(PadicScalar::from_i64(p, x, prec)?, PadicScalar::from_i64(p, y, prec)?)
    }

    pub fn origin(p: u32, prec: i64) -> Self {
        Self {
            x: PadicScalar::zero(p, prec),
            y: PadicScalar::zero(p, prec),
        }
    }

    pub fn p(&self) -> u32 {
        self.x.p()
    }

    /// Precision of the point: the coarser of its coordinates.
    pub fn prec(&self) -> i64 {
        self.x.prec().min(self.y.prec())
    }

    /// `max(|x|, |y|)`.
    pub fn norm_sup(&self) -> Norm {
        self.x.pnorm().max(self.y.pnorm())
    }

    pub fn in_unit_polydisc(&self) -> bool {
        self.x.is_integral() && self.y.is_integral()
    }

    pub fn sub(&self, other: &Point) -> Result<Point> {
        Point::new(self.x.sub(&other.x)?, self.y.sub(&other.y)?)
    }

    /// `‖self - other‖`.
    pub fn distance(&self, other: &Point) -> Result<Norm> {
        Ok(self.sub(other)?.norm_sup())
    }

    pub fn truncate(&self, prec: i64) -> Result<Point> {
        Point::new(self.x.truncate(prec)?, self.y.truncate(prec)?)
    }

    pub fn lift(&self, prec: i64) -> Point {
        Point {
            x: self.x.lift(prec),
            y: self.y.lift(prec),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Serialized point: both coordinates as digit records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    pub x: DigitRecord,
    pub y: DigitRecord,
}

impl From<&Point> for PointRecord {
    fn from(pt: &Point) -> Self {
        Self {
            x: DigitRecord::from_scalar(&pt.x),
            y: DigitRecord::from_scalar(&pt.y),
        }
    }
}

impl PointRecord {
    pub fn to_point(&self, p: u32) -> Result<Point> {
        Point::new(self.x.to_scalar(p)?, self.y.to_scalar(p)?)
    }
}
