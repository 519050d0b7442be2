//! Hyperbolic automorphisms `T(x, y) = (a y + b (x^p - x), x)` of the p-adic
//! plane, their attractors, and the coding of the attractor by the full
//! two-sided shift on p symbols.

pub mod acceptance;
pub mod dimension;
pub mod dynamics;
pub mod error;
pub mod measure;
pub mod padic;
pub mod symbolic;

pub use error::{Error, Result};
