//! Front end for `padic-attractor`: config handling and one function per
//! subcommand.

pub mod commands;
pub mod config;
pub mod embed;

use clap::{Parser, Subcommand};

use config::{
    ConjugacyOpts, DecodeOpts, DimensionOpts, EmbedOpts, EncodeOpts, EquidistributionOpts, GlobalArgs, OrbitOpts,
};

pub use commands::run;
pub use embed::embed_real;

#[derive(Debug, Parser)]
#[command(
    name = "padic-attractor",
    version,
    about = "Experiments with hyperbolic attractors of T(x, y) = (a y + b (x^p - x), x) over Q_p"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump a forward or backward orbit.
    Orbit(OrbitOpts),
    /// Itinerary window of a point.
    Encode(EncodeOpts),
    /// Point and guaranteed radius of a window.
    Decode(DecodeOpts),
    /// Conjugacy residuals and round trips over random windows.
    CheckConjugacy(ConjugacyOpts),
    /// Symbol and cylinder frequencies along orbits.
    Equidistribution(EquidistributionOpts),
    /// Ball counts and the box-counting slope.
    Dimension(DimensionOpts),
    /// Real-plane scatter of decoded attractor points.
    Embed(EmbedOpts),
}
