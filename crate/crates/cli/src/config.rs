use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use padic_attractor::dimension::default_window_cap;
use padic_attractor::padic::FieldParams;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::ConfigInvalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// A p-adic literal in a config file: an integer or a string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum LiteralValue {
    Int(i64),
    Text(String),
}

impl LiteralValue {
    fn into_text(self) -> String {
        match self {
            LiteralValue::Int(i) => i.to_string(),
            LiteralValue::Text(s) => s,
        }
    }
}

fn text(v: Option<LiteralValue>) -> Option<String> {
    v.map(LiteralValue::into_text)
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Residue characteristic.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Linear coefficient, as an integer, `num/p^k` fraction or digit string.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Coefficient of `x^p - x`; must have norm p.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Working precision in p-adic digits.
    #[arg(long, global = true)]
    pub precision: Option<i64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Most windows a census may enumerate.
    #[arg(long, global = true)]
    pub window_cap: Option<u64>,
    /// Run the acceptance suite instead of a subcommand.
    #[arg(long, global = true)]
    pub acceptance: bool,
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct OrbitOpts {
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Iterate the inverse map.
    #[arg(long)]
    pub backward: bool,
}

impl OrbitOpts {
    pub fn or(self, file: Self) -> Self {
        Self {
            x: self.x.or(file.x),
            y: self.y.or(file.y),
            steps: self.steps.or(file.steps),
            backward: self.backward || file.backward,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct EncodeOpts {
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Backward symbols to record.
    #[arg(long)]
    pub back: Option<usize>,
    /// Last forward index recorded (n + 1 forward symbols).
    #[arg(long)]
    pub fwd: Option<usize>,
}

impl EncodeOpts {
    pub fn or(self, file: Self) -> Self {
        Self {
            x: self.x.or(file.x),
            y: self.y.or(file.y),
            back: self.back.or(file.back),
            fwd: self.fwd.or(file.fwd),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct DecodeOpts {
    /// Window such as "21.0102": backward symbols reversed, a dot, forward symbols.
    #[arg(long)]
    pub window: Option<String>,
}

impl DecodeOpts {
    pub fn or(self, file: Self) -> Self {
        Self {
            window: self.window.or(file.window),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConjugacyOpts {
    #[arg(long)]
    pub windows: Option<usize>,
    /// Symbols on each side of the window.
    #[arg(long)]
    pub depth: Option<usize>,
}

impl ConjugacyOpts {
    pub fn or(self, file: Self) -> Self {
        Self {
            windows: self.windows.or(file.windows),
            depth: self.depth.or(file.depth),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct EquidistributionOpts {
    /// Orbit length.
    #[arg(long)]
    pub length: Option<usize>,
    /// Number of Haar-random starts, seeded `seed, seed + 1, ...`.
    #[arg(long)]
    pub starts: Option<usize>,
    /// Band half-width in binomial standard deviations.
    #[arg(long)]
    pub sigmas: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub word_lengths: Option<Vec<usize>>,
    /// Also follow the basin point (0, 1/a).
    #[arg(long)]
    pub basin_start: bool,
}

impl EquidistributionOpts {
    pub fn or(self, file: Self) -> Self {
        Self {
            length: self.length.or(file.length),
            starts: self.starts.or(file.starts),
            sigmas: self.sigmas.or(file.sigmas),
            word_lengths: self.word_lengths.or(file.word_lengths),
            basin_start: self.basin_start || file.basin_start,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct DimensionOpts {
    /// Ball depths j (radius p^-j): "1..4" or "1,2,5".
    #[arg(long)]
    pub depths: Option<String>,
}

impl DimensionOpts {
    pub fn or(self, file: Self) -> Self {
        Self {
            depths: self.depths.or(file.depths),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct EmbedOpts {
    #[arg(long)]
    pub windows: Option<usize>,
    #[arg(long)]
    pub back: Option<usize>,
    #[arg(long)]
    pub fwd: Option<usize>,
    /// Digits per coordinate in the real embedding.
    #[arg(long)]
    pub digits: Option<u32>,
}

impl EmbedOpts {
    pub fn or(self, file: Self) -> Self {
        Self {
            windows: self.windows.or(file.windows),
            back: self.back.or(file.back),
            fwd: self.fwd.or(file.fwd),
            digits: self.digits.or(file.digits),
        }
    }
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub p: Option<u32>,
    pub a: Option<LiteralValue>,
    pub b: Option<LiteralValue>,
    pub precision: Option<i64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub window_cap: Option<u64>,
    pub acceptance: Option<bool>,
    pub orbit: OrbitOpts,
    pub encode: EncodeOpts,
    pub decode: DecodeOpts,
    pub check_conjugacy: ConjugacyOpts,
    pub equidistribution: EquidistributionOpts,
    pub dimension: DimensionOpts,
    pub embed: EmbedOpts,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let body = fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&body).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    pub fn parse(body: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(body)
    }
}

pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_PRECISION: i64 = 64;

/// Validated run settings after merging flags over the config file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: FieldParams,
    pub precision: i64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub window_cap: u128,
    pub acceptance: bool,
}

impl RunConfig {
    pub fn resolve(flags: &GlobalArgs, file: &FileConfig) -> Result<Self, ConfigError> {
        let p = flags.p.or(file.p).unwrap_or(3);
        let a = flags
            .a
            .clone()
            .or(text(file.a.clone()))
            .unwrap_or_else(|| p.to_string());
        let b = flags
            .b
            .clone()
            .or(text(file.b.clone()))
            .unwrap_or_else(|| format!("1/{p}"));
        let precision = flags.precision.or(file.precision).unwrap_or(DEFAULT_PRECISION);
        if precision < 1 {
            return Err(invalid(format!("precision must be positive, got {precision}")));
        }
        let params = FieldParams::from_literals(p, &a, &b, precision).map_err(|e| invalid(e.to_string()))?;
        let window_cap = flags
            .window_cap
            .or(file.window_cap)
            .map(u128::from)
            .unwrap_or_else(|| default_window_cap(p));
        Ok(Self {
            params,
            precision,
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: flags.out.clone().or(file.out.clone()),
            format: flags.format.or(file.format),
            window_cap,
            acceptance: flags.acceptance || file.acceptance.unwrap_or(false),
        })
    }
}

/// `"1..4"` (inclusive) or `"1,2,5"`.
pub fn parse_depths(text: &str) -> Result<Vec<u32>, ConfigError> {
    let bad = || invalid(format!("depths must look like \"1..4\" or \"1,2,3\", got {text:?}"));
    let num = |s: &str| s.trim().parse::<u32>().map_err(|_| bad());
    let depths: Vec<u32> = if let Some((lo, hi)) = text.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        (num(lo)?..=num(hi)?).collect()
    } else {
        text.split(',').map(num).collect::<Result<_, _>>()?
    };
    if depths.is_empty() {
        return Err(bad());
    }
    Ok(depths)
}
