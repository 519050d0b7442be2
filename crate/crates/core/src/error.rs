use thiserror::Error;

/// Everything that can go wrong across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different fields (p = {0} and p = {1})")]
    PrimeMismatch(u32, u32),

    /// The precision budget ran out. `index` is the orbit time or iteration at
    /// which it happened, when there is one.
    #[error("precision exhausted{}", fmt_index(.index))]
    PrecisionExhausted { index: Option<i64> },

    #[error("division by a value that is zero to its precision")]
    DivisionByZero,

    #[error("insufficient precision: need {needed} digits, have {available}")]
    InsufficientPrecision { needed: i64, available: i64 },

    #[error("value is not in Z_p")]
    NotIntegral,

    #[error("malformed literal: {0}")]
    MalformedLiteral(String),

    #[error("denominator of {0} is not a power of p")]
    DenominatorNotPPower(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The backward orbit left the unit polydisc at this backward step, so the
    /// starting point is not in T^step(R^2).
    #[error("backward orbit leaves the unit polydisc at step {step}")]
    ExitsUnitPolydisc { step: usize },

    #[error("integrality undecidable at step {step} with the available precision")]
    Indeterminate { step: usize },

    #[error("point is not in the unit polydisc")]
    NotInUnitPolydisc,

    #[error("no solution of the residue equation in the requested disc")]
    NoSolutionInDisc,

    #[error("curve evaluation exceeded its budget of {limit} fixed-point evaluations")]
    RecursionBudgetExceeded { limit: usize },

    /// A decoded point failed to reproduce its own window.
    #[error("decoded point does not reproduce window {window}")]
    CodingMismatch { window: String },

    #[error("window has an empty forward part")]
    EmptyForwardPart,

    #[error("symbol {symbol} is out of range for p = {p}")]
    InvalidSymbol { symbol: u32, p: u32 },

    #[error("malformed itinerary window: {0}")]
    MalformedWindow(String),

    #[error("window depths (m = {m}, n = {n}) do not resolve balls of depth {depth}")]
    DepthInsufficient { depth: u32, m: usize, n: usize },

    #[error("enumeration of {windows} windows exceeds the cap of {cap}")]
    WindowCapExceeded { windows: u128, cap: u128 },

    #[error("degenerate count series: {0}")]
    DegenerateSeries(String),
}

fn fmt_index(index: &Option<i64>) -> String {
    match index {
        Some(i) => format!(" at index {i}"),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
