use thiserror::Error;

/// Errors raised by the laboratory operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("δ must be positive, got {0}")]
    NonPositiveDelta(f64),
    #[error("β = δ(p−1) must be < 1 (and > 0), got {0}")]
    BetaOutOfRange(f64),
    #[error("λ must be at least 1, got {0}")]
    DilationBelowOne(f64),
    #[error("step function must be nonnegative (cell {index} has value {value})")]
    NegativeValue { index: usize, value: f64 },
    #[error("exponent {name} = {value} outside its admissible range {range}")]
    ExponentOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("excluded annulus index {0} (indices 1, 2, 3 are not used)")]
    ExcludedAnnulus(u32),
    #[error("not a member rectangle: {0}")]
    NotMemberRectangle(String),
    #[error("piece not adapted: {0}")]
    PieceNotAdapted(String),
    #[error("invalid piece: {0}")]
    InvalidPiece(String),
    #[error("invalid atom: {0}")]
    InvalidAtom(String),
    #[error("zero-frequency component uncovered: spectrum has mass on a frequency axis")]
    ZeroFrequencyUncovered,
    #[error("input is not analytic: spectrum has mass at negative frequencies")]
    NotAnalytic,
    #[error("{what} lies outside the window")]
    OutsideWindow { what: String },
    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("frequency range overflow: index {index} does not fit below the Nyquist wavenumber {nyquist}")]
    FrequencyOverflow { index: usize, nyquist: usize },
    #[error("symbol has nonzero coefficients on a frequency axis")]
    AxisCoefficients,
    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },
    #[error("ratio undefined for the zero symbol")]
    RatioUndefined,
    #[error("singular value decomposition failed to converge")]
    SvdFailed,
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn check_exponent(
    name: &'static str,
    value: f64,
    ok: bool,
    range: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(LabError::ExponentOutOfRange { name, value, range })
    }
}
