use thiserror::Error;

/// Errors raised by the library. Every variant is recoverable: nothing
/// in this crate panics on bad numeric input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series has a zero constant term; it has no reciprocal")]
    ZeroConstantTerm,
    #[error("exponential needs a zero constant term, got {0}")]
    NonzeroConstantTerm(String),
    #[error("formal logarithm needs constant term 1, got {0}")]
    ConstantTermNotOne(String),
    #[error("{name} = {value} is outside {range}")]
    Range {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("q-series did not converge within {iterations} terms")]
    NonConvergence { iterations: usize },
    #[error("degenerate parametrization: {0}")]
    DegenerateParametrization(&'static str),
    #[error("series order {have} is too small, need at least {need}")]
    OrderTooSmall { have: usize, need: usize },
    #[error("evaluation singularity at z = {re}{im:+}i")]
    EvaluationSingularity { re: f64, im: f64 },
    #[error("operation only defined for alpha = 0, got alpha = {0}")]
    AlphaUnsupported(f64),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    ok: bool,
    range: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Range { name, value, range })
    }
}
