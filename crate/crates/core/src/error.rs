use thiserror::Error;

pub type Result<T> = std::result::Result<T, IlacError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IlacError {
    /// An argument lies outside the domain of a formula.
    #[error("{what} must be {requirement}, got {value}")]
    Domain {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },

    /// A configuration field failed validation.
    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: &'static str, reason: String },

    #[error("non-positive effective log-SNR: ln(alpha / (1 + delta)) = {log_snr} (alpha = {alpha}, delta = {delta})")]
    NonPositiveLogSnr {
        alpha: f64,
        delta: f64,
        log_snr: f64,
    },

    #[error("{what} = {value} outside [{lo}, {hi})")]
    Range {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error(
        "zero or negative airtime: pilot length {pilot} leaves no data symbols out of {symbols}"
    )]
    NoAirtime { pilot: f64, symbols: f64 },

    #[error("singular geometry: cos^2(theta) = {cos_sq} (theta = {theta} rad)")]
    SingularGeometry { theta: f64, cos_sq: f64 },

    #[error("infeasible capacity loss {loss} nats/s, total capacity is {capacity} nats/s")]
    InfeasibleLoss { loss: f64, capacity: f64 },

    #[error("grid of {got} points outside the supported range [{min}, {max}]")]
    Grid { got: usize, min: usize, max: usize },
}

impl IlacError {
    pub(crate) fn domain(what: &'static str, requirement: &'static str, value: f64) -> Self {
        IlacError::Domain {
            what,
            requirement,
            value,
        }
    }
}
