use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular jet: constant term is zero")]
    SingularJet,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract error: {0}")]
    Contract(String),

    #[error("range error: {message} (needed tau in [{tau_lo:e}, {tau_hi:e}], table covers [0, {tau_max:e}])")]
    Range {
        message: String,
        tau_lo: f64,
        tau_hi: f64,
        tau_max: f64,
    },

    #[error("accuracy error: achieved {achieved:e}, requested {requested:e}")]
    Accuracy { achieved: f64, requested: f64 },

    #[error("divergent norm: {0}")]
    DivergentNorm(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error("fit error: {0}")]
    Fit(String),
}
