use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("energy {energy} coincides with a pole at {pole}")]
    Pole { energy: f64, pole: f64 },

    #[error("degenerate potential: equal values at sorted ranks {0} and {1}")]
    Degenerate(usize, usize),

    #[error("root iteration did not converge in gap {gap} (bracket width {width:e})")]
    NonConvergence { gap: usize, width: f64 },

    #[error("size error: M = {size} exceeds the dense oracle limit {limit}")]
    Size { size: usize, limit: usize },

    #[error(
        "window [{lo}, {hi}] not covered by the supplied spectrum range [{have_lo}, {have_hi}]"
    )]
    Coverage {
        lo: f64,
        hi: f64,
        have_lo: f64,
        have_hi: f64,
    },

    #[error("no point carries label {0}")]
    MissingLabel(i64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("insufficient ensemble: need at least {need} members, got {got}")]
    InsufficientEnsemble { need: usize, got: usize },

    #[error("quadrature failed to reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("bracket [{lo}, {hi}] does not contain a sign change of {what}")]
    Bracket { lo: f64, hi: f64, what: String },

    #[error("function is not monotone on the grid (first violation at index {0})")]
    Monotonicity(usize),

    #[error("configuration error: {0}")]
    Config(String),
}
