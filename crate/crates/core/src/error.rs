use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a formula.
    #[error("{what}: argument {value} outside domain ({domain})")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// A special function was evaluated at one of its poles.
    #[error("{what}: pole at {value}")]
    Pole { what: &'static str, value: f64 },

    #[error("no bistable regime for theta={theta}, beta={beta}: {reason}")]
    Regime {
        theta: f64,
        beta: f64,
        reason: &'static str,
    },

    #[error("invalid parameter {name}={value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// One of c/h, d/h, (c+d)/(2h) is not an integer.
    #[error("grid divisibility: {quotient} = {value} is not an integer")]
    Divisibility { quotient: &'static str, value: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("singular matrix: zero pivot in column {pivot}")]
    Singular { pivot: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("initial point {x0} outside domain ({c}, {d})")]
    StartOutside { x0: f64, c: f64, d: f64 },
}
