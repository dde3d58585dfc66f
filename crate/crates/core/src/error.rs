use thiserror::Error;

/// Errors raised by the channel, capacity and bound computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("V(.|{input}) puts mass on output {output} where W is zero")]
    AbsoluteContinuityViolation { input: usize, output: usize },

    #[error("{what} has size {size:e}, above the cap of {cap:e}")]
    SizeLimit { what: &'static str, size: f64, cap: f64 },

    #[error("no composition of length {length} reaches energy {threshold} (b_max = {b_max})")]
    EmptyFeasibleSet { length: usize, threshold: f64, b_max: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("composition is degenerate: {0}")]
    DegenerateComposition(String),

    #[error("composition does not split around the threshold: {0}")]
    DegenerateSplit(String),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: String, iterations: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
