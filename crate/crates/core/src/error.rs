use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter {name} = {value} violates {bound}")]
    ParamDomain {
        name: &'static str,
        value: f64,
        bound: &'static str,
    },

    #[error("star size N = {0} violates N >= 3")]
    StarSize(usize),

    #[error("cannot draw {k} distinct vertices out of {available}")]
    InfeasibleDraw { k: usize, available: usize },

    #[error("malformed interaction: {0}")]
    Structure(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("division domain: {0}")]
    DivisionDomain(&'static str),

    #[error("theorem hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("gamma function pole at {0}")]
    GammaPole(f64),

    #[error("index out of domain: {0}")]
    IndexDomain(String),

    #[error("no vertex can have (d, w1, w2) = ({d}, {w1}, {w2})")]
    InadmissibleState { d: u64, w1: u64, w2: u64 },

    #[error("in-degree {d1} is not a multiple of N - 1 = {step}")]
    IndivisibleInDegree { d1: u64, step: u64 },

    #[error("enumeration needs {count} outcomes, limit is {limit}")]
    EnumerationLimit { count: f64, limit: u64 },

    #[error("cell outside computed caps: {0}")]
    OutsideCaps(String),

    #[error("need at least 5 points in the fit range, got {0}")]
    FitDomain(usize),

    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
