use thiserror::Error;

use crate::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid length {0}: lengths must be positive")]
    InvalidLength(Rational),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not connected")]
    Disconnected,

    #[error("point out of range: {0}")]
    PointOutOfRange(String),

    #[error("objects live on different graphs")]
    GraphMismatch,

    #[error("invalid piecewise polynomial: {0}")]
    InvalidFunction(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("Poisson problem has no solution: target mass is {0}, expected 0")]
    NoSolution(Rational),

    #[error("expected a probability measure, got total mass {0}")]
    NotProbability(Rational),

    #[error("degree is zero")]
    ZeroDegree,

    #[error("inconsistent model: {0}")]
    Inconsistent(String),

    #[error("label {0:?} missing from relabeling map")]
    MissingLabel(String),

    #[error("invalid interval configuration: {0}")]
    InvalidIntervals(String),

    #[error("divisor coefficient {0} is not an integer")]
    NonIntegerDivisor(Rational),

    #[error("orbit sample is empty")]
    EmptySample,

    #[error("expected a circle graph (one vertex, one loop)")]
    NotCircle,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid polynomial map: {0}")]
    InvalidPolynomial(String),

    #[error("singular linear system")]
    Singular,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
