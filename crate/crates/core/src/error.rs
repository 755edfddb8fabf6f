//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("unexpected character {0:?} at byte {1}")]
    UnexpectedChar(char, usize),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token {0:?}")]
    UnexpectedToken(String),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("unsupported exponent {0}")]
    BadExponent(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed term: {0}")]
    MalformedTerm(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MuCalcError {
    #[error("weight tuple must be non-empty")]
    EmptyWeights,
    #[error("weight tuple has length {got}, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("weights must be strictly positive (got {0})")]
    NonPositiveWeight(f64),
    #[error("divided-difference recursion lost {lost:.1} digits (limit {limit:.1})")]
    IllConditioned { lost: f64, limit: f64 },
    #[error("confluent Vandermonde system is singular")]
    SingularSystem,
    #[error("repeated pole at index {0}")]
    RepeatedPole(usize),
    #[error("node {0} is listed more than once; merge it into a single node with higher multiplicity")]
    DuplicateNode(usize),
    #[error("jet for node {node} has {got} entries, multiplicity requires {expected}")]
    JetLength { node: usize, expected: usize, got: usize },
    #[error("contour abscissa {abscissa} does not separate the poles (min pole {min_pole}) from 0")]
    ContourDoesNotSeparate { abscissa: f64, min_pole: f64 },
    #[error("contour integral does not converge: need Re z < 0 (got {0})")]
    NonConvergent(f64),
    #[error("t must be strictly positive (got {0})")]
    NonPositiveT(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("element is not in the U_q(su2) subalgebra")]
    NotInU,
    #[error("element is not in the coordinate subalgebra")]
    NotCoordinate,
    #[error("twist power {half_steps}/2 on weight {weight2}/2 needs a quarter power of q")]
    QuarterPower { half_steps: i32, weight2: i32 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("q must lie in (0, 1] (got {0})")]
    InvalidQ(f64),
    #[error("cutoff must be a half-integer >= 5/2 (got {0}/2)")]
    InvalidCutoff(i32),
    #[error("buffer must be >= 1 (got {0})")]
    InvalidBuffer(i32),
    #[error("element needs weight window {needed}/2 but the representation only holds {available}/2")]
    WindowTooSmall { needed: i32, available: i32 },
    #[error("non-monotone norm profile: {0}")]
    NonMonotone(String),
    #[error("not enough data points for regression ({0})")]
    TooFewPoints(usize),
    #[error(transparent)]
    MuCalc(#[from] MuCalcError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZetaError {
    #[error("zeta partial sums need Re z > 0 (got {0})")]
    OutsideConvergence(f64),
    #[error("tail bound {bound:e} exceeds tolerance {tol:e} at cutoff {cutoff2}/2")]
    TailTooLarge { bound: f64, tol: f64, cutoff2: i32 },
    #[error("residue extrapolation diverges (fitted pole order {order:.2})")]
    ExtrapolationDivergent { order: f64 },
    #[error("pole-order fit is poor (log-log rms residual {0:.4})")]
    PoorFit(f64),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
