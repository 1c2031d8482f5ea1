use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("{a} is not invertible modulo {c}")]
    NotInvertible { a: i64, c: u64 },
    #[error("moduli {c1} and {c2} are not coprime")]
    NotCoprime { c1: u64, c2: u64 },
    #[error("modulus {0} must be odd")]
    EvenModulus(u64),
    #[error("Kloosterman sum S({m},{n};{c}) left imaginary residual {residual:e}")]
    ImaginaryResidual { m: i64, n: i64, c: u64, residual: f64 },
    #[error("quadratic with doubled coefficients ({a2}, {b2}) is not integer valued")]
    NotIntegerValued { a2: i64, b2: i64 },
    #[error("closed form requires gcd(4*gamma, c) = 1 (gamma = {gamma}, c = {c})")]
    GaussPrecondition { gamma: i64, c: u64 },
    #[error("derivative order {requested} exceeds declared maximum {max}")]
    DerivativeOrder { requested: usize, max: usize },
    #[error("window support ({lo}, {hi}) must lie strictly inside (0, inf)")]
    SupportNotPositive { lo: f64, hi: f64 },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("stationary points coalesce: |y/x| = {ratio} exceeds {limit}")]
    RootCoalescence { ratio: f64, limit: f64 },
    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),
    #[error("weight {0} is not supported (level-one cusp space must be one dimensional)")]
    UnsupportedWeight(u32),
    #[error("coefficient a({needed}) required but only n <= {available} is available")]
    InsufficientTruncation { needed: u64, available: u64 },
    #[error("tail bound {bound:e} exceeds tolerance {tolerance:e}")]
    UncertifiableTail { bound: f64, tolerance: f64 },
    #[error("eigenvalue data rejected at n = {n}: {reason}")]
    DataRejected { n: u64, reason: String },
    #[error("malformed eigenvalue file at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("series lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("configuration constraint violated: {0}")]
    Config(String),
    #[error("no eigenform data for weights {0:?}")]
    MissingWeights(Vec<u32>),
    #[error("harmonic weight not calibrated")]
    Uncalibrated,
}

pub type Result<T> = std::result::Result<T, Error>;
