use crate::grid::Cube;

/// Errors raised by grid construction, exponent validation and norm evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unsupported dimension {0}: only 1 and 2 are supported")]
    Dimension(usize),

    #[error("need at least 2 cells per axis, got {0}")]
    TooFewCells(usize),

    #[error("box side must be positive and finite, got {0}")]
    BoxSide(f64),

    #[error("box origin has {got} coordinates, expected {expected}")]
    OriginLength { expected: usize, got: usize },

    #[error("value count {got} does not match grid size {expected}")]
    Length { expected: usize, got: usize },

    #[error("non-finite value {value} at cell {cell}")]
    NonFinite { cell: usize, value: f64 },

    #[error("cube {0:?} does not lie inside the grid")]
    CubeOutsideGrid(Cube),

    #[error("cell {0:?} lies outside the grid")]
    CellOutsideGrid(Vec<usize>),

    #[error("cell {cell} is not inside the local cube {cube:?}")]
    OutsideLocalCube { cell: usize, cube: Cube },

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("exponent {value} at cell {cell} violates 1 < p_- (class P requires the essential infimum to exceed 1)")]
    ExponentTooSmall { cell: usize, value: f64 },

    #[error("exponent {value} at cell {cell} is below 1; the Luxemburg functional is undefined")]
    ExponentBelowOne { cell: usize, value: f64 },

    #[error("beta = {beta} must satisfy 0 < beta < 1")]
    BetaRange { beta: f64 },

    #[error("beta = {beta} violates 0 < beta < n/p_+ = {bound}")]
    BetaTooLarge { beta: f64, bound: f64 },

    #[error("q_-(n - beta)/n = {value} must exceed 1 so that q(n-beta)/n stays in class P")]
    PairCheck { value: f64 },

    #[error("r = {r} must satisfy r > n/(n - beta) = {bound}")]
    SplitRatio { r: f64, bound: f64 },

    #[error("fractional order alpha = {alpha} must satisfy 0 < alpha < {dim}")]
    AlphaRange { alpha: f64, dim: usize },

    #[error("s = {0} must be positive")]
    SPower(f64),

    #[error("q = {0} must be at least 1")]
    OscExponent(f64),

    #[error("Luxemburg bisection did not converge within {iterations} iterations; bracket [{lo}, {hi}]")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("grid with {cells} cells per axis in dimension {dim} exceeds the naive oracle limit")]
    OracleTooLarge { dim: usize, cells: usize },

    #[error("test bank contains the zero function at position {0}")]
    ZeroInBank(usize),

    #[error("test bank is empty")]
    EmptyBank,

    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
