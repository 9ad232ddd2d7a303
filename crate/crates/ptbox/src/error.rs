use num_complex::Complex64;
use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("x = {x} lies outside [0, {length}]")]
    OutOfDomain { x: f64, length: f64 },

    #[error("sign-change scan isolated {found} of {wanted} roots below k = {k_limit}")]
    BracketFailure { found: usize, wanted: usize, k_limit: f64 },

    #[error("contour passes within {distance:e} of a zero near {near}")]
    ContourOnZero { near: Complex64, distance: f64 },

    #[error("closed form requires ell1 = 0, got {0}")]
    NotMaximallyNonHermitian(f64),

    #[error("mode {n} is self-orthogonal: |overlap|/(L/2) = {ratio:e}")]
    CatastrophePoint { n: usize, ratio: f64 },

    #[error("sampled wave functions live on incompatible grids")]
    GridMismatch,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("block {0} is not symmetric")]
    AsymmetricBlock(&'static str),

    #[error("matrix is not PT-self-adjoint (deviation {deviation:e})")]
    NotSelfAdjoint { deviation: f64 },

    #[error("matrix is not hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("broken PT symmetry: eigenvalue {lambda}")]
    BrokenPt { lambda: Complex64 },

    #[error("interface denominator vanishes ({denominator:e})")]
    PoleAtInterface { denominator: f64 },

    #[error("transfer matrix is not parity symmetric (deviation {deviation:e})")]
    NotParitySymmetric { deviation: f64 },

    #[error("transfer matrix has |d| = {0:e}; S-matrix pole")]
    DegenerateD(f64),

    #[error("S-matrix pole: |t22| = {0:e}")]
    SMatrixPole(f64),

    #[error("Fano asymmetry diverges: |1 - sinh²μ cosh²θ| = {0:e}")]
    DeltaPole(f64),

    #[error("resonance width is unresolvable for these parameters")]
    UnresolvableResonance,

    #[error("fit diverged after {iterations} iterations")]
    FitDiverged { iterations: usize },

    #[error("window contains {count} transmission maxima")]
    MultiplePeaks { count: usize },

    #[error("points coincide: |x - x'| = {0:e}")]
    CoincidentPoints(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
