use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid hopping profile: {0}")]
    InvalidProfile(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "root iteration did not converge after {sweeps} sweeps; unconverged roots {indices:?} \
         (last residuals {residuals:?})"
    )]
    ConvergenceFailure {
        sweeps: usize,
        indices: Vec<usize>,
        residuals: Vec<f64>,
    },

    #[error("eigenvector recurrence does not close (residual {residual:e}); {lambda} is not an eigenvalue to working precision")]
    DefectiveCandidate { lambda: num_complex::Complex64, residual: f64 },

    #[error("brute-force oracle supports at most 12 sites, got {0}")]
    OracleTooLarge(usize),

    #[error("secular function terms all vanish at this energy")]
    DegenerateNormalization,

    #[error("ansatz design matrix is ill-conditioned (relative condition {0:e})")]
    IllConditionedFit(f64),

    #[error("eigenvector cannot be made real on the left half: {0}")]
    NotRealizable(String),

    #[error("upper bracket gamma = {gamma_max} is not in the broken phase")]
    BracketFailure { gamma_max: f64 },

    #[error("broken-phase predicate is not monotone in gamma: broken at {broken_at}, unbroken at {unbroken_at}")]
    NonMonotone { broken_at: f64, unbroken_at: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
