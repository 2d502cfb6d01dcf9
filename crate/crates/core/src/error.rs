use thiserror::Error;

/// Errors raised while building or operating on quantum objects.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IwitError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}: need at least 1")]
    InvalidDimension(usize),

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver did not converge")]
    ConvergenceFailure,

    #[error("operator for label {label:?} is not positive (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { label: String, min_eigenvalue: f64 },

    #[error("effects do not sum to the identity (residual {residual:e})")]
    NotNormalized { residual: f64 },

    #[error("total trace is not one (residual {residual:e})")]
    TraceNotOne { residual: f64 },

    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),

    #[error("empty family: at least one operator is required")]
    EmptyFamily,

    #[error("labels and operators differ in length ({labels} vs {operators})")]
    LengthMismatch { labels: usize, operators: usize },

    #[error("label mismatch: {0}")]
    LabelMismatch(String),

    #[error("gamma {gamma} outside admissible range [{min}, 1]")]
    GammaOutOfRange { gamma: f64, min: f64 },

    #[error("mu {mu} outside admissible range [{min}, 1]")]
    MuOutOfRange { mu: f64, min: f64 },

    #[error("mu = (0, 0) is the trivial ensemble")]
    TrivialMu,

    #[error("POVM outcomes are not a full Cartesian product of two label sets")]
    NotProductLabeled,

    #[error("block {block} has zero probability")]
    EmptyBlock { block: &'static str },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("bases are not mutually unbiased (max deviation {max_deviation:e})")]
    NotMub { max_deviation: f64 },

    #[error("basis is not orthonormal (max deviation {max_deviation:e})")]
    NotOrthonormal { max_deviation: f64 },

    #[error("iteration limit reached (best value {best_value}, residual {residual:e})")]
    MaxIterExceeded { best_value: f64, residual: f64 },

    #[error("mixing parameter {0} outside [0, 1]")]
    LambdaOutOfRange(f64),

    #[error("ensemble yields no witness: P_prior = {p_prior}, P_post = {p_post}")]
    NoGap { p_prior: f64, p_post: f64 },

    #[error("no pre/post gap for mu = ({mu_phi}, {mu_psi}) in dimension {dim}")]
    NoGapForMu { dim: usize, mu_phi: f64, mu_psi: f64 },

    #[error("delta {delta} outside [{lower}, {upper})")]
    DeltaOutOfRange { delta: f64, lower: f64, upper: f64 },

    #[error("witness is constant on all measurement pairs")]
    ConstantWitness,

    #[error("degenerate input: (q, p) = (0, 0)")]
    DegenerateInput,

    #[error("theta {theta} outside [-{theta0}, {theta0}]")]
    ThetaOutOfRange { theta: f64, theta0: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, IwitError>;
