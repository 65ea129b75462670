use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symplectic (|S Omega S^T - Omega|_F = {deviation:.3e})")]
    NotSymplectic { deviation: f64 },

    #[error("channel is not completely positive (min eigenvalue {min_eigenvalue:.3e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("covariance matrix is not symmetric (max asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("covariance violates the uncertainty relation (min eigenvalue {min_eigenvalue:.3e})")]
    Unphysical { min_eigenvalue: f64 },

    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("duplicate mode label `{0}`")]
    DuplicateMode(String),

    #[error("a beam splitter needs two distinct modes, got `{0}` twice")]
    SameMode(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("negative added noise {nbar:.3e}: covariance convention mismatch")]
    NegativeNoise { nbar: f64 },

    #[error("singular covariance sum in fidelity evaluation")]
    SingularCovariance,

    #[error("temporal grids differ: {0}")]
    GridMismatch(String),

    #[error("profile set is rank deficient (Gram determinant {gram_det:.3e})")]
    RankDeficient { gram_det: f64 },

    #[error("profile has zero norm")]
    ZeroProfile,

    #[error("projector set is not orthonormal (max deviation {deviation:.3e})")]
    NonOrthonormalProjectors { deviation: f64 },

    #[error("no bracket found for `{parameter}` on the scanned grid ({} points)", grid.len())]
    BracketFailure {
        parameter: &'static str,
        grid: Vec<(f64, f64)>,
    },

    #[error("unsupported combination: {0}")]
    Unsupported(String),
}
