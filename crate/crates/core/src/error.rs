use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("channel {channel} closed: k^2 = {k_sq} <= K_perp^2 = {cutoff_sq}")]
    ChannelClosed {
        channel: u32,
        k_sq: f64,
        cutoff_sq: f64,
    },

    #[error("evanescent or closed channel: k = {0} must be positive")]
    NonPositiveWavenumber(f64),

    #[error("singular matrix: |det| = {det_abs:e} below tolerance {tolerance:e}")]
    SingularMatrix { det_abs: f64, tolerance: f64 },

    #[error("resonant singularity in composition: |det(1 - r'_a r_b)| = {0:e}")]
    ResonantSingularity(f64),

    #[error("composing scatterers built for different wavenumbers")]
    WavenumberMismatch,

    #[error("no post-selected state: Tr(gamma gamma^dagger) = {0:e}")]
    NoPostSelectedState(f64),

    #[error("W matrix not normalized: |Tr(W W^dagger) - 1/2| = {0:e}")]
    NotNormalized(f64),

    #[error("W matrix has non-zero same-side blocks; not a post-selected state")]
    NotPostSelected,

    #[error("oracle not converged: halving the grid changed an amplitude by {0:e}")]
    NotConverged(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
