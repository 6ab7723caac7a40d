//! Eigendecomposition and spectrum-level statistics.

mod eigen;
mod stats;

pub use eigen::{
    eig_symmetric, eig_symmetric_oriented, Spectrum, DEGENERACY_TOL, MAX_SWEEPS,
    ORIENTATION_TOL, SYMMETRY_TOL,
};
pub use stats::{
    bin_spectrum, bin_values, eigvec_frequency_correlation, fit_log_log, fit_power_law_tail,
    fit_power_law_tail_offset, frobenius_fraction, frobenius_fractions, pearson,
    ranked_magnitudes, BinnedSpectrum, CorrelationResult, PowerLawFit, SpectrumEnd,
};

/// Default eigensolver residual tolerance relative to `‖M‖_F`.
pub const DEFAULT_EIG_TOL: f64 = 1e-8;

/// Default width of the spectral histogram bins.
pub const DEFAULT_BIN_WIDTH: f64 = 20.0;

/// Default number of ranked eigenvalues in a power-law fit.
pub const DEFAULT_TOP_K: usize = 50;
