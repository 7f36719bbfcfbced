//! Conway–Maxwell–Poisson normalizing constant Z(lambda, nu) = sum_j
//! lambda^j / (j!)^nu: exact log-domain evaluation with certified
//! truncation, the closed-form asymptotic expansion to eight coefficients,
//! summary statistics from both routes, and error-table generation.

pub mod asym;
pub mod error;
pub mod exact;
pub mod kernel;
pub mod moments;
pub mod params;
pub mod table;

pub use asym::{coeff, percent_error, verify_inverse_factorial, z_asymptotic, AsymEval};
pub use error::{Error, Result};
pub use exact::{
    cumulants_exact, log_pmf, raw_moment_exact, z_exact, z_exact_capped, TruncationReport,
    DEFAULT_TERM_CAP,
};
pub use kernel::{compensated_sum, ln_gamma, KahanSum, LogValue};
pub use moments::{
    bell_partial, cumulant_asym, cumulants_asym, kurtosis_asym, kurtosis_exact, mean_asym,
    poisson_expectation, raw_moment_asym, raw_moments_from_cumulants, skewness_asym,
    skewness_exact, variance_asym, verify_poisson_expectation_limit, CumulantSet, MomentSet,
    Provenance,
};
pub use params::CmpParams;
pub use table::{format_display, ErrorTable};
