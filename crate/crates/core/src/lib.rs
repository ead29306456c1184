//! Hammersley word processes: random words over `{0, ..., k}` (optionally with
//! a diamond letter) generated by inserting particles with `k` lives, their
//! languages, their exact multiplicities, and the mean number of increments
//! that governs the length of the longest `k`-heapable subsequence.
//!
//! ```
//! use hammersley::{multiplicity, Alphabet, Word};
//!
//! let k = Alphabet::new(2).unwrap();
//! let w: Word = "2120".parse().unwrap();
//! assert_eq!(multiplicity(&w, k).unwrap(), 2u32.into());
//! ```

mod error;
mod exec;
pub mod increments;
mod prob;
pub mod process;
pub mod recognize;
mod sampler;
pub mod series;
mod table;
pub mod words;

pub use error::{Error, Result};
pub use exec::{substream, Execution, DEFAULT_SEED};
pub use increments::{
    digit_frequencies, exact_increment_distribution, exact_increment_distribution_with,
    expected_increments, geometric_fit, geometric_fit_pmf, geometric_pmf, geometric_residuals,
    lambda_estimate, lambda_estimate_exact, sampled_increment_distribution, GeometricFit,
    IncrementDistribution, Mode, ScalingEstimate, EXACT_INCREMENT_LIMIT, PHI, P_STAR,
};
pub use prob::{
    decimal_string, factorial, fraction_string, interval_mass, ratio_to_f64, round6,
    ExactProbability,
};
pub use process::{
    encode_values, had_enumerate, had_enumerate_with, had_replay, had_sample,
    had_sample_with_trajectory, had_step, interval_enumerate, interval_enumerate_with,
    interval_replay, interval_sample, interval_step, Enumeration, IntervalTrajectory, Trajectory,
    HAD_DP_LIMIT, HAD_TRAJECTORY_LIMIT, INTERVAL_DP_LIMIT, INTERVAL_TRAJECTORY_LIMIT,
};
pub use recognize::{
    accept_dominant, accept_effective, accept_interval, interval_violation, pda_run, sk_decompose,
    sk_shape, witness_trajectory, CounterConfig, IntervalViolation, PdaRun, PdaStatus,
    SkDecomposition,
};
pub use sampler::HadSampler;
pub use series::{
    f1_runlength, interval_multiplicity, interval_multiplicity_unmemoized,
    interval_multiplicity_with, interval_probability, interval_table, interval_table_with,
    multiplicity, multiplicity_unmemoized, multiplicity_with, probability, series_table,
    series_table_reverse, series_table_with, MemoStore, Multiplicity,
};
pub use table::{EnumerationTable, ProcessKind, SeriesTable};
pub use words::{
    all_words, delete_diamonds, digit_sum, dominant_words, failing_prefix, increment_count,
    is_critical, is_k_dominant, letter_count, structural_difference, Alphabet, Letter,
    RunLengthWord, Word,
};
