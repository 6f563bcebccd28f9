//! Pathwise stochastic calculus along partition sequences.

pub mod error;
pub mod follmer;
pub mod partition;
pub mod path;
pub mod qv;
pub mod sum;
pub mod time;
pub mod zigzag_lab;

pub use error::{Error, Result};
pub use follmer::{
    corollary_check, follmer_breakdown, follmer_residual, jump_term, make_fm, make_smooth_cut,
    rc_modification, stieltjes_integral, MonotoneStepFunction, SecondDerivativeProfile,
    TestFunction,
};
pub use partition::{
    check_a1, check_a2, make_dyadic, make_rho, make_sigma, make_tau, make_uniform,
    osc_over_partition, Partition, PartitionFamily,
};
pub use path::{make_named_path, make_random_walk, CadlagPath, Interval, JumpRecord, PathSpec};
pub use qv::{
    estimate_limit, qv_cdf_sum, qv_stopped_sum, riemann_f1_sum, weighted_f2_sum, LimitDiagnostic,
    Tolerance,
};
pub use time::{Side, Time};
pub use zigzag_lab::{bucket_counts, count_formula, empirical_l, l_alpha_oracle, l_alpha_series};
