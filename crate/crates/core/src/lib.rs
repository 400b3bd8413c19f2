//! Deterministic rSUM solving by digit-projection filtering.
//!
//! Given `n` bounded integers, find every choice of `r` of them (distinct
//! positions) summing to zero. Each number is split into signed base-`2^k`
//! digits with `k = 3 ceil(log2 r)`; at every digit position only digit
//! multisets whose sum lies within `r - 1` of a multiple of `2^k` can belong
//! to a zero-sum tuple. Three passes over shifted copies of the input build
//! such candidate sets, which are intersected in ordinal space and verified
//! by summation.
//!
//! ```
//! use rsum_core::{solve, SolverConfig};
//!
//! let report = solve(&[8, -5, -3, 11], &SolverConfig::new(3)).unwrap();
//! assert_eq!(report.solutions, vec![vec![0, 1, 2]]);
//! ```

pub mod baselines;
pub mod bench;
pub mod digits;
pub mod error;
pub mod filter;
pub mod instance;
pub mod solver;
pub mod tables;

pub use baselines::{brute_force_rsum, meet_in_the_middle_rsum, meet_in_the_middle_rsum_with};
pub use digits::{
    ceil_log2, project_digit, shift_right_sign_preserving, window_accepts, BoundedInt, DigitParams,
    SignedDigit,
};
pub use error::{Result, RsumError};
pub use filter::{
    build_digit_table, enumerate_accepted_tuples, run_filter_pass, DigitTable, DigitTupleSet,
    OrdinalIndex, Ordinal, PassConfig, PassOutput,
};
pub use instance::{gen_adversarial, gen_no_solution, gen_planted, gen_uniform, Family, Instance};
pub use solver::{
    run_filter, solve, verify_tuple, Fallback, Filtered, SolverConfig, SolverReport,
    ThresholdPolicy,
};
pub use tables::{
    count_variants, group_gamma, intersect_sets, intersect_tables, materialize,
    select_and_confluence, SelectionKey, TupleTable, TupleTableSet,
};
