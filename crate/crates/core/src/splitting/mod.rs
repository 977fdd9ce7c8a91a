//! The right-subtree point measure Ξ and the checks built on it.

mod checks;
mod xi;

pub use checks::{
    binary_and_class_check, consistent_family, is_binary, max_class_size, sojourn_check, ClassReport,
    SOJOURN_RANDOM_POINTS,
};
pub(crate) use tests::splitting_run;
pub use tests::{
    all_pass, poisson_splitting_test, reflection_control_test, timechange_consistency_test, ConsistencyTest,
    SplittingTest, TestReport, ALPHA, MAX_TRIES, MIN_ACCEPTED,
};
pub use xi::{xi_extract, xi_from_contour, XiMeasure};
