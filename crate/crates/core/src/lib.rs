//! Self-replicating Borwein-like iterations at arbitrary precision.
//!
//! Three iteration families (quadratic, cubic and quartic), each with a free
//! rational parameter `w`, converge to products of Gamma values such as `1/pi`,
//! `1/Gamma(3/4)^4` or `(sqrt(2)/Gamma(1/4))^(4/3)`. Two further iterations
//! compute the perimeter of an ellipse. Every limit has an independent oracle in
//! [`series`], a certified evaluator of the underlying hypergeometric sums.

pub mod algorithms;
pub mod cli;
pub mod error;
pub mod precision;
pub mod series;
pub mod transforms;
pub mod verify;

pub use algorithms::{
    compute_constant, ellipse_perimeter, measure_orders, postprocess_constant, replication_invariant, run_borwein,
    run_ellipse, AlgorithmKind, ConstantId, IterationState, MeasuredOrder, RunResult,
};
pub use error::{Error, Result};
pub use precision::{make_context, matching_digits, nth_root, pow_rational, PrecisionContext, Real};
pub use series::{couple_product, ellipse_factor, evaluate_series, ramanujan_couple, CoupleValues, SeriesSpec};
pub use transforms::ReplicatedCoefficients;
