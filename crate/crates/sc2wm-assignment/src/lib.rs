//! Exact linear sum assignment and the Augmented Wasserstein Distance (AWD)
//! over typed point sets.
//!
//! The AWD between a ground-truth entity set and a predicted entity set is
//! computed by building an augmented cost matrix with three blocks (spatial
//! match costs, a miss penalty diagonal, a hallucination penalty diagonal, and
//! a zero block), solving it exactly with the Hungarian algorithm, and
//! normalizing the minimum total cost by the combined set size.

mod awd;
mod matrix;
mod solve;

pub use awd::{
    awd, build_augmented_cost, lambda_for_map, AwdResult, TypedPoint, DEFAULT_LAMBDA,
};
pub use matrix::{AssignmentError, CostMatrix};
pub use solve::hungarian_solve;
