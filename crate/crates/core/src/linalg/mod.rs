//! Exact integer and rational matrix arithmetic.

mod matrix;
pub mod modp;
pub mod rational;
mod snf;

pub use matrix::{dot, int_vec, IntMatrix, Matrix, RatMatrix};
pub use snf::{det, hnf_rows, integer_kernel, saturate_rows, snf, Snf};
