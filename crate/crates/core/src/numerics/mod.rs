//! Dense linear-algebra kernels and the seeded PRNG used everywhere else.

mod matrix;
mod rng;

pub use matrix::{add_row_broadcast, matmul, Matrix};
pub use rng::Rng;
