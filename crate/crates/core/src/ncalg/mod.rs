//! Exact symbolic calculus on non-commutative polynomials and trace
//! polynomials: products, adjoints, free difference quotients, cyclic
//! gradients, Laplacians, diffusion generators, and compositions.
//!
//! Everything here is scalar-coefficient (the formal expectation is the
//! trace), exact-rational, and immutable; operations are pure functions.

pub mod calculus;
pub mod poly;
pub mod potential;
pub mod random;
mod serde_impls;
pub mod tensor;
pub mod trace;
pub mod word;

/// Degree budget on base words; operations that would compose past this
/// panic instead of blowing up silently.
pub const MAX_DEGREE: usize = 16;

pub use calculus::{fdq_iter, hessian, sd_residual_expr};
pub use poly::{monomial, NcPoly};
pub use potential::PotentialSpec;
pub use tensor::{TensorKey, TensorPoly};
pub use trace::{TraceKey, TracePoly};
pub use word::Word;
