//! Transport maps between free Gibbs states at matrix scale.
//!
//! The crate stacks five layers:
//!   * [`ncalg`] — exact symbolic calculus on non-commutative polynomials
//!     and trace polynomials (difference quotients, cyclic gradients,
//!     Laplacians, diffusion generators);
//!   * [`matrep`] — finite-N Hermitian representations: evaluation on
//!     matrix tuples, Hessian superoperators, convexity certificates,
//!     Schwinger–Dyson residuals, the HMT1 ensemble format;
//!   * [`sampler`] — Langevin / MALA sampling of exp(−N Tr V) ensembles;
//!   * [`freesde`] — Euler–Maruyama for the matrix free SDE, semigroup
//!     estimates, Itô-residual and contraction diagnostics;
//!   * [`transport`] and [`onevar`] — the interpolation transport flow and
//!     the one-variable (equilibrium-measure / grid PDE) reference stack.

pub mod scalar;
pub mod ncalg;
pub mod matrep;
pub mod rng;
pub mod sampler;
pub mod freesde;
pub mod transport;
pub mod onevar;
