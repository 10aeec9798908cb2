//! The canonical solution operator to `∂̄` on radial weighted Bergman
//! spaces of the disc, the generalized Fock spaces `A²(ℂ, e^{-|z|^m})`,
//! and the weighted Bergman space of the unit ball in `ℂ²`.
//!
//! For a radial weight the monomials are orthogonal, `S*S` is diagonal in
//! the basis `z^n / c_n`, and everything here reduces to arithmetic on the
//! moment sequence `c_n²`:
//!
//! - [`weights`]: weights and log-domain moments, with a quadrature oracle.
//! - [`spectrum`]: eigenvalues of `S*S`, Hilbert-Schmidt partial sums and
//!   the compactness classification.
//! - [`solver`]: `S(f)` for polynomial `f`, kernels, projections and the
//!   checks that `∂̄S(f) = f` and `S(f) ⊥ A²`.
//! - [`ball2d`]: the unit ball of `ℂ²`.
//! - [`weights_nd`]: conjugate transforms of weights on `ℂⁿ` and the
//!   growth hypotheses of the several-variable Hilbert-Schmidt criterion.

pub mod ball2d;
pub mod error;
pub mod gamma;
pub mod quadrature;
pub mod random;
pub mod solver;
pub mod spectrum;
pub mod weights;
pub mod weights_nd;

pub use error::{Error, Result};
pub use weights::{MomentSequence, WeightSpec};
