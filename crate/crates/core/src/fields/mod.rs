//! Vector fields on uniform box grids: node values, cell-centred derivatives,
//! the kernels of `𝓔` and `𝓔ᴰ`, and the Korn, Poincaré and negative-norm
//! ratios measured on them.

pub mod calculus;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod korn;
pub mod negative;
pub mod radial;
pub mod suites;

pub use calculus::{dev_sym_gradient, divergence, gradient, sym_gradient};
pub use grid::{Grid, GridField, TensorField};
pub use kernel::{Generator, KernelBasis, KernelKind};
pub use korn::{korn_ratio, korn_suite, poincare_ratio, poincare_suite, Mode, Operator, SuiteSummary};
pub use negative::{negative_norm_lower_bound, trivial_upper_bound, NegativeNormBound};
pub use radial::{radial_spike, radial_test_field, RadialField};

/// Least-squares projection onto `Σ`.
pub fn project_sigma(u: &GridField) -> crate::Result<GridField> {
    KernelBasis::sigma(&u.grid)?.project(u)
}
