//! Construction and numerical verification of non-Hermitian Schrödinger
//! Hamiltonians with real (or one-known-complex-eigenvalue) spectra.
//!
//! Starting from a real generating function `g(x)` and two real constants
//! `alpha`, `beta`, the crate assembles the complex potential
//! `V = Re V + i Im V` with `Im V = -2 g'` and
//! `Re V = (2 g g'' - g'^2 + alpha) / (4 g^2) - g^2 + beta`, the first-order
//! factor `O = d/dx + f + i g` with `f = -(E_i + g') / (2 g)`, and the kernel
//! state `phi = exp(-∫ (f + i g) dx)` with eigenvalue `beta + i E_i`. The
//! Hamiltonian `H = -d²/dx² + V` is pseudo-Hermitian with respect to
//! `eta = O†O`, which forces every eigenvalue to be real except possibly the
//! one carried by `phi`.
//!
//! Modules:
//! - [`expr`] — the generating-function DSL (parser, evaluator, exact
//!   symbolic derivatives),
//! - [`grid`] — uniform grids, cumulative quadrature and the growing-domain
//!   normalizability probe,
//! - [`model`] — the construction itself plus algebraic identity checks and
//!   the `alpha` trichotomy classification,
//! - [`linop`] — finite-difference discretizations of `H`, `O`, `O†`, `eta`
//!   and operator-relation residuals,
//! - [`eigen`] — a dense complex Hessenberg/QR eigensolver and the
//!   real/complex spectrum partition,
//! - [`cli`] — the `pseudospec` command-line front end.

pub mod cli;
pub mod eigen;
pub mod expr;
pub mod grid;
pub mod linop;
pub mod model;

pub use expr::Expr;
pub use grid::Grid;
pub use model::{Classification, Construction, ModelSpec};
