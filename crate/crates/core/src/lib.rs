//! Regularized solvers for linear ill-posed problems with Hilbert-scale
//! penalties.
//!
//! The crate centers on one iteration: starting from a guess `x_0`, repeatedly
//! solve
//!
//! ```text
//! (A^T A + alpha_k B^{2s}) x_k = A^T y_delta + alpha_k B^{2s} x_{k-1}
//! ```
//!
//! where `B` is a densely defined unbounded-operator stand-in (here: the
//! scaled square root of the second-difference matrix) whose powers grade the
//! penalty norm. Each step is an implicit (Tikhonov-type) correction; letting
//! the step run over a whole sequence `alpha_1, ..., alpha_n` accumulates into
//! a spectral filter acting on the data, and the stopping index is chosen a
//! posteriori by comparing the residual against the noise level.
//!
//! What lives where:
//!
//! * [`linalg`] — dense matrices, Cholesky, Jacobi SVD, and the analytic
//!   eigenpairs of `tridiag(-1, 2, -1)`.
//! * [`scale`] — fractional powers `B^r` and the graded norms they induce.
//! * [`problems`] — the second-derivative benchmark problem (Green's-function
//!   kernel discretized by piecewise-constant Galerkin) plus exact solution
//!   pairs and reproducible noise.
//! * [`filters`] — the rational filter generated by an `alpha` sequence, its
//!   sharp bounds, and an SVD-based closed form used as a cross-check oracle.
//! * [`iteration`] — the implicit step itself and the geometric-sequence
//!   driver with a discrepancy-principle stop.
//! * [`rules`] — parameter choice: a-priori smoothness-based rules and two
//!   a-posteriori Newton drivers for the discrepancy equation.
//!
//! # Example
//!
//! Solve the benchmark problem at 1% noise with the geometric-sequence
//! driver:
//!
//! ```
//! use hilreg::iteration::{IterationConfig, Runner};
//! use hilreg::problems::{galerkin_deriv2, exact_pair, add_noise, Variant};
//! use hilreg::scale::build_scale_operator;
//!
//! let m = 80;
//! let a = galerkin_deriv2(m).unwrap();
//! let (x_true, y) = exact_pair(Variant::Bump, m).unwrap();
//! let noisy = add_noise(&y, 0.01, 7).unwrap();
//! let scale = build_scale_operator(m).unwrap();
//! let cfg = IterationConfig::default();
//! let runner = Runner::new(&a, &scale, &cfg).unwrap();
//! let report = runner
//!     .run_geometric(&noisy, Some(&x_true), 1.0, 0.5)
//!     .unwrap();
//! assert!(report.d_n <= cfg.c * noisy.delta);
//! ```

pub mod error;
pub mod filters;
pub mod iteration;
pub mod linalg;
pub mod problems;
pub mod rules;
pub mod scale;

pub use error::{Error, Result};
