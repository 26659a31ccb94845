//! Least-energy n-mode solutions of the Hénon system
//!
//! ```text
//! Laplacian u + (2p/(p+q)) |x|^alpha u^(p-1) v^q = 0   in D
//! Laplacian v + (2q/(p+q)) |x|^alpha u^p v^(q-1) = 0   in D
//! u, v > 0 in D,  u = v = 0 on the unit circle
//! ```
//!
//! computed by minimising the Rayleigh quotient over `2pi/n`-rotation
//! invariant fields, together with the closed-form bounds and thresholds
//! that predict when the minimisers stop being radial.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod functionals;
pub mod minimizer;
pub mod polar;
pub mod report;
pub mod theory;
pub mod verify;

mod stencil;

pub use error::{Error, Result};
pub use functionals::{dirichlet_energy, potential_integral, quotient_gradient, rayleigh_quotient, ProblemParams, QuotientBreakdown};
pub use minimizer::{
    check_monotone_radial, minimize_in_mode, minimize_multistart, pde_residual, reconstruct_solution, solve_radial,
    SolveOptions, SolveResult,
};
pub use polar::{
    angular_variation, mode_reduce, project_mode, radial_profile, unfold, DiskField, ModeClass, PolarGrid, RadialProfile,
};
pub use report::{parse_solve_record, SolveRecord};
pub use theory::{
    build_tiled_test_function, eta, mode_upper_bound, n_alpha, radial_lower_bound, radial_threshold, BoundsReport,
};
pub use verify::{verify_levels, Check, ModeLevel, Verdict, VerifyReport};
