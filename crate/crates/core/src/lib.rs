//! Numerical laboratory for the random Schrödinger operator on the complete
//! graph,
//!
//! ```text
//! H_M = -|φ₀⟩⟨φ₀| + κ_M V,   φ₀ = (1,…,1)/√M,   κ_M = λ/√(2 ln M),
//! ```
//!
//! with i.i.d. standard Gaussian diagonal `V`. The spectrum is obtained from
//! the rank-one secular equation `F_M(E) = 1`, never from the dense matrix
//! (except in the small-M oracle). On top of the solver sit microscopic
//! scaling windows, a direct simulation of the Šeba point process, the
//! Hilbert transform of the Gaussian density, localization statistics, and
//! the experiment runners used by the command-line tool.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dense;
pub mod error;
pub mod experiments;
pub mod hilbert;
pub mod model;
pub mod quadrature;
pub mod rng;
pub mod scaling;
pub mod seba;
pub mod secular;
pub mod stats;
pub mod summation;
pub mod verify;

mod pole_solver;

pub use error::{Error, Result};
pub use model::{compute_kappa, sample_potential, ModelParams, PotentialSample};
pub use secular::{
    eigenfunction, ground_state_energy, secular_value, solve_spectrum_full, solve_spectrum_window,
    EigenfunctionValues, SpectrumResult,
};
