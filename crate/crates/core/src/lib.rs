//! Mean exit times and escape probabilities for one-dimensional dynamics
//! driven by Brownian plus symmetric alpha-stable Levy noise.
//!
//! The reference model is a bistable tumor-growth equation with immune
//! response ([`model`]). Exit problems on an interval are solved as nonlocal
//! boundary-value problems on a uniform grid ([`solver`]) and can be checked
//! against direct path simulation ([`mc`]).

pub mod error;
pub mod levy;
pub mod mc;
pub mod model;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use levy::{
    characteristic_exponent, jump_density, sample_standard_stable, stable_constant, NoiseParams,
};
pub use mc::{
    empirical_cf_check, mc_escape_probability, mc_mean_exit_time, simulate_exit, ExitSide,
    McEstimate, PathOutcome, SimConfig,
};
pub use model::{
    drift, is_bistable, nondimensionalize, potential, steady_states, Drift, FnDrift, ModelParams,
    ScalingParams, SteadyStates, ZeroDrift,
};
pub use solver::{
    build_grid, escape_probability, mean_exit_time, observed_order, solve_dense, DenseSystem,
    EscapeTarget, ExitProblem, FieldKind, Grid, OrderEstimate, Scheme, SolutionField,
};
pub use special::{gamma_fn, riemann_zeta};
