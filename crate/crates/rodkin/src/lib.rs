//! Kinetic and agent-based simulation of rod-shaped cells with nematic
//! alignment, orientation reversals, and chemotaxis.
//!
//! The library simulates three closely related evolution equations for an
//! orientation-resolved density f(x, θ, t) on the unit periodic box, plus the
//! underlying stochastic rod ensemble:
//!
//! * **Model I** — transport along e(θ), conservative nematic alignment flux,
//!   orientation diffusion, and orientation reversals; also in a fast-reversal
//!   scaling (transport 1/ε, reversals 1/ε²).
//! * **Model II** — the reversal-dominated limit: uni-directional spatial
//!   diffusion (e·∇)² replaces transport and reversals, optionally with an
//!   isotropic regularization ε_reg Δ.
//! * **Model III** — Model II plus a chemotactic drift div(2[e·∇s] e f), with
//!   the chemoattractant s either given or co-evolved.
//! * **Agents** — N rods on the torus with clamped pairwise nematic torques,
//!   uniform orientation noise, Poisson reversals, and constant-speed motion.
//!
//! Module map: [`grid`] (fields and spectral calculus), [`interaction`]
//! (alignment rates and their disk averaging), [`models`] (split-step
//! integrators and the run driver), [`agents`] (the rod ensemble),
//! [`diagnostics`] (mass/symmetry/energy ledgers and space-time moment
//! norms), [`harness`] (config, file formats, and the built-in studies).
//!
//! # Examples directory
//!
//! Each major capability has a runnable example (`cargo run --release
//! --example <name>`):
//!
//! * `relaxation_model1` — full Model I run with mass, symmetry, and energy
//!   reporting.
//! * `linear_decay_rates` — exact orientation-mode decay rates against closed
//!   forms.
//! * `unidirectional_diffusion` — per-orientation spatial decay of Model II.
//! * `chemotaxis_drift` — Model III density drift toward a chemoattractant.
//! * `agents_nematic_order` — order-parameter growth in the rod ensemble.
//! * `agents_vs_kinetic` — ensemble orientation histogram against the kinetic
//!   marginal.
//! * `localization_rates` — disk-averaged vs localized alignment, with
//!   observed orders.
//! * `diffusion_limit_rates` — scaled fast-reversal runs against the limit
//!   equation.
//! * `averaging_norms` — moment-average norms across regularization
//!   strengths.

pub mod agents;
pub mod diagnostics;
pub mod grid;
pub mod harness;
pub mod interaction;
pub mod models;
pub mod rng;
mod spectral;

pub use grid::{GridSpec, KineticField, ScalarField};
pub use harness::{parse_config, serialize_config, RunConfig};
pub use models::{ModelKind, ModelParams, Observer, SimState, Stepper};
