//! Cascaded ring-cavity cross-Kerr readout of a total photon number: the
//! adiabatic signal model, homodyne statistics, the feasibility window and a
//! stochastic integration of the cavity Langevin equations.

pub mod homodyne;
pub mod params;
pub mod sde;
pub mod signal;

pub use homodyne::{infer_number, misidentification_rate, sample_homodyne, HomodyneRecord};
pub use params::{CavityParams, ADIABATIC_LIMIT};
pub use sde::{sde_ensemble, sde_integrate, SdeOptions, SdeRun, SdeState, DEFAULT_DISCARD_GAMMA, MAX_STEP_GAMMA, MIN_WINDOW_GAMMA};
pub use signal::{
    composite_phase, distinguishability, exact_signal, feasibility_window, linear_phase, noise_sigma,
    reflection, signal_slope, steady_state_mode, FeasibilityReport,
};
