//! Closed-form evaluation of the protocol's analytic quantities.

pub mod coeff;
pub mod formulas;
pub mod report;
pub mod squeeze;

pub use coeff::{log2_multiset_coeff, multiset_coeff, multiset_coeff_exact, MultisetCoeff};
pub use formulas::{
    asymmetric_bound, asymptotic_yield, double_jump_bound, expected_yield_per_pair, gain_ratio,
    ghz_dimension, lossy_outcome_prob, outcome_entanglement, outcome_prob, pure_entanglement,
    ValidityFigure, YieldRow, DEFAULT_SMALLNESS,
};
pub use report::{AnalyticReport, AnalyticRow};
pub use squeeze::SqueezeSpec;
