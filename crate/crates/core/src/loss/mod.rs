//! Transmission loss: first-order trajectories, the exact amplitude-damping
//! oracle, the two-sided `j_A = j_B` filter and the scans built on them.

pub mod exact;
pub mod filter;
pub mod params;
pub mod posterior;
pub mod scan;
pub mod trajectories;

pub use exact::{apply_kraus, exact_loss_channel, exact_loss_sector};
pub use filter::{two_sided_filter, Ensemble, FilterResult};
pub use params::LossParams;
pub use posterior::{posterior_confirmation_run, AcceptanceRow, ConfirmationEvent, PosteriorSummary};
pub use scan::{infidelity_scan, InfidelityScan, ScanRow};
pub use trajectories::{first_order_trajectories, Jump, TrajectoryTerm, FIRST_ORDER_GUARD};
