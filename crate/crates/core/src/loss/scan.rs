use serde::Serialize;

use super::exact::exact_loss_sector;
use super::filter::{two_sided_filter, Ensemble};
use super::params::LossParams;
use super::trajectories::{first_order_trajectories, FIRST_ORDER_GUARD};
use crate::analytic::lossy_outcome_prob;
use crate::error::Result;
use crate::purification::ProtocolParams;
use crate::stats::log_log_slope;
use crate::table::{fmt_f64, fmt_opt, Table};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub tau: f64,
    /// Exact-channel probability of `j_A = j_B = j`.
    pub kept_prob: f64,
    pub fidelity: Option<f64>,
    pub infidelity: Option<f64>,
    pub analytic_p_prime: f64,
    /// First-order ensemble kept probability; `None` past the validity guard.
    pub first_order_kept: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfidelityScan {
    pub j: u32,
    pub rows: Vec<ScanRow>,
    /// Least-squares slope of ln(1−F) against ln τ over rows with positive
    /// infidelity.
    pub slope: Option<f64>,
}

impl InfidelityScan {
    pub fn table(&self) -> Table {
        let mut t = Table::new(
            ["tau", "kept_prob", "fidelity", "infidelity", "analytic_p_prime", "first_order_kept"].map(String::from),
        );
        for r in &self.rows {
            t.push(vec![
                fmt_f64(r.tau),
                fmt_f64(r.kept_prob),
                fmt_opt(r.fidelity),
                fmt_opt(r.infidelity),
                fmt_f64(r.analytic_p_prime),
                fmt_opt(r.first_order_kept),
            ]);
        }
        t
    }
}

/// Filtered-state infidelity against `|j⟩` from the exact channel, one row
/// per exposure time.
pub fn infidelity_scan(params: &ProtocolParams, loss_base: &LossParams, tau_list: &[f64], j: u32) -> Result<InfidelityScan> {
    let ket = params.build_state()?;
    let mut rows = Vec::with_capacity(tau_list.len());
    for &tau in tau_list {
        let loss = loss_base.with_tau(tau)?;
        let block = exact_loss_sector(&ket, &loss, j, j)?;
        let exact = two_sided_filter(Ensemble::Density(&block), j)?;
        let first_order_kept = match first_order_trajectories(&ket, &loss, FIRST_ORDER_GUARD) {
            Ok(traj) => Some(two_sided_filter(Ensemble::Trajectories(&traj), j)?.kept_probability),
            Err(crate::Error::NoiseTooLarge { .. }) => None,
            Err(e) => return Err(e),
        };
        rows.push(ScanRow {
            tau,
            kept_prob: exact.kept_probability,
            fidelity: exact.fidelity,
            infidelity: exact.infidelity(),
            analytic_p_prime: lossy_outcome_prob(j, params.m, &params.squeeze, &loss),
            first_order_kept,
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.infidelity.map(|i| (r.tau, i)))
        .collect();
    Ok(InfidelityScan {
        j,
        slope: log_log_slope(&pts),
        rows,
    })
}
