use serde::Serialize;

use super::coeff::multiset_coeff;
use super::formulas::{gain_ratio, lossy_outcome_prob, outcome_entanglement, outcome_prob, pure_entanglement};
use super::squeeze::SqueezeSpec;
use crate::error::Result;
use crate::fock::{required_j_max, tail_mass, EntropyUnit};
use crate::loss::LossParams;
use crate::table::{fmt_f64, fmt_opt, Table};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticRow {
    pub j: u32,
    /// Exact decimal value of f_j^(m).
    pub f_j: String,
    pub log2_f_j: f64,
    pub p_j: f64,
    pub e_out: f64,
    /// Undefined at zero squeezing.
    pub gamma_j: Option<f64>,
    pub p_prime_j: f64,
}

/// Per-outcome table of every closed-form protocol quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticReport {
    pub m: u32,
    pub squeeze: SqueezeSpec,
    pub loss: LossParams,
    pub unit: EntropyUnit,
    pub e_pair: f64,
    pub tail_mass: f64,
    pub rows: Vec<AnalyticRow>,
}

impl AnalyticReport {
    /// Rows for `j = 0..=j_max`; when `j_max` is `None` the cutoff is the
    /// smallest one whose tail is below `tail_tol`.
    pub fn build(
        m: u32,
        squeeze: SqueezeSpec,
        loss: LossParams,
        j_max: Option<u32>,
        tail_tol: f64,
        unit: EntropyUnit,
    ) -> Result<Self> {
        let j_max = match j_max {
            Some(j) => j,
            None => required_j_max(squeeze.lambda(), m, tail_tol)?,
        };
        let rows = (0..=j_max)
            .map(|j| {
                let f = multiset_coeff(j, m);
                AnalyticRow {
                    j,
                    f_j: f.exact.to_string(),
                    log2_f_j: f.log2,
                    p_j: outcome_prob(j, m, &squeeze),
                    e_out: unit.from_bits(outcome_entanglement(j, m)),
                    gamma_j: gain_ratio(j, m, &squeeze).ok(),
                    p_prime_j: lossy_outcome_prob(j, m, &squeeze, &loss),
                }
            })
            .collect();
        Ok(AnalyticReport {
            m,
            squeeze,
            loss,
            unit,
            e_pair: unit.from_bits(pure_entanglement(&squeeze)),
            tail_mass: tail_mass(squeeze.lambda(), m, j_max),
            rows,
        })
    }

    /// Σ p_j over the table plus the analytic tail.
    pub fn total_probability(&self) -> f64 {
        self.rows.iter().map(|r| r.p_j).sum::<f64>() + self.tail_mass
    }

    /// Columns `j, f_j, p_j, E_out_<unit>, gamma_j, p_prime_j`.
    pub fn table(&self) -> Table {
        let mut t = Table::new([
            "j".to_string(),
            "f_j".to_string(),
            "p_j".to_string(),
            format!("E_out_{}", self.unit.suffix()),
            "gamma_j".to_string(),
            "p_prime_j".to_string(),
        ]);
        for r in &self.rows {
            t.push(vec![
                r.j.to_string(),
                r.f_j.clone(),
                fmt_f64(r.p_j),
                fmt_f64(r.e_out),
                fmt_opt(r.gamma_j),
                fmt_f64(r.p_prime_j),
            ]);
        }
        t
    }
}
