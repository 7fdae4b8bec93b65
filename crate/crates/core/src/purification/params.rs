use serde::{Deserialize, Serialize};

use crate::analytic::SqueezeSpec;
use crate::error::Result;
use crate::fock::{make_tmss_pairs, required_j_max, SparseKet};

/// One purification instance: m pairs with common squeezing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub m: u32,
    pub squeeze: SqueezeSpec,
    /// Total-number cutoff; chosen from `tail_tol` when absent.
    pub j_max: Option<u32>,
    pub tail_tol: f64,
}

impl ProtocolParams {
    pub fn new(m: u32, squeeze: SqueezeSpec) -> Self {
        ProtocolParams {
            m,
            squeeze,
            j_max: None,
            tail_tol: 1e-12,
        }
    }

    pub fn with_j_max(self, j_max: u32) -> Self {
        ProtocolParams {
            j_max: Some(j_max),
            ..self
        }
    }

    pub fn with_tail_tol(self, tail_tol: f64) -> Self {
        ProtocolParams { tail_tol, ..self }
    }

    pub fn cutoff(&self) -> Result<u32> {
        match self.j_max {
            Some(j) => Ok(j),
            None => required_j_max(self.squeeze.lambda(), self.m, self.tail_tol),
        }
    }

    pub fn build_state(&self) -> Result<SparseKet> {
        make_tmss_pairs(self.squeeze.lambda(), self.m, self.cutoff()?, self.tail_tol)
    }
}
