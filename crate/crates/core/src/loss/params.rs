use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Photon-loss channel: damping rates for each side and the exposure time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossParams {
    eta_a: f64,
    eta_b: f64,
    tau: f64,
}

impl LossParams {
    pub fn new(eta_a: f64, eta_b: f64, tau: f64) -> Result<Self> {
        for (name, v) in [("eta_a", eta_a), ("eta_b", eta_b), ("tau", tau)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if !((eta_a * tau).is_finite() && (eta_b * tau).is_finite()) {
            return Err(Error::InvalidParameter("eta * tau overflows".to_string()));
        }
        Ok(LossParams { eta_a, eta_b, tau })
    }

    pub fn none() -> Self {
        LossParams {
            eta_a: 0.0,
            eta_b: 0.0,
            tau: 0.0,
        }
    }

    pub fn eta_a(&self) -> f64 {
        self.eta_a
    }

    pub fn eta_b(&self) -> f64 {
        self.eta_b
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        LossParams::new(self.eta_a, self.eta_b, tau)
    }

    /// Dimensionless loss exposure `η τ` of one side.
    pub fn exposure(&self, side: crate::fock::Side) -> f64 {
        match side {
            crate::fock::Side::A => self.eta_a * self.tau,
            crate::fock::Side::B => self.eta_b * self.tau,
        }
    }

    /// Single-photon survival probability `e^{-η τ}` of one side.
    pub fn transmissivity(&self, side: crate::fock::Side) -> f64 {
        (-self.exposure(side)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Side;

    #[test]
    fn validation() {
        assert!(LossParams::new(-1.0, 0.0, 1.0).is_err());
        assert!(LossParams::new(0.0, f64::NAN, 1.0).is_err());
        assert!(LossParams::new(0.1, 0.2, 0.5).is_ok());
    }

    #[test]
    fn exposure_and_transmissivity() {
        let l = LossParams::new(0.1, 0.2, 0.5).unwrap();
        assert!((l.exposure(Side::A) - 0.05).abs() < 1e-16);
        assert!((l.transmissivity(Side::B) - (-0.1f64).exp()).abs() < 1e-16);
    }
}
