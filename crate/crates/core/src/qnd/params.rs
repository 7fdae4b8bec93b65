use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `χ n / γ` for which the adiabatic signal model is used.
pub const ADIABATIC_LIMIT: f64 = 0.05;

/// Readout instance. Rates are angular (rad/s); the drive is `g = i|g|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    pub chi: f64,
    pub gamma: f64,
    pub kappa: f64,
    /// Drive magnitude `|g|`.
    pub g: f64,
    pub t_meas: f64,
    /// Local-oscillator phase θ; the detected quadrature is `√2 Re(e^{−iθ} b)`.
    pub lo_phase: f64,
}

impl CavityParams {
    pub fn new(chi: f64, gamma: f64, kappa: f64, g: f64, t_meas: f64) -> Result<Self> {
        let c = CavityParams {
            chi,
            gamma,
            kappa,
            g,
            t_meas,
            lo_phase: 0.0,
        };
        c.validate()?;
        Ok(c)
    }

    /// Frequencies given as ν = ω/2π in Hz.
    pub fn from_hz(chi_hz: f64, gamma_hz: f64, kappa_hz: f64, g: f64, t_meas: f64) -> Result<Self> {
        CavityParams::new(TAU * chi_hz, TAU * gamma_hz, TAU * kappa_hz, g, t_meas)
    }

    /// χ/2π = 0.1 MHz, γ/2π = 100 MHz, κ/2π = 4 MHz, g = 100, T = 8 ns.
    pub fn reference() -> Self {
        CavityParams::from_hz(1e5, 1e8, 4e6, 100.0, 8e-9).expect("valid reference parameters")
    }

    pub fn with_lo_phase(self, lo_phase: f64) -> Self {
        CavityParams { lo_phase, ..self }
    }

    pub fn with_t_meas(self, t_meas: f64) -> Result<Self> {
        let c = CavityParams { t_meas, ..self };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("chi", self.chi), ("kappa", self.kappa), ("g", self.g)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        for (name, v) in [("gamma", self.gamma), ("t_meas", self.t_meas)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !self.lo_phase.is_finite() {
            return Err(Error::InvalidParameter("lo_phase must be finite".into()));
        }
        Ok(())
    }

    /// `χ n / γ`.
    pub fn adiabatic_ratio(&self, n: u32) -> f64 {
        self.chi * f64::from(n) / self.gamma
    }

    pub fn is_adiabatic(&self, n: u32) -> bool {
        self.adiabatic_ratio(n) < ADIABATIC_LIMIT
    }
}
