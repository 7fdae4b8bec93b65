use num_complex::Complex64;
use serde::Serialize;

use super::params::CavityParams;
use crate::error::{Error, Result};

/// Mean integrated quadrature per photon, `4√2 |g| χ cos θ / √γ`.
pub fn signal_slope(c: &CavityParams) -> f64 {
    4.0 * std::f64::consts::SQRT_2 * c.g * c.chi * c.lo_phase.cos() / c.gamma.sqrt()
}

/// Vacuum-limited standard deviation of the integrated quadrature.
pub fn noise_sigma(c: &CavityParams) -> f64 {
    1.0 / (2.0 * c.t_meas).sqrt()
}

/// Photon-number resolution `√γ / (8 |g| χ √T)`.
pub fn distinguishability(c: &CavityParams) -> f64 {
    c.gamma.sqrt() / (8.0 * c.g * c.chi * c.t_meas.sqrt())
}

/// Noise-free intracavity amplitude `−gγ / (iχn + γ/2)` with `g = i|g|`.
pub fn steady_state_mode(c: &CavityParams, n: u32) -> Complex64 {
    let g = Complex64::new(0.0, c.g);
    -g * c.gamma / Complex64::new(c.gamma / 2.0, c.chi * f64::from(n))
}

/// Input-to-output map of one ring cavity, `(iχn − γ/2)/(iχn + γ/2)`.
pub fn reflection(c: &CavityParams, n: u32) -> Complex64 {
    let x = c.chi * f64::from(n);
    Complex64::new(-c.gamma / 2.0, x) / Complex64::new(c.gamma / 2.0, x)
}

/// Output phase of the two cavities relative to the empty ones,
/// `2 Σ_i atan(2χn_i/γ)` in magnitude. The output rotates by minus this angle.
pub fn composite_phase(c: &CavityParams, n1: u32, n2: u32) -> f64 {
    let a = |n: u32| (2.0 * c.chi * f64::from(n) / c.gamma).atan();
    2.0 * (a(n1) + a(n2))
}

/// Linearized composite phase `4χ(n_1+n_2)/γ`.
pub fn linear_phase(c: &CavityParams, n1: u32, n2: u32) -> f64 {
    4.0 * c.chi * f64::from(n1 + n2) / c.gamma
}

/// Noise-free, baseline-referenced quadrature of the second output without
/// linearization.
pub fn exact_signal(c: &CavityParams, n1: u32, n2: u32) -> f64 {
    let out = |n1: u32, n2: u32| {
        let b = Complex64::new(0.0, c.g) * c.gamma.sqrt() * reflection(c, n1) * reflection(c, n2);
        std::f64::consts::SQRT_2 * (Complex64::from_polar(1.0, -c.lo_phase) * b).re
    };
    out(n1, n2) - out(0, 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub t_min_s: f64,
    pub t_max_s: f64,
    pub t_meas_s: f64,
    pub delta_n: f64,
    pub feasible: bool,
}

/// `γ/(64|g|²χ²) < T < 1/(κ n̄)`.
pub fn feasibility_window(c: &CavityParams, n_bar: f64) -> Result<FeasibilityReport> {
    let t_min = c.gamma / (64.0 * c.g * c.g * c.chi * c.chi);
    let t_max = 1.0 / (c.kappa * n_bar);
    if !(t_min < t_max) {
        return Err(Error::WindowEmpty { t_min, t_max });
    }
    Ok(FeasibilityReport {
        t_min_s: t_min,
        t_max_s: t_max,
        t_meas_s: c.t_meas,
        delta_n: distinguishability(c),
        feasible: t_min < c.t_meas && c.t_meas < t_max,
    })
}
