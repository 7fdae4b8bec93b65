use rand_distr::{Distribution, Normal};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal as StdNormal};

use super::params::CavityParams;
use super::signal::{distinguishability, noise_sigma, signal_slope};
use crate::rng::shot_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomodyneRecord {
    pub sample_id: u64,
    pub x_t: f64,
    pub n_true: u32,
    pub n_inferred: u32,
    pub signal_mean: f64,
    pub noise_sigma: f64,
}

/// Nearest photon number to `x / slope`, clamped at zero. A zero slope
/// carries no information and always infers zero.
pub fn infer_number(x: f64, slope: f64) -> u32 {
    if slope == 0.0 {
        return 0;
    }
    let n = (x / slope).round();
    if n <= 0.0 {
        0
    } else {
        n.min(f64::from(u32::MAX)) as u32
    }
}

/// Gaussian readout model. `noise_scale` multiplies the vacuum noise; 0
/// gives the bare signal.
pub fn sample_homodyne(c: &CavityParams, n_tot: u32, n_samples: u64, seed: u64, noise_scale: f64) -> Vec<HomodyneRecord> {
    let slope = signal_slope(c);
    let mean = slope * f64::from(n_tot);
    let sigma = noise_sigma(c);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    (0..n_samples)
        .map(|i| {
            let x = mean + noise_scale * sigma * normal.sample(&mut shot_rng(seed, i));
            HomodyneRecord {
                sample_id: i,
                x_t: x,
                n_true: n_tot,
                n_inferred: infer_number(x, slope),
                signal_mean: mean,
                noise_sigma: sigma,
            }
        })
        .collect()
}

/// Probability that rounding returns a wrong number: `2Φ(−1/(2δn))`, one-sided
/// at `n_tot = 0` where negative readings are clamped.
pub fn misidentification_rate(c: &CavityParams, n_tot: u32) -> f64 {
    let tail = StdNormal::standard().cdf(-1.0 / (2.0 * distinguishability(c)));
    if n_tot == 0 {
        tail
    } else {
        2.0 * tail
    }
}
