use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::params::CavityParams;
use crate::error::{Error, Result};
use crate::rng::{map_indexed, shot_rng, Parallelism};

/// Largest step in units of `1/γ`.
pub const MAX_STEP_GAMMA: f64 = 0.02;

/// Default settling time discarded before the measurement window, in units
/// of `1/γ`.
pub const DEFAULT_DISCARD_GAMMA: f64 = 25.0;

/// Shortest measurement window in units of `1/γ`.
pub const MIN_WINDOW_GAMMA: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SdeOptions {
    /// Step size; the largest step dividing `t_meas` into at least
    /// `γ t_meas / 0.02` pieces when absent.
    pub dt: Option<f64>,
    pub discard_gamma: f64,
    /// Multiplies the vacuum noise; 0 integrates the mean dynamics.
    pub noise_scale: f64,
    /// Record every k-th state; 0 keeps only the initial and final states.
    pub record_stride: usize,
}

impl Default for SdeOptions {
    fn default() -> Self {
        SdeOptions {
            dt: None,
            discard_gamma: DEFAULT_DISCARD_GAMMA,
            noise_scale: 1.0,
            record_stride: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SdeState {
    pub time: f64,
    pub b1: Complex64,
    pub b2: Complex64,
    /// ∫ X_θ(b_o2) dt over the elapsed part of the measurement window.
    pub x_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SdeRun {
    pub dt: f64,
    pub steps: u64,
    pub discard_steps: u64,
    pub trajectory: Vec<SdeState>,
    /// Window-averaged quadrature with the empty-cavity baseline removed.
    pub x_t: f64,
}

fn step_size(c: &CavityParams, opts: &SdeOptions) -> Result<(f64, u64)> {
    if c.gamma * c.t_meas < MIN_WINDOW_GAMMA {
        return Err(Error::InvalidStep(format!(
            "gamma * t_meas = {} is below {MIN_WINDOW_GAMMA}",
            c.gamma * c.t_meas
        )));
    }
    let dt_max = MAX_STEP_GAMMA / c.gamma;
    match opts.dt {
        None => {
            let steps = (c.t_meas / dt_max).ceil() as u64;
            Ok((c.t_meas / steps as f64, steps))
        }
        Some(dt) => {
            if !(dt > 0.0 && dt <= dt_max * (1.0 + 1e-12)) {
                return Err(Error::InvalidStep(format!("dt = {dt:e} s exceeds 0.02/gamma = {dt_max:e} s")));
            }
            let ratio = c.t_meas / dt;
            let steps = ratio.round();
            if (ratio - steps).abs() > 1e-9 * ratio {
                return Err(Error::InvalidStep(format!("t_meas / dt = {ratio} is not an integer")));
            }
            Ok((dt, steps as u64))
        }
    }
}

/// Euler–Maruyama integration of the two cascaded cavities with the drive
/// switched on at `t = 0` and the photon numbers `n1`, `n2` held fixed.
pub fn sde_integrate(c: &CavityParams, n1: u32, n2: u32, opts: &SdeOptions, seed: u64) -> Result<SdeRun> {
    c.validate()?;
    let (dt, steps) = step_size(c, opts)?;
    let discard_steps = (opts.discard_gamma.max(0.0) / c.gamma / dt).ceil() as u64;
    let total = discard_steps + steps;

    let sg = c.gamma.sqrt();
    let g = Complex64::new(0.0, c.g);
    let rot = Complex64::from_polar(1.0, -c.lo_phase);
    let k1 = Complex64::new(c.gamma / 2.0, c.chi * f64::from(n1));
    let k2 = Complex64::new(c.gamma / 2.0, c.chi * f64::from(n2));
    let limit = 4.0 * c.g + 8.0;
    let noise_sd = opts.noise_scale * (dt / 4.0).sqrt();
    let mut rng = shot_rng(seed, 0);

    let mut s = SdeState {
        time: 0.0,
        b1: Complex64::new(0.0, 0.0),
        b2: Complex64::new(0.0, 0.0),
        x_integral: 0.0,
    };
    let mut trajectory = vec![s];
    for k in 0..total {
        let dw = if noise_sd > 0.0 {
            let x: f64 = StandardNormal.sample(&mut rng);
            let y: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(x, y) * noise_sd
        } else {
            Complex64::new(0.0, 0.0)
        };
        let out1 = dw + (g * sg + sg * s.b1) * dt;
        let out2 = out1 + sg * s.b2 * dt;
        let b1 = s.b1 + (-k1 * s.b1 - g * c.gamma) * dt - sg * dw;
        let b2 = s.b2 - k2 * s.b2 * dt - sg * out1;
        if k >= discard_steps {
            s.x_integral += std::f64::consts::SQRT_2 * (rot * out2).re;
        }
        s.b1 = b1;
        s.b2 = b2;
        s.time = (k + 1) as f64 * dt;
        let amp = b1.norm().max(b2.norm());
        if !(amp <= limit) {
            return Err(Error::UnstableStep {
                amplitude: amp,
                limit,
                time: s.time,
            });
        }
        if opts.record_stride > 0 && (k + 1) % opts.record_stride as u64 == 0 {
            trajectory.push(s);
        }
    }
    if trajectory.last() != Some(&s) {
        trajectory.push(s);
    }
    let baseline = std::f64::consts::SQRT_2 * (rot * g * sg).re;
    let window = steps as f64 * dt;
    Ok(SdeRun {
        dt,
        steps,
        discard_steps,
        trajectory,
        x_t: s.x_integral / window - baseline,
    })
}

/// `x_t` of `n_traj` independent trajectories; trajectory `i` uses seed
/// `seed + i`.
pub fn sde_ensemble(
    c: &CavityParams,
    n1: u32,
    n2: u32,
    n_traj: u64,
    seed: u64,
    opts: &SdeOptions,
    par: Parallelism,
) -> Result<Vec<f64>> {
    let opts = SdeOptions {
        record_stride: 0,
        ..*opts
    };
    map_indexed(n_traj, par, |i| sde_integrate(c, n1, n2, &opts, seed.wrapping_add(i)).map(|r| r.x_t))
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnd::signal::signal_slope;

    fn quiet() -> SdeOptions {
        SdeOptions {
            noise_scale: 0.0,
            ..SdeOptions::default()
        }
    }

    #[test]
    fn empty_cavities_give_zero_signal() {
        let c = CavityParams::reference();
        let r = sde_integrate(&c, 0, 0, &quiet(), 1).unwrap();
        assert!(r.x_t.abs() < 1e-6 * signal_slope(&c), "{}", r.x_t);
    }

    #[test]
    fn mean_signal_matches_slope() {
        let c = CavityParams::reference();
        let r = sde_integrate(&c, 1, 1, &quiet(), 1).unwrap();
        let rel = r.x_t / (2.0 * signal_slope(&c)) - 1.0;
        assert!(rel.abs() < 0.01, "{rel}");
    }

    #[test]
    fn step_validation() {
        let c = CavityParams::reference();
        let big = SdeOptions {
            dt: Some(0.05 / c.gamma),
            ..quiet()
        };
        assert!(matches!(sde_integrate(&c, 0, 0, &big, 0), Err(Error::InvalidStep(_))));
        let odd = SdeOptions {
            dt: Some(c.t_meas / 300.5),
            ..quiet()
        };
        assert!(matches!(sde_integrate(&c, 0, 0, &odd, 0), Err(Error::InvalidStep(_))));
        let short = c.with_t_meas(1.0 / c.gamma).unwrap();
        assert!(matches!(sde_integrate(&short, 0, 0, &quiet(), 0), Err(Error::InvalidStep(_))));
        let ok = SdeOptions {
            dt: Some(c.t_meas / 300.0),
            ..quiet()
        };
        assert_eq!(sde_integrate(&c, 0, 0, &ok, 0).unwrap().steps, 300);
    }

    #[test]
    fn sentinel_trips() {
        let mut c = CavityParams::reference();
        c.g = 0.0;
        let loud = SdeOptions {
            noise_scale: 1e3,
            ..SdeOptions::default()
        };
        assert!(matches!(sde_integrate(&c, 0, 0, &loud, 0), Err(Error::UnstableStep { .. })));
    }

    #[test]
    fn seeded_and_parallel_safe() {
        let c = CavityParams::reference();
        let a = sde_ensemble(&c, 1, 2, 16, 3, &SdeOptions::default(), Parallelism::Serial).unwrap();
        let b = sde_ensemble(&c, 1, 2, 16, 3, &SdeOptions::default(), Parallelism::Auto).unwrap();
        assert_eq!(a, b);
    }
}
