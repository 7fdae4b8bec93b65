use cvd_core::qnd::{
    distinguishability, feasibility_window, infer_number, noise_sigma, reflection, sde_ensemble, signal_slope,
    CavityParams, SdeOptions,
};
use cvd_core::rng::Parallelism;
use cvd_core::stats::SampleMoments;
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn cavity() -> impl Strategy<Value = CavityParams> {
    (1e3f64..1e7, 1e6f64..1e10, 1e3f64..1e8, 1.0f64..1e3, 1e-10f64..1e-6)
        .prop_map(|(chi, gamma, kappa, g, t)| CavityParams::new(chi, gamma, kappa, g, t).unwrap())
}

proptest! {
    #[test]
    fn resolution_is_noise_over_slope(c in cavity()) {
        let dn = distinguishability(&c);
        prop_assert!((dn - noise_sigma(&c) / signal_slope(&c)).abs() <= 1e-12 * dn);
    }

    #[test]
    fn resolution_is_one_at_lower_edge(c in cavity()) {
        let t_min = c.gamma / (64.0 * c.g * c.g * c.chi * c.chi);
        let edge = c.with_t_meas(t_min).unwrap();
        prop_assert!((distinguishability(&edge) - 1.0).abs() < 1e-12);
        if let Ok(w) = feasibility_window(&c, 1.0) {
            prop_assert!((w.t_min_s / t_min - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ring_cavity_reflection_is_unitary(c in cavity(), n in 0u32..1000) {
        prop_assert!((reflection(&c, n).norm() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn sde_matches_gaussian_model_on_grid() {
    let opts = SdeOptions::default();
    let n_traj = 2000;
    let mut seed = 50_000u64;
    for g in [50.0, 100.0, 200.0] {
        for chi_hz in [0.5e5, 1e5, 2e5] {
            let c = CavityParams::from_hz(chi_hz, 1e8, 4e6, g, 8e-9).unwrap();
            let xs = sde_ensemble(&c, 1, 1, n_traj, seed, &opts, Parallelism::Auto).unwrap();
            seed += n_traj;
            let mom = SampleMoments::of(&xs);
            let est = mom.mean_estimate();
            let expected = 2.0 * 4.0 * std::f64::consts::SQRT_2 * g * c.chi / c.gamma.sqrt();
            let var = 1.0 / (2.0 * c.t_meas);
            let z_mean = (est.mean - expected) / est.std_err;
            let z_var = (mom.variance - var) / mom.variance_std_err(&xs);
            assert!(z_mean.abs() < 4.0 && z_var.abs() < 4.0, "g={g} chi={chi_hz}: z_mean {z_mean:.2}, z_var {z_var:.2}");
        }
    }
}

#[test]
fn inference_depends_on_total_only() {
    let c = CavityParams::reference();
    let slope = signal_slope(&c);
    let opts = SdeOptions::default();
    let n = 4000;
    let counts = |n1, n2, seed| {
        let mut h = [0f64; 8];
        for x in sde_ensemble(&c, n1, n2, n, seed, &opts, Parallelism::Auto).unwrap() {
            h[(infer_number(x, slope) as usize).min(7)] += 1.0;
        }
        h
    };
    let a = counts(3, 0, 900_000);
    let b = counts(1, 2, 800_000);
    let mut stat = 0.0;
    let mut bins = 0;
    for k in 0..8 {
        let pooled = a[k] + b[k];
        if pooled == 0.0 {
            continue;
        }
        let e = pooled / 2.0;
        stat += (a[k] - e).powi(2) / e + (b[k] - e).powi(2) / e;
        bins += 1;
    }
    let crit = ChiSquared::new(f64::from(bins - 1)).unwrap().inverse_cdf(0.99);
    assert!(stat < crit, "chi2 {stat:.2} >= {crit:.2}");
}
