use cvd_core::analytic::SqueezeSpec;
use cvd_core::fock::{
    make_tmss_auto, make_tmss_pairs, maximal_sector_state, project_sector, DensityOperator, Occupation, PairKey,
    Side, SparseKet,
};
use cvd_core::loss::{apply_kraus, exact_loss_channel, first_order_trajectories, infidelity_scan, LossParams};
use cvd_core::purification::ProtocolParams;
use cvd_core::stats::log_log_slope;
use num_complex::Complex64;

fn first_order_density(ket: &SparseKet, loss: &LossParams) -> DensityOperator {
    let traj = first_order_trajectories(ket, loss, 0.2).unwrap();
    DensityOperator::from_mixture(ket.modes(), traj.iter().map(|t| (t.weight, &t.state))).unwrap()
}

#[test]
fn filtered_branches_obey_projection_identities() {
    let loss = LossParams::new(0.01, 0.04, 1.0).unwrap();
    for m in 1..=3u32 {
        let ket = make_tmss_auto(0.6, m, 1e-12).unwrap();
        let traj = first_order_trajectories(&ket, &loss, 0.2).unwrap();
        assert_eq!(traj.len(), 1 + 2 * m as usize);
        for j in 0..=8u32 {
            let target = maximal_sector_state(m, j);
            for t in &traj {
                let kept = project_sector(&t.state, j, j);
                if t.jumps.is_empty() {
                    let kept = kept.normalize();
                    let c = target.inner(&kept);
                    let resid: f64 = target
                        .terms()
                        .map(|(k, a)| (kept.amplitude(k) - c * a).norm_sqr())
                        .sum::<f64>()
                        + kept.terms().filter(|(k, _)| target.amplitude(k) == Complex64::new(0.0, 0.0)).map(|(_, a)| a.norm_sqr()).sum::<f64>();
                    assert!(resid.sqrt() < 1e-10, "m={m} j={j}: {resid:e}");
                } else {
                    assert!(kept.norm_sqr().sqrt() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn weight_sum_within_second_order_bound() {
    for (lambda, m) in [(0.3, 1u32), (0.5, 2), (0.6, 3)] {
        let l2: f64 = lambda * lambda;
        let mean = f64::from(m) * l2 / (1.0 - l2);
        let var = f64::from(m) * l2 / (1.0 - l2).powi(2);
        let ket = make_tmss_auto(lambda, m, 1e-13).unwrap();
        for (ea, eb) in [(0.01, 0.01), (0.0, 0.05), (0.02, 0.001)] {
            let loss = LossParams::new(ea, eb, 1.0).unwrap();
            let sum: f64 = first_order_trajectories(&ket, &loss, 0.2).unwrap().iter().map(|t| t.weight).sum();
            let x2 = ((ea + eb) * 1.0f64).powi(2) * (var + mean * mean);
            assert!(sum <= 1.0 + 1e-12 && sum >= 1.0 - x2 / 2.0 - 1e-12, "sum {sum}, lower {}", 1.0 - x2 / 2.0);
        }
    }
}

#[test]
fn single_mode_kraus_is_binomial() {
    let t = 0.7f64;
    for n in 0..=8u32 {
        let key = |k: u32| PairKey::new(Occupation::new(vec![k]), Occupation::new(vec![0]));
        let ket = SparseKet::from_terms(1, [(key(n), Complex64::new(1.0, 0.0))]);
        let mut total = 0.0;
        for k in 0..=n {
            let out = apply_kraus(&ket, Side::A, 0, k, t);
            let binom = (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1));
            let p = binom * t.powi((n - k) as i32) * (1.0 - t).powi(k as i32);
            assert!((out.amplitude(&key(n - k)).norm_sqr() - p).abs() < 1e-14);
            total += out.norm_sqr();
        }
        assert!((total - 1.0).abs() < 1e-13);
    }
}

#[test]
fn exact_channel_preserves_trace() {
    let ket = make_tmss_pairs(0.4, 2, 6, 1.0).unwrap().normalize();
    for (ea, eb, tau) in [(1.0, 1.0, 0.05), (0.0, 2.0, 0.3), (0.5, 0.1, 1.0)] {
        let rho = exact_loss_channel(&ket, &LossParams::new(ea, eb, tau).unwrap()).unwrap();
        assert!((1.0 - rho.trace()).abs() < 1e-12);
        rho.check_invariants().unwrap();
    }
}

#[test]
fn first_order_error_is_second_order() {
    for (lambda, m, j_max) in [(0.5, 1u32, 20u32), (0.3, 2, 7)] {
        let ket = make_tmss_pairs(lambda, m, j_max, 1.0).unwrap().normalize();
        let pts: Vec<(f64, f64)> = [1e-3, 3e-3, 1e-2, 2e-2, 5e-2]
            .iter()
            .map(|&x| {
                let loss = LossParams::new(x, x, 1.0).unwrap();
                let exact = exact_loss_channel(&ket, &loss).unwrap();
                (x, first_order_density(&ket, &loss).trace_distance(&exact).unwrap())
            })
            .collect();
        let slope = log_log_slope(&pts).unwrap();
        assert!((slope - 2.0).abs() <= 0.2, "lambda={lambda} m={m}: slope {slope}, {pts:?}");
    }
}

#[test]
fn exact_kept_probability_dominates_first_order() {
    let params = ProtocolParams::new(2, SqueezeSpec::from_lambda(0.5).unwrap());
    let base = LossParams::new(1.0, 0.5, 0.01).unwrap();
    for j in 0..=4u32 {
        let scan = infidelity_scan(&params, &base, &[0.001, 0.01, 0.03, 0.06], j).unwrap();
        for r in &scan.rows {
            let fo = r.first_order_kept.unwrap();
            assert!(r.kept_prob >= fo - 1e-15, "j={j} tau={}: {} < {fo}", r.tau, r.kept_prob);
        }
    }
}
