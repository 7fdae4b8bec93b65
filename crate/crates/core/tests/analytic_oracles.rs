use cvd_core::analytic::{
    log2_multiset_coeff, lossy_outcome_prob, multiset_coeff_exact, outcome_prob, SqueezeSpec,
};
use cvd_core::fock::{
    make_tmss_auto, make_tmss_pairs, project_sector, project_total_number, schmidt_entropy, tail_mass, Side,
};
use cvd_core::loss::{first_order_trajectories, LossParams};

#[test]
fn outcome_prob_matches_projection_norm() {
    for m in 1..=4u32 {
        for lambda in [0.3, 0.5, 0.8] {
            let s = SqueezeSpec::from_lambda(lambda).unwrap();
            let j_max = 40;
            let ket = make_tmss_pairs(lambda, m, j_max, 1.0).unwrap();
            let tol = 1e-9f64.max(tail_mass(lambda, m, j_max));
            for j in 0..=12u32 {
                let (post, mass) = project_total_number(&ket, Side::A, j);
                assert!((outcome_prob(j, m, &s) - mass).abs() < tol, "m={m} lambda={lambda} j={j}");
                if mass > 0.0 {
                    let e = schmidt_entropy(&post.normalize()).unwrap();
                    assert!((e - log2_multiset_coeff(j, m)).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn lossy_prob_is_filtered_no_jump_norm() {
    let lambda = 0.5;
    let s = SqueezeSpec::from_lambda(lambda).unwrap();
    for (ea, eb) in [(0.01, 0.01), (0.0, 0.05), (0.03, 0.002)] {
        let loss = LossParams::new(ea, eb, 1.0).unwrap();
        for m in 1..=3u32 {
            let ket = make_tmss_auto(lambda, m, 1e-13).unwrap();
            let traj = first_order_trajectories(&ket, &loss, 0.2).unwrap();
            let no_jump = traj.iter().find(|t| t.jumps.is_empty()).unwrap();
            for j in 0..=6u32 {
                let filtered = no_jump.weight * project_sector(&no_jump.state, j, j).norm_sqr();
                assert!((lossy_outcome_prob(j, m, &s, &loss) - filtered).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn multiset_pascal_recurrence() {
    for m in 2..=30u32 {
        for j in 1..=30u32 {
            assert_eq!(
                multiset_coeff_exact(j, m),
                multiset_coeff_exact(j, m - 1) + multiset_coeff_exact(j - 1, m),
                "j={j} m={m}"
            );
        }
    }
    for j in 0..=30 {
        assert_eq!(multiset_coeff_exact(j, 1), 1u32.into());
    }
}

#[test]
fn log_form_survives_underflow() {
    // (1-λ²)^m λ^{2j} underflows a naive product here
    let s = SqueezeSpec::from_lambda(0.9).unwrap();
    let p = outcome_prob(3000, 200, &s);
    assert!(p.is_finite() && p >= 0.0);
    let l2: f64 = 0.81;
    let ln = 200.0 * (1.0 - l2).ln() + 3000.0 * l2.ln() + log2_multiset_coeff(3000, 200) * std::f64::consts::LN_2;
    assert!((p - ln.exp()).abs() <= 1e-12 * ln.exp().max(f64::MIN_POSITIVE));
}
