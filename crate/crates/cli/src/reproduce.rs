//! One-shot reproduction of the reference values and identities.

use cvd_core::analytic::{asymptotic_yield, lossy_outcome_prob, outcome_prob, pure_entanglement, SqueezeSpec};
use cvd_core::fock::{
    apply_annihilation, apply_number_damping, make_tmss_pairs, maximal_sector_state, project_sector,
    project_total_number, schmidt_entropy, Side,
};
use cvd_core::loss::{first_order_trajectories, infidelity_scan, two_sided_filter, Ensemble, LossParams, TrajectoryTerm};
use cvd_core::purification::{enumerate_outcomes, ghz_prepare, protocol_run, verify_maximal, ProtocolParams};
use cvd_core::qnd::{feasibility_window, misidentification_rate, sample_homodyne, CavityParams};
use cvd_core::rng::Parallelism;
use cvd_core::stats::proportion;
use cvd_core::table::{fmt_f64, Table};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub quantity: String,
    pub reference: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check(id: &str, quantity: &str, reference: f64, computed: f64, tolerance: f64) -> Check {
    Check {
        id: id.into(),
        quantity: quantity.into(),
        reference,
        computed,
        tolerance,
        pass: (computed - reference).abs() <= tolerance,
    }
}

/// Passes when `computed` lies on the stated side of `reference`.
fn below(id: &str, quantity: &str, reference: f64, computed: f64) -> Check {
    Check {
        id: id.into(),
        quantity: quantity.into(),
        reference,
        computed,
        tolerance: 0.0,
        pass: computed < reference,
    }
}

pub fn run(n_shots: u64, seed: u64, par: Parallelism) -> cvd_core::Result<Vec<Check>> {
    let mut out = Vec::new();

    // mean photon number at r = 1
    let s1 = SqueezeSpec::from_r(1.0)?;
    let ket = make_tmss_pairs(s1.lambda(), 1, cvd_core::fock::required_j_max(s1.lambda(), 1, 1e-12)?, 1e-12)?;
    let n_mean: f64 = ket
        .terms()
        .map(|(k, a)| f64::from(k.a.total()) * a.norm_sqr())
        .sum();
    out.push(check("n_bar_practical", "mean photons per mode at r = 1", 1.4, n_mean, 0.05));
    out.push(check("n_bar_sinh2", "mean photons vs sinh^2(1)", 1f64.sinh().powi(2), n_mean, 1e-9));

    // projection probabilities and outcome entanglement
    let mut worst_p = 0.0f64;
    let mut worst_e = 0.0f64;
    let mut worst_dev = 0.0f64;
    for m in 1..=3u32 {
        for lambda in [0.3, 0.5, 0.8] {
            let s = SqueezeSpec::from_lambda(lambda)?;
            let ket = ProtocolParams::new(m, s).build_state()?;
            for j in 0..=8u32 {
                let (post, p) = project_total_number(&ket, Side::A, j);
                worst_p = worst_p.max((p - outcome_prob(j, m, &s)).abs());
                worst_e = worst_e.max((schmidt_entropy(&post)? - cvd_core::analytic::outcome_entanglement(j, m)).abs());
                worst_dev = worst_dev.max(verify_maximal(&post, j, m)?);
            }
        }
    }
    out.push(check("p_j", "max |P_A projection mass - p_j|", 0.0, worst_p, 1e-9));
    out.push(check("e_out", "max |outcome entropy - log2 f_j|", 0.0, worst_e, 1e-9));
    out.push(check("maximal", "max deviation from uniform outcome amplitudes", 0.0, worst_dev, 1e-12));
    let s = SqueezeSpec::from_lambda(0.5)?;
    let ket2 = ProtocolParams::new(2, s).build_state()?;
    let recs = enumerate_outcomes(&ket2, Side::A)?;
    out.push(check("e_m2_j2", "outcome entropy m = 2, j = 2 (bits)", 3f64.log2(), recs[2].entanglement_bits, 1e-9));

    // projection identities on trajectory branches
    let mut worst_jump = 0.0f64;
    let mut worst_fid = 0.0f64;
    for m in 1..=3usize {
        let ket = ProtocolParams::new(m as u32, s).build_state()?;
        let damped = apply_number_damping(&ket, 0.02, 0.03).normalize();
        for j in 0..=6u32 {
            let kept = project_sector(&damped, j, j).normalize();
            worst_fid = worst_fid.max(1.0 - kept.inner(&maximal_sector_state(m as u32, j)).norm_sqr());
            for side in [Side::A, Side::B] {
                for mode in 0..m {
                    let jumped = apply_annihilation(&damped, side, mode).normalize();
                    worst_jump = worst_jump.max(project_sector(&jumped, j, j).norm_sqr());
                }
            }
        }
    }
    out.push(check("no_jump_fidelity", "max 1 - F of filtered no-jump branch", 0.0, worst_fid, 1e-10));
    out.push(check("single_jump_mass", "max filtered mass of single-jump branches", 0.0, worst_jump, 1e-12));

    // lossy outcome probability from the first-order ensemble
    let loss = LossParams::new(0.01, 0.01, 1.0)?;
    let traj: Vec<TrajectoryTerm> = first_order_trajectories(&ket2, &loss, 0.2)?;
    let kept = two_sided_filter(Ensemble::Trajectories(&traj), 1)?.kept_probability;
    let p_prime = lossy_outcome_prob(1, 2, &s, &loss);
    out.push(check("p_prime", "first-order kept probability / p'_1", 1.0, kept / p_prime, 3.0 * 0.01f64.powi(2)));

    // double-jump scaling
    let scan = infidelity_scan(
        &ProtocolParams::new(2, s),
        &LossParams::new(1.0, 1.0, 0.0)?,
        &[1e-3, 3e-3, 1e-2, 3e-2],
        1,
    )?;
    out.push(check("double_jump_slope", "log-log slope of filtered infidelity vs tau", 2.0, scan.slope.unwrap_or(f64::NAN), 0.2));

    // gain probability and the per-pair yield
    let run = protocol_run(&ProtocolParams::new(2, s), n_shots, seed, par)?;
    out.push(check(
        "frac_gain",
        "fraction of shots with gain ratio > 1 (m = 2, lambda = 0.5)",
        0.15625,
        run.frac_gain.mean,
        4.0 * run.frac_gain.std_err,
    ));
    let yields = asymptotic_yield(&(1..=8).collect::<Vec<_>>(), &s);
    let increasing = yields.windows(2).all(|w| w[1].per_pair_bits > w[0].per_pair_bits);
    out.push(check("yield_increasing", "per-pair yield strictly increasing for m = 1..8", 1.0, f64::from(u8::from(increasing)), 0.0));
    out.push(below("yield_bound", "per-pair yield at m = 8 below E(pair)", pure_entanglement(&s), yields[7].per_pair_bits));

    // three-party extension
    out.push(check("ghz_dimension", "GHZ local dimension for j = 1", 2.0, f64::from(cvd_core::analytic::ghz_dimension(1)), 0.0));
    let g = ghz_prepare(&s, &s, 2, (20, 20))?;
    let worst_g = [g.entropy_a, g.entropy_b, g.entropy_c]
        .iter()
        .map(|e| (e - 3f64.log2()).abs())
        .fold(0.0, f64::max);
    out.push(check("ghz_entropy", "max |bipartition entropy - log2 3| at j = 2", 0.0, worst_g, 1e-9));

    // readout
    let cav = CavityParams::reference();
    let rep = feasibility_window(&cav, s1.n_bar())?;
    out.push(check("t_min", "lower window edge (s)", 2.49e-9, rep.t_min_s, 0.01 * 2.49e-9));
    out.push(check("t_max", "upper window edge (s)", 2.88e-8, rep.t_max_s, 0.01 * 2.88e-8));
    out.push(check("feasible_8ns", "T = 8 ns inside the window", 1.0, f64::from(u8::from(rep.feasible)), 0.0));
    out.push(check("delta_n", "distinguishability at T = 8 ns", 0.558, rep.delta_n, 1e-3));
    out.push(below("delta_n_below_one", "distinguishability below one", 1.0, rep.delta_n));
    let recs = sample_homodyne(&cav, 3, n_shots, seed, 1.0);
    let wrong = recs.iter().filter(|r| r.n_inferred != 3).count() as u64;
    let mis = proportion(wrong, n_shots);
    out.push(check(
        "misidentification",
        "homodyne misidentification rate at n = 3",
        misidentification_rate(&cav, 3),
        mis.mean,
        4.0 * mis.std_err,
    ));
    Ok(out)
}

pub fn table(checks: &[Check]) -> Table {
    let mut t = Table::new(["id", "quantity", "reference", "computed", "tolerance", "pass"]);
    for c in checks {
        t.push(vec![
            c.id.clone(),
            c.quantity.clone(),
            fmt_f64(c.reference),
            fmt_f64(c.computed),
            fmt_f64(c.tolerance),
            c.pass.to_string(),
        ]);
    }
    t
}
