//! One function per subcommand, each returning the outputs to emit.

use cvd_core::analytic::{
    asymmetric_bound, asymptotic_yield, double_jump_bound, gain_ratio, outcome_prob, AnalyticReport, DEFAULT_SMALLNESS,
};
use cvd_core::fock::{EntropyUnit, Side};
use cvd_core::loss::{
    exact_loss_sector, first_order_trajectories, infidelity_scan, posterior_confirmation_run, two_sided_filter,
    Ensemble, LossParams,
};
use cvd_core::purification::{enumerate_outcomes, protocol_run, verify_maximal};
use cvd_core::qnd::{
    feasibility_window, misidentification_rate, noise_sigma, sample_homodyne, sde_ensemble, signal_slope,
    CavityParams, SdeOptions, DEFAULT_DISCARD_GAMMA,
};
use cvd_core::rng::Parallelism;
use cvd_core::stats::{proportion, SampleMoments};
use cvd_core::table::{fmt_f64, fmt_opt, Table};
use serde_json::json;

use crate::config::LoadedConfig;
use crate::output::Output;

pub type CmdResult = cvd_core::Result<Vec<Output>>;

fn require<T>(v: Option<T>, what: &str) -> cvd_core::Result<T> {
    v.ok_or_else(|| cvd_core::Error::InvalidParameter(format!("configuration has no valid {what} section")))
}

pub fn analytic(cfg: &LoadedConfig) -> CmdResult {
    let params = require(cfg.protocol(), "protocol")?;
    let section = cfg.config.protocol.as_ref().expect("validated");
    let loss = cfg.loss().unwrap_or_else(LossParams::none);
    let report = AnalyticReport::build(
        params.m,
        params.squeeze,
        loss,
        params.j_max,
        params.tail_tol,
        section.unit,
    )?;
    let s = params.squeeze;
    let dj = double_jump_bound(params.m, &s, &loss, DEFAULT_SMALLNESS);
    let ab = asymmetric_bound(&s, loss.eta_a(), loss.tau(), DEFAULT_SMALLNESS);
    let main = Output::new("analytic", report.table(), &report)
        .scalar("m", params.m)
        .scalar("r", fmt_f64(s.r()))
        .scalar("lambda", fmt_f64(s.lambda()))
        .scalar("n_bar", fmt_f64(s.n_bar()))
        .scalar(&format!("e_pair_{}", section.unit.suffix()), fmt_f64(report.e_pair))
        .scalar("tail_mass", fmt_f64(report.tail_mass))
        .scalar("double_jump_weight", fmt_f64(dj.value))
        .scalar("double_jump_small", dj.valid)
        .scalar("asymmetric_weight", fmt_f64(ab.value))
        .scalar("asymmetric_small", ab.valid);

    let m_list = section.m_list.clone().unwrap_or_else(|| (1..=8).collect());
    let rows = asymptotic_yield(&m_list, &s);
    let unit = section.unit;
    let mut t = Table::new(["m".to_string(), format!("per_pair_{}", unit.suffix())]);
    for r in &rows {
        t.push(vec![r.m.to_string(), fmt_f64(unit.from_bits(r.per_pair_bits))]);
    }
    let yield_out = Output::new("yield", t, &rows).scalar(
        &format!("e_pair_{}", unit.suffix()),
        fmt_f64(report.e_pair),
    );
    Ok(vec![main, yield_out])
}

pub fn simulate_protocol(cfg: &LoadedConfig, seed: u64, par: Parallelism) -> CmdResult {
    let params = require(cfg.protocol(), "protocol")?;
    let n_shots = cfg.config.run.n_shots;
    let unit = entropy_unit(cfg);
    let summary = protocol_run(&params, n_shots, seed, par)?;
    let analytic_gain: f64 = summary
        .histogram
        .iter()
        .filter(|b| gain_ratio(b.j, params.m, &params.squeeze).is_ok_and(|g| g > 1.0))
        .map(|b| b.p_analytic)
        .sum();
    let hist = Output::new("protocol_histogram", summary.histogram_table(), &summary)
        .scalar("n_shots", n_shots)
        .scalar(&format!("mean_e_{}", unit.suffix()), fmt_f64(unit.from_bits(summary.mean_e_bits.mean)))
        .scalar(&format!("mean_e_{}_se", unit.suffix()), fmt_f64(unit.from_bits(summary.mean_e_bits.std_err)))
        .scalar("frac_gain", fmt_f64(summary.frac_gain.mean))
        .scalar("frac_gain_se", fmt_f64(summary.frac_gain.std_err))
        .scalar("frac_gain_analytic_in_range", fmt_f64(analytic_gain))
        .scalar("mean_j", fmt_f64(summary.mean_j.mean))
        .scalar("mean_j_se", fmt_f64(summary.mean_j.std_err))
        .scalar("mean_j_analytic", fmt_f64(f64::from(params.m) * params.squeeze.n_bar()));

    let ket = params.build_state()?;
    let records = enumerate_outcomes(&ket, Side::A)?;
    let e_col = format!("entanglement_{}", unit.suffix());
    let mut t = Table::new([
        "j".to_string(),
        "probability".to_string(),
        "p_analytic".to_string(),
        e_col.clone(),
        "gain_ratio".to_string(),
        "maximal_deviation".to_string(),
    ]);
    let mut rows = Vec::new();
    for r in &records {
        let dev = verify_maximal(&r.post_state, r.j, params.m)?;
        let p = outcome_prob(r.j, params.m, &params.squeeze);
        t.push(vec![
            r.j.to_string(),
            fmt_f64(r.probability),
            fmt_f64(p),
            fmt_f64(unit.from_bits(r.entanglement_bits)),
            fmt_opt(r.gain_ratio),
            fmt_f64(dev),
        ]);
        rows.push(json!({
            "j": r.j, "probability": r.probability, "p_analytic": p,
            e_col.clone(): unit.from_bits(r.entanglement_bits), "gain_ratio": r.gain_ratio, "maximal_deviation": dev,
        }));
    }
    Ok(vec![hist, Output::new("outcomes", t, &rows)])
}

fn default_scan(tau: f64) -> Vec<f64> {
    [0.125, 0.25, 0.5, 1.0].iter().map(|f| f * tau).collect()
}

pub fn simulate_loss(cfg: &LoadedConfig, seed: u64, par: Parallelism) -> CmdResult {
    let params = require(cfg.protocol(), "protocol")?;
    let loss = require(cfg.loss(), "loss")?;
    let section = cfg.config.loss.as_ref().expect("validated");
    let j = section.j;
    let ket = params.build_state()?;
    let mut outputs = Vec::new();

    let analytic_p = cvd_core::analytic::lossy_outcome_prob(j, params.m, &params.squeeze, &loss);
    let mut filter_t = Table::new(["model", "kept_probability", "fidelity", "analytic_p_prime"]);
    let mut filter_rows = Vec::new();

    match first_order_trajectories(&ket, &loss, section.first_order_guard) {
        Ok(traj) => {
            let mut t = Table::new(["branch", "weight"]);
            let mut rows = Vec::new();
            for term in &traj {
                let label = match term.jumps.first() {
                    None => "none".to_string(),
                    Some(jump) => format!("{:?}{}", jump.side, jump.mode + 1),
                };
                t.push(vec![label.clone(), fmt_f64(term.weight)]);
                rows.push(json!({"branch": label, "weight": term.weight}));
            }
            let total: f64 = traj.iter().map(|t| t.weight).sum();
            outputs.push(Output::new("trajectories", t, &rows).scalar("weight_sum", fmt_f64(total)));
            let f = two_sided_filter(Ensemble::Trajectories(&traj), j)?;
            filter_t.push(vec![
                "first_order".into(),
                fmt_f64(f.kept_probability),
                fmt_opt(f.fidelity),
                fmt_f64(analytic_p),
            ]);
            filter_rows.push(json!({"model": "first_order", "kept_probability": f.kept_probability, "fidelity": f.fidelity}));
        }
        Err(cvd_core::Error::NoiseTooLarge { value, guard }) => {
            eprintln!("warning: eta * tau = {value} exceeds the first-order guard {guard}; trajectories skipped");
        }
        Err(e) => return Err(e),
    }
    let block = exact_loss_sector(&ket, &loss, j, j)?;
    let f = two_sided_filter(Ensemble::Density(&block), j)?;
    filter_t.push(vec![
        "exact".into(),
        fmt_f64(f.kept_probability),
        fmt_opt(f.fidelity),
        fmt_f64(analytic_p),
    ]);
    filter_rows.push(json!({"model": "exact", "kept_probability": f.kept_probability, "fidelity": f.fidelity}));
    outputs.push(
        Output::new("filter", filter_t, &json!({"j": j, "analytic_p_prime": analytic_p, "rows": filter_rows}))
            .scalar("j", j),
    );

    let taus = section.tau_scan.clone().unwrap_or_else(|| default_scan(loss.tau()));
    let scan = infidelity_scan(&params, &loss, &taus, j)?;
    outputs.push(
        Output::new("infidelity_scan", scan.table(), &scan)
            .scalar("j", j)
            .scalar("slope", fmt_opt(scan.slope)),
    );

    let post = posterior_confirmation_run(&params, &loss, cfg.config.run.n_shots, seed, par)?;
    outputs.push(
        Output::new(
            "posterior",
            post.table(),
            &json!({"n_shots": post.n_shots, "seed": post.seed, "acceptance": post.acceptance, "rows": post.rows}),
        )
        .scalar("acceptance", fmt_f64(post.acceptance.mean))
        .scalar("acceptance_se", fmt_f64(post.acceptance.std_err)),
    );
    let mut ev = Table::new(["shot", "n_input", "j_a", "j_b", "accepted"]);
    for e in &post.events {
        ev.push(vec![
            e.shot.to_string(),
            e.n_input.to_string(),
            e.j_a.to_string(),
            e.j_b.to_string(),
            e.accepted.to_string(),
        ]);
    }
    outputs.push(Output::new("posterior_events", ev, &post.events));
    Ok(outputs)
}

fn sde_options(cfg: &LoadedConfig) -> SdeOptions {
    let c = cfg.config.cavity.as_ref().expect("validated");
    SdeOptions {
        dt: c.sde_dt_s,
        discard_gamma: c.discard_gamma.unwrap_or(DEFAULT_DISCARD_GAMMA),
        ..SdeOptions::default()
    }
}

pub fn simulate_qnd(cfg: &LoadedConfig, seed: u64, par: Parallelism) -> CmdResult {
    let cav = require(cfg.cavity(), "cavity")?;
    let section = cfg.config.cavity.as_ref().expect("validated");
    let n_samples = section.n_samples;
    let slope = signal_slope(&cav);
    let sigma = noise_sigma(&cav);

    let mut samples = Table::new(["sample_id", "x_t", "n_true", "n_inferred"]);
    let mut summary = Table::new([
        "n_tot", "mean", "mean_se", "expected_mean", "sigma", "expected_sigma", "misid", "misid_se", "misid_analytic",
    ]);
    let mut summary_rows = Vec::new();
    for (k, &n) in section.n_tot.iter().enumerate() {
        let base = seed.wrapping_add(k as u64 * n_samples);
        let recs = sample_homodyne(&cav, n, n_samples, base, 1.0);
        let xs: Vec<f64> = recs.iter().map(|r| r.x_t).collect();
        let m = SampleMoments::of(&xs);
        let wrong = recs.iter().filter(|r| r.n_inferred != n).count() as u64;
        let mis = proportion(wrong, n_samples);
        let mis_a = misidentification_rate(&cav, n);
        for r in &recs {
            samples.push(vec![
                (k as u64 * n_samples + r.sample_id).to_string(),
                fmt_f64(r.x_t),
                r.n_true.to_string(),
                r.n_inferred.to_string(),
            ]);
        }
        summary.push(vec![
            n.to_string(),
            fmt_f64(m.mean),
            fmt_f64(m.mean_estimate().std_err),
            fmt_f64(slope * f64::from(n)),
            fmt_f64(m.std_dev()),
            fmt_f64(sigma),
            fmt_f64(mis.mean),
            fmt_f64(mis.std_err),
            fmt_f64(mis_a),
        ]);
        summary_rows.push(json!({
            "n_tot": n, "mean": m.mean, "mean_se": m.mean_estimate().std_err, "expected_mean": slope * f64::from(n),
            "sigma": m.std_dev(), "expected_sigma": sigma, "misid": mis.mean, "misid_se": mis.std_err,
            "misid_analytic": mis_a,
        }));
    }

    let opts = sde_options(cfg);
    let n_traj = section.sde_trajectories;
    let mut sde = Table::new([
        "n1", "n2", "mean", "mean_se", "gaussian_mean", "variance", "variance_se", "gaussian_variance",
    ]);
    let mut sde_rows = Vec::new();
    let sde_base = seed.wrapping_add(1 << 40);
    for (k, &n) in section.n_tot.iter().enumerate() {
        let (n1, n2) = (n.div_ceil(2), n / 2);
        let xs = sde_ensemble(&cav, n1, n2, n_traj, sde_base.wrapping_add(k as u64 * n_traj), &opts, par)?;
        let m = SampleMoments::of(&xs);
        let var_se = m.variance_std_err(&xs);
        sde.push(vec![
            n1.to_string(),
            n2.to_string(),
            fmt_f64(m.mean),
            fmt_f64(m.mean_estimate().std_err),
            fmt_f64(slope * f64::from(n)),
            fmt_f64(m.variance),
            fmt_f64(var_se),
            fmt_f64(sigma * sigma),
        ]);
        sde_rows.push(json!({
            "n1": n1, "n2": n2, "mean": m.mean, "mean_se": m.mean_estimate().std_err,
            "gaussian_mean": slope * f64::from(n), "variance": m.variance, "variance_se": var_se,
            "gaussian_variance": sigma * sigma,
        }));
    }
    Ok(vec![
        Output::new("homodyne", samples, &json!({"n_samples": n_samples, "note": "per-sample rows in CSV only"})),
        Output::new("homodyne_summary", summary, &summary_rows)
            .scalar("signal_slope", fmt_f64(slope))
            .scalar("noise_sigma", fmt_f64(sigma)),
        Output::new("sde_validation", sde, &sde_rows)
            .scalar("trajectories", n_traj)
            .scalar("discard_gamma", fmt_f64(opts.discard_gamma)),
    ])
}

pub fn feasibility(cfg: &LoadedConfig) -> CmdResult {
    let cav = require(cfg.cavity(), "cavity")?;
    let n_bar = require(cfg.n_bar(), "n_bar")?;
    Ok(vec![feasibility_output(&cav, n_bar)?])
}

pub fn feasibility_output(cav: &CavityParams, n_bar: f64) -> cvd_core::Result<Output> {
    let rep = feasibility_window(cav, n_bar)?;
    let mut t = Table::new(["t_min_s", "t_max_s", "t_meas_s", "delta_n", "feasible"]);
    t.push(vec![
        fmt_f64(rep.t_min_s),
        fmt_f64(rep.t_max_s),
        fmt_f64(rep.t_meas_s),
        fmt_f64(rep.delta_n),
        rep.feasible.to_string(),
    ]);
    Ok(Output::new("feasibility", t, &rep)
        .scalar("n_bar", fmt_f64(n_bar))
        .scalar("signal_slope", fmt_f64(signal_slope(cav)))
        .scalar("noise_sigma", fmt_f64(noise_sigma(cav))))
}

fn entropy_unit(cfg: &LoadedConfig) -> EntropyUnit {
    cfg.config.protocol.as_ref().map(|p| p.unit).unwrap_or_default()
}

