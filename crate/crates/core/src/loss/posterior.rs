use std::collections::{BTreeMap, HashMap};

use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use super::exact::exact_loss_sector;
use super::filter::{two_sided_filter, Ensemble};
use super::params::LossParams;
use crate::analytic::lossy_outcome_prob;
use crate::error::Result;
use crate::fock::{project_sector, Side};
use crate::purification::{OutcomeSampler, ProtocolParams};
use crate::rng::{map_indexed, shot_rng, Parallelism};
use crate::stats::{proportion, Estimate};
use crate::table::{fmt_f64, Table};

/// One shot: input total `n`, then the two local results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConfirmationEvent {
    pub shot: u64,
    pub n_input: u32,
    pub j_a: u32,
    pub j_b: u32,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcceptanceRow {
    pub j: u32,
    pub accepted: u64,
    pub rate: Estimate,
    pub analytic_p_prime: f64,
    /// Mean fidelity with `|j⟩` over accepted shots.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorSummary {
    pub n_shots: u64,
    pub seed: u64,
    pub acceptance: Estimate,
    pub rows: Vec<AcceptanceRow>,
    pub events: Vec<ConfirmationEvent>,
}

impl PosteriorSummary {
    pub fn table(&self) -> Table {
        let mut t = Table::new(["j", "accepted", "rate", "rate_se", "analytic_p_prime", "fidelity"].map(String::from));
        for r in &self.rows {
            t.push(vec![
                r.j.to_string(),
                r.accepted.to_string(),
                fmt_f64(r.rate.mean),
                fmt_f64(r.rate.std_err),
                fmt_f64(r.analytic_p_prime),
                fmt_f64(r.fidelity),
            ]);
        }
        t
    }
}

fn survivors<R: rand::Rng>(n: u32, t: f64, rng: &mut R) -> u32 {
    if n == 0 || t >= 1.0 {
        return n;
    }
    let lost = Binomial::new(u64::from(n), 1.0 - t).expect("valid binomial").sample(rng);
    n - lost as u32
}

/// Side A measures its total number; the B modes then travel through the
/// loss channel and B measures. The pair is kept when the results agree.
///
/// Both sides start with the same total `n` drawn from the input. Loss on a
/// side removes a binomial number of its `n` photons, so the local results
/// are drawn directly; A's storage loss enters the same way.
pub fn posterior_confirmation_run(
    params: &ProtocolParams,
    loss: &LossParams,
    n_shots: u64,
    seed: u64,
    par: Parallelism,
) -> Result<PosteriorSummary> {
    let ket = params.build_state()?;
    let sampler = OutcomeSampler::new(&ket, Side::A);
    let t_a = loss.transmissivity(Side::A);
    let t_b = loss.transmissivity(Side::B);

    let events = map_indexed(n_shots, par, |shot| {
        let mut rng = shot_rng(seed, shot);
        let n = sampler.sample(&mut rng);
        let j_a = survivors(n, t_a, &mut rng);
        let j_b = survivors(n, t_b, &mut rng);
        ConfirmationEvent {
            shot,
            n_input: n,
            j_a,
            j_b,
            accepted: j_a == j_b,
        }
    });

    // conditional fidelity of the state left by an accepted (n, j) event
    let mut fid_cache: HashMap<(u32, u32), f64> = HashMap::new();
    let mut per_j: BTreeMap<u32, (u64, f64)> = BTreeMap::new();
    for e in events.iter().filter(|e| e.accepted) {
        let f = match fid_cache.get(&(e.n_input, e.j_a)) {
            Some(&f) => f,
            None => {
                let psi = project_sector(&ket, e.n_input, e.n_input);
                let block = exact_loss_sector(&psi, loss, e.j_a, e.j_a)?;
                let f = two_sided_filter(Ensemble::Density(&block), e.j_a)?
                    .fidelity
                    .unwrap_or(f64::NAN);
                fid_cache.insert((e.n_input, e.j_a), f);
                f
            }
        };
        let entry = per_j.entry(e.j_a).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 += f;
    }
    let accepted_total: u64 = per_j.values().map(|v| v.0).sum();
    let rows = per_j
        .into_iter()
        .map(|(j, (count, fsum))| AcceptanceRow {
            j,
            accepted: count,
            rate: proportion(count, n_shots),
            analytic_p_prime: lossy_outcome_prob(j, params.m, &params.squeeze, loss),
            fidelity: fsum / count as f64,
        })
        .collect();
    Ok(PosteriorSummary {
        n_shots,
        seed,
        acceptance: proportion(accepted_total, n_shots),
        rows,
        events,
    })
}
