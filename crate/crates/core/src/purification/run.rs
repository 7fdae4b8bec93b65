use std::collections::BTreeMap;

use serde::Serialize;

use super::outcomes::{enumerate_outcomes, OutcomeSampler};
use super::params::ProtocolParams;
use crate::analytic::outcome_prob;
use crate::error::Result;
use crate::fock::Side;
use crate::rng::{map_indexed, shot_rng, Parallelism};
use crate::stats::{proportion, Estimate, SampleMoments};
use crate::table::{fmt_f64, Table};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub j: u32,
    pub count: u64,
    pub p_emp: f64,
    pub p_analytic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolSummary {
    pub params: ProtocolParams,
    pub n_shots: u64,
    pub seed: u64,
    pub histogram: Vec<HistogramBin>,
    pub mean_e_bits: Estimate,
    pub frac_gain: Estimate,
    pub mean_j: Estimate,
}

impl ProtocolSummary {
    pub fn histogram_table(&self) -> Table {
        let mut t = Table::new(["j", "count", "p_emp", "p_analytic"].map(String::from));
        for b in &self.histogram {
            t.push(vec![
                b.j.to_string(),
                b.count.to_string(),
                fmt_f64(b.p_emp),
                fmt_f64(b.p_analytic),
            ]);
        }
        t
    }
}

/// Monte-Carlo run of `n_shots` ideal measurements on side A. Shot `i` draws
/// from the stream seeded with `seed + i`.
pub fn protocol_run(params: &ProtocolParams, n_shots: u64, seed: u64, par: Parallelism) -> Result<ProtocolSummary> {
    let ket = params.build_state()?;
    let records = enumerate_outcomes(&ket, Side::A)?;
    let sampler = OutcomeSampler::from_masses(records.iter().map(|r| (r.j, r.probability)));
    let by_j: BTreeMap<u32, (f64, bool)> = records
        .iter()
        .map(|r| (r.j, (r.entanglement_bits, r.gain_ratio.is_some_and(|g| g > 1.0))))
        .collect();

    let draws = map_indexed(n_shots, par, |i| sampler.sample(&mut shot_rng(seed, i)));

    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for &j in &draws {
        *counts.entry(j).or_insert(0) += 1;
    }
    let e: Vec<f64> = draws.iter().map(|j| by_j[j].0).collect();
    let js: Vec<f64> = draws.iter().map(|&j| f64::from(j)).collect();
    let gains = draws.iter().filter(|j| by_j[j].1).count() as u64;

    let j_top = counts.keys().next_back().copied().unwrap_or(0);
    let histogram = (0..=j_top)
        .map(|j| {
            let count = counts.get(&j).copied().unwrap_or(0);
            HistogramBin {
                j,
                count,
                p_emp: count as f64 / n_shots as f64,
                p_analytic: outcome_prob(j, params.m, &params.squeeze),
            }
        })
        .collect();

    Ok(ProtocolSummary {
        params: *params,
        n_shots,
        seed,
        histogram,
        mean_e_bits: SampleMoments::of(&e).mean_estimate(),
        frac_gain: proportion(gains, n_shots),
        mean_j: SampleMoments::of(&js).mean_estimate(),
    })
}
