use rand::Rng;
use serde::Serialize;

use crate::analytic::multiset_coeff;
use crate::error::{Error, Result};
use crate::fock::{project_total_number, reduced_entropy_dense, schmidt_entropy, Side, SparseKet};
use crate::rng::shot_rng;

/// One measurement result with its conditional state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeRecord {
    pub j: u32,
    pub probability: f64,
    #[serde(skip)]
    pub post_state: SparseKet,
    pub entanglement_bits: f64,
    /// Outcome entanglement over the input entanglement per pair; `None` when
    /// the input carries no entanglement.
    pub gain_ratio: Option<f64>,
}

fn entropy_of(ket: &SparseKet) -> Result<f64> {
    match schmidt_entropy(ket) {
        Err(Error::NotSchmidtForm) => reduced_entropy_dense(ket),
        other => other,
    }
}

fn check_normalized(ket: &SparseKet) -> Result<()> {
    let n2 = ket.norm_sqr();
    if ket.is_zero() || (n2 - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(n2));
    }
    Ok(())
}

fn record(ket: &SparseKet, side: Side, j: u32, per_pair: Option<f64>) -> Result<OutcomeRecord> {
    let (post, probability) = project_total_number(ket, side, j);
    let entanglement_bits = entropy_of(&post)?;
    Ok(OutcomeRecord {
        j,
        probability,
        post_state: post,
        entanglement_bits,
        gain_ratio: per_pair.map(|e| entanglement_bits / e),
    })
}

fn input_entropy_per_pair(ket: &SparseKet) -> Option<f64> {
    let e = entropy_of(ket).ok()?;
    (e > 1e-12).then(|| e / ket.modes() as f64)
}

/// One record per total number `j` measured on `side` with nonzero mass.
pub fn enumerate_outcomes(ket: &SparseKet, side: Side) -> Result<Vec<OutcomeRecord>> {
    check_normalized(ket)?;
    let per_pair = input_entropy_per_pair(ket);
    ket.sector_totals(side)
        .into_iter()
        .map(|j| record(ket, side, j, per_pair))
        .collect()
}

/// Inverse-CDF sampler over the sector masses of a ket.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSampler {
    totals: Vec<u32>,
    cdf: Vec<f64>,
}

impl OutcomeSampler {
    pub fn new(ket: &SparseKet, side: Side) -> Self {
        let masses = ket.sector_masses(side);
        Self::from_masses(masses.into_iter())
    }

    pub fn from_masses<I: Iterator<Item = (u32, f64)>>(masses: I) -> Self {
        let mut totals = Vec::new();
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        for (j, w) in masses {
            if w > 0.0 {
                acc += w;
                totals.push(j);
                cdf.push(acc);
            }
        }
        OutcomeSampler { totals, cdf }
    }

    pub fn outcomes(&self) -> &[u32] {
        &self.totals
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let total = *self.cdf.last().expect("sampler has no support");
        let u = rng.random::<f64>() * total;
        let idx = self.cdf.partition_point(|&c| c <= u).min(self.totals.len() - 1);
        self.totals[idx]
    }
}

/// Draws one outcome with probability equal to its kept mass.
pub fn sample_outcome(ket: &SparseKet, side: Side, seed: u64) -> Result<OutcomeRecord> {
    check_normalized(ket)?;
    let sampler = OutcomeSampler::new(ket, side);
    let j = sampler.sample(&mut shot_rng(seed, 0));
    record(ket, side, j, input_entropy_per_pair(ket))
}

/// Largest deviation of the squared amplitudes from the uniform weight
/// `1/f_j^(m)`. Missing tuples count with zero weight.
pub fn verify_maximal(post_state: &SparseKet, j: u32, m: u32) -> Result<f64> {
    check_normalized(post_state)?;
    for (key, _) in post_state.terms() {
        for occ in [&key.a, &key.b] {
            if occ.total() != j {
                return Err(Error::WrongSector {
                    expected: j,
                    found: occ.total(),
                });
            }
        }
    }
    let f = multiset_coeff(j, m).log2.exp2();
    let uniform = 1.0 / f;
    let mut dev = post_state
        .terms()
        .map(|(_, a)| (a.norm_sqr() - uniform).abs())
        .fold(0.0, f64::max);
    if (post_state.len() as f64) < f.round() {
        dev = dev.max(uniform);
    }
    Ok(dev)
}
