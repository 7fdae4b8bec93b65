use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::SqueezeSpec;
use crate::error::{Error, Result};
use crate::fock::entropy::bipartite_entropy_dense;

/// Basis label `|n_b⟩_B |n_a1, n_a2⟩_A |n_c⟩_C` with its amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GhzTerm {
    pub n_b: u32,
    pub n_a1: u32,
    pub n_a2: u32,
    pub n_c: u32,
    pub amplitude: f64,
}

/// Pure three-party state with A holding two modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GhzState {
    pub terms: Vec<GhzTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GhzOutcome {
    pub j: u32,
    pub state: GhzState,
    pub probability: f64,
    pub entropy_b: f64,
    pub entropy_c: f64,
    pub entropy_a: f64,
    /// Largest `| |amplitude|² − 1/(j+1) |`.
    pub deviation: f64,
}

/// Normalized amplitudes `√(1−λ²) λ^n` of one pair, truncated at `cutoff`.
fn pair_amplitudes(s: &SqueezeSpec, cutoff: u32) -> Vec<f64> {
    let l = s.lambda();
    let raw: Vec<f64> = (0..=cutoff).map(|n| l.powi(n as i32)).collect();
    let norm = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
    raw.into_iter().map(|a| a / norm).collect()
}

fn entropy_by<F, G>(terms: &[GhzTerm], left: F, right: G) -> Result<f64>
where
    F: Fn(&GhzTerm) -> (u32, u32),
    G: Fn(&GhzTerm) -> (u32, u32),
{
    let mut lkeys: Vec<(u32, u32)> = terms.iter().map(&left).collect();
    lkeys.sort_unstable();
    lkeys.dedup();
    let mut rkeys: Vec<(u32, u32)> = terms.iter().map(&right).collect();
    rkeys.sort_unstable();
    rkeys.dedup();
    let entries: Vec<(usize, usize, Complex64)> = terms
        .iter()
        .map(|t| {
            (
                lkeys.binary_search(&left(t)).unwrap(),
                rkeys.binary_search(&right(t)).unwrap(),
                Complex64::new(t.amplitude, 0.0),
            )
        })
        .collect();
    bipartite_entropy_dense(&entries, lkeys.len())
}

/// Two pairs (B,A₁) and (A₂,C); A measures `n_A1 + n_A2` and obtains `j`.
/// `cutoffs` truncate the photon number of each pair.
pub fn ghz_prepare(s1: &SqueezeSpec, s2: &SqueezeSpec, j: u32, cutoffs: (u32, u32)) -> Result<GhzOutcome> {
    let (c1, c2) = cutoffs;
    if j > c1 + c2 {
        return Err(Error::EmptyProjection);
    }
    if j > c1.min(c2) {
        return Err(Error::CutoffTooSmall {
            cutoff: c1.min(c2),
            j,
        });
    }
    let a1 = pair_amplitudes(s1, c1);
    let a2 = pair_amplitudes(s2, c2);
    let raw: Vec<GhzTerm> = (0..=j)
        .map(|n| GhzTerm {
            n_b: n,
            n_a1: n,
            n_a2: j - n,
            n_c: j - n,
            amplitude: a1[n as usize] * a2[(j - n) as usize],
        })
        .filter(|t| t.amplitude.abs() >= crate::fock::DEFAULT_PRUNE)
        .collect();
    let probability: f64 = raw.iter().map(|t| t.amplitude * t.amplitude).sum();
    if raw.is_empty() || probability == 0.0 {
        return Err(Error::EmptyProjection);
    }
    let norm = probability.sqrt();
    let terms: Vec<GhzTerm> = raw
        .into_iter()
        .map(|t| GhzTerm {
            amplitude: t.amplitude / norm,
            ..t
        })
        .collect();
    let uniform = 1.0 / f64::from(j + 1);
    let mut deviation = terms
        .iter()
        .map(|t| (t.amplitude * t.amplitude - uniform).abs())
        .fold(0.0, f64::max);
    if terms.len() < (j + 1) as usize {
        deviation = deviation.max(uniform);
    }
    let entropy_b = entropy_by(&terms, |t| (t.n_b, 0), |t| ((t.n_a1 << 16) | t.n_a2, t.n_c))?;
    let entropy_c = entropy_by(&terms, |t| (t.n_c, 0), |t| ((t.n_a1 << 16) | t.n_a2, t.n_b))?;
    let entropy_a = entropy_by(&terms, |t| (t.n_a1, t.n_a2), |t| (t.n_b, t.n_c))?;
    Ok(GhzOutcome {
        j,
        state: GhzState { terms },
        probability,
        entropy_b,
        entropy_c,
        entropy_a,
        deviation,
    })
}
