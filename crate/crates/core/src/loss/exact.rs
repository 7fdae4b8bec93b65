use std::collections::BTreeSet;

use statrs::function::factorial::ln_binomial;

use super::params::LossParams;
use crate::error::{Error, Result};
use crate::fock::{compositions, DensityOperator, Occupation, PairKey, Side, SparseKet, DENSE_LIMIT};

/// Input sectors whose contribution to an output sector carries less mass
/// than this are skipped.
pub const SECTOR_SKIP: f64 = 1e-22;

/// Kraus operator for losing exactly `k` photons from one mode with
/// transmissivity `t`: `|n⟩ ↦ √C(n,k) t^{(n−k)/2} (1−t)^{k/2} |n−k⟩`.
pub fn apply_kraus(ket: &SparseKet, side: Side, mode: usize, k: u32, t: f64) -> SparseKet {
    if k == 0 && t == 1.0 {
        return ket.clone();
    }
    let terms = ket.terms().filter_map(|(key, amp)| {
        let n = key.side(side).get(mode);
        let lowered = key.side(side).lowered(mode, k)?;
        let ln_factor = 0.5
            * (ln_binomial(u64::from(n), u64::from(k))
                + f64::from(n - k) * t.ln()
                + f64::from(k) * (1.0 - t).ln());
        let factor = if k == 0 {
            t.powf(0.5 * f64::from(n))
        } else if t == 0.0 && n == k {
            1.0
        } else {
            ln_factor.exp()
        };
        let new_key = match side {
            Side::A => PairKey::new(lowered, key.b.clone()),
            Side::B => PairKey::new(key.a.clone(), lowered),
        };
        Some((new_key, amp * factor))
    });
    SparseKet::from_terms(ket.modes(), terms)
}

fn apply_pattern(ket: &SparseKet, side: Side, pattern: &Occupation, t: f64) -> SparseKet {
    let mut out = ket.clone();
    for (mode, &k) in pattern.counts().iter().enumerate() {
        if out.is_zero() {
            break;
        }
        out = apply_kraus(&out, side, mode, k, t);
    }
    out
}

fn check_reachable_dim(ket: &SparseKet) -> Result<()> {
    fn below(occ: &Occupation) -> Vec<Occupation> {
        let mut out = vec![Vec::new()];
        for &c in occ.counts() {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u32>| {
                    (0..=c).map(move |x| {
                        let mut v = prefix.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(Occupation::new).collect()
    }
    let mut seen: BTreeSet<PairKey> = BTreeSet::new();
    for (key, _) in ket.terms() {
        let bs = below(&key.b);
        for a in below(&key.a) {
            for b in &bs {
                seen.insert(PairKey::new(a.clone(), b.clone()));
            }
            if seen.len() > DENSE_LIMIT {
                return Err(Error::DimensionTooLarge {
                    dim: seen.len(),
                    limit: DENSE_LIMIT,
                });
            }
        }
    }
    Ok(())
}

/// Every mode through an amplitude-damping channel with transmissivity
/// `e^{−η τ}` of its side. Exact solution of the loss master equation.
pub fn exact_loss_channel(ket0: &SparseKet, loss: &LossParams) -> Result<DensityOperator> {
    check_reachable_dim(ket0)?;
    let modes = ket0.modes();
    let mut branches = vec![ket0.clone()];
    for side in [Side::A, Side::B] {
        let t = loss.transmissivity(side);
        for mode in 0..modes {
            let mut next = Vec::new();
            for b in &branches {
                let top = b.terms().map(|(k, _)| k.side(side).get(mode)).max().unwrap_or(0);
                for k in 0..=top {
                    let out = apply_kraus(b, side, mode, k, t);
                    if !out.is_zero() {
                        next.push(out);
                    }
                }
            }
            branches = next;
        }
    }
    DensityOperator::from_mixture(modes, branches.iter().map(|b| (1.0, b)))
}

/// Block of the exact output on the sector `N_A = j_a`, `N_B = j_b`, left
/// unnormalized: its trace is the probability of that joint outcome.
///
/// Each loss pattern maps exactly one input sector onto the output sector, so
/// the block is a sum over patterns without cross terms between input sectors.
pub fn exact_loss_sector(ket0: &SparseKet, loss: &LossParams, j_a: u32, j_b: u32) -> Result<DensityOperator> {
    let modes = ket0.modes();
    let t_a = loss.transmissivity(Side::A);
    let t_b = loss.transmissivity(Side::B);
    let mut sectors: BTreeSet<(u32, u32)> = BTreeSet::new();
    for (key, _) in ket0.terms() {
        let s = (key.a.total(), key.b.total());
        if s.0 >= j_a && s.1 >= j_b {
            sectors.insert(s);
        }
    }
    let ln_survive = |n: u32, j: u32, t: f64| -> f64 {
        let k = n - j;
        if k == 0 {
            f64::from(n) * t.ln()
        } else {
            ln_binomial(u64::from(n), u64::from(k)) + f64::from(j) * t.ln() + f64::from(k) * (1.0 - t).ln()
        }
    };
    let mut parts = Vec::new();
    for (na, nb) in sectors {
        let psi = crate::fock::project_sector(ket0, na, nb);
        let mass = psi.norm_sqr() * (ln_survive(na, j_a, t_a) + ln_survive(nb, j_b, t_b)).exp();
        if !(mass > SECTOR_SKIP) {
            continue;
        }
        let pats_a = compositions(na - j_a, modes);
        let pats_b = compositions(nb - j_b, modes);
        for pa in &pats_a {
            let after_a = apply_pattern(&psi, Side::A, pa, t_a);
            if after_a.is_zero() {
                continue;
            }
            for pb in &pats_b {
                let phi = apply_pattern(&after_a, Side::B, pb, t_b);
                if !phi.is_zero() {
                    parts.push(phi);
                }
            }
        }
    }
    if parts.is_empty() {
        return Ok(DensityOperator::empty(modes));
    }
    DensityOperator::from_mixture(modes, parts.iter().map(|p| (1.0, p)))
}
