//! Elementary linear maps on [`SparseKet`]: state preparation, ladder
//! operators, diagonal damping and total-number projections.

use num_complex::Complex64;

use super::ket::{PairKey, SparseKet, DEFAULT_PRUNE};
use super::occupation::compositions;
use super::Side;
use crate::analytic::coeff::multiset_coeff_exact;
use crate::analytic::formulas::ln_outcome_prob;
use crate::error::{Error, Result};
use num_traits::ToPrimitive;

/// Upper bound on the number of stored terms a TMSS construction may produce.
pub const MAX_TMSS_TERMS: usize = 2_000_000;

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && (0.0..1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidLambda(lambda))
    }
}

/// Natural log of the probability mass in sectors `j > j_max`.
///
/// Terms are accumulated with a running log-sum-exp and the loop stops once
/// the geometric bound on the remainder falls below 1e-18 of the total.
pub fn ln_tail_mass(lambda: f64, m: u32, j_max: u32) -> f64 {
    assert!(m >= 1, "mode count must be positive");
    assert!(
        lambda.is_finite() && (0.0..1.0).contains(&lambda),
        "lambda must be in [0, 1)"
    );
    if lambda == 0.0 {
        return f64::NEG_INFINITY;
    }
    let l2 = lambda * lambda;
    let mut acc = f64::NEG_INFINITY;
    let mut j = j_max + 1;
    loop {
        let lp = ln_outcome_prob(j, m, lambda);
        acc = log_add(acc, lp);
        // ratio of consecutive terms; bounds the remainder once it drops below 1
        let ratio = l2 * f64::from(j + m) / f64::from(j + 1);
        if ratio < 1.0 {
            let remainder = lp + (ratio / (1.0 - ratio)).ln();
            if remainder < acc + (1e-18f64).ln() {
                return acc;
            }
        }
        if lp == f64::NEG_INFINITY && ratio < 1.0 {
            return acc;
        }
        j += 1;
    }
}

/// Probability mass discarded by truncating at total photon number `j_max`.
pub fn tail_mass(lambda: f64, m: u32, j_max: u32) -> f64 {
    ln_tail_mass(lambda, m, j_max).exp()
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Smallest cutoff whose discarded tail is at most `tail_tol`.
pub fn required_j_max(lambda: f64, m: u32, tail_tol: f64) -> Result<u32> {
    check_lambda(lambda)?;
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tail tolerance must be positive, got {tail_tol}"
        )));
    }
    if lambda == 0.0 {
        return Ok(0);
    }
    let ln_tol = tail_tol.ln();
    let mut hi = 1u32;
    while ln_tail_mass(lambda, m, hi) > ln_tol {
        hi = hi.checked_mul(2).ok_or_else(|| {
            Error::InvalidParameter("tail tolerance unreachable".to_string())
        })?;
    }
    let mut lo = 0u32;
    if ln_tail_mass(lambda, m, lo) <= ln_tol {
        return Ok(0);
    }
    // invariant: tail(lo) > tol >= tail(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ln_tail_mass(lambda, m, mid) <= ln_tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// m copies of the two-mode squeezed vacuum with squeezing `lambda = tanh r`,
/// truncated at total photon number `j_max` and renormalized.
///
/// Every matched tuple pair `(t, t)` with `|t| = j` carries amplitude
/// `(1 - λ²)^{m/2} λ^j` before renormalization.
pub fn make_tmss_pairs(lambda: f64, m: u32, j_max: u32, tail_tol: f64) -> Result<SparseKet> {
    check_lambda(lambda)?;
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".to_string()));
    }
    if tail_mass(lambda, m, j_max) > tail_tol {
        return Err(Error::TailTooHeavy {
            required_j_max: required_j_max(lambda, m, tail_tol)?,
        });
    }
    let j_top = if lambda == 0.0 { 0 } else { j_max };
    // Σ_{j<=j_top} f_j^(m) = f_{j_top}^(m+1)
    let count = multiset_coeff_exact(j_top, m + 1)
        .to_usize()
        .unwrap_or(usize::MAX);
    if count > MAX_TMSS_TERMS {
        return Err(Error::DimensionTooLarge {
            dim: count,
            limit: MAX_TMSS_TERMS,
        });
    }
    let half_ln_norm = 0.5 * f64::from(m) * (-lambda * lambda).ln_1p();
    let modes = m as usize;
    let mut terms = Vec::with_capacity(count);
    for j in 0..=j_top {
        let amp = if j == 0 {
            half_ln_norm.exp()
        } else {
            (half_ln_norm + f64::from(j) * lambda.ln()).exp()
        };
        for t in compositions(j, modes) {
            terms.push((PairKey::new(t.clone(), t), Complex64::new(amp, 0.0)));
        }
    }
    Ok(SparseKet::from_terms(modes, terms).normalize())
}

/// [`make_tmss_pairs`] with the cutoff chosen as the smallest one meeting `tail_tol`.
pub fn make_tmss_auto(lambda: f64, m: u32, tail_tol: f64) -> Result<SparseKet> {
    let j_max = required_j_max(lambda, m, tail_tol)?;
    make_tmss_pairs(lambda, m, j_max, tail_tol)
}

/// Applies the annihilation operator of one mode. The result is unnormalized;
/// terms without a quantum in that mode vanish.
pub fn apply_annihilation(ket: &SparseKet, side: Side, mode: usize) -> SparseKet {
    assert!(mode < ket.modes(), "mode {mode} out of range");
    let terms = ket.terms().filter_map(|(key, amp)| {
        let n = key.side(side).get(mode);
        if n == 0 {
            return None;
        }
        let lowered = key.side(side).lowered(mode, 1)?;
        let new_key = match side {
            Side::A => PairKey::new(lowered, key.b.clone()),
            Side::B => PairKey::new(key.a.clone(), lowered),
        };
        Some((new_key, amp * f64::from(n).sqrt()))
    });
    SparseKet::from_terms(ket.modes(), terms)
}

/// Multiplies each term by `exp(-(kappa_a N_A + kappa_b N_B))`, the action of
/// the non-Hermitian no-jump propagator with `kappa = eta tau / 2`.
pub fn apply_number_damping(ket: &SparseKet, kappa_a: f64, kappa_b: f64) -> SparseKet {
    assert!(
        kappa_a.is_finite() && kappa_a >= 0.0 && kappa_b.is_finite() && kappa_b >= 0.0,
        "damping exponents must be finite and non-negative"
    );
    if kappa_a == 0.0 && kappa_b == 0.0 {
        return ket.clone();
    }
    let terms = ket.terms().map(|(key, amp)| {
        let exponent = kappa_a * f64::from(key.a.total()) + kappa_b * f64::from(key.b.total());
        (key.clone(), amp * (-exponent).exp())
    });
    let mut out = SparseKet::from_terms(ket.modes(), terms);
    out.prune(DEFAULT_PRUNE);
    out
}

/// Projects onto total photon number `j` on one side.
///
/// Returns the renormalized image and its probability relative to the input's
/// squared norm. An empty image yields the zero ket with probability 0.
pub fn project_total_number(ket: &SparseKet, side: Side, j: u32) -> (SparseKet, f64) {
    let input = ket.norm_sqr();
    let kept = SparseKet::from_terms(
        ket.modes(),
        ket.terms()
            .filter(|(key, _)| key.side(side).total() == j)
            .map(|(k, a)| (k.clone(), *a)),
    );
    let mass = kept.norm_sqr();
    if input == 0.0 || mass == 0.0 {
        return (SparseKet::zero(ket.modes()), 0.0);
    }
    (kept.normalize(), mass / input)
}

/// Unnormalized projection onto `N_A = j_a` and `N_B = j_b`.
pub fn project_sector(ket: &SparseKet, j_a: u32, j_b: u32) -> SparseKet {
    let mut out = SparseKet::from_terms(
        ket.modes(),
        ket.terms()
            .filter(|(key, _)| key.a.total() == j_a && key.b.total() == j_b)
            .map(|(k, a)| (k.clone(), *a)),
    );
    out.mark_unnormalized();
    out
}

/// The maximally entangled sector state: uniform amplitude over all matched
/// tuple pairs with total `j`.
pub fn maximal_sector_state(m: u32, j: u32) -> SparseKet {
    let tuples = compositions(j, m as usize);
    let amp = 1.0 / (tuples.len() as f64).sqrt();
    SparseKet::from_terms(
        m as usize,
        tuples
            .into_iter()
            .map(|t| (PairKey::new(t.clone(), t), Complex64::new(amp, 0.0))),
    )
    .normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::occupation::Occupation;

    fn single(a: u32, b: u32) -> SparseKet {
        SparseKet::from_terms(
            1,
            [(
                PairKey::new(Occupation::new(vec![a]), Occupation::new(vec![b])),
                Complex64::new(1.0, 0.0),
            )],
        )
        .normalize()
    }

    #[test]
    fn vacuum_at_zero_squeezing() {
        let ket = make_tmss_pairs(0.0, 3, 4, 1e-12).unwrap();
        assert_eq!(ket, SparseKet::vacuum(3));
    }

    #[test]
    fn invalid_lambda() {
        assert_eq!(
            make_tmss_pairs(1.0, 1, 4, 1e-12),
            Err(Error::InvalidLambda(1.0))
        );
        assert!(make_tmss_pairs(-0.1, 1, 4, 1e-12).is_err());
        assert!(make_tmss_pairs(f64::NAN, 1, 4, 1e-12).is_err());
    }

    #[test]
    fn tail_too_heavy_reports_cutoff() {
        let err = make_tmss_pairs(0.5, 1, 3, 1e-12).unwrap_err();
        // tail(j_max) = 0.25^(j_max+1) <= 1e-12  =>  j_max + 1 >= 19.93
        assert_eq!(err, Error::TailTooHeavy { required_j_max: 19 });
    }

    #[test]
    fn single_mode_tail_is_geometric() {
        for j_max in [0u32, 3, 10, 40] {
            let expected = 0.25f64.powi(j_max as i32 + 1);
            let got = tail_mass(0.5, 1, j_max);
            assert!((got / expected - 1.0).abs() < 1e-12, "{j_max}: {got}");
        }
        assert_eq!(tail_mass(0.0, 4, 0), 0.0);
    }

    #[test]
    fn term_count_is_hockey_stick_sum() {
        let ket = make_tmss_pairs(0.5, 2, 20, 1e-6).unwrap();
        assert_eq!(ket.len(), multiset_coeff_exact(20, 3).to_usize().unwrap());
    }

    #[test]
    fn annihilation_ladder() {
        let out = apply_annihilation(&single(2, 0), Side::A, 0);
        assert_eq!(out.len(), 1);
        let (k, a) = out.terms().next().unwrap();
        assert_eq!(k.a.get(0), 1);
        assert!((a.re - 2f64.sqrt()).abs() < 1e-15);
        assert!(!out.is_normalized());
        assert!(apply_annihilation(&SparseKet::vacuum(1), Side::B, 0).is_zero());
    }

    #[test]
    fn damping_identity_and_diagonal_action() {
        let ket = make_tmss_pairs(0.5, 2, 20, 1e-6).unwrap();
        assert_eq!(apply_number_damping(&ket, 0.0, 0.0), ket);
        let damped = apply_number_damping(&ket, 0.1, 0.1);
        for (k, a) in damped.terms() {
            let j = k.a.total();
            let ratio = a.re / ket.amplitude(k).re;
            assert!((ratio - (-0.2 * f64::from(j)).exp()).abs() < 1e-14);
        }
        let vac = PairKey::new(Occupation::vacuum(2), Occupation::vacuum(2));
        assert_eq!(damped.amplitude(&vac), ket.amplitude(&vac));
    }

    #[test]
    fn projection_of_zero_ket() {
        let (p, prob) = project_total_number(&SparseKet::zero(2), Side::A, 0);
        assert!(p.is_zero());
        assert_eq!(prob, 0.0);
    }

    #[test]
    fn projection_outside_support_is_empty() {
        let ket = make_tmss_pairs(0.5, 1, 5, 1e-3).unwrap();
        let (p, prob) = project_total_number(&ket, Side::A, 6);
        assert!(p.is_zero());
        assert_eq!(prob, 0.0);
    }

    #[test]
    fn maximal_state_is_uniform() {
        let s = maximal_sector_state(3, 2);
        assert_eq!(s.len(), 6);
        assert!(s.terms().all(|(_, a)| (a.norm_sqr() - 1.0 / 6.0).abs() < 1e-15));
    }
}
