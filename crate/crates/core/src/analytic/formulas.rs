//! Closed-form protocol quantities. Products of small factors are formed in
//! log-space and exponentiated only when returned.

use serde::Serialize;

use super::coeff::{ln_multiset_coeff, log2_multiset_coeff};
use super::squeeze::SqueezeSpec;
use crate::error::{Error, Result};
use crate::loss::LossParams;

/// Default threshold standing in for "much smaller than one".
pub const DEFAULT_SMALLNESS: f64 = 0.01;

fn xlog2x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Entanglement entropy (bits) of one two-mode squeezed pair:
/// `cosh² r log₂ cosh² r − sinh² r log₂ sinh² r`.
pub fn pure_entanglement(s: &SqueezeSpec) -> f64 {
    xlog2x(s.cosh2()) - xlog2x(s.sinh2())
}

/// ln of `(1 − λ²)^m λ^{2j} f_j^(m)`.
pub fn ln_outcome_prob(j: u32, m: u32, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if j == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let l2 = lambda * lambda;
    f64::from(m) * (-l2).ln_1p() + 2.0 * f64::from(j) * lambda.ln() + ln_multiset_coeff(j, m)
}

/// Probability that a total-number measurement on m pairs returns `j`.
pub fn outcome_prob(j: u32, m: u32, s: &SqueezeSpec) -> f64 {
    ln_outcome_prob(j, m, s.lambda()).exp()
}

/// Entanglement (bits) of the outcome state for result `j`: `log₂ f_j^(m)`.
pub fn outcome_entanglement(j: u32, m: u32) -> f64 {
    log2_multiset_coeff(j, m)
}

/// Ratio of the outcome entanglement to that of a single input pair.
pub fn gain_ratio(j: u32, m: u32, s: &SqueezeSpec) -> Result<f64> {
    if s.r() == 0.0 {
        return Err(Error::ZeroSqueezing);
    }
    Ok(outcome_entanglement(j, m) / pure_entanglement(s))
}

/// Outcome probability after transmission loss, `p_j e^{−(η_A+η_B)τ j}`.
pub fn lossy_outcome_prob(j: u32, m: u32, s: &SqueezeSpec, loss: &LossParams) -> f64 {
    let damping = (loss.eta_a() + loss.eta_b()) * loss.tau() * f64::from(j);
    (ln_outcome_prob(j, m, s.lambda()) - damping).exp()
}

/// A scaling figure together with its "much smaller than one" predicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityFigure {
    pub value: f64,
    pub threshold: f64,
    pub valid: bool,
}

impl ValidityFigure {
    pub fn new(value: f64, threshold: f64) -> Self {
        ValidityFigure {
            value,
            threshold,
            valid: value < threshold,
        }
    }
}

/// Weight of the double-jump events the two-sided filter cannot reject:
/// `m² n̄² η_A η_B τ²`.
pub fn double_jump_bound(m: u32, s: &SqueezeSpec, loss: &LossParams, threshold: f64) -> ValidityFigure {
    let m = f64::from(m);
    let value = m * m * s.n_bar().powi(2) * loss.eta_a() * loss.eta_b() * loss.tau().powi(2);
    ValidityFigure::new(value, threshold)
}

/// Working condition of the asymmetric configuration, `n̄ η_A τ`. Independent
/// of the transmission-side rate.
pub fn asymmetric_bound(s: &SqueezeSpec, eta_a: f64, tau: f64, threshold: f64) -> ValidityFigure {
    ValidityFigure::new(s.n_bar() * eta_a * tau, threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YieldRow {
    pub m: u32,
    /// Expected outcome entanglement divided by m, in bits.
    pub per_pair_bits: f64,
}

/// Expected outcome entanglement per input pair, `Σ_j p_j log₂ f_j^(m) / m`.
pub fn expected_yield_per_pair(m: u32, s: &SqueezeSpec) -> f64 {
    assert!(m >= 1, "mode count must be positive");
    let lambda = s.lambda();
    if lambda == 0.0 || m == 1 {
        return 0.0;
    }
    let l2 = lambda * lambda;
    let mut acc = 0.0;
    let mut j = 0u32;
    loop {
        let term = ln_outcome_prob(j, m, lambda).exp() * outcome_entanglement(j, m);
        acc += term;
        let ratio = l2 * f64::from(j + m) / f64::from(j + 1);
        // log₂ f grows slower than any geometric factor, so once the
        // probability ratio is below one the remainder is bounded by a
        // geometric series in a slightly inflated ratio.
        let inflated = ratio * (1.0 + 1.0 / f64::from(j + 1));
        if j > 0 && inflated < 1.0 && term * inflated / (1.0 - inflated) < 1e-17 * acc.max(1e-300) {
            break;
        }
        j += 1;
    }
    acc / f64::from(m)
}

pub fn asymptotic_yield(m_list: &[u32], s: &SqueezeSpec) -> Vec<YieldRow> {
    m_list
        .iter()
        .map(|&m| YieldRow {
            m,
            per_pair_bits: expected_yield_per_pair(m, s),
        })
        .collect()
}

/// Local dimension of the GHZ-like state produced by outcome `j`.
pub fn ghz_dimension(j: u32) -> u32 {
    j + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(l: f64) -> SqueezeSpec {
        SqueezeSpec::from_lambda(l).unwrap()
    }

    #[test]
    fn pure_entanglement_values() {
        assert_eq!(pure_entanglement(&SqueezeSpec::from_r(0.0).unwrap()), 0.0);
        let expected = (4.0 / 3.0) * (4.0f64 / 3.0).log2() - (1.0 / 3.0) * (1.0f64 / 3.0).log2();
        assert!((pure_entanglement(&lam(0.5)) - expected).abs() < 1e-14);
        assert!((expected - 1.0817).abs() < 1e-4);
        let e1 = pure_entanglement(&SqueezeSpec::from_r(1.0).unwrap());
        assert!((e1 - 2.337).abs() < 1e-3, "{e1}");
    }

    #[test]
    fn outcome_probabilities() {
        assert!((outcome_prob(0, 2, &lam(0.5)) - 0.5625).abs() < 1e-15);
        assert!((outcome_prob(1, 2, &lam(0.5)) - 0.28125).abs() < 1e-15);
        assert_eq!(outcome_prob(3, 2, &lam(0.0)), 0.0);
        assert_eq!(outcome_prob(0, 2, &lam(0.0)), 1.0);
        let total: f64 = (0..=200).map(|j| outcome_prob(j, 3, &lam(0.8))).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn negative_binomial_mean() {
        for &(l, m) in &[(0.3, 1u32), (0.5, 2), (0.8, 4)] {
            let s = lam(l);
            let mean: f64 = (0..2000).map(|j| f64::from(j) * outcome_prob(j, m, &s)).sum();
            let expected = f64::from(m) * l * l / (1.0 - l * l);
            assert!((mean - expected).abs() < 1e-8, "{l} {m}: {mean}");
        }
    }

    #[test]
    fn gain_ratio_values() {
        let s = lam(0.5);
        assert_eq!(gain_ratio(0, 2, &s).unwrap(), 0.0);
        let g2 = gain_ratio(2, 2, &s).unwrap();
        assert!((g2 - 3f64.log2() / pure_entanglement(&s)).abs() < 1e-15);
        assert!((g2 - 1.465).abs() < 1e-3);
        assert_eq!(
            gain_ratio(1, 2, &SqueezeSpec::from_r(0.0).unwrap()),
            Err(Error::ZeroSqueezing)
        );
        let ratios: Vec<f64> = (0..30).map(|j| gain_ratio(j, 3, &s).unwrap()).collect();
        assert!(ratios.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn lossy_probability() {
        let s = lam(0.5);
        let none = LossParams::new(0.05, 0.05, 0.0).unwrap();
        assert_eq!(lossy_outcome_prob(3, 2, &s, &none), outcome_prob(3, 2, &s));
        let loss = LossParams::new(0.05, 0.05, 1.0).unwrap();
        let p = lossy_outcome_prob(1, 2, &s, &loss);
        assert!((p - 0.28125 * (-0.1f64).exp()).abs() < 1e-15);
        assert!((p - 0.25449).abs() < 1e-5);
    }

    #[test]
    fn bounds() {
        let s = SqueezeSpec::from_r(1.0).unwrap();
        let loss = LossParams::new(0.01, 0.01, 1.0).unwrap();
        let d = double_jump_bound(2, &s, &loss, DEFAULT_SMALLNESS);
        assert!((d.value - 4.0 * s.n_bar().powi(2) * 1e-4).abs() < 1e-18);
        assert!((d.value - 7.63e-4).abs() < 1e-6);
        assert!(d.valid);
        let zero = LossParams::new(0.0, 0.01, 1.0).unwrap();
        assert_eq!(double_jump_bound(2, &s, &zero, DEFAULT_SMALLNESS).value, 0.0);

        let a = asymmetric_bound(&s, 1e-3, 1.0, DEFAULT_SMALLNESS);
        assert!((a.value - 1.3811e-3).abs() < 1e-7);
        assert_eq!(asymmetric_bound(&s, 0.0, 1.0, DEFAULT_SMALLNESS).value, 0.0);
        assert!(!asymmetric_bound(&s, 0.1, 1.0, DEFAULT_SMALLNESS).valid);
    }

    #[test]
    fn yield_single_pair_is_zero() {
        assert_eq!(expected_yield_per_pair(1, &lam(0.5)), 0.0);
    }

    #[test]
    fn yield_matches_brute_sum() {
        let s = lam(0.5);
        let brute: f64 = (0..400)
            .map(|j| outcome_prob(j, 3, &s) * outcome_entanglement(j, 3))
            .sum::<f64>()
            / 3.0;
        assert!((expected_yield_per_pair(3, &s) - brute).abs() < 1e-14);
    }

    #[test]
    fn ghz_dimensions() {
        assert_eq!(ghz_dimension(0), 1);
        assert_eq!(ghz_dimension(1), 2);
        assert_eq!(ghz_dimension(3), 4);
    }
}
