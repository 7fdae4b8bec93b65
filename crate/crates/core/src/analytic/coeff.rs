use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use statrs::function::gamma::ln_gamma;

/// Largest `j + m` for which the count is evaluated exactly.
pub const EXACT_LIMIT: u64 = 64;

/// Number of occupation tuples of `m` modes summing to `j`, i.e.
/// `(j + m - 1)! / (j! (m - 1)!)`, exactly.
pub fn multiset_coeff_exact(j: u32, m: u32) -> BigUint {
    assert!(m >= 1, "mode count must be positive");
    // C(n, r) with r = min(j, m - 1); every partial product is itself a
    // binomial coefficient, so the division is exact.
    let n = u64::from(j) + u64::from(m) - 1;
    let r = u64::from(j.min(m - 1));
    let mut acc = BigUint::one();
    for k in 1..=r {
        acc *= n - r + k;
        acc /= k;
    }
    acc
}

/// Natural log of the multiset count. Exact below [`EXACT_LIMIT`], log-gamma
/// above it.
pub fn ln_multiset_coeff(j: u32, m: u32) -> f64 {
    assert!(m >= 1, "mode count must be positive");
    if j == 0 || m == 1 {
        return 0.0;
    }
    if u64::from(j) + u64::from(m) <= EXACT_LIMIT {
        multiset_coeff_exact(j, m)
            .to_f64()
            .expect("count below 2^64 fits in f64")
            .ln()
    } else {
        let (j, m) = (f64::from(j), f64::from(m));
        ln_gamma(j + m) - ln_gamma(j + 1.0) - ln_gamma(m)
    }
}

pub fn log2_multiset_coeff(j: u32, m: u32) -> f64 {
    ln_multiset_coeff(j, m) / std::f64::consts::LN_2
}

/// Exact value with its base-2 logarithm, as reported in tables.
#[derive(Debug, Clone, PartialEq)]
pub struct MultisetCoeff {
    pub exact: BigUint,
    pub log2: f64,
}

pub fn multiset_coeff(j: u32, m: u32) -> MultisetCoeff {
    MultisetCoeff {
        exact: multiset_coeff_exact(j, m),
        log2: log2_multiset_coeff(j, m),
    }
}
