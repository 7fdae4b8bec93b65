use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ket::SparseKet;
use crate::error::{Error, Result};

/// Largest reduced-operator dimension handed to the dense eigensolver.
pub const DENSE_LIMIT: usize = 4096;

const NORMALIZED_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyUnit {
    #[default]
    Bits,
    Nats,
}

impl EntropyUnit {
    pub fn from_bits(self, bits: f64) -> f64 {
        match self {
            EntropyUnit::Bits => bits,
            EntropyUnit::Nats => bits * std::f64::consts::LN_2,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            EntropyUnit::Bits => "bits",
            EntropyUnit::Nats => "nats",
        }
    }
}

/// Shannon entropy in bits of a probability vector; zero and negative
/// entries (eigensolver round-off) contribute nothing.
pub fn shannon_bits<I: IntoIterator<Item = f64>>(probs: I) -> f64 {
    let h: f64 = probs
        .into_iter()
        .filter(|&q| q > 0.0)
        .map(|q| -q * q.log2())
        .sum();
    // -0.0 from a single unit weight
    h.max(0.0)
}

/// Entanglement entropy of a normalized ket whose terms already form a Schmidt
/// basis: the Shannon entropy of the squared amplitudes.
pub fn schmidt_entropy(ket: &SparseKet) -> Result<f64> {
    let n2 = ket.norm_sqr();
    if ket.is_zero() || (n2 - 1.0).abs() > NORMALIZED_TOL {
        return Err(Error::NotNormalized(n2));
    }
    if !ket.is_schmidt_form() {
        return Err(Error::NotSchmidtForm);
    }
    Ok(shannon_bits(ket.terms().map(|(_, a)| a.norm_sqr() / n2)))
}

/// Entanglement entropy from the eigenvalues of the dense A-side reduced
/// density operator. Independent of any pairing structure in the terms.
pub fn reduced_entropy_dense(ket: &SparseKet) -> Result<f64> {
    if ket.is_zero() {
        return Err(Error::NotNormalized(0.0));
    }
    let mut left = HashMap::new();
    let mut right = HashMap::new();
    let mut entries = Vec::with_capacity(ket.len());
    for (key, amp) in ket.terms() {
        let next = left.len();
        let l = *left.entry(&key.a).or_insert(next);
        let next = right.len();
        let r = *right.entry(&key.b).or_insert(next);
        entries.push((l, r, *amp));
    }
    bipartite_entropy_dense(&entries, left.len())
}

/// Entropy of the left factor for a pure state given as `(left, right, amp)`
/// coordinates. Left indices must be below `dim_left`.
pub fn bipartite_entropy_dense(entries: &[(usize, usize, Complex64)], dim_left: usize) -> Result<f64> {
    let rho = reduced_left(entries, dim_left)?;
    let trace: f64 = (0..dim_left).map(|i| rho[(i, i)].re).sum();
    if !(trace > 0.0) {
        return Err(Error::NotNormalized(trace));
    }
    let eig = rho.symmetric_eigenvalues();
    Ok(shannon_bits(eig.iter().map(|&q| q / trace)))
}

fn reduced_left(entries: &[(usize, usize, Complex64)], dim_left: usize) -> Result<DMatrix<Complex64>> {
    if dim_left > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge {
            dim: dim_left,
            limit: DENSE_LIMIT,
        });
    }
    let mut columns: HashMap<usize, Vec<(usize, Complex64)>> = HashMap::new();
    for &(l, r, a) in entries {
        columns.entry(r).or_default().push((l, a));
    }
    let mut rho = DMatrix::<Complex64>::zeros(dim_left, dim_left);
    // ρ_A = Σ_b |v_b⟩⟨v_b| with v_b the column of amplitudes at right index b
    let mut keys: Vec<_> = columns.keys().copied().collect();
    keys.sort_unstable();
    for r in keys {
        let col = &columns[&r];
        for &(i, ai) in col {
            for &(k, ak) in col {
                rho[(i, k)] += ai * ak.conj();
            }
        }
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ket::PairKey;
    use crate::fock::occupation::Occupation;

    fn ket(terms: &[(&[u32], &[u32], f64)]) -> SparseKet {
        SparseKet::from_terms(
            terms[0].0.len(),
            terms.iter().map(|(a, b, amp)| {
                (
                    PairKey::new(Occupation::new(a.to_vec()), Occupation::new(b.to_vec())),
                    Complex64::new(*amp, 0.0),
                )
            }),
        )
        .normalize()
    }

    #[test]
    fn product_state_has_zero_entropy() {
        let k = ket(&[(&[2], &[2], 1.0)]);
        assert_eq!(schmidt_entropy(&k).unwrap(), 0.0);
        assert!(reduced_entropy_dense(&k).unwrap().abs() < 1e-12);
    }

    #[test]
    fn bell_like_state_has_one_bit() {
        let k = ket(&[(&[0], &[0], 1.0), (&[1], &[1], 1.0)]);
        assert!((schmidt_entropy(&k).unwrap() - 1.0).abs() < 1e-12);
        assert!((reduced_entropy_dense(&k).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_term_state_matches_direct_sum() {
        // 0.6² + 0.64² + 0.48² = 1
        let k = ket(&[(&[0], &[0], 0.6), (&[1], &[1], 0.64), (&[2], &[2], 0.48)]);
        let q = [0.36, 0.4096, 0.2304];
        let direct: f64 = q.iter().map(|q: &f64| -q * q.log2()).sum();
        assert!((schmidt_entropy(&k).unwrap() - direct).abs() < 1e-12);
        assert!((reduced_entropy_dense(&k).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn non_schmidt_state_is_rejected_but_dense_works() {
        // (|0⟩ + |1⟩)_A ⊗ |0⟩_B / √2 is a product state
        let k = ket(&[(&[0], &[0], 1.0), (&[1], &[0], 1.0)]);
        assert_eq!(schmidt_entropy(&k), Err(Error::NotSchmidtForm));
        assert!(reduced_entropy_dense(&k).unwrap().abs() < 1e-12);
    }

    #[test]
    fn unnormalized_is_rejected() {
        let k = SparseKet::from_terms(
            1,
            [(
                PairKey::new(Occupation::new(vec![0]), Occupation::new(vec![0])),
                Complex64::new(0.5, 0.0),
            )],
        );
        assert!(matches!(schmidt_entropy(&k), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn dense_guard() {
        let entries: Vec<_> = (0..DENSE_LIMIT + 1)
            .map(|i| (i, i, Complex64::new(1.0, 0.0)))
            .collect();
        assert!(matches!(
            bipartite_entropy_dense(&entries, DENSE_LIMIT + 1),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn nats_conversion() {
        assert!((EntropyUnit::Nats.from_bits(1.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(EntropyUnit::Bits.from_bits(1.5), 1.5);
    }
}
