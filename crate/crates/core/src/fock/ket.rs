use std::collections::{BTreeMap, HashSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::occupation::Occupation;
use super::Side;

/// Amplitudes with magnitude below this are dropped from the term map.
pub const DEFAULT_PRUNE: f64 = 1e-15;

/// Tolerance used when checking the normalized flag against the actual norm.
pub const NORM_TOL: f64 = 1e-12;

/// Basis label of one term: the A-side and B-side occupation tuples.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    pub a: Occupation,
    pub b: Occupation,
}

impl PairKey {
    pub fn new(a: Occupation, b: Occupation) -> Self {
        PairKey { a, b }
    }

    pub fn side(&self, side: Side) -> &Occupation {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }
}

/// Pure state of m mode pairs stored as a sparse map from basis labels to
/// amplitudes.
///
/// The empty map is the zero ket. It is a legal value, always carries
/// `normalized == false`, and propagates through every operation.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseKet {
    modes: usize,
    terms: BTreeMap<PairKey, Complex64>,
    normalized: bool,
}

impl SparseKet {
    pub fn zero(modes: usize) -> Self {
        assert!(modes >= 1, "at least one mode pair is required");
        SparseKet {
            modes,
            terms: BTreeMap::new(),
            normalized: false,
        }
    }

    pub fn vacuum(modes: usize) -> Self {
        let mut ket = SparseKet::zero(modes);
        ket.terms.insert(
            PairKey::new(Occupation::vacuum(modes), Occupation::vacuum(modes)),
            Complex64::new(1.0, 0.0),
        );
        ket.normalized = true;
        ket
    }

    /// Builds a ket from raw terms. Repeated keys are summed and amplitudes
    /// below [`DEFAULT_PRUNE`] are dropped. The result is not normalized.
    pub fn from_terms<I>(modes: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (PairKey, Complex64)>,
    {
        let mut ket = SparseKet::zero(modes);
        for (key, amp) in terms {
            assert_eq!(key.a.modes(), modes, "A-side tuple has wrong length");
            assert_eq!(key.b.modes(), modes, "B-side tuple has wrong length");
            *ket.terms.entry(key).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        ket.prune(DEFAULT_PRUNE);
        ket
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PairKey, &Complex64)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, key: &PairKey) -> Complex64 {
        self.terms
            .get(key)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, a| acc + a.norm_sqr())
    }

    /// Rescales to unit norm. The zero ket is returned unchanged.
    pub fn normalize(mut self) -> Self {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            self.normalized = false;
            return self;
        }
        let scale = 1.0 / n2.sqrt();
        for amp in self.terms.values_mut() {
            *amp *= scale;
        }
        self.prune(DEFAULT_PRUNE);
        self.normalized = !self.terms.is_empty();
        self
    }

    /// Drops amplitudes with magnitude below `threshold`. A normalized ket is
    /// renormalized afterwards; an unnormalized one is left as is.
    pub fn prune(&mut self, threshold: f64) {
        let before = self.terms.len();
        self.terms.retain(|_, a| a.norm() >= threshold);
        if self.terms.is_empty() {
            self.normalized = false;
        } else if self.normalized && self.terms.len() != before {
            let scale = 1.0 / self.norm_sqr().sqrt();
            for amp in self.terms.values_mut() {
                *amp *= scale;
            }
        }
    }

    pub(crate) fn mark_unnormalized(&mut self) {
        self.normalized = false;
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &SparseKet) -> Complex64 {
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (key, amp) in &small.terms {
            if let Some(b) = large.terms.get(key) {
                acc += if conj_small {
                    amp.conj() * b
                } else {
                    b.conj() * amp
                };
            }
        }
        acc
    }

    /// True when every A-side tuple appears in exactly one term and the same
    /// holds for B, i.e. the term basis is already a Schmidt basis.
    pub fn is_schmidt_form(&self) -> bool {
        let mut seen_a = HashSet::with_capacity(self.terms.len());
        let mut seen_b = HashSet::with_capacity(self.terms.len());
        self.terms
            .keys()
            .all(|k| seen_a.insert(&k.a) && seen_b.insert(&k.b))
    }

    /// Distinct total photon numbers on `side`, ascending.
    pub fn sector_totals(&self, side: Side) -> Vec<u32> {
        let mut totals: Vec<u32> = self.terms.keys().map(|k| k.side(side).total()).collect();
        totals.sort_unstable();
        totals.dedup();
        totals
    }

    /// Squared amplitude mass per total photon number on `side`.
    pub fn sector_masses(&self, side: Side) -> BTreeMap<u32, f64> {
        let mut masses = BTreeMap::new();
        for (k, a) in &self.terms {
            *masses.entry(k.side(side).total()).or_insert(0.0) += a.norm_sqr();
        }
        masses
    }

    pub fn to_records(&self) -> Vec<KetRecord> {
        self.terms
            .iter()
            .map(|(k, a)| KetRecord {
                occ_a: k.a.counts().to_vec(),
                occ_b: k.b.counts().to_vec(),
                re: a.re,
                im: a.im,
            })
            .collect()
    }

    /// Rebuilds a ket from debug records. The mode count is taken from the
    /// first record; `None` if records disagree on it or the list is empty.
    pub fn from_records(records: &[KetRecord]) -> Option<SparseKet> {
        let modes = records.first()?.occ_a.len();
        if modes == 0
            || records
                .iter()
                .any(|r| r.occ_a.len() != modes || r.occ_b.len() != modes)
        {
            return None;
        }
        let ket = SparseKet::from_terms(
            modes,
            records.iter().map(|r| {
                (
                    PairKey::new(
                        Occupation::new(r.occ_a.clone()),
                        Occupation::new(r.occ_b.clone()),
                    ),
                    Complex64::new(r.re, r.im),
                )
            }),
        );
        let normalized = (ket.norm_sqr() - 1.0).abs() <= NORM_TOL;
        Some(SparseKet { normalized, ..ket })
    }
}

/// One term of the JSON debug dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KetRecord {
    pub occ_a: Vec<u32>,
    pub occ_b: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

impl Serialize for SparseKet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_records().serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(a: &[u32], b: &[u32]) -> PairKey {
        PairKey::new(Occupation::new(a.to_vec()), Occupation::new(b.to_vec()))
    }

    #[test]
    fn zero_ket_is_not_normalized() {
        let z = SparseKet::zero(2).normalize();
        assert!(z.is_zero());
        assert!(!z.is_normalized());
    }

    #[test]
    fn from_terms_sums_duplicates_and_prunes() {
        let ket = SparseKet::from_terms(
            1,
            vec![
                (key(&[1], &[1]), Complex64::new(0.5, 0.0)),
                (key(&[1], &[1]), Complex64::new(0.5, 0.0)),
                (key(&[0], &[0]), Complex64::new(1e-17, 0.0)),
            ],
        );
        assert_eq!(ket.len(), 1);
        assert_eq!(ket.amplitude(&key(&[1], &[1])), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn schmidt_form_detection() {
        let paired = SparseKet::from_terms(
            1,
            vec![
                (key(&[0], &[0]), Complex64::new(0.6, 0.0)),
                (key(&[1], &[1]), Complex64::new(0.8, 0.0)),
            ],
        );
        assert!(paired.is_schmidt_form());
        let product = SparseKet::from_terms(
            1,
            vec![
                (key(&[0], &[0]), Complex64::new(0.6, 0.0)),
                (key(&[1], &[0]), Complex64::new(0.8, 0.0)),
            ],
        );
        assert!(!product.is_schmidt_form());
    }

    #[test]
    fn json_dump_shape() {
        let ket = SparseKet::vacuum(2);
        let v = serde_json::to_value(&ket).unwrap();
        assert_eq!(
            v,
            serde_json::json!([{"occ_a": [0, 0], "occ_b": [0, 0], "re": 1.0, "im": 0.0}])
        );
    }

    #[test]
    fn records_round_trip() {
        let ket = SparseKet::from_terms(
            2,
            vec![
                (key(&[1, 0], &[1, 0]), Complex64::new(0.6, 0.0)),
                (key(&[0, 1], &[0, 1]), Complex64::new(0.0, 0.8)),
            ],
        )
        .normalize();
        let back = SparseKet::from_records(&ket.to_records()).unwrap();
        assert_eq!(back, ket);
        assert!(SparseKet::from_records(&[]).is_none());
    }
}
