use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::entropy::DENSE_LIMIT;
use super::ket::{PairKey, SparseKet};
use crate::error::{Error, Result};

/// Dense mixed state over an explicit, sorted list of basis labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    modes: usize,
    basis: Vec<PairKey>,
    index: HashMap<PairKey, usize>,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    /// Wraps a matrix over `basis`. Panics if the shapes disagree.
    pub fn new(modes: usize, basis: Vec<PairKey>, matrix: DMatrix<Complex64>) -> Self {
        assert_eq!(matrix.nrows(), basis.len());
        assert_eq!(matrix.ncols(), basis.len());
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        DensityOperator {
            modes,
            basis,
            index,
            matrix,
        }
    }

    pub fn empty(modes: usize) -> Self {
        DensityOperator::new(modes, Vec::new(), DMatrix::zeros(0, 0))
    }

    pub fn from_pure(ket: &SparseKet) -> Result<Self> {
        DensityOperator::from_mixture(ket.modes(), std::iter::once((1.0, ket)))
    }

    /// Σ_k w_k |ψ_k⟩⟨ψ_k| over the union of the kets' supports.
    pub fn from_mixture<'a, I>(modes: usize, parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, &'a SparseKet)>,
    {
        let parts: Vec<_> = parts.into_iter().collect();
        let basis: BTreeSet<PairKey> = parts
            .iter()
            .flat_map(|(_, k)| k.terms().map(|(key, _)| key.clone()))
            .collect();
        if basis.len() > DENSE_LIMIT {
            return Err(Error::DimensionTooLarge {
                dim: basis.len(),
                limit: DENSE_LIMIT,
            });
        }
        let n = basis.len();
        let mut rho = DensityOperator::new(modes, basis.into_iter().collect(), DMatrix::zeros(n, n));
        for (w, ket) in parts {
            rho.add_outer(w, ket);
        }
        Ok(rho)
    }

    /// Adds `w |ψ⟩⟨ψ|`. Terms of `ket` outside the basis are ignored.
    pub fn add_outer(&mut self, w: f64, ket: &SparseKet) {
        let coords: Vec<(usize, Complex64)> = ket
            .terms()
            .filter_map(|(k, a)| self.index.get(k).map(|&i| (i, *a)))
            .collect();
        for &(i, ai) in &coords {
            for &(k, ak) in &coords {
                self.matrix[(i, k)] += ai * ak.conj() * w;
            }
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[PairKey] {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn position(&self, key: &PairKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn element(&self, row: &PairKey, col: &PairKey) -> Complex64 {
        match (self.index.get(row), self.index.get(col)) {
            (Some(&i), Some(&k)) => self.matrix[(i, k)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// ⟨ψ|ρ|ψ⟩ for a (not necessarily normalized) ket.
    pub fn expectation(&self, ket: &SparseKet) -> f64 {
        let coords: Vec<(usize, Complex64)> = ket
            .terms()
            .filter_map(|(k, a)| self.index.get(k).map(|&i| (i, *a)))
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(i, ai) in &coords {
            for &(k, ak) in &coords {
                acc += ai.conj() * self.matrix[(i, k)] * ak;
            }
        }
        acc.re
    }

    /// The block on basis elements accepted by `keep`.
    pub fn restrict<F: Fn(&PairKey) -> bool>(&self, keep: F) -> DensityOperator {
        let idx: Vec<usize> = (0..self.dim()).filter(|&i| keep(&self.basis[i])).collect();
        let basis = idx.iter().map(|&i| self.basis[i].clone()).collect();
        let matrix = DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.matrix[(idx[r], idx[c])]);
        DensityOperator::new(self.modes, basis, matrix)
    }

    pub fn scaled(&self, factor: f64) -> DensityOperator {
        DensityOperator {
            matrix: &self.matrix * Complex64::new(factor, 0.0),
            ..self.clone()
        }
    }

    /// Unit-trace copy, or `None` when the trace vanishes.
    pub fn normalized(&self) -> Option<DensityOperator> {
        let t = self.trace();
        (t > 0.0).then(|| self.scaled(1.0 / t))
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for k in i..self.dim() {
                worst = worst.max((self.matrix[(i, k)] - self.matrix[(k, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Hermitian within 1e-12, spectrum above -1e-10 and trace in (0, 1 + 1e-12].
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let herm = self.hermiticity_error();
        if herm > 1e-12 {
            return Err(format!("not Hermitian: max deviation {herm:e}"));
        }
        if let Some(&min) = self.eigenvalues().first() {
            if min < -1e-10 {
                return Err(format!("negative eigenvalue {min:e}"));
            }
        }
        let t = self.trace();
        if !(t > 0.0 && t <= 1.0 + 1e-12) {
            return Err(format!("trace {t} outside (0, 1]"));
        }
        Ok(())
    }

    /// ½‖ρ − σ‖₁ over the union of both bases.
    pub fn trace_distance(&self, other: &DensityOperator) -> Result<f64> {
        let union: BTreeSet<&PairKey> = self.basis.iter().chain(other.basis.iter()).collect();
        if union.len() > DENSE_LIMIT {
            return Err(Error::DimensionTooLarge {
                dim: union.len(),
                limit: DENSE_LIMIT,
            });
        }
        let union: Vec<&PairKey> = union.into_iter().collect();
        let n = union.len();
        let diff = DMatrix::from_fn(n, n, |r, c| {
            self.element(union[r], union[c]) - other.element(union[r], union[c])
        });
        Ok(0.5 * diff.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>())
    }
}
