//! Real symmetric linear algebra used by every other module.
//!
//! All Hamiltonians handled here are real symmetric, so eigenvectors are real
//! and time evolution only needs complex phase factors.

mod dense;
mod eigen;
mod spectral;
mod tridiag;

pub use dense::DenseMatrix;
pub use eigen::{eig_dense_sym, eig_sym_tridiag, Diagonalize};
pub(crate) use spectral::fix_sign;
pub use spectral::{evolve, norm_sqr, SpectralDecomposition};
pub use tridiag::{det_tridiag, invert_tridiag, singularity_threshold};

use crate::error::{Error, Result};

/// Real symmetric tridiagonal matrix stored as its diagonal and first
/// off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::invalid("diag", "matrix must have at least one row"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch {
                expected: diag.len() - 1,
                actual: offdiag.len(),
            });
        }
        if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
            return Err(Error::invalid("entries", "non-finite matrix entry"));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn zeros(size: usize) -> Self {
        assert!(size >= 1, "empty tridiagonal matrix");
        Self {
            diag: vec![0.0; size],
            offdiag: vec![0.0; size - 1],
        }
    }

    /// Toeplitz matrix with constant diagonal `a` and off-diagonal `b`.
    pub fn toeplitz(size: usize, a: f64, b: f64) -> Self {
        assert!(size >= 1, "empty tridiagonal matrix");
        Self {
            diag: vec![a; size],
            offdiag: vec![b; size - 1],
        }
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn max_abs(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.offdiag)
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|x| x * factor).collect(),
            offdiag: self.offdiag.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.size() != other.size() {
            return Err(Error::DimensionMismatch {
                expected: self.size(),
                actual: other.size(),
            });
        }
        Ok(Self {
            diag: self
                .diag
                .iter()
                .zip(&other.diag)
                .map(|(a, b)| a + b)
                .collect(),
            offdiag: self
                .offdiag
                .iter()
                .zip(&other.offdiag)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Adds `value` to the diagonal entry at zero-based `index`.
    pub fn with_diag_shift(&self, index: usize, value: f64) -> Self {
        let mut out = self.clone();
        out.diag[index] += value;
        out
    }

    /// Contiguous principal sub-block covering zero-based rows `start..end`.
    pub fn sub_block(&self, start: usize, end: usize) -> Self {
        assert!(start < end && end <= self.size(), "invalid block range");
        Self {
            diag: self.diag[start..end].to_vec(),
            offdiag: self.offdiag[start..end - 1].to_vec(),
        }
    }

    /// Reverses the site order, `i -> N-1-i`.
    pub fn reversed(&self) -> Self {
        Self {
            diag: self.diag.iter().rev().copied().collect(),
            offdiag: self.offdiag.iter().rev().copied().collect(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.size();
        assert_eq!(x.len(), n, "vector length must match matrix size");
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.offdiag[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.size();
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, &b) in self.offdiag.iter().enumerate() {
            m[(i, i + 1)] = b;
            m[(i + 1, i)] = b;
        }
        m
    }
}
