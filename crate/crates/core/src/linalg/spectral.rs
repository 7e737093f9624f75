use num_complex::Complex64;

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Components smaller than this are skipped when fixing eigenvector signs.
pub(crate) const PHASE_EPS: f64 = 1e-12;

/// Eigenvalues sorted ascending with their orthonormal real eigenvectors.
///
/// Each eigenvector is sign-normalized so that its first component with
/// magnitude above `1e-12` is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
}

impl SpectralDecomposition {
    /// Sorts the pairs, fixes signs and wraps them. Vectors must already be
    /// orthonormal.
    pub(crate) fn from_pairs(pairs: Vec<(f64, Vec<f64>)>) -> Self {
        let mut pairs: Vec<(f64, Vec<f64>)> = pairs
            .into_iter()
            .map(|(value, mut vector)| {
                fix_sign(&mut vector);
                (value, vector)
            })
            .collect();
        pairs.sort_by(|(a, u), (b, v)| {
            a.total_cmp(b).then_with(|| {
                u.iter()
                    .zip(v)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> &[f64] {
        &self.eigenvectors[i]
    }

    /// `Σ_i η_i v_i v_iᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.dim();
        let mut m = DenseMatrix::zeros(n, n);
        for (eta, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for r in 0..n {
                let scaled = eta * v[r];
                for c in 0..n {
                    m[(r, c)] += scaled * v[c];
                }
            }
        }
        m
    }

    /// Expansion coefficients `⟨v_i|ψ⟩`.
    pub fn coefficients(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        check_dim(self.dim(), psi.len())?;
        Ok(self
            .eigenvectors
            .iter()
            .map(|v| v.iter().zip(psi).map(|(a, b)| b * a).sum())
            .collect())
    }

    /// Reassembles `Σ_i e^{-iη_i t} c_i v_i` from precomputed coefficients.
    pub fn propagate_coefficients(&self, coefficients: &[Complex64], t: f64) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for ((eta, v), c) in self
            .eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .zip(coefficients)
        {
            let weight = Complex64::from_polar(1.0, -eta * t) * c;
            for (o, x) in out.iter_mut().zip(v) {
                *o += weight * x;
            }
        }
        out
    }

    pub fn evolve(&self, psi0: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        evolve(self, psi0, t)
    }
}

/// Exact spectral propagation `ψ(t) = Σ_i e^{-iη_i t} ⟨v_i|ψ0⟩ v_i`.
///
/// `t == 0` returns `psi0` unchanged.
pub fn evolve(d: &SpectralDecomposition, psi0: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    check_dim(d.dim(), psi0.len())?;
    if t == 0.0 {
        return Ok(psi0.to_vec());
    }
    let c = d.coefficients(psi0)?;
    Ok(d.propagate_coefficients(&c, t))
}

pub fn norm_sqr(psi: &[Complex64]) -> f64 {
    psi.iter().map(Complex64::norm_sqr).sum()
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

pub(crate) fn fix_sign(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|x| x.abs() > PHASE_EPS) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}
