//! Closed-form determinant and inverse of symmetric tridiagonal matrices.
//!
//! Both rest on the leading and trailing principal-minor continuants
//! `θ_r = a_r θ_{r-1} - b_{r-1}² θ_{r-2}` and its mirror `φ_r`.

use super::{DenseMatrix, SymTridiag};
use crate::error::{Error, Result};

/// Leading minors: `θ[r]` is the determinant of rows/cols `0..r`.
fn leading_minors(m: &SymTridiag) -> Vec<f64> {
    let (a, b) = (m.diag(), m.offdiag());
    let n = a.len();
    let mut theta = vec![0.0; n + 1];
    theta[0] = 1.0;
    theta[1] = a[0];
    for r in 2..=n {
        theta[r] = a[r - 1] * theta[r - 1] - b[r - 2] * b[r - 2] * theta[r - 2];
    }
    theta
}

/// Trailing minors: `φ[r]` is the determinant of rows/cols `r..n`.
fn trailing_minors(m: &SymTridiag) -> Vec<f64> {
    let (a, b) = (m.diag(), m.offdiag());
    let n = a.len();
    let mut phi = vec![0.0; n + 1];
    phi[n] = 1.0;
    phi[n - 1] = a[n - 1];
    for r in (0..n.saturating_sub(1)).rev() {
        phi[r] = a[r] * phi[r + 1] - b[r] * b[r] * phi[r + 2];
    }
    phi
}

/// Determinant by the three-term continuant recursion.
pub fn det_tridiag(m: &SymTridiag) -> f64 {
    leading_minors(m)[m.size()]
}

/// `|det| < 1e-12 · (max|entry|)^N` is treated as singular.
pub fn singularity_threshold(m: &SymTridiag) -> f64 {
    1e-12 * m.max_abs().powi(m.size() as i32)
}

/// Inverse from the minor recursions:
/// `(T⁻¹)_{ij} = (-1)^{i+j} b_i⋯b_{j-1} θ_i φ_{j+1} / θ_N` for `i ≤ j`.
pub fn invert_tridiag(m: &SymTridiag) -> Result<DenseMatrix> {
    let n = m.size();
    let theta = leading_minors(m);
    let phi = trailing_minors(m);
    let det = theta[n];
    let threshold = singularity_threshold(m);
    if det.is_nan() || det.abs() <= threshold {
        return Err(Error::Singular {
            size: n,
            det,
            threshold,
        });
    }

    let b = m.offdiag();
    let mut inv = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let mut coupling = 1.0;
        for j in i..n {
            if j > i {
                coupling *= -b[j - 1];
            }
            let value = coupling * theta[i] * phi[j + 1] / det;
            inv[(i, j)] = value;
            inv[(j, i)] = value;
        }
    }
    Ok(inv)
}
