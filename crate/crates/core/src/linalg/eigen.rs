use super::{DenseMatrix, SpectralDecomposition, SymTridiag};
use crate::error::{Error, Result};

/// Per-eigenvalue iteration cap for the implicit QL sweep.
const QL_MAX_ITER: usize = 60;
/// Sweep cap for cyclic Jacobi.
const JACOBI_MAX_SWEEPS: usize = 100;

/// Matrices that can be diagonalized into a [`SpectralDecomposition`].
pub trait Diagonalize {
    fn dim(&self) -> usize;
    fn spectral(&self) -> Result<SpectralDecomposition>;
}

impl Diagonalize for SymTridiag {
    fn dim(&self) -> usize {
        self.size()
    }

    fn spectral(&self) -> Result<SpectralDecomposition> {
        eig_sym_tridiag(self)
    }
}

impl Diagonalize for DenseMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn spectral(&self) -> Result<SpectralDecomposition> {
        eig_dense_sym(self)
    }
}

/// Symmetric tridiagonal eigensolver: implicit-shift QL with eigenvector
/// accumulation.
pub fn eig_sym_tridiag(m: &SymTridiag) -> Result<SpectralDecomposition> {
    let n = m.size();
    let mut d = m.diag().to_vec();
    // e[i] couples i and i+1; e[n-1] is padding.
    let mut e = m.offdiag().to_vec();
    e.push(0.0);
    // z[k][i]: component k of eigenvector i.
    let mut z = vec![vec![0.0; n]; n];
    for (i, row) in z.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    let eps = f64::EPSILON;
    let mut shift_total = 0.0;
    let mut tst1 = 0.0_f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut mm = l;
        while mm < n && e[mm].abs() > eps * tst1 {
            mm += 1;
        }
        let m_idx = mm.min(n - 1);
        if m_idx > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITER {
                    return Err(Error::NoConvergence { rows: n, cols: n });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                shift_total += h;

                p = d[m_idx];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m_idx).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in z.iter_mut() {
                        let h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += shift_total;
        e[l] = 0.0;
    }

    let pairs = (0..n)
        .map(|i| (d[i], z.iter().map(|row| row[i]).collect()))
        .collect();
    Ok(SpectralDecomposition::from_pairs(pairs))
}

/// Cyclic Jacobi eigensolver for dense symmetric matrices.
pub fn eig_dense_sym(m: &DenseMatrix) -> Result<SpectralDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            actual: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut v = DenseMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { rows: n, cols: n });
    }

    let pairs = (0..n).map(|i| (a[(i, i)], v.column(i))).collect();
    Ok(SpectralDecomposition::from_pairs(pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_invariants(d: &SpectralDecomposition, source: &DenseMatrix) {
        let n = d.dim();
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = d
                    .eigenvector(i)
                    .iter()
                    .zip(d.eigenvector(j))
                    .map(|(a, b)| a * b)
                    .sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (dot - expected).abs() < 1e-10,
                    "orthonormality ({i},{j}) = {dot}"
                );
            }
        }
        let rec = d.reconstruct();
        let scale = source.max_abs().max(1.0);
        assert!(rec.sub(source).max_abs() <= 1e-10 * scale);
        assert!(d.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        for v in d.eigenvectors() {
            let first = v.iter().find(|x| x.abs() > 1e-12).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn two_site_coupling() {
        let k = 0.7;
        let m = SymTridiag::new(vec![0.0, 0.0], vec![k]).unwrap();
        let d = eig_sym_tridiag(&m).unwrap();
        assert!((d.eigenvalues()[0] + k).abs() < 1e-14);
        assert!((d.eigenvalues()[1] - k).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = d.eigenvector(0);
        let v1 = d.eigenvector(1);
        assert!((v0[0] - r).abs() < 1e-14 && (v0[1] + r).abs() < 1e-14);
        assert!((v1[0] - r).abs() < 1e-14 && (v1[1] - r).abs() < 1e-14);
        assert_invariants(&d, &m.to_dense());
    }

    #[test]
    fn four_site_watch_spectrum() {
        let m = SymTridiag::new(vec![0.0; 4], vec![0.0, 1.0, 0.0]).unwrap();
        let d = eig_sym_tridiag(&m).unwrap();
        let expected = [-1.0, 0.0, 0.0, 1.0];
        for (a, b) in d.eigenvalues().iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_invariants(&d, &m.to_dense());
    }

    #[test]
    fn five_site_interior_block() {
        let m = SymTridiag::toeplitz(3, 0.0, 1.0);
        let d = eig_sym_tridiag(&m).unwrap();
        let s = 2.0_f64.sqrt();
        for (a, b) in d.eigenvalues().iter().zip([-s, 0.0, s]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn single_entry() {
        let m = SymTridiag::new(vec![3.5], vec![]).unwrap();
        let d = eig_sym_tridiag(&m).unwrap();
        assert_eq!(d.eigenvalues(), &[3.5]);
        assert_eq!(d.eigenvector(0), &[1.0]);
    }

    #[test]
    fn jacobi_agrees_with_ql() {
        let m = SymTridiag::new(vec![0.3, -1.0, 2.0, 0.5, 0.0], vec![1.0, 0.4, -0.7, 2.2]).unwrap();
        let a = eig_sym_tridiag(&m).unwrap();
        let b = eig_dense_sym(&m.to_dense()).unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            assert!((x - y).abs() < 1e-12);
        }
        for (u, v) in a.eigenvectors().iter().zip(b.eigenvectors()) {
            for (x, y) in u.iter().zip(v) {
                assert!((x - y).abs() < 1e-10);
            }
        }
        assert_invariants(&b, &m.to_dense());
    }

    #[test]
    fn jacobi_dense_projector_like() {
        let u = [0.6, 0.8, 0.0];
        let m = DenseMatrix::outer(&u, &u).scale(2.0);
        let d = eig_dense_sym(&m).unwrap();
        assert!((d.eigenvalues()[2] - 2.0).abs() < 1e-14);
        assert_invariants(&d, &m);
    }

    #[test]
    fn non_square_dense_is_rejected() {
        let m = DenseMatrix::zeros(2, 3);
        assert!(matches!(
            eig_dense_sym(&m),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
