//! Independent reference implementations used as test oracles. None of
//! these call into the library's numerical routines.

#![allow(dead_code)]

use num_complex::Complex64;

pub type Mat = Vec<Vec<f64>>;

pub fn tridiag_dense(diag: &[f64], off: &[f64]) -> Mat {
    let n = diag.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = diag[i];
        if i + 1 < n {
            m[i][i + 1] = off[i];
            m[i + 1][i] = off[i];
        }
    }
    m
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn gauss_inverse(a: &Mat) -> Option<Mat> {
    let n = a.len();
    let mut m: Mat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            let f = row[col];
            if r != col && f != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Laplace expansion along the first row.
pub fn cofactor_det(a: &Mat) -> f64 {
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    (0..n)
        .filter(|&j| a[0][j] != 0.0)
        .map(|j| {
            let minor: Mat = a[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * a[0][j] * cofactor_det(&minor)
        })
        .sum()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}

fn apply(h: &Mat, psi: &[Complex64]) -> Vec<Complex64> {
    // -i H psi
    h.iter()
        .map(|row| {
            let s: Complex64 = row.iter().zip(psi).map(|(a, z)| z * a).sum();
            Complex64::new(s.im, -s.re)
        })
        .collect()
}

/// Classical fourth-order Runge-Kutta for `i dψ/dt = Hψ`, returning the
/// state at every multiple of `record_every` steps.
pub fn rk4(
    h: &Mat,
    psi0: &[Complex64],
    dt: f64,
    steps: usize,
    record_every: usize,
) -> Vec<Vec<Complex64>> {
    let axpy = |x: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        x.iter().zip(k).map(|(a, b)| a + b * s).collect()
    };
    let mut psi = psi0.to_vec();
    let mut out = vec![psi.clone()];
    for step in 1..=steps {
        let k1 = apply(h, &psi);
        let k2 = apply(h, &axpy(&psi, &k1, dt / 2.0));
        let k3 = apply(h, &axpy(&psi, &k2, dt / 2.0));
        let k4 = apply(h, &axpy(&psi, &k3, dt));
        for i in 0..psi.len() {
            psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
        if step % record_every == 0 {
            out.push(psi.clone());
        }
    }
    out
}

/// Uniform chain `H_tot = λ⁻¹ H_w + H` built from scratch.
pub fn chain_total(n: usize, k: f64, lambda_inv: f64) -> Mat {
    let mut off = vec![k * lambda_inv; n - 1];
    off[0] = k;
    off[n - 2] = k;
    tridiag_dense(&vec![0.0; n], &off)
}

pub fn unit(n: usize, site: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[site - 1] = 1.0;
    v
}
