//! Closed-form results for the tight-binding chains.
//!
//! These serve as fast paths and as independent checks on the projector
//! route in [`crate::perturbation`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Fitted proportionality constant in `δ ≈ C · G²`, taken from the published
/// leakage sweep rather than derived. `zeno-chain sweep` re-fits it.
pub const LEAKAGE_FIT_CONSTANT: f64 = 4.3;

/// Upper end of the leakage range over which the `δ ≈ C · G²` fit holds.
pub const FIT_VALIDITY_LIMIT: f64 = 0.2;

fn require_even(n_sites: usize) -> Result<()> {
    if n_sites < 4 || !n_sites.is_multiple_of(2) {
        return Err(Error::invalid(
            "n_sites",
            format!("need an even N >= 4, got {n_sites}"),
        ));
    }
    Ok(())
}

fn require_odd(n_sites: usize) -> Result<()> {
    if n_sites < 5 || n_sites.is_multiple_of(2) {
        return Err(Error::invalid(
            "n_sites",
            format!("need an odd N >= 5, got {n_sites}"),
        ));
    }
    Ok(())
}

fn sign(exponent: usize) -> f64 {
    if exponent.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Eigenpair `n` of the `(N-2)`-site interior Toeplitz block:
/// `η_n = 2k cos(nπ/(N-1))`, components `√(2/(N-1)) sin(n(i-1)π/(N-1))` for
/// sites `i = 2..=N-1`.
pub fn toeplitz_eigenpair(n_sites: usize, k: f64, n: usize) -> Result<(f64, Vec<f64>)> {
    if n_sites < 3 {
        return Err(Error::invalid(
            "n_sites",
            format!("need N >= 3, got {n_sites}"),
        ));
    }
    if n == 0 || n > n_sites - 2 {
        return Err(Error::invalid(
            "n",
            format!("mode index must lie in 1..={}, got {n}", n_sites - 2),
        ));
    }
    let m = (n_sites - 1) as f64;
    let eigenvalue = 2.0 * k * (n as f64 * PI / m).cos();
    let norm = (2.0 / m).sqrt();
    let vector = (2..n_sites)
        .map(|i| norm * ((n * (i - 1)) as f64 * PI / m).sin())
        .collect();
    Ok((eigenvalue, vector))
}

fn end_to_end(n_sites: usize, coupling: f64, end_shift: f64) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n_sites, n_sites);
    m[(0, n_sites - 1)] = coupling;
    m[(n_sites - 1, 0)] = coupling;
    m[(0, 0)] = end_shift;
    m[(n_sites - 1, n_sites - 1)] = end_shift;
    m
}

/// Even chains: `(-1)^{N/2-1} λk (|1⟩⟨N| + h.c.)`.
pub fn hqzd1_even(n_sites: usize, k: f64, lambda: f64) -> Result<DenseMatrix> {
    require_even(n_sites)?;
    Ok(end_to_end(n_sites, sign(n_sites / 2 - 1) * lambda * k, 0.0))
}

/// Extra zero mode of odd chains, `(|2⟩ - |4⟩ + …) / √((N-1)/2)`.
pub fn phi_mid(n_sites: usize) -> Result<Vec<f64>> {
    require_odd(n_sites)?;
    let weight = 1.0 / (((n_sites - 1) / 2) as f64).sqrt();
    Ok((1..=n_sites)
        .map(|site| {
            if site % 2 == 0 && site < n_sites {
                sign(site / 2 + 1) * weight
            } else {
                0.0
            }
        })
        .collect())
}

/// Odd chains: `P_0 H P_0` with `P_0 = |1⟩⟨1| + |N⟩⟨N| + |φ_mid⟩⟨φ_mid|`.
///
/// The end sites couple to `φ_mid` with strength `k/√((N-1)/2)`; the `|N⟩`
/// coupling carries the sign `(-1)^{(N+1)/2}` of the last `φ_mid` component.
pub fn hqzd0_odd(n_sites: usize, k: f64) -> Result<DenseMatrix> {
    let mid = phi_mid(n_sites)?;
    let c = k / (((n_sites - 1) / 2) as f64).sqrt();
    let mut e1 = vec![0.0; n_sites];
    e1[0] = 1.0;
    let mut en = vec![0.0; n_sites];
    en[n_sites - 1] = 1.0;
    let last = sign(n_sites.div_ceil(2));
    let left = DenseMatrix::outer(&e1, &mid).scale(c);
    let right = DenseMatrix::outer(&mid, &en).scale(last * c);
    let half = left.add(&right);
    Ok(half.add(&half.transpose()))
}

/// Modified odd chains (on-site shift `Δω`):
/// `(-1)^{(N-1)/2} (k²/Δω)(|1⟩⟨N| + h.c.) - (k²/Δω)(|1⟩⟨1| + |N⟩⟨N|)`.
pub fn hqzd1_odd_modified(n_sites: usize, k: f64, delta_omega: f64) -> Result<DenseMatrix> {
    require_odd(n_sites)?;
    if delta_omega == 0.0 || !delta_omega.is_finite() {
        return Err(Error::invalid("delta_omega", "must be finite and nonzero"));
    }
    let rate = k * k / delta_omega;
    Ok(end_to_end(n_sites, sign((n_sites - 1) / 2) * rate, -rate))
}

/// `f(N) = tan((π/2)(N-2)/(N-1)) / √(N-1)`.
pub fn f_of_n(n_sites: usize) -> Result<f64> {
    require_even(n_sites)?;
    let m = (n_sites - 1) as f64;
    Ok((0.5 * PI * (n_sites - 2) as f64 / m).tan() / m.sqrt())
}

/// `g_n = (λ/√(N-1)) tan(nπ/(N-1))`.
pub fn g_n(n_sites: usize, lambda: f64, n: usize) -> Result<f64> {
    require_even(n_sites)?;
    if n == 0 || n > n_sites - 2 {
        return Err(Error::invalid(
            "n",
            format!("mode index must lie in 1..={}, got {n}", n_sites - 2),
        ));
    }
    let m = (n_sites - 1) as f64;
    Ok(lambda / m.sqrt() * (n as f64 * PI / m).tan())
}

/// `G = λ f(N)`, the largest `|g_n|`.
pub fn big_g(n_sites: usize, lambda: f64) -> Result<f64> {
    Ok(lambda * f_of_n(n_sites)?)
}

/// Leakage estimate `C λ² f(N)²`.
pub fn delta_estimate(n_sites: usize, lambda: f64) -> Result<f64> {
    let g = big_g(n_sites, lambda)?;
    Ok(LEAKAGE_FIT_CONSTANT * g * g)
}

/// Smallest `λ⁻¹` keeping the estimated leakage below `delta0`:
/// `f(N) √(C/δ₀)`.
pub fn lambda_bound(n_sites: usize, delta0: f64) -> Result<f64> {
    if !(delta0 > 0.0 && delta0 < FIT_VALIDITY_LIMIT) {
        return Err(Error::OutOfValidity {
            delta0,
            limit: FIT_VALIDITY_LIMIT,
        });
    }
    Ok(f_of_n(n_sites)? * (LEAKAGE_FIT_CONSTANT / delta0).sqrt())
}

/// Corner element `⟨2|Q̃|N-1⟩ = (-1)^{N/2-1} Π_{odd i} k_i / Π_{even i} k_i`
/// for interior couplings `k_2, …, k_{N-2}`.
pub fn qtilde_fluctuating_corner(couplings: &[f64]) -> Result<f64> {
    let n_sites = couplings.len() + 3;
    require_even(n_sites)?;
    if couplings.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
        return Err(Error::invalid(
            "couplings",
            "all couplings must be positive",
        ));
    }
    // couplings[j] is bond i = j + 2.
    let ratio =
        couplings.iter().enumerate().fold(
            1.0,
            |acc, (j, k)| if (j + 2) % 2 == 1 { acc * k } else { acc / k },
        );
    Ok(sign(n_sites / 2 - 1) * ratio)
}
