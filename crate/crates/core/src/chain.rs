//! Tight-binding chains with strong interior bonds and weak end bonds.
//!
//! Sites are numbered `1..=N` in the public API and stored zero-based.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymTridiag;

/// Seeded i.i.d. uniform perturbation of the interior couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fluctuation {
    /// Half-width `a` of the uniform distribution `k_i = k (1 + u)`, `u ∈ [-a, a]`.
    pub relative_amplitude: f64,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub k: f64,
    /// Strong/weak ratio `λ⁻¹`.
    pub lambda_inv: f64,
    /// On-site shift `Δω`, applied at `shift_site`.
    pub delta_omega: Option<f64>,
    /// One-based even interior site carrying `Δω`.
    pub shift_site: usize,
    pub fluctuation: Option<Fluctuation>,
}

impl ChainSpec {
    pub fn new(n_sites: usize, lambda_inv: f64) -> Self {
        Self {
            n_sites,
            k: 1.0,
            lambda_inv,
            delta_omega: None,
            shift_site: 2,
            fluctuation: None,
        }
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    pub fn with_delta_omega(mut self, delta_omega: f64) -> Self {
        self.delta_omega = Some(delta_omega);
        self
    }

    pub fn with_shift_site(mut self, site: usize) -> Self {
        self.shift_site = site;
        self
    }

    pub fn with_fluctuation(mut self, relative_amplitude: f64, rng_seed: u64) -> Self {
        self.fluctuation = Some(Fluctuation {
            relative_amplitude,
            rng_seed,
        });
        self
    }

    pub fn lambda(&self) -> f64 {
        1.0 / self.lambda_inv
    }

    pub fn is_even(&self) -> bool {
        self.n_sites.is_multiple_of(2)
    }

    pub fn is_modified(&self) -> bool {
        self.delta_omega.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 4 {
            return Err(Error::invalid(
                "n_sites",
                format!("need N >= 4, got {}", self.n_sites),
            ));
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(Error::invalid(
                "k",
                format!("coupling must be positive, got {}", self.k),
            ));
        }
        if !(self.lambda_inv.is_finite() && self.lambda_inv >= 1.0) {
            return Err(Error::invalid(
                "lambda_inv",
                format!("need lambda_inv >= 1, got {}", self.lambda_inv),
            ));
        }
        if let Some(dw) = self.delta_omega {
            if !dw.is_finite() {
                return Err(Error::invalid("delta_omega", "must be finite"));
            }
            let s = self.shift_site;
            if !s.is_multiple_of(2) || s < 2 || s > self.n_sites - 1 {
                return Err(Error::invalid(
                    "shift_site",
                    format!("must be an even site in [2, {}], got {s}", self.n_sites - 1),
                ));
            }
        }
        if let Some(f) = self.fluctuation {
            if !(0.0..=0.2).contains(&f.relative_amplitude) {
                return Err(Error::invalid(
                    "relative_amplitude",
                    format!("must lie in [0, 0.2], got {}", f.relative_amplitude),
                ));
            }
        }
        Ok(())
    }

    /// Interior couplings `k_2, …, k_{N-2}` (bond `i` joins sites `i` and `i+1`).
    pub fn interior_couplings(&self) -> Vec<f64> {
        let count = self.n_sites - 3;
        match self.fluctuation {
            Some(f) if f.relative_amplitude > 0.0 => {
                let mut rng = ChaCha8Rng::seed_from_u64(f.rng_seed);
                let a = f.relative_amplitude;
                (0..count)
                    .map(|_| self.k * (1.0 + rng.random_range(-a..=a)))
                    .collect()
            }
            _ => vec![self.k; count],
        }
    }
}

/// `h_total = λ⁻¹ h_watch + h_weak + Δω|s⟩⟨s|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainHamiltonians {
    pub h_total: SymTridiag,
    pub h_watch: SymTridiag,
    pub h_weak: SymTridiag,
    lambda: f64,
    /// Zero-based site and value of the on-site shift.
    shift: Option<(usize, f64)>,
}

impl ChainHamiltonians {
    pub fn n_sites(&self) -> usize {
        self.h_total.size()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn shift(&self) -> Option<(usize, f64)> {
        self.shift
    }

    /// Strong part seen by perturbation theory: with
    /// `h_total = λ⁻¹ (W + λ h_weak)`, this is `W = h_watch + λΔω|s⟩⟨s|`.
    pub fn perturbative_watch(&self) -> SymTridiag {
        match self.shift {
            Some((site, dw)) => self.h_watch.with_diag_shift(site, self.lambda * dw),
            None => self.h_watch.clone(),
        }
    }

    /// Interior block of [`Self::perturbative_watch`].
    pub fn interior_block(&self) -> SymTridiag {
        interior_block(&self.perturbative_watch())
    }
}

pub fn build_chain(spec: &ChainSpec) -> Result<ChainHamiltonians> {
    spec.validate()?;
    let n = spec.n_sites;
    let k = spec.k;

    let mut watch_off = vec![0.0; n - 1];
    watch_off[1..n - 2].copy_from_slice(&spec.interior_couplings());
    let h_watch = SymTridiag::new(vec![0.0; n], watch_off)?;

    let mut weak_off = vec![0.0; n - 1];
    weak_off[0] = k;
    weak_off[n - 2] = k;
    let h_weak = SymTridiag::new(vec![0.0; n], weak_off)?;

    let shift = spec.delta_omega.map(|dw| (spec.shift_site - 1, dw));
    let mut h_total = h_watch.scaled(spec.lambda_inv).add(&h_weak)?;
    if let Some((site, dw)) = shift {
        h_total = h_total.with_diag_shift(site, dw);
    }

    Ok(ChainHamiltonians {
        h_total,
        h_watch,
        h_weak,
        lambda: spec.lambda(),
        shift,
    })
}

/// Rows and columns `2..=N-1` of a watch matrix.
pub fn interior_block(h_watch: &SymTridiag) -> SymTridiag {
    let n = h_watch.size();
    assert!(n >= 4, "interior block needs N >= 4");
    h_watch.sub_block(1, n - 1)
}

/// `|site⟩` for a one-based site index.
pub fn site_state(n_sites: usize, site: usize) -> Vec<f64> {
    assert!((1..=n_sites).contains(&site), "site out of range");
    let mut v = vec![0.0; n_sites];
    v[site - 1] = 1.0;
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_site_total() {
        let h = build_chain(&ChainSpec::new(4, 5.0)).unwrap();
        assert_eq!(h.h_total.offdiag(), &[1.0, 5.0, 1.0]);
        assert_eq!(h.h_total.diag(), &[0.0; 4]);
        assert_eq!(h.h_watch.offdiag(), &[0.0, 1.0, 0.0]);
        assert_eq!(h.h_weak.offdiag(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn modified_five_site() {
        let h = build_chain(&ChainSpec::new(5, 20.0).with_delta_omega(20.0)).unwrap();
        assert_eq!(h.h_total.diag(), &[0.0, 20.0, 0.0, 0.0, 0.0]);
        assert_eq!(h.h_total.offdiag(), &[1.0, 20.0, 20.0, 1.0]);
        let block = h.interior_block();
        assert_eq!(block.diag(), &[1.0, 0.0, 0.0]);
        assert_eq!(block.offdiag(), &[1.0, 1.0]);
    }

    #[test]
    fn zero_amplitude_matches_plain_build() {
        let plain = build_chain(&ChainSpec::new(10, 20.0)).unwrap();
        let zero = build_chain(&ChainSpec::new(10, 20.0).with_fluctuation(0.0, 7)).unwrap();
        assert_eq!(plain, zero);
    }

    #[test]
    fn fluctuation_is_seeded_and_bounded() {
        let spec = ChainSpec::new(12, 20.0).with_fluctuation(0.05, 42);
        let a = build_chain(&spec).unwrap();
        let b = build_chain(&spec).unwrap();
        assert_eq!(a, b);
        let other = build_chain(&ChainSpec::new(12, 20.0).with_fluctuation(0.05, 43)).unwrap();
        assert_ne!(a.h_watch, other.h_watch);
        let off = a.h_watch.offdiag();
        assert_eq!(off[0], 0.0);
        assert_eq!(off[10], 0.0);
        assert!(off[1..10].iter().all(|k| (k - 1.0).abs() <= 0.05));
        // Weak bonds stay exact.
        assert_eq!(a.h_weak.offdiag()[0], 1.0);
        assert_eq!(a.h_weak.offdiag()[10], 1.0);
    }

    #[test]
    fn watch_annihilates_end_sites() {
        let h = build_chain(&ChainSpec::new(7, 3.0).with_fluctuation(0.1, 1)).unwrap();
        for site in [1, 7] {
            let v = h.h_watch.mul_vec(&site_state(7, site));
            assert!(v.iter().all(|x| *x == 0.0));
        }
    }

    #[test]
    fn interior_block_of_six_sites() {
        let h = build_chain(&ChainSpec::new(6, 2.0).with_k(0.5)).unwrap();
        let block = interior_block(&h.h_watch);
        assert_eq!(block, SymTridiag::toeplitz(4, 0.0, 0.5));
    }

    #[test]
    fn validation_names_the_field() {
        let cases = [
            (ChainSpec::new(3, 2.0), "n_sites"),
            (ChainSpec::new(4, 0.5), "lambda_inv"),
            (ChainSpec::new(4, 2.0).with_k(-1.0), "k"),
            (
                ChainSpec::new(5, 2.0)
                    .with_delta_omega(1.0)
                    .with_shift_site(3),
                "shift_site",
            ),
            (
                ChainSpec::new(5, 2.0)
                    .with_delta_omega(1.0)
                    .with_shift_site(6),
                "shift_site",
            ),
            (
                ChainSpec::new(5, 2.0).with_fluctuation(0.3, 0),
                "relative_amplitude",
            ),
        ];
        for (spec, field) in cases {
            match build_chain(&spec) {
                Err(Error::Invalid { field: f, .. }) => assert_eq!(f, field),
                other => panic!("expected validation error for {field}, got {other:?}"),
            }
        }
    }
}
