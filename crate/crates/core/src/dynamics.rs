//! Exact time evolution, population traces and leakage out of the Zeno
//! subspace.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::chain::{build_chain, site_state, ChainHamiltonians, ChainSpec};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym_tridiag, norm_sqr, DenseMatrix, Diagonalize, SpectralDecomposition};
use crate::perturbation::{
    default_grouping_tolerance, first_order_corrections, group_levels, reduced_resolvent,
    zero_level_basis, FirstOrderCorrections,
};

pub const DEFAULT_STEPS: usize = 4000;

/// Uniform grid `t_i = t_max · i / n_steps`, `i = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_steps: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::invalid(
                "t_max",
                format!("must be positive, got {t_max}"),
            ));
        }
        if n_steps == 0 {
            return Err(Error::invalid("steps", "need at least one step"));
        }
        Ok(Self { t_max, n_steps })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps)
            .map(|i| self.t_max * i as f64 / self.n_steps as f64)
            .collect()
    }

    pub fn summary(&self) -> GridSummary {
        GridSummary {
            t_max: self.t_max,
            n_steps: self.n_steps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSummary {
    pub t_max: f64,
    pub n_steps: usize,
}

/// Rate of the leading effective end-to-end dynamics of a chain.
///
/// Even chains: `λk`. Chains with an on-site shift: `k²/|Δω|`. Unmodified
/// odd chains: `√2 k/√((N-1)/2)`, the frequency of the three-level zeroth-order
/// dynamics through `φ_mid`.
pub fn effective_rate(spec: &ChainSpec) -> f64 {
    match spec.delta_omega {
        Some(dw) => spec.k * spec.k / dw.abs(),
        None if spec.is_even() => spec.lambda() * spec.k,
        None => 2.0_f64.sqrt() * spec.k / (((spec.n_sites - 1) / 2) as f64).sqrt(),
    }
}

/// One full end-to-end cycle of the effective dynamics sampled with
/// `n_steps` steps.
pub fn default_window(spec: &ChainSpec, n_steps: usize) -> Result<TimeGrid> {
    spec.validate()?;
    let rate = effective_rate(spec);
    let t_max = if spec.is_even() || spec.is_modified() {
        PI / rate
    } else {
        2.0 * PI / rate
    };
    TimeGrid::new(t_max, n_steps)
}

/// Spectral propagator for a fixed initial state.
#[derive(Debug, Clone)]
pub struct Propagator {
    decomposition: SpectralDecomposition,
    coefficients: Vec<Complex64>,
    initial: Vec<Complex64>,
}

impl Propagator {
    pub fn new<H: Diagonalize + ?Sized>(h: &H, psi0: &[Complex64]) -> Result<Self> {
        Self::from_decomposition(h.spectral()?, psi0)
    }

    pub fn from_decomposition(
        decomposition: SpectralDecomposition,
        psi0: &[Complex64],
    ) -> Result<Self> {
        let coefficients = decomposition.coefficients(psi0)?;
        Ok(Self {
            decomposition,
            coefficients,
            initial: psi0.to_vec(),
        })
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    pub fn state_at(&self, t: f64) -> Vec<Complex64> {
        if t == 0.0 {
            return self.initial.clone();
        }
        self.decomposition
            .propagate_coefficients(&self.coefficients, t)
    }
}

/// Real vector promoted to a complex state.
pub fn real_state(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// `⟨ψ|M|ψ⟩` for real symmetric `M`.
pub fn expectation(m: &DenseMatrix, psi: &[Complex64]) -> f64 {
    let re: Vec<f64> = psi.iter().map(|z| z.re).collect();
    let im: Vec<f64> = psi.iter().map(|z| z.im).collect();
    m.quadratic_form(&re) + m.quadratic_form(&im)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub grid: GridSummary,
    /// `populations[t][i] = |⟨i|ψ(t)⟩|²`.
    pub populations: Vec<Vec<f64>>,
    pub subspace_population: Vec<f64>,
    pub leakage: Vec<f64>,
    pub mid_overlap: Option<Vec<f64>>,
}

impl EvolutionTrace {
    pub fn n_sites(&self) -> usize {
        self.populations.first().map_or(0, Vec::len)
    }

    /// Population of a one-based site over time.
    pub fn site_series(&self, site: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[site - 1]).collect()
    }
}

/// Samples `ψ(t) = e^{-iHt} ψ0` on `grid`, recording site populations and
/// leakage `1 - |P0 ψ(t)|²`. When `mid` is given, `|⟨mid|ψ(t)⟩|²` is recorded too.
pub fn simulate<H: Diagonalize + ?Sized>(
    h: &H,
    psi0: &[Complex64],
    grid: &TimeGrid,
    p0: &DenseMatrix,
    mid: Option<&[f64]>,
) -> Result<EvolutionTrace> {
    let n = h.dim();
    for len in [psi0.len(), p0.rows(), p0.cols()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    if let Some(m) = mid {
        if m.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: m.len(),
            });
        }
    }
    let propagator = Propagator::new(h, psi0)?;
    let times = grid.times();
    let mut populations = Vec::with_capacity(times.len());
    let mut subspace_population = Vec::with_capacity(times.len());
    let mut leakage = Vec::with_capacity(times.len());
    let mut mid_overlap = mid.map(|_| Vec::with_capacity(times.len()));

    for &t in &times {
        let psi = propagator.state_at(t);
        let inside = expectation(p0, &psi);
        populations.push(psi.iter().map(Complex64::norm_sqr).collect());
        subspace_population.push(inside);
        leakage.push((1.0 - inside).clamp(0.0, 1.0));
        if let (Some(m), Some(series)) = (mid, mid_overlap.as_mut()) {
            let overlap: Complex64 = m.iter().zip(&psi).map(|(a, z)| z * a).sum();
            series.push(overlap.norm_sqr());
        }
    }

    Ok(EvolutionTrace {
        times,
        grid: grid.summary(),
        populations,
        subspace_population,
        leakage,
        mid_overlap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeakageReport {
    /// Largest leakage over the window.
    pub delta: f64,
    /// First sample time attaining `delta`.
    pub attained_at: f64,
    pub window: GridSummary,
}

pub fn measure_leakage(trace: &EvolutionTrace) -> LeakageReport {
    let (idx, delta) =
        trace
            .leakage
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, x)| {
                if x > best.1 {
                    (i, x)
                } else {
                    best
                }
            });
    LeakageReport {
        delta: delta.clamp(0.0, 1.0),
        attained_at: trace.times[idx],
        window: trace.grid,
    }
}

/// Evolves `|1⟩` under `H_tot` of `spec`, measuring leakage out of the zero
/// level of the perturbative watch. Odd chains also record the overlap with
/// `φ_mid`.
pub fn simulate_chain(
    spec: &ChainSpec,
    grid: &TimeGrid,
) -> Result<(EvolutionTrace, LeakageReport)> {
    let h = build_chain(spec)?;
    let p0 = zero_projector(&h)?;
    let psi0 = real_state(&site_state(spec.n_sites, 1));
    let mid = if spec.is_even() {
        None
    } else {
        Some(crate::analytic::phi_mid(spec.n_sites)?)
    };
    let trace = simulate(&h.h_total, &psi0, grid, &p0, mid.as_deref())?;
    let report = measure_leakage(&trace);
    Ok((trace, report))
}

/// Zero-level projector of the perturbative watch Hamiltonian of a chain.
pub fn zero_projector(h: &ChainHamiltonians) -> Result<DenseMatrix> {
    let d = eig_sym_tridiag(&h.perturbative_watch())?;
    let ps = group_levels(&d, default_grouping_tolerance(&d))?;
    ps.zero_projector().cloned().ok_or(Error::MissingZeroLevel)
}

/// First-order corrections for a chain, with the zero level rotated into the
/// basis that diagonalizes the first-order effective Hamiltonian.
pub fn chain_corrections(h: &ChainHamiltonians) -> Result<FirstOrderCorrections> {
    let watch = h.perturbative_watch();
    let d = eig_sym_tridiag(&watch)?;
    let ps = group_levels(&d, default_grouping_tolerance(&d))?;
    if ps.zero_dimension() != 2 {
        return Err(Error::Unsupported(format!(
            "U1 correction needs a twofold zero level, found {}",
            ps.zero_dimension()
        )));
    }
    let weak = h.h_weak.to_dense();
    let q = reduced_resolvent(&ps)?;
    let basis = zero_level_basis(&d, &ps, &weak, &q)?;
    let pair = [basis.vectors[0].clone(), basis.vectors[1].clone()];
    first_order_corrections(&d, &ps, &weak, &pair)
}

/// `|U⁽¹⁾(τ)|ψ0⟩|²` with
/// `U⁽¹⁾(τ) = λ Σ_s e^{-iη_s τ} (|φ⁽¹⁾_s⟩⟨φ_s| + |φ_s⟩⟨φ⁽¹⁾_s|)` and
/// `η_s` expanded to second order in `λ`.
pub fn u1_correction_trace(
    corrections: &FirstOrderCorrections,
    psi0: &[f64],
    lambda: f64,
    taus: &[f64],
) -> Result<Vec<f64>> {
    let n = psi0.len();
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let mut terms = Vec::with_capacity(corrections.states.len());
    for s in &corrections.states {
        if s.unperturbed.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: s.unperturbed.len(),
            });
        }
        let a = dot(&s.unperturbed, psi0);
        let b = dot(&s.correction, psi0);
        let vector: Vec<f64> = s
            .correction
            .iter()
            .zip(&s.unperturbed)
            .map(|(c, u)| lambda * (a * c + b * u))
            .collect();
        terms.push((s.energy(lambda), vector));
    }
    Ok(taus
        .iter()
        .map(|&tau| {
            let mut acc = vec![Complex64::new(0.0, 0.0); n];
            for (eta, v) in &terms {
                let phase = Complex64::from_polar(1.0, -eta * tau);
                for (o, x) in acc.iter_mut().zip(v) {
                    *o += phase * x;
                }
            }
            norm_sqr(&acc)
        })
        .collect())
}

/// Convenience: `|U⁽¹⁾|1⟩|²` for a chain sampled on a grid in `t` (`τ = t/λ`).
pub fn u1_trace_for_chain(h: &ChainHamiltonians, grid: &TimeGrid) -> Result<Vec<f64>> {
    let corrections = chain_corrections(h)?;
    let lambda = h.lambda();
    let taus: Vec<f64> = grid.times().iter().map(|t| t / lambda).collect();
    let mut psi0 = vec![0.0; h.n_sites()];
    psi0[0] = 1.0;
    u1_correction_trace(&corrections, &psi0, lambda, &taus)
}

fn reflection_parity(v: &[f64]) -> f64 {
    v.iter().zip(v.iter().rev()).map(|(a, b)| a * b).sum()
}

/// Angular frequency of the dominant leakage oscillation of an even chain,
/// `E_{N/2-1} - E_0` from the exact spectrum of `H_tot`.
///
/// `E_{N/2-1}` is the perturbed partner of the smallest positive interior
/// level; `E_0` is the perturbed end-site state with the same reflection
/// parity.
pub fn leakage_frequency_estimate(total: &SpectralDecomposition, n_sites: usize) -> Result<f64> {
    if n_sites < 4 || !n_sites.is_multiple_of(2) || total.dim() != n_sites {
        return Err(Error::Unsupported(format!(
            "leakage frequency estimate needs an even chain spectrum, got N = {n_sites}"
        )));
    }
    let end_weight = |v: &[f64]| v[0] * v[0] + v[n_sites - 1] * v[n_sites - 1];
    let mut order: Vec<usize> = (0..n_sites).collect();
    order.sort_by(|&a, &b| {
        end_weight(total.eigenvector(b)).total_cmp(&end_weight(total.eigenvector(a)))
    });
    let zero_states = [order[0], order[1]];
    let excited = order[2..]
        .iter()
        .copied()
        .filter(|&i| total.eigenvalues()[i] > 0.0)
        .min_by(|&a, &b| total.eigenvalues()[a].total_cmp(&total.eigenvalues()[b]))
        .ok_or_else(|| Error::Unsupported("no positive interior level".into()))?;
    let parity = reflection_parity(total.eigenvector(excited));
    let partner = zero_states
        .iter()
        .copied()
        .max_by(|&a, &b| {
            (parity * reflection_parity(total.eigenvector(a)))
                .total_cmp(&(parity * reflection_parity(total.eigenvector(b))))
        })
        .expect("two end states");
    Ok(total.eigenvalues()[excited] - total.eigenvalues()[partner])
}

/// Angular frequency of the strongest nonzero FFT bin of the mean-subtracted
/// leakage, or `None` if the window holds fewer than five oscillations.
pub fn dominant_leakage_frequency(trace: &EvolutionTrace) -> Option<f64> {
    let len = trace.leakage.len();
    if len < 8 {
        return None;
    }
    let mean = trace.leakage.iter().sum::<f64>() / len as f64;
    let mut buffer: Vec<Complex64> = trace
        .leakage
        .iter()
        .map(|x| Complex64::new(x - mean, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buffer);
    let half = len / 2;
    let (bin, _) =
        (1..half)
            .map(|i| (i, buffer[i].norm()))
            .fold((0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
    if bin < 5 {
        return None;
    }
    // Parabolic refinement of the peak position.
    let (a, b, c) = (
        buffer[bin - 1].norm(),
        buffer[bin].norm(),
        buffer[bin + 1].norm(),
    );
    let denom = a - 2.0 * b + c;
    let offset = if denom.abs() > 0.0 {
        0.5 * (a - c) / denom
    } else {
        0.0
    };
    let dt = trace.grid.t_max / trace.grid.n_steps as f64;
    Some(2.0 * PI * (bin as f64 + offset) / (len as f64 * dt))
}
