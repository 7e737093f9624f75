//! Subcommand bodies. Each returns structured results; the binary decides
//! where they are written.

use serde::Serialize;

use crate::analytic::{f_of_n, lambda_bound};
use crate::chain::{build_chain, site_state, ChainSpec};
use crate::dynamics::{simulate_chain, EvolutionTrace, LeakageReport};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym_tridiag, invert_tridiag, DenseMatrix};
use crate::perturbation::{
    default_grouping_tolerance, group_levels, hqzd_order0, hqzd_order1, reduced_resolvent,
    EffectiveHamiltonianReport,
};
use crate::qzd::{classify, QzdClassification, QzdOrder, DEFAULT_TOLERANCE};

use super::config::{RunConfig, DEFAULT_FLUCTUATE_LAMBDA_INV};
use super::parallel_map;

/// Matrix entry with one-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatrixEntry {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

fn entries(m: &DenseMatrix) -> Vec<MatrixEntry> {
    m.nonzeros(1e-12 * m.max_abs())
        .into_iter()
        .map(|(i, j, value)| MatrixEntry {
            row: i + 1,
            col: j + 1,
            value,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateSummary {
    pub delta: f64,
    pub attained_at: f64,
    pub classification_order: QzdOrder,
    /// Nonzero entries of the effective Hamiltonian of the classified order.
    pub effective_matrix_nonzeros: Vec<MatrixEntry>,
}

#[derive(Debug, Clone)]
pub struct SimulateOutcome {
    pub trace: EvolutionTrace,
    pub leakage: LeakageReport,
    pub summary: SimulateSummary,
}

pub fn classify_spec(spec: &ChainSpec) -> Result<QzdClassification> {
    let h = build_chain(spec)?;
    classify(
        &h.perturbative_watch(),
        &h.h_weak,
        &site_state(spec.n_sites, 1),
        spec.lambda(),
        DEFAULT_TOLERANCE,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveReport {
    pub n_sites: usize,
    pub lambda: f64,
    pub zero_level_dimension: usize,
    pub order0: EffectiveHamiltonianReport,
    pub order1: EffectiveHamiltonianReport,
}

pub fn effective_spec(spec: &ChainSpec) -> Result<EffectiveReport> {
    let h = build_chain(spec)?;
    let d = eig_sym_tridiag(&h.perturbative_watch())?;
    let ps = group_levels(&d, default_grouping_tolerance(&d))?;
    let p0 = ps.zero_projector().ok_or(Error::MissingZeroLevel)?;
    let weak = h.h_weak.to_dense();
    let q = reduced_resolvent(&ps)?;
    Ok(EffectiveReport {
        n_sites: spec.n_sites,
        lambda: spec.lambda(),
        zero_level_dimension: ps.zero_dimension(),
        order0: hqzd_order0(p0, &weak),
        order1: hqzd_order1(p0, &weak, &q, spec.lambda()),
    })
}

pub fn run_simulate(cfg: &RunConfig) -> Result<SimulateOutcome> {
    let spec = cfg.chain_spec()?;
    let grid = cfg.grid_for(&spec)?;
    let classification = classify_spec(&spec)?;
    let effective = effective_spec(&spec)?;
    let (trace, leakage) = simulate_chain(&spec, &grid)?;
    let matrix = match classification.order {
        QzdOrder::First | QzdOrder::HigherOrNone => &effective.order1.matrix,
        _ => &effective.order0.matrix,
    };
    let summary = SimulateSummary {
        delta: leakage.delta,
        attained_at: leakage.attained_at,
        classification_order: classification.order,
        effective_matrix_nonzeros: entries(matrix),
    };
    Ok(SimulateOutcome {
        trace,
        leakage,
        summary,
    })
}

pub fn run_classify(cfg: &RunConfig) -> Result<QzdClassification> {
    classify_spec(&cfg.chain_spec()?)
}

pub fn run_effective(cfg: &RunConfig) -> Result<EffectiveReport> {
    effective_spec(&cfg.chain_spec()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub n_sites: usize,
    pub delta0: f64,
    pub lambda_inv_bound: f64,
}

pub fn run_bound(cfg: &RunConfig) -> Result<BoundReport> {
    let n_sites = cfg.n_sites()?;
    let delta0 = cfg.delta0();
    Ok(BoundReport {
        n_sites,
        delta0,
        lambda_inv_bound: lambda_bound(n_sites, delta0)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub g: f64,
    pub n_sites: usize,
    pub lambda_inv: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepMean {
    pub g: f64,
    pub mean_delta: f64,
    /// `max |δ - δ̄| / δ̄` over the N grid.
    pub max_relative_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub means: Vec<SweepMean>,
    /// Least-squares slope through the origin of `δ̄` against `G²`.
    pub slope: f64,
    pub fit_points: usize,
}

/// Fit regime of the leakage law.
pub const SWEEP_FIT_LIMIT: f64 = 0.2;

/// Slope of `y = s·x` minimizing squared residuals.
pub fn fit_through_origin(points: &[(f64, f64)]) -> Option<f64> {
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn run_sweep(cfg: &RunConfig) -> Result<SweepResult> {
    let g_list = cfg.g_list();
    let n_list = cfg.n_list();
    if g_list.is_empty() {
        return Err(Error::invalid("g_list", "empty grid"));
    }
    if n_list.is_empty() {
        return Err(Error::invalid("n_list", "empty grid"));
    }
    let mut cells = Vec::with_capacity(g_list.len() * n_list.len());
    for &g in &g_list {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::invalid(
                "g_list",
                format!("G must be positive, got {g}"),
            ));
        }
        for &n in &n_list {
            let lambda_inv = f_of_n(n)? / g;
            let spec = ChainSpec::new(n, lambda_inv).with_k(cfg.k());
            spec.validate()?;
            cells.push((g, spec));
        }
    }
    let rows = parallel_map(&cells, |(g, spec)| {
        let grid = cfg.grid_for(spec)?;
        let (_, report) = simulate_chain(spec, &grid)?;
        Ok(SweepRow {
            g: *g,
            n_sites: spec.n_sites,
            lambda_inv: spec.lambda_inv,
            delta: report.delta,
        })
    })?;

    let means: Vec<SweepMean> = rows
        .chunks(n_list.len())
        .map(|chunk| {
            let mean = chunk.iter().map(|r| r.delta).sum::<f64>() / chunk.len() as f64;
            let dev = chunk
                .iter()
                .map(|r| (r.delta - mean).abs() / mean)
                .fold(0.0, f64::max);
            SweepMean {
                g: chunk[0].g,
                mean_delta: mean,
                max_relative_deviation: dev,
            }
        })
        .collect();
    let points: Vec<(f64, f64)> = means
        .iter()
        .filter(|m| m.mean_delta < SWEEP_FIT_LIMIT)
        .map(|m| (m.g * m.g, m.mean_delta))
        .collect();
    let slope = fit_through_origin(&points).ok_or_else(|| {
        Error::Unsupported(format!(
            "no sweep point with mean delta below {SWEEP_FIT_LIMIT}"
        ))
    })?;
    Ok(SweepResult {
        rows,
        means,
        slope,
        fit_points: points.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluctuationRow {
    pub seed_offset: u64,
    /// `⟨2|Q̃|N-1⟩` from inverting the fluctuating interior block.
    pub corner_element: f64,
    pub delta: f64,
}

/// `⟨2|Q̃|N-1⟩ = -[(H'_w)⁻¹]_{2,N-1}` for the interior block of `spec`.
pub fn corner_by_inversion(spec: &ChainSpec) -> Result<f64> {
    let h = build_chain(spec)?;
    let inverse = invert_tridiag(&h.interior_block())?;
    Ok(-inverse[(0, inverse.cols() - 1)])
}

pub fn run_fluctuate(cfg: &RunConfig) -> Result<Vec<FluctuationRow>> {
    let n_sites = cfg.n_sites()?;
    if n_sites % 2 != 0 {
        return Err(Error::invalid(
            "n",
            format!("fluctuation study needs an even chain, got {n_sites}"),
        ));
    }
    let amplitude = cfg
        .amplitude
        .ok_or_else(|| Error::invalid("amplitude", "required"))?;
    let trials = cfg.trials();
    if trials == 0 {
        return Err(Error::invalid("trials", "need at least one trial"));
    }
    let base = ChainSpec::new(
        n_sites,
        cfg.lambda_inv.unwrap_or(DEFAULT_FLUCTUATE_LAMBDA_INV),
    )
    .with_k(cfg.k());
    let base_grid = cfg.grid_for(&base)?;
    let seed = cfg.seed();
    let specs: Vec<(u64, ChainSpec)> = (0..trials as u64)
        .map(|offset| {
            (
                offset,
                base.clone()
                    .with_fluctuation(amplitude, seed.wrapping_add(offset)),
            )
        })
        .collect();
    for (_, spec) in &specs {
        spec.validate()?;
    }
    parallel_map(&specs, |(offset, spec)| {
        let (_, report) = simulate_chain(spec, &base_grid)?;
        Ok(FluctuationRow {
            seed_offset: *offset,
            corner_element: corner_by_inversion(spec)?,
            delta: report.delta,
        })
    })
}
