//! Degenerate perturbation theory around the zero level of the watch
//! Hamiltonian.
//!
//! Levels of `H_w` are grouped into eigenprojectors `P_n`. The zero level
//! `P_0` hosts the constrained dynamics; the reduced resolvent
//! `Q̃ = Σ_{n≠0} P_n / (-η_n)` produces the first-order effective generator
//! `λ P_0 H Q̃ H P_0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig_dense_sym, DenseMatrix, SpectralDecomposition};

#[derive(Debug, Clone, PartialEq)]
pub struct DegenerateLevel {
    pub eigenvalue: f64,
    /// Indices into the source decomposition.
    pub members: Vec<usize>,
    pub projector: DenseMatrix,
}

impl DegenerateLevel {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorSet {
    pub levels: Vec<DegenerateLevel>,
    pub grouping_tolerance: f64,
    pub zero_level_index: Option<usize>,
}

impl ProjectorSet {
    pub fn zero_level(&self) -> Option<&DegenerateLevel> {
        self.zero_level_index.map(|i| &self.levels[i])
    }

    pub fn zero_projector(&self) -> Option<&DenseMatrix> {
        self.zero_level().map(|l| &l.projector)
    }

    pub fn zero_dimension(&self) -> usize {
        self.zero_level().map_or(0, DegenerateLevel::multiplicity)
    }

    pub fn dim(&self) -> usize {
        self.levels.first().map_or(0, |l| l.projector.rows())
    }
}

/// `1e-8 · max|η|`, falling back to `1e-8` for an all-zero spectrum.
pub fn default_grouping_tolerance(d: &SpectralDecomposition) -> f64 {
    let scale = d.eigenvalues().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale > 0.0 {
        1e-8 * scale
    } else {
        1e-8
    }
}

/// Clusters consecutive eigenvalues whose gaps are at most `tol`.
///
/// A cluster whose total span exceeds `tol` could be split more than one way
/// and is reported as ambiguous.
pub fn group_levels(d: &SpectralDecomposition, tol: f64) -> Result<ProjectorSet> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid(
            "tol",
            format!("grouping tolerance must be positive, got {tol}"),
        ));
    }
    let eta = d.eigenvalues();
    let n = d.dim();
    let gaps: Vec<f64> = eta.windows(2).map(|w| w[1] - w[0]).collect();

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match clusters.last_mut() {
            Some(c) if eta[i] - eta[*c.last().unwrap()] <= tol => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    if clusters
        .iter()
        .any(|c| eta[*c.last().unwrap()] - eta[c[0]] > tol)
    {
        return Err(Error::AmbiguousGrouping { tol, gaps });
    }

    let levels: Vec<DegenerateLevel> = clusters
        .into_iter()
        .map(|members| {
            let eigenvalue = members.iter().map(|&i| eta[i]).sum::<f64>() / members.len() as f64;
            let mut projector = DenseMatrix::zeros(n, n);
            for &i in &members {
                let v = d.eigenvector(i);
                projector = projector.add(&DenseMatrix::outer(v, v));
            }
            DegenerateLevel {
                eigenvalue,
                members,
                projector,
            }
        })
        .collect();

    let zero_level_index = levels
        .iter()
        .enumerate()
        .filter(|(_, l)| l.eigenvalue.abs() < tol)
        .min_by(|(_, a), (_, b)| a.eigenvalue.abs().total_cmp(&b.eigenvalue.abs()))
        .map(|(i, _)| i);

    Ok(ProjectorSet {
        levels,
        grouping_tolerance: tol,
        zero_level_index,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveHamiltonianReport {
    pub order: u8,
    #[serde(serialize_with = "serialize_rows")]
    pub matrix: DenseMatrix,
    /// Common first-order shift when the order-0 matrix is `c · P_0`.
    pub eta1_common: Option<f64>,
}

fn serialize_rows<S: serde::Serializer>(
    m: &DenseMatrix,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.to_rows())
}

fn symmetrized(m: &DenseMatrix) -> DenseMatrix {
    m.add(&m.transpose()).scale(0.5)
}

/// `P_0 H P_0`.
pub fn hqzd_order0(p0: &DenseMatrix, h_weak: &DenseMatrix) -> EffectiveHamiltonianReport {
    let matrix = symmetrized(&p0.matmul(h_weak).matmul(p0));
    let rank = p0.trace();
    let eta1_common = if rank > 0.5 {
        let c = matrix.trace() / rank;
        let residual = matrix.sub(&p0.scale(c)).frobenius_norm();
        (residual <= 1e-10 * h_weak.frobenius_norm().max(f64::MIN_POSITIVE)).then_some(c)
    } else {
        None
    };
    EffectiveHamiltonianReport {
        order: 0,
        matrix,
        eta1_common,
    }
}

/// `Q̃ = Σ_{n≠0} P_n / (-η_n)`.
pub fn reduced_resolvent(ps: &ProjectorSet) -> Result<DenseMatrix> {
    let zero = ps.zero_level_index.ok_or(Error::MissingZeroLevel)?;
    let n = ps.dim();
    let mut q = DenseMatrix::zeros(n, n);
    for (i, level) in ps.levels.iter().enumerate() {
        if i != zero {
            q = q.add(&level.projector.scale(-1.0 / level.eigenvalue));
        }
    }
    Ok(q)
}

/// `λ P_0 H Q̃ H P_0`.
pub fn hqzd_order1(
    p0: &DenseMatrix,
    h_weak: &DenseMatrix,
    qtilde: &DenseMatrix,
    lambda: f64,
) -> EffectiveHamiltonianReport {
    let inner = h_weak.matmul(qtilde).matmul(h_weak);
    let matrix = symmetrized(&p0.matmul(&inner).matmul(p0).scale(lambda));
    EffectiveHamiltonianReport {
        order: 1,
        matrix,
        eta1_common: None,
    }
}

/// Zero-level basis that diagonalizes `P_0 H Q̃ H P_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroLevelBasis {
    pub vectors: Vec<Vec<f64>>,
    /// Second-order shifts `η⁽²⁾`, ascending, paired with `vectors`.
    pub second_order: Vec<f64>,
    /// Set when two second-order shifts coincide, leaving the basis non-unique.
    pub tied: bool,
}

pub fn zero_level_basis(
    d: &SpectralDecomposition,
    ps: &ProjectorSet,
    h_weak: &DenseMatrix,
    qtilde: &DenseMatrix,
) -> Result<ZeroLevelBasis> {
    let zero = ps.zero_level().ok_or(Error::MissingZeroLevel)?;
    let members: Vec<&[f64]> = zero.members.iter().map(|&i| d.eigenvector(i)).collect();
    let second = h_weak.matmul(qtilde).matmul(h_weak);
    let m = members.len();
    let reduced = DenseMatrix::from_fn(m, m, |a, b| {
        let hb = second.mul_vec(members[b]);
        members[a].iter().zip(&hb).map(|(x, y)| x * y).sum()
    });
    let rd = eig_dense_sym(&symmetrized(&reduced))?;
    let n = d.dim();
    let vectors: Vec<Vec<f64>> = rd
        .eigenvectors()
        .iter()
        .map(|u| {
            let mut v = vec![0.0; n];
            for (coef, member) in u.iter().zip(&members) {
                for (o, x) in v.iter_mut().zip(member.iter()) {
                    *o += coef * x;
                }
            }
            crate::linalg::fix_sign(&mut v);
            v
        })
        .collect();
    let second_order = rd.eigenvalues().to_vec();
    let scale = second_order.iter().fold(1.0_f64, |s, x| s.max(x.abs()));
    let tied = second_order
        .windows(2)
        .any(|w| (w[1] - w[0]).abs() < 1e-8 * scale);
    Ok(ZeroLevelBasis {
        vectors,
        second_order,
        tied,
    })
}

/// An unperturbed state with its first-order correction and energy
/// coefficients `η = η⁽⁰⁾ + λη⁽¹⁾ + λ²η⁽²⁾`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedState {
    pub unperturbed: Vec<f64>,
    pub correction: Vec<f64>,
    pub eta0: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub in_zero_level: bool,
}

impl PerturbedState {
    pub fn energy(&self, lambda: f64) -> f64 {
        self.eta0 + lambda * (self.eta1 + lambda * self.eta2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderCorrections {
    /// Zero-level states first (in `zero_basis` order), then one state per
    /// nonzero level in ascending energy.
    pub states: Vec<PerturbedState>,
}

impl FirstOrderCorrections {
    pub fn zero_states(&self) -> impl Iterator<Item = &PerturbedState> {
        self.states.iter().filter(|s| s.in_zero_level)
    }

    pub fn excited_states(&self) -> impl Iterator<Item = &PerturbedState> {
        self.states.iter().filter(|s| !s.in_zero_level)
    }
}

/// First-order eigenstate corrections
/// `|φ⁽¹⁾_a⟩ = Σ_{b: η_b≠η_a} |φ_b⟩ ⟨φ_b|H|φ_a⟩ / (η_a - η_b)`.
///
/// Requires a doubly degenerate zero level spanned by `zero_basis` and
/// nondegenerate remaining levels.
pub fn first_order_corrections(
    d: &SpectralDecomposition,
    ps: &ProjectorSet,
    h_weak: &DenseMatrix,
    zero_basis: &[Vec<f64>; 2],
) -> Result<FirstOrderCorrections> {
    let zero_index = ps.zero_level_index.ok_or(Error::MissingZeroLevel)?;
    let zero = &ps.levels[zero_index];
    if zero.multiplicity() != 2 {
        return Err(Error::Unsupported(format!(
            "first-order corrections need a twofold zero level, found {}",
            zero.multiplicity()
        )));
    }
    if let Some(level) = ps
        .levels
        .iter()
        .find(|l| l.multiplicity() > 1 && l.eigenvalue != zero.eigenvalue)
    {
        return Err(Error::Unsupported(format!(
            "degenerate nonzero level at {} (multiplicity {})",
            level.eigenvalue,
            level.multiplicity()
        )));
    }
    let n = d.dim();
    for (i, v) in zero_basis.iter().enumerate() {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: v.len(),
            });
        }
        let projected = zero.projector.mul_vec(v);
        let off: f64 = projected
            .iter()
            .zip(v)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if off > 1e-10 || (norm - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(
                "zero_basis",
                format!("vector {i} is not a unit vector of the zero level"),
            ));
        }
    }
    let overlap: f64 = zero_basis[0]
        .iter()
        .zip(&zero_basis[1])
        .map(|(a, b)| a * b)
        .sum();
    if overlap.abs() > 1e-10 {
        return Err(Error::invalid("zero_basis", "vectors are not orthogonal"));
    }

    let mut basis: Vec<(Vec<f64>, f64, bool)> =
        zero_basis.iter().map(|v| (v.clone(), 0.0, true)).collect();
    for (i, level) in ps.levels.iter().enumerate() {
        if i != zero_index {
            basis.push((
                d.eigenvector(level.members[0]).to_vec(),
                level.eigenvalue,
                false,
            ));
        }
    }

    let h_images: Vec<Vec<f64>> = basis.iter().map(|(v, _, _)| h_weak.mul_vec(v)).collect();
    let element = |a: usize, b: usize| -> f64 {
        basis[a]
            .0
            .iter()
            .zip(&h_images[b])
            .map(|(x, y)| x * y)
            .sum()
    };

    let states = (0..basis.len())
        .map(|a| {
            let eta_a = basis[a].1;
            let mut correction = vec![0.0; n];
            let mut eta2 = 0.0;
            for b in 0..basis.len() {
                let eta_b = basis[b].1;
                let same_level = a == b || (basis[a].2 && basis[b].2);
                if same_level {
                    continue;
                }
                let h_ba = element(b, a);
                let weight = h_ba / (eta_a - eta_b);
                eta2 += h_ba * weight;
                for (o, x) in correction.iter_mut().zip(&basis[b].0) {
                    *o += weight * x;
                }
            }
            PerturbedState {
                unperturbed: basis[a].0.clone(),
                correction,
                eta0: eta_a,
                eta1: element(a, a),
                eta2,
                in_zero_level: basis[a].2,
            }
        })
        .collect();
    Ok(FirstOrderCorrections { states })
}
