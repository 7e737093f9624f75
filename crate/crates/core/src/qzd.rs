//! Order classification of coherent Zeno dynamics and the two
//! prerequisites for first-order dynamics.

use serde::Serialize;

use crate::dynamics::LeakageReport;
use crate::error::{Error, Result};
use crate::linalg::{eig_sym_tridiag, DenseMatrix, SymTridiag};
use crate::perturbation::{
    default_grouping_tolerance, group_levels, hqzd_order0, hqzd_order1, reduced_resolvent,
};

/// Default relative tolerance for the proportionality and commutator tests.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QzdOrder {
    NoDynamics,
    Zeroth,
    First,
    HigherOrNone,
}

impl QzdOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            QzdOrder::NoDynamics => "no_dynamics",
            QzdOrder::Zeroth => "zeroth",
            QzdOrder::First => "first",
            QzdOrder::HigherOrNone => "higher_or_none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QzdClassification {
    pub watch_annihilates_initial: bool,
    pub zero_level_dimension: usize,
    pub order: QzdOrder,
    pub prerequisite_i: bool,
    /// `‖[H⁽⁰⁾, ρ0]‖_F`.
    pub commutator_order0: f64,
    /// `‖[λH⁽¹⁾, ρ0]‖_F`, absent when the first-order term was not needed.
    pub commutator_order1: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrerequisiteIIResult {
    pub delta: f64,
    pub delta_threshold: f64,
    pub passed: bool,
    pub attained_at: f64,
}

fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Classifies the coherent-Zeno order of `(H_w, H, ψ0)`.
///
/// `h_watch` is the perturbative strong part (including any `λΔω` shift) and
/// `lambda` scales the first-order term.
pub fn classify(
    h_watch: &SymTridiag,
    h_weak: &SymTridiag,
    psi0: &[f64],
    lambda: f64,
    tol: f64,
) -> Result<QzdClassification> {
    let n = h_watch.size();
    if h_weak.size() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: h_weak.size(),
        });
    }
    if psi0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: psi0.len(),
        });
    }
    if (vec_norm(psi0) - 1.0).abs() > 1e-10 {
        return Err(Error::invalid("psi0", "initial state must be normalized"));
    }
    let residual = vec_norm(&h_watch.mul_vec(psi0));
    if residual > tol * h_watch.max_abs().max(1.0) {
        return Err(Error::NotAnnihilated { residual });
    }

    let d = eig_sym_tridiag(h_watch)?;
    let ps = group_levels(&d, default_grouping_tolerance(&d))?;
    let mut notes = Vec::new();
    let Some(p0) = ps.zero_projector() else {
        return Err(Error::MissingZeroLevel);
    };
    let zero_level_dimension = ps.zero_dimension();
    let weak = h_weak.to_dense();
    let rho0 = DenseMatrix::outer(psi0, psi0);
    let order0 = hqzd_order0(p0, &weak);
    let commutator_order0 = order0.matrix.commutator(&rho0).frobenius_norm();

    let mut out = QzdClassification {
        watch_annihilates_initial: true,
        zero_level_dimension,
        order: QzdOrder::NoDynamics,
        prerequisite_i: false,
        commutator_order0,
        commutator_order1: None,
        notes: Vec::new(),
    };

    if zero_level_dimension < 2 {
        notes.push("zero level is one-dimensional; no room for constrained transitions".into());
        out.notes = notes;
        return Ok(out);
    }
    if commutator_order0 > tol * order0.matrix.frobenius_norm() {
        notes.push("P0 H P0 does not commute with the initial state".into());
        out.order = QzdOrder::Zeroth;
        out.notes = notes;
        return Ok(out);
    }

    let c = order0.matrix.trace() / p0.trace();
    let proportional = order0.matrix.sub(&p0.scale(c)).frobenius_norm()
        < tol * weak.frobenius_norm().max(f64::MIN_POSITIVE);
    if !proportional {
        notes
            .push("initial state is an eigenstate of P0 H P0; every order commutes with it".into());
        out.notes = notes;
        return Ok(out);
    }

    let q = reduced_resolvent(&ps)?;
    let order1 = hqzd_order1(p0, &weak, &q, lambda);
    let commutator_order1 = order1.matrix.commutator(&rho0).frobenius_norm();
    out.commutator_order1 = Some(commutator_order1);
    if commutator_order1 > tol * order1.matrix.frobenius_norm() {
        out.order = QzdOrder::First;
        out.prerequisite_i = true;
        notes.push(format!(
            "P0 H P0 = {c} P0; first-order term drives the dynamics"
        ));
    } else {
        out.order = QzdOrder::HigherOrNone;
        notes.push("first-order term commutes with the initial state".into());
    }
    out.notes = notes;
    Ok(out)
}

/// Prerequisite (II): the measured leakage stays below `delta0`.
pub fn check_prerequisite_ii(report: &LeakageReport, delta0: f64) -> Result<PrerequisiteIIResult> {
    if !(delta0 > 0.0 && delta0 < 1.0) {
        return Err(Error::invalid(
            "delta0",
            format!("must lie in (0, 1), got {delta0}"),
        ));
    }
    Ok(PrerequisiteIIResult {
        delta: report.delta,
        delta_threshold: delta0,
        passed: report.delta < delta0,
        attained_at: report.attained_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_chain, site_state, ChainSpec};
    use crate::dynamics::GridSummary;

    fn classify_spec(spec: &ChainSpec) -> QzdClassification {
        let h = build_chain(spec).unwrap();
        let psi0 = site_state(spec.n_sites, 1);
        classify(
            &h.perturbative_watch(),
            &h.h_weak,
            &psi0,
            spec.lambda(),
            DEFAULT_TOLERANCE,
        )
        .unwrap()
    }

    #[test]
    fn even_four_sites_is_first_order() {
        let c = classify_spec(&ChainSpec::new(4, 20.0));
        assert_eq!(c.order, QzdOrder::First);
        assert!(c.prerequisite_i);
        assert_eq!(c.zero_level_dimension, 2);
        assert_eq!(c.commutator_order0, 0.0);
    }

    #[test]
    fn odd_five_sites_is_zeroth_order() {
        let c = classify_spec(&ChainSpec::new(5, 20.0));
        assert_eq!(c.order, QzdOrder::Zeroth);
        assert!(!c.prerequisite_i);
        assert_eq!(c.zero_level_dimension, 3);
    }

    #[test]
    fn modified_odd_is_first_order() {
        let c = classify_spec(&ChainSpec::new(5, 20.0).with_delta_omega(20.0));
        assert_eq!(c.order, QzdOrder::First);
        assert_eq!(c.zero_level_dimension, 2);
    }

    #[test]
    fn interior_initial_state_violates_assumption() {
        let h = build_chain(&ChainSpec::new(6, 5.0)).unwrap();
        let psi0 = site_state(6, 3);
        let r = classify(&h.h_watch, &h.h_weak, &psi0, 0.2, DEFAULT_TOLERANCE);
        assert!(matches!(r, Err(Error::NotAnnihilated { .. })));
    }

    #[test]
    fn zero_level_eigenstate_has_no_dynamics() {
        // Four-level system with a two-site zero level, started in an eigenstate of P0 H P0.
        let watch = SymTridiag::new(vec![0.0; 4], vec![0.0, 0.0, 1.0]).unwrap();
        let weak = SymTridiag::new(vec![0.0; 4], vec![1.0, 1.0, 0.0]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = classify(&watch, &weak, &[r, r, 0.0, 0.0], 0.1, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(c.order, QzdOrder::NoDynamics);
        let c = classify(&watch, &weak, &[1.0, 0.0, 0.0, 0.0], 0.1, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(c.order, QzdOrder::Zeroth);
    }

    #[test]
    fn one_dimensional_zero_level() {
        let watch = SymTridiag::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let weak = SymTridiag::new(vec![0.0; 3], vec![1.0, 1.0]).unwrap();
        let c = classify(&watch, &weak, &[1.0, 0.0, 0.0], 0.1, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(c.order, QzdOrder::NoDynamics);
        assert_eq!(c.zero_level_dimension, 1);
    }

    fn report(delta: f64) -> LeakageReport {
        LeakageReport {
            delta,
            attained_at: 1.0,
            window: GridSummary {
                t_max: 2.0,
                n_steps: 10,
            },
        }
    }

    #[test]
    fn prerequisite_ii_cases() {
        assert!(!check_prerequisite_ii(&report(0.138), 0.1).unwrap().passed);
        assert!(check_prerequisite_ii(&report(0.01), 0.1).unwrap().passed);
        assert!(check_prerequisite_ii(&report(0.0), 1e-6).unwrap().passed);
        assert!(check_prerequisite_ii(&report(0.0), 1.0).is_err());
        assert!(check_prerequisite_ii(&report(0.0), 0.0).is_err());
    }
}
