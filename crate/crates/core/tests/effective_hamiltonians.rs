mod common;

use common::{cofactor_det, gauss_inverse, tridiag_dense};
use zeno_chain::analytic::{big_g, g_n, hqzd0_odd, hqzd1_even, hqzd1_odd_modified, phi_mid};
use zeno_chain::chain::{build_chain, ChainSpec};
use zeno_chain::linalg::{det_tridiag, eig_sym_tridiag, DenseMatrix, SymTridiag};
use zeno_chain::perturbation::{
    default_grouping_tolerance, first_order_corrections, group_levels, hqzd_order0, hqzd_order1,
    reduced_resolvent, zero_level_basis, ProjectorSet,
};

struct Route {
    ps: ProjectorSet,
    weak: DenseMatrix,
    q: DenseMatrix,
    watch: SymTridiag,
}

fn route(spec: &ChainSpec) -> Route {
    let h = build_chain(spec).unwrap();
    let watch = h.perturbative_watch();
    let d = eig_sym_tridiag(&watch).unwrap();
    let ps = group_levels(&d, default_grouping_tolerance(&d)).unwrap();
    let q = reduced_resolvent(&ps).unwrap();
    Route {
        ps,
        weak: h.h_weak.to_dense(),
        q,
        watch,
    }
}

fn max_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.sub(b).max_abs()
}

#[test]
fn even_first_order_matches_closed_form() {
    for n in (4..=20).step_by(2) {
        for (k, lambda_inv) in [(1.0, 20.0), (0.6, 7.5)] {
            let spec = ChainSpec::new(n, lambda_inv).with_k(k);
            let r = route(&spec);
            let p0 = r.ps.zero_projector().unwrap();
            let numeric = hqzd_order1(p0, &r.weak, &r.q, spec.lambda()).matrix;
            let closed = hqzd1_even(n, k, spec.lambda()).unwrap();
            assert!(max_diff(&numeric, &closed) < 1e-10, "N={n} k={k}");
            // Zeroth order vanishes on even chains.
            assert!(hqzd_order0(p0, &r.weak).matrix.max_abs() < 1e-12);
        }
    }
}

#[test]
fn modified_odd_first_order_matches_closed_form() {
    for n in [5, 7, 9] {
        for lambda_inv in [20.0, 50.0] {
            let k = 1.0;
            let dw = lambda_inv * k;
            let spec = ChainSpec::new(n, lambda_inv).with_delta_omega(dw);
            let r = route(&spec);
            assert_eq!(r.ps.zero_dimension(), 2);
            let p0 = r.ps.zero_projector().unwrap();
            let numeric = hqzd_order1(p0, &r.weak, &r.q, spec.lambda()).matrix;
            let closed = hqzd1_odd_modified(n, k, dw).unwrap();
            assert!(
                max_diff(&numeric, &closed) < 1e-8,
                "N={n} lambda_inv={lambda_inv}"
            );
        }
    }
}

#[test]
fn odd_zeroth_order_matches_closed_form() {
    for n in (5..=29).step_by(2) {
        for k in [1.0, 1.7] {
            let r = route(&ChainSpec::new(n, 20.0).with_k(k));
            assert_eq!(r.ps.zero_dimension(), 3);
            let numeric = hqzd_order0(r.ps.zero_projector().unwrap(), &r.weak).matrix;
            let closed = hqzd0_odd(n, k).unwrap();
            assert!(max_diff(&numeric, &closed) < 1e-10, "N={n}");
            assert_eq!(closed[(0, n - 1)], 0.0);
            let mid = phi_mid(n).unwrap();
            let residual = r
                .watch
                .mul_vec(&mid)
                .iter()
                .fold(0.0_f64, |m, x| m.max(x.abs()));
            assert!(residual < 1e-12);
        }
    }
}

/// `Q̃` restricted to the interior equals `-(H'_w)⁻¹` and vanishes elsewhere.
fn check_resolvent(spec: &ChainSpec) {
    let r = route(spec);
    let n = spec.n_sites;
    let interior = r.watch.sub_block(1, n - 1);
    let oracle = gauss_inverse(&tridiag_dense(interior.diag(), interior.offdiag())).unwrap();
    for i in 0..n {
        for j in 0..n {
            let expected = if (1..n - 1).contains(&i) && (1..n - 1).contains(&j) {
                -oracle[i - 1][j - 1]
            } else {
                0.0
            };
            assert!((r.q[(i, j)] - expected).abs() < 1e-10, "N={n} ({i},{j})");
        }
    }
}

#[test]
fn reduced_resolvent_is_minus_interior_inverse() {
    for n in (4..=30).step_by(2) {
        check_resolvent(&ChainSpec::new(n, 20.0));
    }
    for n in [5, 7, 9, 11] {
        check_resolvent(&ChainSpec::new(n, 20.0).with_delta_omega(20.0));
    }
    check_resolvent(&ChainSpec::new(10, 20.0).with_fluctuation(0.1, 3));
}

#[test]
fn shifted_interior_determinant_identity() {
    for n in (5..=15).step_by(2) {
        for (k, shift) in [(1.0, 1.0), (0.8, 0.37), (1.3, -2.1)] {
            let interior = SymTridiag::toeplitz(n - 2, 0.0, k).with_diag_shift(0, shift);
            let expected =
                if ((n - 3) / 2) % 2 == 0 { 1.0 } else { -1.0 } * k.powi(n as i32 - 3) * shift;
            let det = det_tridiag(&interior);
            assert!((det - expected).abs() <= 1e-8 * expected.abs(), "N={n}");
            let oracle = cofactor_det(&tridiag_dense(interior.diag(), interior.offdiag()));
            assert!(
                (oracle - expected).abs() <= 1e-8 * expected.abs(),
                "oracle N={n}"
            );
        }
    }
}

/// Perturbed energies `η0 + λη1 + λ²η2` against exact eigenvalues of
/// `H_w + λH` for small `λ`.
#[test]
fn second_order_energies_match_finite_perturbation() {
    for (n, dw) in [(4, None), (6, None), (8, None), (5, Some(1.0))] {
        let spec = match dw {
            Some(shift) => ChainSpec::new(n, 20.0).with_delta_omega(shift * 20.0),
            None => ChainSpec::new(n, 20.0),
        };
        let r = route(&spec);
        let d = eig_sym_tridiag(&r.watch).unwrap();
        let basis = zero_level_basis(&d, &r.ps, &r.weak, &r.q).unwrap();
        let corrections = first_order_corrections(
            &d,
            &r.ps,
            &r.weak,
            &[basis.vectors[0].clone(), basis.vectors[1].clone()],
        )
        .unwrap();
        let h = build_chain(&spec).unwrap();
        for lambda in [1e-3, 1e-4] {
            let exact = eig_sym_tridiag(&r.watch.add(&h.h_weak.scaled(lambda)).unwrap()).unwrap();
            for s in &corrections.states {
                let predicted = s.energy(lambda);
                let nearest = exact
                    .eigenvalues()
                    .iter()
                    .map(|e| (e - predicted).abs())
                    .fold(f64::INFINITY, f64::min);
                // Third-order remainder.
                assert!(
                    nearest < 50.0 * lambda.powi(3),
                    "N={n} lambda={lambda} err={nearest}"
                );
            }
            // First-order eigenvector corrections: |v(λ) - φ - λφ1| = O(λ²).
            for s in corrections.zero_states() {
                let guess: Vec<f64> = s
                    .unperturbed
                    .iter()
                    .zip(&s.correction)
                    .map(|(a, b)| a + lambda * b)
                    .collect();
                let best = exact
                    .eigenvectors()
                    .iter()
                    .map(|v| {
                        let dot: f64 = v.iter().zip(&guess).map(|(a, b)| a * b).sum();
                        v.iter()
                            .zip(&guess)
                            .map(|(a, b)| (a * dot.signum() - b).powi(2))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(f64::INFINITY, f64::min);
                assert!(best < 50.0 * lambda * lambda, "N={n} vector error {best}");
            }
        }
    }
}

/// Mixing amplitudes `λ⟨n|H|0α⟩/η_n` reproduce `|g_n|` and their maximum is `G`.
#[test]
fn mixing_coefficients_match_g() {
    for n in (4..=24).step_by(2) {
        let lambda = 0.05;
        let r = route(&ChainSpec::new(n, 1.0 / lambda));
        let zero_members: Vec<Vec<f64>> = {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let mut plus = vec![0.0; n];
            let mut minus = vec![0.0; n];
            plus[0] = s;
            plus[n - 1] = s;
            minus[0] = s;
            minus[n - 1] = -s;
            vec![plus, minus]
        };
        let mut largest: f64 = 0.0;
        let d = eig_sym_tridiag(&r.watch).unwrap();
        for (eta, x) in d.eigenvalues().iter().zip(d.eigenvectors()) {
            if eta.abs() < 1e-9 {
                continue;
            }
            let hx = r.weak.mul_vec(x);
            let amplitudes: Vec<f64> = zero_members
                .iter()
                .map(|z| lambda * z.iter().zip(&hx).map(|(a, b)| a * b).sum::<f64>() / eta)
                .collect();
            let coupled = amplitudes.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
            // Identify the mode index from the closed-form spectrum.
            let idx = (1..=n - 2)
                .min_by(|&a, &b| {
                    let ea = 2.0 * (a as f64 * std::f64::consts::PI / (n - 1) as f64).cos();
                    let eb = 2.0 * (b as f64 * std::f64::consts::PI / (n - 1) as f64).cos();
                    (ea - eta).abs().total_cmp(&(eb - eta).abs())
                })
                .unwrap();
            assert!(
                (coupled - g_n(n, lambda, idx).unwrap().abs()).abs() < 1e-12,
                "N={n} mode {idx}"
            );
            // Each interior mode couples to exactly one parity sector.
            assert!(amplitudes.iter().filter(|a| a.abs() > 1e-12).count() == 1);
            largest = largest.max(coupled);
        }
        assert!((largest - big_g(n, lambda).unwrap()).abs() < 1e-12, "N={n}");
    }
}
