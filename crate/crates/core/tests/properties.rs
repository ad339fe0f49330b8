mod common;

use common::*;
use proptest::prelude::*;
use qdynmaps::affine::{
    choi_min_eigenvalue, compose, extract_map, fixed_points, is_cptp, is_gibbs_preserving, is_phase_covariant, iterate,
    pc_cp_inequalities,
};
use qdynmaps::constructions::{phi_gp_3qubit, phi_pc, solve_gp_constraints};
use qdynmaps::linalg::{self, ComplexMatrix};
use qdynmaps::pauli::{self, PauliDecomposition, PauliString, PauliTermRecord};
use qdynmaps::state::product_state;
use qdynmaps::thermo::{coherence_trajectory, convergence_steps, delta_d, relative_entropy};
use qdynmaps::u1::{build_xx_hamiltonian_2q, build_xx_hamiltonian_3q, is_u1_symmetric, random_u1_unitary};
use qdynmaps::{AffineMap, BlochVector};

fn bloch_strategy(r_max: f64) -> impl Strategy<Value = BlochVector> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("inside ball", |(x, y, z)| x * x + y * y + z * z <= 1.0)
        .prop_map(move |(x, y, z)| BlochVector::new(x * r_max, y * r_max, z * r_max))
}

fn map_strategy() -> impl Strategy<Value = AffineMap> {
    (
        prop::array::uniform3(-0.5..0.5f64),
        prop::array::uniform3(prop::array::uniform3(-0.6..0.6f64)),
    )
        .prop_map(|(tau, t)| AffineMap::from_rows(tau, t))
}

fn diagonal_state(p: &[f64]) -> ComplexMatrix {
    let sites: Vec<BlochVector> = p.iter().map(|&z| BlochVector::new(0.0, 0.0, z)).collect();
    product_state(&sites).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn u1_unitaries_contain_only_even_charge_strings(n in 1usize..=4, seed in any::<u64>()) {
        let u = random_u1_unitary(n, seed).unwrap();
        let d = pauli::decompose(&u.matrix).unwrap();
        prop_assert!(d.terms().keys().all(|s| s.charge() == 1));
        prop_assert!(linalg::unitarity_residual(&u.matrix) < 1e-12);
    }

    #[test]
    fn conjugation_preserves_charge(n in 2usize..=4, seed in any::<u64>(), k in any::<usize>()) {
        let u = random_u1_unitary(n, seed).unwrap();
        let s = PauliString::from_index(n, k % (1 << (2 * n)));
        let d = pauli::conjugate_decompose(&u.matrix, &s).unwrap();
        prop_assert!(d.terms().keys().all(|o| o.charge() == s.charge()));
        prop_assert!(linalg::max_abs(&(d.reconstruct() - &u.matrix * s.matrix() * u.matrix.adjoint())) < 1e-12);
    }

    #[test]
    fn decomposition_round_trips(n in 1usize..=3, entries in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 64)) {
        let dim = 1 << n;
        let m = ComplexMatrix::from_fn(dim, dim, |i, j| {
            let (re, im) = entries[i * dim + j];
            cx(re, im)
        });
        let d = pauli::decompose(&m).unwrap();
        prop_assert!(linalg::max_abs(&(d.reconstruct() - &m)) < 1e-12);
        let records: Vec<PauliTermRecord> = serde_json::from_str(&d.to_json()).unwrap();
        prop_assert_eq!(PauliDecomposition::from_records(&records).unwrap(), d);
    }

    #[test]
    fn string_product_matches_matrix_product(n in 1usize..=3, a in any::<usize>(), b in any::<usize>()) {
        let total = 1 << (2 * n);
        let (p, q) = (PauliString::from_index(n, a % total), PauliString::from_index(n, b % total));
        let (phase, r) = p.mul(&q).unwrap();
        prop_assert!(linalg::max_abs(&(p.matrix() * q.matrix() - r.matrix() * phase)) < 1e-15);
        prop_assert_eq!(r.charge(), p.charge() * q.charge());
    }

    #[test]
    fn xx_evolutions_are_u1(h1 in -3.0..3.0f64, h2 in -3.0..3.0f64, j in -3.0..3.0f64, t in 0.0..5.0f64) {
        let u2 = linalg::expm_hermitian(&build_xx_hamiltonian_2q(h1, h2, j), t).unwrap();
        prop_assert!(is_u1_symmetric(&u2, 1e-12));
        let u3 = linalg::expm_hermitian(&build_xx_hamiltonian_3q(h1, j), t).unwrap();
        prop_assert!(is_u1_symmetric(&u3, 1e-12));
    }

    #[test]
    fn extraction_is_affine(seed in any::<u64>(), n in 2usize..=3, env in prop::collection::vec(bloch_strategy(1.0), 2), probe in bloch_strategy(1.0)) {
        let u = random_u1_unitary(n, seed).unwrap().matrix;
        let env_sites = &env[..n - 1];
        let env_rho = product_state(env_sites).unwrap();
        let m = extract_map(&u, n, 0, &env_rho, None).unwrap();
        // direct evolution of an input outside the probing set
        let direct = bloch(&keep_first(&(&u * kr(&[dm(probe.0), env_rho.clone()]) * u.adjoint()), n));
        prop_assert!((m.apply(&probe).to_vector() - direct).norm() < 1e-12);
        prop_assert!(is_cptp(&m, 1e-10));
    }

    #[test]
    fn maps_from_product_states_are_cptp(seed in any::<u64>(), n in 2usize..=4, site in 0usize..4, zs in prop::collection::vec(-1.0..1.0f64, 3), b in bloch_strategy(1.0)) {
        let u = random_u1_unitary(n, seed).unwrap().matrix;
        let site = site % n;
        let mut env: Vec<BlochVector> = zs[..n - 1].iter().map(|&z| BlochVector::new(0.0, 0.0, z)).collect();
        env[0] = b;
        let m = extract_map(&u, n, site, &product_state(&env).unwrap(), None).unwrap();
        prop_assert!(choi_min_eigenvalue(&m) > -1e-10);
    }

    #[test]
    fn diagonal_environments_give_no_transverse_shift(seed in any::<u64>(), n in 2usize..=4, zs in prop::collection::vec(-1.0..1.0f64, 3)) {
        let u = random_u1_unitary(n, seed).unwrap().matrix;
        let m = extract_map(&u, n, 0, &diagonal_state(&zs[..n - 1]), None).unwrap();
        prop_assert!(m.tau[0].abs() < 1e-12 && m.tau[1].abs() < 1e-12);
    }

    #[test]
    fn composition_and_iteration(m1 in map_strategy(), m2 in map_strategy(), a in bloch_strategy(1.0)) {
        let lhs = compose(&m2, &m1).apply(&a);
        prop_assert!(lhs.distance(&m2.apply(&m1.apply(&a))) < 1e-14);
        let traj = iterate(&m1, &a, 5);
        let mut x = a;
        for state in traj.iter().skip(1) {
            x = m1.apply(&x);
            prop_assert_eq!(*state, x);
        }
    }

    #[test]
    fn fixed_points_are_fixed(m in map_strategy()) {
        let fp = fixed_points(&m).unwrap();
        prop_assert!(m.apply(&fp.bloch).distance(&fp.bloch) < 1e-12);
    }

    #[test]
    fn phase_covariance_is_rotation_commutation(
        lambda in -0.7..0.7f64, lz in -0.7..0.7f64, tz in -0.3..0.3f64, phi in -3.0..3.0f64,
        perturb in prop::option::of((0usize..8, 0.01..0.3f64)),
        angles in prop::collection::vec(-3.1..3.1f64, 20),
    ) {
        let mut m = AffineMap::phase_covariant(lambda, lz, tz, phi);
        if let Some((slot, eps)) = perturb {
            match slot {
                0 => m.tau[0] += eps,
                1 => m.tau[1] += eps,
                2 => m.t[(0, 2)] += eps,
                3 => m.t[(1, 2)] += eps,
                4 => m.t[(2, 0)] += eps,
                5 => m.t[(2, 1)] += eps,
                6 => m.t[(0, 0)] += eps,
                _ => m.t[(0, 1)] += eps,
            }
        }
        let commutes = angles.iter().all(|&al| {
            let r = AffineMap::z_rotation(al);
            compose(&r, &m).max_abs_diff(&compose(&m, &r)) < 1e-9
        });
        prop_assert_eq!(commutes, is_phase_covariant(&m, 1e-9));
        prop_assert_eq!(is_phase_covariant(&m, 1e-9), perturb.is_none());
    }

    #[test]
    fn relative_entropy_is_nonnegative(a in bloch_strategy(0.999), b in bloch_strategy(0.999)) {
        let d = relative_entropy(&a.density().unwrap(), &b.density().unwrap()).unwrap().value();
        prop_assert!(d >= 0.0);
        if a.distance(&b) > 1e-3 {
            prop_assert!(d > 1e-10);
        }
        prop_assert!(relative_entropy(&a.density().unwrap(), &a.density().unwrap()).unwrap().value() < 1e-10);
    }

    #[test]
    fn phase_covariant_maps_preserve_their_gibbs_state(j in 0.05..1.5f64, h in -2.0..2.0f64, b3 in -1.0..1.0f64) {
        let m = phi_pc(j, h, b3, 1.0);
        let r_g = fixed_points(&m).unwrap().bloch.z();
        prop_assert!(is_gibbs_preserving(&m, r_g, 1e-10).unwrap());
        prop_assert!(delta_d(&m, &BlochVector::new(0.0, 0.0, r_g), r_g).unwrap() < 1e-10);
        let traj = coherence_trajectory(&m, &BlochVector::new(0.0, 0.0, 0.7), 30);
        prop_assert!(traj.iter().all(|&c| c < 1e-12));
    }

    #[test]
    fn gibbs_preserving_three_qubit_maps_have_null_delta_d(b3 in 0.05..0.95f64, frac in 0.05..0.95f64, f1 in -0.3..0.3f64, f2 in -0.3..0.3f64, h in -2.0..2.0f64) {
        let r_g = -frac * b3;
        let sol = solve_gp_constraints(b3, r_g).unwrap();
        prop_assume!(sol.feasible && f1 * f1 + f2 * f2 + sol.f3 * sol.f3 <= 1.0);
        let m = phi_gp_3qubit(&sol.params(h, f1, f2).unwrap(), 1.0).unwrap();
        prop_assert!(delta_d(&m, &BlochVector::new(0.0, 0.0, r_g), r_g).unwrap() < 1e-10);
    }

    #[test]
    fn convergence_is_monotone_in_epsilon(m in map_strategy(), a in bloch_strategy(1.0), e1 in 1e-12..1e-2f64, e2 in 1e-12..1e-2f64) {
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let tight = convergence_steps(&m, &a, lo, 2000).unwrap();
        let loose = convergence_steps(&m, &a, hi, 2000).unwrap();
        prop_assert!(loose.steps <= tight.steps);
    }
}

#[test]
fn phase_covariant_cp_criterion_agrees_with_choi() {
    let mut r = rng(11);
    let mut compared = 0;
    for _ in 0..10_000 {
        let (l, lz, tz) = (
            uniform(&mut r, -1.0, 1.0),
            uniform(&mut r, -1.0, 1.0),
            uniform(&mut r, -1.0, 1.0),
        );
        // stay off the boundary where either side is decided by round-off
        let margin = (1.0 - lz.abs() - tz.abs())
            .abs()
            .min(((1.0 + lz).powi(2) - 4.0 * l * l - tz * tz).abs());
        if margin < 1e-9 {
            continue;
        }
        let m = AffineMap::phase_covariant(l, lz, tz, 0.0);
        assert_eq!(is_cptp(&m, 1e-12), pc_cp_inequalities(l, lz, tz), "{l} {lz} {tz}");
        compared += 1;
    }
    assert!(compared > 9_900);
}
