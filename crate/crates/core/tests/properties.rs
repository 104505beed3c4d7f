use kicktop::linalg::{max_abs_diff, unitarity_residual};
use kicktop::measurement::{conditional, dephase, unconditional};
use kicktop::metrics::{coherence_l1, delta, hellinger, participation};
use kicktop::top::build_floquet;
use kicktop::{Axis, CVector, DensityState, OutcomeDistribution, SpinSystem, TopParams};
use num_complex::Complex64;
use proptest::prelude::*;

fn distribution(len: usize) -> impl Strategy<Value = OutcomeDistribution> {
    prop::collection::vec(0.0f64..1.0, len)
        .prop_filter("non-zero", |w| w.iter().sum::<f64>() > 1e-3)
        .prop_map(|w| {
            let total: f64 = w.iter().sum();
            OutcomeDistribution::from_probs(w.iter().map(|x| x / total).collect()).unwrap()
        })
}

fn pure_state(dim: usize) -> impl Strategy<Value = DensityState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("non-zero", |v| {
            v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3
        })
        .prop_map(|v| {
            let psi = CVector::from_iterator(v.len(), v.iter().map(|&(a, b)| Complex64::new(a, b)));
            DensityState::pure(&psi.normalize()).unwrap()
        })
}

fn axis() -> impl Strategy<Value = Axis> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("non-zero", |(x, y, z)| x * x + y * y + z * z > 1e-2)
        .prop_map(|(x, y, z)| Axis::from_direction(x, y, z).unwrap())
}

proptest! {
    #[test]
    fn hellinger_is_a_bounded_metric(
        (p, q, r) in (2usize..12).prop_flat_map(|d| (distribution(d), distribution(d), distribution(d)))
    ) {
        let pq = hellinger(&p, &q).unwrap();
        prop_assert!((0.0..=1.0).contains(&pq));
        prop_assert!((pq - hellinger(&q, &p).unwrap()).abs() < 1e-15);
        prop_assert!(hellinger(&p, &p).unwrap() < 1e-7);
        let pr = hellinger(&p, &r).unwrap();
        let rq = hellinger(&r, &q).unwrap();
        prop_assert!(pq <= pr + rq + 1e-12);
    }

    #[test]
    fn participation_bounds_and_permutation(p in (1usize..16).prop_flat_map(distribution), shift in 0usize..16) {
        let d = p.len();
        let pr = participation(&p).unwrap();
        prop_assert!(pr >= 1.0 - 1e-12 && pr <= d as f64 + 1e-9);
        let mut rotated = p.probs().to_vec();
        rotated.rotate_left(shift % d);
        let rotated = OutcomeDistribution::from_probs(rotated).unwrap();
        prop_assert!((participation(&rotated).unwrap() - pr).abs() < 1e-9);
    }

    #[test]
    fn delta_is_antisymmetric((p, q) in (2usize..12).prop_flat_map(|d| (distribution(d), distribution(d)))) {
        prop_assert!((delta(&p, &q).unwrap() + delta(&q, &p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn dephasing_removes_coherence(rho in (2usize..9).prop_flat_map(pure_state), n in axis()) {
        let system = SpinSystem::from_twice_j(rho.dim() as u32 - 1);
        let basis = system.axis_basis(n);
        let deph = dephase(&rho, &basis).unwrap();
        prop_assert!(coherence_l1(&deph, &basis).unwrap() < 1e-12);
        prop_assert!(coherence_l1(&rho, &basis).unwrap() >= -1e-15);
        let again = dephase(&deph, &basis).unwrap();
        prop_assert!(max_abs_diff(deph.matrix(), again.matrix()) < 1e-12);
    }

    #[test]
    fn floquet_is_unitary(twice_j in 1u32..12, kappa0 in 0.0f64..10.0) {
        let system = SpinSystem::from_twice_j(twice_j);
        let u = build_floquet(&TopParams::new(system, kappa0).unwrap()).unwrap();
        prop_assert!(unitarity_residual(u.matrix()) < 1e-11);
    }

    /// A state already diagonal in Alice's basis is not disturbed by her
    /// measurement.
    #[test]
    fn measuring_an_incoherent_state_changes_nothing(
        rho in (2usize..8).prop_flat_map(pure_state),
        kappa0 in 0.0f64..7.0,
        n in axis(),
        gap in 1usize..5,
    ) {
        let system = SpinSystem::from_twice_j(rho.dim() as u32 - 1);
        let basis = system.axis_basis(n);
        let basis_b = system.axis_basis(Axis::Z);
        let incoherent = dephase(&rho, &basis).unwrap();
        let u = build_floquet(&TopParams::new(system, kappa0).unwrap()).unwrap();
        let pc = conditional(&incoherent, &u, 0, gap, &basis, &basis_b).unwrap();
        let pb = unconditional(&incoherent, &u, gap, &basis_b).unwrap();
        prop_assert!(hellinger(&pc, &pb).unwrap() < 1e-6);
        prop_assert!(delta(&pc, &pb).unwrap().abs() < 1e-9);
    }
}
