//! Randomized checks of the type invariants and structural properties.

use proptest::prelude::*;
use qifs::classical::chaos::stream_rng;
use qifs::classical::{chaos_game, push_measure, ChaosGameOptions, ClassicalIFS, EmpiricalMeasure};
use qifs::invariant::{commutant, fixed_states, power_iteration, Superoperator, EIGENVALUE_TOL};
use qifs::linalg::{self, c, max_abs, CMat};
use qifs::qstate::{
    bures_distance, hs_distance, partial_trace, trace_distance, von_neumann_entropy, DensityMatrix, Ket, PureState,
    Subsystem,
};
use qifs::quantum::{random_kraus_channel, random_unitary_channel, MixedQIFS, PureQIFS};
use qifs::spin::{latitude_rotations, AngularMomentum, Axis, Spin};
use qifs::torus::{dft_matrix, husimi_torus, shift_x, shift_y, TartanChannel};

fn state(seed: u64, n: usize, rank: usize) -> DensityMatrix {
    DensityMatrix::new(linalg::random_density_matrix(n, rank, &mut stream_rng(seed, 0))).unwrap()
}

fn is_valid(rho: &CMat) -> bool {
    let herm = max_abs(&(rho - rho.adjoint()));
    let tr = linalg::trace(rho);
    let min = linalg::eigvalsh(&linalg::hermitian_part(rho)).into_iter().fold(f64::INFINITY, f64::min);
    herm <= 1e-12 && (tr.re - 1.0).abs() <= 1e-10 && tr.im.abs() <= 1e-10 && min >= -1e-10
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kets_normalize(seed in any::<u64>(), n in 1usize..8) {
        let v = linalg::random_unit_vector(n, &mut stream_rng(seed, 0)) * c(3.7, -1.2);
        let k = Ket::new(v).unwrap();
        prop_assert!((k.amplitudes().norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn pure_state_equality_ignores_phase(seed in any::<u64>(), n in 1usize..8, phase in 0.0..std::f64::consts::TAU) {
        let v = linalg::random_unit_vector(n, &mut stream_rng(seed, 0));
        let a = PureState::new(Ket::new(v.clone()).unwrap());
        let b = PureState::new(Ket::new(v * qifs::linalg::C64::from_polar(1.0, phase)).unwrap());
        prop_assert!(a.same_state(&b, 1e-12));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn random_states_are_valid(seed in any::<u64>(), n in 1usize..7, rank in 1usize..7) {
        prop_assert!(is_valid(state(seed, n, rank).matrix()));
    }

    #[test]
    fn distances_are_metrics(seed in any::<u64>(), n in 2usize..5) {
        let (a, b, x) = (state(seed, n, n), state(seed ^ 1, n, 1), state(seed ^ 2, n, 2));
        for d in [trace_distance, hs_distance, bures_distance] {
            let (ab, ba) = (d(&a, &b).unwrap(), d(&b, &a).unwrap());
            prop_assert!((ab - ba).abs() <= 1e-10);
            prop_assert!(d(&a, &a).unwrap() <= 1e-6);
            prop_assert!(ab <= d(&a, &x).unwrap() + d(&x, &b).unwrap() + 1e-10);
        }
    }

    #[test]
    fn distance_ordering(seed in any::<u64>(), n in 2usize..4) {
        let (a, b) = (state(seed, n, n), state(seed ^ 7, n, 1 + (seed as usize % n)));
        let tr = trace_distance(&a, &b).unwrap();
        prop_assert!(bures_distance(&a, &b).unwrap().powi(2) <= 2.0 * tr + 1e-10);
        prop_assert!(hs_distance(&a, &b).unwrap() <= tr + 1e-10);
    }

    #[test]
    fn partial_traces_are_states(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let sigma = state(seed, n * m, 1 + seed as usize % (n * m));
        prop_assert!(is_valid(partial_trace(&sigma, (n, m), Subsystem::A).unwrap().matrix()));
        prop_assert!(is_valid(partial_trace(&sigma, (n, m), Subsystem::B).unwrap().matrix()));
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), n in 2usize..6) {
        let rho = state(seed, n, n);
        let u = linalg::haar_unitary(n, &mut stream_rng(seed, 1));
        let moved = DensityMatrix::new(&u * rho.matrix() * u.adjoint()).unwrap();
        prop_assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&moved)).abs() <= 1e-10);
    }

    #[test]
    fn channels_satisfy_their_flags(seed in any::<u64>(), n in 2usize..5, k in 1usize..4) {
        let mut rng = stream_rng(seed, 0);
        let ch = random_kraus_channel(n, k, &mut rng).unwrap();
        let id = linalg::identity(n);
        let tp = ch.kraus().iter().fold(CMat::zeros(n, n), |a, v| a + v.adjoint() * v);
        prop_assert!(ch.trace_preserving().is_yes());
        prop_assert!(max_abs(&(tp - &id)) <= 1e-10);
        let ref_ch = random_unitary_channel(n, k, &mut rng).unwrap();
        let un = ref_ch.kraus().iter().fold(CMat::zeros(n, n), |a, v| a + v * v.adjoint());
        prop_assert!(ref_ch.unital().is_yes());
        prop_assert!(max_abs(&(un - &id)) <= 1e-10);
    }

    #[test]
    fn contraction_under_channels(seed in any::<u64>(), n in 2usize..4) {
        let mut rng = stream_rng(seed, 0);
        let ch = random_kraus_channel(n, 2, &mut rng).unwrap();
        let bi = random_unitary_channel(n, 3, &mut rng).unwrap();
        let (a, b) = (state(seed ^ 3, n, n), state(seed ^ 4, n, 1));
        for d in [trace_distance, bures_distance] {
            prop_assert!(d(&ch.apply(&a).unwrap(), &ch.apply(&b).unwrap()).unwrap() <= d(&a, &b).unwrap() + 1e-10);
        }
        prop_assert!(hs_distance(&bi.apply(&a).unwrap(), &bi.apply(&b).unwrap()).unwrap() <= hs_distance(&a, &b).unwrap() + 1e-10);
        prop_assert!(von_neumann_entropy(&bi.apply(&b).unwrap()) >= von_neumann_entropy(&b) - 1e-10);
    }

    #[test]
    fn homogeneous_maps_are_linear(seed in any::<u64>(), n in 2usize..4, alpha in 0.0..1.0f64) {
        let ch = random_kraus_channel(n, 2, &mut stream_rng(seed, 0)).unwrap();
        let q = PureQIFS::homogeneous(ch.kraus().to_vec()).unwrap();
        prop_assert!(q.maps().iter().zip(q.probability_operators()).all(|(v, w)| max_abs(&(v - w)) <= 1e-12));
        let (a, b) = (state(seed ^ 5, n, n), state(seed ^ 6, n, 1));
        let mix = DensityMatrix::new(a.matrix() * c(alpha, 0.0) + b.matrix() * c(1.0 - alpha, 0.0)).unwrap();
        let lhs = ch.apply(&mix).unwrap();
        let rhs = ch.apply(&a).unwrap().into_matrix() * c(alpha, 0.0) + ch.apply(&b).unwrap().into_matrix() * c(1.0 - alpha, 0.0);
        prop_assert!(max_abs(&(lhs.matrix() - rhs)) <= 1e-10);
    }

    #[test]
    fn mixed_qifs_probabilities_and_images(seed in any::<u64>(), twice_j in 1usize..6) {
        let spin = Spin::from_twice(twice_j).unwrap();
        let q = MixedQIFS::from_pure(&latitude_rotations(spin, 1.0, 0.7).unwrap());
        let rho = state(seed, spin.dim(), 1 + seed as usize % spin.dim());
        let ps = q.probabilities(&rho).unwrap();
        prop_assert!((ps.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        for (i, &p) in ps.iter().enumerate() {
            if p > 1e-12 {
                prop_assert!(is_valid(q.mixed_map(i, &rho).unwrap().matrix()));
            }
        }
    }

    #[test]
    fn superoperator_matches_direct_application(seed in any::<u64>(), n in 2usize..5) {
        let ch = random_kraus_channel(n, 3, &mut stream_rng(seed, 0)).unwrap();
        let sup = Superoperator::of(&ch);
        let rho = state(seed ^ 9, n, n);
        prop_assert!(max_abs(&(sup.apply(rho.matrix()) - ch.apply(&rho).unwrap().into_matrix())) <= 1e-10);
        let radius = sup.spectrum()[0].norm();
        prop_assert!((radius - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn fixed_states_are_fixed_and_match_power_iteration(seed in any::<u64>(), n in 2usize..4) {
        let ch = random_kraus_channel(n, 2, &mut stream_rng(seed, 0)).unwrap();
        let report = fixed_states(&ch, EIGENVALUE_TOL).unwrap();
        let fixed = report.state.clone().unwrap();
        prop_assert!(max_abs(&(ch.apply(&fixed).unwrap().into_matrix() - fixed.matrix())) <= 1e-8);
        if report.unique {
            let second = report.spectrum_moduli.get(1).copied().unwrap_or(0.0);
            if second < 0.99 {
                let pi = power_iteration(&ch, &DensityMatrix::maximally_mixed(n), 20_000, 1e-13).unwrap();
                prop_assert!(trace_distance(&pi.state, &fixed).unwrap() <= 1e-8);
            }
        }
    }

    #[test]
    fn unitary_families_have_bounded_spectrum(seed in any::<u64>(), n in 2usize..4) {
        let mut rng = stream_rng(seed, 0);
        let ch = random_unitary_channel(n, 2, &mut rng).unwrap();
        let sup = Superoperator::of(&ch);
        let moduli: Vec<f64> = sup.spectrum().iter().map(|z| z.norm()).collect();
        prop_assert!(moduli[1] <= 1.0 + 1e-10);
        if moduli[1] < 1.0 - 1e-6 {
            let mut reached = None;
            for s in 0..20u64 {
                let start = state(seed ^ (s + 100), n, 1);
                let pi = power_iteration(&ch, &start, 100_000, 1e-13).unwrap();
                if let Some(r) = &reached {
                    prop_assert!(trace_distance(&pi.state, r).unwrap() <= 1e-8);
                } else {
                    reached = Some(pi.state);
                }
            }
        }
    }

    #[test]
    fn commutant_elements_commute(seed in any::<u64>(), n in 2usize..5, split in any::<bool>()) {
        let mut rng = stream_rng(seed, 0);
        let us: Vec<CMat> = (0..2)
            .map(|_| {
                if split {
                    let d = 1 + seed as usize % (n - 1);
                    let (a, b) = (linalg::haar_unitary(d, &mut rng), linalg::haar_unitary(n - d, &mut rng));
                    qifs::invariant::permuted_direct_sum(&a, &b, &(0..n).collect::<Vec<_>>())
                } else {
                    linalg::haar_unitary(n, &mut rng)
                }
            })
            .collect();
        let report = commutant(&us, 1e-8, &mut rng).unwrap();
        prop_assert_eq!(report.dimension == 1, !split);
        for x in &report.basis {
            for u in &us {
                prop_assert!(max_abs(&(u * x - x * u)) <= 1e-8);
            }
        }
    }

    #[test]
    fn angular_momentum_algebra(twice_j in 1usize..12) {
        let spin = Spin::from_twice(twice_j).unwrap();
        let j = AngularMomentum::new(spin);
        let i = linalg::I;
        for (a, b, z) in [(Axis::X, Axis::Y, Axis::Z), (Axis::Y, Axis::Z, Axis::X), (Axis::Z, Axis::X, Axis::Y)] {
            let lhs = linalg::commutator(j.component(a), j.component(b));
            prop_assert!(max_abs(&(lhs - j.component(z) * i)) <= 1e-10);
        }
        let jj = spin.j() * (spin.j() + 1.0);
        prop_assert!(max_abs(&(j.casimir() - linalg::identity(spin.dim()) * c(jj, 0.0))) <= 1e-10);
    }

    #[test]
    fn torus_operators(l in 1usize..10) {
        let n = 3 * l;
        let w = dft_matrix(n);
        prop_assert!(linalg::is_unitary(&w, 1e-12));
        let (x, y) = (shift_x(n), shift_y(n));
        let omega = linalg::C64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
        prop_assert!(max_abs(&(&x * &y - &y * &x * omega)) <= 1e-10);
        let [a1, a2, _, _] = TartanChannel::with_dim(n).unwrap().operators();
        for a in [a1, a2] {
            let nz: Vec<f64> = a.iter().map(|z| z.norm()).filter(|&m| m > 1e-12).collect();
            prop_assert_eq!(nz.len(), n);
            prop_assert!(nz.iter().all(|m| (m - 1.0).abs() <= 1e-12));
        }
    }

    #[test]
    fn husimi_is_nonnegative(seed in any::<u64>(), l in 1usize..6, m in 1usize..30) {
        let rho = state(seed, 3 * l, 1 + seed as usize % 3);
        let grid = husimi_torus(&rho, m).unwrap();
        prop_assert!(grid.values.iter().all(|&v| v >= 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classical_samples_stay_in_space(seed in any::<u64>(), which in 0usize..5) {
        let ifs = [
            ClassicalIFS::cantor(),
            ClassicalIFS::cantor_place_dependent(),
            ClassicalIFS::tartan(),
            ClassicalIFS::sphere_rotations(1.0, 0.7, 0.5),
            ClassicalIFS::tent_bernoulli(),
        ][which]
            .clone();
        let opts = ChaosGameOptions { burn_in: 10, resolution: 27, streams: 1, keep_trajectory: 2000 };
        let x0 = ifs.space().from_unit_coords([0.3, 0.6]);
        let res = chaos_game(&ifs, &x0, 2000, seed, &opts).unwrap();
        for p in &res.trajectory {
            prop_assert!(ifs.space().contains(p));
            let ps = ifs.probabilities(p).unwrap();
            prop_assert!((ps.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(ps.iter().all(|&q| (0.0..=1.0).contains(&q)));
            for f in ifs.maps() {
                prop_assert!(ifs.space().contains(&f.apply(p)));
            }
        }
        prop_assert!((res.measure.normalized().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let mu = EmpiricalMeasure::uniform(ifs.space(), 27);
        let pushed = push_measure(&ifs, &mu).unwrap();
        prop_assert!((pushed.total() - mu.total()).abs() <= 1e-12 * mu.total());
    }

    #[test]
    fn seeded_runs_repeat(seed in any::<u64>()) {
        let ifs = ClassicalIFS::tartan();
        let opts = ChaosGameOptions { burn_in: 10, resolution: 27, streams: 3, keep_trajectory: 0 };
        let x0 = ifs.space().from_unit_coords([0.5, 0.5]);
        let a = chaos_game(&ifs, &x0, 5000, seed, &opts).unwrap();
        let b = chaos_game(&ifs, &x0, 5000, seed, &opts).unwrap();
        prop_assert_eq!(a.measure.weights(), b.measure.weights());
    }
}
