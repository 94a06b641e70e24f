use fosc::classical::{exact_orbit, ClassicalSystem, FrequencyLaw};
use fosc::deformation::{f_from_commutator, f_from_q_commutator, DeformationSpec};
use fosc::phasespace::{husimi, PhaseSpaceGrid};
use fosc::quadrature::quadrature_report;
use fosc::state::{build_state, build_two_mode_joint, build_two_mode_product, evolve, BuildConfig};
use fosc::statistics::photon_stats;
use fosc::thermo::{bose_einstein, thermal_mean_n};
use num_complex::Complex;
use proptest::prelude::*;

type Spec = DeformationSpec<f64>;
type C = Complex<f64>;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

/// Built-in deformations with a finite radius bound on the amplitudes drawn for them.
fn spec_and_alpha() -> impl Strategy<Value = (Spec, C)> {
    let q = (0.05f64..1.5, 0.0f64..2.5, 0.0f64..std::f64::consts::TAU)
        .prop_map(|(l, r, phi)| (Spec::q_deform(l).unwrap(), C::from_polar(r, phi)));
    let id =
        (0.0f64..3.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, phi)| (Spec::identity(), C::from_polar(r, phi)));
    let h =
        (0.0f64..0.9, 0.0f64..std::f64::consts::TAU).prop_map(|(r, phi)| (Spec::harmonious(), C::from_polar(r, phi)));
    prop_oneof![q, id, h]
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn commutator_round_trip(values in prop::collection::vec(0.05f64..3.0, 2..30)) {
        let spec = Spec::tabulated(values.clone()).unwrap();
        let top = values.len() - 1;
        let big_f: Vec<f64> = (0..top).map(|n| spec.commutator_f(n).unwrap()).collect();
        for n in 1..=top {
            let back = f_from_commutator(&big_f, n).unwrap();
            prop_assert!((back - values[n]).abs() <= 1e-12 * values[n].max(1.0));
        }
    }

    #[test]
    fn q_commutator_round_trip(values in prop::collection::vec(0.05f64..3.0, 2..30), qi in 0usize..3) {
        let q = [0.3, 0.7, 1.0][qi];
        let spec = Spec::tabulated(values.clone()).unwrap();
        let top = values.len() - 1;
        let g: Vec<f64> = (0..top).map(|n| spec.q_commutator_g(n, q).unwrap()).collect();
        for n in 1..=top {
            let back = f_from_q_commutator(&g, q, n).unwrap();
            prop_assert!((back - values[n]).abs() <= 1e-12 * values[n].max(1.0));
        }
    }

    #[test]
    fn commutators_are_consistent(lambda in 0.01f64..2.0, n in 0usize..60, q in 0.1f64..2.0) {
        let spec = Spec::q_deform(lambda).unwrap();
        prop_assert_eq!(spec.commutator_f(n).unwrap(), spec.q_commutator_g(n, 1.0).unwrap());
        let diff = spec.commutator_f(n).unwrap() - spec.q_commutator_g(n, q).unwrap();
        let number = spec.deformed_number(n).unwrap();
        prop_assert!((diff - (q - 1.0) * number).abs() <= 1e-12 * number.max(1.0));
    }

    #[test]
    fn built_states_are_normalized_eigenstates((spec, alpha) in spec_and_alpha()) {
        let cfg = BuildConfig::default();
        let s = build_state(&spec, alpha, &cfg).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() <= cfg.tol + 1e-14);
        let c = s.coeffs();
        for n in 0..c.len() - 1 {
            let lhs = c[n + 1] * ((n + 1) as f64).sqrt() * spec.eval_f(n + 1).unwrap();
            let rhs = alpha * c[n];
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1e-300));
        }
    }

    #[test]
    fn evolution_preserves_distribution((spec, alpha) in spec_and_alpha(), t in -20.0f64..20.0) {
        let s = build_state(&spec, alpha, &BuildConfig::default()).unwrap();
        let e = evolve(&s, t).unwrap();
        for (a, b) in s.coeffs().iter().zip(e.coeffs()) {
            prop_assert!((a.norm() - b.norm()).abs() <= 2.0 * f64::EPSILON * a.norm());
        }
        prop_assert!((s.norm_sqr() - e.norm_sqr()).abs() <= 1e-15);
    }

    #[test]
    fn identity_states_are_poissonian(r in 0.0f64..3.0, phi in 0.0f64..std::f64::consts::TAU) {
        let alpha = C::from_polar(r, phi);
        let s = build_state(&Spec::identity(), alpha, &BuildConfig::default()).unwrap();
        let mut want = C::new((-r * r / 2.0).exp(), 0.0);
        for (n, c) in s.coeffs().iter().enumerate() {
            if n > 0 {
                want = want * alpha / (n as f64).sqrt();
            }
            prop_assert!((c - want).norm() <= 1e-12);
        }
        let q = quadrature_report(&s).unwrap();
        prop_assert!((q.sigma_x - 0.5).abs() < 1e-10 && (q.sigma_p - 0.5).abs() < 1e-10);
        prop_assert!(q.sigma_xp.abs() < 1e-10);
        prop_assert!((q.schrodinger_invariant - 0.25).abs() < 1e-10);
    }

    #[test]
    fn quadrature_structure((spec, alpha) in spec_and_alpha()) {
        let s = build_state(&spec, alpha, &BuildConfig::default()).unwrap();
        let q = quadrature_report(&s).unwrap();
        prop_assert_eq!(q.mu_p, q.mu_x.map(|v| -v));
        prop_assert_eq!(q.nu_p, q.nu_x);
        prop_assert!(q.hermiticity_residual < 1e-12);
        prop_assert!(q.schrodinger_invariant >= 0.25 - 1e-9);
        let st = photon_stats(&s);
        let ladder = fosc::quadrature::ladder_means(&s).unwrap();
        prop_assert!((ladder.mean_n - st.mean).abs() <= st.mean_error + 1e-12 * st.mean.max(1.0));
    }

    #[test]
    fn distributions_are_normalized((spec, alpha) in spec_and_alpha()) {
        let cfg = BuildConfig::default();
        let st = photon_stats(&build_state(&spec, alpha, &cfg).unwrap());
        prop_assert!((st.distribution.iter().sum::<f64>() - 1.0).abs() <= cfg.tol + 1e-14);
        prop_assert!(st.distribution.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn husimi_is_bounded((spec, alpha) in spec_and_alpha()) {
        let s = build_state(&spec, alpha, &BuildConfig::default()).unwrap();
        let q = husimi(&s, &PhaseSpaceGrid::square(5.0, 21).unwrap());
        prop_assert!(q.min_value() >= 0.0);
        prop_assert!(q.max_value() <= 1.0 + 1e-9);
    }

    #[test]
    fn identity_joint_equals_product(r1 in 0.0f64..1.5, r2 in 0.0f64..1.5, p1 in 0.0f64..6.3, p2 in 0.0f64..6.3) {
        let cfg = BuildConfig::default();
        let id = Spec::identity();
        let (a1, a2) = (C::from_polar(r1, p1), C::from_polar(r2, p2));
        let j = build_two_mode_joint(&id, a1, a2, &cfg).unwrap();
        let p = build_two_mode_product(&id, &id, a1, a2, &cfg).unwrap();
        let (jc, pc) = (j.coeffs(), p.coeffs());
        let top = j.truncation().n;
        let mut outside = 0.0;
        for i in 0..pc.rows() {
            for k in 0..pc.cols() {
                let b = pc[(i, k)];
                if i + k <= top && i < jc.rows() && k < jc.cols() {
                    prop_assert!((jc[(i, k)] - b).norm() <= 1e-12);
                } else {
                    outside += b.norm_sqr();
                }
            }
        }
        // the joint table keeps the triangle n1 + n2 ≤ N; the rest is truncation tail
        prop_assert!(outside <= 10.0 * cfg.tol);
    }

    #[test]
    fn q_occupation_below_bose(lambda in 0.01f64..0.5, beta in 0.3f64..3.0) {
        let q = thermal_mean_n(&Spec::q_deform(lambda).unwrap(), 1.0, beta, 1e-14).unwrap();
        prop_assert!(q <= bose_einstein(beta));
    }

    #[test]
    fn exact_orbits_conserve_invariants(
        w in prop::collection::vec(0.1f64..3.0, 1..4),
        init in prop::collection::vec(-2.0f64..2.0, 8),
    ) {
        let m = w.len();
        let laws = w.iter().map(|&v| FrequencyLaw::constant(v)).collect();
        let sys = ClassicalSystem::<f64>::new(laws).unwrap();
        let times: Vec<f64> = (0..=200).map(|k| k as f64 * 0.5).collect();
        let o = exact_orbit(&sys, &init[..2 * m], &times).unwrap();
        prop_assert!(o.max_invariant_drift < 1e-14, "drift {}", o.max_invariant_drift);
    }
}
