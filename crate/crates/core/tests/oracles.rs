//! Cross-checks of the public API against independent brute-force oracles and
//! frozen reference values (computed separately at 30-digit precision).

use std::f64::consts::PI;

use fosc::classical::{classical_frequency, gamma_factorial_bracket, q_closed_form};
use fosc::deformation::{f_from_q_commutator, DeformationSpec};
use fosc::phasespace::{bargmann_overlap, coordinate_wavefunction, husimi, wigner, wigner_naive, PhaseSpaceGrid};
use fosc::state::{
    build_sector_state, build_state, build_two_mode_joint, build_two_mode_product, evolve, inner_product,
    moment_residuals, BuildConfig, RadialMeasure,
};
use fosc::statistics::{photon_stats, two_mode_distribution, Classification};
use fosc::thermo::{deformed_bose_perturbative, partition_function, specific_heat};
use num_complex::Complex;

type Spec = DeformationSpec<f64>;
type C = Complex<f64>;

fn cfg() -> BuildConfig<f64> {
    BuildConfig::default()
}

/// `[n]! = ∏_{j≤n} sinh(λj)/sinh λ` by direct multiplication.
fn q_factorials(lambda: f64, n_max: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for j in 1..=n_max {
        let prev = out[j - 1];
        out.push(prev * (lambda * j as f64).sinh() / lambda.sinh());
    }
    out
}

/// Photon distribution of the q-coherent state written directly as `|α|^{2n}/[n]!` over its sum.
fn q_distribution(lambda: f64, a2: f64, n_max: usize) -> Vec<f64> {
    let qf = q_factorials(lambda, n_max);
    let terms: Vec<f64> = (0..=n_max).map(|n| a2.powi(n as i32) / qf[n]).collect();
    let z: f64 = terms.iter().sum();
    terms.into_iter().map(|t| t / z).collect()
}

#[test]
fn q_distribution_matches_closed_form() {
    let (lambda, alpha) = (0.3, C::new(1.2, -0.5));
    let s = build_state(&Spec::q_deform(lambda).unwrap(), alpha, &cfg()).unwrap();
    let p = photon_stats(&s).distribution;
    let want = q_distribution(lambda, alpha.norm_sqr(), 60);
    for n in 0..=40 {
        let got = p.get(n).copied().unwrap_or(0.0);
        assert!((got - want[n]).abs() <= 1e-12, "n = {n}: {got} vs {}", want[n]);
    }
}

#[test]
fn fano_against_direct_summation() {
    let golden = [(0.25, 0.95697212338086433), (0.5, 0.88042703093952441), (1.0, 0.75842775788268829)];
    for (lambda, fano) in golden {
        let s = build_state(&Spec::q_deform(lambda).unwrap(), C::new(1.0, 0.0), &cfg()).unwrap();
        let st = photon_stats(&s);
        let p = q_distribution(lambda, 1.0, 200);
        let mean: f64 = p.iter().enumerate().map(|(n, w)| n as f64 * w).sum();
        let var: f64 = p.iter().enumerate().map(|(n, w)| (n as f64 - mean).powi(2) * w).sum();
        assert!((st.fano.unwrap() - var / mean).abs() < 1e-10);
        assert!((st.fano.unwrap() - fano).abs() < 1e-12);
        assert_eq!(st.classification, Classification::SubPoissonian);
    }
}

#[test]
fn small_lambda_approaches_poisson() {
    let alpha = C::new(1.1, 0.7);
    let st = photon_stats(&build_state(&Spec::q_deform(1e-4).unwrap(), alpha, &cfg()).unwrap());
    let m = alpha.norm_sqr();
    assert!((st.mean - m).abs() < 1e-5);
    assert!((st.dispersion - m).abs() < 1e-5);
    let spec = Spec::q_deform(1e-4).unwrap();
    for n in 0..=50usize {
        let dev = spec.eval_f(n).unwrap() - 1.0;
        let leading = 1e-8 * (n * n).saturating_sub(1) as f64 / 12.0;
        assert!((dev - leading).abs() < 1e-12, "n = {n}: {dev}");
        if n <= 34 {
            assert!(dev.abs() < 1e-6);
        }
    }
}

#[test]
fn q_commutation_seed_gives_q_deformation() {
    for lambda in [-0.4f64, -1.1] {
        let q: f64 = lambda.exp();
        let seed: Vec<f64> = (0..40).map(|j| q.powi(-j)).collect();
        let spec = Spec::q_deform(lambda).unwrap();
        for n in 1..=40 {
            let f = f_from_q_commutator(&seed, q, n).unwrap();
            let qq2 = ((q.powi(n as i32) - q.powi(-(n as i32))) / (n as f64 * (q - 1.0 / q))).sqrt();
            assert!((f - qq2).abs() < 1e-12 * qq2);
            assert!((f - spec.eval_f(n).unwrap()).abs() < 1e-12 * qq2);
        }
    }
}

#[test]
fn harmonious_bargmann_series() {
    let s = build_state(&Spec::harmonious(), C::new(0.5, 0.0), &cfg()).unwrap();
    let mut series = 0.0;
    let mut fact = 1.0f64;
    for n in 0..60 {
        if n > 0 {
            fact *= n as f64;
        }
        series += 0.5f64.powi(n) / fact.sqrt();
    }
    let want = (-0.5f64).exp() * 0.75f64.sqrt() * series;
    assert!((bargmann_overlap(&s, C::new(1.0, 0.0)) - want).norm() < 1e-12);
    assert!((bargmann_overlap(&s, C::new(0.0, 0.0)) - s.coeffs()[0]).norm() < 1e-15);
}

#[test]
fn harmonious_wavefunction_is_normalized() {
    let s = build_state(&Spec::harmonious(), C::new(0.5, 0.0), &cfg()).unwrap();
    let h = 0.01;
    let xs: Vec<f64> = (0..=2000).map(|k| -10.0 + k as f64 * h).collect();
    let psi = coordinate_wavefunction(&s, &xs);
    let norm: f64 = psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * h;
    assert!((norm - 1.0).abs() < 1e-6);
}

#[test]
fn phase_space_normalization_for_assorted_states() {
    let grid = PhaseSpaceGrid::square(6.0, 121).unwrap();
    let q = Spec::q_deform(0.4).unwrap();
    let states = vec![
        build_state(&Spec::identity(), C::new(1.0, -0.5), &cfg()).unwrap(),
        build_state(&q, C::new(0.8, 0.9), &cfg()).unwrap(),
        build_state(&Spec::harmonious(), C::new(0.5, 0.3), &cfg()).unwrap(),
        build_sector_state(&Spec::zero_sector(2, q.clone()).unwrap(), C::new(1.0, 0.2), &cfg()).unwrap(),
        evolve(&build_state(&q, C::new(1.0, 0.0), &cfg()).unwrap(), 1.7).unwrap(),
    ];
    for s in &states {
        let w = wigner(s, &grid);
        assert!((w.normalization() - 1.0).abs() < 1e-3, "{}", w.normalization());
        let qf = husimi(s, &grid);
        assert!((qf.normalization() - 1.0).abs() < 1e-3, "{}", qf.normalization());
        let naive = wigner_naive(s, &grid).unwrap();
        assert!(naive.max_imag < 1e-9);
    }
}

#[test]
fn evolution_of_coherent_state_is_rotation() {
    let alpha = C::new(1.3, 0.4);
    let s = build_state(&Spec::identity(), alpha, &cfg()).unwrap();
    for t in [0.3, 2.0, 7.5] {
        let e = evolve(&s, t).unwrap();
        let r = build_state(&Spec::identity(), alpha * C::from_polar(1.0, -t), &cfg()).unwrap();
        let overlap = inner_product(&r, &e).unwrap();
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
        let phase = overlap / overlap.norm();
        for (a, b) in e.coeffs().iter().zip(r.coeffs()) {
            assert!((a - b * phase).norm() < 1e-12);
        }
    }
}

#[test]
fn joint_covariance_by_brute_force() {
    let (lambda, a1, a2) = (0.5, C::new(0.6, 0.1), C::new(0.4, -0.3));
    let spec = Spec::q_deform(lambda).unwrap();
    let joint = build_two_mode_joint(&spec, a1, a2, &cfg()).unwrap();
    let st = two_mode_distribution(&joint);

    // |c_{n1 n2}|² ∝ |α1|^{2n1}|α2|^{2n2} / (n1! n2! ([n1+n2]!/(n1+n2)!))
    let n_max = 40;
    let qf = q_factorials(lambda, 2 * n_max);
    let mut fact = vec![1.0f64];
    for j in 1..=2 * n_max {
        let prev = fact[j - 1];
        fact.push(prev * j as f64);
    }
    let mut p = vec![vec![0.0; n_max + 1]; n_max + 1];
    let mut z = 0.0;
    for i in 0..=n_max {
        for k in 0..=n_max - i {
            let n = i + k;
            let w =
                a1.norm_sqr().powi(i as i32) * a2.norm_sqr().powi(k as i32) / (fact[i] * fact[k]) * (fact[n] / qf[n]);
            p[i][k] = w;
            z += w;
        }
    }
    let (mut m1, mut m2) = (0.0, 0.0);
    for i in 0..=n_max {
        for k in 0..=n_max {
            p[i][k] /= z;
            m1 += i as f64 * p[i][k];
            m2 += k as f64 * p[i][k];
        }
    }
    let mut cov = 0.0;
    for i in 0..=n_max {
        for k in 0..=n_max {
            cov += (i as f64 - m1) * (k as f64 - m2) * p[i][k];
        }
    }
    assert!((st.covariance - cov).abs() < 1e-12, "{} vs {cov}", st.covariance);
    assert!(st.covariance.abs() > 1e-3);
    let product = build_two_mode_product(&spec, &spec, a1, a2, &cfg()).unwrap();
    assert!(two_mode_distribution(&product).covariance.abs() < 1e-12);
}

#[test]
fn gaussian_moments_of_flat_measure() {
    let measure = RadialMeasure::from_fn(0.0, 12.0, 4001, |_| 1.0 / PI).unwrap();
    let r = moment_residuals(&Spec::identity(), &measure, 10, &cfg()).unwrap();
    assert!(r.iter().all(|v| v.abs() < 1e-6), "{r:?}");
}

#[test]
fn thermodynamic_reference_values() {
    let p = partition_function(&Spec::q_deform(0.5).unwrap(), 1.0, 1.0, 1e-14).unwrap();
    assert!((p.z - 0.84898622144033884807).abs() < 1e-13);
    let v = deformed_bose_perturbative(0.05, 2.0).unwrap();
    assert!((v - 0.15557360550323550f64).abs() < 1e-14);
    let spec = Spec::q_deform(0.1).unwrap();
    for (t, want) in [(1e3, 1.157), (1e4, 1.125), (1e5, 1.102)] {
        let c_log = specific_heat(&spec, 1.0, t).unwrap() * f64::ln(t);
        assert!((c_log - want).abs() < 5e-3, "T = {t}: {c_log}");
    }
}

#[test]
fn classical_reference_values() {
    let xi = q_closed_form(1.0, C::new(0.5, 0.0), 1.0);
    let s = 1.0f64.sinh();
    assert!((xi.arg() + (1.0 + 0.0625 * s * s).sqrt() / s).abs() < 1e-15);
    assert!((classical_frequency(0.5, 2.0) - 0.5 / 0.5f64.sinh() * 1.0f64.cosh()).abs() < 1e-15);
    assert!((gamma_factorial_bracket(1.0f64) - 0.57721566490153286).abs() < 1e-13);
}
