//! Closed-form Wigner and Husimi functions of q-coherent and harmonious states.
//!
//! These are written directly from the q-factorials `[n]! = ∏_{j≤n} sinh(λj)/sinh λ`
//! and the harmonious geometric weights, independently of the state builder, and
//! serve as cross-checks of the generic routes.

use num_complex::Complex;

use super::{checked_wigner, on_grid, wigner_double_sum, FieldKind, FieldOnGrid, PhaseSpaceError, PhaseSpaceGrid};
use crate::deformation::DeformationSpec;
use crate::matrix::Matrix;
use crate::scalar::Real;
use crate::series::{sum_log_series, SeriesRule};
use crate::special::ln_factorial;
use crate::state::{BuildConfig, StateError};

/// Per-index log weights for a state `c_n ∝ α^n e^{-g_n}` together with `ln Σ |α|^{2n} e^{-2g_n}`.
struct Expansion<T> {
    /// `ln|α|`, `arg α`.
    ln_a: T,
    theta: T,
    ln_sum: T,
    n_top: usize,
}

fn expansion<T: Real>(
    alpha: Complex<T>,
    config: &BuildConfig<T>,
    mut ln_g: impl FnMut(usize) -> Result<T, StateError>,
) -> Result<Expansion<T>, PhaseSpaceError> {
    let a = alpha.norm();
    if a == T::zero() {
        return Ok(Expansion { ln_a: T::neg_infinity(), theta: T::zero(), ln_sum: T::zero(), n_top: 0 });
    }
    let ln_a = a.ln();
    let rule = SeriesRule::new(config.tol, config.n_max);
    let series = sum_log_series(0, rule, |n| -> Result<T, StateError> {
        Ok(T::lit(2.0) * (T::from_count(n) * ln_a - ln_g(n)?))
    })?;
    Ok(Expansion { ln_a, theta: alpha.arg(), ln_sum: series.ln_sum, n_top: series.last() })
}

fn pow_ln<T: Real>(n: usize, ln_a: T) -> T {
    if n == 0 {
        T::zero()
    } else {
        T::from_count(n) * ln_a
    }
}

/// Expansion of the q-coherent state together with `ln [n]!` for `n ≤ N`.
fn q_expansion<T: Real>(
    lambda: T,
    alpha: Complex<T>,
    config: &BuildConfig<T>,
) -> Result<(Expansion<T>, Vec<T>), PhaseSpaceError> {
    let spec = DeformationSpec::q_deform(lambda)?;
    let mut qf = vec![T::zero()];
    // c_n ∝ α^n / √[n]!
    let e = expansion(alpha, config, |n| {
        if n > 0 {
            let next = qf[n - 1] + spec.deformed_number(n)?.ln();
            qf.push(next);
        }
        Ok(T::lit(0.5) * qf[n])
    })?;
    Ok((e, qf))
}

fn weights<T: Real>(e: &Expansion<T>, ln_norm2: T, ln_mag: impl Fn(usize, usize) -> T) -> Matrix<Complex<T>> {
    Matrix::from_fn(e.n_top + 1, e.n_top + 1, |m, n| {
        let mag = (ln_norm2 + pow_ln(m + n, e.ln_a) + ln_mag(m, n)).exp();
        let phase = (T::from_count(m) - T::from_count(n)) * e.theta + if n % 2 == 0 { T::zero() } else { T::PI() };
        Complex::from_polar(mag, phase)
    })
}

/// `W_q = 2 (Σ|α|^{2n}/[n]!)^{-1} e^{−r²} Σ_{m,n} (−1)^n α^m ᾱ^n / (√(m![m]!) √([n]!/n!)) [√2(x−ip)]^{m−n} L_n^{m−n}(2r²)`.
pub fn wigner_q<T: Real>(
    lambda: T,
    alpha: Complex<T>,
    grid: &PhaseSpaceGrid<T>,
    config: &BuildConfig<T>,
) -> Result<FieldOnGrid<T>, PhaseSpaceError> {
    let (e, qf) = q_expansion(lambda, alpha, config)?;
    let half = T::lit(0.5);
    let w =
        weights(&e, -e.ln_sum, |m, n| -half * (ln_factorial::<T>(m) + qf[m]) - half * (qf[n] - ln_factorial::<T>(n)));
    let (values, max_imag) = wigner_double_sum(&w, grid);
    checked_wigner(values, max_imag, grid)
}

/// `W_h = 2 (1−|α|²) e^{−r²} Σ_{m,n} (−1)^n α^m ᾱ^n √(n!/m!) [√2(x−ip)]^{m−n} L_n^{m−n}(2r²)`.
pub fn wigner_harmonious<T: Real>(
    alpha: Complex<T>,
    grid: &PhaseSpaceGrid<T>,
    config: &BuildConfig<T>,
) -> Result<FieldOnGrid<T>, PhaseSpaceError> {
    config.check_radius(alpha.norm(), T::one())?;
    let e = expansion(alpha, config, |_| Ok(T::zero()))?;
    let ln_norm2 = (-alpha.norm_sqr()).ln_1p();
    let half = T::lit(0.5);
    let w = weights(&e, ln_norm2, |m, n| half * (ln_factorial::<T>(n) - ln_factorial::<T>(m)));
    let (values, max_imag) = wigner_double_sum(&w, grid);
    checked_wigner(values, max_imag, grid)
}

fn husimi_from_terms<T: Real>(grid: &PhaseSpaceGrid<T>, e: &Expansion<T>, ln_norm2: T, ln_den: &[T]) -> FieldOnGrid<T> {
    let s = T::FRAC_1_SQRT_2();
    let values = on_grid(grid, |x, p| {
        let z = Complex::new(x * s, p * s);
        let (zr, zt) = (z.norm(), z.arg());
        let mut acc = Complex::new(T::zero(), T::zero());
        for (m, &d) in ln_den.iter().enumerate() {
            if m > 0 && (zr == T::zero() || e.ln_a == T::neg_infinity()) {
                break;
            }
            let mag = (pow_ln(m, zr.ln() + e.ln_a) - d).exp();
            acc += Complex::from_polar(mag, T::from_count(m) * (e.theta - zt));
        }
        (ln_norm2 - zr * zr).exp() * acc.norm_sqr()
    });
    FieldOnGrid { grid: *grid, values, kind: FieldKind::Husimi, max_imag: T::zero() }
}

/// `Q_q = e^{−|z|²} (Σ|α|^{2n}/[n]!)^{-1} |Σ_m (z̄α)^m / √(m![m]!)|²`.
pub fn husimi_q<T: Real>(
    lambda: T,
    alpha: Complex<T>,
    grid: &PhaseSpaceGrid<T>,
    config: &BuildConfig<T>,
) -> Result<FieldOnGrid<T>, PhaseSpaceError> {
    let (e, qf) = q_expansion(lambda, alpha, config)?;
    let den: Vec<T> = (0..=e.n_top).map(|m| T::lit(0.5) * (ln_factorial::<T>(m) + qf[m])).collect();
    Ok(husimi_from_terms(grid, &e, -e.ln_sum, &den))
}

/// `Q_h = e^{−|z|²} (1−|α|²) |Σ_m (z̄α)^m / √m!|²`.
pub fn husimi_harmonious<T: Real>(
    alpha: Complex<T>,
    grid: &PhaseSpaceGrid<T>,
    config: &BuildConfig<T>,
) -> Result<FieldOnGrid<T>, PhaseSpaceError> {
    config.check_radius(alpha.norm(), T::one())?;
    let e = expansion(alpha, config, |_| Ok(T::zero()))?;
    let den: Vec<T> = (0..=e.n_top).map(|m| T::lit(0.5) * ln_factorial::<T>(m)).collect();
    Ok(husimi_from_terms(grid, &e, (-alpha.norm_sqr()).ln_1p(), &den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasespace::{husimi, wigner};
    use crate::state::build_state;

    type C = Complex<f64>;

    fn max_diff(a: &FieldOnGrid<f64>, b: &FieldOnGrid<f64>) -> f64 {
        a.values.as_slice().iter().zip(b.values.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn q_forms_match_generic() {
        let cfg = BuildConfig::default();
        let g = PhaseSpaceGrid::square(5.0, 25).unwrap();
        let a = C::new(0.9, -0.4);
        let s = build_state(&DeformationSpec::q_deform(0.5).unwrap(), a, &cfg).unwrap();
        assert!(max_diff(&wigner_q(0.5, a, &g, &cfg).unwrap(), &wigner(&s, &g)) < 1e-10);
        assert!(max_diff(&husimi_q(0.5, a, &g, &cfg).unwrap(), &husimi(&s, &g)) < 1e-10);
    }

    #[test]
    fn harmonious_forms_match_generic() {
        let cfg = BuildConfig::default();
        let g = PhaseSpaceGrid::square(5.0, 25).unwrap();
        let a = C::new(0.3, 0.45);
        let s = build_state(&DeformationSpec::harmonious(), a, &cfg).unwrap();
        assert!(max_diff(&wigner_harmonious(a, &g, &cfg).unwrap(), &wigner(&s, &g)) < 1e-10);
        assert!(max_diff(&husimi_harmonious(a, &g, &cfg).unwrap(), &husimi(&s, &g)) < 1e-10);
        assert!(wigner_harmonious(C::new(1.0, 0.0), &g, &cfg).is_err());
    }
}
