//! Canonical thermodynamics of a single f-oscillator (units `ħ = k = 1`).

use rayon::prelude::*;
use thiserror::Error;

use crate::deformation::{DeformationError, DeformationSpec};
use crate::scalar::Real;
use crate::series::{sum_log_series, CapExceeded, LogSeries, SeriesRule};

/// Largest level index summed before giving up.
pub const THERMO_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error("inverse temperature must be positive, got {0}")]
    NonpositiveBeta(f64),
    #[error("temperature must be positive, got {0}")]
    NonpositiveTemperature(f64),
    #[error("frequency must be positive, got {0}")]
    NonpositiveFrequency(f64),
    #[error("tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),
    #[error("Boltzmann sum not converged after {cap} levels")]
    NonconvergentSum { cap: usize },
    #[error("energy levels decrease at n = {n} inside the summation window")]
    NonmonotoneSpectrum { n: usize },
    #[error(transparent)]
    Deformation(#[from] DeformationError),
}

impl From<CapExceeded> for ThermoError {
    fn from(e: CapExceeded) -> Self {
        ThermoError::NonconvergentSum { cap: e.cap }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoPoint<T> {
    pub temperature: T,
    pub beta: T,
    pub z: T,
    pub ln_z: T,
    pub specific_heat: T,
    pub mean_n_exact: T,
    pub terms_used: usize,
}

fn check_inputs<T: Real>(omega: T, beta: T, tol: T) -> Result<(), ThermoError> {
    if !(beta > T::zero()) {
        return Err(ThermoError::NonpositiveBeta(beta.as_f64()));
    }
    if !(omega > T::zero()) {
        return Err(ThermoError::NonpositiveFrequency(omega.as_f64()));
    }
    if !(tol > T::zero() && tol < T::one()) {
        return Err(ThermoError::InvalidTolerance(tol.as_f64()));
    }
    Ok(())
}

/// Boltzmann series together with the level energies it used.
fn boltzmann<T: Real>(
    spec: &DeformationSpec<T>,
    omega: T,
    beta: T,
    tol: T,
) -> Result<(LogSeries<T>, Vec<T>), ThermoError> {
    check_inputs(omega, beta, tol)?;
    let mut energies = Vec::new();
    let mut n_lo = T::zero();
    let series = sum_log_series(0, SeriesRule::new(tol, THERMO_CAP), |n| -> Result<T, ThermoError> {
        let n_hi = spec.deformed_number(n + 1)?;
        let e = omega * T::lit(0.5) * (n_lo + n_hi);
        n_lo = n_hi;
        energies.push(e);
        Ok(-beta * e)
    })?;
    let last = energies.len() - 1;
    let window = last.saturating_sub(series.log_terms.len().min(crate::series::DEFAULT_PATIENCE));
    for n in window + 1..=last {
        if energies[n] < energies[n - 1] {
            return Err(ThermoError::NonmonotoneSpectrum { n });
        }
    }
    Ok((series, energies))
}

/// `Z = Σ e^{−βE_n}`, with `C = β² Var(E)` and the exact `⟨n⟩` from the same weights.
pub fn partition_function<T: Real>(
    spec: &DeformationSpec<T>,
    omega: T,
    beta: T,
    tol: T,
) -> Result<ThermoPoint<T>, ThermoError> {
    let (series, energies) = boltzmann(spec, omega, beta, tol)?;
    let weights: Vec<T> = series.weights().collect();
    let mean_e: T = weights.iter().zip(&energies).map(|(&w, &e)| w * e).sum();
    let var_e: T = weights
        .iter()
        .zip(&energies)
        .map(|(&w, &e)| {
            let d = e - mean_e;
            w * d * d
        })
        .sum();
    let mean_n: T = weights.iter().enumerate().map(|(n, &w)| T::from_count(n) * w).sum();
    Ok(ThermoPoint {
        temperature: beta.recip(),
        beta,
        z: series.sum(),
        ln_z: series.ln_sum,
        specific_heat: beta * beta * var_e,
        mean_n_exact: mean_n,
        terms_used: series.log_terms.len(),
    })
}

fn beta_of<T: Real>(temperature: T) -> Result<T, ThermoError> {
    if !(temperature > T::zero()) {
        return Err(ThermoError::NonpositiveTemperature(temperature.as_f64()));
    }
    Ok(temperature.recip())
}

/// `C = β² ∂²ln Z/∂β²`, evaluated as `β² Var(E)`.
pub fn specific_heat<T: Real>(spec: &DeformationSpec<T>, omega: T, temperature: T) -> Result<T, ThermoError> {
    Ok(partition_function(spec, omega, beta_of(temperature)?, T::default_tol())?.specific_heat)
}

/// `C = β² ∂²ln Z/∂β²` by central differences with step `h = 1e-4 β`, refined once by Richardson.
///
/// All five evaluations of `ln Z` use the level count needed at the smallest `β`,
/// so the truncation does not jump between stencil points.
pub fn specific_heat_fd<T: Real>(spec: &DeformationSpec<T>, omega: T, temperature: T) -> Result<T, ThermoError> {
    let beta = beta_of(temperature)?;
    let h = T::lit(1e-4) * beta;
    let tol = T::epsilon();
    let (widest, _) = boltzmann(spec, omega, beta - h, tol)?;
    let n_terms = widest.log_terms.len();
    let ln_z = |b: T| -> Result<T, ThermoError> {
        let mut acc = T::neg_infinity();
        let mut n_lo = T::zero();
        for n in 0..n_terms {
            let n_hi = spec.deformed_number(n + 1)?;
            let e = omega * T::lit(0.5) * (n_lo + n_hi);
            n_lo = n_hi;
            acc = crate::scalar::log_add_exp(acc, -b * e);
        }
        Ok(acc)
    };
    let g0 = ln_z(beta)?;
    let second =
        |step: T| -> Result<T, ThermoError> { Ok((ln_z(beta + step)? - g0 - g0 + ln_z(beta - step)?) / (step * step)) };
    let coarse = second(h)?;
    let fine = second(h * T::lit(0.5))?;
    Ok(beta * beta * (T::lit(4.0) * fine - coarse) / T::lit(3.0))
}

/// `⟨n⟩ = Σ n e^{−βE_n} / Z`.
pub fn thermal_mean_n<T: Real>(spec: &DeformationSpec<T>, omega: T, beta: T, tol: T) -> Result<T, ThermoError> {
    Ok(partition_function(spec, omega, beta, tol)?.mean_n_exact)
}

/// Thermodynamic points at each temperature, in input order.
pub fn thermo_sweep<T: Real>(
    spec: &DeformationSpec<T>,
    omega: T,
    temperatures: &[T],
    tol: T,
) -> Result<Vec<ThermoPoint<T>>, ThermoError> {
    temperatures.par_iter().map(|&t| partition_function(spec, omega, beta_of(t)?, tol)).collect()
}

/// Bose–Einstein occupation `1/(e^x − 1)`.
pub fn bose_einstein<T: Real>(x: T) -> T {
    x.exp_m1().recip()
}

/// `1/(e^x−1) − λ² x (e^{3x} + 4e^{2x} + e^x)/(e^x−1)⁴` with `x = ω/T`.
pub fn q_planck_perturbative<T: Real>(lambda: T, omega: T, temperature: T) -> Result<T, ThermoError> {
    if !(temperature > T::zero()) {
        return Err(ThermoError::NonpositiveTemperature(temperature.as_f64()));
    }
    if !(omega > T::zero()) {
        return Err(ThermoError::NonpositiveFrequency(omega.as_f64()));
    }
    let x = omega / temperature;
    let u = (-x).exp();
    let d = -(-x).exp_m1();
    let correction = x * u * (T::one() + T::lit(4.0) * u + u * u) / (d * d * d * d);
    Ok(bose_einstein(x) - lambda * lambda * correction)
}

/// Unit-frequency Bose moments `(n^k)₀ = (1 − e^{−β}) Σ n^k e^{−βn}` for `k = 1..=4`.
pub fn bose_moments<T: Real>(beta: T) -> Result<[T; 4], ThermoError> {
    if !(beta > T::zero()) {
        return Err(ThermoError::NonpositiveBeta(beta.as_f64()));
    }
    let norm = -(-beta).exp_m1();
    let tol = T::epsilon() * T::lit(4.0);
    let mut out = [T::zero(); 4];
    for (k, slot) in out.iter_mut().enumerate() {
        let kk = T::from_count(k + 1);
        let s = sum_log_series(1, SeriesRule::new(tol, THERMO_CAP), |n| -> Result<T, ThermoError> {
            Ok(kk * T::from_count(n).ln() - beta * T::from_count(n))
        })?;
        *slot = norm * s.sum();
    }
    Ok(out)
}

/// Small-λ deformed Bose occupation at unit frequency:
/// `n̄₀ − β λ²/6 [½((n²)₀ − n̄₀²) + 3/2((n³)₀ − n̄₀(n²)₀) + (n⁴)₀ − n̄₀(n³)₀]`.
pub fn deformed_bose_perturbative<T: Real>(lambda: T, beta: T) -> Result<T, ThermoError> {
    let [m1, m2, m3, m4] = bose_moments(beta)?;
    let half = T::lit(0.5);
    let bracket = half * (m2 - m1 * m1) + T::lit(1.5) * (m3 - m1 * m2) + (m4 - m1 * m3);
    Ok(bose_einstein(beta) - beta * lambda * lambda / T::lit(6.0) * bracket)
}

/// Relative frequency shift `δω/ω = λ²n²/2` at high occupation.
pub fn blue_shift<T: Real>(lambda: T, n: T) -> T {
    lambda * lambda * n * n * T::lit(0.5)
}
