use super::{BuildConfig, StateError};
use crate::deformation::DeformationSpec;
use crate::scalar::Real;
use crate::series::sum_log_series;
use crate::special::ln_factorial;

/// Radial weight `μ(ρ)` sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMeasure<T> {
    rho: Vec<T>,
    weight: Vec<T>,
}

impl<T: Real> RadialMeasure<T> {
    pub fn sampled(rho: Vec<T>, weight: Vec<T>) -> Result<Self, StateError> {
        if rho.len() != weight.len() {
            return Err(StateError::InvalidMeasure(format!("{} abscissae but {} weights", rho.len(), weight.len())));
        }
        if rho.len() < 3 {
            return Err(StateError::InvalidMeasure("need at least three samples".into()));
        }
        if rho[0] < T::zero() {
            return Err(StateError::InvalidMeasure("radii must be nonnegative".into()));
        }
        let h = rho[1] - rho[0];
        if !(h > T::zero()) {
            return Err(StateError::InvalidMeasure("radii must increase".into()));
        }
        let slack = T::lit(1e-9) * h + T::lit(16.0) * T::epsilon() * rho[rho.len() - 1];
        for w in rho.windows(2) {
            if ((w[1] - w[0]) - h).abs() > slack {
                return Err(StateError::InvalidMeasure("radii must be uniformly spaced".into()));
            }
        }
        Ok(Self { rho, weight })
    }

    /// `points` uniform samples of `f` on `[a, b]`.
    pub fn from_fn(a: T, b: T, points: usize, f: impl Fn(T) -> T) -> Result<Self, StateError> {
        if points < 3 {
            return Err(StateError::InvalidMeasure("need at least three samples".into()));
        }
        let h = (b - a) / T::from_count(points - 1);
        let rho: Vec<T> = (0..points).map(|k| a + h * T::from_count(k)).collect();
        let weight = rho.iter().map(|&r| f(r)).collect();
        Self::sampled(rho, weight)
    }

    pub fn rho(&self) -> &[T] {
        &self.rho
    }

    pub fn weight(&self) -> &[T] {
        &self.weight
    }
}

/// Composite Simpson rule on uniform samples, closing with the 3/8 rule for an odd interval count.
pub(crate) fn simpson<T: Real>(h: T, y: &[T]) -> T {
    let m = y.len() - 1;
    let three_eighths = |y: &[T]| T::lit(3.0) * h / T::lit(8.0) * (y[0] + T::lit(3.0) * (y[1] + y[2]) + y[3]);
    let simpson_even = |y: &[T]| {
        let mut acc = y[0] + y[y.len() - 1];
        for (k, v) in y.iter().enumerate().take(y.len() - 1).skip(1) {
            acc += if k % 2 == 1 { T::lit(4.0) * *v } else { T::lit(2.0) * *v };
        }
        acc * h / T::lit(3.0)
    };
    match m {
        0 => T::zero(),
        1 => h * (y[0] + y[1]) / T::lit(2.0),
        3 => three_eighths(y),
        _ if m % 2 == 0 => simpson_even(y),
        _ => simpson_even(&y[..m - 2]) + three_eighths(&y[m - 3..]),
    }
}

/// Relative residuals of `2π ∫ ρ^{2n+1} N_f(ρ)² μ(ρ) dρ = n! ([f(n)]!)²` for `n = 0..=n_max`.
pub fn moment_residuals<T: Real>(
    spec: &DeformationSpec<T>,
    measure: &RadialMeasure<T>,
    n_max: usize,
    config: &BuildConfig<T>,
) -> Result<Vec<T>, StateError> {
    let rule = config.rule()?;
    let radius = spec.convergence_radius();
    let mut ln_s = Vec::with_capacity(measure.rho.len());
    for &rho in &measure.rho {
        if rho >= radius {
            return Err(StateError::NonconvergentNormalization { rho: rho.as_f64() });
        }
        if rho == T::zero() {
            ln_s.push(T::zero());
            continue;
        }
        let ln_rho = rho.ln();
        let mut lw = T::zero();
        let series = sum_log_series(0, rule, |n| -> Result<T, StateError> {
            if n > 0 {
                lw += ln_rho - T::lit(0.5) * T::from_count(n).ln() - spec.ln_f(n)?;
            }
            Ok(lw + lw)
        })
        .map_err(|e| match e {
            StateError::TruncationCapExceeded { .. } => StateError::NonconvergentNormalization { rho: rho.as_f64() },
            other => other,
        })?;
        ln_s.push(series.ln_sum);
    }

    let h = measure.rho[1] - measure.rho[0];
    let two_pi = T::TAU();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let ln_target = ln_factorial::<T>(n) + T::lit(2.0) * spec.f_log_factorial(n)?;
        let power = T::from_count(2 * n + 1);
        let y: Vec<T> = measure
            .rho
            .iter()
            .zip(&measure.weight)
            .zip(&ln_s)
            .map(|((&r, &w), &ls)| if r == T::zero() { T::zero() } else { w * (power * r.ln() - ls - ln_target).exp() })
            .collect();
        out.push(two_pi * simpson(h, &y) - T::one());
    }
    Ok(out)
}
