//! Quadrature moments, squeezing and the Schrödinger uncertainty invariant.
//!
//! With `x = (a + a†)/√2` and `p = (a − a†)/(i√2)`, the vacuum has `σ_x = σ_p = ½`.

use num_complex::Complex;
use rayon::prelude::*;
use thiserror::Error;

use crate::deformation::{DeformationError, DeformationSpec};
use crate::scalar::Real;
use crate::state::{build_state, BuildConfig, FCoherentState, StateError};

/// Variances below `½ − SQUEEZE_MARGIN` count as squeezed.
pub const SQUEEZE_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("f({n}) = 0 appears in a ladder-moment denominator")]
    ZeroDeformationValue { n: usize },
    #[error(transparent)]
    Deformation(#[from] DeformationError),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderMeans<T> {
    pub mean_a: Complex<T>,
    pub mean_a2: Complex<T>,
    pub mean_n: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureReport<T> {
    pub mean_x: T,
    pub mean_p: T,
    pub sigma_x: T,
    pub sigma_p: T,
    pub sigma_xp: T,
    pub r: T,
    pub schrodinger_invariant: T,
    pub squeezed_x: bool,
    pub squeezed_p: bool,
    /// `μ_x = ½(S₂ − S₁²)`; absent for evolved states, whose moments come from the coefficients.
    pub mu_x: Option<T>,
    pub nu_x: Option<T>,
    pub mu_p: Option<T>,
    pub nu_p: Option<T>,
    /// Largest imaginary part left in the assembled variances.
    pub hermiticity_residual: T,
}

struct SeriesSums<T> {
    s1: T,
    s2: T,
    s11: T,
}

fn nonzero_f<T: Real>(spec: &DeformationSpec<T>, n: usize) -> Result<T, QuadratureError> {
    let f = spec.eval_f(n)?;
    if f == T::zero() {
        Err(QuadratureError::ZeroDeformationValue { n })
    } else {
        Ok(f)
    }
}

fn series_sums<T: Real>(state: &FCoherentState<T>) -> Result<SeriesSums<T>, QuadratureError> {
    let spec = state.spec();
    let (mut s1, mut s2, mut s11) = (T::zero(), T::zero(), T::zero());
    let mut f_next = nonzero_f(spec, 1)?;
    for (n, c) in state.coeffs().iter().enumerate() {
        let p = c.norm_sqr();
        let f1 = f_next;
        let f2 = nonzero_f(spec, n + 2)?;
        s1 += p / f1;
        s2 += p / (f1 * f2);
        s11 += p / (f1 * f1);
        f_next = f2;
    }
    Ok(SeriesSums { s1, s2, s11 })
}

fn coefficient_means<T: Real>(c: &[Complex<T>]) -> LadderMeans<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut mean_a = zero;
    let mut mean_a2 = zero;
    let mut mean_n = T::zero();
    for n in 0..c.len() {
        let nn = T::from_count(n);
        mean_n += nn * c[n].norm_sqr();
        if n + 1 < c.len() {
            mean_a += c[n].conj() * c[n + 1] * (nn + T::one()).sqrt();
        }
        if n + 2 < c.len() {
            mean_a2 += c[n].conj() * c[n + 2] * ((nn + T::one()) * (nn + T::lit(2.0))).sqrt();
        }
    }
    LadderMeans { mean_a, mean_a2, mean_n }
}

/// `⟨a⟩`, `⟨a²⟩` and `⟨n⟩`.
///
/// Unevolved states use the series `α Σ P(n)/f(n+1)` and friends, which fail with
/// `ZeroDeformationValue` when a zero sector puts `f = 0` in a denominator. Evolved
/// states are handled directly from their coefficients.
pub fn ladder_means<T: Real>(state: &FCoherentState<T>) -> Result<LadderMeans<T>, QuadratureError> {
    if state.time() != T::zero() {
        return Ok(coefficient_means(state.coeffs()));
    }
    let s = series_sums(state)?;
    let alpha = state.alpha();
    Ok(LadderMeans { mean_a: alpha * s.s1, mean_a2: alpha * alpha * s.s2, mean_n: alpha.norm_sqr() * s.s11 })
}

pub fn quadrature_report<T: Real>(state: &FCoherentState<T>) -> Result<QuadratureReport<T>, QuadratureError> {
    let half = T::lit(0.5);
    let sqrt2 = T::SQRT_2();
    let lm = ladder_means(state)?;
    let alpha = state.alpha();
    let (sigma_x_c, sigma_p_c, mu, nu) = if state.time() == T::zero() {
        let s = series_sums(state)?;
        let mu_x = half * (s.s2 - s.s1 * s.s1);
        let nu_x = s.s11 - s.s1 * s.s1;
        let a2 = alpha * alpha;
        let aa = Complex::new(alpha.norm_sqr(), T::zero());
        let vac = Complex::new(half, T::zero());
        let sx = vac + a2 * mu_x + a2.conj() * mu_x + aa * nu_x;
        let mu_p = -mu_x;
        let sp = vac + a2 * mu_p + a2.conj() * mu_p + aa * nu_x;
        (sx, sp, Some(mu_x), Some(nu_x))
    } else {
        let m = lm.mean_a2 - lm.mean_a * lm.mean_a;
        let v = Complex::new(lm.mean_n - lm.mean_a.norm_sqr(), T::zero());
        let vac = Complex::new(half, T::zero());
        let re_m = Complex::new(m.re, T::zero());
        (vac + re_m + v, vac - re_m + v, None, None)
    };
    let m = lm.mean_a2 - lm.mean_a * lm.mean_a;
    let sigma_x = sigma_x_c.re;
    let sigma_p = sigma_p_c.re;
    let sigma_xp = m.im;
    let threshold = half - T::lit(SQUEEZE_MARGIN);
    Ok(QuadratureReport {
        mean_x: sqrt2 * lm.mean_a.re,
        mean_p: sqrt2 * lm.mean_a.im,
        sigma_x,
        sigma_p,
        sigma_xp,
        r: sigma_xp / (sigma_x * sigma_p).sqrt(),
        schrodinger_invariant: sigma_x * sigma_p - sigma_xp * sigma_xp,
        squeezed_x: sigma_x < threshold,
        squeezed_p: sigma_p < threshold,
        mu_x: mu,
        nu_x: nu,
        mu_p: mu.map(|v| -v),
        nu_p: nu,
        hermiticity_residual: sigma_x_c.im.abs().max(sigma_p_c.im.abs()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint<T> {
    pub alpha: Complex<T>,
    pub report: QuadratureReport<T>,
}

/// Reports over the polar grid `α = r e^{iφ}`, radius-major order.
pub fn scan_polar<T: Real>(
    spec: &DeformationSpec<T>,
    radii: &[T],
    angles: &[T],
    config: &BuildConfig<T>,
) -> Result<Vec<ScanPoint<T>>, QuadratureError> {
    let points: Vec<Complex<T>> =
        radii.iter().flat_map(|&r| angles.iter().map(move |&phi| Complex::from_polar(r, phi))).collect();
    points
        .par_iter()
        .map(|&alpha| {
            let state = build_state(spec, alpha, config)?;
            Ok(ScanPoint { alpha, report: quadrature_report(&state)? })
        })
        .collect()
}
