//! f-coherent states in a truncated Fock basis.

mod moments;
mod two_mode;

pub use moments::{moment_residuals, RadialMeasure};
pub use two_mode::{build_two_mode_joint, build_two_mode_product, TwoModeFCoherentState, TwoModeKind};

use num_complex::Complex;
use thiserror::Error;

use crate::deformation::{DeformationError, DeformationKind, DeformationSpec};
use crate::scalar::Real;
use crate::series::{sum_log_series, CapExceeded, LogSeries, SeriesRule};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("|alpha| = {alpha_abs:e} is outside the usable convergence region (radius {radius:e}, margin {margin:e})")]
    OutsideConvergenceRadius { alpha_abs: f64, radius: f64, margin: f64 },
    #[error("normalization series did not converge within the truncation cap N_max = {cap}")]
    TruncationCapExceeded { cap: usize },
    #[error("deformation has a zero sector; build it with build_sector_state")]
    ZeroSectorMisuse,
    #[error("sector state needs a deformation with a zero sector")]
    NotASectorSpec,
    #[error("alpha = 0 leaves no term above the zero sector")]
    DegenerateAmplitude,
    #[error("states use different deformations")]
    SpecMismatch,
    #[error("coefficient C_{n} is zero")]
    ZeroCoefficient { n: usize },
    #[error("normalization N_f(rho) diverges at rho = {rho:e}")]
    NonconvergentNormalization { rho: f64 },
    #[error("tolerance must lie in (0, 1e-2], got {0:e}")]
    InvalidTolerance(f64),
    #[error("invalid radial measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid state data: {0}")]
    InvalidState(String),
    #[error(transparent)]
    Deformation(#[from] DeformationError),
}

impl From<CapExceeded> for StateError {
    fn from(e: CapExceeded) -> Self {
        StateError::TruncationCapExceeded { cap: e.cap }
    }
}

/// Truncation controls shared by every build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildConfig<T> {
    pub tol: T,
    pub n_max: usize,
    /// Relative margin `δ`: amplitudes with `|α| ≥ (1−δ)ρ̄` are rejected.
    pub radius_margin: T,
}

impl<T: Real> Default for BuildConfig<T> {
    fn default() -> Self {
        Self { tol: T::default_tol(), n_max: 4096, radius_margin: T::lit(1e-3) }
    }
}

impl<T: Real> BuildConfig<T> {
    pub fn with_tol(tol: T) -> Self {
        Self { tol, ..Self::default() }
    }

    fn rule(&self) -> Result<SeriesRule<T>, StateError> {
        if !(self.tol > T::zero() && self.tol <= T::lit(1e-2)) {
            return Err(StateError::InvalidTolerance(self.tol.as_f64()));
        }
        Ok(SeriesRule::new(self.tol, self.n_max))
    }

    pub(crate) fn check_radius(&self, alpha_abs: T, radius: T) -> Result<(), StateError> {
        if radius.is_infinite() || alpha_abs < (T::one() - self.radius_margin) * radius {
            Ok(())
        } else {
            Err(StateError::OutsideConvergenceRadius {
                alpha_abs: alpha_abs.as_f64(),
                radius: radius.as_f64(),
                margin: self.radius_margin.as_f64(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation<T> {
    /// Highest retained Fock index.
    pub n: usize,
    /// Bound on the discarded norm, relative to the retained one.
    pub tail_bound: T,
    pub tol: T,
    pub converged: bool,
    pub last_ratio: T,
}

impl<T: Real> Truncation<T> {
    fn exact(n: usize, tol: T) -> Self {
        Self { n, tail_bound: T::zero(), tol, converged: true, last_ratio: T::zero() }
    }

    fn from_series(series: &LogSeries<T>, tol: T) -> Self {
        Self { n: series.last(), tail_bound: series.tail_bound, tol, converged: true, last_ratio: series.last_ratio }
    }
}

/// Normalized eigenstate of `A = a f(n̂)`, possibly evolved in time.
#[derive(Debug, Clone, PartialEq)]
pub struct FCoherentState<T> {
    alpha: Complex<T>,
    spec: DeformationSpec<T>,
    coeffs: Vec<Complex<T>>,
    norm_const: T,
    truncation: Truncation<T>,
    time: T,
}

impl<T: Real> FCoherentState<T> {
    pub fn alpha(&self) -> Complex<T> {
        self.alpha
    }

    pub fn spec(&self) -> &DeformationSpec<T> {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn norm_const(&self) -> T {
        self.norm_const
    }

    pub fn truncation(&self) -> &Truncation<T> {
        &self.truncation
    }

    /// Accumulated evolution time; zero for a freshly built state.
    pub fn time(&self) -> T {
        self.time
    }

    pub fn norm_sqr(&self) -> T {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_sector_state(&self) -> bool {
        self.spec.kind() == DeformationKind::ZeroSector
    }

    /// Reassembles a state from stored parts, rechecking the radius margin and the norm.
    pub fn from_parts(
        alpha: Complex<T>,
        spec: DeformationSpec<T>,
        coeffs: Vec<Complex<T>>,
        norm_const: T,
        truncation: Truncation<T>,
        time: T,
        config: &BuildConfig<T>,
    ) -> Result<Self, StateError> {
        config.check_radius(alpha.norm(), spec.convergence_radius())?;
        if coeffs.is_empty() {
            return Err(StateError::InvalidState("no coefficients".into()));
        }
        if coeffs.len() != truncation.n + 1 {
            return Err(StateError::InvalidState(format!(
                "{} coefficients but truncation N = {}",
                coeffs.len(),
                truncation.n
            )));
        }
        let state = Self { alpha, spec, coeffs, norm_const, truncation, time };
        let norm = state.norm_sqr();
        let slack = T::lit(1e-12).max(T::epsilon() * T::lit(100.0));
        if !(norm <= T::one() + slack && norm >= T::one() - truncation.tol - slack) {
            return Err(StateError::InvalidState(format!("norm {norm} is not within tolerance of 1")));
        }
        Ok(state)
    }

    /// Coefficients extended to `len` entries with the eigenvalue recurrence, including evolution phases.
    pub(crate) fn extended_coeffs(&self, len: usize) -> Result<Vec<Complex<T>>, StateError> {
        let mut out = self.coeffs.clone();
        while out.len() < len {
            let n = out.len() - 1;
            let step = self.alpha / (T::from_count(n + 1).sqrt() * self.spec.eval_f(n + 1)?);
            let dh = self.spec.hamiltonian_level(n + 1)? - self.spec.hamiltonian_level(n)?;
            out.push(out[n] * step * Complex::from_polar(T::one(), -self.time * dh));
        }
        Ok(out)
    }
}

/// Builds `|α, f⟩` with `c_n = N α^n / (√n! [f(n)]!)`, `N` real positive.
pub fn build_state<T: Real>(
    spec: &DeformationSpec<T>,
    alpha: Complex<T>,
    config: &BuildConfig<T>,
) -> Result<FCoherentState<T>, StateError> {
    let rule = config.rule()?;
    if spec.kind() == DeformationKind::ZeroSector {
        return Err(StateError::ZeroSectorMisuse);
    }
    let a = alpha.norm();
    config.check_radius(a, spec.convergence_radius())?;
    if a == T::zero() {
        return Ok(FCoherentState {
            alpha,
            spec: spec.clone(),
            coeffs: vec![Complex::new(T::one(), T::zero())],
            norm_const: T::one(),
            truncation: Truncation::exact(0, config.tol),
            time: T::zero(),
        });
    }
    let ln_a = a.ln();
    let mut lw = T::zero();
    let series = sum_log_series(0, rule, |n| -> Result<T, StateError> {
        if n > 0 {
            lw += ln_a - T::lit(0.5) * T::from_count(n).ln() - spec.ln_f(n)?;
        }
        Ok(lw + lw)
    })?;
    Ok(assemble(alpha, spec, &series, 0, config.tol))
}

/// Builds the state supported on `n > n0` for a zero-sector deformation.
pub fn build_sector_state<T: Real>(
    spec: &DeformationSpec<T>,
    alpha: Complex<T>,
    config: &BuildConfig<T>,
) -> Result<FCoherentState<T>, StateError> {
    let rule = config.rule()?;
    let (Some(n0), Some(base)) = (spec.sector_start(), spec.base()) else {
        return Err(StateError::NotASectorSpec);
    };
    let a = alpha.norm();
    config.check_radius(a, spec.convergence_radius())?;
    if a == T::zero() {
        return Err(StateError::DegenerateAmplitude);
    }
    let ln_a = a.ln();
    // n ln|α| − ½ ln(n!/n0!) − ln ∏_{j=n0+1}^{n} f(j)
    let mut lw = T::from_count(n0) * ln_a;
    let series =
        sum_log_series(n0 + 1, SeriesRule { cap: rule.cap.max(n0 + 1), ..rule }, |n| -> Result<T, StateError> {
            lw += ln_a - T::lit(0.5) * T::from_count(n).ln() - base.ln_f(n)?;
            Ok(lw + lw)
        })?;
    Ok(assemble(alpha, spec, &series, n0 + 1, config.tol))
}

fn assemble<T: Real>(
    alpha: Complex<T>,
    spec: &DeformationSpec<T>,
    series: &LogSeries<T>,
    first: usize,
    tol: T,
) -> FCoherentState<T> {
    let half = T::lit(0.5);
    let ln_norm = -half * series.ln_sum;
    let theta = alpha.arg();
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); first];
    for (k, &lt) in series.log_terms.iter().enumerate() {
        let n = first + k;
        coeffs.push(Complex::from_polar((half * lt + ln_norm).exp(), T::from_count(n) * theta));
    }
    FCoherentState {
        alpha,
        spec: spec.clone(),
        coeffs,
        norm_const: ln_norm.exp(),
        truncation: Truncation::from_series(series, tol),
        time: T::zero(),
    }
}

/// `⟨a|b⟩`, summed in ascending order over `n ≤ max(N_a, N_b)`; the shorter state is
/// extended by its own recurrence rather than padded with zeros.
pub fn inner_product<T: Real>(a: &FCoherentState<T>, b: &FCoherentState<T>) -> Result<Complex<T>, StateError> {
    if a.spec != b.spec {
        return Err(StateError::SpecMismatch);
    }
    let len = a.coeffs.len().max(b.coeffs.len());
    let ca = a.extended_coeffs(len)?;
    let cb = b.extended_coeffs(len)?;
    let mut acc = Complex::new(T::zero(), T::zero());
    for (x, y) in ca.iter().zip(&cb) {
        acc += x.conj() * y;
    }
    Ok(acc)
}

/// `c_n(t) = c_n · exp(−i t H̃(n))`; moduli are untouched.
pub fn evolve<T: Real>(state: &FCoherentState<T>, t: T) -> Result<FCoherentState<T>, StateError> {
    let mut out = state.clone();
    for (n, c) in out.coeffs.iter_mut().enumerate() {
        let h = state.spec.hamiltonian_level(n)?;
        *c *= Complex::from_polar(T::one(), -t * h);
    }
    out.time = state.time + t;
    Ok(out)
}

/// Recovers `f(n) = (1/√n) C_{n−1}/C_n`; element `k` of the result is `f(k+1)`.
pub fn f_from_coefficients<T: Real>(c: &[T]) -> Result<Vec<T>, StateError> {
    if let Some(n) = c.iter().position(|v| *v == T::zero()) {
        return Err(StateError::ZeroCoefficient { n });
    }
    Ok(c.windows(2).enumerate().map(|(k, w)| w[0] / w[1] / T::from_count(k + 1).sqrt()).collect())
}
