//! Classical reparametrized oscillators.
//!
//! Each mode `i` carries coordinates `(x_i, y_i)` and the invariant
//! `H_i = x_i² + y_i²`. The dynamics is `ẋ_i = Ω_i y_i`, `ẏ_i = −Ω_i x_i`, i.e.
//! `α̇_i = −iΩ_i α_i` for `α_i = x_i + i y_i`, where the frequency `Ω_i` depends
//! only on the invariants. Frequencies are therefore constant along every
//! orbit and each mode rotates rigidly.

pub mod expr;

use num_complex::Complex;
use thiserror::Error;

pub use expr::{Expr, ParseError};

use crate::scalar::Real;
use crate::special::{digamma, ln_gamma};

/// Largest drift of any invariant tolerated by [`rk4_orbit`].
pub const DRIFT_LIMIT: f64 = 1e-3;

/// Step counts above this are refused.
pub const MAX_STEPS: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassicalError {
    #[error("frequency of mode {mode} is not finite ({value})")]
    NonfiniteFrequency { mode: usize, value: f64 },
    #[error("invariant drift {drift:e} exceeds {limit:e}; reduce the step {dt}")]
    StepTooLarge { drift: f64, limit: f64, dt: f64 },
    #[error("invalid step: {0}")]
    InvalidStep(String),
    #[error("state has {got} coordinates, system needs {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("frequency of mode {mode} refers to H{index}, but the system has {modes} modes")]
    UnknownInvariant { mode: usize, index: usize, modes: usize },
    #[error("a system needs at least one mode")]
    NoModes,
    #[error("sample times must be finite and nondecreasing")]
    NonmonotoneTimes,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// `λ / sinh λ`, equal to 1 for `|λ| < 1e-8`.
pub fn lambda_over_sinh<T: Real>(lambda: T) -> T {
    if lambda.abs() < T::lit(1e-8) {
        T::one()
    } else {
        lambda / lambda.sinh()
    }
}

/// `(λ/sinh λ) √(1 + H² sinh²λ)` with `H = |ξ|²`.
fn q_bracket_frequency<T: Real>(lambda: T, h: T) -> T {
    let s = lambda.sinh();
    lambda_over_sinh(lambda) * (h * s).hypot(T::one())
}

/// `{ξ, ξ*}/i = −(λ/sinh λ) √(1 + |ξ|⁴ sinh²λ)`.
pub fn deformed_bracket<T: Real>(lambda: T, xi: Complex<T>) -> T {
    -q_bracket_frequency(lambda, xi.norm_sqr())
}

/// `ξ(t) = ξ₀ exp(−i t (λ/sinh λ) √(1 + |ξ₀|⁴ sinh²λ))`.
pub fn q_closed_form<T: Real>(lambda: T, xi0: Complex<T>, t: T) -> Complex<T> {
    let w = q_bracket_frequency(lambda, xi0.norm_sqr());
    xi0 * Complex::from_polar(T::one(), -w * t)
}

/// `(λ/sinh λ) cosh(λ I)`, the frequency of the classical q-oscillator at intensity `I = αα*`.
pub fn classical_frequency<T: Real>(lambda: T, intensity: T) -> T {
    lambda_over_sinh(lambda) * (lambda * intensity).cosh()
}

/// `d/dn (n/Γ(n+1)) = (1 − n ψ(n+1))/Γ(n+1)`.
pub fn gamma_factorial_bracket<T: Real>(n: T) -> T {
    let m = n + T::one();
    (T::one() - n * digamma(m)) * (-ln_gamma(m)).exp()
}

/// Deformation of a single classical mode through `n f²(n)` with real `n = |α|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuousDeformation<T> {
    Identity,
    /// `n f²(n) = sinh(λn)/sinh λ`.
    Q {
        lambda: T,
    },
    /// `n f²(n) = 1`.
    Harmonious,
    /// `f(n) = Γ(n+1)^{−1/2}`.
    GammaFactorial,
}

impl<T: Real> ContinuousDeformation<T> {
    /// `d/dn (n f²(n))`.
    pub fn number_derivative(&self, n: T) -> T {
        match *self {
            ContinuousDeformation::Identity => T::one(),
            ContinuousDeformation::Q { lambda } => classical_frequency(lambda, n),
            ContinuousDeformation::Harmonious => T::zero(),
            ContinuousDeformation::GammaFactorial => gamma_factorial_bracket(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrequencyLaw<T> {
    /// `Ω_i = expr(H_1, ..., H_m)`.
    Expr(Expr),
    /// `Ω_i = d/dn(n f²(n))` at `n = H_i`.
    Deformed(ContinuousDeformation<T>),
    /// `Ω_i = (λ/sinh λ) √(1 + H_i² sinh²λ)`, the q-bracket field on `ξ_i = x_i + i y_i`.
    QBracket { lambda: T },
}

impl<T: Real> FrequencyLaw<T> {
    pub fn constant(omega: f64) -> Self {
        FrequencyLaw::Expr(Expr::Const(omega))
    }

    fn evaluate(&self, mode: usize, h: &[T]) -> T {
        match self {
            FrequencyLaw::Expr(e) => e.eval(h),
            FrequencyLaw::Deformed(d) => d.number_derivative(h[mode]),
            FrequencyLaw::QBracket { lambda } => q_bracket_frequency(*lambda, h[mode]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSystem<T> {
    laws: Vec<FrequencyLaw<T>>,
}

impl<T: Real> ClassicalSystem<T> {
    pub fn new(laws: Vec<FrequencyLaw<T>>) -> Result<Self, ClassicalError> {
        if laws.is_empty() {
            return Err(ClassicalError::NoModes);
        }
        let modes = laws.len();
        for (mode, law) in laws.iter().enumerate() {
            if let FrequencyLaw::Expr(e) = law {
                if e.arity() > modes {
                    return Err(ClassicalError::UnknownInvariant { mode, index: e.arity(), modes });
                }
            }
        }
        Ok(Self { laws })
    }

    /// One mode per expression.
    pub fn from_exprs<S: AsRef<str>>(exprs: &[S]) -> Result<Self, ClassicalError> {
        let laws = exprs
            .iter()
            .map(|s| Ok(FrequencyLaw::Expr(Expr::parse(s.as_ref())?)))
            .collect::<Result<_, ClassicalError>>()?;
        Self::new(laws)
    }

    /// `modes` copies of the same law.
    pub fn uniform(modes: usize, law: FrequencyLaw<T>) -> Result<Self, ClassicalError> {
        Self::new(vec![law; modes])
    }

    pub fn modes(&self) -> usize {
        self.laws.len()
    }

    pub fn laws(&self) -> &[FrequencyLaw<T>] {
        &self.laws
    }

    fn check_dim(&self, state: &[T]) -> Result<(), ClassicalError> {
        if state.len() != 2 * self.modes() {
            return Err(ClassicalError::DimensionMismatch { expected: 2 * self.modes(), got: state.len() });
        }
        Ok(())
    }

    /// `H_i = x_i² + y_i²` for a state laid out as `x1, y1, x2, y2, ...`.
    pub fn invariants(&self, state: &[T]) -> Vec<T> {
        state.chunks_exact(2).map(|c| c[0] * c[0] + c[1] * c[1]).collect()
    }

    pub fn frequencies(&self, state: &[T]) -> Result<Vec<T>, ClassicalError> {
        self.check_dim(state)?;
        let h = self.invariants(state);
        self.laws
            .iter()
            .enumerate()
            .map(|(mode, law)| {
                let w = law.evaluate(mode, &h);
                if w.is_finite() {
                    Ok(w)
                } else {
                    Err(ClassicalError::NonfiniteFrequency { mode, value: w.as_f64() })
                }
            })
            .collect()
    }

    /// Writes `(ẋ_i, ẏ_i) = Ω_i (y_i, −x_i)` into `out`.
    pub fn vector_field(&self, state: &[T], out: &mut [T]) -> Result<(), ClassicalError> {
        let w = self.frequencies(state)?;
        for (i, &wi) in w.iter().enumerate() {
            out[2 * i] = wi * state[2 * i + 1];
            out[2 * i + 1] = -wi * state[2 * i];
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitMethod {
    Exact,
    Rk4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalOrbit<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub method: OrbitMethod,
    /// `max_{t,i} |H_i(t) − H_i(0)| / H_i(0)` (absolute when `H_i(0) = 0`).
    pub max_invariant_drift: T,
}

fn invariant_drift<T: Real>(system: &ClassicalSystem<T>, states: &[Vec<T>]) -> T {
    let h0 = system.invariants(&states[0]);
    let mut drift = T::zero();
    for s in &states[1..] {
        for (a, b) in system.invariants(s).iter().zip(&h0) {
            let d = (*a - *b).abs();
            drift = drift.max(if *b > T::zero() { d / *b } else { d });
        }
    }
    drift
}

/// Rigid rotation of every mode with frequencies frozen at the initial invariants.
pub fn exact_orbit<T: Real>(
    system: &ClassicalSystem<T>,
    initial: &[T],
    times: &[T],
) -> Result<ClassicalOrbit<T>, ClassicalError> {
    let w = system.frequencies(initial)?;
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|p| p[1] < p[0]) {
        return Err(ClassicalError::NonmonotoneTimes);
    }
    let states: Vec<Vec<T>> = times
        .iter()
        .map(|&t| {
            let mut s = vec![T::zero(); initial.len()];
            for (i, &wi) in w.iter().enumerate() {
                let (x0, y0) = (initial[2 * i], initial[2 * i + 1]);
                let (sn, cs) = (wi * t).sin_cos();
                s[2 * i] = x0 * cs + y0 * sn;
                s[2 * i + 1] = -x0 * sn + y0 * cs;
            }
            s
        })
        .collect();
    let max_invariant_drift = if states.is_empty() { T::zero() } else { invariant_drift(system, &states) };
    Ok(ClassicalOrbit { times: times.to_vec(), states, method: OrbitMethod::Exact, max_invariant_drift })
}

/// Sample times `0, dt, 2dt, ...` ending exactly at `t_max` (the last step may be shorter).
pub fn step_times<T: Real>(dt: T, t_max: T) -> Result<Vec<T>, ClassicalError> {
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(ClassicalError::InvalidStep(format!("dt must be positive and finite, got {dt}")));
    }
    if !(t_max >= T::zero() && t_max.is_finite()) {
        return Err(ClassicalError::InvalidStep(format!("t_max must be nonnegative and finite, got {t_max}")));
    }
    let ratio = t_max / dt;
    let nearest = ratio.round();
    let steps = if (ratio - nearest).abs() <= T::lit(1e-9) * nearest.max(T::one()) { nearest } else { ratio.ceil() };
    let steps = steps
        .to_usize()
        .filter(|&n| n <= MAX_STEPS)
        .ok_or_else(|| ClassicalError::InvalidStep(format!("t_max/dt = {ratio} exceeds {MAX_STEPS} steps")))?;
    let mut times: Vec<T> = (0..steps).map(|k| T::from_count(k) * dt).collect();
    times.push(t_max);
    Ok(times)
}

/// Classic fourth-order Runge–Kutta on the system's vector field.
///
/// Frequencies are recomputed at every stage. Fails with `StepTooLarge` when any
/// invariant drifts by more than [`DRIFT_LIMIT`].
pub fn rk4_orbit<T: Real>(
    system: &ClassicalSystem<T>,
    initial: &[T],
    dt: T,
    t_max: T,
) -> Result<ClassicalOrbit<T>, ClassicalError> {
    system.check_dim(initial)?;
    let times = step_times(dt, t_max)?;
    let d = initial.len();
    let (mut k1, mut k2, mut k3, mut k4) =
        (vec![T::zero(); d], vec![T::zero(); d], vec![T::zero(); d], vec![T::zero(); d]);
    let mut tmp = vec![T::zero(); d];
    let mut states = Vec::with_capacity(times.len());
    states.push(initial.to_vec());
    let half = T::lit(0.5);
    let sixth = T::lit(1.0 / 6.0);
    for w in times.windows(2) {
        let h = w[1] - w[0];
        let y = states.last().expect("orbit starts with the initial state");
        system.vector_field(y, &mut k1)?;
        for j in 0..d {
            tmp[j] = y[j] + half * h * k1[j];
        }
        system.vector_field(&tmp, &mut k2)?;
        for j in 0..d {
            tmp[j] = y[j] + half * h * k2[j];
        }
        system.vector_field(&tmp, &mut k3)?;
        for j in 0..d {
            tmp[j] = y[j] + h * k3[j];
        }
        system.vector_field(&tmp, &mut k4)?;
        let next: Vec<T> = (0..d).map(|j| y[j] + h * sixth * (k1[j] + (k2[j] + k3[j]) * T::lit(2.0) + k4[j])).collect();
        states.push(next);
    }
    let drift = invariant_drift(system, &states);
    if !(drift <= T::lit(DRIFT_LIMIT)) {
        return Err(ClassicalError::StepTooLarge { drift: drift.as_f64(), limit: DRIFT_LIMIT, dt: dt.as_f64() });
    }
    Ok(ClassicalOrbit { times, states, method: OrbitMethod::Rk4, max_invariant_drift: drift })
}

/// Largest coordinate difference between two orbits sampled at the same times.
pub fn max_deviation<T: Real>(a: &ClassicalOrbit<T>, b: &ClassicalOrbit<T>) -> T {
    a.states
        .iter()
        .zip(&b.states)
        .flat_map(|(p, q)| p.iter().zip(q).map(|(u, v)| (*u - *v).abs()))
        .fold(T::zero(), T::max)
}

/// RK4 errors against the exact orbit at `t_max` for each step, and the observed
/// orders `ln(e_k/e_{k+1}) / ln(dt_k/dt_{k+1})` between consecutive steps.
pub fn observed_order<T: Real>(
    system: &ClassicalSystem<T>,
    initial: &[T],
    t_max: T,
    dts: &[T],
) -> Result<(Vec<T>, Vec<T>), ClassicalError> {
    let reference = exact_orbit(system, initial, &[t_max])?;
    let errors = dts
        .iter()
        .map(|&dt| {
            let orbit = rk4_orbit(system, initial, dt, t_max)?;
            let last = orbit.states.last().expect("nonempty orbit");
            Ok(last.iter().zip(&reference.states[0]).map(|(u, v)| (*u - *v).abs()).fold(T::zero(), T::max))
        })
        .collect::<Result<Vec<T>, ClassicalError>>()?;
    let orders = errors.windows(2).zip(dts.windows(2)).map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln()).collect();
    Ok((errors, orders))
}

/// Largest distance from a point of `b` to the polyline through the points of `a`,
/// taken per mode so the comparison is between phase portraits.
pub fn portrait_distance<T: Real>(a: &ClassicalOrbit<T>, b: &ClassicalOrbit<T>) -> T {
    let modes = a.states.first().map_or(0, |s| s.len() / 2);
    let mut worst = T::zero();
    for i in 0..modes {
        let pts: Vec<(T, T)> = a.states.iter().map(|s| (s[2 * i], s[2 * i + 1])).collect();
        for s in &b.states {
            let p = (s[2 * i], s[2 * i + 1]);
            let d = pts.windows(2).map(|seg| segment_distance(p, seg[0], seg[1])).fold(T::infinity(), T::min);
            let d = if pts.len() == 1 { ((p.0 - pts[0].0).powi(2) + (p.1 - pts[0].1).powi(2)).sqrt() } else { d };
            worst = worst.max(d);
        }
    }
    worst
}

fn segment_distance<T: Real>(p: (T, T), a: (T, T), b: (T, T)) -> T {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > T::zero() {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}
