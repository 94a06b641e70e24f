//! Deformation functions `f(n)` and the pointwise algebra built on them.

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeformationError {
    #[error("tabulated deformation has {len} values, f({n}) requested")]
    TabulatedOutOfRange { n: usize, len: usize },
    #[error("f({n}) = 0 inside the factorial range; use the sector factorial")]
    ZeroInRange { n: usize },
    #[error("partial sum under the square root is negative ({sum:e}) at n = {n}")]
    NegativePartialSum { n: usize, sum: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid deformation parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeformationKind {
    Identity,
    QDeform,
    Harmonious,
    Tabulated,
    ZeroSector,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape<T> {
    Identity,
    Q { lambda: T },
    Harmonious,
    Table { values: Vec<T> },
    ZeroSector { n0: usize, base: Box<DeformationSpec<T>> },
}

/// A deformation function `f: ℕ → [0, ∞)` with its cached amplitude convergence radius.
///
/// Built-in kinds use `f(0) = 1`; a tabulated `f(0)` is taken as given.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationSpec<T> {
    shape: Shape<T>,
    radius: T,
}

fn ln_sinh<T: Real>(x: T) -> T {
    if x >= T::one() {
        let decay = (-(x + x)).exp();
        x - T::LN_2() + (-decay).ln_1p()
    } else {
        x.sinh().ln()
    }
}

impl<T: Real> DeformationSpec<T> {
    pub fn identity() -> Self {
        Self { shape: Shape::Identity, radius: T::infinity() }
    }

    /// `f(n) = sqrt(sinh(λn) / (n sinh λ))`, `λ = ln q ≠ 0`.
    pub fn q_deform(lambda: T) -> Result<Self, DeformationError> {
        if !lambda.is_finite() || lambda == T::zero() {
            return Err(DeformationError::InvalidParameter(format!("lambda must be finite and nonzero, got {lambda}")));
        }
        Ok(Self { shape: Shape::Q { lambda }, radius: T::infinity() })
    }

    /// `f(n) = 1/√n`.
    pub fn harmonious() -> Self {
        Self { shape: Shape::Harmonious, radius: T::one() }
    }

    /// Explicit values `f(0), f(1), ...`; every `f(n)` with `n ≥ 1` must be positive.
    pub fn tabulated(values: Vec<T>) -> Result<Self, DeformationError> {
        if values.len() < 2 {
            return Err(DeformationError::InvalidParameter("table needs at least f(0) and f(1)".into()));
        }
        if let Some((n, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < T::zero()) {
            return Err(DeformationError::InvalidParameter(format!(
                "table value f({n}) = {v} is not a nonnegative finite number"
            )));
        }
        if let Some(n) = values.iter().skip(1).position(|v| *v == T::zero()) {
            return Err(DeformationError::InvalidParameter(format!(
                "table value f({}) is zero; declare a zero sector instead",
                n + 1
            )));
        }
        let radius = table_radius(&values);
        Ok(Self { shape: Shape::Table { values }, radius })
    }

    /// `f(n) = 0` for `n ≤ n0`, the base deformation above.
    pub fn zero_sector(n0: usize, base: DeformationSpec<T>) -> Result<Self, DeformationError> {
        if base.kind() == DeformationKind::ZeroSector {
            return Err(DeformationError::InvalidParameter("zero-sector base cannot itself be a zero sector".into()));
        }
        let radius = base.radius;
        Ok(Self { shape: Shape::ZeroSector { n0, base: Box::new(base) }, radius })
    }

    pub fn kind(&self) -> DeformationKind {
        match self.shape {
            Shape::Identity => DeformationKind::Identity,
            Shape::Q { .. } => DeformationKind::QDeform,
            Shape::Harmonious => DeformationKind::Harmonious,
            Shape::Table { .. } => DeformationKind::Tabulated,
            Shape::ZeroSector { .. } => DeformationKind::ZeroSector,
        }
    }

    pub fn lambda(&self) -> Option<T> {
        match self.shape {
            Shape::Q { lambda } => Some(lambda),
            _ => None,
        }
    }

    pub fn table(&self) -> Option<&[T]> {
        match &self.shape {
            Shape::Table { values } => Some(values),
            _ => None,
        }
    }

    pub fn sector_start(&self) -> Option<usize> {
        match self.shape {
            Shape::ZeroSector { n0, .. } => Some(n0),
            _ => None,
        }
    }

    pub fn base(&self) -> Option<&DeformationSpec<T>> {
        match &self.shape {
            Shape::ZeroSector { base, .. } => Some(base),
            _ => None,
        }
    }

    /// Amplitude convergence radius `ρ̄`.
    pub fn convergence_radius(&self) -> T {
        self.radius
    }

    /// Largest `n` for which `f(n)` is available.
    pub fn max_index(&self) -> Option<usize> {
        match &self.shape {
            Shape::Table { values } => Some(values.len() - 1),
            Shape::ZeroSector { base, .. } => base.max_index(),
            _ => None,
        }
    }

    pub fn eval_f(&self, n: usize) -> Result<T, DeformationError> {
        match &self.shape {
            Shape::Identity => Ok(T::one()),
            Shape::Q { .. } | Shape::Harmonious => Ok(self.ln_f(n)?.exp()),
            Shape::Table { values } => {
                values.get(n).copied().ok_or(DeformationError::TabulatedOutOfRange { n, len: values.len() })
            }
            Shape::ZeroSector { n0, base } => {
                if n <= *n0 {
                    Ok(T::zero())
                } else {
                    base.eval_f(n)
                }
            }
        }
    }

    /// `ln f(n)`, `-inf` inside a zero sector.
    pub fn ln_f(&self, n: usize) -> Result<T, DeformationError> {
        match &self.shape {
            Shape::Identity => Ok(T::zero()),
            Shape::Q { lambda } => {
                if n <= 1 {
                    return Ok(T::zero());
                }
                let l = lambda.abs();
                let nn = T::from_count(n);
                Ok(T::lit(0.5) * (ln_sinh(l * nn) - nn.ln() - ln_sinh(l)))
            }
            Shape::Harmonious => {
                if n == 0 {
                    Ok(T::zero())
                } else {
                    Ok(-T::lit(0.5) * T::from_count(n).ln())
                }
            }
            Shape::Table { .. } => Ok(self.eval_f(n)?.ln()),
            Shape::ZeroSector { n0, base } => {
                if n <= *n0 {
                    Ok(T::neg_infinity())
                } else {
                    base.ln_f(n)
                }
            }
        }
    }

    /// `ln [f(n)]! = ln ∏_{j=1}^{n} f(j)`.
    pub fn f_log_factorial(&self, n: usize) -> Result<T, DeformationError> {
        match &self.shape {
            Shape::Identity => Ok(T::zero()),
            Shape::Harmonious => Ok(-T::lit(0.5) * crate::special::ln_factorial::<T>(n)),
            Shape::ZeroSector { n0, .. } if n >= 1 && *n0 >= 1 => Err(DeformationError::ZeroInRange { n: 1 }),
            _ => {
                let mut acc = T::zero();
                for j in 1..=n {
                    acc += self.ln_f(j)?;
                }
                Ok(acc)
            }
        }
    }

    /// `ln ∏_{j=n0+1}^{n} f(j)` for a zero-sector spec and `n ≥ n0`.
    pub fn sector_log_factorial(&self, n: usize) -> Result<T, DeformationError> {
        let Shape::ZeroSector { n0, base } = &self.shape else {
            return Err(DeformationError::Domain("sector factorial needs a zero-sector deformation".into()));
        };
        if n < *n0 {
            return Err(DeformationError::Domain(format!("sector factorial needs n ≥ n0 = {n0}, got {n}")));
        }
        let mut acc = T::zero();
        for j in (n0 + 1)..=n {
            acc += base.ln_f(j)?;
        }
        Ok(acc)
    }

    /// `n f²(n)`, the eigenvalue of `A†A` on `|n⟩`.
    pub fn deformed_number(&self, n: usize) -> Result<T, DeformationError> {
        if n == 0 {
            // still surface out-of-range tables
            self.eval_f(0)?;
            return Ok(T::zero());
        }
        let nn = T::from_count(n);
        match &self.shape {
            Shape::Identity => Ok(nn),
            Shape::Harmonious => Ok(T::one()),
            Shape::Q { lambda } => {
                let l = lambda.abs();
                Ok((ln_sinh(l * nn) - ln_sinh(l)).exp())
            }
            _ => {
                let f = self.eval_f(n)?;
                Ok(nn * f * f)
            }
        }
    }

    /// `F(n) = (n+1)f²(n+1) − n f²(n)`.
    pub fn commutator_f(&self, n: usize) -> Result<T, DeformationError> {
        self.q_commutator_g(n, T::one())
    }

    /// `G(n) = (n+1)f²(n+1) − q n f²(n)`.
    pub fn q_commutator_g(&self, n: usize, q: T) -> Result<T, DeformationError> {
        Ok(self.deformed_number(n + 1)? - q * self.deformed_number(n)?)
    }

    /// `E_n = (ω/2)[(n+1)f²(n+1) + n f²(n)]`.
    pub fn energy_level(&self, omega: T, n: usize) -> Result<T, DeformationError> {
        Ok(omega * T::lit(0.5) * (self.deformed_number(n + 1)? + self.deformed_number(n)?))
    }

    /// `H̃(n) = ½[n f²(n) + (n+1) f²(n+1)]`, the unit-frequency Hamiltonian eigenvalue.
    pub fn hamiltonian_level(&self, n: usize) -> Result<T, DeformationError> {
        self.energy_level(T::one(), n)
    }

    /// `ω(n) = ½[(n+1)f²(n+1) − (n−1)f²(n−1)]`, defined for `n ≥ 1`.
    pub fn transition_frequency(&self, n: usize) -> Result<T, DeformationError> {
        if n == 0 {
            return Err(DeformationError::Domain("transition frequency needs n ≥ 1".into()));
        }
        Ok(T::lit(0.5) * (self.deformed_number(n + 1)? - self.deformed_number(n - 1)?))
    }

    /// `exp(−i t ω(n))` for `n ≥ 1`, `exp(−i t H̃(0))` at `n = 0`.
    pub fn evolution_phase(&self, n: usize, t: T) -> Result<Complex<T>, DeformationError> {
        let w = if n == 0 { self.hamiltonian_level(0)? } else { self.transition_frequency(n)? };
        Ok(Complex::from_polar(T::one(), -t * w))
    }
}

fn table_radius<T: Real>(values: &[T]) -> T {
    let len = values.len();
    if len < 4 {
        return T::infinity();
    }
    let lo = (len - 1) / 2;
    let hi = len - 2;
    let r = |n: usize| T::from_count(n + 1).sqrt() * values[n + 1];
    let min = (lo..=hi).map(r).fold(T::infinity(), T::min);
    if min > T::lit(1e6) || r(hi) >= T::lit(1.2) * r(lo) {
        T::infinity()
    } else {
        min
    }
}

/// Inverts the commutator function: `f(n) = (1/√n) sqrt(Σ_{j<n} F(j))`.
pub fn f_from_commutator<T: Real>(commutator: &[T], n: usize) -> Result<T, DeformationError> {
    if n == 0 || n > commutator.len() {
        return Err(DeformationError::Domain(format!("need 1 ≤ n ≤ {}, got {n}", commutator.len())));
    }
    let sum: T = commutator[..n].iter().copied().sum();
    root_over_n(sum, n)
}

/// Inverts the q-commutator: `f(n) = (1/√n) sqrt(Σ_{j<n} q^j G(n−j−1))`, `q ∈ (0, 1]`.
pub fn f_from_q_commutator<T: Real>(q_commutator: &[T], q: T, n: usize) -> Result<T, DeformationError> {
    if !(q > T::zero() && q <= T::one()) {
        return Err(DeformationError::Domain(format!("q must lie in (0, 1], got {q}")));
    }
    if n == 0 || n > q_commutator.len() {
        return Err(DeformationError::Domain(format!("need 1 ≤ n ≤ {}, got {n}", q_commutator.len())));
    }
    // Horner form of Σ_{k<n} q^{n-1-k} G(k)
    let mut sum = T::zero();
    for &g in &q_commutator[..n] {
        sum = sum * q + g;
    }
    root_over_n(sum, n)
}

fn root_over_n<T: Real>(sum: T, n: usize) -> Result<T, DeformationError> {
    if sum < T::zero() {
        return Err(DeformationError::NegativePartialSum { n, sum: sum.as_f64() });
    }
    Ok((sum / T::from_count(n)).sqrt())
}

/// JSON form: `{"kind":"q","lambda":0.5}` and friends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SpecJson {
    Identity,
    Q { lambda: f64 },
    Harmonious,
    Table { values: Vec<f64> },
    ZeroSector { n0: usize, base: Box<SpecJson> },
}

impl<T: Real> DeformationSpec<T> {
    fn to_json_repr(&self) -> SpecJson {
        match &self.shape {
            Shape::Identity => SpecJson::Identity,
            Shape::Q { lambda } => SpecJson::Q { lambda: lambda.as_f64() },
            Shape::Harmonious => SpecJson::Harmonious,
            Shape::Table { values } => SpecJson::Table { values: values.iter().map(|v| v.as_f64()).collect() },
            Shape::ZeroSector { n0, base } => SpecJson::ZeroSector { n0: *n0, base: Box::new(base.to_json_repr()) },
        }
    }

    fn from_json_repr(repr: SpecJson) -> Result<Self, DeformationError> {
        Ok(match repr {
            SpecJson::Identity => Self::identity(),
            SpecJson::Q { lambda } => Self::q_deform(T::lit(lambda))?,
            SpecJson::Harmonious => Self::harmonious(),
            SpecJson::Table { values } => Self::tabulated(values.into_iter().map(T::lit).collect())?,
            SpecJson::ZeroSector { n0, base } => Self::zero_sector(n0, Self::from_json_repr(*base)?)?,
        })
    }
}

impl<T: Real> Serialize for DeformationSpec<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json_repr().serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for DeformationSpec<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SpecJson::deserialize(deserializer)?;
        Self::from_json_repr(repr).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Spec = DeformationSpec<f64>;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Spec::identity().eval_f(7).unwrap(), 1.0);
        assert!(close(Spec::q_deform(0.5).unwrap().eval_f(1).unwrap(), 1.0, 1e-15));
        assert!(close(Spec::harmonious().eval_f(4).unwrap(), 0.5, 1e-15));
        let q = Spec::q_deform(0.5).unwrap();
        let direct = ((0.5_f64 * 3.0).sinh() / (3.0 * 0.5_f64.sinh())).sqrt();
        assert!(close(q.eval_f(3).unwrap(), direct, 1e-14));
    }

    #[test]
    fn q_depends_on_abs_lambda_and_survives_large_n() {
        let a = Spec::q_deform(0.7).unwrap();
        let b = Spec::q_deform(-0.7).unwrap();
        assert_eq!(a.eval_f(9).unwrap(), b.eval_f(9).unwrap());
        let big = a.ln_f(5000).unwrap();
        assert!(big.is_finite() && big > 0.0);
    }

    #[test]
    fn factorial_examples() {
        assert_eq!(Spec::identity().f_log_factorial(10).unwrap(), 0.0);
        assert!(close(Spec::harmonious().f_log_factorial(3).unwrap(), -0.5 * 6.0_f64.ln(), 1e-14));
        let q = Spec::q_deform(0.5).unwrap();
        let want = 0.5 * (1.0_f64.sinh() / (2.0 * 0.5_f64.sinh())).ln();
        assert!(close(q.f_log_factorial(2).unwrap(), want, 1e-14));
        let z = Spec::zero_sector(2, Spec::identity()).unwrap();
        assert_eq!(z.f_log_factorial(3), Err(DeformationError::ZeroInRange { n: 1 }));
        assert_eq!(z.f_log_factorial(0).unwrap(), 0.0);
    }

    #[test]
    fn commutator_examples() {
        assert_eq!(Spec::identity().commutator_f(4).unwrap(), 1.0);
        assert!(Spec::harmonious().commutator_f(5).unwrap().abs() < 1e-15);
        let l: f64 = 0.8;
        let q = Spec::q_deform(l).unwrap();
        for n in 0..30 {
            // the commutator written through N = A†A, with N|n⟩ = n f²(n)|n⟩
            let nn = q.deformed_number(n).unwrap();
            let want = nn * (l.cosh() - 1.0) + (nn * nn * l.sinh().powi(2) + 1.0).sqrt();
            assert!(close(q.commutator_f(n).unwrap(), want, 1e-12), "n = {n}");
        }
    }

    #[test]
    fn q_commutator_examples() {
        assert_eq!(Spec::identity().q_commutator_g(3, 1.0).unwrap(), 1.0);
        assert_eq!(Spec::identity().q_commutator_g(2, 0.5).unwrap(), 2.0);
        let q = Spec::q_deform(1.0).unwrap();
        let e = std::f64::consts::E;
        assert!(close(q.q_commutator_g(2, e).unwrap(), e.powi(-2), 1e-12));
    }

    #[test]
    fn inversions() {
        assert_eq!(f_from_commutator(&[1.0; 4], 4).unwrap(), 1.0);
        assert_eq!(f_from_commutator(&[0.0; 2], 2).unwrap(), 0.0);
        assert!(matches!(f_from_commutator(&[-1.0, 0.0], 2), Err(DeformationError::NegativePartialSum { .. })));
        assert_eq!(f_from_q_commutator(&[1.0; 9], 1.0, 9).unwrap(), 1.0);
        let l: f64 = 0.6;
        let qv = (-l).exp();
        let spec = Spec::q_deform(l).unwrap();
        let seed: Vec<f64> = (0..20).map(|j| qv.powi(-j)).collect();
        for n in 1..=20 {
            assert!(close(f_from_q_commutator(&seed, qv, n).unwrap(), spec.eval_f(n).unwrap(), 1e-12));
        }
    }

    #[test]
    fn energy_and_frequencies() {
        let id = Spec::identity();
        assert_eq!(id.energy_level(1.0, 3).unwrap(), 3.5);
        assert_eq!(id.transition_frequency(5).unwrap(), 1.0);
        assert!(id.transition_frequency(0).is_err());
        assert_eq!(Spec::harmonious().energy_level(1.0, 3).unwrap(), 1.0);
        let l: f64 = 0.5;
        let q = Spec::q_deform(l).unwrap();
        for n in 1..20usize {
            let nf = n as f64;
            let e = ((l * (nf + 1.0)).sinh() + (l * nf).sinh()) / (2.0 * l.sinh());
            assert!(close(q.energy_level(1.0, n).unwrap(), e, 1e-12));
            assert!(close(q.transition_frequency(n).unwrap(), (l * nf).cosh(), 1e-12));
        }
    }

    #[test]
    fn phases() {
        let p = Spec::identity().evolution_phase(5, std::f64::consts::PI).unwrap();
        assert!((p - Complex::new(-1.0, 0.0)).norm() < 1e-15);
        let q = Spec::q_deform(0.3).unwrap();
        assert_eq!(q.evolution_phase(4, 0.0).unwrap(), Complex::new(1.0, 0.0));
        let p = q.evolution_phase(2, 1.0).unwrap();
        assert!((p - Complex::from_polar(1.0, -(0.6_f64).cosh())).norm() < 1e-14);
        let p0 = q.evolution_phase(0, 1.0).unwrap();
        assert!((p0 - Complex::from_polar(1.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn radii() {
        assert_eq!(Spec::identity().convergence_radius(), f64::INFINITY);
        assert_eq!(Spec::q_deform(0.5).unwrap().convergence_radius(), f64::INFINITY);
        assert_eq!(Spec::harmonious().convergence_radius(), 1.0);
        let harm: Vec<f64> = (0..200).map(|n| if n == 0 { 1.0 } else { 1.0 / (n as f64).sqrt() }).collect();
        assert!(close(Spec::tabulated(harm).unwrap().convergence_radius(), 1.0, 1e-12));
        let qtab: Vec<f64> = (0..200).map(|n| Spec::q_deform(0.5).unwrap().eval_f(n).unwrap()).collect();
        assert_eq!(Spec::tabulated(qtab).unwrap().convergence_radius(), f64::INFINITY);
        let idtab = vec![1.0; 200];
        assert_eq!(Spec::tabulated(idtab).unwrap().convergence_radius(), f64::INFINITY);
        // f = 2/√n has radius 2
        let twice: Vec<f64> = (0..200).map(|n| if n == 0 { 1.0 } else { 2.0 / (n as f64).sqrt() }).collect();
        assert!(close(Spec::tabulated(twice).unwrap().convergence_radius(), 2.0, 1e-12));
    }

    #[test]
    fn zero_sector_eval() {
        let z = Spec::zero_sector(2, Spec::q_deform(0.4).unwrap()).unwrap();
        assert_eq!(z.eval_f(2).unwrap(), 0.0);
        assert_eq!(z.eval_f(3).unwrap(), Spec::q_deform(0.4).unwrap().eval_f(3).unwrap());
        assert_eq!(z.sector_log_factorial(2).unwrap(), 0.0);
        assert!(Spec::zero_sector(1, z.clone()).is_err());
    }

    #[test]
    fn validation() {
        assert!(Spec::q_deform(0.0).is_err());
        assert!(Spec::tabulated(vec![1.0, 0.0, 1.0]).is_err());
        assert!(Spec::tabulated(vec![1.0, -1.0]).is_err());
        let t = Spec::tabulated(vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(t.eval_f(3), Err(DeformationError::TabulatedOutOfRange { n: 3, len: 3 }));
    }

    #[test]
    fn json_round_trip() {
        for text in [
            r#"{"kind":"q","lambda":0.5}"#,
            r#"{"kind":"identity"}"#,
            r#"{"kind":"harmonious"}"#,
            r#"{"kind":"table","values":[1.0,1.0,0.5]}"#,
            r#"{"kind":"zero_sector","n0":3,"base":{"kind":"identity"}}"#,
        ] {
            let spec: Spec = serde_json::from_str(text).unwrap();
            assert_eq!(serde_json::to_string(&spec).unwrap(), text);
        }
        assert!(serde_json::from_str::<Spec>(r#"{"kind":"q","lambda":0.0}"#).is_err());
    }

    #[test]
    fn works_in_f32() {
        let q = DeformationSpec::<f32>::q_deform(0.5).unwrap();
        assert!((q.transition_frequency(3).unwrap() - 1.5_f32.cosh()).abs() < 1e-4);
    }
}
