use num_complex::Complex;

use super::{build_state, BuildConfig, StateError, Truncation};
use crate::deformation::{DeformationKind, DeformationSpec};
use crate::matrix::Matrix;
use crate::scalar::Real;
use crate::series::sum_log_series;
use crate::special::ln_factorial;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoModeKind {
    /// Eigenstate of `A_1 = a_1 f(n̂_1 + n̂_2)` and `A_2 = a_2 f(n̂_1 + n̂_2)`.
    Joint,
    /// Tensor product of two single-mode states.
    Product,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeFCoherentState<T> {
    alpha1: Complex<T>,
    alpha2: Complex<T>,
    mode: TwoModeKind,
    spec1: DeformationSpec<T>,
    spec2: DeformationSpec<T>,
    coeffs: Matrix<Complex<T>>,
    c00: T,
    truncation: Truncation<T>,
}

impl<T: Real> TwoModeFCoherentState<T> {
    pub fn alphas(&self) -> (Complex<T>, Complex<T>) {
        (self.alpha1, self.alpha2)
    }

    pub fn mode(&self) -> TwoModeKind {
        self.mode
    }

    /// The shared deformation of a joint state, or the first mode's for a product.
    pub fn spec(&self) -> &DeformationSpec<T> {
        &self.spec1
    }

    pub fn specs(&self) -> (&DeformationSpec<T>, &DeformationSpec<T>) {
        (&self.spec1, &self.spec2)
    }

    /// `c_{n1,n2}`, rows indexed by `n1`.
    pub fn coeffs(&self) -> &Matrix<Complex<T>> {
        &self.coeffs
    }

    pub fn c00(&self) -> T {
        self.c00
    }

    pub fn truncation(&self) -> &Truncation<T> {
        &self.truncation
    }

    pub fn norm_sqr(&self) -> T {
        self.coeffs.as_slice().iter().map(|c| c.norm_sqr()).sum()
    }
}

fn n_ln<T: Real>(n: usize, ln_a: T) -> T {
    if n == 0 {
        T::zero()
    } else {
        T::from_count(n) * ln_a
    }
}

/// Joint state `c_{n1,n2} = c00 α1^{n1} α2^{n2} / (√(n1! n2!) [f(n1+n2)]!)`, kept on `n1 + n2 ≤ N`.
pub fn build_two_mode_joint<T: Real>(
    spec: &DeformationSpec<T>,
    alpha1: Complex<T>,
    alpha2: Complex<T>,
    config: &BuildConfig<T>,
) -> Result<TwoModeFCoherentState<T>, StateError> {
    let rule = config.rule()?;
    if spec.kind() == DeformationKind::ZeroSector {
        return Err(StateError::ZeroSectorMisuse);
    }
    // Σ over n1 + n2 = n collapses binomially onto the single-mode series in s = |α1|² + |α2|²
    let s = alpha1.norm_sqr() + alpha2.norm_sqr();
    let total = s.sqrt();
    config.check_radius(total, spec.convergence_radius())?;

    let (ln_norm, truncation, ln_ffact) = if s == T::zero() {
        (T::zero(), Truncation::exact(0, config.tol), vec![T::zero()])
    } else {
        let ln_total = total.ln();
        let mut lw = T::zero();
        let mut ln_ffact = Vec::new();
        let mut acc = T::zero();
        let series = sum_log_series(0, rule, |n| -> Result<T, StateError> {
            if n > 0 {
                let lf = spec.ln_f(n)?;
                acc += lf;
                lw += ln_total - T::lit(0.5) * T::from_count(n).ln() - lf;
            }
            ln_ffact.push(acc);
            Ok(lw + lw)
        })?;
        (-T::lit(0.5) * series.ln_sum, Truncation::from_series(&series, config.tol), ln_ffact)
    };

    let n_top = truncation.n;
    let (ln_a1, ln_a2) = (alpha1.norm().ln(), alpha2.norm().ln());
    let (th1, th2) = (alpha1.arg(), alpha2.arg());
    let ln_fact: Vec<T> = (0..=n_top).map(ln_factorial).collect();
    let zero = Complex::new(T::zero(), T::zero());
    let coeffs = Matrix::from_fn(n_top + 1, n_top + 1, |n1, n2| {
        if n1 + n2 > n_top {
            return zero;
        }
        let lm =
            ln_norm + n_ln(n1, ln_a1) + n_ln(n2, ln_a2) - T::lit(0.5) * (ln_fact[n1] + ln_fact[n2]) - ln_ffact[n1 + n2];
        let phase = T::from_count(n1) * th1 + T::from_count(n2) * th2;
        Complex::from_polar(lm.exp(), phase)
    });
    Ok(TwoModeFCoherentState {
        alpha1,
        alpha2,
        mode: TwoModeKind::Joint,
        spec1: spec.clone(),
        spec2: spec.clone(),
        coeffs,
        c00: ln_norm.exp(),
        truncation,
    })
}

/// `|α1, f1⟩ ⊗ |α2, f2⟩` as an exact outer product.
pub fn build_two_mode_product<T: Real>(
    spec1: &DeformationSpec<T>,
    spec2: &DeformationSpec<T>,
    alpha1: Complex<T>,
    alpha2: Complex<T>,
    config: &BuildConfig<T>,
) -> Result<TwoModeFCoherentState<T>, StateError> {
    let s1 = build_state(spec1, alpha1, config)?;
    let s2 = build_state(spec2, alpha2, config)?;
    let (c1, c2) = (s1.coeffs(), s2.coeffs());
    let coeffs = Matrix::from_fn(c1.len(), c2.len(), |i, j| c1[i] * c2[j]);
    let (t1, t2) = (s1.truncation(), s2.truncation());
    let truncation = Truncation {
        n: t1.n.max(t2.n),
        tail_bound: t1.tail_bound + t2.tail_bound,
        tol: config.tol,
        converged: t1.converged && t2.converged,
        last_ratio: t1.last_ratio.max(t2.last_ratio),
    };
    Ok(TwoModeFCoherentState {
        alpha1,
        alpha2,
        mode: TwoModeKind::Product,
        spec1: spec1.clone(),
        spec2: spec2.clone(),
        coeffs,
        c00: s1.norm_const() * s2.norm_const(),
        truncation,
    })
}
