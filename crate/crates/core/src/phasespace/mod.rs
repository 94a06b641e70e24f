//! Coordinate, Bargmann, Wigner and Husimi representations.
//!
//! Phase-space points are `(x, p)` with `z = (x + ip)/√2`. The Wigner function is
//! normalized as `∬ W dx dp / 2π = 1` (vacuum `W = 2e^{-(x²+p²)}`) and the Husimi
//! function as `∬ Q d²z / π = 1` with `d²z = dx dp / 2`.

mod specialized;

pub use specialized::{husimi_harmonious, husimi_q, wigner_harmonious, wigner_q};

use num_complex::Complex;
use rayon::prelude::*;
use thiserror::Error;

use crate::deformation::DeformationError;
use crate::matrix::Matrix;
use crate::scalar::Real;
use crate::special::{hermite_functions, laguerre_all, laguerre_functions, ln_factorial};
use crate::state::{FCoherentState, StateError, TwoModeFCoherentState};

/// Largest tolerated imaginary residue of a Wigner function.
pub const REALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaseSpaceError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("Wigner function has imaginary residue {max_imag:e}, above the reality tolerance")]
    RealityViolation { max_imag: f64 },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Deformation(#[from] DeformationError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceGrid<T> {
    pub x_min: T,
    pub x_max: T,
    pub nx: usize,
    pub p_min: T,
    pub p_max: T,
    pub np: usize,
}

impl<T: Real> PhaseSpaceGrid<T> {
    pub fn new(x_min: T, x_max: T, nx: usize, p_min: T, p_max: T, np: usize) -> Result<Self, PhaseSpaceError> {
        if nx < 2 || np < 2 {
            return Err(PhaseSpaceError::InvalidGrid(format!("need at least two points per axis, got {nx} x {np}")));
        }
        if !(x_max > x_min)
            || !(p_max > p_min)
            || !(x_min.is_finite() && x_max.is_finite() && p_min.is_finite() && p_max.is_finite())
        {
            return Err(PhaseSpaceError::InvalidGrid("axis bounds must be finite with max > min".into()));
        }
        Ok(Self { x_min, x_max, nx, p_min, p_max, np })
    }

    /// Square window `[-half_width, half_width]²` with `n` points per axis.
    pub fn square(half_width: T, n: usize) -> Result<Self, PhaseSpaceError> {
        Self::new(-half_width, half_width, n, -half_width, half_width, n)
    }

    pub fn dx(&self) -> T {
        (self.x_max - self.x_min) / T::from_count(self.nx - 1)
    }

    pub fn dp(&self) -> T {
        (self.p_max - self.p_min) / T::from_count(self.np - 1)
    }

    pub fn x(&self, i: usize) -> T {
        self.x_min + self.dx() * T::from_count(i)
    }

    pub fn p(&self, j: usize) -> T {
        self.p_min + self.dp() * T::from_count(j)
    }

    /// Grid points in row-major order (x outer, p inner).
    pub fn points(&self) -> Vec<(T, T)> {
        (0..self.nx).flat_map(|i| (0..self.np).map(move |j| (i, j))).map(|(i, j)| (self.x(i), self.p(j))).collect()
    }

    /// 2D trapezoid rule over the grid.
    pub fn integrate(&self, values: &Matrix<T>) -> T {
        let half = T::lit(0.5);
        let mut acc = T::zero();
        for (i, j, &v) in values.iter_indexed() {
            let wx = if i == 0 || i == self.nx - 1 { half } else { T::one() };
            let wp = if j == 0 || j == self.np - 1 { half } else { T::one() };
            acc += wx * wp * v;
        }
        acc * self.dx() * self.dp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Wigner,
    Husimi,
}

/// Real field sampled on a phase-space grid; rows follow `x`, columns `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldOnGrid<T> {
    pub grid: PhaseSpaceGrid<T>,
    pub values: Matrix<T>,
    pub kind: FieldKind,
    /// Largest imaginary part discarded when the field was made real.
    pub max_imag: T,
}

impl<T: Real> FieldOnGrid<T> {
    /// `∬ W dx dp / 2π` or `∬ Q d²z / π`; both reduce to `∬ · dx dp / 2π` on this grid.
    pub fn normalization(&self) -> T {
        self.grid.integrate(&self.values) / T::TAU()
    }

    pub fn max_value(&self) -> T {
        self.values.as_slice().iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn min_value(&self) -> T {
        self.values.as_slice().iter().copied().fold(T::infinity(), T::min)
    }

    /// Grid coordinates of the largest value.
    pub fn argmax(&self) -> (T, T) {
        let (mut best, mut at) = (T::neg_infinity(), (0, 0));
        for (i, j, &v) in self.values.iter_indexed() {
            if v > best {
                best = v;
                at = (i, j);
            }
        }
        (self.grid.x(at.0), self.grid.p(at.1))
    }
}

fn on_grid<T: Real>(grid: &PhaseSpaceGrid<T>, f: impl Fn(T, T) -> T + Sync) -> Matrix<T> {
    let values: Vec<T> = grid.points().par_iter().map(|&(x, p)| f(x, p)).collect();
    Matrix::from_vec(grid.nx, grid.np, values)
}

/// `ψ(x) = Σ c_n φ_n(x)` with normalized Hermite functions.
pub fn coordinate_wavefunction<T: Real>(state: &FCoherentState<T>, xs: &[T]) -> Vec<Complex<T>> {
    let c = state.coeffs();
    let n_top = c.len() - 1;
    xs.iter()
        .map(|&x| {
            let phi = hermite_functions(n_top, x);
            c.iter().zip(&phi).fold(Complex::new(T::zero(), T::zero()), |acc, (cn, &ph)| acc + cn * ph)
        })
        .collect()
}

/// `⟨z|ψ⟩ = e^{−|z|²/2} Σ c_n z̄^n / √n!`, each term formed in log space.
pub fn bargmann_overlap<T: Real>(state: &FCoherentState<T>, z: Complex<T>) -> Complex<T> {
    bargmann_from_coeffs(state.coeffs(), z)
}

pub(crate) fn bargmann_from_coeffs<T: Real>(c: &[Complex<T>], z: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let zr = z.norm();
    let (ln_z, th_z) = (zr.ln(), z.arg());
    let mut acc = Complex::new(T::zero(), T::zero());
    for (n, cn) in c.iter().enumerate() {
        let a = cn.norm();
        if a == T::zero() {
            continue;
        }
        if n > 0 && zr == T::zero() {
            break;
        }
        let zn = if n == 0 { T::zero() } else { T::from_count(n) * ln_z };
        let mag = (a.ln() + zn - half * ln_factorial::<T>(n) - half * zr * zr).exp();
        acc += Complex::from_polar(mag, cn.arg() - T::from_count(n) * th_z);
    }
    acc
}

/// Husimi function `Q(z) = |⟨z|ψ⟩|²` at `z = (x + ip)/√2`.
pub fn husimi<T: Real>(state: &FCoherentState<T>, grid: &PhaseSpaceGrid<T>) -> FieldOnGrid<T> {
    let c = state.coeffs();
    let s = T::FRAC_1_SQRT_2();
    let values = on_grid(grid, |x, p| bargmann_from_coeffs(c, Complex::new(x * s, p * s)).norm_sqr());
    FieldOnGrid { grid: *grid, values, kind: FieldKind::Husimi, max_imag: T::zero() }
}

/// Symmetrized Wigner sum of the pure state with coefficients `c` at one point:
/// `W = 2[Σ_n (−1)^n |c_n|² ℓ_n^0 + 2 Re Σ_{k≥1} e^{−ikφ} Σ_n (−1)^n c_{n+k} c̄_n ℓ_n^k]`,
/// `ℓ_n^k` the normalized Laguerre functions at `2(x² + p²)`.
pub(crate) fn wigner_point<T: Real>(c: &[Complex<T>], x: T, p: T) -> T {
    let n_top = c.len() - 1;
    let y = T::lit(2.0) * (x * x + p * p);
    let phi = p.atan2(x);
    let sign = |n: usize| if n % 2 == 0 { T::one() } else { -T::one() };
    let l0 = laguerre_functions(n_top, 0, y);
    let mut diag = T::zero();
    for n in 0..=n_top {
        diag += sign(n) * c[n].norm_sqr() * l0[n];
    }
    let mut off = T::zero();
    if y > T::zero() {
        for k in 1..=n_top {
            let l = laguerre_functions(n_top - k, k, y);
            let mut s = Complex::new(T::zero(), T::zero());
            for n in 0..=(n_top - k) {
                s += c[n + k] * c[n].conj() * (sign(n) * l[n]);
            }
            off += (s * Complex::from_polar(T::one(), -T::from_count(k) * phi)).re;
        }
    }
    T::lit(2.0) * (diag + T::lit(2.0) * off)
}

/// Wigner function of the state on `grid`, real by construction.
pub fn wigner<T: Real>(state: &FCoherentState<T>, grid: &PhaseSpaceGrid<T>) -> FieldOnGrid<T> {
    let c = state.coeffs();
    let values = on_grid(grid, |x, p| wigner_point(c, x, p));
    FieldOnGrid { grid: *grid, values, kind: FieldKind::Wigner, max_imag: T::zero() }
}

/// Wigner function of the first-mode reduced state `Tr₂ |ψ⟩⟨ψ|`.
pub fn wigner_first_mode<T: Real>(state: &TwoModeFCoherentState<T>, grid: &PhaseSpaceGrid<T>) -> FieldOnGrid<T> {
    let m = state.coeffs();
    let columns: Vec<Vec<Complex<T>>> = (0..m.cols()).map(|j| (0..m.rows()).map(|i| m[(i, j)]).collect()).collect();
    let values = on_grid(grid, |x, p| columns.iter().map(|col| wigner_point(col, x, p)).sum());
    FieldOnGrid { grid: *grid, values, kind: FieldKind::Wigner, max_imag: T::zero() }
}

/// Density-matrix weights `K[m][n]` for the unsymmetrized sum
/// `W = 2e^{−r²} Σ_{m,n} K[m][n] [√2(x−ip)]^{m−n} L_n^{m−n}(2r²)`.
pub(crate) fn wigner_double_sum<T: Real>(weights: &Matrix<Complex<T>>, grid: &PhaseSpaceGrid<T>) -> (Matrix<T>, T) {
    let n_top = weights.rows() - 1;
    let lnf: Vec<T> = (0..=n_top).map(ln_factorial).collect();
    let pts = grid.points();
    let vals: Vec<(T, T)> = pts
        .par_iter()
        .map(|&(x, p)| {
            let r2 = x * x + p * p;
            let y = T::lit(2.0) * r2;
            let pw = Complex::new(T::SQRT_2() * x, -T::SQRT_2() * p);
            // raw L_n^k(y) for k ≥ 0, n + k ≤ n_top
            let table: Vec<Vec<T>> = (0..=n_top).map(|k| laguerre_all(n_top - k, T::from_count(k), y)).collect();
            let mut acc = Complex::new(T::zero(), T::zero());
            for m in 0..=n_top {
                for n in 0..=n_top {
                    let w = weights[(m, n)];
                    if w == Complex::new(T::zero(), T::zero()) {
                        continue;
                    }
                    let t = if m >= n {
                        let k = m - n;
                        if k > 0 && r2 == T::zero() {
                            continue;
                        }
                        pw.powi(k as i32) * table[k][n]
                    } else {
                        // L_n^{−j}(y) = (−y)^j (n−j)!/n! L_{n−j}^{j}(y), and P^{−j}(−y)^j = (−P̄)^j
                        let j = n - m;
                        if r2 == T::zero() {
                            continue;
                        }
                        let ratio = (lnf[m] - lnf[n]).exp();
                        (-pw.conj()).powi(j as i32) * (ratio * table[j][m])
                    };
                    acc += w * t;
                }
            }
            let v = acc * (T::lit(2.0) * (-r2).exp());
            (v.re, v.im.abs())
        })
        .collect();
    let max_imag = vals.iter().map(|v| v.1).fold(T::zero(), T::max);
    (Matrix::from_vec(grid.nx, grid.np, vals.into_iter().map(|v| v.0).collect()), max_imag)
}

fn checked_wigner<T: Real>(
    values: Matrix<T>,
    max_imag: T,
    grid: &PhaseSpaceGrid<T>,
) -> Result<FieldOnGrid<T>, PhaseSpaceError> {
    if !(max_imag <= T::lit(REALITY_TOL)) {
        return Err(PhaseSpaceError::RealityViolation { max_imag: max_imag.as_f64() });
    }
    Ok(FieldOnGrid { grid: *grid, values, kind: FieldKind::Wigner, max_imag })
}

/// Reference Wigner evaluation: the full `(m, n)` double sum with raw Laguerre
/// polynomials and the negative-index identity, followed by a reality check.
pub fn wigner_naive<T: Real>(
    state: &FCoherentState<T>,
    grid: &PhaseSpaceGrid<T>,
) -> Result<FieldOnGrid<T>, PhaseSpaceError> {
    let c = state.coeffs();
    let n_top = c.len() - 1;
    let lnf: Vec<T> = (0..=n_top).map(ln_factorial).collect();
    let weights = Matrix::from_fn(n_top + 1, n_top + 1, |m, n| {
        let sign = if n % 2 == 0 { T::one() } else { -T::one() };
        c[m] * c[n].conj() * (sign * (T::lit(0.5) * (lnf[n] - lnf[m])).exp())
    });
    let (values, max_imag) = wigner_double_sum(&weights, grid);
    checked_wigner(values, max_imag, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::DeformationSpec;
    use crate::state::{build_sector_state, build_state, evolve, BuildConfig};

    type Spec = DeformationSpec<f64>;
    type C = Complex<f64>;

    fn state(spec: &Spec, a: C) -> FCoherentState<f64> {
        build_state(spec, a, &BuildConfig::default()).unwrap()
    }

    #[test]
    fn vacuum_wigner_and_husimi() {
        let s = state(&Spec::identity(), C::new(0.0, 0.0));
        let g = PhaseSpaceGrid::square(3.0, 13).unwrap();
        let w = wigner(&s, &g);
        let q = husimi(&s, &g);
        for (i, j, v) in w.values.iter_indexed() {
            let (x, p) = (g.x(i), g.p(j));
            assert!((v - 2.0 * (-(x * x + p * p)).exp()).abs() < 1e-15);
            assert!((q.values[(i, j)] - (-(x * x + p * p) / 2.0).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn coherent_wigner_is_displaced_gaussian() {
        let a = C::new(1.0, -0.5);
        let s = state(&Spec::identity(), a);
        let g = PhaseSpaceGrid::square(4.0, 33).unwrap();
        let w = wigner(&s, &g);
        let (x0, p0) = (2f64.sqrt() * a.re, 2f64.sqrt() * a.im);
        for (i, j, v) in w.values.iter_indexed() {
            let (x, p) = (g.x(i), g.p(j));
            let want = 2.0 * (-(x - x0).powi(2) - (p - p0).powi(2)).exp();
            assert!((v - want).abs() < 1e-10, "({x}, {p})");
        }
    }

    #[test]
    fn naive_route_agrees_with_symmetrized_route() {
        let g = PhaseSpaceGrid::square(5.0, 21).unwrap();
        let q = Spec::q_deform(0.4).unwrap();
        for s in [
            state(&q, C::new(0.8, 0.6)),
            evolve(&state(&q, C::new(1.1, 0.0)), 0.7).unwrap(),
            build_sector_state(
                &Spec::zero_sector(2, Spec::identity()).unwrap(),
                C::new(0.9, 0.3),
                &BuildConfig::default(),
            )
            .unwrap(),
        ] {
            let a = wigner(&s, &g);
            let b = wigner_naive(&s, &g).unwrap();
            assert!(b.max_imag < 1e-12);
            for (x, y) in a.values.as_slice().iter().zip(b.values.as_slice()) {
                assert!((x - y).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn bargmann_identity_closed_form() {
        let a = C::new(0.7, 1.2);
        let s = state(&Spec::identity(), a);
        for z in [C::new(0.0, 0.0), C::new(1.0, -1.0), C::new(-2.0, 0.5)] {
            let want = ((-z.norm_sqr() - a.norm_sqr()) / 2.0 + z.conj() * a).exp();
            assert!((bargmann_overlap(&s, z) - want).norm() < 1e-12);
        }
        assert_eq!(bargmann_overlap(&s, C::new(0.0, 0.0)), s.coeffs()[0]);
    }

    #[test]
    fn wavefunction_normalization_and_peak() {
        let s = state(&Spec::harmonious(), C::new(0.5, 0.0));
        let xs: Vec<f64> = (0..=1200).map(|k| -12.0 + 0.02 * k as f64).collect();
        let psi = coordinate_wavefunction(&s, &xs);
        let norm: f64 = psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * 0.02;
        assert!((norm - 1.0).abs() < 1e-6);

        let a = 1.0;
        let s = state(&Spec::identity(), C::new(a, 0.0));
        let psi = coordinate_wavefunction(&s, &xs);
        for (x, v) in xs.iter().zip(&psi) {
            let want = std::f64::consts::PI.powf(-0.25) * (-(x - 2f64.sqrt() * a).powi(2) / 2.0).exp();
            assert!((v - want).norm() < 1e-8);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(PhaseSpaceGrid::new(0.0, 1.0, 1, 0.0, 1.0, 4).is_err());
        assert!(PhaseSpaceGrid::new(1.0, 0.0, 3, 0.0, 1.0, 4).is_err());
        let g = PhaseSpaceGrid::square(1.0, 3).unwrap();
        let ones = Matrix::filled(3, 3, 1.0);
        assert!((g.integrate(&ones) - 4.0_f64).abs() < 1e-15);
    }
}
