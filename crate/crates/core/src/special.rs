//! Special functions on the positive real line: log-factorials, Gamma,
//! digamma, Hermite and generalized Laguerre recurrences.
//!
//! Factorial-like quantities are kept in log space; the polynomial families
//! come in a raw form (used by the reference paths) and a normalized form
//! whose values stay bounded for large degree.

use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // reflection keeps the series in its accurate range
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let z = x - T::one();
    let mut acc = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += T::lit(c) / (z + T::from_count(i));
    }
    let t = z + T::lit(LANCZOS_G) + half;
    half * (T::lit(2.0) * T::PI()).ln() + (z + half) * t.ln() - t + acc.ln()
}

/// `Γ(x)` for `x > 0`.
pub fn gamma<T: Real>(x: T) -> T {
    ln_gamma(x).exp()
}

/// `ln n!`. Exact summation for small `n`, Lanczos beyond.
pub fn ln_factorial<T: Real>(n: usize) -> T {
    if n < 32 {
        (2..=n).map(|j| T::from_count(j).ln()).sum()
    } else {
        ln_gamma(T::from_count(n + 1))
    }
}

/// Digamma `ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
pub fn digamma<T: Real>(x: T) -> T {
    let mut x = x;
    let mut shift = T::zero();
    while x < T::lit(10.0) {
        shift += x.recip();
        x += T::one();
    }
    let inv2 = (x * x).recip();
    // Bernoulli tail through x^-12
    let series = inv2
        * (T::lit(1.0 / 12.0)
            - inv2
                * (T::lit(1.0 / 120.0)
                    - inv2
                        * (T::lit(1.0 / 252.0)
                            - inv2
                                * (T::lit(1.0 / 240.0)
                                    - inv2 * (T::lit(1.0 / 132.0) - inv2 * T::lit(691.0 / 32760.0))))));
    x.ln() - T::lit(0.5) / x - series - shift
}

/// Physicists' Hermite polynomials `H_0(x) ..= H_{n_max}(x)`.
pub fn hermite_all<T: Real>(n_max: usize, x: T) -> Vec<T> {
    let two = T::lit(2.0);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(T::one());
    if n_max == 0 {
        return out;
    }
    out.push(two * x);
    for n in 1..n_max {
        let next = two * x * out[n] - two * T::from_count(n) * out[n - 1];
        out.push(next);
    }
    out
}

/// Normalized Hermite functions `φ_n(x) = π^{-1/4} (2^n n!)^{-1/2} H_n(x) e^{-x²/2}`
/// for `n = 0 ..= n_max`, by the stable three-term recurrence.
pub fn hermite_functions<T: Real>(n_max: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(n_max + 1);
    let phi0 = T::PI().powf(T::lit(-0.25)) * (-x * x * T::lit(0.5)).exp();
    out.push(phi0);
    if n_max == 0 {
        return out;
    }
    out.push(T::SQRT_2() * x * phi0);
    for n in 1..n_max {
        let nf = T::from_count(n);
        let next = (T::lit(2.0) / (nf + T::one())).sqrt() * x * out[n] - (nf / (nf + T::one())).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Generalized Laguerre polynomials `L_0^{(a)}(y) ..= L_{n_max}^{(a)}(y)` for real `a`.
pub fn laguerre_all<T: Real>(n_max: usize, a: T, y: T) -> Vec<T> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(T::one());
    if n_max == 0 {
        return out;
    }
    out.push(T::one() + a - y);
    for n in 1..n_max {
        let nf = T::from_count(n);
        let next = ((T::lit(2.0) * nf + T::one() + a - y) * out[n] - (nf + a) * out[n - 1]) / (nf + T::one());
        out.push(next);
    }
    out
}

/// `L_n^{(k)}(y)` for an integer upper index that may be negative.
///
/// For `k < 0` with `|k| <= n` this uses
/// `L_n^{(-m)}(y) = (-y)^m (n-m)!/n! · L_{n-m}^{(m)}(y)`, with the factorial ratio
/// taken in log space.
pub fn laguerre_int<T: Real>(n: usize, k: i64, y: T) -> T {
    if k >= 0 {
        return *laguerre_all(n, T::from_count(k as usize), y).last().unwrap();
    }
    let m = k.unsigned_abs() as usize;
    if m > n {
        // a polynomial of degree n in y with a zero of order m > n cannot exist; fall back
        // to the recurrence which is valid for any real index
        return *laguerre_all(n, T::from_count(m).neg(), y).last().unwrap();
    }
    let ratio = (ln_factorial::<T>(n - m) - ln_factorial::<T>(n)).exp();
    let sign = if m % 2 == 0 { T::one() } else { -T::one() };
    let base = *laguerre_all(n - m, T::from_count(m), y).last().unwrap();
    sign * y.powi(m as i32) * ratio * base
}

/// Normalized Laguerre functions for a fixed order `k >= 0`:
/// `ℓ_n(y) = sqrt(n!/(n+k)!) · y^{k/2} · e^{-y/2} · L_n^{(k)}(y)` for `n = 0 ..= n_max`.
///
/// These are the building blocks of the Fock-basis Wigner functions and stay
/// bounded by one in magnitude.
pub fn laguerre_functions<T: Real>(n_max: usize, k: usize, y: T) -> Vec<T> {
    let mut out = Vec::with_capacity(n_max + 1);
    let kf = T::from_count(k);
    let ln_y = y.ln();
    let log_l0 = if k == 0 {
        -y * T::lit(0.5)
    } else {
        T::lit(0.5) * kf * ln_y - T::lit(0.5) * ln_factorial::<T>(k) - y * T::lit(0.5)
    };
    let l0 = if k > 0 && y == T::zero() { T::zero() } else { log_l0.exp() };
    out.push(l0);
    if n_max == 0 {
        return out;
    }
    out.push(l0 * (T::one() + kf - y) / (kf + T::one()).sqrt());
    for n in 1..n_max {
        let nf = T::from_count(n);
        let next = ((T::lit(2.0) * nf + T::one() + kf - y) * out[n] - (nf * (nf + kf)).sqrt() * out[n - 1])
            / ((nf + T::one()) * (nf + kf + T::one())).sqrt();
        out.push(next);
    }
    out
}
