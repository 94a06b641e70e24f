//! Adaptive summation of positive series in log space.
//!
//! Terms are supplied as logarithms so that sums like `Σ |α|^{2n}/(n! [f(n)]!²)`
//! or `Σ e^{-βE_n}` never overflow. Summation runs in ascending index order,
//! which makes every result bit-reproducible.
//!
//! Stopping rule: the series is declared converged once `patience` consecutive
//! terms each fall below `tol` times the running sum *and* the geometric
//! majorant of the remaining tail, `t_N·r/(1-r)` with `r = t_N/t_{N-1}`, is below
//! `tol` times the sum. The majorant is a true bound whenever the term ratios
//! are eventually nonincreasing.

use crate::scalar::{log_add_exp, Real};

/// Consecutive small terms required before the tail test is applied.
pub const DEFAULT_PATIENCE: usize = 8;

/// Reached the index cap before the stopping rule fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapExceeded {
    pub cap: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SeriesRule<T> {
    pub tol: T,
    /// Largest index that may be summed.
    pub cap: usize,
    pub patience: usize,
}

impl<T: Real> SeriesRule<T> {
    pub fn new(tol: T, cap: usize) -> Self {
        Self { tol, cap, patience: DEFAULT_PATIENCE }
    }
}

/// Outcome of a converged summation.
#[derive(Debug, Clone)]
pub struct LogSeries<T> {
    /// First summed index.
    pub start: usize,
    /// `ln t_n` for `n = start ..= last()`.
    pub log_terms: Vec<T>,
    pub ln_sum: T,
    /// Bound on the omitted tail relative to the computed sum.
    pub tail_bound: T,
    /// Ratio of the last two terms (zero when the series terminated exactly).
    pub last_ratio: T,
}

impl<T: Real> LogSeries<T> {
    /// Last summed index.
    pub fn last(&self) -> usize {
        self.start + self.log_terms.len() - 1
    }

    pub fn sum(&self) -> T {
        self.ln_sum.exp()
    }

    /// Terms divided by the sum, in index order.
    pub fn weights(&self) -> impl Iterator<Item = T> + '_ {
        self.log_terms.iter().map(move |&l| (l - self.ln_sum).exp())
    }
}

/// Sums `exp(ln_term(n))` for `n = start, start+1, ...` until the stopping rule fires.
pub fn sum_log_series<T, E, F>(start: usize, rule: SeriesRule<T>, mut ln_term: F) -> Result<LogSeries<T>, E>
where
    T: Real,
    E: From<CapExceeded>,
    F: FnMut(usize) -> Result<T, E>,
{
    let ln_tol = rule.tol.ln();
    let mut log_terms: Vec<T> = Vec::new();
    let mut ln_sum = T::neg_infinity();
    let mut small_run = 0usize;
    let mut n = start;
    loop {
        let ln_t = ln_term(n)?;
        log_terms.push(ln_t);
        ln_sum = log_add_exp(ln_sum, ln_t);

        if ln_t == T::neg_infinity() || ln_t < ln_tol + ln_sum {
            small_run += 1;
        } else {
            small_run = 0;
        }

        if small_run >= rule.patience && log_terms.len() >= 2 {
            let prev = log_terms[log_terms.len() - 2];
            if ln_t == T::neg_infinity() {
                return Ok(LogSeries { start, log_terms, ln_sum, tail_bound: T::zero(), last_ratio: T::zero() });
            }
            let ratio = (ln_t - prev).exp();
            if ratio < T::one() {
                let tail = (ln_t - ln_sum).exp() * ratio / (T::one() - ratio);
                if tail <= rule.tol {
                    return Ok(LogSeries { start, log_terms, ln_sum, tail_bound: tail, last_ratio: ratio });
                }
            }
        }

        if n >= rule.cap {
            return Err(CapExceeded { cap: rule.cap }.into());
        }
        n += 1;
    }
}
