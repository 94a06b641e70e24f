//! Photon-number statistics.

use serde::Serialize;

use crate::matrix::Matrix;
use crate::scalar::Real;
use crate::state::{FCoherentState, TwoModeFCoherentState};

/// Half-width of the band around `fano = 1` reported as Poissonian.
pub const CLASSIFICATION_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    SubPoissonian,
    Poissonian,
    SuperPoissonian,
}

impl Classification {
    pub fn from_fano<T: Real>(fano: T) -> Self {
        let d = fano - T::one();
        let band = T::lit(CLASSIFICATION_BAND);
        if d.abs() <= band {
            Classification::Poissonian
        } else if d < T::zero() {
            Classification::SubPoissonian
        } else {
            Classification::SuperPoissonian
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonStats<T> {
    pub distribution: Vec<T>,
    pub mean: T,
    /// Variance `⟨n²⟩ − ⟨n⟩²`.
    pub dispersion: T,
    /// `dispersion / mean`; `None` for the vacuum.
    pub fano: Option<T>,
    pub classification: Classification,
    /// Set when the mean vanishes and the classification is Poissonian by convention.
    pub degenerate_vacuum: bool,
    /// Bound on the error of `mean` from truncating and renormalizing the distribution.
    pub mean_error: T,
}

/// `P(n) = |c_n|²`.
pub fn photon_distribution<T: Real>(state: &FCoherentState<T>) -> Vec<T> {
    state.coeffs().iter().map(|c| c.norm_sqr()).collect()
}

/// First moment and variance of a distribution over `0..len`, summed in ascending order.
pub(crate) fn moments<T: Real>(p: &[T]) -> (T, T) {
    let mean: T = p.iter().enumerate().map(|(n, &w)| T::from_count(n) * w).sum();
    let var: T = p
        .iter()
        .enumerate()
        .map(|(n, &w)| {
            let d = T::from_count(n) - mean;
            d * d * w
        })
        .sum();
    (mean, var)
}

pub fn photon_stats<T: Real>(state: &FCoherentState<T>) -> PhotonStats<T> {
    let distribution = photon_distribution(state);
    let (mean, dispersion) = moments(&distribution);
    let trunc = state.truncation();
    let r = trunc.last_ratio;
    let tail_mean = if r > T::zero() && r < T::one() {
        let last = distribution[distribution.len() - 1];
        let n = T::from_count(trunc.n);
        last * r / (T::one() - r) * (n + T::one() / (T::one() - r))
    } else {
        T::zero()
    };
    let mean_error = trunc.tail_bound * mean + tail_mean;
    let (fano, classification, degenerate_vacuum) = if mean == T::zero() {
        (None, Classification::Poissonian, true)
    } else {
        let f = dispersion / mean;
        (Some(f), Classification::from_fano(f), false)
    };
    PhotonStats { distribution, mean, dispersion, fano, classification, degenerate_vacuum, mean_error }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeStats<T> {
    pub joint: Matrix<T>,
    pub marginal1: Vec<T>,
    pub marginal2: Vec<T>,
    pub mean1: T,
    pub mean2: T,
    pub covariance: T,
}

pub fn two_mode_distribution<T: Real>(state: &TwoModeFCoherentState<T>) -> TwoModeStats<T> {
    let joint = state.coeffs().map(|c| c.norm_sqr());
    let marginal1: Vec<T> = (0..joint.rows()).map(|i| joint.row(i).iter().copied().sum()).collect();
    let marginal2: Vec<T> = (0..joint.cols()).map(|j| (0..joint.rows()).map(|i| joint[(i, j)]).sum()).collect();
    let (mean1, _) = moments(&marginal1);
    let (mean2, _) = moments(&marginal2);
    let covariance =
        joint.iter_indexed().map(|(i, j, &p)| (T::from_count(i) - mean1) * (T::from_count(j) - mean2) * p).sum();
    TwoModeStats { joint, marginal1, marginal2, mean1, mean2, covariance }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::DeformationSpec;
    use crate::special::ln_factorial;
    use crate::state::{build_sector_state, build_state, build_two_mode_joint, build_two_mode_product, BuildConfig};
    use num_complex::Complex;

    type Spec = DeformationSpec<f64>;
    type C = Complex<f64>;

    #[test]
    fn poisson() {
        let a = C::new(1.0, 2.0);
        let s = build_state(&Spec::identity(), a, &BuildConfig::default()).unwrap();
        let st = photon_stats(&s);
        let m = a.norm_sqr();
        for (n, p) in st.distribution.iter().enumerate() {
            let want = (-m + n as f64 * m.ln() - ln_factorial::<f64>(n)).exp();
            assert!((p - want).abs() < 1e-12);
        }
        assert!((st.mean - m).abs() < 1e-10);
        assert!((st.dispersion - m).abs() < 1e-10);
        assert_eq!(st.classification, Classification::Poissonian);
        assert!(st.mean_error < 1e-9);
    }

    #[test]
    fn harmonious_is_super_poissonian() {
        let s = build_state(&Spec::harmonious(), C::new(0.6, 0.0), &BuildConfig::default()).unwrap();
        let st = photon_stats(&s);
        let x = 0.36;
        assert!((st.mean - x / (1.0 - x)).abs() < 1e-10);
        assert!((st.fano.unwrap() - 1.0 / (1.0 - x)).abs() < 1e-10);
        assert_eq!(st.classification, Classification::SuperPoissonian);
    }

    #[test]
    fn q_is_sub_poissonian() {
        let s = build_state(&Spec::q_deform(0.5).unwrap(), C::new(1.0, 0.0), &BuildConfig::default()).unwrap();
        let st = photon_stats(&s);
        assert!((st.fano.unwrap() - 0.88042703093952441).abs() < 1e-12);
        assert_eq!(st.classification, Classification::SubPoissonian);
    }

    #[test]
    fn vacuum_is_flagged() {
        let s = build_state(&Spec::identity(), C::new(0.0, 0.0), &BuildConfig::default()).unwrap();
        let st = photon_stats(&s);
        assert!(st.degenerate_vacuum);
        assert_eq!(st.fano, None);
        assert_eq!(st.classification, Classification::Poissonian);
    }

    #[test]
    fn sector_distribution_vanishes_below_n0() {
        let z = Spec::zero_sector(2, Spec::q_deform(0.3).unwrap()).unwrap();
        let s = build_sector_state(&z, C::new(1.1, 0.4), &BuildConfig::default()).unwrap();
        let p = photon_distribution(&s);
        assert!(p[..3].iter().all(|v| *v == 0.0));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_mode_covariances() {
        let cfg = BuildConfig::default();
        let q = Spec::q_deform(0.3).unwrap();
        let (a1, a2) = (C::new(0.5, 0.0), C::new(0.5, 0.0));
        let p = build_two_mode_product(&q, &q, a1, a2, &cfg).unwrap();
        assert!(two_mode_distribution(&p).covariance.abs() < 1e-12);
        let j = build_two_mode_joint(&q, a1, a2, &cfg).unwrap();
        let st = two_mode_distribution(&j);
        assert!(st.covariance.abs() > 1e-4);
        let ij = build_two_mode_joint(&Spec::identity(), a1, a2, &cfg).unwrap();
        assert!(two_mode_distribution(&ij).covariance.abs() < 1e-12);
    }

    #[test]
    fn classification_band() {
        assert_eq!(Classification::from_fano(1.0 + 5e-10), Classification::Poissonian);
        assert_eq!(Classification::from_fano(1.0 - 2e-9), Classification::SubPoissonian);
        assert_eq!(Classification::from_fano(1.0 + 2e-9), Classification::SuperPoissonian);
    }
}
