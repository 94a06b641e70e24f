//! Nonlinear (f-deformed) oscillators: deformation functions, f-coherent states,
//! photon statistics, quadrature squeezing, phase-space quasiprobabilities,
//! thermodynamics and the classical reparametrized oscillators behind them.
//!
//! Every numerical routine is generic over [`scalar::Real`]; the aliases below fix
//! the scalar to `f64`, which is what the file formats and the CLI use.

pub mod classical;
pub mod deformation;
pub mod io;
pub mod matrix;
pub mod phasespace;
pub mod quadrature;
pub mod scalar;
pub mod series;
pub mod special;
pub mod state;
pub mod statistics;
pub mod thermo;

pub use deformation::{DeformationError, DeformationKind};
pub use scalar::Real;
pub use state::StateError;

pub type DeformationSpecF64 = deformation::DeformationSpec<f64>;
pub type BuildConfigF64 = state::BuildConfig<f64>;
pub type FCoherentStateF64 = state::FCoherentState<f64>;
pub type TwoModeStateF64 = state::TwoModeFCoherentState<f64>;
pub type PhotonStatsF64 = statistics::PhotonStats<f64>;
pub type QuadratureReportF64 = quadrature::QuadratureReport<f64>;
pub type PhaseSpaceGridF64 = phasespace::PhaseSpaceGrid<f64>;
pub type FieldOnGridF64 = phasespace::FieldOnGrid<f64>;
pub type ThermoPointF64 = thermo::ThermoPoint<f64>;
pub type ClassicalSystemF64 = classical::ClassicalSystem<f64>;
pub type ClassicalOrbitF64 = classical::ClassicalOrbit<f64>;
pub type Complex64 = num_complex::Complex<f64>;
