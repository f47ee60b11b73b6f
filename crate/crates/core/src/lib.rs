//! Numerical laboratory for the large-time behaviour of isothermal-type
//! compressible fluids (Euler, Korteweg, quantum Navier–Stokes).
//!
//! Every solver is generic over the scalar type through [`Real`]; the
//! `*64` aliases at the crate root fix it to `f64`.

pub mod diagnostics;
pub mod error;
pub mod fokker_planck;
pub mod gaussian;
pub mod grid;
pub mod isentropic;
pub mod pressure;
pub mod quadrature;
pub mod rescaled_solver;
pub mod scalar;
pub mod scaling_ode;

pub use error::{Error, Result};
pub use scalar::Real;
pub use scaling_ode::{
    integrate_tau, integrate_tau_with, tau_asymptote, IntegratorOptions, TauParams, TauSample,
    TauTrajectory,
};

pub type TauParams64 = TauParams<f64>;
pub type TauTrajectory64 = TauTrajectory<f64>;
pub type GaussianParams64 = gaussian::GaussianParams<f64>;
pub type GaussianState64 = gaussian::GaussianState<f64>;
pub type Grid1D64 = grid::Grid1D<f64>;
pub type PressureLaw64 = pressure::PressureLaw<f64>;
pub type Model64 = rescaled_solver::Model<f64>;
pub type FluidState1D64 = rescaled_solver::FluidState1D<f64>;
pub type DiagnosticsRecord64 = diagnostics::DiagnosticsRecord<f64>;
pub type FPState64 = fokker_planck::FPState<f64>;
pub type IsentropicConfig64 = isentropic::IsentropicConfig<f64>;
pub type IsentropicState64 = isentropic::IsentropicState<f64>;
