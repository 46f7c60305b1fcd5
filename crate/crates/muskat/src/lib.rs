//! Numerical laboratory for the two-interface periodic Muskat problem.
//!
//! Two fluid layers sit above a bottom line `y = d` where the pressure is
//! prescribed. The lower interface is the graph of `f`, the upper one the
//! graph of `h`. Both fluid domains are pulled back to fixed reference strips
//! where the potentials solve a coupled transmission problem; the interface
//! velocities are boundary fluxes of that solution.
//!
//! Module map:
//! - [`geometry`]: periodic grids, spectral derivatives, curvature.
//! - [`operators`]: transformed elliptic/boundary operators and their derivatives.
//! - [`diffraction`]: the discrete transmission solver.
//! - [`evolution`]: the evolution operator, pressures, RT margins, time stepping.
//! - [`symbols`]: frozen-coefficient Fourier symbols and their ODE oracle.

pub mod diffraction;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod operators;
pub mod scalar;
pub mod symbols;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double precision grid.
pub type PeriodicGridF64 = geometry::PeriodicGrid<f64>;
/// Double precision periodic samples.
pub type PeriodicFnF64 = geometry::PeriodicFn<f64>;
/// Double precision interface pair.
pub type InterfacePairF64 = geometry::InterfacePair<f64>;
/// Double precision physical constants.
pub type FluidParamsF64 = operators::FluidParams<f64>;
/// Double precision frozen-coefficient point.
pub type FrozenPointF64 = symbols::FrozenPoint<f64>;
