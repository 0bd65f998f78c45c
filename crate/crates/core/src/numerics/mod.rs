//! Small numerical kernels shared by the spectral modules: adaptive
//! quadrature, an embedded Runge-Kutta integrator and scalar root finding.

pub mod ode;
pub mod quadrature;
pub mod roots;
