//! Numerical building blocks: quadrature, ODE integration, root finding,
//! sparse symmetric factorisation.

pub mod ode;
pub mod quadrature;
pub mod roots;
pub mod sparse;
pub mod triangle;
