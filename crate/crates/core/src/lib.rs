//! Numerical laboratory for comparison theorems of the first Dirichlet
//! eigenfunction on planar and conformally flat domains.

pub mod conformal_lab;
pub mod domain;
pub mod eigensolver;
pub mod error;
pub mod flow_lab;
pub mod model_space;
pub mod numeric;
pub mod rearrangement;
pub mod report;

pub use error::{Error, Result};
