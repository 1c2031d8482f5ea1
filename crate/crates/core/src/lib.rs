//! Numerical laboratory for the variance of `a_f(|q(n)|)` over weight-aspect
//! families of level-one Hecke eigenforms.

pub mod arith;
pub mod bessel;
pub mod config;
pub mod eigenform;
pub mod error;
pub mod kloosterman;
pub mod ntt;
pub mod oscillatory;
pub mod petersson;
pub mod qexp;
pub mod quadrature;
pub mod report;
pub mod sum;
pub mod sweeps;
pub mod variance;
pub mod verify;
pub mod window;

pub use error::{Error, Result};
