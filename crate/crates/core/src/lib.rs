pub mod error;
pub mod gamma;
pub mod lzs;
pub mod matrix;
pub mod propagator;
pub mod quadrature;
pub mod selftest;
pub mod specfun;
pub mod ssh;
pub mod twolevel;
pub mod waveguide;

pub use error::{Error, Result};
pub use matrix::Complex2x2;
