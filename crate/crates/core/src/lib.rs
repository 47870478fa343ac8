//! Wiener–Hopf factorization for meromorphic Lévy processes.

pub mod distributions;
pub mod error;
pub mod models;
pub mod quad;
pub mod roots;
pub mod specfun;
pub mod validation;
pub mod wh_factors;

pub use error::{Error, Result};
pub use models::{BetaFamilyModel, ProcessModel, SechPoissonModel, SinhSquareModel};
pub use num_complex::Complex64;
