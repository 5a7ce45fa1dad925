pub mod clifford;
pub mod dirac_variation;
pub mod error;
pub mod exec;
pub mod fiber;
pub mod hessian;
pub mod linalg;
pub mod oracle;
pub mod poly;
pub mod special;
pub mod spectral_model;
pub mod sphere_zeta;
pub mod stability;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;
