pub mod dks;
pub mod error;
pub mod io;
pub mod linalg;
pub mod rng;
pub mod solver;
pub mod spca;
pub mod theory;

pub use error::{Error, Result};
