pub mod error;
pub mod fields;
pub mod measures;
pub mod operator;
pub mod quadrature;
pub mod special;
pub mod weights;

pub use error::{Error, Result};
