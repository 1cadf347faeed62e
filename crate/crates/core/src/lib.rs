pub mod algebra;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod toda;
pub mod transport;

pub use error::{Error, Result};
