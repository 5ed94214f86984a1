pub mod cli;
pub mod cone;
pub mod error;
pub mod exact;
pub mod matops;
pub mod quotient;
pub mod sail;
pub mod survey;

pub use error::{Error, Result};
