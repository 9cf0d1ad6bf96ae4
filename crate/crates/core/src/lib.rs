pub mod beatty;
pub mod cli;
pub mod density;
pub mod error;
pub mod exactnum;
pub mod torus;
pub mod witness;
pub mod zp;

pub use error::{Error, Result};
