pub mod analysis;
pub mod error;
pub mod gf2;
pub mod pir;
pub mod retrieval;
pub mod sim;
pub mod storage;

pub use error::{Error, Result};
