pub mod error;
pub mod fock;
pub mod optics;

pub use error::{NlaError, Result};
pub mod nla;
pub mod applications;
pub mod experiments;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
