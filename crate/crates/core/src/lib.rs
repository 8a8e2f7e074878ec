pub mod coa;
pub mod error;
pub mod graph;
pub mod insertion;
pub mod operad;
pub mod perm;
pub mod prop;
pub mod pushout;

pub use error::{Error, Result};
