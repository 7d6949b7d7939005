//! Exact finite models for discrete colored operads: encoding categories,
//! twisted arrow categories, quasi-simplex unstraightening, and functor
//! cohomology over truncated base categories.

pub mod artifact;
pub mod category;
pub mod collections;
pub mod encodings;
pub mod error;
pub mod exactla;
pub mod pointed;
pub mod qcohom;
pub mod sset;
pub mod twisted;

pub use error::{Error, Result};
mod util;
