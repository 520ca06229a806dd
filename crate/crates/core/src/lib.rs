//! Enumeration of pattern-avoiding permutations and asymptotic analysis of
//! their counting sequences.

pub mod analysis;
pub mod da;
pub mod dyck;
pub mod error;
pub mod fit;
pub mod numeric;
pub mod perm;
pub mod ratio;
pub mod series;
pub mod stieltjes;
pub mod stretched;

pub use error::{Error, Result};
