//! Iwasawa-theoretic computations: p-adic L-function branches, their
//! Weierstrass data, resultant valuations at finite levels, and a
//! Bloch–Fontaine style exponential sum over finite abelian p-groups.

pub mod bf;
pub mod error;
pub mod lfunction;
pub mod padic;
pub mod series;
pub mod theorem;
pub mod zmod;

pub use error::{Error, Result};
