//! Exact-arithmetic machinery for controlled K- and L-theory transfers:
//! group backends, chain complexes with Koszul signs, geometric control,
//! homotopy actions and the metric d_{S,Λ}, unordered pairs, simplicial
//! complexes, forms, and the transfer pipelines.

pub mod actions;
pub mod chain;
pub mod control;
pub mod error;
pub mod groups;
pub mod ltheory;
pub mod matrix;
pub mod p2;
pub mod par;
pub mod rational;
pub mod simplicial;
pub mod transfer;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub mod fixtures;
