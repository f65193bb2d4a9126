//! Transfers along homotopy S-chain complexes: the twisted tensor tr^P, its
//! functoriality homotopy, the finite projective replacement, and the K- and
//! L-theory pipelines with their control certificates.

pub mod equivariant;
pub mod pipelines;
pub mod replacement;
pub mod schain;
pub mod tr;

pub use equivariant::{equivariant_inverse, expand_complex, EqChainMap, EqHomotopy};
pub use pipelines::{k_transfer, l_symmetric_complex, l_transfer, KTransfer, LSymmetric, LTransfer};
pub use replacement::{finite_replacement, Replacement};
pub use schain::{HomotopySChainComplex, SChainCertificate};
pub use tr::{classical_l_transfer, functoriality_witness, tr, whitehead_transfer};
