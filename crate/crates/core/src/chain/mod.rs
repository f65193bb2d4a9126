//! Exact graded chain-complex calculus over the integers.

pub mod complex;
pub mod ops;
pub mod torsion;

pub use complex::{homotopy_defect, is_homotopy, ChainComplex, ChainHomotopy, ChainMap, Equivalence, Positions};
pub use ops::{cone, direct_sum, dual_complex, dual_map, flip, iota, mu, shift, signed_perm_inverse, tensor, tensor_map};
pub use torsion::{finiteness_obstruction, self_torsion, K0Class, K1Class};
