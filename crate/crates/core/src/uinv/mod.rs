//! Hermitian u-invariants: exact values by residue recursion, witnesses,
//! and upper bounds.

pub mod bounds;
pub mod derivation;
pub mod exact;
pub mod table;
pub mod witness;

pub use bounds::{
    bounds_ai, bounds_tensor, comparison_bound, semi_global_combine, sequence_abc, AbcSequence, AiBound,
    BoundKind, SemiGlobalKind, TensorBounds,
};
pub use derivation::{Combine, Derivation};
pub use exact::{u_exact, u_exact_morita, Assertions};
pub use table::{expected_table, expected_table_for, BaseTable, ExpectedEntry};
pub use witness::{witness, Witness, WitnessReport};
