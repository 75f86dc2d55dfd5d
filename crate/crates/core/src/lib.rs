//! Exact construction and verification of Fermat-Pfister forms, universal
//! relations in Milnor K-theory mod `m`, twisting-type polynomials, the
//! hypersurface families built from them, residue certificates and
//! torsion-order divisibility bounds.

pub mod bounds;
#[cfg(feature = "cli")]
pub mod cli;
pub mod construct;
pub mod field;
pub mod hypersurface;
pub mod milnor;
pub mod pfister;
pub mod poly;
pub mod probe;
pub mod residue;
pub mod twisting;
