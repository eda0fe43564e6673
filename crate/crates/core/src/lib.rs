//! Torsion in the homology of congruence-type covers of hyperbolic
//! tetrahedral groups.
//!
//! A catalog group is reduced modulo a prime of its trace field, the
//! stabilizer of `∞` in the induced action on `P¹(F_q)` is abelianized by
//! Reidemeister–Schreier rewriting, and the Smith normal form of the
//! resulting sparse relation matrix gives the Betti number and the size of
//! the torsion subgroup. The numerical core is generic over [`ExactInt`];
//! the aliases below fix the default integer type.

pub mod catalog;
pub mod cover;
pub mod decimal;
pub mod experiment;
pub mod gf;
pub mod reduction;
pub mod rs;
pub mod scalar;
pub mod snf;
pub mod sparse;

pub use scalar::ExactInt;

/// Default exact integer.
pub type Int = dashu_int::IBig;
/// Relation matrices over [`Int`].
pub type SparseMatrix = sparse::SparseIntMatrix<Int>;
/// Smith normal form reports over [`Int`].
pub type Divisors = snf::DivisorReport<Int>;
