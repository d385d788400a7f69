//! Exact-arithmetic workbench for line-based (PCR) and sums-of-squares (SOS)
//! refutations of Boolean polynomial constraint systems.
//!
//! Everything is computed over an exact scalar field: verification is exact
//! polynomial identity, positive semidefiniteness is decided by rational
//! pivoting, and complexity measures (degree, monomial counts, encoded bit
//! sizes) are exact integers. No floating point is used anywhere.
//!
//! The arithmetic core is generic over the [`scalar::Scalar`] field; the
//! concrete instantiation used throughout the crate is arbitrary-precision
//! rationals, see the [`Rat`] and [`Poly`] aliases.

pub mod families;
pub mod monomial;
pub mod pcr;
pub mod poly;
pub mod pseudo;
pub mod scalar;
pub mod sos;
pub mod space;
pub mod text;

pub use monomial::Monomial;
pub use poly::{Degree, Polynomial};
pub use scalar::Scalar;
pub use space::{VarId, VariableSpace};

/// Arbitrary-precision rational: the scalar type for all shipped tooling.
pub type Rat = num_rational::BigRational;

/// Sparse polynomial over [`Rat`].
pub type Poly = Polynomial<Rat>;

/// Constraint system over [`Rat`].
pub type RatSystem = families::ConstraintSystem<Rat>;

/// PCR proof over [`Rat`].
pub type RatPcrProof = pcr::PcrProof<Rat>;

/// SOS certificate over [`Rat`].
pub type RatSosCertificate = sos::SosCertificate<Rat>;
