//! Exact computations in C2-equivariant algebra: Mackey functors as Lewis
//! diagrams, chain complexes of them, Tambara norms, involutive cotangent and
//! de Rham data, and real Hochschild and dihedral homology.
//!
//! All arithmetic is exact. The dense containers [`matrix::Matrix`] and
//! [`poly::Poly`] are generic over [`scalar::Scalar`]; the algorithms fix the
//! scalar to [`Integer`] or [`Rational`] where they need a Euclidean domain or
//! a field.

pub mod abelian;
pub mod complexes;
pub mod differentials;
pub mod mackey;
pub mod matrix;
pub mod poly;
pub mod scalar;
pub mod tambara;
pub mod trace;

pub use abelian::{AbMap, FgAbGroup};
pub use mackey::{MackeyFunctor, MackeyMap};
pub use matrix::{IntMatrix, Matrix, RatMatrix};
pub use poly::{Poly, RatPoly};
pub use tambara::{BaseRing, InvolutiveRing, TambaraPresentation};
pub use scalar::{Integer, Rational, Scalar};
