//! Symbolic-numeric deflation of isolated singular roots of multivariate
//! polynomial systems.
//!
//! Two constructions are provided. The first repeatedly applies a single
//! first-order differential built from the Jacobian's kernel, adding bordered
//! minors of the Jacobian to the system until the root becomes simple
//! ([`determinantal`]). The second recovers the local multiplicity structure
//! (dual basis, multiplicity, nil-index) from Macaulay multiplicity matrices
//! ([`dual`]) and deflates in one step by coupling the point coordinates with
//! the entries of parametric multiplication matrices ([`extended`]); Newton
//! iteration on the coupled system refines the root and the structure
//! constants together at a quadratic rate ([`newton`]).

pub mod determinantal;
pub mod dual;
pub mod exponent;
pub mod extended;
pub mod linalg;
pub mod newton;
pub mod poly;
pub mod rng;
pub mod scalar;

pub use exponent::Exponent;
pub use poly::{DomainError, PolySystem, Polynomial};
pub use scalar::{FloatScalar, Rat, Scalar};

// re-exports so downstream code can name the coefficient domains without
// tracking our numeric dependency versions
pub use num_complex::Complex64;
pub use num_traits::{One, Zero};

