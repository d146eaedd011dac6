//! Generating functionals on Weyl algebras, their cylindrical semiclassical
//! limits, and a truncated Fock-space oracle for cross-checking both.
//!
//! The phase space is R^{2d} with interleaved coordinates
//! (q_1, p_1, ..., q_d, p_d); mode i packs into the complex amplitude
//! z_i = x[2i] + i x[2i+1].

pub mod bosegas;
pub mod conevalued;
pub mod constants;
pub mod cylmeasure;
pub mod error;
pub mod fockrep;
pub mod genfun;
pub mod linalg;
pub mod quadrature;
pub mod schedule;
pub mod schema;
pub mod semiclassics;
pub mod symplectic;

pub use error::{CoreError, Result};
pub use symplectic::PhaseSpace;

pub type C64 = num_complex::Complex64;
