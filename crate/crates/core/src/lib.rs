//! Exact computer algebra for parametric Weyl algebras over pluggable
//! coefficient rings, together with their differential-operator and matrix
//! realizations and a polynomial-identity checking toolkit.

pub mod arith;
pub mod diffop;
pub mod error;
pub mod experiments;
pub mod freealg;
pub mod linalg;
pub mod matrep;
pub mod parse;
pub mod pi_check;
pub mod poly;
pub mod ring;
pub mod weyl;

pub use error::{Error, Result};
pub use ring::{Ring, RingElement, RingKind};
