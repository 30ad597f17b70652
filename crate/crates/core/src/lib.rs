//! Generalized Kloosterman sums over real quadratic fields and certified
//! Fourier coefficients of Hilbert Poincare series.

pub mod arith;
pub mod bessel;
pub mod cyclotomic;
pub mod error;
pub mod field;
pub mod hecke;
pub mod ideals;
pub mod interval;
pub mod kloosterman;
pub mod parse;
pub mod poincare;
pub mod residues;

pub use error::{Error, Result};
pub use field::{FElement, OElement, RealQuadraticField};
pub use ideals::{FractionalIdeal, IdealHNF};
pub use interval::Interval;
