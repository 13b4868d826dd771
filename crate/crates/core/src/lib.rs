//! Construction of monic integer polynomials of degree n with squarefree
//! discriminant, prescribed signature (r, s), and discriminant coprime to a
//! chosen set of primes — with every claimed property certified by
//! independent exact-arithmetic checks, plus sieve-density statistics.

pub mod certify;
pub mod error;
pub mod exactmath;
pub mod family;
pub mod paramsearch;
pub mod pipeline;
pub mod polyarith;
pub mod sieve;

pub use error::{Error, Result};
