//! Exact field tower, polynomials, intervals and linear algebra.

pub mod field;
pub mod gcd;
pub mod interval;
pub mod linalg;
pub mod poly;
pub mod roots;
pub mod upoly;

pub use field::{guard, Fe, Rational, Symbol, SymbolKind, Tower};
pub use poly::{Monomial, Poly};
