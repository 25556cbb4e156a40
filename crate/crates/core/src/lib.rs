//! Exact computation with n-Lie algebras, Nambu–Poisson tensors and
//! first-order n-Jacobi operators on a single polynomial chart.

pub mod bianchi;
pub mod combinatorics;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod multivec;
pub mod njacobi;
pub mod nlie;
pub mod npoisson;
pub mod poly;
pub mod verdict;

pub use error::{Error, Result};
pub use linalg::RatMatrix;
pub use multivec::{MultiVector, OneForm, VectorField};
pub use verdict::Verdict;
pub use poly::{int, parse_rational, rat, Poly, Rational};
