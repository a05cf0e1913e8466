//! Finite-dimensional toolkit for Jordan *-homomorphisms, isometries of
//! noncommutative `L^p`-spaces and completely bounded norms.
//!
//! Every von Neumann algebra here is a weighted direct sum of full matrix
//! blocks ([`Algebra`]). On top of that the crate provides
//!
//! * linear maps between algebras with amplification, Choi matrices and
//!   positivity searches ([`LinMap`], [`positivity`]),
//! * detection and central decomposition of Jordan *-homomorphisms
//!   ([`jordan`]),
//! * lower bounds and structural values for cb norms ([`cb`]),
//! * construction and factorization of positive isometries `T = wbJ` and
//!   their local liftings ([`yeadon`]),
//! * seeded instance generators and verification suites ([`harness`]).

pub mod algebra;
pub mod cb;
pub mod error;
pub mod harness;
pub mod jordan;
pub mod json;
pub mod linmap;
pub mod positivity;
pub mod probe;
pub mod rng;
pub mod spectral;
pub mod tol;
pub mod witness;
pub mod yeadon;

pub use algebra::{parse_exponent, Algebra, Block, Element};
pub use error::{Error, Result};
pub use linmap::LinMap;

pub type C64 = num_complex::Complex<f64>;
pub type Matrix = nalgebra::DMatrix<C64>;
