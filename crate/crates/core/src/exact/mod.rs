//! Exact scalar arithmetic and dense linear algebra over Q and Q(i).

pub mod field;
pub mod matrix;

pub use field::{format_rational, integer, parse_rational, rational, rational_to_f64, Field, Gaussian, Rational};
pub use matrix::{solve_linear, Echelon, LinearReport, Matrix};
