//! Exact algebra for mapping telescopes over Laurent group rings: chain
//! complexes over `Q[pi]` and `Q[pi][z, z^-1]`, machine-checked contraction
//! certificates, Novikov vanishing, equivariant Euler classes of Wall
//! complexes, and a floating-point lab for weighted truncations.

pub mod character;
pub mod complexes;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod group;
pub mod io;
pub mod laurent;
pub mod numeric;
pub mod random;
pub mod spectral;
pub mod telescope;

pub use error::{Error, Result};
