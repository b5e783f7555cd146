//! Unbounded quadrature domains of the plane built as images of the lower
//! half-plane under `psi(w) = q(w) + phi(w)`, with `q` quadratic and `phi` a
//! sum of pole groups and logarithmic segment chains.

pub mod confmap;
pub mod contact;
pub mod error;
pub mod families;
pub mod io;
pub mod numerics;
pub mod quadrature;
pub mod par;

pub use error::{Error, Result};
pub use num_complex::Complex64;
