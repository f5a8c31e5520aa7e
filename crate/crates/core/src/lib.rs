//! The Cesàro operator `(Cf)(z) = (1/z)∫_0^z f(ζ) dζ` on the Hardy space
//! H²(ℂ₊) of the upper half-plane.
//!
//! Closed forms on reproducing kernels are checked against independent
//! quadrature, and finite sections of `C` on spans of kernels expose the
//! structure `C = I + U` with `U` unitary.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod halfplane;
pub mod norms;
pub mod operators;
pub mod quadrature;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
