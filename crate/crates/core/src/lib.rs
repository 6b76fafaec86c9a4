//! Fractal strings with regularly varying gauge functions.
//!
//! The crate computes string counting functions, tube volumes, generalized
//! Minkowski and S-contents, packing defects and the remainder of the
//! eigenvalue counting function of the Dirichlet Laplacian on a union of
//! intervals, together with the Karamata-theory diagnostics that relate them.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gauge;
pub mod geometry;
pub mod grid;
pub mod harness;
pub mod karamata;
pub mod numeric;
pub mod spectral;
pub mod strings;

pub use error::{Error, Result};
