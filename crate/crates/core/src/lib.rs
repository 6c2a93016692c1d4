//! Pooling operators built around the maxfun operator (the discrete,
//! windowed analogue of a centered maximal average), together with the
//! machinery needed to study it: dense images and matrices, convolutional
//! dictionaries and sparse codes, layered pursuit with pooling between
//! layers, and a small image-classification pipeline for comparing
//! pooling strategies.
//!
//! The numeric kernels (`mat`, `pooling`, parts of `csc`) are generic over
//! the scalar type through [`scalar::Float`]; `f64` is the default type
//! parameter everywhere and the rest of the crate works in `f64`.

pub mod classify;
pub mod csc;
pub mod error;
pub mod io;
pub mod mat;
pub mod pooling;
pub mod scalar;
pub mod selftest;

pub use error::{Error, Result};
pub use mat::{devectorize, frob_norm, vectorize, Image, Matrix};
pub use pooling::{MaxfunConfig, PoolGrid, PoolGrid1d, PoolOutput};
pub use scalar::Float;

/// Single-precision image, for callers that opt out of the `f64` default.
pub type ImageF32 = Image<f32>;
/// Single-precision column-major matrix.
pub type MatrixF32 = Matrix<f32>;
/// Single-precision pooled output.
pub type PoolOutputF32 = PoolOutput<f32>;
