//! Scalar abstraction: the numeric kernels are generic over `f32`/`f64`.

use num_traits::{FromPrimitive, NumAssign};

/// Floating-point scalar usable throughout the numeric kernels.
pub trait Float:
    num_traits::Float
    + FromPrimitive
    + NumAssign
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion of a small count (window areas, lengths).
    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable in scalar type")
    }
}

impl Float for f32 {}
impl Float for f64 {}
