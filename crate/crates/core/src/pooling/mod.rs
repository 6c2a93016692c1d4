//! Pooling operators and window geometry.
//!
//! Six operators over a shared [`PoolGrid`]: average, max, maxfun
//! (centered and non-centered), mixed, and the deterministic form of
//! stochastic pooling. A 1-D per-channel variant of maxfun supports the
//! sparse-coding layers. All operators reject negative input and fix the
//! within-window summation order to row-major, so results are independent
//! of how callers schedule windows.

mod grid;
mod oned;
mod ops;
pub mod reference;

pub use grid::{make_grid, make_grid_1d, MaxfunConfig, PoolGrid, PoolGrid1d};
pub use oned::pool_maxfun_1d;
pub use ops::{pool_avg, pool_max, pool_maxfun, pool_mixed, pool_stochastic, subsquare};

use crate::mat::Image;

/// Winning sub-square of a maxfun cell: radius and absolute center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxfunChoice {
    pub r: usize,
    pub center: (usize, usize),
}

/// Pooled values plus, for maxfun, the per-cell argmax record.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolOutput<T = f64> {
    /// `out_rows x out_cols` pooled image.
    pub values: Image<T>,
    /// Row-major per-cell winners; `None` for operators without a search.
    pub provenance: Option<Vec<MaxfunChoice>>,
}

impl<T: crate::scalar::Float> PoolOutput<T> {
    pub(crate) fn plain(values: Image<T>) -> Self {
        Self {
            values,
            provenance: None,
        }
    }
}
