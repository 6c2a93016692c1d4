//! Pooling-window geometry and the maxfun radius configuration.

use crate::error::{Error, Result};

/// Geometry of 2-D pooling windows over an `input_rows x input_cols` image.
///
/// Window `(k, l)` is the `window x window` square with top-left corner
/// `(k * stride, l * stride)`; only fully interior windows are emitted.
/// With `window == stride` the windows are the disjoint squares of the
/// partitioning regime (`out_rows = input_rows / window`); with
/// `stride < window` they overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolGrid {
    pub input_rows: usize,
    pub input_cols: usize,
    pub window: usize,
    pub stride: usize,
    pub out_rows: usize,
    pub out_cols: usize,
}

impl PoolGrid {
    /// Top-left corner of window `(k, l)`.
    #[inline]
    pub fn origin(&self, k: usize, l: usize) -> (usize, usize) {
        (k * self.stride, l * self.stride)
    }

    /// Row-major index set of window `(k, l)`.
    pub fn window_indices(&self, k: usize, l: usize) -> Vec<(usize, usize)> {
        let (r0, c0) = self.origin(k, l);
        let mut out = Vec::with_capacity(self.window * self.window);
        for i in r0..r0 + self.window {
            for j in c0..c0 + self.window {
                out.push((i, j));
            }
        }
        out
    }

    /// Center of window `(k, l)`; meaningful when `window` is odd.
    #[inline]
    pub fn center(&self, k: usize, l: usize) -> (usize, usize) {
        let (r0, c0) = self.origin(k, l);
        (r0 + self.window / 2, c0 + self.window / 2)
    }

    pub fn is_partition(&self) -> bool {
        self.window == self.stride
    }
}

/// Build a [`PoolGrid`]; `window <= min(rows, cols)` and `stride >= 1`.
pub fn make_grid(
    input_rows: usize,
    input_cols: usize,
    window: usize,
    stride: usize,
) -> Result<PoolGrid> {
    if window == 0 {
        return Err(Error::InvalidGrid("window must be positive".into()));
    }
    if stride == 0 {
        return Err(Error::InvalidGrid("stride must be positive".into()));
    }
    if window > input_rows || window > input_cols {
        return Err(Error::InvalidGrid(format!(
            "window {window} exceeds input {input_rows}x{input_cols}"
        )));
    }
    Ok(PoolGrid {
        input_rows,
        input_cols,
        window,
        stride,
        out_rows: (input_rows - window) / stride + 1,
        out_cols: (input_cols - window) / stride + 1,
    })
}

/// 1-D analogue of [`PoolGrid`]: windows are intervals along a signal axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolGrid1d {
    pub input_len: usize,
    pub window: usize,
    pub stride: usize,
    pub out_len: usize,
}

impl PoolGrid1d {
    #[inline]
    pub fn origin(&self, k: usize) -> usize {
        k * self.stride
    }

    #[inline]
    pub fn center(&self, k: usize) -> usize {
        self.origin(k) + self.window / 2
    }

    pub fn is_partition(&self) -> bool {
        self.window == self.stride
    }
}

/// Build a [`PoolGrid1d`]; `window <= len` and `stride >= 1`.
pub fn make_grid_1d(input_len: usize, window: usize, stride: usize) -> Result<PoolGrid1d> {
    if window == 0 {
        return Err(Error::InvalidGrid("window must be positive".into()));
    }
    if stride == 0 {
        return Err(Error::InvalidGrid("stride must be positive".into()));
    }
    if window > input_len {
        return Err(Error::InvalidGrid(format!(
            "window {window} exceeds input length {input_len}"
        )));
    }
    Ok(PoolGrid1d {
        input_len,
        window,
        stride,
        out_len: (input_len - window) / stride + 1,
    })
}

/// Radius search space of the maxfun operator.
///
/// Candidate sub-squares have side `2r + 1` for `r_min <= r <= b`. In
/// centered mode every candidate is centered at the window center (which
/// requires an odd window); in non-centered mode the search also ranges
/// over every center for which the sub-square stays inside the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxfunConfig {
    pub r_min: usize,
    pub b: usize,
    pub centered: bool,
}

impl MaxfunConfig {
    pub fn centered(r_min: usize, b: usize) -> Self {
        Self {
            r_min,
            b,
            centered: true,
        }
    }

    pub fn non_centered(r_min: usize, b: usize) -> Self {
        Self {
            r_min,
            b,
            centered: false,
        }
    }

    /// Check the radius bounds against a window side length.
    pub fn validate(&self, window: usize) -> Result<()> {
        if self.r_min == 0 {
            return Err(Error::InvalidConfig("maxfun r_min must be >= 1".into()));
        }
        if self.b < self.r_min {
            return Err(Error::InvalidConfig(format!(
                "maxfun b = {} must be >= r_min = {}",
                self.b, self.r_min
            )));
        }
        if 2 * self.b + 1 > window {
            return Err(Error::InvalidConfig(format!(
                "maxfun needs 2b + 1 <= window, got b = {} and window = {window}",
                self.b
            )));
        }
        if self.centered && window % 2 == 0 {
            return Err(Error::InvalidConfig(format!(
                "centered maxfun requires an odd window, got {window}"
            )));
        }
        Ok(())
    }
}
