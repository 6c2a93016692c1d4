//! 1-D per-channel maxfun pooling.
//!
//! Signals are stored position-major: entry `(pos, ch)` of an
//! `input_len x channels` signal lives at `pos * channels + ch`, matching
//! the block layout of convolutional sparse codes. Candidate sub-intervals
//! have length `2r + 1` and the same radius rules as the 2-D operator.

use crate::error::{Error, Result};
use crate::pooling::{MaxfunConfig, PoolGrid1d};
use crate::scalar::Float;

/// Maxfun pooling along the spatial axis, independently per channel.
///
/// Returns an `out_len x channels` signal in the same position-major layout.
pub fn pool_maxfun_1d<T: Float>(
    x: &[T],
    channels: usize,
    g: &PoolGrid1d,
    cfg: &MaxfunConfig,
) -> Result<Vec<T>> {
    cfg.validate(g.window)?;
    if channels == 0 {
        return Err(Error::InvalidConfig("channel count must be positive".into()));
    }
    if x.len() != g.input_len * channels {
        return Err(Error::ShapeMismatch(format!(
            "signal length {} vs {} positions x {} channels",
            x.len(),
            g.input_len,
            channels
        )));
    }
    if let Some(p) = x.iter().position(|v| *v < T::zero()) {
        return Err(Error::NegativeEntry {
            index: (p / channels, p % channels),
            value: x[p].to_f64().unwrap_or(f64::NAN),
        });
    }

    let mut out = vec![T::zero(); g.out_len * channels];
    for k in 0..g.out_len {
        let o = g.origin(k);
        for ch in 0..channels {
            let mut best: Option<T> = None;
            for r in cfg.r_min..=cfg.b {
                let len = 2 * r + 1;
                let denom = T::from_count(len);
                if cfg.centered {
                    let c = g.center(k);
                    let mean = interval_sum(x, channels, ch, c - r, len) / denom;
                    if best.map_or(true, |b| mean > b) {
                        best = Some(mean);
                    }
                } else {
                    for c in o + r..=o + g.window - 1 - r {
                        let mean = interval_sum(x, channels, ch, c - r, len) / denom;
                        if best.map_or(true, |b| mean > b) {
                            best = Some(mean);
                        }
                    }
                }
            }
            out[k * channels + ch] = best.expect("config guarantees a candidate");
        }
    }
    Ok(out)
}

#[inline]
fn interval_sum<T: Float>(x: &[T], channels: usize, ch: usize, start: usize, len: usize) -> T {
    let mut s = T::zero();
    for pos in start..start + len {
        s += x[pos * channels + ch];
    }
    s
}
