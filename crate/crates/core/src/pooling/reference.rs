//! Naive loop implementations of every pooling operator.
//!
//! These exist to cross-check the production operators: each one
//! enumerates window index sets literally and reduces over gathered
//! values, sharing no code with the optimized paths. The self-test
//! command and the verification suites diff the two implementations
//! bit-for-bit, which works because both fix row-major gathering order.

use crate::error::Result;
use crate::mat::Image;
use crate::pooling::{MaxfunConfig, PoolGrid, PoolGrid1d};
use crate::scalar::Float;

fn gather<T: Float>(x: &Image<T>, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Vec<T> {
    let mut out = Vec::new();
    for i in rows {
        for j in cols.clone() {
            out.push(x.get(i, j));
        }
    }
    out
}

fn seq_sum<T: Float>(values: &[T]) -> T {
    let mut s = T::zero();
    for &v in values {
        s += v;
    }
    s
}

pub fn naive_avg<T: Float>(x: &Image<T>, g: &PoolGrid) -> Image<T> {
    Image::from_fn(g.out_rows, g.out_cols, |k, l| {
        let r0 = k * g.stride;
        let c0 = l * g.stride;
        let vals = gather(x, r0..r0 + g.window, c0..c0 + g.window);
        seq_sum(&vals) / T::from_count(vals.len())
    })
}

pub fn naive_max<T: Float>(x: &Image<T>, g: &PoolGrid) -> Image<T> {
    Image::from_fn(g.out_rows, g.out_cols, |k, l| {
        let r0 = k * g.stride;
        let c0 = l * g.stride;
        let vals = gather(x, r0..r0 + g.window, c0..c0 + g.window);
        let mut best = vals[0];
        for &v in &vals[1..] {
            if v > best {
                best = v;
            }
        }
        best
    })
}

pub fn naive_mixed<T: Float>(x: &Image<T>, g: &PoolGrid, alpha: T) -> Image<T> {
    let max = naive_max(x, g);
    let avg = naive_avg(x, g);
    Image::from_fn(g.out_rows, g.out_cols, |k, l| {
        alpha * max.get(k, l) + (T::one() - alpha) * avg.get(k, l)
    })
}

pub fn naive_stochastic<T: Float>(x: &Image<T>, g: &PoolGrid) -> Image<T> {
    Image::from_fn(g.out_rows, g.out_cols, |k, l| {
        let r0 = k * g.stride;
        let c0 = l * g.stride;
        let vals = gather(x, r0..r0 + g.window, c0..c0 + g.window);
        let mut sum = T::zero();
        let mut sum_sq = T::zero();
        for &v in &vals {
            sum += v;
            sum_sq += v * v;
        }
        if sum == T::zero() {
            T::zero()
        } else {
            sum_sq / sum
        }
    })
}

pub fn naive_maxfun<T: Float>(x: &Image<T>, g: &PoolGrid, cfg: &MaxfunConfig) -> Result<Image<T>> {
    cfg.validate(g.window)?;
    Ok(Image::from_fn(g.out_rows, g.out_cols, |k, l| {
        let r0 = k * g.stride;
        let c0 = l * g.stride;
        let mut candidates = Vec::new();
        for r in cfg.r_min..=cfg.b {
            let centers: Vec<(usize, usize)> = if cfg.centered {
                vec![(r0 + g.window / 2, c0 + g.window / 2)]
            } else {
                let mut cs = Vec::new();
                for ci in r0 + r..=r0 + g.window - 1 - r {
                    for cj in c0 + r..=c0 + g.window - 1 - r {
                        cs.push((ci, cj));
                    }
                }
                cs
            };
            for (ci, cj) in centers {
                let vals = gather(x, ci - r..ci + r + 1, cj - r..cj + r + 1);
                candidates.push(seq_sum(&vals) / T::from_count(vals.len()));
            }
        }
        let mut best = candidates[0];
        for &c in &candidates[1..] {
            if c > best {
                best = c;
            }
        }
        best
    }))
}

pub fn naive_maxfun_1d<T: Float>(
    x: &[T],
    channels: usize,
    g: &PoolGrid1d,
    cfg: &MaxfunConfig,
) -> Result<Vec<T>> {
    cfg.validate(g.window)?;
    let mut out = vec![T::zero(); g.out_len * channels];
    for k in 0..g.out_len {
        let o = k * g.stride;
        for ch in 0..channels {
            let mut candidates = Vec::new();
            for r in cfg.r_min..=cfg.b {
                let centers: Vec<usize> = if cfg.centered {
                    vec![o + g.window / 2]
                } else {
                    (o + r..=o + g.window - 1 - r).collect()
                };
                for c in centers {
                    let vals: Vec<T> = (c - r..=c + r).map(|p| x[p * channels + ch]).collect();
                    candidates.push(seq_sum(&vals) / T::from_count(vals.len()));
                }
            }
            let mut best = candidates[0];
            for &c in &candidates[1..] {
                if c > best {
                    best = c;
                }
            }
            out[k * channels + ch] = best;
        }
    }
    Ok(out)
}
