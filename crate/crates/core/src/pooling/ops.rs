//! The 2-D pooling operators.

use crate::error::{Error, Result};
use crate::mat::Image;
use crate::pooling::{MaxfunChoice, MaxfunConfig, PoolGrid, PoolOutput};
use crate::scalar::Float;

fn check_input<T: Float>(x: &Image<T>, g: &PoolGrid) -> Result<()> {
    if x.rows() != g.input_rows || x.cols() != g.input_cols {
        return Err(Error::ShapeMismatch(format!(
            "image {}x{} vs grid input {}x{}",
            x.rows(),
            x.cols(),
            g.input_rows,
            g.input_cols
        )));
    }
    if let Some(index) = x.first_negative() {
        return Err(Error::NegativeEntry {
            index,
            value: x[index].to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Row-major sum over the `side x side` square with top-left `(r0, c0)`.
#[inline]
fn square_sum<T: Float>(x: &Image<T>, r0: usize, c0: usize, side: usize) -> T {
    let mut s = T::zero();
    for i in r0..r0 + side {
        for &v in &x.row(i)[c0..c0 + side] {
            s += v;
        }
    }
    s
}

/// Mean over each window.
pub fn pool_avg<T: Float>(x: &Image<T>, g: &PoolGrid) -> Result<PoolOutput<T>> {
    check_input(x, g)?;
    let area = T::from_count(g.window * g.window);
    let mut out = Image::zeros(g.out_rows, g.out_cols);
    for k in 0..g.out_rows {
        for l in 0..g.out_cols {
            let (r0, c0) = g.origin(k, l);
            out.set(k, l, square_sum(x, r0, c0, g.window) / area);
        }
    }
    Ok(PoolOutput::plain(out))
}

/// Maximum over each window.
pub fn pool_max<T: Float>(x: &Image<T>, g: &PoolGrid) -> Result<PoolOutput<T>> {
    check_input(x, g)?;
    let mut out = Image::zeros(g.out_rows, g.out_cols);
    for k in 0..g.out_rows {
        for l in 0..g.out_cols {
            let (r0, c0) = g.origin(k, l);
            let mut best = x.get(r0, c0);
            for i in r0..r0 + g.window {
                for &v in &x.row(i)[c0..c0 + g.window] {
                    if v > best {
                        best = v;
                    }
                }
            }
            out.set(k, l, best);
        }
    }
    Ok(PoolOutput::plain(out))
}

/// Index set of the `(2r+1) x (2r+1)` square centered at `center`, row-major.
///
/// Errors when the square does not fit inside a `rows x cols` domain.
pub fn subsquare(
    center: (usize, usize),
    r: usize,
    rows: usize,
    cols: usize,
) -> Result<Vec<(usize, usize)>> {
    let (ci, cj) = center;
    if ci < r || cj < r || ci + r >= rows || cj + r >= cols {
        return Err(Error::OutOfBounds(format!(
            "sub-square r = {r} at ({ci}, {cj}) exceeds {rows}x{cols}"
        )));
    }
    let side = 2 * r + 1;
    let mut out = Vec::with_capacity(side * side);
    for i in ci - r..=ci + r {
        for j in cj - r..=cj + r {
            out.push((i, j));
        }
    }
    Ok(out)
}

/// Maxfun pooling: per window, the largest mean over candidate sub-squares.
///
/// Centered mode realizes the radius search at the window center;
/// non-centered mode additionally searches every admissible center. Ties
/// resolve to the smallest radius, then the lexicographically smallest
/// center, which is what the candidate enumeration order yields.
pub fn pool_maxfun<T: Float>(
    x: &Image<T>,
    g: &PoolGrid,
    cfg: &MaxfunConfig,
) -> Result<PoolOutput<T>> {
    cfg.validate(g.window)?;
    check_input(x, g)?;
    let mut out = Image::zeros(g.out_rows, g.out_cols);
    let mut provenance = Vec::with_capacity(g.out_rows * g.out_cols);
    for k in 0..g.out_rows {
        for l in 0..g.out_cols {
            let (r0, c0) = g.origin(k, l);
            let mut best: Option<(T, MaxfunChoice)> = None;
            for r in cfg.r_min..=cfg.b {
                let side = 2 * r + 1;
                let area = T::from_count(side * side);
                if cfg.centered {
                    let (ci, cj) = g.center(k, l);
                    let mean = square_sum(x, ci - r, cj - r, side) / area;
                    take_better(&mut best, mean, r, (ci, cj));
                } else {
                    for ci in r0 + r..=r0 + g.window - 1 - r {
                        for cj in c0 + r..=c0 + g.window - 1 - r {
                            let mean = square_sum(x, ci - r, cj - r, side) / area;
                            take_better(&mut best, mean, r, (ci, cj));
                        }
                    }
                }
            }
            let (value, choice) = best.expect("config guarantees at least one candidate");
            out.set(k, l, value);
            provenance.push(choice);
        }
    }
    Ok(PoolOutput {
        values: out,
        provenance: Some(provenance),
    })
}

#[inline]
fn take_better<T: Float>(
    best: &mut Option<(T, MaxfunChoice)>,
    mean: T,
    r: usize,
    center: (usize, usize),
) {
    match best {
        Some((value, _)) if !(mean > *value) => {}
        _ => *best = Some((mean, MaxfunChoice { r, center })),
    }
}

/// Convex combination `alpha * max + (1 - alpha) * avg` per cell.
pub fn pool_mixed<T: Float>(x: &Image<T>, g: &PoolGrid, alpha: T) -> Result<PoolOutput<T>> {
    if !(alpha >= T::zero() && alpha <= T::one()) {
        return Err(Error::InvalidConfig(format!(
            "mixed pooling alpha must lie in [0, 1], got {alpha}"
        )));
    }
    let max = pool_max(x, g)?.values;
    let avg = pool_avg(x, g)?.values;
    let out = Image::from_fn(g.out_rows, g.out_cols, |k, l| {
        alpha * max.get(k, l) + (T::one() - alpha) * avg.get(k, l)
    });
    Ok(PoolOutput::plain(out))
}

/// Deterministic stochastic pooling: `sum(x^2) / sum(x)` per window, with
/// all-zero windows mapping to zero.
pub fn pool_stochastic<T: Float>(x: &Image<T>, g: &PoolGrid) -> Result<PoolOutput<T>> {
    check_input(x, g)?;
    let mut out = Image::zeros(g.out_rows, g.out_cols);
    for k in 0..g.out_rows {
        for l in 0..g.out_cols {
            let (r0, c0) = g.origin(k, l);
            let mut sum = T::zero();
            let mut sum_sq = T::zero();
            for i in r0..r0 + g.window {
                for &v in &x.row(i)[c0..c0 + g.window] {
                    sum += v;
                    sum_sq += v * v;
                }
            }
            let value = if sum == T::zero() { T::zero() } else { sum_sq / sum };
            out.set(k, l, value);
        }
    }
    Ok(PoolOutput::plain(out))
}
