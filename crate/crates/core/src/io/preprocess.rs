//! Image preprocessing: centered zero-padding to square and bilinear
//! resizing.

use crate::error::{Error, Result};
use crate::mat::Image;

/// Zero-pad to `max(rows, cols)` square, keeping the original centered.
/// Odd leftovers put the extra row at the bottom and the extra column on
/// the right. A 100x120 image gains 10 rows on top and 10 on the bottom.
pub fn pad_to_square(img: &Image<f64>) -> Image<f64> {
    let side = img.rows().max(img.cols());
    if img.rows() == img.cols() {
        return img.clone();
    }
    let top = (side - img.rows()) / 2;
    let left = (side - img.cols()) / 2;
    Image::from_fn(side, side, |i, j| {
        if i >= top && i < top + img.rows() && j >= left && j < left + img.cols() {
            img.get(i - top, j - left)
        } else {
            0.0
        }
    })
}

/// Bilinear resize to `target x target` with the pixel-center convention
/// (source coordinate `(dst + 0.5) * scale - 0.5`, clamped). Resizing to
/// the source size is the exact identity.
pub fn resize(img: &Image<f64>, target: usize) -> Result<Image<f64>> {
    if target == 0 {
        return Err(Error::InvalidConfig("resize target must be positive".into()));
    }
    let (rows, cols) = (img.rows(), img.cols());
    let row_scale = rows as f64 / target as f64;
    let col_scale = cols as f64 / target as f64;
    Ok(Image::from_fn(target, target, |i, j| {
        let si = ((i as f64 + 0.5) * row_scale - 0.5).clamp(0.0, (rows - 1) as f64);
        let sj = ((j as f64 + 0.5) * col_scale - 0.5).clamp(0.0, (cols - 1) as f64);
        let i0 = si.floor() as usize;
        let j0 = sj.floor() as usize;
        let i1 = (i0 + 1).min(rows - 1);
        let j1 = (j0 + 1).min(cols - 1);
        let fi = si - i0 as f64;
        let fj = sj - j0 as f64;
        (1.0 - fi) * (1.0 - fj) * img.get(i0, j0)
            + (1.0 - fi) * fj * img.get(i0, j1)
            + fi * (1.0 - fj) * img.get(i1, j0)
            + fi * fj * img.get(i1, j1)
    }))
}
