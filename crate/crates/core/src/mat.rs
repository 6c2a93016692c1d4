//! Dense images, matrices, vectorization, and the Frobenius norm.
//!
//! Images are stored row-major and indexed `(row, col)`. [`vectorize`]
//! stacks columns: entry `(i, j)` lands at position `j * rows + i`, so a
//! 2x2 image `[[1, 3], [2, 4]]` vectorizes to `[1, 2, 3, 4]`. Matrices are
//! stored column-major so dictionary columns are contiguous slices.

use crate::error::{Error, Result};
use crate::scalar::Float;

/// Dense 2-D array of scalars, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Float> Image<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimensions(format!(
                "image dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidDimensions(format!(
                "image {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::constant(rows, cols, T::zero())
    }

    pub fn constant(rows: usize, cols: usize, value: T) -> Self {
        assert!(rows > 0 && cols > 0, "image dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Build an image by evaluating `f(row, col)` at every position.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col] = value;
    }

    /// One row as a contiguous slice.
    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn frob_norm(&self) -> T {
        frob_norm(&self.data)
    }

    /// First index holding a negative entry, if any.
    pub fn first_negative(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| *v < T::zero())
            .map(|p| (p / self.cols, p % self.cols))
    }
}

impl<T: Float> std::ops::Index<(usize, usize)> for Image<T> {
    type Output = T;

    fn index(&self, (row, col): (usize, usize)) -> &T {
        &self.data[row * self.cols + col]
    }
}

/// Dense matrix of scalars, column-major, so `col(j)` is a slice.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Float> Matrix<T> {
    /// Construct from column-major data.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimensions(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidDimensions(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_cols(rows: usize, cols: &[Vec<T>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::InvalidDimensions(format!(
                    "column {j} has length {}, expected {rows}",
                    c.len()
                )));
            }
            data.extend_from_slice(c);
        }
        Self::from_col_major(rows, cols.len(), data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[col * self.rows + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[col * self.rows + row] = value;
    }

    /// Column `j` as a contiguous slice.
    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// `A x` for a dense vector `x` of length `cols`.
    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "matvec: vector length {} vs {} columns",
                x.len(),
                self.cols
            )));
        }
        let mut y = vec![T::zero(); self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == T::zero() {
                continue;
            }
            for (yi, &aij) in y.iter_mut().zip(self.col(j)) {
                *yi += aij * xj;
            }
        }
        Ok(y)
    }

    pub fn frob_norm(&self) -> T {
        frob_norm(&self.data)
    }
}

/// Euclidean norm over any flat collection of entries.
pub fn frob_norm<T: Float>(entries: &[T]) -> T {
    entries
        .iter()
        .map(|&v| v * v)
        .fold(T::zero(), |a, b| a + b)
        .sqrt()
}

/// Squared Euclidean distance between two equal-length slices.
pub fn dist_sq<T: Float>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .fold(T::zero(), |acc, v| acc + v)
}

/// Inner product of two equal-length slices.
pub fn dot<T: Float>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).fold(T::zero(), |acc, v| acc + v)
}

/// Column-stacking vectorization: output position `j * rows + i` holds
/// entry `(i, j)`.
pub fn vectorize<T: Float>(image: &Image<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(image.rows() * image.cols());
    for j in 0..image.cols() {
        for i in 0..image.rows() {
            out.push(image.get(i, j));
        }
    }
    out
}

/// Inverse of [`vectorize`]: rebuild a `rows x cols` image from a
/// column-stacked vector.
pub fn devectorize<T: Float>(v: &[T], rows: usize, cols: usize) -> Result<Image<T>> {
    if rows == 0 || cols == 0 || v.len() != rows * cols {
        return Err(Error::InvalidDimensions(format!(
            "devectorize: vector length {} does not fill {rows}x{cols}",
            v.len()
        )));
    }
    Ok(Image::from_fn(rows, cols, |i, j| v[j * rows + i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectorize_single_element() {
        let img = Image::new(1, 1, vec![7.0]).unwrap();
        assert_eq!(vectorize(&img), vec![7.0]);
    }

    #[test]
    fn vectorize_is_column_major() {
        // entries: (0,0)=1, (1,0)=2, (0,1)=3, (1,1)=4
        let img = Image::new(2, 2, vec![1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!(vectorize(&img), vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn vectorize_3x2_enumerated() {
        // entry (i, j) = 10*(i+1) + (j+1), columns stacked in order
        let img = Image::from_fn(3, 2, |i, j| (10 * (i + 1) + (j + 1)) as f64);
        assert_eq!(vectorize(&img), vec![11.0, 21.0, 31.0, 12.0, 22.0, 32.0]);
    }

    #[test]
    fn devectorize_examples() {
        let img = devectorize(&[7.0], 1, 1).unwrap();
        assert_eq!(img.data(), &[7.0]);

        let img = devectorize(&[1.0, 2.0, 3.0, 4.0], 2, 2).unwrap();
        assert_eq!(img.get(0, 0), 1.0);
        assert_eq!(img.get(1, 0), 2.0);
        assert_eq!(img.get(0, 1), 3.0);
        assert_eq!(img.get(1, 1), 4.0);
    }

    #[test]
    fn devectorize_length_mismatch() {
        assert!(devectorize(&[1.0, 2.0, 3.0], 2, 2).is_err());
    }

    #[test]
    fn roundtrip_5x4() {
        let img = Image::from_fn(5, 4, |i, j| (i * 31 + j * 7) as f64 * 0.5 - 3.0);
        let v = vectorize(&img);
        let back = devectorize(&v, 5, 4).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn frob_norm_examples() {
        assert_eq!(Image::<f64>::zeros(3, 3).frob_norm(), 0.0);
        let img = Image::new(1, 2, vec![3.0, 4.0]).unwrap();
        assert_eq!(img.frob_norm(), 5.0);
        let eye = Matrix::<f64>::identity(2);
        assert!((eye.frob_norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn frob_metric_spot_checks() {
        let a = [1.0, -2.0, 0.5];
        let b = [0.0, 1.0, -1.5];
        let c = [2.0, 2.0, 2.0];
        let d = |x: &[f64], y: &[f64]| dist_sq(x, y).sqrt();
        assert_eq!(d(&a, &b), d(&b, &a));
        assert_eq!(d(&a, &a), 0.0);
        assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
    }

    #[test]
    fn matvec_identity() {
        let eye = Matrix::<f64>::identity(3);
        let x = vec![1.0, -2.0, 3.0];
        assert_eq!(eye.matvec(&x).unwrap(), x);
    }

    #[test]
    fn invalid_dimensions_rejected() {
        assert!(Image::new(2, 2, vec![1.0]).is_err());
        assert!(Image::<f64>::new(0, 2, vec![]).is_err());
        assert!(Matrix::from_col_major(2, 2, vec![1.0, 2.0]).is_err());
    }
}
