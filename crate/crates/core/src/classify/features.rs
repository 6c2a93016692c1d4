//! Filter-bank feature extraction and per-channel pooling.

use crate::error::{Error, Result};
use crate::mat::Image;
use crate::pooling::{
    pool_avg, pool_max, pool_maxfun, pool_mixed, pool_stochastic, MaxfunConfig, PoolGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stack of square kernels applied by valid cross-correlation, optionally
/// followed by rectification.
#[derive(Debug, Clone)]
pub struct FilterBank {
    kernels: Vec<Image<f64>>,
    rectify: bool,
}

impl FilterBank {
    pub fn new(kernels: Vec<Image<f64>>, rectify: bool) -> Result<Self> {
        if kernels.is_empty() {
            return Err(Error::InvalidConfig("filter bank needs kernels".into()));
        }
        let k = kernels[0].rows();
        for (i, kern) in kernels.iter().enumerate() {
            if kern.rows() != k || kern.cols() != k {
                return Err(Error::InvalidConfig(format!(
                    "kernel {i} is {}x{}, expected {k}x{k}",
                    kern.rows(),
                    kern.cols()
                )));
            }
            if kern.data().iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig(format!("kernel {i} has non-finite entries")));
            }
        }
        Ok(Self { kernels, rectify })
    }

    /// Default 16-kernel bank: 8 oriented difference kernels plus 8
    /// seeded random kernels, all 3x3 and unit Frobenius norm.
    pub fn oriented_plus_random(seed: u64) -> Self {
        let mut kernels = Vec::with_capacity(16);
        let oriented: [[f64; 9]; 4] = [
            // horizontal gradient
            [-1.0, 0.0, 1.0, -1.0, 0.0, 1.0, -1.0, 0.0, 1.0],
            // vertical gradient
            [-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
            // main-diagonal gradient
            [0.0, 1.0, 1.0, -1.0, 0.0, 1.0, -1.0, -1.0, 0.0],
            // anti-diagonal gradient
            [1.0, 1.0, 0.0, 1.0, 0.0, -1.0, 0.0, -1.0, -1.0],
        ];
        for base in oriented {
            for sign in [1.0, -1.0] {
                let data: Vec<f64> = base.iter().map(|v| sign * v).collect();
                kernels.push(normalized_kernel(data));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let data: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
            kernels.push(normalized_kernel(data));
        }
        Self {
            kernels,
            rectify: true,
        }
    }

    pub fn num_kernels(&self) -> usize {
        self.kernels.len()
    }

    pub fn kernel_size(&self) -> usize {
        self.kernels[0].rows()
    }

    pub fn kernels(&self) -> &[Image<f64>] {
        &self.kernels
    }
}

fn normalized_kernel(data: Vec<f64>) -> Image<f64> {
    let norm = crate::mat::frob_norm(&data).max(f64::MIN_POSITIVE);
    Image::new(3, 3, data.iter().map(|v| v / norm).collect()).expect("3x3 kernel")
}

/// Channel-stacked feature maps, channel-major then row-major, all
/// entries non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl FeatureTensor {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::InvalidDimensions(
                "feature tensor dimensions must be positive".into(),
            ));
        }
        if data.len() != channels * height * width {
            return Err(Error::InvalidDimensions(format!(
                "tensor {channels}x{height}x{width} needs {} entries, got {}",
                channels * height * width,
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|v| **v < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "feature tensor must be non-negative, found {bad}"
            )));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// One channel as an image (copies).
    pub fn channel(&self, c: usize) -> Image<f64> {
        let hw = self.height * self.width;
        Image::new(
            self.height,
            self.width,
            self.data[c * hw..(c + 1) * hw].to_vec(),
        )
        .expect("channel slice")
    }
}

/// Valid cross-correlation with every kernel, then rectification.
///
/// Output spatial size is `(H - k + 1) x (W - k + 1)`.
pub fn extract_features(img: &Image<f64>, bank: &FilterBank) -> Result<FeatureTensor> {
    let k = bank.kernel_size();
    if k > img.rows() || k > img.cols() {
        return Err(Error::ShapeMismatch(format!(
            "kernel {k}x{k} larger than image {}x{}",
            img.rows(),
            img.cols()
        )));
    }
    if let Some(index) = img.first_negative() {
        return Err(Error::NegativeEntry {
            index,
            value: img[index],
        });
    }
    let oh = img.rows() - k + 1;
    let ow = img.cols() - k + 1;
    let mut data = Vec::with_capacity(bank.num_kernels() * oh * ow);
    for kern in bank.kernels() {
        for i in 0..oh {
            for j in 0..ow {
                let mut acc = 0.0;
                for u in 0..k {
                    for v in 0..k {
                        acc += kern.get(u, v) * img.get(i + u, j + v);
                    }
                }
                data.push(if bank.rectify { acc.max(0.0) } else { acc });
            }
        }
    }
    FeatureTensor::new(bank.num_kernels(), oh, ow, data)
}

/// One pooling operator with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoolMethod {
    Average,
    Maximum,
    Mixed { alpha: f64 },
    Stochastic,
    Maxfun { cfg: MaxfunConfig },
}

impl PoolMethod {
    fn pool_channel(&self, channel: &Image<f64>, grid: &PoolGrid) -> Result<Image<f64>> {
        let out = match self {
            PoolMethod::Average => pool_avg(channel, grid)?,
            PoolMethod::Maximum => pool_max(channel, grid)?,
            PoolMethod::Mixed { alpha } => pool_mixed(channel, grid, *alpha)?,
            PoolMethod::Stochastic => pool_stochastic(channel, grid)?,
            PoolMethod::Maxfun { cfg } => pool_maxfun(channel, grid, cfg)?,
        };
        Ok(out.values)
    }
}

/// Pool every channel independently and vectorize channel-major.
///
/// Output length is `channels * out_rows * out_cols`.
pub fn pool_tensor(t: &FeatureTensor, grid: &PoolGrid, method: &PoolMethod) -> Result<Vec<f64>> {
    if grid.input_rows != t.height() || grid.input_cols != t.width() {
        return Err(Error::ShapeMismatch(format!(
            "tensor spatial {}x{} vs grid {}x{}",
            t.height(),
            t.width(),
            grid.input_rows,
            grid.input_cols
        )));
    }
    let mut out = Vec::with_capacity(t.channels() * grid.out_rows * grid.out_cols);
    for c in 0..t.channels() {
        let pooled = method.pool_channel(&t.channel(c), grid)?;
        out.extend_from_slice(pooled.data());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pooling::make_grid;

    #[test]
    fn zero_image_gives_zero_tensor() {
        let bank = FilterBank::oriented_plus_random(1);
        let img = Image::zeros(10, 10);
        let t = extract_features(&img, &bank).unwrap();
        assert_eq!(t.channels(), 16);
        assert_eq!((t.height(), t.width()), (8, 8));
        assert!(t.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn delta_kernel_copies_interior() {
        let mut delta = vec![0.0; 9];
        delta[4] = 1.0;
        let bank = FilterBank::new(vec![Image::new(3, 3, delta).unwrap()], true).unwrap();
        let img = Image::from_fn(5, 6, |i, j| (i * 6 + j) as f64 * 0.01);
        let t = extract_features(&img, &bank).unwrap();
        for i in 0..3 {
            for j in 0..4 {
                let got = t.data()[i * 4 + j];
                assert!((got - img.get(i + 1, j + 1)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn vertical_step_fires_horizontal_gradient() {
        // step image: left half 0, right half 1
        let img = Image::from_fn(8, 8, |_, j| if j < 4 { 0.0 } else { 1.0 });
        let kern = Image::new(
            3,
            3,
            vec![-1.0, 0.0, 1.0, -1.0, 0.0, 1.0, -1.0, 0.0, 1.0],
        )
        .unwrap();
        let bank = FilterBank::new(vec![kern], true).unwrap();
        let t = extract_features(&img, &bank).unwrap();
        // output (i, j) sums X(., j+2) - X(., j): positive exactly when
        // the kernel straddles the step, i.e. j in {2, 3}
        for i in 0..6 {
            for j in 0..6 {
                let v = t.data()[i * 6 + j];
                if j == 2 || j == 3 {
                    assert!(v > 0.0, "expected response at {i},{j}");
                } else {
                    assert_eq!(v, 0.0, "expected rectified zero at {i},{j}");
                }
            }
        }
    }

    #[test]
    fn kernel_larger_than_image_rejected() {
        let bank = FilterBank::oriented_plus_random(0);
        let img = Image::zeros(2, 2);
        assert!(extract_features(&img, &bank).is_err());
    }

    #[test]
    fn constant_tensor_pools_constant_for_every_method() {
        let t = FeatureTensor::new(2, 6, 6, vec![1.5; 72]).unwrap();
        let grid = make_grid(6, 6, 3, 3).unwrap();
        let methods = [
            PoolMethod::Average,
            PoolMethod::Maximum,
            PoolMethod::Mixed { alpha: 0.4 },
            PoolMethod::Stochastic,
            PoolMethod::Maxfun {
                cfg: MaxfunConfig::centered(1, 1),
            },
            PoolMethod::Maxfun {
                cfg: MaxfunConfig::non_centered(1, 1),
            },
        ];
        for m in methods {
            let v = pool_tensor(&t, &grid, &m).unwrap();
            assert_eq!(v.len(), 2 * 4);
            assert!(v.iter().all(|&x| (x - 1.5).abs() < 1e-12), "{m:?}");
        }
    }

    #[test]
    fn channels_pool_as_concatenation() {
        let a = Image::from_fn(6, 6, |i, j| (i * j) as f64 * 0.1);
        let b = Image::from_fn(6, 6, |i, j| (i + 2 * j) as f64 * 0.2);
        let mut data = a.data().to_vec();
        data.extend_from_slice(b.data());
        let t = FeatureTensor::new(2, 6, 6, data).unwrap();
        let grid = make_grid(6, 6, 3, 3).unwrap();
        let method = PoolMethod::Maxfun {
            cfg: MaxfunConfig::centered(1, 1),
        };
        let joint = pool_tensor(&t, &grid, &method).unwrap();
        let single_a =
            pool_tensor(&FeatureTensor::new(1, 6, 6, a.data().to_vec()).unwrap(), &grid, &method)
                .unwrap();
        let single_b =
            pool_tensor(&FeatureTensor::new(1, 6, 6, b.data().to_vec()).unwrap(), &grid, &method)
                .unwrap();
        let concat: Vec<f64> = single_a.into_iter().chain(single_b).collect();
        assert_eq!(joint, concat);
    }

    #[test]
    fn pooled_length_contract() {
        let t = FeatureTensor::new(3, 10, 8, vec![0.25; 240]).unwrap();
        let grid = make_grid(10, 8, 3, 2).unwrap();
        let v = pool_tensor(&t, &grid, &PoolMethod::Average).unwrap();
        assert_eq!(v.len(), 3 * grid.out_rows * grid.out_cols);
    }

    #[test]
    fn tensor_rejects_negatives() {
        assert!(FeatureTensor::new(1, 2, 2, vec![0.0, 1.0, -0.1, 2.0]).is_err());
    }
}
