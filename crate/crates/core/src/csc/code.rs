//! Sparse codes, stripes, and the stripe-sparsity norm.

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Coefficient vector of a convolutional sparse code.
///
/// A code over `num_positions` shifts with `num_filters` local filters is
/// a vector of length `num_positions * num_filters`, block `j` holding the
/// filter coefficients at shift `j`. Stripe `j` is the group of
/// `2 * patch_len - 1` consecutive blocks starting at `j`, with circular
/// block indexing, and the stripe-sparsity norm is the maximum number of
/// nonzeros over all stripes. Zeros are exact: an entry counts as nonzero
/// iff it differs from `0.0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCode {
    values: Vec<f64>,
    patch_len: usize,
    num_filters: usize,
}

impl SparseCode {
    pub fn new(values: Vec<f64>, patch_len: usize, num_filters: usize) -> Result<Self> {
        if patch_len == 0 || num_filters == 0 {
            return Err(Error::InvalidDimensions(
                "patch length and filter count must be positive".into(),
            ));
        }
        if values.is_empty() || values.len() % num_filters != 0 {
            return Err(Error::InvalidDimensions(format!(
                "code length {} is not a positive multiple of {num_filters}",
                values.len()
            )));
        }
        Ok(Self {
            values,
            patch_len,
            num_filters,
        })
    }

    pub fn zeros(num_positions: usize, patch_len: usize, num_filters: usize) -> Self {
        Self {
            values: vec![0.0; num_positions * num_filters],
            patch_len,
            num_filters,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn patch_len(&self) -> usize {
        self.patch_len
    }

    pub fn num_filters(&self) -> usize {
        self.num_filters
    }

    /// Number of shift positions (blocks).
    pub fn num_positions(&self) -> usize {
        self.values.len() / self.num_filters
    }

    /// Indices of nonzero entries, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Number of nonzero entries.
    pub fn l0(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }

    /// Stripe `j`: the `2 * patch_len - 1` consecutive blocks starting at
    /// block `j`, circularly.
    pub fn stripe(&self, j: usize) -> Result<Vec<f64>> {
        let n = self.num_positions();
        if j >= n {
            return Err(Error::OutOfBounds(format!(
                "stripe index {j} out of range for {n} positions"
            )));
        }
        let blocks = 2 * self.patch_len - 1;
        let mut out = Vec::with_capacity(blocks * self.num_filters);
        for t in 0..blocks {
            let b = (j + t) % n;
            out.extend_from_slice(&self.values[b * self.num_filters..(b + 1) * self.num_filters]);
        }
        Ok(out)
    }

    /// Stripe-sparsity norm: max nonzero count over all stripes.
    pub fn l0_inf(&self) -> usize {
        let n = self.num_positions();
        let counts: Vec<usize> = (0..n)
            .map(|b| {
                self.values[b * self.num_filters..(b + 1) * self.num_filters]
                    .iter()
                    .filter(|v| **v != 0.0)
                    .count()
            })
            .collect();
        support_l0_inf_counts(&counts, self.patch_len)
    }
}

/// Stripe-sparsity of an index set over the same block structure.
pub fn support_l0_inf(
    support: &[usize],
    num_positions: usize,
    patch_len: usize,
    num_filters: usize,
) -> usize {
    let mut counts = vec![0usize; num_positions];
    for &idx in support {
        counts[idx / num_filters] += 1;
    }
    support_l0_inf_counts(&counts, patch_len)
}

fn support_l0_inf_counts(counts: &[usize], patch_len: usize) -> usize {
    let n = counts.len();
    let blocks = (2 * patch_len - 1).min(n);
    (0..n)
        .map(|j| (0..blocks).map(|t| counts[(j + t) % n]).sum::<usize>())
        .max()
        .unwrap_or(0)
}

/// Draw a random code with `l0_inf <= lambda`, deterministic in `seed`.
///
/// Positions are visited in seeded shuffled order and kept while the
/// stripe budget allows, so the result is maximal for that order; nonzero
/// magnitudes are uniform in `amp_range`. Pass a positive range when the
/// code will feed a pooling layer.
pub fn gen_sparse_code(
    seed: u64,
    num_positions: usize,
    patch_len: usize,
    num_filters: usize,
    lambda: usize,
    amp_range: (f64, f64),
) -> Result<SparseCode> {
    if lambda < 1 {
        return Err(Error::InvalidConfig(
            "sparsity bound lambda must be >= 1".into(),
        ));
    }
    if !(amp_range.0 <= amp_range.1) || !amp_range.0.is_finite() || !amp_range.1.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "invalid amplitude range {amp_range:?}"
        )));
    }
    let mut code = SparseCode::zeros(num_positions, patch_len, num_filters);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..num_positions * num_filters).collect();
    order.shuffle(&mut rng);

    let mut counts = vec![0usize; num_positions];
    let blocks = (2 * patch_len - 1).min(num_positions);
    for idx in order {
        let block = idx / num_filters;
        // stripes containing `block` are those starting within the
        // preceding `blocks - 1` positions (circularly)
        let fits = (0..blocks).all(|back| {
            let j = (block + num_positions - back) % num_positions;
            let stripe_count: usize = (0..blocks).map(|t| counts[(j + t) % num_positions]).sum();
            stripe_count + 1 <= lambda
        });
        if fits {
            counts[block] += 1;
            let amp = if amp_range.0 == amp_range.1 {
                amp_range.0
            } else {
                rng.gen_range(amp_range.0..amp_range.1)
            };
            code.values[idx] = amp;
        }
    }
    Ok(code)
}
