//! Convolutional dictionaries and mutual coherence.

use crate::error::{Error, Result};
use crate::mat::{dot, frob_norm, Matrix};
use crate::scalar::Float;

/// Global convolutional dictionary over signals of length `signal_len`.
///
/// Built by circularly shifting a `patch_len x num_filters` local matrix
/// through all `signal_len` positions, giving an
/// `signal_len x (signal_len * num_filters)` matrix whose column
/// `shift * num_filters + f` carries filter `f` placed at `shift` with
/// wraparound. Local filters are unit-normalized at construction, so every
/// column has unit Euclidean norm. The mutual coherence is computed once
/// and cached.
#[derive(Debug, Clone)]
pub struct ConvDictionary {
    signal_len: usize,
    patch_len: usize,
    num_filters: usize,
    local: Matrix<f64>,
    matrix: Matrix<f64>,
    mu: f64,
}

impl ConvDictionary {
    /// Build from a local filter matrix (`patch_len x num_filters`).
    pub fn build(local: &Matrix<f64>, signal_len: usize) -> Result<Self> {
        let patch_len = local.rows();
        let num_filters = local.cols();
        if patch_len > signal_len {
            return Err(Error::InvalidDimensions(format!(
                "patch length {patch_len} exceeds signal length {signal_len}"
            )));
        }
        let mut normalized = Vec::with_capacity(num_filters);
        for f in 0..num_filters {
            let col = local.col(f);
            let norm = frob_norm(col);
            if norm == 0.0 {
                return Err(Error::ZeroColumn(f));
            }
            normalized.push(col.iter().map(|v| v / norm).collect::<Vec<f64>>());
        }
        let local = Matrix::from_cols(patch_len, &normalized)?;

        let mut matrix = Matrix::zeros(signal_len, signal_len * num_filters);
        for shift in 0..signal_len {
            for f in 0..num_filters {
                let col = shift * num_filters + f;
                for t in 0..patch_len {
                    matrix.set((shift + t) % signal_len, col, local.get(t, f));
                }
            }
        }
        let mu = mutual_coherence(&matrix)?;
        Ok(Self {
            signal_len,
            patch_len,
            num_filters,
            local,
            matrix,
            mu,
        })
    }

    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    pub fn patch_len(&self) -> usize {
        self.patch_len
    }

    pub fn num_filters(&self) -> usize {
        self.num_filters
    }

    /// Number of columns, `signal_len * num_filters`.
    pub fn code_len(&self) -> usize {
        self.signal_len * self.num_filters
    }

    pub fn matrix(&self) -> &Matrix<f64> {
        &self.matrix
    }

    /// Normalized local filter matrix.
    pub fn local(&self) -> &Matrix<f64> {
        &self.local
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `D x` for a code vector `x`.
    pub fn apply(&self, code: &[f64]) -> Result<Vec<f64>> {
        self.matrix.matvec(code)
    }
}

/// Largest normalized inner product between distinct columns.
///
/// Exact maximum over all pairs; errors on a zero column. An orthogonal
/// matrix gives 0.
pub fn mutual_coherence<T: Float>(d: &Matrix<T>) -> Result<f64> {
    let cols = d.cols();
    let mut norms = Vec::with_capacity(cols);
    for j in 0..cols {
        let n = frob_norm(d.col(j));
        if n == T::zero() {
            return Err(Error::ZeroColumn(j));
        }
        norms.push(n);
    }
    let mut mu = 0.0f64;
    for i in 0..cols {
        for j in i + 1..cols {
            let c = (dot(d.col(i), d.col(j)).abs() / (norms[i] * norms[j]))
                .to_f64()
                .unwrap_or(f64::NAN);
            if c > mu {
                mu = c;
            }
        }
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_impulse_filter_gives_identity() {
        let local = Matrix::from_cols(1, &[vec![1.0]]).unwrap();
        let dict = ConvDictionary::build(&local, 3).unwrap();
        assert_eq!(dict.matrix(), &Matrix::identity(3));
        assert_eq!(dict.mu(), 0.0);
    }

    #[test]
    fn shifted_pair_filter_columns() {
        let local = Matrix::from_cols(2, &[vec![1.0, 1.0]]).unwrap();
        let dict = ConvDictionary::build(&local, 3).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        assert_eq!(dict.matrix().cols(), 3);
        let expect = [
            vec![s, s, 0.0],
            vec![0.0, s, s],
            vec![s, 0.0, s], // wraps around
        ];
        for (j, col) in expect.iter().enumerate() {
            assert_eq!(dict.matrix().col(j), col.as_slice());
        }
    }

    #[test]
    fn column_count_contract() {
        for (n0, m1, n) in [(2usize, 3usize, 7usize), (3, 1, 5), (1, 4, 6)] {
            let cols: Vec<Vec<f64>> = (0..m1)
                .map(|f| (0..n0).map(|t| (t + f + 1) as f64).collect())
                .collect();
            let local = Matrix::from_cols(n0, &cols).unwrap();
            let dict = ConvDictionary::build(&local, n).unwrap();
            assert_eq!(dict.matrix().cols(), n * m1);
            assert_eq!(dict.code_len(), n * m1);
        }
    }

    #[test]
    fn columns_are_unit_norm_and_match_explicit_shifting() {
        let local = Matrix::from_cols(3, &[vec![2.0, -1.0, 0.5], vec![0.0, 3.0, 1.0]]).unwrap();
        let dict = ConvDictionary::build(&local, 8).unwrap();
        for j in 0..dict.matrix().cols() {
            assert!((frob_norm(dict.matrix().col(j)) - 1.0).abs() < 1e-12);
        }
        // rebuild each column by placing the normalized filter by hand
        for shift in 0..8 {
            for f in 0..2 {
                let mut expect = vec![0.0; 8];
                for t in 0..3 {
                    expect[(shift + t) % 8] = dict.local().get(t, f);
                }
                assert_eq!(dict.matrix().col(shift * 2 + f), expect.as_slice());
            }
        }
    }

    #[test]
    fn build_rejects_bad_input() {
        let local = Matrix::from_cols(4, &[vec![1.0, 0.0, 0.0, 0.0]]).unwrap();
        assert!(ConvDictionary::build(&local, 3).is_err());
        let zero = Matrix::from_cols(2, &[vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            ConvDictionary::build(&zero, 4),
            Err(Error::ZeroColumn(0))
        ));
    }

    #[test]
    fn coherence_identity_is_zero() {
        assert_eq!(mutual_coherence(&Matrix::<f64>::identity(5)).unwrap(), 0.0);
    }

    #[test]
    fn coherence_known_pair() {
        let d = Matrix::from_cols(
            2,
            &[vec![1.0, 0.0], vec![1.0 / 2.0f64.sqrt(), 1.0 / 2.0f64.sqrt()]],
        )
        .unwrap();
        let mu = mutual_coherence(&d).unwrap();
        assert!((mu - 1.0 / 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn coherence_matches_bruteforce_on_random_matrix() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let cols: Vec<Vec<f64>> = (0..12)
            .map(|_| (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let d = Matrix::from_cols(8, &cols).unwrap();
        let mut brute = 0.0f64;
        for i in 0..12 {
            for j in 0..12 {
                if i == j {
                    continue;
                }
                let num: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
                let ni: f64 = cols[i].iter().map(|v| v * v).sum::<f64>().sqrt();
                let nj: f64 = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
                brute = brute.max((num / (ni * nj)).abs());
            }
        }
        assert!((mutual_coherence(&d).unwrap() - brute).abs() < 1e-14);
    }

    #[test]
    fn coherence_rejects_zero_column() {
        let d = Matrix::from_cols(2, &[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(mutual_coherence(&d), Err(Error::ZeroColumn(1))));
    }
}
