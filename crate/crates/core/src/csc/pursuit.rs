//! Sparse pursuit: oracle-support least squares and greedy matching.

use crate::csc::code::{support_l0_inf, SparseCode};
use crate::csc::dict::ConvDictionary;
use crate::error::{Error, Result};
use crate::mat::{dot, frob_norm};

/// Least squares `min ||y - A c||` over the listed dictionary columns,
/// via Householder QR. Errors when the restricted system is rank
/// deficient.
fn lstsq_cols(dict: &ConvDictionary, cols: &[usize], y: &[f64]) -> Result<Vec<f64>> {
    let n = dict.signal_len();
    let k = cols.len();
    debug_assert!(k <= n);
    // column-major working copy of the restricted matrix
    let mut a: Vec<Vec<f64>> = cols.iter().map(|&j| dict.matrix().col(j).to_vec()).collect();
    let mut rhs = y.to_vec();

    for step in 0..k {
        // Householder vector for column `step`, rows step..n
        let col = &a[step];
        let norm_x: f64 = col[step..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            return Err(Error::RankDeficient(format!(
                "column {} dependent on previous columns",
                cols[step]
            )));
        }
        let alpha = if col[step] >= 0.0 { -norm_x } else { norm_x };
        let mut v: Vec<f64> = col[step..].to_vec();
        v[0] -= alpha; // sign choice keeps v[0] away from cancellation
        let v_norm_sq: f64 = v.iter().map(|x| x * x).sum();
        // apply reflector to remaining columns and the rhs
        for target in a.iter_mut().skip(step) {
            reflect(&mut target[step..], &v, v_norm_sq);
        }
        reflect(&mut rhs[step..], &v, v_norm_sq);
        a[step][step] = alpha;
    }

    // back substitution on the k x k upper triangle
    let mut c = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = rhs[i];
        for j in i + 1..k {
            s -= a[j][i] * c[j];
        }
        let diag = a[i][i];
        if diag.abs() < 1e-13 * (1.0 + frob_norm(y)) {
            return Err(Error::RankDeficient(format!(
                "negligible pivot at column {}",
                cols[i]
            )));
        }
        c[i] = s / diag;
    }
    Ok(c)
}

#[inline]
fn reflect(target: &mut [f64], v: &[f64], v_norm_sq: f64) {
    let proj: f64 = target.iter().zip(v).map(|(t, w)| t * w).sum();
    let scale = 2.0 * proj / v_norm_sq;
    for (t, w) in target.iter_mut().zip(v) {
        *t -= scale * w;
    }
}

/// Least squares restricted to a known support.
///
/// Returns the code supported on `support` minimizing `||y - D code||`.
/// An empty support yields the zero code. Duplicate indices are folded.
pub fn pursuit_oracle(
    dict: &ConvDictionary,
    y: &[f64],
    support: &[usize],
) -> Result<SparseCode> {
    if y.len() != dict.signal_len() {
        return Err(Error::ShapeMismatch(format!(
            "signal length {} vs dictionary rows {}",
            y.len(),
            dict.signal_len()
        )));
    }
    let mut cols: Vec<usize> = support.to_vec();
    cols.sort_unstable();
    cols.dedup();
    if let Some(&bad) = cols.iter().find(|&&j| j >= dict.code_len()) {
        return Err(Error::OutOfBounds(format!(
            "support index {bad} out of range for {} columns",
            dict.code_len()
        )));
    }
    if cols.is_empty() {
        return Ok(SparseCode::zeros(
            dict.signal_len(),
            dict.patch_len(),
            dict.num_filters(),
        ));
    }
    let coeffs = lstsq_cols(dict, &cols, y)?;
    let mut values = vec![0.0; dict.code_len()];
    for (&j, &c) in cols.iter().zip(&coeffs) {
        values[j] = c;
    }
    SparseCode::new(values, dict.patch_len(), dict.num_filters())
}

/// Result of a greedy pursuit run, feasible or not.
#[derive(Debug, Clone)]
pub struct GreedyOutcome {
    /// Best code found; `l0_inf <= lambda` always holds.
    pub code: SparseCode,
    /// Final residual norm `||y - D code||`.
    pub residual: f64,
    /// Whether the residual budget was met.
    pub feasible: bool,
}

/// Greedy orthogonal matching with a stripe-sparsity stopping rule.
///
/// Atoms are added by largest absolute correlation with the residual,
/// skipping any whose addition would push the support's stripe sparsity
/// past `lambda`; coefficients are re-fit by least squares after every
/// addition. Stops as soon as the residual drops to `eps`, or when no
/// admissible atom improves the fit.
pub fn pursuit_greedy_outcome(
    dict: &ConvDictionary,
    y: &[f64],
    lambda: usize,
    eps: f64,
) -> Result<GreedyOutcome> {
    if y.len() != dict.signal_len() {
        return Err(Error::ShapeMismatch(format!(
            "signal length {} vs dictionary rows {}",
            y.len(),
            dict.signal_len()
        )));
    }
    if eps < 0.0 {
        return Err(Error::InvalidConfig("eps must be non-negative".into()));
    }
    if lambda < 1 {
        return Err(Error::InvalidConfig("lambda must be >= 1".into()));
    }

    let n = dict.signal_len();
    let corr_floor = 1e-12 * (1.0 + frob_norm(y));
    let mut selected: Vec<usize> = Vec::new();
    let mut code = SparseCode::zeros(n, dict.patch_len(), dict.num_filters());
    let mut residual = y.to_vec();
    let mut res_norm = frob_norm(&residual);

    while res_norm > eps && selected.len() < n {
        // best admissible atom by |correlation|
        let mut best: Option<(usize, f64)> = None;
        for j in 0..dict.code_len() {
            if selected.contains(&j) {
                continue;
            }
            let c = dot(dict.matrix().col(j), &residual).abs();
            if best.map_or(true, |(_, bc)| c > bc) {
                let mut trial = selected.clone();
                trial.push(j);
                if support_l0_inf(&trial, n, dict.patch_len(), dict.num_filters()) <= lambda {
                    best = Some((j, c));
                }
            }
        }
        let Some((j, c)) = best else { break };
        if c <= corr_floor {
            break;
        }
        selected.push(j);
        selected.sort_unstable();
        let coeffs = lstsq_cols(dict, &selected, y)?;
        let mut values = vec![0.0; dict.code_len()];
        for (&idx, &v) in selected.iter().zip(&coeffs) {
            values[idx] = v;
        }
        code = SparseCode::new(values, dict.patch_len(), dict.num_filters())?;
        let approx = dict.apply(code.values())?;
        for (r, (&yi, &ai)) in residual.iter_mut().zip(y.iter().zip(&approx)) {
            *r = yi - ai;
        }
        res_norm = frob_norm(&residual);
    }

    Ok(GreedyOutcome {
        code,
        residual: res_norm,
        feasible: res_norm <= eps,
    })
}

/// As [`pursuit_greedy_outcome`], but infeasibility is an error.
pub fn pursuit_greedy(
    dict: &ConvDictionary,
    y: &[f64],
    lambda: usize,
    eps: f64,
) -> Result<SparseCode> {
    let outcome = pursuit_greedy_outcome(dict, y, lambda, eps)?;
    if !outcome.feasible {
        return Err(Error::PursuitInfeasible {
            layer: None,
            residual: outcome.residual,
            budget: eps,
        });
    }
    Ok(outcome.code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csc::code::gen_sparse_code;
    use crate::mat::{dist_sq, Matrix};

    fn test_dict(n: usize) -> ConvDictionary {
        let local = Matrix::from_cols(2, &[vec![1.0, 0.15]]).unwrap();
        ConvDictionary::build(&local, n).unwrap()
    }

    #[test]
    fn greedy_recovers_single_scaled_atom() {
        let dict = test_dict(12);
        let y: Vec<f64> = dict.matrix().col(7).iter().map(|v| 5.0 * v).collect();
        let code = pursuit_greedy(&dict, &y, 1, 1e-9).unwrap();
        assert_eq!(code.support(), vec![7]);
        assert!((code.values()[7] - 5.0).abs() < 1e-10);
    }

    #[test]
    fn greedy_zero_signal_gives_zero_code() {
        let dict = test_dict(8);
        let code = pursuit_greedy(&dict, &vec![0.0; 8], 1, 0.0).unwrap();
        assert!(code.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn greedy_recovers_sparse_support_noiselessly() {
        let dict = test_dict(16);
        for seed in 0..20 {
            let truth = gen_sparse_code(seed, 16, 2, 1, 1, (1.0, 2.0)).unwrap();
            let y = dict.apply(truth.values()).unwrap();
            let got = pursuit_greedy(&dict, &y, 1, 1e-8).unwrap();
            assert_eq!(got.support(), truth.support(), "seed {seed}");
            assert!(dist_sq(got.values(), truth.values()).sqrt() < 1e-8);
        }
    }

    #[test]
    fn greedy_reports_infeasible_budget() {
        let dict = test_dict(12);
        // sum of many atoms cannot be matched by a single stripe-sparse one
        let y: Vec<f64> = vec![1.0; 12];
        let err = pursuit_greedy(&dict, &y, 1, 1e-12).unwrap_err();
        assert!(matches!(err, Error::PursuitInfeasible { .. }));
        let outcome = pursuit_greedy_outcome(&dict, &y, 1, 1e-12).unwrap();
        assert!(!outcome.feasible);
        assert!(outcome.code.l0_inf() <= 1);
    }

    #[test]
    fn oracle_interpolates_noiseless_data() {
        let dict = test_dict(16);
        let truth = gen_sparse_code(3, 16, 2, 1, 2, (0.5, 1.5)).unwrap();
        let y = dict.apply(truth.values()).unwrap();
        let got = pursuit_oracle(&dict, &y, &truth.support()).unwrap();
        assert!(dist_sq(got.values(), truth.values()).sqrt() < 1e-10);
    }

    #[test]
    fn oracle_is_least_squares_optimal_under_noise() {
        let dict = test_dict(16);
        let truth = gen_sparse_code(11, 16, 2, 1, 1, (1.0, 2.0)).unwrap();
        let clean = dict.apply(truth.values()).unwrap();
        let noise: Vec<f64> = (0..16).map(|i| 0.01 * ((i * 7 % 5) as f64 - 2.0)).collect();
        let y: Vec<f64> = clean.iter().zip(&noise).map(|(c, e)| c + e).collect();
        let got = pursuit_oracle(&dict, &y, &truth.support()).unwrap();
        let fit = dict.apply(got.values()).unwrap();
        let res = dist_sq(&y, &fit).sqrt();
        assert!(res <= frob_norm(&noise) + 1e-12);
        assert!(got.l0_inf() <= truth.l0_inf());
    }

    #[test]
    fn oracle_single_column_is_projection() {
        let dict = test_dict(10);
        let y: Vec<f64> = (0..10).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let got = pursuit_oracle(&dict, &y, &[4]).unwrap();
        // unit-norm column: coefficient is <d, y>
        let expect = dot(dict.matrix().col(4), &y);
        assert!((got.values()[4] - expect).abs() < 1e-12);
    }

    #[test]
    fn oracle_empty_support_is_zero_code() {
        let dict = test_dict(6);
        let got = pursuit_oracle(&dict, &vec![1.0; 6], &[]).unwrap();
        assert!(got.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn oracle_rejects_rank_deficient_support() {
        // duplicate column pair from a length-1 patch with two equal filters
        let local = Matrix::from_cols(1, &[vec![1.0], vec![2.0]]).unwrap();
        let dict = ConvDictionary::build(&local, 4).unwrap();
        // columns 0 and 1 are both e_0 after normalization
        let err = pursuit_oracle(&dict, &[1.0, 0.0, 0.0, 0.0], &[0, 1]).unwrap_err();
        assert!(matches!(err, Error::RankDeficient(_)));
    }
}
