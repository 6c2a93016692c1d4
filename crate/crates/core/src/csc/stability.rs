//! Empirical verification of the layered stability guarantee.
//!
//! A trial synthesizes a ground-truth chain that satisfies the layered
//! pooling model exactly (to rounding), perturbs the bottom signal with
//! spherical noise of a prescribed norm, re-solves the noisy problem, and
//! checks per layer that
//!
//! ```text
//! ||P_i* - P^_i||^2  <=  ||G_i* - G^_i||^2  <=  eps_i^2
//! ```
//!
//! where the `eps_i^2` follow the recursion
//! `eps_i^2 = 4 eps_{i-1}^2 / (1 - (2 lambda_i - 1) mu_i)`.

use crate::csc::code::{gen_sparse_code, SparseCode};
use crate::csc::model::{dcpp_forward, DcppModel, SolverSpec};
use crate::error::{Error, Result};
use crate::mat::{dist_sq, frob_norm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `lambda < (1 + 1/mu) / 2`; orthogonal dictionaries (`mu = 0`) always
/// satisfy it.
pub fn sparsity_condition(lambda: usize, mu: f64) -> bool {
    if mu == 0.0 {
        return true;
    }
    (lambda as f64) < 0.5 * (1.0 + 1.0 / mu)
}

/// Squared error budgets `[eps_1^2, ..., eps_L^2]` from the recursion.
///
/// Errors when some layer's denominator `1 - (2 lambda_i - 1) mu_i` is not
/// positive, i.e. the sparsity condition fails.
pub fn epsilon_recursion(eps0: f64, lambdas: &[usize], mus: &[f64]) -> Result<Vec<f64>> {
    if lambdas.len() != mus.len() {
        return Err(Error::InvalidConfig(format!(
            "{} lambdas vs {} coherence values",
            lambdas.len(),
            mus.len()
        )));
    }
    let mut out = Vec::with_capacity(lambdas.len());
    let mut prev_sq = eps0 * eps0;
    for (i, (&lambda, &mu)) in lambdas.iter().zip(mus).enumerate() {
        let denom = 1.0 - (2.0 * lambda as f64 - 1.0) * mu;
        if denom <= 0.0 {
            return Err(Error::SparsityCondition {
                layer: i,
                lambda: lambda as f64,
                mu,
                bound: 0.5 * (1.0 + 1.0 / mu),
            });
        }
        let eps_sq = 4.0 * prev_sq / denom;
        out.push(eps_sq);
        prev_sq = eps_sq;
    }
    Ok(out)
}

/// Which coherence enters the recursion denominator: each layer's own, or
/// the first layer's for every level (the literal reading of the
/// statement).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MuConvention {
    #[default]
    PerLayer,
    FirstLayer,
}

/// Pursuit used when re-solving the noisy problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Oracle,
    Greedy,
}

/// Exactly-consistent ground truth for one trial.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub codes: Vec<SparseCode>,
    pub pooled: Vec<Vec<f64>>,
    /// Bottom signal `D_1 G_1*`.
    pub signal: Vec<f64>,
}

/// Synthesize a chain satisfying the pooling model, top-down.
///
/// The top layer's code is drawn by [`gen_sparse_code`]; each lower
/// pooled map is defined as the next dictionary applied to its code, and
/// is un-pooled into a spike code: pooled value `p` of window `k` becomes
/// a spike of `p * (2 r_min + 1)` at the window center, which centered
/// maxfun pools back to `p`. This needs centered pooling over disjoint
/// windows and non-negative pooled targets (e.g. non-negative upper-layer
/// dictionaries with positive amplitudes).
pub fn synthesize_ground_truth(
    model: &DcppModel,
    seed: u64,
    amp_range: (f64, f64),
) -> Result<GroundTruth> {
    let layers = model.layers();
    let l = layers.len();
    for (i, layer) in layers.iter().enumerate() {
        if !layer.pool.cfg.centered || layer.pool.window != layer.pool.stride {
            return Err(Error::InvalidConfig(format!(
                "layer {i}: ground-truth synthesis needs centered pooling with stride = window"
            )));
        }
    }

    let mut codes: Vec<Option<SparseCode>> = vec![None; l];
    let top = &layers[l - 1];
    codes[l - 1] = Some(gen_sparse_code(
        seed,
        top.dict.signal_len(),
        top.dict.patch_len(),
        top.dict.num_filters(),
        top.lambda,
        amp_range,
    )?);

    for i in (0..l - 1).rev() {
        let upper_code = codes[i + 1].as_ref().unwrap();
        let target = layers[i + 1].dict.apply(upper_code.values())?;
        codes[i] = Some(unpool_spikes(&target, &layers[i], i)?);
    }

    let codes: Vec<SparseCode> = codes.into_iter().map(Option::unwrap).collect();
    for (i, (layer, code)) in layers.iter().zip(&codes).enumerate() {
        let sparsity = code.l0_inf();
        if sparsity > layer.lambda {
            return Err(Error::InvalidConfig(format!(
                "layer {i}: synthesized code has stripe sparsity {sparsity} > lambda {}; \
                 widen the stride or relax lambda",
                layer.lambda
            )));
        }
    }

    let mut pooled = Vec::with_capacity(l);
    for (layer, code) in layers.iter().zip(&codes) {
        pooled.push(layer.pool_code(code)?);
    }
    let signal = layers[0].dict.apply(codes[0].values())?;
    Ok(GroundTruth {
        codes,
        pooled,
        signal,
    })
}

/// Invert centered maxfun pooling by planting one spike per window.
fn unpool_spikes(target: &[f64], layer: &crate::csc::model::LayerSpec, index: usize) -> Result<SparseCode> {
    let channels = layer.dict.num_filters();
    let grid = layer.pool.grid(layer.dict.signal_len())?;
    if target.len() != grid.out_len * channels {
        return Err(Error::ShapeMismatch(format!(
            "layer {index}: pooled target length {} vs {} windows x {channels} channels",
            target.len(),
            grid.out_len
        )));
    }
    if let Some(&bad) = target.iter().find(|v| **v < 0.0) {
        return Err(Error::InvalidConfig(format!(
            "layer {index}: pooled target has negative entry {bad}; \
             use non-negative dictionaries above this layer"
        )));
    }
    let gain = (2 * layer.pool.cfg.r_min + 1) as f64;
    let mut values = vec![0.0; layer.dict.code_len()];
    for k in 0..grid.out_len {
        let center = grid.center(k);
        for ch in 0..channels {
            let p = target[k * channels + ch];
            if p != 0.0 {
                values[center * channels + ch] = p * gain;
            }
        }
    }
    SparseCode::new(values, layer.dict.patch_len(), layer.dict.num_filters())
}

/// Per-layer outcome of one stability trial.
#[derive(Debug, Clone)]
pub struct LayerReport {
    pub layer: usize,
    pub mu: f64,
    pub lambda: usize,
    pub eps_sq: f64,
    pub code_dev_sq: f64,
    pub pool_dev_sq: f64,
    pub pass: bool,
}

/// One trial's full record.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub seed: u64,
    pub noise_norm: f64,
    pub layers: Vec<LayerReport>,
}

/// Floating-point slack admitted on both squared-norm inequalities.
pub const STABILITY_SLACK: f64 = 1e-9;

impl StabilityReport {
    pub fn all_pass(&self) -> bool {
        self.layers.iter().all(|l| l.pass)
    }

    pub fn csv_header() -> &'static str {
        "seed,layer,mu,lambda,eps_sq,code_dev_sq,pool_dev_sq,pass"
    }

    /// One CSV row per layer, matching [`Self::csv_header`].
    pub fn csv_rows(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for l in &self.layers {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.seed, l.layer, l.mu, l.lambda, l.eps_sq, l.code_dev_sq, l.pool_dev_sq, l.pass
            )
            .expect("string write");
        }
        out
    }
}

/// Configuration of a single stability trial.
#[derive(Debug, Clone, Copy)]
pub struct TrialConfig {
    pub seed: u64,
    pub eps0: f64,
    pub solver: SolverKind,
    pub mu_convention: MuConvention,
    /// Amplitude range for the top layer's generated code.
    pub amp_range: (f64, f64),
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            eps0: 0.05,
            solver: SolverKind::Oracle,
            mu_convention: MuConvention::PerLayer,
            amp_range: (1.0, 2.0),
        }
    }
}

/// Check every layer's sparsity condition up front.
pub fn check_preconditions(model: &DcppModel) -> Result<()> {
    for (i, layer) in model.layers().iter().enumerate() {
        let mu = layer.dict.mu();
        if !sparsity_condition(layer.lambda, mu) {
            return Err(Error::SparsityCondition {
                layer: i,
                lambda: layer.lambda as f64,
                mu,
                bound: 0.5 * (1.0 + 1.0 / mu),
            });
        }
    }
    Ok(())
}

/// Run one stability trial and evaluate both inequalities per layer.
pub fn verify_stability(model: &DcppModel, trial: &TrialConfig) -> Result<StabilityReport> {
    check_preconditions(model)?;
    if trial.eps0 < 0.0 {
        return Err(Error::InvalidConfig("eps0 must be non-negative".into()));
    }

    let truth = synthesize_ground_truth(model, trial.seed, trial.amp_range)?;

    // noise of norm exactly eps0, spherically uniform
    let mut rng = ChaCha8Rng::seed_from_u64(trial.seed);
    rng.set_stream(0xE);
    let noise = sphere_sample(&mut rng, truth.signal.len(), trial.eps0);
    let noise_norm = frob_norm(&noise);
    let noisy: Vec<f64> = truth.signal.iter().zip(&noise).map(|(x, e)| x + e).collect();

    // budgets: layer i solves at the previous layer's deviation level,
    // which is eps_{i-1} (eps0 for the first layer)
    let lambdas: Vec<usize> = model.layers().iter().map(|l| l.lambda).collect();
    let mus: Vec<f64> = match trial.mu_convention {
        MuConvention::PerLayer => model.layers().iter().map(|l| l.dict.mu()).collect(),
        MuConvention::FirstLayer => {
            vec![model.layers()[0].dict.mu(); model.len()]
        }
    };
    let eps_sq = epsilon_recursion(trial.eps0, &lambdas, &mus)?;
    let mut budgets = Vec::with_capacity(model.len());
    budgets.push(trial.eps0);
    for i in 1..model.len() {
        budgets.push(eps_sq[i - 1].sqrt());
    }
    let budgeted = model.with_budgets(&budgets)?;

    let solver = match trial.solver {
        SolverKind::Oracle => SolverSpec::Oracle {
            supports: truth.codes.iter().map(|c| c.support()).collect(),
        },
        SolverKind::Greedy => SolverSpec::Greedy,
    };
    let solution = dcpp_forward(&noisy, &budgeted, &solver)?;

    let mut layers = Vec::with_capacity(model.len());
    for i in 0..model.len() {
        let code_dev_sq = dist_sq(truth.codes[i].values(), solution.codes[i].values());
        let pool_dev_sq = dist_sq(&truth.pooled[i], &solution.pooled[i]);
        let pass = pool_dev_sq <= code_dev_sq + STABILITY_SLACK
            && code_dev_sq <= eps_sq[i] + STABILITY_SLACK;
        layers.push(LayerReport {
            layer: i,
            mu: mus[i],
            lambda: lambdas[i],
            eps_sq: eps_sq[i],
            code_dev_sq,
            pool_dev_sq,
            pass,
        });
    }
    Ok(StabilityReport {
        seed: trial.seed,
        noise_norm,
        layers,
    })
}

/// Gaussian direction scaled to the given norm; zero norm gives zero.
fn sphere_sample(rng: &mut ChaCha8Rng, len: usize, norm: f64) -> Vec<f64> {
    if norm == 0.0 {
        return vec![0.0; len];
    }
    loop {
        let v: Vec<f64> = (0..len).map(|_| standard_normal(rng)).collect();
        let n = frob_norm(&v);
        if n > 1e-12 {
            return v.iter().map(|x| x * norm / n).collect();
        }
    }
}

/// Box-Muller standard normal draw.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
