//! Layered coding models with pooling between layers.

use crate::csc::code::SparseCode;
use crate::csc::dict::ConvDictionary;
use crate::csc::pursuit::{pursuit_greedy_outcome, pursuit_oracle};
use crate::error::{Error, Result};
use crate::pooling::{make_grid_1d, pool_maxfun_1d, MaxfunConfig, PoolGrid1d};

/// 1-D maxfun pooling parameters applied to one layer's code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pool1dSpec {
    pub window: usize,
    pub stride: usize,
    pub cfg: MaxfunConfig,
}

impl Pool1dSpec {
    pub fn grid(&self, input_len: usize) -> Result<PoolGrid1d> {
        let g = make_grid_1d(input_len, self.window, self.stride)?;
        self.cfg.validate(self.window)?;
        Ok(g)
    }

    pub fn out_len(&self, input_len: usize) -> Result<usize> {
        Ok(self.grid(input_len)?.out_len)
    }
}

/// One layer: dictionary, pooling, stripe-sparsity bound, residual budget.
#[derive(Debug, Clone)]
pub struct LayerSpec {
    pub dict: ConvDictionary,
    pub pool: Pool1dSpec,
    pub lambda: usize,
    pub eps: f64,
}

impl LayerSpec {
    /// Pooled output length: pooled positions times filter channels.
    pub fn pooled_len(&self) -> Result<usize> {
        Ok(self.pool.out_len(self.dict.signal_len())? * self.dict.num_filters())
    }

    /// Pool this layer's code along its spatial axis, per channel.
    pub fn pool_code(&self, code: &SparseCode) -> Result<Vec<f64>> {
        let grid = self.pool.grid(self.dict.signal_len())?;
        pool_maxfun_1d(code.values(), self.dict.num_filters(), &grid, &self.pool.cfg)
    }
}

/// Ordered layers; layer `i`'s signal is layer `i - 1`'s pooled output.
#[derive(Debug, Clone)]
pub struct DcppModel {
    layers: Vec<LayerSpec>,
}

impl DcppModel {
    pub fn new(layers: Vec<LayerSpec>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidConfig("model needs at least one layer".into()));
        }
        for i in 0..layers.len() {
            if layers[i].lambda < 1 {
                return Err(Error::InvalidConfig(format!(
                    "layer {i}: lambda must be >= 1"
                )));
            }
            if layers[i].eps < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "layer {i}: eps must be non-negative"
                )));
            }
            // validates window/stride/radius against this layer's length
            let pooled = layers[i]
                .pooled_len()
                .map_err(|e| layer_err(i, e))?;
            if i + 1 < layers.len() {
                let next = layers[i + 1].dict.signal_len();
                if pooled != next {
                    return Err(Error::InvalidConfig(format!(
                        "layer {} expects signal length {next}, but layer {i} pools to {pooled}",
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// Copy of the model with per-layer residual budgets replaced.
    pub fn with_budgets(&self, budgets: &[f64]) -> Result<Self> {
        if budgets.len() != self.layers.len() {
            return Err(Error::InvalidConfig(format!(
                "{} budgets for {} layers",
                budgets.len(),
                self.layers.len()
            )));
        }
        let mut layers = self.layers.clone();
        for (layer, &b) in layers.iter_mut().zip(budgets) {
            layer.eps = b;
        }
        Self::new(layers)
    }
}

/// Which pursuit the forward pass runs at every layer.
#[derive(Debug, Clone)]
pub enum SolverSpec {
    /// Least squares restricted to a known per-layer support.
    Oracle { supports: Vec<Vec<usize>> },
    /// Greedy matching against each layer's `eps` budget.
    Greedy,
}

/// Codes and pooled maps produced by a forward solve.
#[derive(Debug, Clone)]
pub struct DcppSolution {
    pub codes: Vec<SparseCode>,
    pub pooled: Vec<Vec<f64>>,
    /// Residual norm of each layer's pursuit subproblem.
    pub residuals: Vec<f64>,
    /// Whether each layer met its residual budget (always true for the
    /// oracle solver, which has no budget).
    pub feasible: Vec<bool>,
}

fn layer_err(layer: usize, source: Error) -> Error {
    Error::LayerFailure {
        layer,
        source: Box::new(source),
    }
}

/// Solve the layered pursuit: each layer fits the previous pooled output
/// (the raw input for layer 0), then pools its own code.
///
/// Greedy budget misses are recorded in `feasible` and the chain
/// continues with the best-effort code; structural failures (shape or
/// rank problems, negative code entries reaching the pooling stage)
/// abort with the offending layer index.
pub fn dcpp_forward(
    input: &[f64],
    model: &DcppModel,
    solver: &SolverSpec,
) -> Result<DcppSolution> {
    if let SolverSpec::Oracle { supports } = solver {
        if supports.len() != model.len() {
            return Err(Error::InvalidConfig(format!(
                "{} oracle supports for {} layers",
                supports.len(),
                model.len()
            )));
        }
    }

    let mut codes = Vec::with_capacity(model.len());
    let mut pooled: Vec<Vec<f64>> = Vec::with_capacity(model.len());
    let mut residuals = Vec::with_capacity(model.len());
    let mut feasible = Vec::with_capacity(model.len());

    for (i, layer) in model.layers().iter().enumerate() {
        let signal: &[f64] = if i == 0 { input } else { &pooled[i - 1] };
        let (code, residual, ok) = match solver {
            SolverSpec::Oracle { supports } => {
                let code =
                    pursuit_oracle(&layer.dict, signal, &supports[i]).map_err(|e| layer_err(i, e))?;
                let fit = layer.dict.apply(code.values()).map_err(|e| layer_err(i, e))?;
                let residual = crate::mat::dist_sq(signal, &fit).sqrt();
                (code, residual, true)
            }
            SolverSpec::Greedy => {
                let outcome = pursuit_greedy_outcome(&layer.dict, signal, layer.lambda, layer.eps)
                    .map_err(|e| layer_err(i, e))?;
                (outcome.code, outcome.residual, outcome.feasible)
            }
        };
        let p = layer.pool_code(&code).map_err(|e| layer_err(i, e))?;
        codes.push(code);
        pooled.push(p);
        residuals.push(residual);
        feasible.push(ok);
    }

    Ok(DcppSolution {
        codes,
        pooled,
        residuals,
        feasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::Matrix;

    fn identity_dict(n: usize) -> ConvDictionary {
        let local = Matrix::from_cols(1, &[vec![1.0]]).unwrap();
        ConvDictionary::build(&local, n).unwrap()
    }

    #[test]
    fn degenerate_pooling_is_channelwise_mean() {
        // one layer, identity dictionary, single full-width window with
        // r_min = b and 2b + 1 = window: maxfun collapses to the mean
        let n = 9;
        let model = DcppModel::new(vec![LayerSpec {
            dict: identity_dict(n),
            pool: Pool1dSpec {
                window: n,
                stride: n,
                cfg: MaxfunConfig::centered(4, 4),
            },
            lambda: n,
            eps: 1e-9,
        }])
        .unwrap();
        let input: Vec<f64> = (0..n).map(|i| (i + 1) as f64).collect();
        let support: Vec<usize> = (0..n).collect();
        let sol = dcpp_forward(&input, &model, &SolverSpec::Oracle { supports: vec![support] })
            .unwrap();
        let mean = input.iter().sum::<f64>() / n as f64;
        assert_eq!(sol.pooled[0].len(), 1);
        assert!((sol.pooled[0][0] - mean).abs() < 1e-12);
    }

    #[test]
    fn zero_input_zero_chain() {
        let n = 10;
        let model = DcppModel::new(vec![LayerSpec {
            dict: identity_dict(n),
            pool: Pool1dSpec {
                window: 5,
                stride: 5,
                cfg: MaxfunConfig::centered(1, 2),
            },
            lambda: 1,
            eps: 0.0,
        }])
        .unwrap();
        let sol = dcpp_forward(&vec![0.0; n], &model, &SolverSpec::Greedy).unwrap();
        assert!(sol.codes[0].values().iter().all(|&v| v == 0.0));
        assert!(sol.pooled[0].iter().all(|&v| v == 0.0));
        assert!(sol.feasible[0]);
        assert_eq!(sol.residuals[0], 0.0);
    }

    #[test]
    fn shapes_chain_through_layers() {
        let n = 20;
        let l1 = LayerSpec {
            dict: identity_dict(n),
            pool: Pool1dSpec {
                window: 5,
                stride: 5,
                cfg: MaxfunConfig::centered(1, 2),
            },
            lambda: 2,
            eps: 1e-6,
        };
        let l2 = LayerSpec {
            dict: identity_dict(4),
            pool: Pool1dSpec {
                window: 3,
                stride: 3,
                cfg: MaxfunConfig::centered(1, 1),
            },
            lambda: 2,
            eps: 1e-6,
        };
        let model = DcppModel::new(vec![l1, l2]).unwrap();
        let input: Vec<f64> = (0..n).map(|i| (i % 3) as f64 * 0.5).collect();
        let supports = vec![(0..n).collect::<Vec<_>>(), (0..4).collect::<Vec<_>>()];
        let sol = dcpp_forward(&input, &model, &SolverSpec::Oracle { supports }).unwrap();
        assert_eq!(sol.codes[0].values().len(), 20);
        assert_eq!(sol.pooled[0].len(), 4);
        assert_eq!(sol.codes[1].values().len(), 4);
        assert_eq!(sol.pooled[1].len(), 1);
    }

    #[test]
    fn mismatched_chain_rejected() {
        let l1 = LayerSpec {
            dict: identity_dict(20),
            pool: Pool1dSpec {
                window: 5,
                stride: 5,
                cfg: MaxfunConfig::centered(1, 2),
            },
            lambda: 1,
            eps: 0.0,
        };
        let l2 = LayerSpec {
            dict: identity_dict(7), // should be 4
            pool: Pool1dSpec {
                window: 3,
                stride: 3,
                cfg: MaxfunConfig::centered(1, 1),
            },
            lambda: 1,
            eps: 0.0,
        };
        assert!(DcppModel::new(vec![l1, l2]).is_err());
    }

    #[test]
    fn solver_failure_carries_layer_index() {
        let n = 10;
        let model = DcppModel::new(vec![LayerSpec {
            dict: identity_dict(n),
            pool: Pool1dSpec {
                window: 5,
                stride: 5,
                cfg: MaxfunConfig::centered(1, 2),
            },
            lambda: 1,
            eps: 0.0,
        }])
        .unwrap();
        // oracle support out of range -> layer failure at index 0
        let bad = SolverSpec::Oracle {
            supports: vec![vec![99]],
        };
        let err = dcpp_forward(&vec![0.0; n], &model, &bad).unwrap_err();
        assert!(matches!(err, Error::LayerFailure { layer: 0, .. }));
    }
}
