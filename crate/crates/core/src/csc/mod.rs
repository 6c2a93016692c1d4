//! Convolutional sparse coding and the pooling stability guarantee.
//!
//! Dictionaries are circulant stacks of local filters; codes carry stripe
//! structure and the stripe-sparsity norm. Pursuit comes in two flavors,
//! a greedy matcher and an oracle-support least-squares solver, and the
//! stability harness feeds both through layered models with 1-D maxfun
//! pooling between layers.

mod code;
mod dict;
mod model;
mod pursuit;
mod stability;

pub use code::{gen_sparse_code, support_l0_inf, SparseCode};
pub use dict::{mutual_coherence, ConvDictionary};
pub use model::{dcpp_forward, DcppModel, DcppSolution, LayerSpec, Pool1dSpec, SolverSpec};
pub use pursuit::{pursuit_greedy, pursuit_greedy_outcome, pursuit_oracle, GreedyOutcome};
pub use stability::{
    check_preconditions, epsilon_recursion, sparsity_condition, synthesize_ground_truth,
    verify_stability, GroundTruth, LayerReport, MuConvention, SolverKind, StabilityReport,
    TrialConfig, STABILITY_SLACK,
};
