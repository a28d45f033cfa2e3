//! Optimal control and quantizer scheduling for LQG systems whose feedback
//! passes through a bank of noise quantizers.
//!
//! The control gains come from the usual Riccati recursion and do not depend
//! on the quantizers. Quantizer selection is handled separately, either as an
//! offline schedule or as a state-feedback rule on `[Δ_{t-1}; W_{t-1}]`.

pub mod error;
pub mod estimator;
pub mod gaussian;
pub mod instance;
pub mod linalg;
pub mod model;
pub mod noise;
pub mod oracle;
pub mod policy;
pub mod presets;
pub mod quantizer;
pub mod riccati;
pub mod rng;
pub mod schedule;
pub mod sim;

pub use error::{Error, Result};
pub use estimator::{advance_error, propagate_error_cov, EstimatorState};
pub use instance::Instance;
pub use model::SystemModel;
pub use noise::NoiseLaw;
pub use oracle::{brute_force_mdp, oracle_tree_size, OraclePolicy, PolicyNode, ORACLE_NODE_LIMIT};
pub use policy::{
    greedy_policy, mdp_state, rollout_policy, terminal_stage_direct, terminal_stage_policy,
    PolicyFlavor, RolloutKey, SelectionPolicy, StageDecision,
};
pub use quantizer::{
    build_quantizer, build_quantizer_with_law, channel_posterior_mean, grid_cells, BankSet, Cell,
    Quantizer, QuantizerBank, QuantizerSpec,
};
pub use riccati::{solve, solve_control_riccati, solve_selection_recursions, RiccatiSolution};
pub use schedule::{
    analytic_cost_decomposition, offline_schedule, offline_schedule_with_costs, schedule_scores,
    CostDecomposition, OfflineSchedule,
};
pub use sim::{
    default_betas, monte_carlo, monte_carlo_with_traces, pareto_sweep, simulate_run,
    simulate_run_with_gains, utilization, ExperimentResult, ParetoPoint, SimTrace,
};
