//! Bayesian persuasion under limited communication capacity.
//!
//! The crate computes channel capacities, the value of persuasion when the
//! sender's splitting is constrained by an information budget, exact payoffs
//! of small repeated games, and Monte-Carlo runs of the random-coding
//! construction that attains the constrained value.

pub mod error;
pub mod finite_game;
pub mod game;
pub mod grid;
pub mod info;
pub mod instances;
mod lp;
pub mod shannon;
pub mod solver;
pub mod splitting;

pub use error::{Error, Result};
pub use finite_game::{
    evaluate_strategy, random_search_lower_bound, receiver_posteriors, theorem1_upper_bound,
    EvaluationReport, GameInstance, SenderStrategy, TieMode,
};
pub use game::{
    best_optimal_action, cav_unconstrained, optimal_actions, robust_payoff, worst_action_radius,
    worst_optimal_action, PersuasionProblem,
};
pub use info::{
    capacity_upper_bound, channel_capacity, entropy, kl_divergence, make_bsc, make_perfect_channel, mutual_information,
    sequence_prob, Belief, Channel, Distribution, JointDistribution,
};
pub use solver::{
    cav_penalized, feasible_pair_oneshot, feasible_region_grid, posterior_count_reduce, value_dual,
    value_grid_lp, value_heterogeneous, ConstrainedValue, ConstraintFn, Entropy, SolverConfig,
};
pub use shannon::{
    decode, encode, is_jointly_typical, prepare_splitting, run_simulation, sample_codebook,
    stage_posteriors, Codebook, CodingParams, SimulationReport, TrialOutcome,
};
pub use splitting::{splitting_information, Splitting};
