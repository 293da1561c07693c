//! Small reference problems used in examples and tests.

use crate::game::PersuasionProblem;
use crate::info::Distribution;

fn named(
    states: &[&str],
    actions: &[&str],
    prior_good: f64,
    sender: Vec<Vec<f64>>,
    receiver: Vec<Vec<f64>>,
) -> PersuasionProblem {
    PersuasionProblem::with_names(
        states.iter().map(|s| s.to_string()).collect(),
        actions.iter().map(|s| s.to_string()).collect(),
        Distribution::binary(prior_good).expect("prior in [0, 1]"),
        sender,
        receiver,
    )
    .expect("well-formed instance")
}

/// Investment game: the receiver invests (`a1`) only when the project is good
/// with probability at least 7/8; the sender always wants investment.
///
/// `prior_good` is the prior probability of the good state `ω₁`.
pub fn investment_game(prior_good: f64) -> PersuasionProblem {
    named(
        &["bad", "good"],
        &["reject", "invest"],
        prior_good,
        vec![vec![0.0, 1.0], vec![0.0, 1.0]],
        vec![vec![0.0, -7.0], vec![0.0, 1.0]],
    )
}

/// Two risky projects: `a1` pays off in `ω₁`, `a2` in `ω₀`; the receiver
/// invests in one of them only when confident at level 7/8.
pub fn two_project_game(prior_one: f64) -> PersuasionProblem {
    named(
        &["w0", "w1"],
        &["none", "project1", "project2"],
        prior_one,
        vec![vec![0.0, 1.0, 1.0], vec![0.0, 1.0, 1.0]],
        vec![vec![0.0, -7.0, 1.0], vec![0.0, 1.0, -7.0]],
    )
}
