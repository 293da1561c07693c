#![allow(dead_code)]

use capcon::{Distribution, PersuasionProblem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A problem with random payoffs in [-1, 1], `ns` states and `na` actions.
pub fn random_problem(rng: &mut ChaCha8Rng, ns: usize, na: usize) -> PersuasionProblem {
    let draw = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        (0..ns)
            .map(|_| (0..na).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect()
    };
    let sender = draw(rng);
    let receiver = draw(rng);
    PersuasionProblem::new(random_belief(rng, ns), sender, receiver).expect("random problem")
}

/// Uniform point of the simplex, kept off the faces.
pub fn random_belief(rng: &mut ChaCha8Rng, ns: usize) -> Distribution {
    let w: Vec<f64> = (0..ns).map(|_| -rng.gen_range(1e-6..1.0f64).ln()).collect();
    let s: f64 = w.iter().sum();
    Distribution::new(w.into_iter().map(|x| x / s).collect()).expect("normalized")
}

pub fn h2(p: f64) -> f64 {
    let f = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    f(p) + f(1.0 - p)
}
