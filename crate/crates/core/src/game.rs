//! The one-shot persuasion problem: receiver best responses, the sender's
//! robust payoff and its concave envelope.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{kl_of, Belief, Distribution};

/// Default tolerance separating genuine receiver ties from float noise.
pub const IND_TOL: f64 = 1e-9;

/// A finite persuasion problem. Payoff matrices are indexed `[state][action]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemFile", into = "ProblemFile")]
pub struct PersuasionProblem {
    states: Vec<String>,
    actions: Vec<String>,
    prior: Distribution,
    sender: Vec<Vec<f64>>,
    receiver: Vec<Vec<f64>>,
}

/// On-disk problem format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub prior: Vec<f64>,
    pub sender_payoff: Vec<Vec<f64>>,
    pub receiver_payoff: Vec<Vec<f64>>,
}

impl TryFrom<ProblemFile> for PersuasionProblem {
    type Error = Error;
    fn try_from(f: ProblemFile) -> Result<Self> {
        PersuasionProblem::with_names(
            f.states,
            f.actions,
            Distribution::new(f.prior)?,
            f.sender_payoff,
            f.receiver_payoff,
        )
    }
}

impl From<PersuasionProblem> for ProblemFile {
    fn from(p: PersuasionProblem) -> Self {
        ProblemFile {
            states: p.states,
            actions: p.actions,
            prior: p.prior.into_vec(),
            sender_payoff: p.sender,
            receiver_payoff: p.receiver,
        }
    }
}

fn check_matrix(m: &[Vec<f64>], rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.len() != rows {
        return Err(Error::Dimension(format!(
            "{what} has {} rows, expected {rows}",
            m.len()
        )));
    }
    for (i, r) in m.iter().enumerate() {
        if r.len() != cols {
            return Err(Error::Dimension(format!(
                "{what} row {i} has {} entries, expected {cols}",
                r.len()
            )));
        }
        if let Some(j) = r.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "{what} entry ({i}, {j}) is not finite"
            )));
        }
    }
    Ok(())
}

impl PersuasionProblem {
    pub fn new(
        prior: Distribution,
        sender_payoff: Vec<Vec<f64>>,
        receiver_payoff: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let ns = prior.len();
        let na = sender_payoff.first().map_or(0, Vec::len);
        let states = (0..ns).map(|i| format!("w{i}")).collect();
        let actions = (0..na).map(|i| format!("a{i}")).collect();
        Self::with_names(states, actions, prior, sender_payoff, receiver_payoff)
    }

    pub fn with_names(
        states: Vec<String>,
        actions: Vec<String>,
        prior: Distribution,
        sender_payoff: Vec<Vec<f64>>,
        receiver_payoff: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let ns = states.len();
        let na = actions.len();
        if ns == 0 || na == 0 {
            return Err(Error::InvalidProblem(
                "need at least one state and one action".into(),
            ));
        }
        if prior.len() != ns {
            return Err(Error::Dimension(format!(
                "prior has {} entries for {ns} states",
                prior.len()
            )));
        }
        check_matrix(&sender_payoff, ns, na, "sender payoff")?;
        check_matrix(&receiver_payoff, ns, na, "receiver payoff")?;
        for a in 0..na {
            for b in a + 1..na {
                let same = (0..ns).all(|w| {
                    sender_payoff[w][a] == sender_payoff[w][b]
                        && receiver_payoff[w][a] == receiver_payoff[w][b]
                });
                if same {
                    return Err(Error::InvalidProblem(format!(
                        "actions {a} and {b} are completely equivalent; merge them"
                    )));
                }
            }
        }
        Ok(Self {
            states,
            actions,
            prior,
            sender: sender_payoff,
            receiver: receiver_payoff,
        })
    }

    /// The same payoffs under a different prior.
    pub fn with_prior(&self, prior: Distribution) -> Result<Self> {
        if prior.len() != self.num_states() {
            return Err(Error::Dimension(format!(
                "prior has {} entries for {} states",
                prior.len(),
                self.num_states()
            )));
        }
        Ok(Self {
            prior,
            ..self.clone()
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn prior(&self) -> &Distribution {
        &self.prior
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn action_names(&self) -> &[String] {
        &self.actions
    }

    pub fn sender_payoff(&self, state: usize, action: usize) -> f64 {
        self.sender[state][action]
    }

    pub fn receiver_payoff(&self, state: usize, action: usize) -> f64 {
        self.receiver[state][action]
    }

    pub fn sender_expected(&self, nu: &[f64], a: usize) -> f64 {
        nu.iter().zip(&self.sender).map(|(p, r)| p * r[a]).sum()
    }

    pub fn receiver_expected(&self, nu: &[f64], a: usize) -> f64 {
        nu.iter().zip(&self.receiver).map(|(p, r)| p * r[a]).sum()
    }

    /// Smallest and largest sender payoff entries.
    pub fn sender_range(&self) -> (f64, f64) {
        self.sender
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Whether two actions give the receiver identical payoffs in every state.
    pub fn receiver_equivalent(&self, a: usize, b: usize) -> bool {
        self.receiver.iter().all(|r| r[a] == r[b])
    }

    pub fn optimal_actions_at(&self, nu: &[f64], ind_tol: f64) -> Vec<usize> {
        let vals: Vec<f64> = (0..self.num_actions())
            .map(|a| self.receiver_expected(nu, a))
            .collect();
        let best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (0..vals.len())
            .filter(|&a| vals[a] >= best - ind_tol)
            .collect()
    }

    fn pick_optimal(&self, nu: &[f64], ind_tol: f64, worst: bool) -> usize {
        let mut pick = usize::MAX;
        let mut pick_val = 0.0;
        for a in self.optimal_actions_at(nu, ind_tol) {
            let v = self.sender_expected(nu, a);
            let better = if worst { v < pick_val } else { v > pick_val };
            if pick == usize::MAX || better {
                pick = a;
                pick_val = v;
            }
        }
        pick
    }

    /// Sender-worst receiver-optimal action; lowest index among equal-worst.
    pub fn worst_action_at(&self, nu: &[f64], ind_tol: f64) -> usize {
        self.pick_optimal(nu, ind_tol, true)
    }

    /// Sender-best receiver-optimal action; lowest index among equal-best.
    pub fn best_action_at(&self, nu: &[f64], ind_tol: f64) -> usize {
        self.pick_optimal(nu, ind_tol, false)
    }

    /// `u*_S(ν)` at the default indifference tolerance.
    pub fn robust_at(&self, nu: &[f64]) -> f64 {
        self.robust_at_tol(nu, IND_TOL)
    }

    pub fn robust_at_tol(&self, nu: &[f64], ind_tol: f64) -> f64 {
        self.sender_expected(nu, self.worst_action_at(nu, ind_tol))
    }

    /// Interior points of `[0, 1]` (as `ν(ω₁)`) where two actions give the
    /// receiver equal payoff. Binary-state problems only.
    pub fn indifference_points(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let na = self.num_actions();
        for a in 0..na {
            for b in a + 1..na {
                if let Some(p) = crossing(
                    self.receiver[0][a] - self.receiver[0][b],
                    self.receiver[1][a] - self.receiver[1][b],
                ) {
                    out.push(p);
                }
            }
        }
        sort_dedup(&mut out);
        out
    }

    /// Interior points where two receiver-equivalent actions give the sender
    /// equal payoff; the worst action can switch there. Binary-state only.
    pub(crate) fn sender_switch_points(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let na = self.num_actions();
        for a in 0..na {
            for b in a + 1..na {
                if self.receiver_equivalent(a, b) {
                    if let Some(p) = crossing(
                        self.sender[0][a] - self.sender[0][b],
                        self.sender[1][a] - self.sender[1][b],
                    ) {
                        out.push(p);
                    }
                }
            }
        }
        sort_dedup(&mut out);
        out
    }

    fn check_belief(&self, nu: &Belief) -> Result<()> {
        if nu.len() != self.num_states() {
            return Err(Error::Dimension(format!(
                "belief has {} entries for {} states",
                nu.len(),
                self.num_states()
            )));
        }
        Ok(())
    }
}

/// Root in (0, 1) of `(1 - p) d0 + p d1 = 0`, if any.
fn crossing(d0: f64, d1: f64) -> Option<f64> {
    if d0 == d1 {
        return None;
    }
    let p = d0 / (d0 - d1);
    (p > 0.0 && p < 1.0).then_some(p)
}

pub(crate) fn sort_dedup(v: &mut Vec<f64>) {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
}

pub fn optimal_actions(p: &PersuasionProblem, nu: &Belief, ind_tol: f64) -> Result<Vec<usize>> {
    p.check_belief(nu)?;
    Ok(p.optimal_actions_at(nu.as_slice(), ind_tol))
}

pub fn worst_optimal_action(p: &PersuasionProblem, nu: &Belief, ind_tol: f64) -> Result<usize> {
    p.check_belief(nu)?;
    Ok(p.worst_action_at(nu.as_slice(), ind_tol))
}

pub fn best_optimal_action(p: &PersuasionProblem, nu: &Belief, ind_tol: f64) -> Result<usize> {
    p.check_belief(nu)?;
    Ok(p.best_action_at(nu.as_slice(), ind_tol))
}

pub fn robust_payoff(p: &PersuasionProblem, nu: &Belief) -> Result<f64> {
    p.check_belief(nu)?;
    Ok(p.robust_at(nu.as_slice()))
}

/// One sample of the envelope.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CavSample {
    pub belief: Vec<f64>,
    pub robust: f64,
    pub cav: f64,
}

/// `cav u*_S` at the prior, with samples over a grid of beliefs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CavEnvelope {
    pub value: f64,
    pub samples: Vec<CavSample>,
}

/// Exact upper envelope of `u*_S` on binary beliefs, as hull vertices
/// `(ν(ω₁), value)` sorted by abscissa.
pub(crate) fn binary_envelope_knots(p: &PersuasionProblem) -> Vec<(f64, f64)> {
    let mut xs = vec![0.0, 1.0];
    xs.extend(p.indifference_points());
    xs.extend(p.sender_switch_points());
    sort_dedup(&mut xs);
    // u*_S is linear strictly between consecutive knots; its one-sided limits
    // at a knot are the extrapolations of the neighbouring linear pieces.
    let piece = |lo: f64, hi: f64| {
        let mid = 0.5 * (lo + hi);
        let a = p.worst_action_at(&[1.0 - mid, mid], IND_TOL);
        move |x: f64| p.sender_expected(&[1.0 - x, x], a)
    };
    let mut pts = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let mut v = p.robust_at(&[1.0 - x, x]);
        if i > 0 {
            v = v.max(piece(xs[i - 1], x)(x));
        }
        if i + 1 < xs.len() {
            v = v.max(piece(x, xs[i + 1])(x));
        }
        pts.push((x, v));
    }
    upper_hull(&pts)
}

/// Upper concave hull of points sorted by abscissa.
pub(crate) fn upper_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut h: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &pt in pts {
        if let Some(last) = h.last_mut() {
            if last.0 == pt.0 {
                last.1 = last.1.max(pt.1);
                continue;
            }
        }
        while h.len() >= 2 {
            let (x1, y1) = h[h.len() - 2];
            let (x2, y2) = h[h.len() - 1];
            // Drop the middle point when it lies on or below the chord.
            let cross = (x2 - x1) * (pt.1 - y1) - (y2 - y1) * (pt.0 - x1);
            if cross >= 0.0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(pt);
    }
    h
}

/// Evaluate a hull (sorted vertices) at `x`, returning the value and the
/// indices of the bracketing vertices.
pub(crate) fn hull_eval(h: &[(f64, f64)], x: f64) -> (f64, usize, usize) {
    let i = h.partition_point(|v| v.0 < x);
    if i < h.len() && h[i].0 == x {
        return (h[i].1, i, i);
    }
    if i == 0 || i == h.len() {
        // Outside the hull's support; clamp to the nearest vertex.
        let j = i.min(h.len() - 1);
        return (h[j].1, j, j);
    }
    let (x0, y0) = h[i - 1];
    let (x1, y1) = h[i];
    let w = (x - x0) / (x1 - x0);
    (y0 + w * (y1 - y0), i - 1, i)
}

/// Exact envelope value at a binary belief `ν(ω₁) = x`.
pub(crate) fn binary_cav_at(p: &PersuasionProblem, knots: &[(f64, f64)], x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return p.robust_at(&[1.0 - x, x]);
    }
    hull_eval(knots, x).0
}

/// Concave envelope of the robust payoff at the prior.
///
/// Binary-state problems use the exact hull over indifference knots; larger
/// state spaces fall back to the grid LP at resolution `grid_size`, which
/// also sets the number of samples returned.
pub fn cav_unconstrained(p: &PersuasionProblem, grid_size: usize) -> Result<CavEnvelope> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid size {grid_size} must be at least 2"
        )));
    }
    let mu = p.prior().as_slice();
    if p.num_states() == 1 {
        let v = p.robust_at(mu);
        return Ok(CavEnvelope {
            value: v,
            samples: vec![CavSample {
                belief: vec![1.0],
                robust: v,
                cav: v,
            }],
        });
    }
    if p.num_states() == 2 {
        let knots = binary_envelope_knots(p);
        let samples = (0..grid_size)
            .map(|i| {
                let x = i as f64 / (grid_size - 1) as f64;
                let belief = vec![1.0 - x, x];
                let robust = p.robust_at(&belief);
                CavSample {
                    cav: binary_cav_at(p, &knots, x).max(robust),
                    belief,
                    robust,
                }
            })
            .collect();
        return Ok(CavEnvelope {
            value: binary_cav_at(p, &knots, mu[1]).max(p.robust_at(mu)),
            samples,
        });
    }
    let cfg = crate::solver::SolverConfig::with_resolution(grid_size);
    let grid = crate::grid::PosteriorGrid::build(p, &cfg, &crate::solver::Entropy)?;
    let value = crate::lp::envelope_lp(&grid, 0.0, mu)?.0;
    let mut samples = Vec::new();
    for pt in crate::grid::simplex_lattice(p.num_states(), grid_size) {
        let robust = p.robust_at(&pt);
        let cav = crate::lp::envelope_lp(&grid, 0.0, &pt)?.0.max(robust);
        samples.push(CavSample {
            belief: pt,
            robust,
            cav,
        });
    }
    Ok(CavEnvelope {
        value: value.max(p.robust_at(mu)),
        samples,
    })
}

/// Estimated KL radius around `nu` inside which the sender-worst optimal
/// action does not change.
///
/// Probes segments from `nu` toward every simplex vertex and toward
/// `probe_count` deterministic pseudo-random beliefs, bisecting for the
/// first action change on each. Returns `f64::INFINITY` when no probe
/// leaves the region. The estimate is conservative along probed directions
/// only; it is not a certified bound.
pub fn worst_action_radius(p: &PersuasionProblem, nu: &Belief, probe_count: usize) -> Result<f64> {
    p.check_belief(nu)?;
    let v = nu.as_slice();
    let w = p.worst_action_at(v, IND_TOL);
    let wv = p.sender_expected(v, w);
    for a in p.optimal_actions_at(v, IND_TOL) {
        if a == w {
            continue;
        }
        let tied = !p.receiver_equivalent(a, w) || p.sender_expected(v, a) - wv <= IND_TOL;
        if tied {
            return Err(Error::NotApplicable(format!(
                "receiver indifferent between actions {w} and {a} at this belief"
            )));
        }
    }
    let ns = p.num_states();
    let mut targets: Vec<Vec<f64>> = (0..ns)
        .map(|i| {
            let mut e = vec![0.0; ns];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_a1fa);
    for _ in 0..probe_count {
        let mut z: Vec<f64> = (0..ns).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
        let s: f64 = z.iter().sum();
        z.iter_mut().for_each(|x| *x /= s);
        targets.push(z);
    }
    let at = |z: &[f64], s: f64| -> Vec<f64> {
        v.iter().zip(z).map(|(a, b)| a + s * (b - a)).collect()
    };
    let mut radius = f64::INFINITY;
    for z in &targets {
        if p.worst_action_at(z, IND_TOL) == w {
            continue;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if p.worst_action_at(&at(z, mid), IND_TOL) == w {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        radius = radius.min(kl_of(&at(z, lo), v));
    }
    Ok(radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{investment_game, two_project_game};
    use approx::assert_abs_diff_eq;

    fn b(p1: f64) -> Belief {
        Distribution::binary(p1).unwrap()
    }

    #[test]
    fn optimal_action_sets() {
        let g = investment_game(0.5);
        assert_eq!(optimal_actions(&g, &b(0.9), IND_TOL).unwrap(), vec![1]);
        assert_eq!(optimal_actions(&g, &b(0.875), IND_TOL).unwrap(), vec![0, 1]);
        assert_eq!(optimal_actions(&g, &b(0.5), IND_TOL).unwrap(), vec![0]);
    }

    #[test]
    fn worst_and_best_actions() {
        let g = investment_game(0.5);
        assert_eq!(worst_optimal_action(&g, &b(0.875), IND_TOL).unwrap(), 0);
        assert_eq!(best_optimal_action(&g, &b(0.875), IND_TOL).unwrap(), 1);
        assert_eq!(worst_optimal_action(&g, &b(0.95), IND_TOL).unwrap(), 1);
        assert_eq!(worst_optimal_action(&g, &b(0.0), IND_TOL).unwrap(), 0);
    }

    #[test]
    fn robust_payoff_examples() {
        let g = investment_game(0.5);
        assert_eq!(robust_payoff(&g, &b(0.875)).unwrap(), 0.0);
        assert_eq!(robust_payoff(&g, &b(0.9)).unwrap(), 1.0);
        assert_eq!(robust_payoff(&g, &b(0.2)).unwrap(), 0.0);
        assert!(robust_payoff(&g, &Distribution::uniform(3)).is_err());
    }

    #[test]
    fn rejects_equivalent_actions_and_bad_shapes() {
        let prior = Distribution::uniform(2);
        let same = vec![vec![1.0, 1.0], vec![0.0, 0.0]];
        assert!(matches!(
            PersuasionProblem::new(prior.clone(), same.clone(), same.clone()),
            Err(Error::InvalidProblem(_))
        ));
        assert!(PersuasionProblem::new(prior.clone(), vec![vec![1.0, 0.0]], same.clone()).is_err());
        let nan = vec![vec![f64::NAN, 0.0], vec![0.0, 1.0]];
        assert!(PersuasionProblem::new(prior, nan, same).is_err());
    }

    #[test]
    fn cav_investment_game() {
        let g = investment_game(0.5);
        let c = cav_unconstrained(&g, 101).unwrap();
        assert_abs_diff_eq!(c.value, 4.0 / 7.0, epsilon = 1e-12);
        let g = investment_game(0.875);
        assert_abs_diff_eq!(cav_unconstrained(&g, 11).unwrap().value, 1.0, epsilon = 1e-12);
        for s in &c.samples {
            assert!(s.cav >= s.robust - 1e-12);
            let x = s.belief[1];
            let expect = if x <= 0.875 { x * 8.0 / 7.0 } else { 1.0 };
            assert_abs_diff_eq!(s.cav, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn cav_at_vertices_is_robust_payoff() {
        for x in [0.0, 1.0] {
            let g = investment_game(x);
            assert_eq!(cav_unconstrained(&g, 5).unwrap().value, x);
        }
    }

    #[test]
    fn cav_two_project_game_is_one() {
        let g = two_project_game(0.5);
        assert_abs_diff_eq!(cav_unconstrained(&g, 3).unwrap().value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn cav_receiver_equivalent_actions_with_crossing_sender_payoffs() {
        // Two actions the receiver never distinguishes; the worst switches at 1/2.
        let prior = Distribution::uniform(2);
        let p = PersuasionProblem::new(
            prior,
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        )
        .unwrap();
        // u*(x) = min(x, 1 - x) is concave, so it is its own envelope.
        assert_abs_diff_eq!(cav_unconstrained(&p, 3).unwrap().value, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn cav_three_states_by_lp() {
        // Sender gains 1 when the receiver guesses state 2; the receiver only
        // guesses it when at least 1/2 confident.
        let prior = Distribution::new(vec![0.4, 0.4, 0.2]).unwrap();
        let p = PersuasionProblem::new(
            prior,
            vec![vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0]],
            vec![vec![0.5, 0.0], vec![0.5, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        // Threshold ν(2) ≥ 1/3; pool each state-2 mass with twice as much.
        let c = cav_unconstrained(&p, 12).unwrap();
        assert!(c.value <= 0.6 + 1e-9);
        assert!(c.value >= 0.6 - 1e-3, "{}", c.value);
        for s in &c.samples {
            assert!(s.cav >= s.robust - 1e-9);
        }
    }

    #[test]
    fn radius_examples() {
        let g = investment_game(0.5);
        assert!(worst_action_radius(&g, &b(0.5), 16).unwrap() > 0.0);
        assert!(matches!(
            worst_action_radius(&g, &b(0.875), 16),
            Err(Error::NotApplicable(_))
        ));
        let r = worst_action_radius(&g, &b(0.95), 16).unwrap();
        let to_boundary = kl_of(&[0.125, 0.875], &[0.05, 0.95]);
        assert!(r > 0.0 && r <= to_boundary + 1e-12, "{r} vs {to_boundary}");
        // No action change anywhere: one action only.
        let solo = PersuasionProblem::new(
            Distribution::uniform(2),
            vec![vec![1.0], vec![2.0]],
            vec![vec![0.0], vec![0.0]],
        )
        .unwrap();
        assert_eq!(worst_action_radius(&solo, &b(0.3), 4).unwrap(), f64::INFINITY);
    }

    #[test]
    fn hull_helpers() {
        let h = upper_hull(&[(0.0, 0.0), (0.5, 0.25), (0.5, 1.0), (1.0, 0.0)]);
        assert_eq!(h, vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]);
        assert_eq!(hull_eval(&h, 0.25), (0.5, 0, 1));
        assert_eq!(hull_eval(&h, 0.5).0, 1.0);
    }
}
