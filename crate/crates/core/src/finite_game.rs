//! Exact evaluation of the repeated game with `n` problem copies and `k`
//! channel uses, by full enumeration of state and signal sequences.
//!
//! Sequences are indexed lexicographically with the first coordinate most
//! significant.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{PersuasionProblem, IND_TOL};
use crate::info::{capacity_upper_bound, Belief, Channel, Distribution, CAPACITY_TOL, PROB_TOL};
use crate::solver::value;
use crate::splitting::Splitting;

/// Maximum number of state sequences `|Ω|^n`.
pub const MAX_STATE_SEQS: usize = 1 << 20;
/// Maximum number of input or output sequences `|X|^k`, `|Y|^k`.
pub const MAX_SIGNAL_SEQS: usize = 1 << 12;
/// Maximum size of the `k`-fold channel table `|X|^k · |Y|^k`.
pub const MAX_CHANNEL_TABLE: usize = 1 << 22;

const CHUNK_COUNT: usize = 64;
const MIN_CHUNK: usize = 1024;

fn checked_pow(base: usize, exp: usize, cap: usize, what: &str) -> Result<usize> {
    let mut v: usize = 1;
    for _ in 0..exp {
        v = v
            .checked_mul(base)
            .filter(|&x| x <= cap)
            .ok_or_else(|| Error::BudgetExceeded(format!("{what}: {base}^{exp} exceeds {cap}")))?;
    }
    Ok(v)
}

/// Write the base-`base` digits of `idx` into `out`, most significant first.
pub fn decode_index(mut idx: usize, base: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = idx % base;
        idx /= base;
    }
}

pub fn encode_index(digits: &[usize], base: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * base + d)
}

/// The repeated game `Γ(n, k)`.
#[derive(Debug, Clone)]
pub struct GameInstance {
    problem: PersuasionProblem,
    channel: Channel,
    n: usize,
    k: usize,
    state_seqs: usize,
    input_seqs: usize,
    output_seqs: usize,
}

impl GameInstance {
    pub fn new(problem: PersuasionProblem, channel: Channel, n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("need at least one problem copy".into()));
        }
        let state_seqs = checked_pow(problem.num_states(), n, MAX_STATE_SEQS, "state sequences")?;
        let input_seqs = checked_pow(channel.inputs(), k, MAX_SIGNAL_SEQS, "input sequences")?;
        let output_seqs = checked_pow(channel.outputs(), k, MAX_SIGNAL_SEQS, "output sequences")?;
        if input_seqs * output_seqs > MAX_CHANNEL_TABLE {
            return Err(Error::BudgetExceeded(format!(
                "channel table of {input_seqs} x {output_seqs} sequences exceeds {MAX_CHANNEL_TABLE}"
            )));
        }
        Ok(Self {
            problem,
            channel,
            n,
            k,
            state_seqs,
            input_seqs,
            output_seqs,
        })
    }

    pub fn problem(&self) -> &PersuasionProblem {
        &self.problem
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn state_seqs(&self) -> usize {
        self.state_seqs
    }

    pub fn input_seqs(&self) -> usize {
        self.input_seqs
    }

    pub fn output_seqs(&self) -> usize {
        self.output_seqs
    }

    /// `μ^n(ω^n)` for a state-sequence index.
    pub fn state_seq_prob(&self, idx: usize, buf: &mut [usize]) -> f64 {
        decode_index(idx, self.problem.num_states(), buf);
        let mu = self.problem.prior();
        buf.iter().map(|&w| mu[w]).product()
    }

    /// Row-major table of `Q^k(y^k | x^k)`.
    pub fn channel_table(&self) -> Vec<f64> {
        let (nx, ny) = (self.channel.inputs(), self.channel.outputs());
        let mut xs = vec![0; self.k];
        let mut ys = vec![0; self.k];
        let mut t = Vec::with_capacity(self.input_seqs * self.output_seqs);
        for xi in 0..self.input_seqs {
            decode_index(xi, nx, &mut xs);
            for yi in 0..self.output_seqs {
                decode_index(yi, ny, &mut ys);
                t.push(
                    xs.iter()
                        .zip(&ys)
                        .map(|(&x, &y)| self.channel.prob(x, y))
                        .product(),
                );
            }
        }
        t
    }
}

/// A sender strategy: for each state sequence, a distribution over input
/// sequences.
#[derive(Debug, Clone, PartialEq)]
pub enum SenderStrategy {
    /// Dense rows `σ(x^k | ω^n)`.
    Mixed { n: usize, k: usize, rows: Vec<Vec<f64>> },
    /// One input sequence per state sequence.
    Pure { n: usize, k: usize, inputs: Vec<usize> },
}

#[derive(Serialize, Deserialize)]
struct StrategyFile {
    n: usize,
    k: usize,
    rows: Vec<Vec<f64>>,
}

impl Serialize for SenderStrategy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (n, k) = self.shape();
        StrategyFile {
            n,
            k,
            rows: self.dense_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SenderStrategy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = StrategyFile::deserialize(d)?;
        SenderStrategy::mixed(f.n, f.k, f.rows).map_err(serde::de::Error::custom)
    }
}

impl SenderStrategy {
    pub fn mixed(n: usize, k: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != width {
                return Err(Error::Dimension(format!(
                    "strategy row {i} has {} entries, expected {width}",
                    r.len()
                )));
            }
            Distribution::new(r.clone()).map_err(|e| {
                Error::InvalidDistribution(format!("strategy row {i}: {e}"))
            })?;
        }
        Ok(Self::Mixed { n, k, rows })
    }

    pub fn pure(n: usize, k: usize, inputs: Vec<usize>) -> Self {
        Self::Pure { n, k, inputs }
    }

    /// Send the all-zero input sequence whatever the state.
    pub fn uninformative(g: &GameInstance) -> Self {
        Self::pure(g.n, g.k, vec![0; g.state_seqs])
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            Self::Mixed { n, k, .. } | Self::Pure { n, k, .. } => (*n, *k),
        }
    }

    fn num_rows(&self) -> usize {
        match self {
            Self::Mixed { rows, .. } => rows.len(),
            Self::Pure { inputs, .. } => inputs.len(),
        }
    }

    fn dense_rows(&self) -> Vec<Vec<f64>> {
        match self {
            Self::Mixed { rows, .. } => rows.clone(),
            Self::Pure { inputs, .. } => {
                let width = inputs.iter().max().map_or(1, |m| m + 1);
                inputs
                    .iter()
                    .map(|&x| {
                        let mut r = vec![0.0; width];
                        r[x] = 1.0;
                        r
                    })
                    .collect()
            }
        }
    }

    fn check(&self, g: &GameInstance) -> Result<()> {
        if self.shape() != (g.n, g.k) {
            return Err(Error::Dimension(format!(
                "strategy for (n, k) = {:?}, game has ({}, {})",
                self.shape(),
                g.n,
                g.k
            )));
        }
        if self.num_rows() != g.state_seqs {
            return Err(Error::Dimension(format!(
                "strategy has {} rows, game has {} state sequences",
                self.num_rows(),
                g.state_seqs
            )));
        }
        match self {
            Self::Mixed { rows, .. } => {
                if rows.first().map_or(0, Vec::len) != g.input_seqs {
                    return Err(Error::Dimension(format!(
                        "strategy rows have {} columns, game has {} input sequences",
                        rows[0].len(),
                        g.input_seqs
                    )));
                }
            }
            Self::Pure { inputs, .. } => {
                if let Some(&x) = inputs.iter().find(|&&x| x >= g.input_seqs) {
                    return Err(Error::Dimension(format!("input sequence index {x} out of range")));
                }
            }
        }
        Ok(())
    }

    /// Accumulate `σ(·|ω^n) · Q^k` into `py`.
    fn output_dist(&self, w: usize, qk: &[f64], ny: usize, py: &mut [f64]) {
        py.iter_mut().for_each(|v| *v = 0.0);
        match self {
            Self::Pure { inputs, .. } => py.copy_from_slice(&qk[inputs[w] * ny..(inputs[w] + 1) * ny]),
            Self::Mixed { rows, .. } => {
                for (x, &s) in rows[w].iter().enumerate() {
                    if s > 0.0 {
                        for (acc, q) in py.iter_mut().zip(&qk[x * ny..(x + 1) * ny]) {
                            *acc += s * q;
                        }
                    }
                }
            }
        }
    }
}

/// Receiver tie-breaking rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieMode {
    /// Sender-worst optimal action.
    Worst,
    /// Sender-best optimal action.
    Best,
}

impl FromStr for TieMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "worst" => Ok(Self::Worst),
            "best" => Ok(Self::Best),
            other => Err(Error::InvalidParameter(format!(
                "tie mode {other:?}; expected worst or best"
            ))),
        }
    }
}

/// Exact stage posteriors for every output sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosteriorTable {
    pub n: usize,
    /// `P(y^k)` indexed by output sequence.
    pub prob: Vec<f64>,
    /// Per output sequence, the posteriors `ν_{t, y^k}` for `t = 0..n`;
    /// `None` for unreached outputs.
    pub beliefs: Vec<Option<Vec<Belief>>>,
    /// `P(y^k, ω_t = ω)`, laid out `[y][t][ω]`.
    #[serde(skip)]
    pub(crate) joint: Vec<f64>,
}

impl PosteriorTable {
    pub fn get(&self, t: usize, y: usize) -> Option<&Belief> {
        self.beliefs[y].as_ref().map(|v| &v[t])
    }

    /// The splitting with atoms `(P(y^k)/n, ν_{t,y^k})` over all stages and
    /// reached outputs.
    pub fn induced_splitting(&self) -> Splitting {
        let mut raw = Vec::new();
        for (y, b) in self.beliefs.iter().enumerate() {
            if let Some(bs) = b {
                for nu in bs {
                    raw.push((self.prob[y] / self.n as f64, nu.as_slice().to_vec()));
                }
            }
        }
        Splitting::from_raw(raw)
    }
}

pub fn receiver_posteriors(g: &GameInstance, s: &SenderStrategy) -> Result<PosteriorTable> {
    s.check(g)?;
    let ns = g.problem.num_states();
    let (n, ny) = (g.n, g.output_seqs);
    let qk = g.channel_table();
    let width = ny * n * ns;
    let chunk = (g.state_seqs.div_ceil(CHUNK_COUNT)).max(MIN_CHUNK);
    let starts: Vec<usize> = (0..g.state_seqs).step_by(chunk).collect();
    let partials: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|&start| {
            let mut acc = vec![0.0; width];
            let mut digits = vec![0; n];
            let mut py = vec![0.0; ny];
            for w in start..(start + chunk).min(g.state_seqs) {
                let pw = g.state_seq_prob(w, &mut digits);
                if pw == 0.0 {
                    continue;
                }
                s.output_dist(w, &qk, ny, &mut py);
                for (y, &p) in py.iter().enumerate() {
                    let m = pw * p;
                    if m == 0.0 {
                        continue;
                    }
                    let base = y * n * ns;
                    for (t, &wt) in digits.iter().enumerate() {
                        acc[base + t * ns + wt] += m;
                    }
                }
            }
            acc
        })
        .collect();
    let mut joint = vec![0.0; width];
    for part in &partials {
        for (a, b) in joint.iter_mut().zip(part) {
            *a += b;
        }
    }
    let mut prob = Vec::with_capacity(ny);
    let mut beliefs = Vec::with_capacity(ny);
    for y in 0..ny {
        let base = y * n * ns;
        let py: f64 = joint[base..base + ns].iter().sum();
        prob.push(py);
        if py <= 0.0 {
            beliefs.push(None);
            continue;
        }
        let stage = (0..n)
            .map(|t| {
                let row = &joint[base + t * ns..base + (t + 1) * ns];
                let tot: f64 = row.iter().sum();
                Distribution::new(row.iter().map(|v| v / tot).collect())
                    .expect("posterior from a positive row")
            })
            .collect();
        beliefs.push(Some(stage));
    }
    Ok(PosteriorTable {
        n,
        prob,
        beliefs,
        joint,
    })
}

fn pick(p: &PersuasionProblem, nu: &[f64], tie: TieMode) -> usize {
    match tie {
        TieMode::Worst => p.worst_action_at(nu, IND_TOL),
        TieMode::Best => p.best_action_at(nu, IND_TOL),
    }
}

fn actions_from(g: &GameInstance, post: &PosteriorTable, tie: TieMode) -> Vec<Vec<usize>> {
    let fallback = pick(&g.problem, g.problem.prior().as_slice(), TieMode::Worst);
    post.beliefs
        .iter()
        .map(|b| match b {
            Some(stage) => stage.iter().map(|nu| pick(&g.problem, nu.as_slice(), tie)).collect(),
            None => vec![fallback; g.n],
        })
        .collect()
}

/// Receiver best reply `τ(y^k)`; unreached outputs get the prior's worst action.
pub fn best_reply(g: &GameInstance, s: &SenderStrategy, tie: TieMode) -> Result<Vec<Vec<usize>>> {
    let post = receiver_posteriors(g, s)?;
    Ok(actions_from(g, &post, tie))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub sender_value: f64,
    pub receiver_value: f64,
    pub posterior_table: PosteriorTable,
    pub action_table: Vec<Vec<usize>>,
    pub tie_mode: TieMode,
}

pub fn evaluate_strategy(g: &GameInstance, s: &SenderStrategy, tie: TieMode) -> Result<EvaluationReport> {
    let post = receiver_posteriors(g, s)?;
    let actions = actions_from(g, &post, tie);
    let ns = g.problem.num_states();
    let (mut us, mut ur) = (0.0, 0.0);
    for (y, acts) in actions.iter().enumerate() {
        for (t, &a) in acts.iter().enumerate() {
            let base = (y * g.n + t) * ns;
            for w in 0..ns {
                let m = post.joint[base + w];
                us += m * g.problem.sender_payoff(w, a);
                ur += m * g.problem.receiver_payoff(w, a);
            }
        }
    }
    Ok(EvaluationReport {
        sender_value: us / g.n as f64,
        receiver_value: ur / g.n as f64,
        posterior_table: post,
        action_table: actions,
        tie_mode: tie,
    })
}

/// `V(μ, (k/n) C(Q))`.
pub fn theorem1_upper_bound(g: &GameInstance) -> Result<f64> {
    let cap = capacity_upper_bound(&g.channel, CAPACITY_TOL)?;
    let c = g.k as f64 / g.n as f64 * cap;
    Ok(value(&g.problem, c)?.value)
}

/// Best strategy found by a search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResult {
    pub value: f64,
    pub strategy: SenderStrategy,
    pub evaluated: usize,
}

/// Largest number of deterministic maps enumerated exhaustively.
const EXHAUSTIVE_PURE: usize = 4096;

/// Hand-built candidates: silence, all deterministic maps when few, and for
/// binary states per-copy disclosure and block pooling with a signal
/// probability swept over `i/60`.
pub fn structured_candidates(g: &GameInstance) -> Vec<SenderStrategy> {
    let (n, k) = (g.n, g.k);
    let mut out = vec![SenderStrategy::uninformative(g)];
    let pure_count = (g.input_seqs as f64).powf(g.state_seqs as f64);
    if pure_count <= EXHAUSTIVE_PURE as f64 {
        let mut inputs = vec![0; g.state_seqs];
        for idx in 0..pure_count as usize {
            decode_index(idx, g.input_seqs, &mut inputs);
            out.push(SenderStrategy::pure(n, k, inputs.clone()));
        }
    }
    let ns = g.problem.num_states();
    let nx = g.channel.inputs();
    if k == 0 || nx < 2 {
        return out;
    }
    // Truncated full revelation: ω_t on use t while symbols last.
    if nx >= ns {
        let inputs = (0..g.state_seqs)
            .map(|w| {
                let mut ws = vec![0; n];
                decode_index(w, ns, &mut ws);
                let xs: Vec<usize> = (0..k).map(|j| if j < n { ws[j] } else { 0 }).collect();
                encode_index(&xs, nx)
            })
            .collect();
        out.push(SenderStrategy::pure(n, k, inputs));
    }
    if ns != 2 {
        return out;
    }
    let block = n.div_ceil(k).max(1);
    for polarity in [1usize, 0] {
        for i in 0..=60 {
            let rho = i as f64 / 60.0;
            // Per-copy disclosure on the first min(n, k) copies.
            out.push(bit_strategy(g, |ws, j| {
                if j >= n {
                    0.0
                } else if ws[j] == polarity {
                    1.0
                } else {
                    rho
                }
            }));
            if block > 1 {
                // Blocks of copies pooled onto one use each.
                out.push(bit_strategy(g, |ws, j| {
                    let lo = j * block;
                    let hi = ((j + 1) * block).min(n);
                    if lo >= hi {
                        return 0.0;
                    }
                    let hits = ws[lo..hi].iter().filter(|&&w| w == polarity).count();
                    if hits == hi - lo {
                        1.0
                    } else if hits == 0 {
                        0.0
                    } else {
                        rho
                    }
                }));
            }
        }
    }
    out
}

/// Strategy sending symbol 1 on use `j` with probability `f(ω^n, j)`,
/// independently across uses, and symbol 0 otherwise.
fn bit_strategy(g: &GameInstance, f: impl Fn(&[usize], usize) -> f64) -> SenderStrategy {
    let (n, k) = (g.n, g.k);
    let ns = g.problem.num_states();
    let nx = g.channel.inputs();
    let mut ws = vec![0; n];
    let mut xs = vec![0; k];
    let rows = (0..g.state_seqs)
        .map(|w| {
            decode_index(w, ns, &mut ws);
            let p1: Vec<f64> = (0..k).map(|j| f(&ws, j)).collect();
            (0..g.input_seqs)
                .map(|x| {
                    decode_index(x, nx, &mut xs);
                    xs.iter()
                        .zip(&p1)
                        .map(|(&s, &p)| match s {
                            0 => 1.0 - p,
                            1 => p,
                            _ => 0.0,
                        })
                        .product()
                })
                .collect()
        })
        .collect();
    SenderStrategy::Mixed { n, k, rows }
}

fn random_strategy(g: &GameInstance, rng: &mut ChaCha8Rng) -> SenderStrategy {
    if rng.gen_bool(0.5) {
        let inputs = (0..g.state_seqs).map(|_| rng.gen_range(0..g.input_seqs)).collect();
        SenderStrategy::pure(g.n, g.k, inputs)
    } else {
        let rows = (0..g.state_seqs)
            .map(|_| {
                let r: Vec<f64> = (0..g.input_seqs)
                    .map(|_| -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln())
                    .collect();
                let s: f64 = r.iter().sum();
                r.into_iter().map(|v| v / s).collect()
            })
            .collect();
        SenderStrategy::Mixed {
            n: g.n,
            k: g.k,
            rows,
        }
    }
}

/// Maximum sender value over the structured candidates and `samples`
/// random strategies. Deterministic in `seed` whatever the thread count.
pub fn random_search_lower_bound(
    g: &GameInstance,
    samples: usize,
    seed: u64,
    tie: TieMode,
) -> Result<SearchResult> {
    let lib = structured_candidates(g);
    let total = lib.len() + samples;
    let scores: Vec<(usize, f64)> = (0..total)
        .into_par_iter()
        .map(|i| -> Result<(usize, f64)> {
            let v = if i < lib.len() {
                evaluate_strategy(g, &lib[i], tie)?.sender_value
            } else {
                let s = sample_strategy(g, seed, (i - lib.len()) as u64);
                evaluate_strategy(g, &s, tie)?.sender_value
            };
            Ok((i, v))
        })
        .collect::<Result<_>>()?;
    let (best_i, best_v) = scores
        .iter()
        .fold((0, f64::NEG_INFINITY), |acc, &(i, v)| if v > acc.1 { (i, v) } else { acc });
    let strategy = if best_i < lib.len() {
        lib[best_i].clone()
    } else {
        sample_strategy(g, seed, (best_i - lib.len()) as u64)
    };
    Ok(SearchResult {
        value: best_v,
        strategy,
        evaluated: total,
    })
}

/// The `index`-th random strategy of the search seeded by `seed`: a uniform
/// pure map or rows drawn uniformly from the simplex, with equal odds.
pub fn sample_strategy(g: &GameInstance, seed: u64, index: u64) -> SenderStrategy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    random_strategy(g, &mut rng)
}

/// Mean stage posterior `Σ_y P(y) ν_{t,y}`, one per stage; equals the prior.
pub fn mean_posteriors(post: &PosteriorTable) -> Vec<Vec<f64>> {
    let ns = post
        .beliefs
        .iter()
        .flatten()
        .next()
        .map_or(0, |v| v[0].len());
    (0..post.n)
        .map(|t| {
            let mut m = vec![0.0; ns];
            for (y, b) in post.beliefs.iter().enumerate() {
                if let Some(stage) = b {
                    for (acc, v) in m.iter_mut().zip(stage[t].as_slice()) {
                        *acc += post.prob[y] * v;
                    }
                }
            }
            m
        })
        .collect()
}

/// Whether every row of the strategy sums to one.
pub fn is_valid_strategy(s: &SenderStrategy) -> bool {
    match s {
        SenderStrategy::Pure { .. } => true,
        SenderStrategy::Mixed { rows, .. } => rows
            .iter()
            .all(|r| (r.iter().sum::<f64>() - 1.0).abs() <= PROB_TOL && r.iter().all(|&v| v >= 0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{channel_capacity, make_bsc, make_perfect_channel};
    use crate::instances::investment_game;
    use approx::assert_abs_diff_eq;

    /// Pairing: `g` (symbol 1) surely when both good, never when both bad,
    /// with probability 1/6 when exactly one is good.
    fn pairing(g: &GameInstance) -> SenderStrategy {
        let rows = (0..4)
            .map(|w| {
                let goods = [0, 1, 1, 2][w];
                let p = [0.0, 1.0 / 6.0, 1.0][goods];
                vec![1.0 - p, p]
            })
            .collect();
        let s = SenderStrategy::mixed(2, 1, rows).unwrap();
        assert!(s.check(g).is_ok());
        s
    }

    fn intro_game() -> GameInstance {
        GameInstance::new(investment_game(0.5), make_perfect_channel(2).unwrap(), 2, 1).unwrap()
    }

    #[test]
    fn index_roundtrip() {
        let mut d = [0; 3];
        decode_index(11, 3, &mut d);
        assert_eq!(d, [1, 0, 2]);
        assert_eq!(encode_index(&d, 3), 11);
    }

    #[test]
    fn budgets() {
        let p = investment_game(0.5);
        let q = make_bsc(0.25).unwrap();
        assert!(matches!(
            GameInstance::new(p.clone(), q.clone(), 21, 1),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(matches!(
            GameInstance::new(p.clone(), q.clone(), 1, 13),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(GameInstance::new(p, q, 20, 11).is_ok());
    }

    #[test]
    fn one_shot_posteriors() {
        let g = GameInstance::new(investment_game(0.5), make_bsc(0.25).unwrap(), 1, 1).unwrap();
        // α = β = 0: send the state.
        let s = SenderStrategy::pure(1, 1, vec![0, 1]);
        let post = receiver_posteriors(&g, &s).unwrap();
        assert_abs_diff_eq!(post.get(0, 1).unwrap()[1], 0.75, epsilon = 1e-15);
        let silent = SenderStrategy::uninformative(&g);
        let post = receiver_posteriors(&g, &silent).unwrap();
        for y in 0..2 {
            assert_abs_diff_eq!(post.get(0, y).unwrap()[1], 0.5, epsilon = 1e-15);
        }
        let acts = best_reply(&g, &s, TieMode::Worst).unwrap();
        assert!(acts.iter().flatten().all(|&a| a == 0));
    }

    #[test]
    fn pairing_posteriors_and_values() {
        let g = intro_game();
        let s = pairing(&g);
        let post = receiver_posteriors(&g, &s).unwrap();
        assert_abs_diff_eq!(post.prob[1], 1.0 / 3.0, epsilon = 1e-15);
        let joint = &post.joint;
        // P(ω₁ = good, y = g) / P(g) = (6/8 + 1/8).
        assert_abs_diff_eq!(joint[(2 + 0) * 2 + 1] / post.prob[1], 7.0 / 8.0, epsilon = 1e-12);
        let best = evaluate_strategy(&g, &s, TieMode::Best).unwrap();
        assert_abs_diff_eq!(best.sender_value, 1.0 / 3.0, epsilon = 1e-12);
        assert_eq!(best.action_table[1], vec![1, 1]);
        let worst = evaluate_strategy(&g, &s, TieMode::Worst).unwrap();
        assert_eq!(worst.sender_value, 0.0);
    }

    #[test]
    fn select_half_is_two_sevenths() {
        let g = intro_game();
        // Disclose project 1 optimally, ignore project 2.
        let rows = (0..4)
            .map(|w| {
                let first_good = w >= 2;
                let p = if first_good { 1.0 } else { 1.0 / 7.0 };
                vec![1.0 - p, p]
            })
            .collect();
        let s = SenderStrategy::mixed(2, 1, rows).unwrap();
        let r = evaluate_strategy(&g, &s, TieMode::Best).unwrap();
        assert_abs_diff_eq!(r.sender_value, 2.0 / 7.0, epsilon = 1e-12);
    }

    #[test]
    fn martingale_and_converse_chain() {
        let g = GameInstance::new(investment_game(0.3), make_bsc(0.1).unwrap(), 3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cap = channel_capacity(g.channel(), CAPACITY_TOL).unwrap().capacity;
        for _ in 0..20 {
            let s = random_strategy(&g, &mut rng);
            let post = receiver_posteriors(&g, &s).unwrap();
            for m in mean_posteriors(&post) {
                assert_abs_diff_eq!(m[1], 0.3, epsilon = 1e-9);
            }
            let info = post.induced_splitting().information();
            assert!(info <= 2.0 / 3.0 * cap + 1e-6);
        }
    }

    #[test]
    fn one_shot_search_is_zero_under_worst_ties() {
        let g = GameInstance::new(investment_game(0.5), make_bsc(0.25).unwrap(), 1, 1).unwrap();
        let r = random_search_lower_bound(&g, 2000, 1, TieMode::Worst).unwrap();
        assert_eq!(r.value, 0.0);
        let again = random_search_lower_bound(&g, 2000, 1, TieMode::Worst).unwrap();
        assert_eq!(r.strategy, again.strategy);
    }

    #[test]
    fn intro_search_finds_pairing_value() {
        let g = intro_game();
        let r = random_search_lower_bound(&g, 100, 3, TieMode::Best).unwrap();
        assert!(r.value >= 1.0 / 3.0 - 1e-12, "{}", r.value);
        let bound = theorem1_upper_bound(&g).unwrap();
        assert_abs_diff_eq!(bound, 0.519, epsilon = 5e-3);
        let w = random_search_lower_bound(&g, 100, 3, TieMode::Worst).unwrap();
        assert!(w.value <= bound + 2e-3);
    }

    #[test]
    fn zero_capacity_gives_prior_payoff() {
        let useless = Channel::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let g = GameInstance::new(investment_game(0.9), useless, 2, 2).unwrap();
        let r = random_search_lower_bound(&g, 50, 0, TieMode::Worst).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(theorem1_upper_bound(&g).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn strategy_json_and_shape_checks() {
        let g = intro_game();
        let s = pairing(&g);
        let text = serde_json::to_string(&s).unwrap();
        let back: SenderStrategy = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"n":2,"k":1,"rows":[[0.5,0.6],[1,0],[1,0],[1,0]]}"#;
        assert!(serde_json::from_str::<SenderStrategy>(bad).is_err());
        let short = SenderStrategy::mixed(2, 1, vec![vec![1.0, 0.0]]).unwrap();
        assert!(evaluate_strategy(&g, &short, TieMode::Best).is_err());
        assert!("worst".parse::<TieMode>().is_ok());
        assert!("median".parse::<TieMode>().is_err());
        assert!(is_valid_strategy(&s));
    }
}
