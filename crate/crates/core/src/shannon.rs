//! Random-coding construction: codebooks, joint-typicality encoding and
//! decoding, exact receiver posteriors under a fixed codebook, and
//! Monte-Carlo runs of the induced game.

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_game::{decode_index, MAX_STATE_SEQS};
use crate::game::{worst_action_radius, PersuasionProblem, IND_TOL};
use crate::info::{
    channel_capacity, kl_of, mutual_information, Belief, Channel, Distribution, JointDistribution,
    CAPACITY_TOL,
};
use crate::solver::value;
use crate::splitting::Splitting;

/// Largest codebook, in indices.
pub const MAX_CODEBOOK: usize = 1 << 24;
/// Largest output-sequence space enumerated for the exact expected payoff.
pub const MAX_EXACT_OUTPUTS: usize = 1 << 20;
/// Random probes per atom when estimating the worst-action radius.
pub const RADIUS_PROBES: usize = 64;

pub const DEFAULT_ETA: f64 = 0.001;
pub const DEFAULT_DELTA: f64 = 0.25;
pub const DEFAULT_GAMMA: f64 = 0.1;

/// Parameters of one coding run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodingParams {
    pub n: usize,
    pub k: usize,
    /// Rate slack in bits.
    pub eta: f64,
    /// Typicality tolerance, L1 over joint frequencies.
    pub delta: f64,
    pub seed: u64,
    pub input_dist: Distribution,
    /// Belief-closeness radius; `None` derives it from the splitting.
    pub alpha: Option<f64>,
    pub gamma: f64,
}

impl CodingParams {
    pub fn new(n: usize, k: usize, seed: u64, input_dist: Distribution) -> Self {
        Self {
            n,
            k,
            eta: DEFAULT_ETA,
            delta: DEFAULT_DELTA,
            seed,
            input_dist,
            alpha: None,
            gamma: DEFAULT_GAMMA,
        }
    }

    /// Parameters with the capacity-achieving input distribution of `q`.
    pub fn for_channel(n: usize, k: usize, seed: u64, q: &Channel) -> Result<Self> {
        let cap = channel_capacity(q, CAPACITY_TOL)?;
        Ok(Self::new(n, k, seed, cap.input))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if !(self.eta > 0.0) {
            return Err(Error::InvalidParameter(format!("eta {} must be positive", self.eta)));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidParameter(format!("delta {} must be positive", self.delta)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidParameter(format!("gamma {} must lie in (0, 1)", self.gamma)));
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0) {
                return Err(Error::InvalidParameter(format!("alpha {a} must be positive")));
            }
        }
        Ok(())
    }

    /// Code rate `R = I(s) + η`.
    pub fn rate(&self, s: &Splitting) -> f64 {
        s.information() + self.eta
    }

    /// Check `R ≤ (k/n) I(p; Q) − η` and return `R`. Channels of zero capacity
    /// are accepted as is: nothing is transmitted whatever the rate.
    pub fn check_rate(&self, s: &Splitting, q: &Channel) -> Result<f64> {
        self.validate()?;
        if self.input_dist.len() != q.inputs() {
            return Err(Error::Dimension(format!(
                "input distribution over {} symbols, channel has {}",
                self.input_dist.len(),
                q.inputs()
            )));
        }
        let r = self.rate(s);
        if channel_capacity(q, CAPACITY_TOL)?.capacity <= 1e-12 {
            return Ok(r);
        }
        let mi = mutual_information(&JointDistribution::from_channel(&self.input_dist, q)?);
        let budget = self.k as f64 / self.n as f64 * mi - self.eta;
        if r > budget {
            return Err(Error::InvalidParameter(format!(
                "rate {r:.6} exceeds (k/n) I(X;Y) - eta = {budget:.6}"
            )));
        }
        Ok(r)
    }
}

/// Number of codebook indices `2^⌈n R⌉`.
pub fn codebook_size(n: usize, rate: f64) -> Result<usize> {
    let bits = (n as f64 * rate).ceil().max(0.0);
    if bits > 24.0 {
        return Err(Error::BudgetExceeded(format!(
            "codebook of 2^{bits} indices exceeds 2^24"
        )));
    }
    Ok(1usize << bits as u32)
}

/// Perturb `s` so that every atom has a strict sender-worst optimal action
/// and the information drops to at most `(1 - slack) I(s)`.
///
/// Atoms on an indifference boundary are moved along the ray from the prior
/// by a factor `1 ± slack`, whichever side pays the sender more. The other
/// atoms are pulled toward the prior by a common factor of at most
/// `1 - slack`. Weights are rescaled so the mean is unchanged.
pub fn prepare_splitting(p: &PersuasionProblem, s: &Splitting, slack: f64) -> Result<Splitting> {
    if !(0.0..1.0).contains(&slack) {
        return Err(Error::InvalidParameter(format!("slack {slack} must lie in [0, 1)")));
    }
    let mu = s.mean();
    let atoms = s.atoms();
    let moved = |v: &[f64], kappa: f64| -> Vec<f64> {
        v.iter().zip(&mu).map(|(x, m)| m + kappa * (x - m)).collect()
    };
    let in_simplex = |v: &[f64]| v.iter().all(|&x| x >= 0.0);
    let strict = |v: &[f64]| -> bool {
        Distribution::new(v.to_vec())
            .ok()
            .and_then(|b| worst_action_radius(p, &b, 0).ok())
            .is_some_and(|r| r > 0.0)
    };

    // An atom is interior when pulling it toward the prior keeps its strict
    // worst action; otherwise it sits on or just past a boundary.
    let actions: Vec<usize> = atoms
        .iter()
        .map(|a| p.worst_action_at(a.posterior.as_slice(), IND_TOL))
        .collect();
    let mut kappa: Vec<Option<f64>> = vec![None; atoms.len()];
    for (i, a) in atoms.iter().enumerate() {
        let v = a.posterior.as_slice();
        let pulled = moved(v, 1.0 - slack);
        if strict(v) && p.worst_action_at(&pulled, IND_TOL) == actions[i] {
            continue;
        }
        if slack == 0.0 {
            return Err(Error::Perturbation {
                atom: i,
                reason: "atom sits on an indifference boundary and slack is zero".into(),
            });
        }
        let mut best: Option<(f64, f64)> = None;
        for k in [1.0 + slack, 1.0 - slack] {
            let w = moved(v, k);
            if in_simplex(&w) && strict(&w) {
                let pay = p.robust_at(&w);
                if best.map_or(true, |(_, b)| pay > b) {
                    best = Some((k, pay));
                }
            }
        }
        match best {
            Some((k, _)) => kappa[i] = Some(k),
            None => {
                return Err(Error::Perturbation {
                    atom: i,
                    reason: "moving the atom toward or away from the prior keeps a tie".into(),
                })
            }
        }
    }

    let build = |inner: f64| -> Vec<(f64, Vec<f64>)> {
        atoms
            .iter()
            .zip(&kappa)
            .map(|(a, k)| {
                let k = k.unwrap_or(inner);
                (a.weight / k, moved(a.posterior.as_slice(), k))
            })
            .collect()
    };
    let info_of = |inner: f64| Splitting::from_raw(build(inner)).information();

    let target = (1.0 - slack) * s.information();
    let cap = 1.0 - slack;
    let floor = 1e-9;
    let inner = if slack == 0.0 || info_of(cap) <= target {
        cap
    } else if info_of(floor) > target {
        return Err(Error::Perturbation {
            atom: kappa.iter().position(Option::is_some).unwrap_or(0),
            reason: "boundary atoms alone exceed the reduced information budget".into(),
        });
    } else {
        let (mut lo, mut hi) = (floor, cap);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if info_of(mid) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let out = Splitting::from_raw(build(inner));
    for (i, a) in out.atoms().iter().enumerate() {
        let v = a.posterior.as_slice();
        if !strict(v) || (kappa[i].is_none() && p.worst_action_at(v, IND_TOL) != actions[i]) {
            return Err(Error::Perturbation {
                atom: i,
                reason: "perturbed atom lost its strict worst action".into(),
            });
        }
    }
    Ok(out)
}

fn joint_l1(a: &[usize], b: &[usize], target: &JointDistribution, counts: &mut [f64]) -> f64 {
    let cols = target.cols();
    counts.iter_mut().for_each(|c| *c = 0.0);
    let inv = 1.0 / a.len() as f64;
    for (&x, &y) in a.iter().zip(b) {
        counts[x * cols + y] += inv;
    }
    counts
        .iter()
        .zip(target.as_slice())
        .map(|(c, t)| (c - t).abs())
        .sum()
}

/// Whether the empirical pair frequencies of `(a, b)` are within L1
/// distance `delta` of `target`.
pub fn is_jointly_typical(a: &[usize], b: &[usize], target: &JointDistribution, delta: f64) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "sequences of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InvalidParameter("empty sequences have no empirical frequency".into()));
    }
    if a.iter().any(|&x| x >= target.rows()) || b.iter().any(|&y| y >= target.cols()) {
        return Err(Error::Dimension("symbol outside the target alphabet".into()));
    }
    let mut counts = vec![0.0; target.rows() * target.cols()];
    Ok(joint_l1(a, b, target, &mut counts) <= delta)
}

/// Family of message words `m^n(j)` and input words `x^k(j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub n: usize,
    pub k: usize,
    pub rate: f64,
    messages: Vec<u32>,
    inputs: Vec<u32>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        if self.n > 0 {
            self.messages.len() / self.n
        } else {
            self.inputs.len() / self.k.max(1)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn message_word(&self, j: usize) -> Vec<usize> {
        self.messages[j * self.n..(j + 1) * self.n]
            .iter()
            .map(|&m| m as usize)
            .collect()
    }

    pub fn input_word(&self, j: usize) -> Vec<usize> {
        self.inputs[j * self.k..(j + 1) * self.k]
            .iter()
            .map(|&x| x as usize)
            .collect()
    }

    /// Build from explicit words.
    pub fn from_words(messages: &[Vec<usize>], inputs: &[Vec<usize>]) -> Result<Self> {
        if messages.len() != inputs.len() || messages.is_empty() {
            return Err(Error::Dimension("need equally many, and at least one, message and input words".into()));
        }
        let n = messages[0].len();
        let k = inputs[0].len();
        if messages.iter().any(|w| w.len() != n) || inputs.iter().any(|w| w.len() != k) {
            return Err(Error::Dimension("codebook words of unequal length".into()));
        }
        Ok(Self {
            n,
            k,
            rate: (messages.len() as f64).log2() / n.max(1) as f64,
            messages: messages.iter().flatten().map(|&m| m as u32).collect(),
            inputs: inputs.iter().flatten().map(|&x| x as u32).collect(),
        })
    }
}

/// Draw a codebook of `2^⌈nR⌉` words: messages i.i.d. from the splitting
/// weights, inputs i.i.d. from `params.input_dist`.
pub fn sample_codebook(params: &CodingParams, s: &Splitting) -> Result<Codebook> {
    params.validate()?;
    let rate = params.rate(s);
    let size = codebook_size(params.n, rate)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let msg = WeightedIndex::new(s.weights()).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let inp = WeightedIndex::new(params.input_dist.as_slice())
        .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let mut messages = Vec::with_capacity(size * params.n);
    let mut inputs = Vec::with_capacity(size * params.k);
    for _ in 0..size {
        messages.extend((0..params.n).map(|_| msg.sample(&mut rng) as u32));
        inputs.extend((0..params.k).map(|_| inp.sample(&mut rng) as u32));
    }
    Ok(Codebook {
        n: params.n,
        k: params.k,
        rate,
        messages,
        inputs,
    })
}

/// Joint law `(λ_m ν_m(ω))` with states as rows and messages as columns.
pub fn state_message_joint(s: &Splitting) -> JointDistribution {
    let ns = s.num_states();
    let nm = s.len();
    let mut data = vec![0.0; ns * nm];
    for (m, a) in s.atoms().iter().enumerate() {
        for w in 0..ns {
            data[w * nm + m] = a.weight * a.posterior[w];
        }
    }
    JointDistribution::new(ns, nm, data).expect("splitting joint")
}

fn lowest_typical(cb: &Codebook, omega: &[usize], target: &JointDistribution, delta: f64, counts: &mut [f64]) -> Option<usize> {
    let mut msgs = vec![0; cb.n];
    (0..cb.len()).find(|&j| {
        for (d, &m) in msgs.iter_mut().zip(&cb.messages[j * cb.n..(j + 1) * cb.n]) {
            *d = m as usize;
        }
        joint_l1(omega, &msgs, target, counts) <= delta
    })
}

/// Lowest index `j` whose message word is jointly typical with `omega_seq`.
pub fn encode(cb: &Codebook, omega_seq: &[usize], s: &Splitting, delta: f64) -> Result<Option<usize>> {
    if omega_seq.len() != cb.n {
        return Err(Error::Dimension(format!(
            "state sequence of length {}, codebook has n = {}",
            omega_seq.len(),
            cb.n
        )));
    }
    let target = state_message_joint(s);
    if omega_seq.iter().any(|&w| w >= target.rows()) {
        return Err(Error::Dimension("state symbol out of range".into()));
    }
    let mut counts = vec![0.0; target.rows() * target.cols()];
    Ok(lowest_typical(cb, omega_seq, &target, delta, &mut counts))
}

/// The unique index whose input word is jointly typical with `y_seq` under
/// `p(x) Q(y|x)`; `None` when there is no such index or more than one.
pub fn decode(cb: &Codebook, y_seq: &[usize], input_dist: &Distribution, q: &Channel, delta: f64) -> Result<Option<usize>> {
    if y_seq.len() != cb.k {
        return Err(Error::Dimension(format!(
            "output sequence of length {}, codebook has k = {}",
            y_seq.len(),
            cb.k
        )));
    }
    if y_seq.iter().any(|&y| y >= q.outputs()) {
        return Err(Error::Dimension("output symbol out of range".into()));
    }
    if cb.k == 0 {
        return Ok((cb.len() == 1).then_some(0));
    }
    let target = JointDistribution::from_channel(input_dist, q)?;
    let mut counts = vec![0.0; target.rows() * target.cols()];
    Ok(decode_with(cb, y_seq, &target, delta, &mut counts))
}

fn decode_with(cb: &Codebook, y: &[usize], target: &JointDistribution, delta: f64, counts: &mut [f64]) -> Option<usize> {
    let mut found = None;
    let mut x = vec![0; cb.k];
    for j in 0..cb.len() {
        for (d, &s) in x.iter_mut().zip(&cb.inputs[j * cb.k..(j + 1) * cb.k]) {
            *d = s as usize;
        }
        if joint_l1(&x, y, target, counts) <= delta {
            if found.is_some() {
                return None;
            }
            found = Some(j);
        }
    }
    found
}

/// Deterministic encoder over all state sequences, and the mass
/// `W[j][t][ω] = P(encoder sends j, ω_t = ω)`.
#[derive(Debug, Clone)]
pub struct EncoderTable {
    n: usize,
    ns: usize,
    /// Encoded index per state sequence; `None` on encoding failure.
    pub index: Vec<Option<usize>>,
    mass: Vec<f64>,
    /// Probability that encoding fails.
    pub failure_prob: f64,
}

impl EncoderTable {
    /// Failed encodings send input word 0.
    pub fn build(cb: &Codebook, s: &Splitting, delta: f64) -> Result<Self> {
        let ns = s.num_states();
        let n = cb.n;
        let mut count: usize = 1;
        for _ in 0..n {
            count = count
                .checked_mul(ns)
                .filter(|&c| c <= MAX_STATE_SEQS)
                .ok_or_else(|| Error::BudgetExceeded(format!("{ns}^{n} state sequences exceed 2^20")))?;
        }
        let target = state_message_joint(s);
        let mu = s.mean();
        let index: Vec<Option<usize>> = (0..count)
            .into_par_iter()
            .map_init(
                || (vec![0; n], vec![0.0; target.rows() * target.cols()]),
                |(w, counts), i| {
                    decode_index(i, ns, w);
                    lowest_typical(cb, w, &target, delta, counts)
                },
            )
            .collect();
        let mut mass = vec![0.0; cb.len() * n * ns];
        let mut failure_prob = 0.0;
        let mut w = vec![0; n];
        for (i, j) in index.iter().enumerate() {
            decode_index(i, ns, &mut w);
            let p: f64 = w.iter().map(|&x| mu[x]).product();
            if j.is_none() {
                failure_prob += p;
            }
            let base = j.unwrap_or(0) * n * ns;
            for (t, &x) in w.iter().enumerate() {
                mass[base + t * ns + x] += p;
            }
        }
        Ok(Self {
            n,
            ns,
            index,
            mass,
            failure_prob,
        })
    }

    /// `P(y^k, ω_t = ω)` for every `t`, laid out `[t][ω]`, given the
    /// likelihoods `Q^k(y^k | x^k(j))`.
    fn joint_given(&self, lik: &[f64]) -> Vec<f64> {
        let width = self.n * self.ns;
        let mut out = vec![0.0; width];
        for (j, &l) in lik.iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            for (o, m) in out.iter_mut().zip(&self.mass[j * width..(j + 1) * width]) {
                *o += l * m;
            }
        }
        out
    }

    fn posteriors_from(&self, joint: &[f64]) -> Option<Vec<Belief>> {
        let tot: f64 = joint[..self.ns].iter().sum();
        if tot <= 0.0 {
            return None;
        }
        Some(
            joint
                .chunks(self.ns)
                .map(|row| {
                    let s: f64 = row.iter().sum();
                    Distribution::new(row.iter().map(|v| v / s).collect()).expect("posterior")
                })
                .collect(),
        )
    }
}

fn likelihoods(cb: &Codebook, q: &Channel, y: &[usize]) -> Vec<f64> {
    (0..cb.len())
        .map(|j| {
            cb.inputs[j * cb.k..(j + 1) * cb.k]
                .iter()
                .zip(y)
                .map(|(&x, &yy)| q.prob(x as usize, yy))
                .product()
        })
        .collect()
}

/// Exact stage posteriors `ν_{t, y^k}` under the lowest-index encoder with
/// the given typicality tolerance. Returns the prior at every stage when
/// `y_seq` has probability zero.
pub fn stage_posteriors(cb: &Codebook, s: &Splitting, q: &Channel, y_seq: &[usize], delta: f64) -> Result<Vec<Belief>> {
    if y_seq.len() != cb.k {
        return Err(Error::Dimension(format!(
            "output sequence of length {}, codebook has k = {}",
            y_seq.len(),
            cb.k
        )));
    }
    let table = EncoderTable::build(cb, s, delta)?;
    let joint = table.joint_given(&likelihoods(cb, q, y_seq));
    Ok(table.posteriors_from(&joint).unwrap_or_else(|| {
        let mu = Distribution::new(s.mean()).expect("splitting mean");
        vec![mu; cb.n]
    }))
}

/// Outcome of one simulated play.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub omega_seq: Vec<usize>,
    pub encode_ok: bool,
    pub j: Option<usize>,
    pub j_hat: Option<usize>,
    pub error_flag: bool,
    pub typical_fraction: f64,
    pub in_b: bool,
    pub realized_payoff: f64,
    pub action_match_fraction: f64,
}

/// Aggregates over the trials of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub rate: f64,
    pub codebook_size: usize,
    pub eta: f64,
    pub delta: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub encode_failure_rate: f64,
    /// Among encoded trials, the share decoded to a different index or not at all.
    pub decode_failure_rate: f64,
    pub error_rate: f64,
    pub error_std_error: f64,
    pub mean_typical_fraction: f64,
    pub b_rate: f64,
    pub mean_payoff: f64,
    pub payoff_std_error: f64,
    /// Expected payoff of this codebook over all states and outputs, when
    /// the output space is small enough to enumerate.
    pub exact_payoff: Option<f64>,
    pub upper_bound: f64,
    /// Per-stage mean posterior over trials, and its standard error.
    pub mean_posterior: Vec<Vec<f64>>,
    pub posterior_std_error: Vec<Vec<f64>>,
    pub outcomes: Vec<TrialOutcome>,
}

/// Default closeness radius: `α²/(2 ln 2)` equals half the smallest
/// worst-action radius over the atoms.
pub fn default_alpha(p: &PersuasionProblem, s: &Splitting) -> Result<f64> {
    let mut r = f64::INFINITY;
    for (i, a) in s.atoms().iter().enumerate() {
        let ri = worst_action_radius(p, &a.posterior, RADIUS_PROBES).map_err(|e| Error::Perturbation {
            atom: i,
            reason: e.to_string(),
        })?;
        r = r.min(ri);
    }
    if !r.is_finite() {
        // No probe changes the action anywhere: any radius works.
        return Ok(1.0);
    }
    Ok((std::f64::consts::LN_2 * r).sqrt())
}

fn std_error(values: impl Iterator<Item = f64> + Clone, count: usize) -> f64 {
    if count < 2 {
        return 0.0;
    }
    let mean = values.clone().sum::<f64>() / count as f64;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
    (var / count as f64).sqrt()
}

/// Run `trials` independent plays with one codebook drawn from
/// `params.seed`. Trial `i` draws its randomness from stream `i + 1` of the
/// same seed, so the report does not depend on the thread count.
pub fn run_simulation(
    p: &PersuasionProblem,
    q: &Channel,
    s: &Splitting,
    params: &CodingParams,
    trials: usize,
) -> Result<SimulationReport> {
    if s.num_states() != p.num_states() {
        return Err(Error::Dimension(format!(
            "splitting over {} states, problem has {}",
            s.num_states(),
            p.num_states()
        )));
    }
    let rate = params.check_rate(s, q)?;
    let mu = Distribution::new(s.mean())?;
    let p = p.with_prior(mu.clone())?;
    let alpha = match params.alpha {
        Some(a) => a,
        None => default_alpha(&p, s)?,
    };
    let kl_cap = alpha * alpha / (2.0 * std::f64::consts::LN_2);
    let cb = sample_codebook(params, s)?;
    let table = EncoderTable::build(&cb, s, params.delta)?;
    let xy_target = JointDistribution::from_channel(&params.input_dist, q)?;
    let atom_actions: Vec<usize> = s
        .atoms()
        .iter()
        .map(|a| p.worst_action_at(a.posterior.as_slice(), IND_TOL))
        .collect();
    let prior_action = p.worst_action_at(mu.as_slice(), IND_TOL);
    let ns = p.num_states();
    let n = params.n;
    let omega_law = WeightedIndex::new(mu.as_slice()).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let rows: Vec<WeightedIndex<f64>> = (0..q.inputs())
        .map(|x| WeightedIndex::new(q.row(x)).expect("channel rows are distributions"))
        .collect();

    let run_trial = |i: usize| -> (TrialOutcome, Vec<Vec<f64>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(i as u64 + 1);
        let omega: Vec<usize> = (0..n).map(|_| omega_law.sample(&mut rng)).collect();
        let idx = omega.iter().fold(0, |acc, &w| acc * ns + w);
        let j = table.index[idx];
        let sent = j.unwrap_or(0);
        let y: Vec<usize> = cb.inputs[sent * cb.k..(sent + 1) * cb.k]
            .iter()
            .map(|&x| rows[x as usize].sample(&mut rng))
            .collect();
        let mut counts = vec![0.0; xy_target.rows() * xy_target.cols()];
        let j_hat = if cb.k == 0 {
            (cb.len() == 1).then_some(0)
        } else {
            decode_with(&cb, &y, &xy_target, params.delta, &mut counts)
        };
        let error_flag = j.is_none() || j_hat != j;
        let joint = table.joint_given(&likelihoods(&cb, q, &y));
        let post = table
            .posteriors_from(&joint)
            .unwrap_or_else(|| vec![mu.clone(); n]);
        let msgs = &cb.messages[sent * n..(sent + 1) * n];
        let (mut pay, mut close, mut matched) = (0.0, 0usize, 0usize);
        for t in 0..n {
            let nu = post[t].as_slice();
            let a = if joint[..ns].iter().sum::<f64>() > 0.0 {
                p.worst_action_at(nu, IND_TOL)
            } else {
                prior_action
            };
            pay += p.sender_payoff(omega[t], a);
            let m = msgs[t] as usize;
            if kl_of(nu, s.atoms()[m].posterior.as_slice()) <= kl_cap {
                close += 1;
            }
            if a == atom_actions[m] {
                matched += 1;
            }
        }
        let typical_fraction = close as f64 / n as f64;
        let outcome = TrialOutcome {
            omega_seq: omega,
            encode_ok: j.is_some(),
            j,
            j_hat,
            error_flag,
            typical_fraction,
            in_b: !error_flag && typical_fraction >= 1.0 - params.gamma,
            realized_payoff: pay / n as f64,
            action_match_fraction: matched as f64 / n as f64,
        };
        (outcome, post.into_iter().map(Distribution::into_vec).collect())
    };

    let results: Vec<(TrialOutcome, Vec<Vec<f64>>)> = (0..trials).into_par_iter().map(run_trial).collect();
    let tf = trials.max(1) as f64;
    let outcomes: Vec<TrialOutcome> = results.iter().map(|r| r.0.clone()).collect();
    let encoded = outcomes.iter().filter(|o| o.encode_ok).count();
    let decode_fail = outcomes.iter().filter(|o| o.encode_ok && o.j_hat != o.j).count();
    let errs = outcomes.iter().map(|o| if o.error_flag { 1.0 } else { 0.0 });
    let pays = outcomes.iter().map(|o| o.realized_payoff);
    let mut mean_posterior = vec![vec![0.0; ns]; n];
    for (_, post) in &results {
        for (acc, nu) in mean_posterior.iter_mut().zip(post) {
            for (a, v) in acc.iter_mut().zip(nu) {
                *a += v / tf;
            }
        }
    }
    let posterior_std_error = (0..n)
        .map(|t| {
            (0..ns)
                .map(|w| std_error(results.iter().map(move |r| r.1[t][w]), trials))
                .collect()
        })
        .collect();

    Ok(SimulationReport {
        n,
        k: params.k,
        trials,
        seed: params.seed,
        rate,
        codebook_size: cb.len(),
        eta: params.eta,
        delta: params.delta,
        alpha,
        gamma: params.gamma,
        encode_failure_rate: (trials - encoded) as f64 / tf,
        decode_failure_rate: if encoded > 0 { decode_fail as f64 / encoded as f64 } else { 0.0 },
        error_rate: errs.clone().sum::<f64>() / tf,
        error_std_error: std_error(errs, trials),
        mean_typical_fraction: outcomes.iter().map(|o| o.typical_fraction).sum::<f64>() / tf,
        b_rate: outcomes.iter().filter(|o| o.in_b).count() as f64 / tf,
        mean_payoff: pays.clone().sum::<f64>() / tf,
        payoff_std_error: std_error(pays, trials),
        exact_payoff: exact_codebook_payoff(&p, q, &cb, &table)?,
        upper_bound: value(&p, params.k as f64 / n as f64 * channel_capacity(q, CAPACITY_TOL)?.capacity)?.value,
        mean_posterior,
        posterior_std_error,
        outcomes,
    })
}

/// Expected sender payoff of the codebook with sender-worst replies, by
/// enumeration of all output sequences; `None` beyond the enumeration cap.
pub fn exact_codebook_payoff(
    p: &PersuasionProblem,
    q: &Channel,
    cb: &Codebook,
    table: &EncoderTable,
) -> Result<Option<f64>> {
    let ny = q.outputs();
    let mut count: usize = 1;
    for _ in 0..cb.k {
        match count.checked_mul(ny).filter(|&c| c <= MAX_EXACT_OUTPUTS) {
            Some(c) => count = c,
            None => return Ok(None),
        }
    }
    let ns = p.num_states();
    let n = cb.n;
    let chunk = 4096;
    let starts: Vec<usize> = (0..count).step_by(chunk).collect();
    let parts: Vec<f64> = starts
        .par_iter()
        .map(|&start| {
            let mut y = vec![0; cb.k];
            let mut total = 0.0;
            for yi in start..(start + chunk).min(count) {
                decode_index(yi, ny, &mut y);
                let joint = table.joint_given(&likelihoods(cb, q, &y));
                for t in 0..n {
                    let row = &joint[t * ns..(t + 1) * ns];
                    let py: f64 = row.iter().sum();
                    if py <= 0.0 {
                        continue;
                    }
                    let nu: Vec<f64> = row.iter().map(|v| v / py).collect();
                    let a = p.worst_action_at(&nu, IND_TOL);
                    total += (0..ns).map(|w| row[w] * p.sender_payoff(w, a)).sum::<f64>();
                }
            }
            total
        })
        .collect();
    Ok(Some(parts.iter().sum::<f64>() / n as f64))
}
