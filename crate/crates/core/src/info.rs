//! Information-theoretic primitives over finite alphabets.
//!
//! All logarithms are base 2 and `0 log 0 = 0`. Probability vectors are
//! validated to tolerance [`PROB_TOL`]; inputs that do not sum to one are
//! rejected rather than renormalized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when validating probability vectors.
pub const PROB_TOL: f64 = 1e-9;

/// Default stopping tolerance (bits) for [`channel_capacity`].
pub const CAPACITY_TOL: f64 = 1e-9;

/// Iteration cap for the Blahut–Arimoto loop.
pub const CAPACITY_MAX_ITER: usize = 100_000;

fn check_weights(w: &[f64], what: &str) -> Result<()> {
    if w.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what}: empty support")));
    }
    for (i, &x) in w.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "{what}: entry {i} is {x}"
            )));
        }
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidDistribution(format!(
            "{what}: weights sum to {s}"
        )));
    }
    Ok(())
}

/// A probability vector over a finite indexed support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution(Vec<f64>);

/// Posterior beliefs are plain distributions over states.
pub type Belief = Distribution;

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights, "distribution")?;
        Ok(Self(weights))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution needs a nonempty support");
        Self(vec![1.0 / n as f64; n])
    }

    pub fn dirac(n: usize, i: usize) -> Self {
        assert!(i < n);
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        Self(w)
    }

    /// Binary distribution `(1 - p1, p1)`.
    pub fn binary(p1: f64) -> Result<Self> {
        Self::new(vec![1.0 - p1, p1])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(&self.0)
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.0
    }
}

/// A probability matrix over the product of two finite supports, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "joint of shape {rows}x{cols} with {} entries",
                data.len()
            )));
        }
        check_weights(&data, "joint distribution")?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged joint matrix".into()));
        }
        Self::new(r, c, rows.concat())
    }

    /// The joint `p(x) Q(y|x)` of an input distribution and a channel.
    pub fn from_channel(input: &Distribution, channel: &Channel) -> Result<Self> {
        if input.len() != channel.inputs() {
            return Err(Error::Dimension(format!(
                "input distribution has {} entries, channel has {} inputs",
                input.len(),
                channel.inputs()
            )));
        }
        let mut data = Vec::with_capacity(channel.inputs() * channel.outputs());
        for x in 0..channel.inputs() {
            data.extend(channel.row(x).iter().map(|q| input[x] * q));
        }
        Ok(Self {
            rows: channel.inputs(),
            cols: channel.outputs(),
            data,
        })
    }

    /// Independent product of two marginals.
    pub fn product(a: &Distribution, b: &Distribution) -> Self {
        let mut data = Vec::with_capacity(a.len() * b.len());
        for &x in a.as_slice() {
            data.extend(b.as_slice().iter().map(|y| x * y));
        }
        Self {
            rows: a.len(),
            cols: b.len(),
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        self.data.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_marginal(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.cols];
        for row in self.data.chunks(self.cols) {
            for (acc, v) in m.iter_mut().zip(row) {
                *acc += v;
            }
        }
        m
    }
}

/// A discrete memoryless channel `Q(y|x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelFile", into = "ChannelFile")]
pub struct Channel {
    inputs: usize,
    outputs: usize,
    matrix: Vec<f64>,
}

/// On-disk channel format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub inputs: usize,
    pub outputs: usize,
    pub matrix: Vec<Vec<f64>>,
}

impl TryFrom<ChannelFile> for Channel {
    type Error = Error;
    fn try_from(f: ChannelFile) -> Result<Self> {
        if f.matrix.len() != f.inputs {
            return Err(Error::InvalidChannel(format!(
                "declared {} inputs but matrix has {} rows",
                f.inputs,
                f.matrix.len()
            )));
        }
        if let Some((i, row)) = f
            .matrix
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != f.outputs)
        {
            return Err(Error::InvalidChannel(format!(
                "row {i} has {} entries, expected {}",
                row.len(),
                f.outputs
            )));
        }
        Channel::from_rows(&f.matrix)
    }
}

impl From<Channel> for ChannelFile {
    fn from(c: Channel) -> Self {
        ChannelFile {
            inputs: c.inputs,
            outputs: c.outputs,
            matrix: c.matrix.chunks(c.outputs).map(<[f64]>::to_vec).collect(),
        }
    }
}

impl Channel {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let inputs = rows.len();
        let outputs = rows.first().map_or(0, Vec::len);
        if inputs == 0 || outputs == 0 {
            return Err(Error::InvalidChannel("empty alphabet".into()));
        }
        for (x, row) in rows.iter().enumerate() {
            if row.len() != outputs {
                return Err(Error::InvalidChannel(format!("row {x} has wrong length")));
            }
            check_weights(row, &format!("channel row {x}"))
                .map_err(|e| Error::InvalidChannel(e.to_string()))?;
        }
        Ok(Self {
            inputs,
            outputs,
            matrix: rows.concat(),
        })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.matrix[x * self.outputs..(x + 1) * self.outputs]
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.matrix[x * self.outputs + y]
    }
}

/// Binary symmetric channel with crossover probability `eps`.
pub fn make_bsc(eps: f64) -> Result<Channel> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "BSC noise {eps} outside [0, 1/2]"
        )));
    }
    Channel::from_rows(&[vec![1.0 - eps, eps], vec![eps, 1.0 - eps]])
}

/// Noiseless channel with `m` messages.
pub fn make_perfect_channel(m: usize) -> Result<Channel> {
    if m < 1 {
        return Err(Error::InvalidParameter(
            "perfect channel needs at least one message".into(),
        ));
    }
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    Channel::from_rows(&rows)
}

/// Probability of receiving `y_seq` when `x_seq` is sent through `k` uses of `q`.
pub fn sequence_prob(q: &Channel, x_seq: &[usize], y_seq: &[usize]) -> Result<f64> {
    if x_seq.len() != y_seq.len() {
        return Err(Error::Dimension(format!(
            "input length {} vs output length {}",
            x_seq.len(),
            y_seq.len()
        )));
    }
    let mut p = 1.0;
    for (&x, &y) in x_seq.iter().zip(y_seq) {
        if x >= q.inputs() || y >= q.outputs() {
            return Err(Error::Dimension(format!(
                "symbol pair ({x}, {y}) outside the channel alphabets"
            )));
        }
        p *= q.prob(x, y);
    }
    Ok(p)
}

/// Entropy of a raw weight vector, no validation.
pub(crate) fn entropy_of(w: &[f64]) -> f64 {
    let h: f64 = w
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

/// Binary entropy function `H(p, 1 - p)`.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of(&[p, 1.0 - p])
}

pub fn entropy(p: &Distribution) -> f64 {
    entropy_of(p.as_slice())
}

/// KL divergence in bits; `f64::INFINITY` when `p` is not absolutely
/// continuous with respect to `q`.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension(format!(
            "KL between supports of size {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(kl_of(p.as_slice(), q.as_slice()))
}

pub(crate) fn kl_of(p: &[f64], q: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            d += a * (a / b).log2();
        }
    }
    d.max(0.0)
}

/// `I(X;Y)` of a joint distribution over rows `X` and columns `Y`.
pub fn mutual_information(j: &JointDistribution) -> f64 {
    let px = j.row_marginal();
    let hy = entropy_of(&j.col_marginal());
    let mut cond = 0.0;
    let mut buf = vec![0.0; j.cols()];
    for (x, &w) in px.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        for (c, b) in buf.iter_mut().enumerate() {
            *b = j.get(x, c) / w;
        }
        cond += w * entropy_of(&buf);
    }
    (hy - cond).max(0.0)
}

/// Result of a capacity computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Capacity {
    /// Capacity in bits per channel use.
    pub capacity: f64,
    /// An input distribution attaining it to within the tolerance.
    pub input: Distribution,
    pub iterations: usize,
    /// Final duality-gap bound in bits.
    pub gap: f64,
}

/// Blahut–Arimoto iteration with the standard upper/lower bound stopping rule.
pub fn channel_capacity(q: &Channel, tol: f64) -> Result<Capacity> {
    channel_capacity_with_cap(q, tol, CAPACITY_MAX_ITER)
}

/// Certified upper bound on the capacity. Falls back to the last
/// lower estimate plus its duality gap when the iteration cap is hit,
/// which happens for channels with nearly identical rows.
pub fn capacity_upper_bound(q: &Channel, tol: f64) -> Result<f64> {
    match channel_capacity(q, tol) {
        Ok(c) => Ok(c.capacity + c.gap.max(0.0)),
        Err(Error::IterationLimit { gap, best_capacity, .. }) => Ok(best_capacity + gap.max(0.0)),
        Err(e) => Err(e),
    }
}

pub fn channel_capacity_with_cap(q: &Channel, tol: f64, max_iter: usize) -> Result<Capacity> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be > 0")));
    }
    let nx = q.inputs();
    let ny = q.outputs();
    let ln2 = std::f64::consts::LN_2;
    let mut p = vec![1.0 / nx as f64; nx];
    let mut out = vec![0.0; ny];
    let mut c = vec![0.0; nx];
    let mut lower = 0.0;
    let mut gap = f64::INFINITY;
    for it in 1..=max_iter {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (x, &px) in p.iter().enumerate() {
            for (y, o) in out.iter_mut().enumerate() {
                *o += px * q.prob(x, y);
            }
        }
        for (x, cx) in c.iter_mut().enumerate() {
            let d: f64 = q
                .row(x)
                .iter()
                .zip(&out)
                .filter(|(&qy, _)| qy > 0.0)
                .map(|(&qy, &oy)| qy * (qy / oy).ln())
                .sum();
            *cx = d.exp();
        }
        let z: f64 = p.iter().zip(&c).map(|(a, b)| a * b).sum();
        let cmax = c.iter().cloned().fold(f64::MIN, f64::max);
        lower = z.ln() / ln2;
        gap = (cmax.ln() - z.ln()) / ln2;
        for (px, cx) in p.iter_mut().zip(&c) {
            *px *= cx / z;
        }
        if gap < tol {
            return Ok(Capacity {
                capacity: lower.max(0.0),
                input: Distribution(p),
                iterations: it,
                gap: gap.max(0.0),
            });
        }
    }
    Err(Error::IterationLimit {
        iterations: max_iter,
        gap,
        best_capacity: lower.max(0.0),
        best_input: p,
    })
}
