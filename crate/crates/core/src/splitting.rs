//! Splittings: finite families of posteriors averaging to a prior.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::PersuasionProblem;
use crate::info::{entropy_of, Belief, Distribution, JointDistribution, PROB_TOL};

/// Bayes-plausibility tolerance (L1).
pub const PLAUSIBILITY_TOL: f64 = 1e-6;

/// One posterior and its probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub weight: f64,
    pub posterior: Belief,
}

/// A weighted family of posteriors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SplittingFile")]
pub struct Splitting {
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
struct SplittingFile {
    atoms: Vec<Atom>,
}

impl TryFrom<SplittingFile> for Splitting {
    type Error = Error;
    fn try_from(f: SplittingFile) -> Result<Self> {
        Splitting::from_atoms(f.atoms)
    }
}

impl Splitting {
    pub fn new(atoms: Vec<(f64, Belief)>) -> Result<Self> {
        Self::from_atoms(
            atoms
                .into_iter()
                .map(|(weight, posterior)| Atom { weight, posterior })
                .collect(),
        )
    }

    pub fn from_atoms(atoms: Vec<Atom>) -> Result<Self> {
        let Some(first) = atoms.first() else {
            return Err(Error::InvalidDistribution("splitting has no atoms".into()));
        };
        let ns = first.posterior.len();
        if let Some(i) = atoms.iter().position(|a| a.posterior.len() != ns) {
            return Err(Error::Dimension(format!(
                "atom {i} has a posterior over {} states, expected {ns}",
                atoms[i].posterior.len()
            )));
        }
        let w: Vec<f64> = atoms.iter().map(|a| a.weight).collect();
        Distribution::new(w).map_err(|e| match e {
            Error::InvalidDistribution(m) => Error::InvalidDistribution(format!("splitting weights: {m}")),
            other => other,
        })?;
        Ok(Self { atoms })
    }

    /// Build from raw weights and posteriors produced by a solver, renormalizing
    /// away rounding noise and dropping zero-weight atoms.
    pub(crate) fn from_raw(raw: Vec<(f64, Vec<f64>)>) -> Self {
        let total: f64 = raw.iter().map(|(w, _)| w.max(0.0)).sum();
        let atoms = raw
            .into_iter()
            .filter(|(w, _)| *w > 0.0)
            .map(|(w, v)| {
                let s: f64 = v.iter().map(|x| x.max(0.0)).sum();
                Atom {
                    weight: w / total,
                    posterior: Distribution::new(v.iter().map(|x| x.max(0.0) / s).collect())
                        .expect("normalized posterior"),
                }
            })
            .collect();
        Self { atoms }
    }

    /// The nonrevealing splitting `{(1, μ)}`.
    pub fn trivial(mu: &Belief) -> Self {
        Self {
            atoms: vec![Atom {
                weight: 1.0,
                posterior: mu.clone(),
            }],
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn num_states(&self) -> usize {
        self.atoms[0].posterior.len()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.weight).collect()
    }

    /// `Σ λ_m ν_m`.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.num_states()];
        for a in &self.atoms {
            for (acc, v) in m.iter_mut().zip(a.posterior.as_slice()) {
                *acc += a.weight * v;
            }
        }
        m
    }

    /// L1 distance between the mean posterior and `mu`.
    pub fn plausibility_gap(&self, mu: &[f64]) -> f64 {
        self.mean().iter().zip(mu).map(|(a, b)| (a - b).abs()).sum()
    }

    pub fn check_plausible(&self, mu: &Belief) -> Result<()> {
        if mu.len() != self.num_states() {
            return Err(Error::Dimension(format!(
                "prior over {} states, splitting over {}",
                mu.len(),
                self.num_states()
            )));
        }
        let gap = self.plausibility_gap(mu.as_slice());
        if gap > PLAUSIBILITY_TOL {
            return Err(Error::InvalidDistribution(format!(
                "splitting averages to a belief at L1 distance {gap:e} from the prior"
            )));
        }
        Ok(())
    }

    /// `Σ λ_m u*_S(ν_m)`.
    pub fn expected_payoff(&self, p: &PersuasionProblem) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * p.robust_at(a.posterior.as_slice()))
            .sum()
    }

    pub fn information(&self) -> f64 {
        let h_mean = entropy_of(&self.mean());
        let h_avg: f64 = self
            .atoms
            .iter()
            .map(|a| a.weight * entropy_of(a.posterior.as_slice()))
            .sum();
        (h_mean - h_avg).max(0.0)
    }

    /// Joint distribution of (message, state) with entries `λ_m ν_m(ω)`.
    pub fn joint(&self) -> JointDistribution {
        let rows: Vec<Vec<f64>> = self
            .atoms
            .iter()
            .map(|a| a.posterior.as_slice().iter().map(|v| a.weight * v).collect())
            .collect();
        let total: f64 = rows.iter().flatten().sum();
        debug_assert!((total - 1.0).abs() <= 10.0 * PROB_TOL);
        JointDistribution::from_rows(&rows).expect("splitting joint is a distribution")
    }
}

/// `H(Σ λ_m ν_m) − Σ λ_m H(ν_m)`.
pub fn splitting_information(s: &Splitting) -> f64 {
    s.information()
}
