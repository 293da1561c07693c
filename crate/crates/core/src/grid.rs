//! Candidate posterior sets for the envelope and splitting programs.

use crate::error::{Error, Result};
use crate::game::{sort_dedup, PersuasionProblem, IND_TOL};
use crate::solver::{ConstraintFn, SolverConfig};

/// Largest lattice the builder will enumerate.
pub const MAX_GRID_POINTS: usize = 400_000;

/// A finite set of posteriors with their robust payoff and constraint values.
#[derive(Debug, Clone)]
pub struct PosteriorGrid {
    ns: usize,
    points: Vec<f64>,
    pub(crate) u: Vec<f64>,
    pub(crate) g: Vec<f64>,
}

fn binom(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
        if r > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    r as usize
}

/// Number of points in the barycentric lattice of `ns` states at resolution `res`.
pub fn lattice_size(ns: usize, res: usize) -> usize {
    binom(res + ns - 1, ns - 1)
}

/// All beliefs with coordinates in `{0, 1/res, ..., 1}`, lexicographic order.
pub fn simplex_lattice(ns: usize, res: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut counts = vec![0usize; ns];
    fn rec(i: usize, left: usize, res: usize, counts: &mut [usize], out: &mut Vec<Vec<f64>>) {
        let ns = counts.len();
        if i + 1 == ns {
            counts[i] = left;
            out.push(counts.iter().map(|&c| c as f64 / res as f64).collect());
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            rec(i + 1, left - c, res, counts, out);
        }
    }
    rec(0, res, res, &mut counts, &mut out);
    out
}

impl PosteriorGrid {
    /// Grid for `p` at the resolution given by `cfg`: uniform points plus
    /// receiver indifference points and their one-sided neighbours, plus
    /// the prior.
    pub fn build(p: &PersuasionProblem, cfg: &SolverConfig, g: &dyn ConstraintFn) -> Result<Self> {
        let ns = p.num_states();
        let pts = if ns == 1 {
            vec![vec![1.0]]
        } else if ns == 2 {
            binary_points(p, cfg.grid.max(2), cfg.boundary_offset)
        } else {
            let res = cfg.simplex_grid.max(1);
            let size = lattice_size(ns, res);
            if size > MAX_GRID_POINTS {
                return Err(Error::BudgetExceeded(format!(
                    "lattice of {size} points for {ns} states at resolution {res}"
                )));
            }
            let mut pts = simplex_lattice(ns, res);
            inject_boundaries(p, res, cfg.boundary_offset, &mut pts);
            pts.push(p.prior().as_slice().to_vec());
            pts
        };
        Ok(Self::from_points(p, pts, g))
    }

    /// Grid from explicit posteriors.
    pub fn from_points(p: &PersuasionProblem, pts: Vec<Vec<f64>>, g: &dyn ConstraintFn) -> Self {
        let ns = p.num_states();
        let u = pts.iter().map(|v| p.robust_at(v)).collect();
        let gv = pts.iter().map(|v| g.eval(v)).collect();
        Self {
            ns,
            points: pts.concat(),
            u,
            g: gv,
        }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn num_states(&self) -> usize {
        self.ns
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.ns..(i + 1) * self.ns]
    }

    pub fn robust(&self, i: usize) -> f64 {
        self.u[i]
    }

    pub fn constraint(&self, i: usize) -> f64 {
        self.g[i]
    }

    pub fn min_constraint(&self) -> f64 {
        self.g.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Whether points are binary beliefs sorted by `ν(ω₁)`.
    pub(crate) fn is_binary(&self) -> bool {
        self.ns == 2
    }
}

fn binary_points(p: &PersuasionProblem, res: usize, offset: f64) -> Vec<Vec<f64>> {
    let mut xs: Vec<f64> = (0..=res).map(|i| i as f64 / res as f64).collect();
    let mut knots = p.indifference_points();
    knots.extend(p.sender_switch_points());
    for b in knots {
        for x in [b - offset, b, b + offset] {
            if (0.0..=1.0).contains(&x) {
                xs.push(x);
            }
        }
    }
    xs.push(p.prior()[1]);
    sort_dedup(&mut xs);
    xs.into_iter().map(|x| vec![1.0 - x, x]).collect()
}

/// Add points where pairwise receiver indifference hyperplanes cross lattice
/// edges, together with neighbours displaced by `offset` to either side.
fn inject_boundaries(p: &PersuasionProblem, res: usize, offset: f64, pts: &mut Vec<Vec<f64>>) {
    let ns = p.num_states();
    let na = p.num_actions();
    let lattice_len = pts.len();
    let step = 1.0 / res as f64;
    let ds = (offset / step).min(0.5);
    let mut extra = Vec::new();
    for a in 0..na {
        for b in a + 1..na {
            if p.receiver_equivalent(a, b) {
                continue;
            }
            let d = |v: &[f64]| p.receiver_expected(v, a) - p.receiver_expected(v, b);
            let both_optimal = |v: &[f64]| {
                let opt = p.optimal_actions_at(v, 1e3 * IND_TOL);
                opt.contains(&a) && opt.contains(&b)
            };
            for pt in pts.iter().take(lattice_len) {
                let d0 = d(pt);
                for i in 0..ns {
                    if pt[i] < step * 0.5 {
                        continue;
                    }
                    for j in i + 1..ns {
                        let mut q = pt.clone();
                        q[i] -= step;
                        q[j] += step;
                        let d1 = d(&q);
                        let along = |s: f64| -> Vec<f64> {
                            pt.iter().zip(&q).map(|(x, y)| x + s * (y - x)).collect()
                        };
                        let s = if d0 == 0.0 {
                            0.0
                        } else if d1 == 0.0 {
                            1.0
                        } else if d0 * d1 < 0.0 {
                            d0 / (d0 - d1)
                        } else {
                            continue;
                        };
                        let cross = along(s);
                        if !both_optimal(&cross) {
                            continue;
                        }
                        for t in [s - ds, s, s + ds] {
                            if (0.0..=1.0).contains(&t) {
                                extra.push(along(t));
                            }
                        }
                    }
                }
            }
        }
    }
    pts.extend(extra);
}
