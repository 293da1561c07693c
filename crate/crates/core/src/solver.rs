//! Optimal splitting under an information constraint.
//!
//! `V(μ, c) = sup { Σ λ_m u*_S(ν_m) : Σ λ_m ν_m = μ, g(μ) − Σ λ_m g(ν_m) ≤ c }`
//! is computed through its Lagrangian dual
//! `inf_{t ≥ 0} cav(u*_S + t g)(μ) − t (g(μ) − c)` over a posterior grid, with
//! the primal splitting recovered from the envelope faces at the minimizing
//! multiplier. A direct grid LP of the primal is kept as an independent oracle.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{binary_cav_at, binary_envelope_knots, PersuasionProblem, IND_TOL};
use crate::grid::PosteriorGrid;
use crate::info::{entropy_of, Belief, Distribution};
use crate::lp;
use crate::splitting::Splitting;

/// A concave constraint function `g` on beliefs; the information used by a
/// splitting is `g(μ) − Σ λ_m g(ν_m)`.
pub trait ConstraintFn: Sync {
    fn eval(&self, nu: &[f64]) -> f64;
}

/// Shannon entropy in bits, the default constraint.
#[derive(Debug, Clone, Copy, Default)]
pub struct Entropy;

impl ConstraintFn for Entropy {
    fn eval(&self, nu: &[f64]) -> f64 {
        entropy_of(nu)
    }
}

/// Wraps a closure as a constraint function.
pub struct FnConstraint<F>(pub F);

impl<F: Fn(&[f64]) -> f64 + Sync> ConstraintFn for FnConstraint<F> {
    fn eval(&self, nu: &[f64]) -> f64 {
        (self.0)(nu)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Uniform grid resolution for binary state spaces.
    pub grid: usize,
    /// Barycentric lattice resolution for three or more states.
    pub simplex_grid: usize,
    /// Tolerance of the multiplier search.
    pub tol: f64,
    /// Displacement of boundary candidates off receiver indifference points.
    pub boundary_offset: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid: 2000,
            simplex_grid: 40,
            tol: 1e-6,
            boundary_offset: 1e-7,
        }
    }
}

impl SolverConfig {
    /// Same resolution for binary and larger state spaces.
    pub fn with_resolution(res: usize) -> Self {
        Self {
            grid: res,
            simplex_grid: res,
            ..Self::default()
        }
    }
}

/// Solution of the constrained splitting problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstrainedValue {
    pub value: f64,
    pub splitting: Splitting,
    /// Shadow price of the constraint, in payoff units per bit.
    pub multiplier: f64,
    pub binding: bool,
    /// Information used by `splitting`.
    pub info_used: f64,
}

/// Solution of the multi-type problem with a shared budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeterogeneousValue {
    pub value: f64,
    pub splittings: Vec<Splitting>,
    pub multiplier: f64,
    pub binding: bool,
    pub info_used: f64,
}

fn check_budget(c: f64) -> Result<()> {
    if !(c >= 0.0) || c.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "information budget {c} must be a finite nonnegative number"
        )));
    }
    Ok(())
}

/// Upper end of the multiplier search: beyond it the constraint term
/// dominates every payoff difference.
fn t_max(problems: &[&PersuasionProblem]) -> f64 {
    let span = problems
        .iter()
        .map(|p| {
            let (lo, hi) = p.sender_range();
            hi - lo
        })
        .fold(0.0, f64::max);
    4.0 * span / LN_2 + 1.0
}

/// The shared-multiplier dual for a family of problems.
struct Dual<'a> {
    problems: Vec<&'a PersuasionProblem>,
    grids: Vec<PosteriorGrid>,
    pi: Vec<f64>,
    g: &'a dyn ConstraintFn,
    /// `Σ_z π_z g(μ_z)`.
    gmu: f64,
    c: f64,
    tol: f64,
}

impl<'a> Dual<'a> {
    fn new(
        problems: Vec<&'a PersuasionProblem>,
        pi: Vec<f64>,
        c: f64,
        g: &'a dyn ConstraintFn,
        cfg: &SolverConfig,
    ) -> Result<Self> {
        let grids = problems
            .iter()
            .map(|p| PosteriorGrid::build(p, cfg, g))
            .collect::<Result<Vec<_>>>()?;
        let gmu = problems
            .iter()
            .zip(&pi)
            .map(|(p, w)| w * g.eval(p.prior().as_slice()))
            .sum();
        Ok(Self {
            problems,
            grids,
            pi,
            g,
            gmu,
            c,
            tol: cfg.tol,
        })
    }

    fn prior(&self, z: usize) -> &[f64] {
        self.problems[z].prior().as_slice()
    }

    fn envelope(&self, t: f64) -> Result<f64> {
        let mut v = 0.0;
        for z in 0..self.grids.len() {
            if self.pi[z] > 0.0 {
                v += self.pi[z] * lp::envelope(&self.grids[z], t, self.prior(z))?.value;
            }
        }
        Ok(v)
    }

    fn phi(&self, t: f64) -> Result<f64> {
        Ok(self.envelope(t)? - t * (self.gmu - self.c))
    }

    /// Minimize the convex dual: bracket by doubling from 1, then golden
    /// section. Returns the best multiplier and dual value found.
    fn minimize(&self) -> Result<(f64, f64)> {
        let tmax = t_max(&self.problems);
        let f0 = self.phi(0.0)?;
        let mut best = (0.0, f0);
        let keep = |t: f64, f: f64, best: &mut (f64, f64)| {
            if f < best.1 {
                *best = (t, f);
            }
        };
        let mut lo = 0.0;
        let mut t = 1.0f64.min(tmax);
        let mut ft = self.phi(t)?;
        keep(t, ft, &mut best);
        let hi = if ft >= f0 {
            t
        } else {
            loop {
                let t2 = (2.0 * t).min(tmax);
                if t2 <= t {
                    break t;
                }
                let f2 = self.phi(t2)?;
                keep(t2, f2, &mut best);
                if f2 >= ft {
                    break t2;
                }
                lo = t;
                t = t2;
                ft = f2;
            }
        };
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let mut x1 = b - r * (b - a);
        let mut x2 = a + r * (b - a);
        let mut f1 = self.phi(x1)?;
        let mut f2 = self.phi(x2)?;
        keep(x1, f1, &mut best);
        keep(x2, f2, &mut best);
        while b - a > self.tol {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - r * (b - a);
                f1 = self.phi(x1)?;
                keep(x1, f1, &mut best);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + r * (b - a);
                f2 = self.phi(x2)?;
                keep(x2, f2, &mut best);
            }
        }
        if f0 <= best.1 + 1e-12 {
            best = (0.0, f0);
        }
        Ok(best)
    }

    /// Columns that can carry an optimal splitting at multiplier `t`.
    fn candidates(&self, t: f64) -> Result<Vec<Vec<usize>>> {
        let dts = [0.0, 1e-6, -1e-6, 1e-4, -1e-4];
        let mut out = Vec::with_capacity(self.grids.len());
        for (z, grid) in self.grids.iter().enumerate() {
            let mut cols: Vec<usize> = Vec::new();
            for dt in dts {
                let tt = (t + dt * (1.0 + t)).max(0.0);
                let s = lp::envelope(grid, tt, self.prior(z))?;
                cols.extend(s.atoms.iter().map(|a| a.0));
                if dt == 0.0 && grid.is_binary() && s.atoms.len() == 2 {
                    // Every column on the supporting line at μ.
                    let (i, j) = (s.atoms[0].0, s.atoms[1].0);
                    let f = |k: usize| grid.robust(k) + tt * grid.constraint(k);
                    let (xi, xj) = (grid.point(i)[1], grid.point(j)[1]);
                    let slope = (f(j) - f(i)) / (xj - xi);
                    let slack = 1e-7 * (1.0 + tt);
                    cols.extend((0..grid.len()).filter(|&k| {
                        f(k) >= f(i) + slope * (grid.point(k)[1] - xi) - slack
                    }));
                }
            }
            cols.sort_unstable();
            cols.dedup();
            out.push(cols);
        }
        Ok(out)
    }

    /// Splittings attaining (close to) `target` under the budget.
    fn recover(&self, t: f64, target: f64) -> Result<Vec<Vec<(f64, Vec<f64>)>>> {
        let floor = self.gmu - self.c;
        let grids: Vec<&PosteriorGrid> = self.grids.iter().collect();
        let priors: Vec<&[f64]> = (0..grids.len()).map(|z| self.prior(z)).collect();
        let cand = self.candidates(t)?;
        let small = lp::joint(&grids, &cand, &priors, &self.pi, floor);
        let supports = match small {
            Ok((v, s)) if v >= target - 1e-5 * (1.0 + target.abs()) => s,
            _ => {
                let all: Vec<Vec<usize>> = grids.iter().map(|g| (0..g.len()).collect()).collect();
                lp::joint(&grids, &all, &priors, &self.pi, floor)?.1
            }
        };
        Ok(self.atoms_of(&supports))
    }

    fn atoms_of(&self, supports: &[Vec<(usize, f64)>]) -> Vec<Vec<(f64, Vec<f64>)>> {
        supports
            .iter()
            .zip(&self.grids)
            .map(|(s, grid)| s.iter().map(|&(i, w)| (w, grid.point(i).to_vec())).collect())
            .collect()
    }

    /// Exact unconstrained envelope, using the knot hull for binary states.
    fn exact_cav(&self, z: usize) -> Result<f64> {
        let p = self.problems[z];
        if p.num_states() == 2 {
            let knots = binary_envelope_knots(p);
            Ok(binary_cav_at(p, &knots, p.prior()[1]).max(p.robust_at(self.prior(z))))
        } else {
            lp::envelope(&self.grids[z], 0.0, self.prior(z)).map(|s| s.value)
        }
    }

    fn info_used(&self, splittings: &[Splitting]) -> f64 {
        let avg: f64 = splittings
            .iter()
            .zip(&self.pi)
            .map(|(s, w)| {
                w * s
                    .atoms()
                    .iter()
                    .map(|a| a.weight * self.g.eval(a.posterior.as_slice()))
                    .sum::<f64>()
            })
            .sum();
        (self.gmu - avg).max(0.0)
    }

    fn solve(&self) -> Result<HeterogeneousValue> {
        let nz = self.problems.len();
        let trivial = |z: usize| Splitting::trivial(self.problems[z].prior());
        if self.c == 0.0 {
            let value = (0..nz)
                .map(|z| self.pi[z] * self.problems[z].robust_at(self.prior(z)))
                .sum::<f64>();
            let cav: f64 = (0..nz)
                .map(|z| self.exact_cav(z).map(|v| self.pi[z] * v))
                .sum::<Result<f64>>()?;
            let binding = cav > value + 1e-9;
            return Ok(HeterogeneousValue {
                value,
                splittings: (0..nz).map(trivial).collect(),
                multiplier: if binding { t_max(&self.problems) } else { 0.0 },
                binding,
                info_used: 0.0,
            });
        }
        let min_g: f64 = self
            .grids
            .iter()
            .zip(&self.pi)
            .map(|(g, w)| w * g.min_constraint())
            .sum();
        if self.gmu - self.c <= min_g {
            let mut value = 0.0;
            let mut raw = Vec::with_capacity(nz);
            for z in 0..nz {
                value += self.pi[z] * self.exact_cav(z)?;
                let s = lp::envelope(&self.grids[z], 0.0, self.prior(z))?;
                raw.push(self.atoms_of(&[s.atoms]).remove(0));
            }
            let splittings = self.finish(raw);
            let info_used = self.info_used(&splittings);
            return Ok(HeterogeneousValue {
                value,
                splittings,
                multiplier: 0.0,
                binding: false,
                info_used,
            });
        }
        let (t, value) = self.minimize()?;
        let raw = self.recover(t, value)?;
        let splittings = self.finish(raw);
        let info_used = self.info_used(&splittings);
        Ok(HeterogeneousValue {
            value,
            splittings,
            multiplier: t,
            binding: t > 0.0,
            info_used,
        })
    }

    fn finish(&self, raw: Vec<Vec<(f64, Vec<f64>)>>) -> Vec<Splitting> {
        raw.into_iter()
            .enumerate()
            .map(|(z, atoms)| {
                let atoms = if atoms.is_empty() {
                    vec![(1.0, self.prior(z).to_vec())]
                } else {
                    atoms
                };
                let s = Splitting::from_raw(atoms);
                reduce(&s, self.problems[z], self.g)
            })
            .collect()
    }
}

/// `cav(u*_S + t g)(μ)` over the posterior grid at resolution `grid`.
pub fn cav_penalized(
    p: &PersuasionProblem,
    t: f64,
    g: &dyn ConstraintFn,
    grid: usize,
) -> Result<f64> {
    if !(t >= 0.0) || t.is_infinite() {
        return Err(Error::InvalidParameter(format!("multiplier {t} must be >= 0")));
    }
    if grid < 3 {
        return Err(Error::InvalidParameter(format!("grid {grid} must be at least 3")));
    }
    let cfg = SolverConfig::with_resolution(grid);
    let pg = PosteriorGrid::build(p, &cfg, g)?;
    Ok(lp::envelope(&pg, t, p.prior().as_slice())?.value)
}

/// The dual objective `cav(u*_S + t g)(μ) − t (g(μ) − c)` at resolution `grid`.
pub fn dual_objective(
    p: &PersuasionProblem,
    c: f64,
    t: f64,
    g: &dyn ConstraintFn,
    grid: usize,
) -> Result<f64> {
    let cav = cav_penalized(p, t, g, grid)?;
    Ok(cav - t * (g.eval(p.prior().as_slice()) - c))
}

/// `V(μ, c)` by the Lagrangian dual with default grids.
pub fn value_dual(
    p: &PersuasionProblem,
    c: f64,
    g: &dyn ConstraintFn,
    tol: f64,
) -> Result<ConstrainedValue> {
    let cfg = SolverConfig {
        tol,
        ..SolverConfig::default()
    };
    value_dual_with(p, c, g, &cfg)
}

pub fn value_dual_with(
    p: &PersuasionProblem,
    c: f64,
    g: &dyn ConstraintFn,
    cfg: &SolverConfig,
) -> Result<ConstrainedValue> {
    check_budget(c)?;
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {} must be > 0", cfg.tol)));
    }
    let dual = Dual::new(vec![p], vec![1.0], c, g, cfg)?;
    let mut h = dual.solve()?;
    Ok(ConstrainedValue {
        value: h.value,
        splitting: h.splittings.remove(0),
        multiplier: h.multiplier,
        binding: h.binding,
        info_used: h.info_used,
    })
}

/// `V(μ, c)` with entropy as the constraint and default settings.
pub fn value(p: &PersuasionProblem, c: f64) -> Result<ConstrainedValue> {
    value_dual(p, c, &Entropy, SolverConfig::default().tol)
}

/// Direct primal LP over the posterior grid at resolution `grid`.
pub fn value_grid_lp(p: &PersuasionProblem, c: f64, grid: usize) -> Result<ConstrainedValue> {
    if grid < 3 {
        return Err(Error::InvalidParameter(format!("grid {grid} must be at least 3")));
    }
    value_grid_lp_with(p, c, &Entropy, &SolverConfig::with_resolution(grid))
}

/// Grid LP with an explicit constraint and configuration. The multiplier is
/// a forward difference of the LP value in `c`.
pub fn value_grid_lp_with(
    p: &PersuasionProblem,
    c: f64,
    g: &dyn ConstraintFn,
    cfg: &SolverConfig,
) -> Result<ConstrainedValue> {
    check_budget(c)?;
    let grid = PosteriorGrid::build(p, cfg, g)?;
    let mu = p.prior().as_slice();
    let gmu = g.eval(mu);
    let cols: Vec<usize> = (0..grid.len()).collect();
    let solve = |c: f64| lp::constrained(&grid, &cols, mu, gmu - c);
    let base = solve(c)?;
    let unconstrained = gmu - c <= grid.min_constraint();
    let multiplier = if unconstrained {
        0.0
    } else {
        let h = 1e-5 * (1.0 + c);
        ((solve(c + h)?.value - base.value) / h).max(0.0)
    };
    let raw = base
        .atoms
        .iter()
        .map(|&(i, w)| (w, grid.point(i).to_vec()))
        .collect();
    let splitting = reduce(&Splitting::from_raw(raw), p, g);
    let avg: f64 = splitting
        .atoms()
        .iter()
        .map(|a| a.weight * g.eval(a.posterior.as_slice()))
        .sum();
    Ok(ConstrainedValue {
        value: base.value,
        splitting,
        multiplier,
        binding: multiplier > 1e-6,
        info_used: (gmu - avg).max(0.0),
    })
}

/// Best splitting with at most two posteriors on the binary grid, by
/// exhaustive search over grid pairs. The multiplier is not computed and is
/// reported as zero.
pub fn value_two_posteriors(p: &PersuasionProblem, c: f64, grid: usize) -> Result<ConstrainedValue> {
    check_budget(c)?;
    if p.num_states() != 2 {
        return Err(Error::NotApplicable(
            "two-posterior search needs a binary state space".into(),
        ));
    }
    let cfg = SolverConfig::with_resolution(grid.max(3));
    let pg = PosteriorGrid::build(p, &cfg, &Entropy)?;
    let mu = p.prior()[1];
    let floor = entropy_of(p.prior().as_slice()) - c;
    let xs: Vec<f64> = (0..pg.len()).map(|i| pg.point(i)[1]).collect();
    let split = xs.partition_point(|&x| x < mu);
    let mut best = (p.robust_at(p.prior().as_slice()), None::<(usize, usize, f64)>);
    for i in 0..split {
        for j in split..pg.len() {
            if xs[j] <= mu {
                continue;
            }
            let wj = (mu - xs[i]) / (xs[j] - xs[i]);
            let wi = 1.0 - wj;
            if wi * pg.constraint(i) + wj * pg.constraint(j) < floor - 1e-12 {
                continue;
            }
            let v = wi * pg.robust(i) + wj * pg.robust(j);
            if v > best.0 {
                best = (v, Some((i, j, wj)));
            }
        }
    }
    let splitting = match best.1 {
        None => Splitting::trivial(p.prior()),
        Some((i, j, wj)) => Splitting::from_raw(vec![
            (1.0 - wj, pg.point(i).to_vec()),
            (wj, pg.point(j).to_vec()),
        ]),
    };
    let info_used = splitting.information();
    Ok(ConstrainedValue {
        value: best.0,
        binding: info_used >= c - 1e-6 && best.1.is_some(),
        splitting,
        multiplier: 0.0,
        info_used,
    })
}

/// Merge atoms sharing a worst action, then drop atoms by Carathéodory
/// steps that keep the mean posterior and mean entropy fixed.
pub fn posterior_count_reduce(s: &Splitting, p: &PersuasionProblem) -> Splitting {
    reduce(s, p, &Entropy)
}

fn reduce(s: &Splitting, p: &PersuasionProblem, g: &dyn ConstraintFn) -> Splitting {
    let ns = s.num_states();
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, a) in s.atoms().iter().enumerate() {
        groups
            .entry(p.worst_action_at(a.posterior.as_slice(), IND_TOL))
            .or_default()
            .push(i);
    }
    let mut atoms: Vec<(f64, Vec<f64>)> = Vec::new();
    for members in groups.values() {
        let raw: Vec<(f64, &[f64])> = members
            .iter()
            .map(|&i| (s.atoms()[i].weight, s.atoms()[i].posterior.as_slice()))
            .collect();
        if raw.len() == 1 {
            atoms.push((raw[0].0, raw[0].1.to_vec()));
            continue;
        }
        let w: f64 = raw.iter().map(|r| r.0).sum();
        let mut avg = vec![0.0; ns];
        for (lw, v) in &raw {
            for (acc, x) in avg.iter_mut().zip(v.iter()) {
                *acc += lw * x / w;
            }
        }
        let before: f64 = raw.iter().map(|(lw, v)| lw * p.robust_at(v)).sum();
        if w * p.robust_at(&avg) >= before - 1e-12 {
            atoms.push((w, avg));
        } else {
            atoms.extend(raw.iter().map(|(lw, v)| (*lw, v.to_vec())));
        }
    }
    // Carathéodory in the lifted space (ν, g(ν)).
    loop {
        let m = atoms.len();
        if m <= 1 {
            break;
        }
        let mut rows: Vec<Vec<f64>> = (0..ns)
            .map(|w| atoms.iter().map(|a| a.1[w]).collect())
            .collect();
        rows.push(atoms.iter().map(|a| g.eval(&a.1)).collect());
        let Some(mut d) = null_vector(&rows, m) else {
            break;
        };
        let du: f64 = d.iter().zip(&atoms).map(|(di, a)| di * p.robust_at(&a.1)).sum();
        if du < 0.0 {
            d.iter_mut().for_each(|x| *x = -*x);
        }
        let (k, step) = d
            .iter()
            .enumerate()
            .filter(|(_, &di)| di < 0.0)
            .map(|(i, &di)| (i, atoms[i].0 / -di))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("null vector of a mass-preserving system has a negative entry");
        for (a, di) in atoms.iter_mut().zip(&d) {
            a.0 += step * di;
        }
        atoms[k].0 = 0.0;
        atoms.retain(|a| a.0 > 1e-15);
    }
    atoms.sort_by(|a, b| {
        a.1.iter()
            .zip(&b.1)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Splitting::from_raw(atoms)
}

/// A vector `d ≠ 0` with `rows · d = 0`, if the columns are dependent.
fn null_vector(rows: &[Vec<f64>], m: usize) -> Option<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let r = a.len();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..m {
        if row == r {
            break;
        }
        let (pr, pv) = (row..r)
            .map(|i| (i, a[i][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty row range");
        if pv < 1e-10 {
            continue;
        }
        a.swap(row, pr);
        let inv = 1.0 / a[row][col];
        a[row].iter_mut().for_each(|x| *x *= inv);
        for i in 0..r {
            if i != row && a[i][col] != 0.0 {
                let f = a[i][col];
                for j in 0..m {
                    a[i][j] -= f * a[row][j];
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free = (0..m).find(|c| !pivots.contains(c))?;
    let mut d = vec![0.0; m];
    d[free] = 1.0;
    for (ri, &pc) in pivots.iter().enumerate() {
        d[pc] = -a[ri][free];
    }
    Some(d)
}

fn binary_coord(nu: &Belief, what: &str) -> Result<f64> {
    if nu.len() != 2 {
        return Err(Error::NotApplicable(format!(
            "{what} has {} states; one-shot feasibility needs two",
            nu.len()
        )));
    }
    Ok(nu[1])
}

/// One-shot feasibility of the posterior pair `(ν₀, ν₁)` over a binary
/// symmetric channel with noise `eps`.
///
/// The pair is feasible iff it is trivial, or the signal probabilities
/// `P(y₀|ω₁)` and `P(y₁|ω₀)` that generate it both lie in `[ε, 1 − ε]`.
pub fn feasible_pair_oneshot(mu: &Belief, nu0: &Belief, nu1: &Belief, eps: f64) -> Result<bool> {
    let m = binary_coord(mu, "prior")?;
    let x0 = binary_coord(nu0, "first posterior")?;
    let x1 = binary_coord(nu1, "second posterior")?;
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::InvalidParameter(format!("noise {eps} outside [0, 1/2]")));
    }
    Ok(feasible_pair_raw(m, x0, x1, eps))
}

pub(crate) fn feasible_pair_raw(m: f64, x0: f64, x1: f64, eps: f64) -> bool {
    const EQ: f64 = 1e-12;
    if (x0 - m).abs() <= EQ && (x1 - m).abs() <= EQ {
        return true;
    }
    let in_range = |num: f64, den: f64| {
        if den == 0.0 {
            return false;
        }
        let r = num / den;
        r >= eps - EQ && r <= 1.0 - eps + EQ
    };
    // P(y₀|ω₁) and P(y₁|ω₀) recovered from Bayes' rule.
    in_range(x0 * (x1 - m), m * (x1 - x0)) && in_range((1.0 - x1) * (m - x0), (1.0 - m) * (x1 - x0))
}

/// One cell of a feasibility table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasiblePoint {
    pub nu0: f64,
    pub nu1: f64,
    pub feasible: bool,
}

/// Feasibility of posterior pairs at the cell centres `(i + 1/2)/grid` of a
/// `grid × grid` lattice, coordinates as `ν(ω₁)`.
pub fn feasible_region_grid(mu: &Belief, eps: f64, grid: usize) -> Result<Vec<FeasiblePoint>> {
    let m = binary_coord(mu, "prior")?;
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::InvalidParameter(format!("noise {eps} outside [0, 1/2]")));
    }
    if grid == 0 {
        return Err(Error::InvalidParameter("grid must be positive".into()));
    }
    let h = 1.0 / grid as f64;
    let mut out = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            let nu0 = (i as f64 + 0.5) * h;
            let nu1 = (j as f64 + 0.5) * h;
            out.push(FeasiblePoint {
                nu0,
                nu1,
                feasible: feasible_pair_raw(m, nu0, nu1, eps),
            });
        }
    }
    Ok(out)
}

/// Value of a family of problems sharing states and actions, with type
/// distribution `pi` and an average information budget `c`.
pub fn value_heterogeneous(
    problems: &[PersuasionProblem],
    pi: &Distribution,
    c: f64,
    tol: f64,
) -> Result<HeterogeneousValue> {
    let cfg = SolverConfig {
        tol,
        ..SolverConfig::default()
    };
    value_heterogeneous_with(problems, pi, c, &Entropy, &cfg)
}

pub fn value_heterogeneous_with(
    problems: &[PersuasionProblem],
    pi: &Distribution,
    c: f64,
    g: &dyn ConstraintFn,
    cfg: &SolverConfig,
) -> Result<HeterogeneousValue> {
    check_budget(c)?;
    let Some(first) = problems.first() else {
        return Err(Error::InvalidProblem("no problem types given".into()));
    };
    if pi.len() != problems.len() {
        return Err(Error::Dimension(format!(
            "{} type weights for {} problems",
            pi.len(),
            problems.len()
        )));
    }
    for (z, p) in problems.iter().enumerate() {
        if p.num_states() != first.num_states() || p.num_actions() != first.num_actions() {
            return Err(Error::Dimension(format!(
                "type {z} has {}x{} states x actions, expected {}x{}",
                p.num_states(),
                p.num_actions(),
                first.num_states(),
                first.num_actions()
            )));
        }
    }
    let dual = Dual::new(problems.iter().collect(), pi.as_slice().to_vec(), c, g, cfg)?;
    dual.solve()
}
