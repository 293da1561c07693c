//! Linear programs over posterior grids.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::grid::PosteriorGrid;

/// Weights placed on grid columns by an optimal program solution.
#[derive(Debug, Clone)]
pub(crate) struct Support {
    pub value: f64,
    pub atoms: Vec<(usize, f64)>,
}

const WEIGHT_FLOOR: f64 = 1e-12;

/// Indices of the upper concave hull of `(xs[i], ys[i])`, `xs` increasing.
pub(crate) fn upper_hull_indices(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    let mut h: Vec<usize> = Vec::with_capacity(64);
    for i in 0..xs.len() {
        while h.len() >= 2 {
            let a = h[h.len() - 2];
            let b = h[h.len() - 1];
            let cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if cross >= 0.0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(i);
    }
    h
}

/// Penalized envelope `cav(u + t g)` at `target` over the grid.
pub(crate) fn envelope(grid: &PosteriorGrid, t: f64, target: &[f64]) -> Result<Support> {
    if grid.is_binary() {
        let xs: Vec<f64> = (0..grid.len()).map(|i| grid.point(i)[1]).collect();
        let ys: Vec<f64> = (0..grid.len()).map(|i| grid.u[i] + t * grid.g[i]).collect();
        let h = upper_hull_indices(&xs, &ys);
        return Ok(eval_binary_hull(&xs, &ys, &h, target[1]));
    }
    let cols: Vec<usize> = (0..grid.len()).collect();
    solve(grid, &cols, target, |i| grid.u[i] + t * grid.g[i], None)
}

pub(crate) fn envelope_lp(grid: &PosteriorGrid, t: f64, target: &[f64]) -> Result<(f64, Vec<(usize, f64)>)> {
    envelope(grid, t, target).map(|s| (s.value, s.atoms))
}

fn eval_binary_hull(xs: &[f64], ys: &[f64], h: &[usize], x: f64) -> Support {
    let k = h.partition_point(|&i| xs[i] < x);
    if k < h.len() && xs[h[k]] == x {
        return Support {
            value: ys[h[k]],
            atoms: vec![(h[k], 1.0)],
        };
    }
    if k == 0 || k == h.len() {
        let j = h[k.min(h.len() - 1)];
        return Support {
            value: ys[j],
            atoms: vec![(j, 1.0)],
        };
    }
    let (a, b) = (h[k - 1], h[k]);
    let w = (x - xs[a]) / (xs[b] - xs[a]);
    Support {
        value: ys[a] + w * (ys[b] - ys[a]),
        atoms: vec![(a, 1.0 - w), (b, w)],
    }
}

/// `max Σ λ_i u_i` over `cols` subject to `Σ λ_i ν_i = target` and
/// `Σ λ_i g_i ≥ floor`.
pub(crate) fn constrained(
    grid: &PosteriorGrid,
    cols: &[usize],
    target: &[f64],
    floor: f64,
) -> Result<Support> {
    solve(grid, cols, target, |i| grid.u[i], Some(floor))
}

/// Several types sharing one information budget: maximize
/// `Σ_z π_z Σ_i λ_{z,i} u^z_i` subject to per-type Bayes plausibility and
/// `Σ_z π_z Σ_i λ_{z,i} g^z_i ≥ floor`. Returns the objective and per-type
/// supports.
pub(crate) fn joint(
    grids: &[&PosteriorGrid],
    cols: &[Vec<usize>],
    targets: &[&[f64]],
    pi: &[f64],
    floor: f64,
) -> Result<(f64, Vec<Vec<(usize, f64)>>)> {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let mut vars = Vec::with_capacity(grids.len());
    let mut budget = Vec::new();
    for z in 0..grids.len() {
        let grid = grids[z];
        let vz: Vec<_> = cols[z]
            .iter()
            .map(|&i| lp.add_var(pi[z] * grid.u[i], (0.0, f64::INFINITY)))
            .collect();
        for (w, &rhs) in targets[z].iter().enumerate() {
            let expr: Vec<_> = vz
                .iter()
                .zip(&cols[z])
                .filter(|(_, &i)| grid.point(i)[w] != 0.0)
                .map(|(&v, &i)| (v, grid.point(i)[w]))
                .collect();
            lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, rhs);
        }
        budget.extend(vz.iter().zip(&cols[z]).map(|(&v, &i)| (v, pi[z] * grid.g[i])));
        vars.push(vz);
    }
    lp.add_constraint(budget.as_slice(), ComparisonOp::Ge, floor);
    let sol = lp.solve().map_err(|e| Error::Lp(e.to_string()))?;
    let supports = vars
        .iter()
        .zip(cols)
        .map(|(vz, cz)| {
            vz.iter()
                .zip(cz)
                .filter_map(|(&v, &i)| {
                    let w = *sol.var_value(v);
                    (w > WEIGHT_FLOOR).then_some((i, w))
                })
                .collect()
        })
        .collect();
    Ok((sol.objective(), supports))
}

fn solve(
    grid: &PosteriorGrid,
    cols: &[usize],
    target: &[f64],
    obj: impl Fn(usize) -> f64,
    floor: Option<f64>,
) -> Result<Support> {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = cols
        .iter()
        .map(|&i| lp.add_var(obj(i), (0.0, f64::INFINITY)))
        .collect();
    for (w, &rhs) in target.iter().enumerate() {
        let expr: Vec<_> = vars
            .iter()
            .zip(cols)
            .filter(|(_, &i)| grid.point(i)[w] != 0.0)
            .map(|(&v, &i)| (v, grid.point(i)[w]))
            .collect();
        lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, rhs);
    }
    if let Some(f) = floor {
        let expr: Vec<_> = vars.iter().zip(cols).map(|(&v, &i)| (v, grid.g[i])).collect();
        lp.add_constraint(expr.as_slice(), ComparisonOp::Ge, f);
    }
    let sol = lp.solve().map_err(|e| Error::Lp(e.to_string()))?;
    let atoms = vars
        .iter()
        .zip(cols)
        .filter_map(|(&v, &i)| {
            let w = *sol.var_value(v);
            (w > WEIGHT_FLOOR).then_some((i, w))
        })
        .collect();
    Ok(Support {
        value: sol.objective(),
        atoms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_indices_drop_collinear_and_interior_points() {
        let xs = [0.0, 0.25, 0.5, 0.75, 1.0];
        let ys = [0.0, 0.5, 1.0, 0.2, 0.0];
        assert_eq!(upper_hull_indices(&xs, &ys), vec![0, 2, 4]);
        let s = eval_binary_hull(&xs, &ys, &[0, 2, 4], 0.75);
        assert!((s.value - 0.5).abs() < 1e-15);
        assert_eq!(s.atoms, vec![(2, 0.5), (4, 0.5)]);
    }
}
