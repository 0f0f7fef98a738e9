//! Thin wrappers over `minilp` for the feasibility questions asked by the cone code.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::linalg::Point;

/// A linear row `a·v (op) b`.
#[derive(Clone, Copy)]
pub struct Row<'a> {
    pub a: &'a [f64],
    pub b: f64,
}

impl<'a> Row<'a> {
    pub fn new(a: &'a [f64], b: f64) -> Self {
        Row { a, b }
    }
}

fn expr(vars: &[minilp::Variable], a: &[f64]) -> Vec<(minilp::Variable, f64)> {
    vars.iter()
        .zip(a)
        .filter(|(_, c)| **c != 0.0)
        .map(|(v, c)| (*v, *c))
        .collect()
}

/// Maximizes `c·v` subject to `a·v ≥ b` (ge rows), `a·v = b` (eq rows) and the box
/// `|v_j| ≤ bound`. Returns `None` when infeasible.
pub fn maximize(
    dim: usize,
    objective: &[f64],
    ge: &[Row<'_>],
    eq: &[Row<'_>],
    bound: f64,
) -> Option<(Point, f64)> {
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..dim)
        .map(|j| problem.add_var(objective[j], (-bound, bound)))
        .collect();
    for row in ge {
        problem.add_constraint(expr(&vars, row.a).as_slice(), ComparisonOp::Ge, row.b);
    }
    for row in eq {
        problem.add_constraint(expr(&vars, row.a).as_slice(), ComparisonOp::Eq, row.b);
    }
    let solution = problem.solve().ok()?;
    let v: Point = vars.iter().map(|x| solution[*x]).collect();
    Some((v, solution.objective()))
}

/// Maximizes the common margin `t ≤ cap` with `a·v - b ≥ t` on every ge row,
/// subject to the eq rows and the box `|v_j| ≤ bound`.
pub fn max_margin(
    dim: usize,
    ge: &[Row<'_>],
    eq: &[Row<'_>],
    bound: f64,
    cap: f64,
) -> Option<(Point, f64)> {
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..dim).map(|_| problem.add_var(0.0, (-bound, bound))).collect();
    let t = problem.add_var(1.0, (f64::NEG_INFINITY, cap));
    for row in ge {
        let mut e = expr(&vars, row.a);
        e.push((t, -1.0));
        problem.add_constraint(e.as_slice(), ComparisonOp::Ge, row.b);
    }
    for row in eq {
        problem.add_constraint(expr(&vars, row.a).as_slice(), ComparisonOp::Eq, row.b);
    }
    let solution = problem.solve().ok()?;
    let v: Point = vars.iter().map(|x| solution[*x]).collect();
    Some((v, solution[t]))
}

/// Whether `target` lies in the closed cone generated by `generators`
/// (nonnegative combination), up to `tol` in each coordinate.
pub fn in_generated_cone(target: &[f64], generators: &[Point], tol: f64) -> bool {
    let dim = target.len();
    if generators.is_empty() {
        return target.iter().all(|x| x.abs() <= tol);
    }
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let mu: Vec<_> = generators.iter().map(|_| problem.add_var(0.0, (0.0, f64::INFINITY))).collect();
    // Slack variables absorb the residual; we minimize their total.
    let mut slacks = Vec::new();
    for j in 0..dim {
        let sp = problem.add_var(1.0, (0.0, f64::INFINITY));
        let sm = problem.add_var(1.0, (0.0, f64::INFINITY));
        let mut e: Vec<_> = mu
            .iter()
            .zip(generators)
            .filter(|(_, g)| g[j] != 0.0)
            .map(|(m, g)| (*m, g[j]))
            .collect();
        e.push((sp, 1.0));
        e.push((sm, -1.0));
        problem.add_constraint(e.as_slice(), ComparisonOp::Eq, target[j]);
        slacks.push((sp, sm));
    }
    match problem.solve() {
        Ok(sol) => sol.objective() <= tol * dim as f64,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_of_the_orthant() {
        let e1 = [1.0, 0.0];
        let e2 = [0.0, 1.0];
        let (v, t) = max_margin(2, &[Row::new(&e1, 0.0), Row::new(&e2, 0.0)], &[], 1.0, 1.0).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        assert!(v[0] >= 1.0 - 1e-12 && v[1] >= 1.0 - 1e-12);
    }

    #[test]
    fn generated_cone_membership() {
        let gens = vec![vec![1.0, 0.0], vec![1.0, 1.0]];
        assert!(in_generated_cone(&[2.0, 1.0], &gens, 1e-9));
        assert!(!in_generated_cone(&[0.0, 1.0], &gens, 1e-9));
    }
}
