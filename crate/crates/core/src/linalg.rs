//! Small dense vector helpers and the few matrix routines the geometry needs.

use nalgebra::DMatrix;

pub type Point = Vec<f64>;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Point {
    a.iter().map(|x| x * s).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `a + t * u`
pub fn axpy(a: &[f64], t: f64, u: &[f64]) -> Point {
    a.iter().zip(u).map(|(x, d)| x + t * d).collect()
}

/// `(1 - t) * a + t * b`, evaluated so that `t = 0` returns `a` exactly.
pub fn lerp(a: &[f64], b: &[f64], t: f64) -> Point {
    a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect()
}

pub fn unit(a: &[f64]) -> Option<Point> {
    let n = norm(a);
    (n > 0.0 && n.is_finite()).then(|| scale(a, 1.0 / n))
}

pub fn basis_vector(dim: usize, i: usize) -> Point {
    let mut e = vec![0.0; dim];
    e[i] = 1.0;
    e
}

/// Determinant by cofactor expansion; only used for matrices of order ≤ 5.
pub fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        0 => 1.0,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        n => {
            let mut total = 0.0;
            for col in 0..n {
                if m[0][col] == 0.0 {
                    continue;
                }
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != col)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                total += sign * m[0][col] * det(&minor);
            }
            total
        }
    }
}

/// Vector orthogonal to `dim - 1` vectors in `R^dim` (generalized cross product).
/// Returns `None` when the vectors are linearly dependent.
pub fn orthogonal_complement_vector(vectors: &[&[f64]], dim: usize) -> Option<Point> {
    debug_assert_eq!(vectors.len() + 1, dim);
    let mut n = Vec::with_capacity(dim);
    for col in 0..dim {
        let minor: Vec<Vec<f64>> = vectors
            .iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != col)
                    .map(|(_, x)| *x)
                    .collect()
            })
            .collect();
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        n.push(sign * det(&minor));
    }
    let scale_ref: f64 = vectors.iter().map(|v| norm(v)).product::<f64>().max(1e-300);
    if norm(&n) <= 1e-12 * scale_ref {
        return None;
    }
    unit(&n)
}

fn padded_matrix(rows: &[Point], dim: usize) -> DMatrix<f64> {
    let n = rows.len().max(dim);
    DMatrix::from_fn(n, dim, |i, j| if i < rows.len() { rows[i][j] } else { 0.0 })
}

/// Orthonormal basis of `{v : r·v = 0 for every row r}`.
pub fn nullspace(rows: &[Point], dim: usize, tol: f64) -> Vec<Point> {
    if dim == 0 {
        return Vec::new();
    }
    if rows.is_empty() {
        return (0..dim).map(|i| basis_vector(dim, i)).collect();
    }
    let m = padded_matrix(rows, dim);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol * smax.max(1.0);
    let mut basis = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= cutoff {
            basis.push(v_t.row(k).iter().cloned().collect());
        }
    }
    basis
}

pub fn rank(rows: &[Point], dim: usize, tol: f64) -> usize {
    dim - nullspace(rows, dim, tol).len()
}

/// Projection of `v` onto the orthogonal complement of an orthonormal family.
pub fn project_out(v: &[f64], basis: &[Point]) -> Point {
    let mut out = v.to_vec();
    for b in basis {
        let c = dot(&out, b);
        for (o, bi) in out.iter_mut().zip(b) {
            *o -= c * bi;
        }
    }
    out
}

/// Solves the square system `a x = b`; `None` when singular.
pub fn solve(a: &[Point], b: &[f64]) -> Option<Point> {
    let n = b.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let rhs = nalgebra::DVector::from_column_slice(b);
    let lu = m.lu();
    let x = lu.solve(&rhs)?;
    x.iter().all(|v| v.is_finite()).then(|| x.iter().cloned().collect())
}

/// Symmetric positive-definite solve via Cholesky.
pub fn solve_spd(a: &DMatrix<f64>, b: &[f64]) -> Option<Point> {
    let chol = a.clone().cholesky()?;
    let x = chol.solve(&nalgebra::DVector::from_column_slice(b));
    Some(x.iter().cloned().collect())
}

/// Canonical sign of zero so that lexicographic comparisons treat `-0.0` as `0.0`.
pub fn clean_zero(v: f64) -> f64 {
    v + 0.0
}

pub fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

pub fn approx_eq(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}
