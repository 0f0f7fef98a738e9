//! Horofunction-limit experiments: probe grids, approach sequences, limit
//! estimation, almost-geodesic defects and the construction that realises a
//! Busemann point as the limit of an almost-geodesic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::body::ConvexBody;
use crate::cone::PolyCone;
use crate::error::{check_dim, Error, Result};
use crate::fixtures;
use crate::horo::{reverse_horofunction, BusemannDescriptor};
use crate::linalg::{self, dot, Point};
use crate::metrics::{funk_cone, reverse_funk_cone, FunkGeometry, LiftedPolytope, Metric};
use crate::sampled::SampledFunction;
use crate::EPS_GEO;

pub const DEFAULT_GRID_SIZE: usize = 200;
pub const DEFAULT_SEED: u64 = 0x6b6c_6e;
/// Iterates inspected by the tail-oscillation estimate.
pub const TAIL_WINDOW: usize = 10;
/// Tail oscillation below which a trace counts as converged.
pub const CONVERGENCE_TOL: f64 = 1e-6;
pub const DEFAULT_SEGMENT_STEPS: usize = 30;

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut k: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while k > 0 {
        out += (k % b) as f64 * inv;
        k /= b;
        inv /= base as f64;
    }
    out
}

/// Interior probe points carrying pointwise convergence; the first point is the basepoint.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeGrid {
    pub points: Vec<Point>,
    pub description: String,
}

impl ProbeGrid {
    /// Halton points in the box `lo..hi`, shifted by a seeded random rotation,
    /// kept when `accept` holds. The basepoint is always the first point.
    pub fn halton(
        lo: &[f64],
        hi: &[f64],
        basepoint: &[f64],
        count: usize,
        seed: u64,
        accept: impl Fn(&[f64]) -> bool,
    ) -> Result<Self> {
        let d = lo.len();
        check_dim(d, hi.len())?;
        check_dim(d, basepoint.len())?;
        if d > PRIMES.len() {
            return Err(Error::Unsupported(format!("probe grids up to dimension {}", PRIMES.len())));
        }
        if !accept(basepoint) {
            return Err(Error::NotInterior { constraint: "probe grid basepoint".into(), slack: 0.0 });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let mut points = vec![basepoint.to_vec()];
        let mut k = 1u64;
        let max_tries = 1000 * count.max(1) as u64;
        while points.len() < count && k <= max_tries {
            let q: Point = (0..d)
                .map(|j| {
                    let u = (radical_inverse(k, PRIMES[j]) + shift[j]).fract();
                    lo[j] + (hi[j] - lo[j]) * u
                })
                .collect();
            if accept(&q) {
                points.push(q);
            }
            k += 1;
        }
        if points.len() < count {
            return Err(Error::Budget(format!("only {} of {count} probes accepted", points.len())));
        }
        Ok(ProbeGrid { points, description: format!("halton, {count} points, seed {seed}") })
    }

    /// Probes inside `body` with slack above `10·EPS_GEO`.
    pub fn for_body(body: &ConvexBody, basepoint: &[f64], count: usize, seed: u64) -> Result<Self> {
        let (lo, hi) = body.bounding_box();
        let mut grid = Self::halton(&lo, &hi, basepoint, count, seed, |q| body.min_slack(q).0 > 10.0 * EPS_GEO)?;
        grid.description = format!("{} in the body", grid.description);
        Ok(grid)
    }

    /// Probes in `cone ∩ [-1, 1]^d` whose normal products exceed `10·EPS_GEO`.
    pub fn for_cone(cone: &PolyCone, basepoint: &[f64], count: usize, seed: u64) -> Result<Self> {
        let d = cone.dim();
        let accept = |q: &[f64]| cone.normals().iter().all(|a| dot(a, q) > 10.0 * EPS_GEO);
        let mut grid = Self::halton(&vec![-1.0; d], &vec![1.0; d], basepoint, count, seed, accept)?;
        grid.description = format!("{} in the cone", grid.description);
        Ok(grid)
    }

    /// The image of the grid under `q ↦ center + factor·(q − center)`.
    pub fn scaled(&self, center: &[f64], factor: f64) -> Self {
        let points =
            self.points.iter().map(|q| linalg::axpy(center, factor, &linalg::sub(q, center))).collect();
        ProbeGrid { points, description: format!("{}, scaled by {factor}", self.description) }
    }

    pub fn with_points(mut self, extra: impl IntoIterator<Item = Point>) -> Self {
        self.points.extend(extra);
        self
    }

    pub fn basepoint(&self) -> &[f64] {
        &self.points[0]
    }
}

#[derive(Debug, Clone)]
pub enum SequencePlan {
    /// `x_n = (1 − λ_n) to + λ_n from` with `λ_n = 2^{-n}`, `n = 1..=steps`.
    Segment { from: Point, to: Point, steps: usize },
    /// Output of [`construct_almost_geodesic`].
    Nested { descriptor: BusemannDescriptor, options: GeodesicOptions },
    /// Alternating approach to two boundary points, `λ` halving every second step.
    Oscillating { from: Point, targets: [Point; 2], steps: usize },
    Custom(Vec<Point>),
}

impl SequencePlan {
    pub fn points(&self) -> Result<Vec<Point>> {
        match self {
            SequencePlan::Segment { from, to, steps } => {
                check_dim(from.len(), to.len())?;
                Ok((1..=*steps).map(|n| linalg::lerp(to, from, 0.5f64.powi(n as i32))).collect())
            }
            SequencePlan::Nested { descriptor, options } => {
                Ok(construct_almost_geodesic(descriptor, options)?.points)
            }
            SequencePlan::Oscillating { from, targets, steps } => {
                check_dim(from.len(), targets[0].len())?;
                check_dim(from.len(), targets[1].len())?;
                Ok((0..*steps)
                    .map(|n| linalg::lerp(&targets[n % 2], from, 0.5f64.powi((n / 2 + 1) as i32)))
                    .collect())
            }
            SequencePlan::Custom(points) => Ok(points.clone()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub metric: Metric,
    pub probes: Vec<Point>,
    /// `traces[k][n] = d(probe_k, x_n) − d(b, x_n)`.
    pub traces: Vec<Vec<f64>>,
    /// Largest spread over the last [`TAIL_WINDOW`] iterates, over all probes.
    pub tail_oscillation: f64,
    pub tail_probe: usize,
    pub converged: bool,
    /// Sup distance of the final values to a reference evaluator, once compared.
    pub reference_deviation: Option<f64>,
    /// Almost-geodesic defect of the generating sequence in the same metric.
    pub defect: f64,
}

impl ConvergenceReport {
    /// Records and returns the sup deviation of the final values from `reference`.
    pub fn compare(&mut self, reference: impl Fn(&[f64]) -> Result<f64>) -> Result<f64> {
        let mut worst = 0.0f64;
        for (q, trace) in self.probes.iter().zip(&self.traces) {
            let last = *trace.last().expect("nonempty trace");
            worst = worst.max((last - reference(q)?).abs());
        }
        self.reference_deviation = Some(worst);
        Ok(worst)
    }
}

/// Spread over the last `window` entries of each trace: `(max spread, probe attaining it)`.
pub fn tail_oscillation(traces: &[Vec<f64>], window: usize) -> (f64, usize) {
    let mut best = (0.0f64, 0usize);
    for (k, trace) in traces.iter().enumerate() {
        let tail = &trace[trace.len().saturating_sub(window)..];
        let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        if hi - lo > best.0 {
            best = (hi - lo, k);
        }
    }
    best
}

/// Evaluates `d(·, x_n) − d(b, x_n)` on the grid along the plan.
pub fn horofunction_limit(
    geometry: &dyn FunkGeometry,
    plan: &SequencePlan,
    grid: &ProbeGrid,
    metric: Metric,
) -> Result<(ConvergenceReport, SampledFunction)> {
    let points = plan.points()?;
    if points.len() < 2 {
        return Err(Error::Domain("the plan must generate at least two points".into()));
    }
    for x in &points {
        check_dim(geometry.dim(), x.len())?;
        if !geometry.is_interior(x) {
            return Err(Error::NotInterior { constraint: format!("generated point {x:?}"), slack: 0.0 });
        }
    }
    let b = grid.basepoint();
    let base: Vec<f64> = points.iter().map(|x| geometry.distance(metric, b, x)).collect::<Result<_>>()?;
    let mut traces = Vec::with_capacity(grid.points.len());
    for q in &grid.points {
        let mut trace = Vec::with_capacity(points.len());
        for (x, db) in points.iter().zip(&base) {
            trace.push(geometry.distance(metric, q, x)? - db);
        }
        traces.push(trace);
    }
    let (osc, probe) = tail_oscillation(&traces, TAIL_WINDOW);
    let defect = almost_geodesic_defect(geometry, metric, &points)?.epsilon;
    let last = SampledFunction::new(
        grid.points.clone(),
        traces.iter().map(|t| *t.last().expect("nonempty trace")).collect(),
    )?;
    let report = ConvergenceReport {
        metric,
        probes: grid.points.clone(),
        traces,
        tail_oscillation: osc,
        tail_probe: probe,
        converged: osc < CONVERGENCE_TOL,
        reference_deviation: None,
        defect,
    };
    Ok((report, last))
}

#[derive(Debug, Clone, Serialize)]
pub struct DefectStep {
    /// Index `l` of the partial sum `Σ_{i≤l} d(x_{i−1}, x_i) − d(x_0, x_l)`.
    pub step: usize,
    pub total: f64,
    /// Funk and reverse-Funk parts, present for the Hilbert metric.
    pub funk: Option<f64>,
    pub reverse: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DefectReport {
    pub metric: Metric,
    pub epsilon: f64,
    pub steps: Vec<DefectStep>,
}

fn partial_defects(geometry: &dyn FunkGeometry, metric: Metric, points: &[Point]) -> Result<Vec<f64>> {
    let mut sum = 0.0;
    let mut out = Vec::with_capacity(points.len() - 1);
    for l in 1..points.len() {
        sum += geometry.distance(metric, &points[l - 1], &points[l])?;
        out.push(sum - geometry.distance(metric, &points[0], &points[l])?);
    }
    Ok(out)
}

/// `ε̂ = max_l [Σ d(x_{i−1}, x_i) − d(x_0, x_l)]`, with the Funk/reverse split for Hilbert.
pub fn almost_geodesic_defect(geometry: &dyn FunkGeometry, metric: Metric, points: &[Point]) -> Result<DefectReport> {
    if points.len() < 2 {
        return Err(Error::Domain("need at least two points".into()));
    }
    let totals = partial_defects(geometry, metric, points)?;
    let (funk, reverse) = if metric == Metric::Hilbert {
        (
            Some(partial_defects(geometry, Metric::Funk, points)?),
            Some(partial_defects(geometry, Metric::Reverse, points)?),
        )
    } else {
        (None, None)
    };
    let steps = totals
        .iter()
        .enumerate()
        .map(|(k, &total)| DefectStep {
            step: k + 1,
            total,
            funk: funk.as_ref().map(|f| f[k]),
            reverse: reverse.as_ref().map(|r| r[k]),
        })
        .collect();
    let epsilon = totals.iter().cloned().fold(0.0, f64::max);
    Ok(DefectReport { metric, epsilon, steps })
}

#[derive(Debug, Clone)]
pub struct GeodesicOptions {
    pub steps: usize,
    /// Cap on the halvings spent on any single step.
    pub max_halvings: usize,
    /// Points cycled through by the pointwise conditions; defaults to a cone grid.
    pub probes: Vec<Point>,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        GeodesicOptions { steps: 1000, max_halvings: 200, probes: Vec::new() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlmostGeodesic {
    pub points: Vec<Point>,
    pub lambdas: Vec<f64>,
}

/// Builds `y_n = (1 − λ_n) z + λ_n p` for a descriptor whose cone is `τ(C, z)`,
/// halving `λ_n` from `λ_{n−1}/2` until `y_n` is interior, `|y_n − z| < 1/n`, the
/// Funk gaps at the cycled probe and at the basepoint are below `1/n`, and the
/// two step gaps to `y_{n−1}` are below `2^{1−n}`.
pub fn construct_almost_geodesic(d: &BusemannDescriptor, options: &GeodesicOptions) -> Result<AlmostGeodesic> {
    if !d.chain.is_empty() {
        return Err(Error::Unsupported("only descriptors whose cone is the tangent cone at z".into()));
    }
    let c = &d.cone;
    let r = d.target();
    let probes = if options.probes.is_empty() {
        ProbeGrid::for_cone(c, &d.basepoint, 16, DEFAULT_SEED)?.points
    } else {
        options.probes.clone()
    };
    let rev = reverse_horofunction(c, &d.z, &d.basepoint)?;
    let funk_gap = |u: &[f64], y: &[f64]| -> Result<f64> { Ok(funk_cone(c, u, y)? - funk_cone(r, u, y)?) };
    let mut points: Vec<Point> = Vec::with_capacity(options.steps);
    let mut lambdas: Vec<f64> = Vec::with_capacity(options.steps);
    let mut lambda = 1.0f64;
    for n in 1..=options.steps {
        let probe = &probes[(n - 1) % probes.len()];
        let inv_n = 1.0 / n as f64;
        let step_tol = 0.5f64.powi(n as i32 - 1);
        let mut accepted = None;
        for _ in 0..options.max_halvings {
            lambda *= 0.5;
            let y = linalg::lerp(&d.z, &d.p, lambda);
            if !c.contains(&y) || linalg::dist(&y, &d.z) >= inv_n {
                continue;
            }
            if funk_gap(probe, &y)? >= inv_n || funk_gap(&d.basepoint, &y)? >= inv_n {
                continue;
            }
            if let Some(prev) = points.last() {
                if funk_gap(prev, &y)? >= step_tol {
                    continue;
                }
                let back = reverse_funk_cone(c, prev, &y)? + rev.eval(&y)? - rev.eval(prev)?;
                if back >= step_tol {
                    continue;
                }
            }
            accepted = Some(y);
            break;
        }
        let y = accepted.ok_or_else(|| Error::Budget(format!("conditions not met at step {n}")))?;
        points.push(y);
        lambdas.push(lambda);
    }
    Ok(AlmostGeodesic { points, lambdas })
}

/// Distance helper choosing the steadier route for polytopes.
pub fn body_geometry(body: &ConvexBody) -> Box<dyn FunkGeometry> {
    match body.as_polytope() {
        Some(p) => Box::new(LiftedPolytope::new(p)),
        None => Box::new(body.clone()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Report {
    pub targets: [Point; 2],
    /// Largest tail spread of the Hilbert traces and the probe attaining it.
    pub oscillation: f64,
    pub probe: Point,
    /// `log(|wy||zx| / (|wx||zy|))` for the two targets; infinite when their chord crosses the interior.
    pub separation: f64,
    pub unbounded: bool,
    pub converged: bool,
}

fn boundary_along(body: &ConvexBody, from: &[f64], dir: &[f64]) -> Point {
    let (lo, hi) = body.bounding_box();
    let diam = linalg::dist(&lo, &hi);
    let (mut a, mut b) = (0.0f64, diam);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if body.closure_contains(&linalg::axpy(from, m, dir), 1e-12) {
            a = m;
        } else {
            b = m;
        }
    }
    linalg::axpy(from, a, dir)
}

/// The separation quantity for two boundary points of `body`.
pub fn cross_ratio_separation(body: &ConvexBody, x: &[f64], y: &[f64]) -> Result<f64> {
    let u = linalg::unit(&linalg::sub(x, y)).ok_or(Error::Domain("targets coincide".into()))?;
    if body.contains(&linalg::lerp(x, y, 0.5))? {
        return Ok(f64::INFINITY);
    }
    let w = boundary_along(body, x, &u);
    let z = boundary_along(body, y, &linalg::scale(&u, -1.0));
    let (wx, zy) = (linalg::dist(&w, x), linalg::dist(&z, y));
    if wx == 0.0 || zy == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((linalg::dist(&w, y) * linalg::dist(&z, x) / (wx * zy)).ln())
}

/// Approaches two boundary points alternately and measures how far the Hilbert
/// traces are from converging.
pub fn theorem2_harness(body: &ConvexBody, targets: [Point; 2], grid: &ProbeGrid, steps: usize) -> Result<Theorem2Report> {
    if linalg::dist(&targets[0], &targets[1]) <= EPS_GEO {
        return Err(Error::Domain("targets are equal".into()));
    }
    for t in &targets {
        check_dim(body.dim(), t.len())?;
        if body.contains(t)? || !body.closure_contains(t, 1e-9) {
            return Err(Error::NotOnBoundary(format!("{t:?}")));
        }
    }
    let geometry = body_geometry(body);
    let plan = SequencePlan::Oscillating { from: grid.basepoint().to_vec(), targets: targets.clone(), steps };
    let (report, _) = horofunction_limit(geometry.as_ref(), &plan, grid, Metric::Hilbert)?;
    let separation = cross_ratio_separation(body, &targets[0], &targets[1])?;
    Ok(Theorem2Report {
        probe: grid.points[report.tail_probe].clone(),
        oscillation: report.tail_oscillation,
        converged: report.converged,
        unbounded: separation.is_infinite(),
        separation,
        targets,
    })
}

/// Largest `n` used along the approach to `(1, 0, 0)`.
pub const EXAMPLE2_MAX_N: usize = 2000;

#[derive(Debug, Clone, Serialize)]
pub struct Example2Report {
    pub sequence: String,
    pub limit: SampledFunction,
    /// Sup distance from `log(1 − x) − log(1 − b_x)` on the grid.
    pub deviation: f64,
    pub tail_oscillation: f64,
    pub radial: SampledFunction,
    /// Largest gap to the radial-approach limit and the probe attaining it.
    pub separation: f64,
    pub separation_probe: Point,
}

/// Points `(1 − 1/n³)(cos(1/n), sin(1/n), 0)` for `n = 100, 200, …, max_n`.
pub fn example2_sequence(max_n: usize) -> Vec<Point> {
    (1..=max_n / 100)
        .map(|k| {
            let n = (100 * k) as f64;
            let s = 1.0 - n.powi(-3);
            vec![s * (1.0 / n).cos(), s * (1.0 / n).sin(), 0.0]
        })
        .collect()
}

/// Default Example 2 grid: the basepoint `0`, named probes, and body probes scaled by one half.
pub fn example2_grid(seed: u64) -> Result<ProbeGrid> {
    let body = fixtures::example2()?;
    let grid = ProbeGrid::for_body(&body, &[0.0; 3], DEFAULT_GRID_SIZE, seed)?.scaled(&[0.0; 3], 0.5);
    Ok(grid.with_points([vec![0.5, 0.0, 0.0], vec![0.0, 0.0, 0.5], vec![-0.5, 0.0, 0.25]]))
}

/// Funk limits on the Example 2 body along the sequence near the boundary
/// circle, compared with `log(1 − x)` and with the radial approach to `(1, 0, 0)`.
pub fn example2_harness(grid: &ProbeGrid) -> Result<Example2Report> {
    let body = fixtures::example2()?;
    let b = grid.basepoint().to_vec();
    let plan = SequencePlan::Custom(example2_sequence(EXAMPLE2_MAX_N));
    let (report, limit) = horofunction_limit(&body, &plan, grid, Metric::Funk)?;
    let expected = |q: &[f64]| (1.0 - q[0]).ln() - (1.0 - b[0]).ln();
    let deviation = limit
        .points
        .iter()
        .zip(&limit.values)
        .map(|(q, v)| (v - expected(q)).abs())
        .fold(0.0, f64::max);
    let radial_plan = SequencePlan::Segment { from: b.clone(), to: vec![1.0, 0.0, 0.0], steps: DEFAULT_SEGMENT_STEPS };
    let (_, radial) = horofunction_limit(&body, &radial_plan, grid, Metric::Funk)?;
    let mut separation = (0.0f64, 0usize);
    for (k, (a, r)) in limit.values.iter().zip(&radial.values).enumerate() {
        if (a - r).abs() > separation.0 {
            separation = ((a - r).abs(), k);
        }
    }
    Ok(Example2Report {
        sequence: format!("(1 - 1/n^3)(cos(1/n), sin(1/n), 0), n = 100..={EXAMPLE2_MAX_N} step 100"),
        limit,
        deviation,
        tail_oscillation: report.tail_oscillation,
        radial,
        separation: separation.0,
        separation_probe: grid.points[separation.1].clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{lift_point, open_tangent_cone};
    use crate::horo::{busemann_eval, funk_horofunction};
    use crate::metrics::hilbert_body;

    fn square_geometry() -> (ConvexBody, LiftedPolytope) {
        let sq = fixtures::square().unwrap();
        let lifted = LiftedPolytope::new(sq.as_polytope().unwrap());
        (sq, lifted)
    }

    #[test]
    fn halton_grid_is_interior_and_reproducible() {
        let disk = fixtures::disk().unwrap();
        let a = ProbeGrid::for_body(&disk, &[0.0, 0.0], 50, 7).unwrap();
        let b = ProbeGrid::for_body(&disk, &[0.0, 0.0], 50, 7).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.points.len(), 50);
        assert_eq!(a.basepoint(), &[0.0, 0.0]);
        assert!(a.points.iter().all(|q| disk.contains(q).unwrap()));
        let c = ProbeGrid::for_body(&disk, &[0.0, 0.0], 50, 8).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn disk_segment_limit_matches_closed_form() {
        let disk = fixtures::disk().unwrap();
        let grid = ProbeGrid::for_body(&disk, &[0.0, 0.0], 40, 1).unwrap();
        let plan = SequencePlan::Segment { from: vec![0.0, 0.0], to: vec![1.0, 0.0], steps: 24 };
        let (mut report, _) = horofunction_limit(&disk, &plan, &grid, Metric::Hilbert).unwrap();
        // Smooth strictly convex boundary: the Funk part tends to log(1 − q₁),
        // the reverse part to log(|zw|/|qw|) − log 2 with w the far end of the chord through z and q.
        let z = [1.0, 0.0];
        let dev = report
            .compare(|q| {
                let u = linalg::unit(&linalg::sub(q, &z)).unwrap();
                let w = linalg::axpy(&z, -2.0 * dot(&z, &u), &u);
                Ok((1.0 - q[0]).ln() + (linalg::dist(&z, &w) / linalg::dist(q, &w)).ln() - 2f64.ln())
            })
            .unwrap();
        assert!(dev < 1e-5, "{dev}");
        for r in [0.2, 0.6] {
            let v = -hilbert_body(&disk, &[0.0, 0.0], &[r, 0.0]).unwrap();
            assert!(((1.0 - r) / (1.0 + r)).ln() - v < 1e-12);
        }
    }

    #[test]
    fn segment_limits_on_square_match_evaluators() {
        let (sq, lifted) = square_geometry();
        let b = [0.0, 0.0];
        let grid = ProbeGrid::for_body(&sq, &b, 60, 3).unwrap();
        let z = [1.0, 0.25];
        let y = [-0.3, 0.4];
        let (zl, bl) = (lift_point(&z), lift_point(&b));
        let plan = SequencePlan::Segment { from: y.to_vec(), to: z.to_vec(), steps: DEFAULT_SEGMENT_STEPS };
        let rev = reverse_horofunction(&lifted.cone, &zl, &bl).unwrap();
        let (mut report, _) = horofunction_limit(&lifted, &plan, &grid, Metric::Reverse).unwrap();
        assert!(report.compare(|q| rev.eval(&lift_point(q))).unwrap() < 1e-6);
        assert!(report.defect < 1e-9);
        let tangent = open_tangent_cone(&lifted.cone, &zl).unwrap();
        let funk = funk_horofunction(&tangent, &lift_point(&y), &bl).unwrap();
        let (mut report, _) = horofunction_limit(&lifted, &plan, &grid, Metric::Funk).unwrap();
        assert!(report.compare(|q| funk.eval(&lift_point(q))).unwrap() < 1e-6);
        let d = BusemannDescriptor::new(lifted.cone.clone(), zl, vec![], lift_point(&y), bl).unwrap();
        let (mut report, _) = horofunction_limit(&lifted, &plan, &grid, Metric::Hilbert).unwrap();
        assert!(report.compare(|q| busemann_eval(&d, &lift_point(q))).unwrap() < 1e-6);
    }

    #[test]
    fn defects_of_segments_and_zigzags() {
        let (_, lifted) = square_geometry();
        let line: Vec<Point> = (0..6).map(|k| vec![-0.9 + 0.3 * k as f64, 0.2 - 0.1 * k as f64]).collect();
        for metric in [Metric::Funk, Metric::Reverse, Metric::Hilbert] {
            assert!(almost_geodesic_defect(&lifted, metric, &line).unwrap().epsilon < 1e-9);
        }
        let zigzag = vec![vec![-0.8, -0.8], vec![0.8, 0.8], vec![-0.8, 0.8]];
        let report = almost_geodesic_defect(&lifted, Metric::Hilbert, &zigzag).unwrap();
        assert!(report.epsilon > 0.1);
        for s in &report.steps {
            assert!((s.total - s.funk.unwrap() - s.reverse.unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn geoiter_on_orthant() {
        let o = PolyCone::orthant(3);
        let b = o.interior_point().to_vec();
        let z = vec![1.0, 1.0, 0.0];
        let p = vec![0.2, -0.5, 0.7];
        let d = BusemannDescriptor::new(o.clone(), z.clone(), vec![], p, b.clone()).unwrap();
        let out = construct_almost_geodesic(&d, &GeodesicOptions { steps: 200, ..Default::default() }).unwrap();
        assert!(out.lambdas.windows(2).all(|w| w[1] < w[0]));
        assert!(almost_geodesic_defect(&o, Metric::Hilbert, &out.points).unwrap().epsilon <= 4.0);
        let grid = ProbeGrid::for_cone(&o, &b, 30, 5).unwrap();
        let plan = SequencePlan::Custom(out.points);
        let (mut report, _) = horofunction_limit(&o, &plan, &grid, Metric::Hilbert).unwrap();
        assert!(report.compare(|q| busemann_eval(&d, q)).unwrap() < 1e-4);
        let rev = reverse_horofunction(&o, &z, &b).unwrap();
        let (mut report, _) = horofunction_limit(&o, &plan, &grid, Metric::Reverse).unwrap();
        assert!(report.compare(|q| rev.eval(q)).unwrap() < 1e-4);
    }

    #[test]
    fn theorem2_on_disk_and_square() {
        let disk = fixtures::disk().unwrap();
        let grid = ProbeGrid::for_body(&disk, &[0.0, 0.0], 60, 2).unwrap();
        let r = theorem2_harness(&disk, [vec![1.0, 0.0], vec![0.0, 1.0]], &grid, 40).unwrap();
        assert!(r.oscillation >= 0.1 && r.unbounded && !r.converged);
        assert!(theorem2_harness(&disk, [vec![1.0, 0.0], vec![1.0, 0.0]], &grid, 40).is_err());
        let (sq, _) = square_geometry();
        let grid = ProbeGrid::for_body(&sq, &[0.0, 0.0], 60, 2).unwrap();
        let r = theorem2_harness(&sq, [vec![1.0, 0.0], vec![-1.0, 0.0]], &grid, 40).unwrap();
        assert!(r.oscillation >= 0.1 && r.separation > 0.0);
        // Two points of one edge: finite cross ratio.
        let s = cross_ratio_separation(&sq, &[1.0, -0.5], &[1.0, 0.5]).unwrap();
        assert!((s - (1.5f64 * 1.5 / (0.5 * 0.5)).ln()).abs() < 1e-9);
    }

    #[test]
    fn example2_limit_is_log_one_minus_x() {
        let grid = example2_grid(DEFAULT_SEED).unwrap();
        let r = example2_harness(&grid).unwrap();
        assert!(r.deviation < 1e-3, "{}", r.deviation);
        assert!(r.separation >= 0.01);
        assert_eq!(r.limit.value_at(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!((r.limit.value_at(&[0.5, 0.0, 0.0]).unwrap() + 2f64.ln()).abs() < 1e-3);
        assert!((r.radial.value_at(&[0.0, 0.0, 0.5]).unwrap() - 1.5f64.ln()).abs() < 1e-6);
    }
}
