//! Property suites run against a body, reporting the worst residual per property.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::body::{ConvexBody, Polytope};
use crate::cone::{dual_face_index_sets, lift_point, lift_polytope_to_cone, tangent_cone_family};
use crate::error::{Error, Result};
use crate::horo::{busemann_catalog, BusemannDescriptor, CatalogOptions};
use crate::linalg::{self, dot, Point};
use crate::metrics::{funk_body, funk_body_gauge, hilbert_body};
use crate::polar::{extreme_sets, hausdorff_distance, polar_polytope, ExtremeFace};
use crate::EPS_GEO;

pub const SUITES: [&str; 6] = ["metric-axioms", "route-equivalence", "geodesics", "horofunctions", "polar", "all"];
pub const DEFAULT_SAMPLES: usize = 10_000;
/// Minimum Funk asymmetry expected to be found among the sampled pairs.
pub const ASYMMETRY_WITNESS: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub properties: Vec<PropertyResult>,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    /// Replaces every property tolerance when set.
    pub tol: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: DEFAULT_SAMPLES, seed: 0, tol: None }
    }
}

struct Ctx<'a> {
    body: &'a ConvexBody,
    opts: &'a VerifyOptions,
    rng: ChaCha8Rng,
}

impl Ctx<'_> {
    fn tol(&self, default: f64) -> f64 {
        self.opts.tol.unwrap_or(default)
    }

    fn point(&mut self) -> Point {
        let (lo, hi) = self.body.bounding_box();
        loop {
            let q: Point = lo.iter().zip(&hi).map(|(a, b)| a + (b - a) * self.rng.random::<f64>()).collect();
            if self.body.min_slack(&q).0 > 1e-6 {
                return q;
            }
        }
    }

    /// Passes when the worst residual stays at or below the tolerance.
    fn bound(&self, name: &str, residual: f64, default_tol: f64, samples: usize) -> PropertyResult {
        let tolerance = self.tol(default_tol);
        PropertyResult {
            name: name.into(),
            passed: residual <= tolerance,
            max_residual: residual,
            tolerance,
            samples,
            detail: None,
        }
    }
}

fn fmt_point(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|v| format!("{v:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn convex_position(ctx: &Ctx) -> Option<PropertyResult> {
    let p = ctx.body.as_polytope()?;
    let extreme = p.extreme_vertex_indices().len();
    let total = p.vertices().len();
    Some(PropertyResult {
        name: "convex-position".into(),
        passed: extreme == total,
        max_residual: (total - extreme) as f64,
        tolerance: 0.0,
        samples: total,
        detail: (extreme != total).then(|| format!("{} of {total} vertices are not extreme", total - extreme)),
    })
}

fn metric_axioms(ctx: &mut Ctx) -> Result<Vec<PropertyResult>> {
    let n = ctx.opts.samples;
    let body = ctx.body;
    let (mut sym, mut neg, mut ident, mut tri, mut funk_tri) = (0.0f64, 0.0f64, 0.0f64, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut asym = (0.0f64, Point::new(), Point::new());
    for _ in 0..n {
        let (x, y, z) = (ctx.point(), ctx.point(), ctx.point());
        let hxy = hilbert_body(body, &x, &y)?;
        let hyx = hilbert_body(body, &y, &x)?;
        let hxz = hilbert_body(body, &x, &z)?;
        let hyz = hilbert_body(body, &y, &z)?;
        sym = sym.max((hxy - hyx).abs());
        if hxy < 0.0 {
            neg = neg.max(-hxy);
        }
        ident = ident.max(hilbert_body(body, &x, &x)?.abs());
        if linalg::dist(&x, &y) > EPS_GEO && hxy <= 0.0 {
            ident = f64::INFINITY;
        }
        tri = tri.max(hxz - hxy - hyz);
        let (fxy, fyx) = (funk_body(body, &x, &y)?, funk_body(body, &y, &x)?);
        funk_tri = funk_tri.max(funk_body(body, &x, &z)? - fxy - funk_body(body, &y, &z)?);
        if (fxy - fyx).abs() > asym.0 {
            asym = ((fxy - fyx).abs(), x.clone(), y.clone());
        }
    }
    let mut out = vec![
        ctx.bound("hilbert-symmetry", sym, 1e-10, n),
        ctx.bound("hilbert-nonnegative", neg, 0.0, n),
        ctx.bound("hilbert-identity", ident, EPS_GEO, n),
        ctx.bound("hilbert-triangle", tri.max(0.0), 1e-9, n),
        ctx.bound("funk-triangle", funk_tri.max(0.0), 1e-9, n),
    ];
    out.push(PropertyResult {
        name: "funk-asymmetry-witness".into(),
        passed: asym.0 >= ASYMMETRY_WITNESS,
        max_residual: asym.0,
        tolerance: ASYMMETRY_WITNESS,
        samples: n,
        detail: Some(format!("x = {}, y = {}", fmt_point(&asym.1), fmt_point(&asym.2))),
    });
    Ok(out)
}

fn route_equivalence(ctx: &mut Ctx) -> Result<Vec<PropertyResult>> {
    let n = ctx.opts.samples;
    let mut worst = 0.0f64;
    for _ in 0..n {
        let (x, y) = (ctx.point(), ctx.point());
        let a = funk_body(ctx.body, &x, &y)?;
        let b = funk_body_gauge(ctx.body, &x, &y)?;
        worst = worst.max((a - b).abs());
    }
    Ok(vec![ctx.bound("route-equivalence", worst, 1e-9, n)])
}

fn geodesics(ctx: &mut Ctx) -> Result<Vec<PropertyResult>> {
    let n = ctx.opts.samples / 10;
    let (mut funk, mut hilbert) = (0.0f64, 0.0f64);
    for _ in 0..n {
        let (x, z) = (ctx.point(), ctx.point());
        let y = linalg::lerp(&x, &z, ctx.rng.random::<f64>());
        let f = funk_body(ctx.body, &x, &z)? - funk_body(ctx.body, &x, &y)? - funk_body(ctx.body, &y, &z)?;
        let h = hilbert_body(ctx.body, &x, &z)? - hilbert_body(ctx.body, &x, &y)? - hilbert_body(ctx.body, &y, &z)?;
        funk = funk.max(f.abs());
        hilbert = hilbert.max(h.abs());
    }
    Ok(vec![ctx.bound("funk-segment-additivity", funk, 1e-9, n), ctx.bound("hilbert-segment-additivity", hilbert, 1e-9, n)])
}

fn polytope_of<'a>(ctx: &Ctx<'a>, suite: &str) -> Result<&'a Polytope> {
    ctx.body.as_polytope().ok_or_else(|| Error::Unsupported(format!("suite '{suite}' needs a polytope body")))
}

fn horofunctions(ctx: &mut Ctx) -> Result<Vec<PropertyResult>> {
    let p = polytope_of(ctx, "horofunctions")?;
    let cone = lift_polytope_to_cone(p);
    let b = lift_point(p.centroid());
    let catalog = busemann_catalog(&cone, &CatalogOptions { basepoint: Some(b.clone()), p_grid: 0 })?;
    let descriptors: Vec<(usize, &BusemannDescriptor)> = catalog
        .iter()
        .enumerate()
        .flat_map(|(k, f)| f.members.iter().map(move |m| (k, &m.descriptor)))
        .collect();
    let pairs = (ctx.opts.samples / 100).max(10);
    let probes: Vec<(Point, Point)> = (0..pairs).map(|_| (ctx.point(), ctx.point())).collect();
    let (mut normalization, mut lipschitz, mut invariance) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    let mut values: Vec<(usize, Vec<f64>)> = Vec::new();
    for &(face, d) in &descriptors {
        normalization = normalization.max(d.eval(&b)?.abs());
        let scaled = BusemannDescriptor::new(
            d.cone.clone(),
            linalg::scale(&d.z, 2.5),
            d.chain.clone(),
            linalg::scale(&d.p, 0.4),
            b.clone(),
        )?;
        let mut trace = Vec::with_capacity(pairs);
        for (x, y) in &probes {
            let (hx, hy) = (d.eval(&lift_point(x))?, d.eval(&lift_point(y))?);
            lipschitz = lipschitz.max(hx - hy - hilbert_body(ctx.body, x, y)?);
            invariance = invariance.max((scaled.eval(&lift_point(x))? - hx).abs());
            trace.push(hx);
        }
        values.push((face, trace));
    }
    let mut closest = f64::INFINITY;
    for (i, (fi, a)) in values.iter().enumerate() {
        for (fj, c) in &values[i + 1..] {
            if fi != fj {
                let gap = a.iter().zip(c).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
                closest = closest.min(gap);
            }
        }
    }
    let count = descriptors.len();
    let tol = ctx.tol(1e-6);
    Ok(vec![
        ctx.bound("busemann-normalization", normalization, 1e-12, count),
        ctx.bound("busemann-1-lipschitz", lipschitz.max(0.0), 1e-9, count * pairs),
        ctx.bound("busemann-ray-invariance", invariance, 1e-10, count * pairs),
        PropertyResult {
            name: "catalog-distinctness".into(),
            passed: closest >= tol,
            max_residual: closest,
            tolerance: tol,
            samples: count,
            detail: Some(format!("{count} descriptors over {} faces", catalog.len())),
        },
    ])
}

fn face_member(p: &Polytope, face: &ExtremeFace, x: &[f64]) -> bool {
    p.facets().iter().all(|f| {
        let tight_on_face = face.vertices.iter().all(|&k| (dot(&f.normal, &p.vertices()[k]) - f.offset).abs() <= 1e-9);
        let s = f.offset - dot(&f.normal, x);
        s >= -1e-9 && (!tight_on_face || s.abs() <= 1e-9)
    })
}

fn polar_suite(ctx: &mut Ctx) -> Result<Vec<PropertyResult>> {
    let p = polytope_of(ctx, "polar")?;
    let polar = polar_polytope(p.vertices())?;
    let bipolar = polar_polytope(polar.vertices())?;
    let bipolar_gap = hausdorff_distance(bipolar.vertices(), p.vertices())?;
    let family = extreme_sets(p)?;
    let chords = 1000;
    let mut failures = 0usize;
    let verts = p.vertices();
    let body = ctx.body;
    for _ in 0..chords {
        let face = &family.faces[ctx.rng.random_range(0..family.faces.len())];
        let combo = |rng: &mut ChaCha8Rng| {
            let w: Vec<f64> = face.vertices.iter().map(|_| rng.random::<f64>() + 1e-3).collect();
            let s: f64 = w.iter().sum();
            let mut m = vec![0.0; p.dim()];
            for (wk, &k) in w.iter().zip(&face.vertices) {
                m = linalg::axpy(&m, wk / s, &verts[k]);
            }
            m
        };
        let m = combo(&mut ctx.rng);
        let d = if ctx.rng.random::<bool>() {
            linalg::sub(&combo(&mut ctx.rng), &m)
        } else {
            (0..p.dim()).map(|_| 2.0 * ctx.rng.random::<f64>() - 1.0).collect()
        };
        let Some(u) = linalg::unit(&d) else { continue };
        let reach = |dir: &[f64]| {
            let (mut lo, mut hi) = (0.0f64, 10.0);
            for _ in 0..80 {
                let t = 0.5 * (lo + hi);
                if body.closure_contains(&linalg::axpy(&m, t, dir), 1e-12) {
                    lo = t;
                } else {
                    hi = t;
                }
            }
            lo
        };
        let t = reach(&u).min(reach(&linalg::scale(&u, -1.0)));
        let (a, c) = (linalg::axpy(&m, t, &u), linalg::axpy(&m, -t, &u));
        if face_member(p, face, &m) && !(face_member(p, face, &a) && face_member(p, face, &c)) {
            failures += 1;
        }
    }
    let members = tangent_cone_family(&lift_polytope_to_cone(p));
    let cone = lift_polytope_to_cone(p);
    let mut member_sets: Vec<Vec<usize>> = members
        .iter()
        .map(|m| {
            let sub = cone.subcone(&m.normal_indices).expect("solid subcone");
            (0..cone.normals().len())
                .filter(|&i| sub.normals().iter().any(|n| linalg::approx_eq(n, &cone.normals()[i], 1e-12)))
                .collect()
        })
        .collect();
    member_sets.sort();
    let dual_sets = dual_face_index_sets(&cone)?;
    let polar_faces = extreme_sets(&polar)?.faces.len();
    let bridge = member_sets == dual_sets && member_sets.len() == polar_faces;
    Ok(vec![
        ctx.bound("bipolar-identity", bipolar_gap, 1e-9, 1),
        ctx.bound("face-chord-test", failures as f64, 0.0, chords),
        PropertyResult {
            name: "duality-bridge".into(),
            passed: bridge,
            max_residual: if bridge { 0.0 } else { 1.0 },
            tolerance: 0.0,
            samples: members.len(),
            detail: Some(format!(
                "{} tangent cones, {} dual faces, {polar_faces} polar faces",
                member_sets.len(),
                dual_sets.len()
            )),
        },
    ])
}

/// Runs a named suite; `all` runs every suite that applies to the body.
pub fn run_suite(body: &ConvexBody, suite: &str, opts: &VerifyOptions) -> Result<SuiteReport> {
    if !SUITES.contains(&suite) {
        return Err(Error::Domain(format!("unknown suite '{suite}' (expected one of {})", SUITES.join(", "))));
    }
    let mut ctx = Ctx { body, opts, rng: ChaCha8Rng::seed_from_u64(opts.seed) };
    let mut properties: Vec<PropertyResult> = convex_position(&ctx).into_iter().collect();
    let polytope = body.as_polytope().is_some();
    let run = |name: &str| suite == name || (suite == "all" && (polytope || !matches!(name, "horofunctions" | "polar")));
    if run("metric-axioms") {
        properties.extend(metric_axioms(&mut ctx)?);
    }
    if run("route-equivalence") {
        properties.extend(route_equivalence(&mut ctx)?);
    }
    if run("geodesics") {
        properties.extend(geodesics(&mut ctx)?);
    }
    if run("horofunctions") {
        properties.extend(horofunctions(&mut ctx)?);
    }
    if run("polar") {
        properties.extend(polar_suite(&mut ctx)?);
    }
    Ok(SuiteReport { suite: suite.into(), seed: opts.seed, passed: properties.iter().all(|p| p.passed), properties })
}
