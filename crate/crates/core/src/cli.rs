//! Command-line front end. [`run`] returns the exit code and the text to print so
//! the binary stays a thin wrapper.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::body::ConvexBody;
use crate::cone::{lift_point, lift_polytope_to_cone};
use crate::error::{check_dim, Error, Result};
use crate::fixtures;
use crate::horo::{busemann_catalog, BusemannDescriptor, CatalogOptions};
use crate::io::{BodySpec, DescriptorSpec};
use crate::lab::body_geometry;
use crate::linalg::{self, dot, Point};
use crate::metrics::{funk_body, funk_body_gauge, reverse_funk_body, FunkGeometry, Metric};
use crate::polar::{closedness_check, nonclosedness_witness};
use crate::verify::{run_suite, VerifyOptions, DEFAULT_SAMPLES};

/// Default level tolerance for horosphere points.
pub const LEVEL_TOL: f64 = 1e-8;
const SCAN_STEPS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn parse_metric(s: &str) -> std::result::Result<Metric, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "hilbert-horo", version, about = "Funk, reverse-Funk and Hilbert geometry toolkit")]
pub struct Cli {
    /// Body description (JSON file).
    #[arg(long, global = true)]
    pub body: Option<PathBuf>,
    /// Named fixture: disk, square, triangle, cube, example2, example4d.
    #[arg(long, global = true)]
    pub fixture: Option<String>,
    /// Comma-separated basepoint; defaults to the body's stored interior point.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub basepoint: Option<Vec<f64>>,
    #[arg(long, global = true, default_value = "hilbert", value_parser = parse_metric)]
    pub metric: Metric,
    /// Overrides property tolerances and the horosphere level tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance between two interior points by both routes.
    Dist {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        y: Vec<f64>,
    },
    /// Points of a level set along rays from the basepoint.
    Horosphere {
        /// Metric sphere around an interior point.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        center: Option<Vec<f64>>,
        /// Horofunction of a boundary point.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        boundary: Option<Vec<f64>>,
        /// Busemann descriptor (JSON file) on a polytope.
        #[arg(long)]
        descriptor: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        level: f64,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Busemann descriptor families of a polytope, one per boundary face.
    Catalog,
    /// Run a property suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Closedness of the extreme sets of the polar.
    Closedness,
    /// Non-closedness evidence for example2 or example4d.
    Witness {
        #[arg(long, default_value_t = 100)]
        n_max: usize,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Unsupported(_) => 3,
        Error::Property(_) | Error::Budget(_) => 4,
        _ => 2,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    match execute(&cli) {
        Ok((code, text)) => match &cli.out {
            Some(path) => match std::fs::write(path, &text) {
                Ok(()) => (code, String::new()),
                Err(e) => (2, format!("error: cannot write {}: {e}\n", path.display())),
            },
            None => (code, text),
        },
        Err(e) => (exit_code(&e), format!("error: {e}\n")),
    }
}

fn load_body(cli: &Cli) -> Result<ConvexBody> {
    match (&cli.body, &cli.fixture) {
        (Some(_), Some(_)) => Err(Error::Domain("give either --body or --fixture, not both".into())),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
            BodySpec::from_json(&text)?.build()
        }
        (None, Some(name)) => fixtures::fixture(name),
        (None, None) => Err(Error::Domain("a body is required: use --body or --fixture".into())),
    }
}

fn basepoint(cli: &Cli, body: &ConvexBody) -> Result<Point> {
    let b = cli.basepoint.clone().unwrap_or_else(|| body.interior_point().to_vec());
    body.check_interior(&b)?;
    Ok(b)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn csv_table(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Domain(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Domain(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Domain(e.to_string()))
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn execute(cli: &Cli) -> Result<(i32, String)> {
    match &cli.command {
        Command::Dist { x, y } => cmd_dist(cli, x, y).map(|s| (0, s)),
        Command::Horosphere { center, boundary, descriptor, level, resolution } => {
            let body = load_body(cli)?;
            let b = basepoint(cli, &body)?;
            let center = match (center, boundary, descriptor) {
                (Some(c), None, None) => Center::Point(c.clone()),
                (None, Some(z), None) => Center::Boundary(z.clone()),
                (None, None, Some(path)) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
                    Center::Descriptor(DescriptorSpec::from_json(&text)?)
                }
                _ => return Err(Error::Domain("give exactly one of --center, --boundary, --descriptor".into())),
            };
            let request = HorosphereRequest { metric: cli.metric, center, level: *level, resolution: *resolution };
            let rows = cmd_horosphere(&body, &b, &request, cli.tol.unwrap_or(LEVEL_TOL), cli.seed)?;
            Ok((0, render_horosphere(&rows, body.dim(), cli.format)?))
        }
        Command::Catalog => cmd_catalog(cli).map(|s| (0, s)),
        Command::Verify { suite, samples } => {
            let body = load_body(cli)?;
            let report = run_suite(&body, suite, &VerifyOptions { samples: *samples, seed: cli.seed, tol: cli.tol })?;
            let code = if report.passed { 0 } else { 4 };
            let text = match cli.format {
                Format::Json => json(&report),
                Format::Csv => {
                    let rows: Vec<Vec<String>> = report
                        .properties
                        .iter()
                        .map(|p| {
                            vec![
                                p.name.clone(),
                                p.passed.to_string(),
                                p.max_residual.to_string(),
                                p.tolerance.to_string(),
                                p.samples.to_string(),
                            ]
                        })
                        .collect();
                    csv_table(&strings(&["property", "passed", "max_residual", "tolerance", "samples"]), &rows)?
                }
            };
            Ok((code, text))
        }
        Command::Closedness => {
            let body = load_body(cli)?;
            Ok((0, json(&closedness_check(&body)?)))
        }
        Command::Witness { n_max } => {
            let name = cli.fixture.as_deref().ok_or_else(|| Error::Domain("witness needs --fixture".into()))?;
            let report = nonclosedness_witness(name, *n_max, cli.seed)?;
            let ok = report.sequence.iter().all(|e| e.extreme && e.hausdorff_to_limit <= e.hausdorff_bound + 1e-12)
                && !report.limit_extreme;
            let text = match cli.format {
                Format::Json => json(&report),
                Format::Csv => {
                    let rows: Vec<Vec<String>> = report
                        .sequence
                        .iter()
                        .map(|e| {
                            vec![
                                e.n.to_string(),
                                e.hausdorff_to_limit.to_string(),
                                e.hausdorff_bound.to_string(),
                                e.gap.to_string(),
                                e.extreme.to_string(),
                            ]
                        })
                        .collect();
                    csv_table(&strings(&["n", "hausdorff", "bound", "gap", "extreme"]), &rows)?
                }
            };
            Ok((if ok { 0 } else { 4 }, text))
        }
    }
}

#[derive(Debug, Serialize)]
struct DistReport {
    metric: Metric,
    x: Point,
    y: Point,
    cross_ratio: f64,
    gauge: f64,
    difference: f64,
}

fn cmd_dist(cli: &Cli, x: &[f64], y: &[f64]) -> Result<String> {
    let body = load_body(cli)?;
    check_dim(body.dim(), x.len())?;
    check_dim(body.dim(), y.len())?;
    body.check_interior(x)?;
    body.check_interior(y)?;
    let forward = || -> Result<(f64, f64)> { Ok((funk_body(&body, x, y)?, funk_body_gauge(&body, x, y)?)) };
    let backward = || -> Result<(f64, f64)> { Ok((funk_body(&body, y, x)?, funk_body_gauge(&body, y, x)?)) };
    let (cross_ratio, gauge) = match cli.metric {
        Metric::Funk => forward()?,
        Metric::Reverse => backward()?,
        Metric::Hilbert => {
            let (f, r) = (forward()?, backward()?);
            (f.0 + r.0, f.1 + r.1)
        }
    };
    let report =
        DistReport { metric: cli.metric, x: x.to_vec(), y: y.to_vec(), cross_ratio, gauge, difference: (cross_ratio - gauge).abs() };
    match cli.format {
        Format::Json => Ok(json(&report)),
        Format::Csv => csv_table(
            &strings(&["metric", "cross_ratio", "gauge", "difference"]),
            &[vec![report.metric.to_string(), cross_ratio.to_string(), gauge.to_string(), report.difference.to_string()]],
        ),
    }
}

#[derive(Debug, Clone)]
pub enum Center {
    /// Metric sphere `{q : d(c, q) = level}`.
    Point(Point),
    /// Horofunction of a boundary point, normalised at the basepoint.
    Boundary(Point),
    Descriptor(DescriptorSpec),
}

#[derive(Debug, Clone)]
pub struct HorosphereRequest {
    pub metric: Metric,
    pub center: Center,
    pub level: f64,
    pub resolution: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct HorosphereRow {
    pub dir_index: usize,
    pub point: Option<Point>,
    pub value: Option<f64>,
    pub flag: String,
}

enum Evaluator {
    Distance(Box<dyn FunkGeometry>, Metric, Point),
    Reverse(ConvexBody, Point, f64),
    Descriptor(BusemannDescriptor, Metric),
}

impl Evaluator {
    fn eval(&self, q: &[f64]) -> Result<f64> {
        match self {
            Evaluator::Distance(g, metric, c) => g.distance(*metric, c, q),
            Evaluator::Reverse(body, z, offset) => Ok(reverse_funk_body(body, q, z)? - offset),
            Evaluator::Descriptor(d, metric) => {
                let x = lift_point(q);
                match metric {
                    Metric::Reverse => d.reverse_part().eval(&x),
                    Metric::Funk => d.funk_part().eval(&x),
                    Metric::Hilbert => d.eval(&x),
                }
            }
        }
    }
}

fn descriptor_for(body: &ConvexBody, b: &[f64], spec: &DescriptorSpec, metric: Metric) -> Result<Evaluator> {
    let p = body
        .as_polytope()
        .ok_or_else(|| Error::Unsupported("descriptor horofunctions need a polytope body".into()))?;
    check_dim(body.dim(), spec.z.len())?;
    let cone = lift_polytope_to_cone(p);
    let pl = spec.p.clone().unwrap_or_else(|| lift_point(b));
    let d = BusemannDescriptor::new(cone, lift_point(&spec.z), spec.chain.clone(), pl, lift_point(b))?;
    Ok(Evaluator::Descriptor(d, metric))
}

fn directions(dim: usize, count: usize, seed: u64) -> Vec<Point> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let v: Point = (0..dim).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
                let n = linalg::norm(&v);
                if n > 1e-3 && n <= 1.0 {
                    out.push(linalg::scale(&v, 1.0 / n));
                }
            }
            out
        }
    }
}

/// For each direction, the first point on the ray from `b` where the evaluator reaches `level`.
pub fn cmd_horosphere(
    body: &ConvexBody,
    b: &[f64],
    request: &HorosphereRequest,
    tol: f64,
    seed: u64,
) -> Result<Vec<HorosphereRow>> {
    if !request.level.is_finite() {
        return Err(Error::Domain("level must be finite".into()));
    }
    if request.resolution < 8 {
        return Err(Error::Domain("resolution must be at least 8".into()));
    }
    let eval = match &request.center {
        Center::Point(c) => {
            check_dim(body.dim(), c.len())?;
            body.check_interior(c)?;
            Evaluator::Distance(body_geometry(body), request.metric, c.clone())
        }
        Center::Boundary(z) => match request.metric {
            Metric::Reverse => {
                check_dim(body.dim(), z.len())?;
                if body.contains(z)? || !body.closure_contains(z, 1e-9) {
                    return Err(Error::NotOnBoundary(format!("{z:?}")));
                }
                let offset = reverse_funk_body(body, b, z)?;
                Evaluator::Reverse(body.clone(), z.clone(), offset)
            }
            metric => descriptor_for(body, b, &DescriptorSpec { z: z.clone(), chain: vec![], p: None }, metric)?,
        },
        Center::Descriptor(spec) => descriptor_for(body, b, spec, request.metric)?,
    };
    let f0 = eval.eval(b)? - request.level;
    let mut rows = Vec::with_capacity(request.resolution);
    for (k, u) in directions(body.dim(), request.resolution, seed).into_iter().enumerate() {
        if f0 == 0.0 {
            rows.push(HorosphereRow { dir_index: k, point: Some(b.to_vec()), value: Some(request.level), flag: "ok".into() });
            continue;
        }
        let exit = body.ray_exit(b, &u)?;
        let at = |t: f64| linalg::axpy(b, t, &u);
        let mut bracket = None;
        let mut prev = (0.0, f0);
        for s in 1..=SCAN_STEPS {
            let t = exit * s as f64 / (SCAN_STEPS + 1) as f64;
            let v = eval.eval(&at(t))? - request.level;
            if v == 0.0 || v.signum() != prev.1.signum() {
                bracket = Some((prev.0, t, v == 0.0));
                break;
            }
            prev = (t, v);
        }
        let Some((mut lo, mut hi, exact)) = bracket else {
            rows.push(HorosphereRow { dir_index: k, point: None, value: None, flag: "unreachable".into() });
            continue;
        };
        let mut t = hi;
        if !exact {
            let sign_lo = f0.signum();
            for _ in 0..200 {
                t = 0.5 * (lo + hi);
                let v = eval.eval(&at(t))? - request.level;
                if v.abs() <= 0.01 * tol || hi - lo <= 1e-16 * exit {
                    break;
                }
                if v.signum() == sign_lo {
                    lo = t;
                } else {
                    hi = t;
                }
            }
        }
        let point = at(t);
        let value = eval.eval(&point)?;
        let flag = if (value - request.level).abs() <= tol { "ok" } else { "inexact" };
        rows.push(HorosphereRow { dir_index: k, point: Some(point), value: Some(value), flag: flag.into() });
    }
    Ok(rows)
}

fn render_horosphere(rows: &[HorosphereRow], dim: usize, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(json(&rows)),
        Format::Csv => {
            let mut header = vec!["dir_index".to_string()];
            header.extend((0..dim).map(|j| format!("x{j}")));
            header.extend(strings(&["value", "flag"]));
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut row = vec![r.dir_index.to_string()];
                    match &r.point {
                        Some(p) => row.extend(p.iter().map(|v| v.to_string())),
                        None => row.extend((0..dim).map(|_| String::new())),
                    }
                    row.push(r.value.map(|v| v.to_string()).unwrap_or_default());
                    row.push(r.flag.clone());
                    row
                })
                .collect();
            csv_table(&header, &table)
        }
    }
}

#[derive(Debug, Serialize)]
struct CatalogMemberOut {
    /// Boundary points after the first tangent cone, lifted coordinates.
    chain: Vec<Point>,
    /// Point of the member cone, lifted coordinates.
    p: Point,
    normals: usize,
}

#[derive(Debug, Serialize)]
struct CatalogFamilyOut {
    /// Indices of the polytope vertices spanning the face.
    face: Vec<usize>,
    face_dim: usize,
    z: Point,
    tangent_family_size: usize,
    members: Vec<CatalogMemberOut>,
}

#[derive(Debug, Serialize)]
struct CatalogOut {
    basepoint: Point,
    families: Vec<CatalogFamilyOut>,
}

fn cmd_catalog(cli: &Cli) -> Result<String> {
    let body = load_body(cli)?;
    let p = body.as_polytope().ok_or_else(|| Error::Unsupported("catalog needs a polytope body".into()))?;
    let b = basepoint(cli, &body)?;
    let cone = lift_polytope_to_cone(p);
    let families = busemann_catalog(&cone, &CatalogOptions { basepoint: Some(lift_point(&b)), p_grid: 0 })?;
    let out = CatalogOut {
        basepoint: b,
        families: families
            .into_iter()
            .map(|f| {
                let face = (0..p.vertices().len())
                    .filter(|&k| {
                        let v = lift_point(&p.vertices()[k]);
                        f.face.iter().all(|&i| dot(&cone.normals()[i], &v).abs() <= 1e-9)
                    })
                    .collect();
                let h = *f.z.last().expect("nonempty point");
                CatalogFamilyOut {
                    face,
                    face_dim: f.face_dim - 1,
                    z: f.z[..f.z.len() - 1].iter().map(|v| v / h).collect(),
                    tangent_family_size: f.members.len(),
                    members: f
                        .members
                        .iter()
                        .map(|m| CatalogMemberOut {
                            chain: m.descriptor.chain.clone(),
                            p: m.descriptor.p.clone(),
                            normals: m.cone.normals().len(),
                        })
                        .collect(),
                }
            })
            .collect(),
    };
    match cli.format {
        Format::Json => Ok(json(&out)),
        Format::Csv => {
            let rows: Vec<Vec<String>> = out
                .families
                .iter()
                .map(|f| {
                    let face: Vec<String> = f.face.iter().map(|k| k.to_string()).collect();
                    vec![face.join(" "), f.face_dim.to_string(), f.tangent_family_size.to_string()]
                })
                .collect();
            csv_table(&strings(&["face", "face_dim", "tangent_family_size"]), &rows)
        }
    }
}
