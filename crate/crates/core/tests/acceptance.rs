//! Acceptance criteria 1 to 11, one pass/fail line each.

use std::process::ExitCode;
use std::time::Instant;

use hilbert_horo::cli::{self, cmd_horosphere, Center, HorosphereRequest, LEVEL_TOL};
use hilbert_horo::cone::{dual_face_index_sets, lift_point, open_tangent_cone, tangent_cone_family};
use hilbert_horo::fixtures;
use hilbert_horo::horo::{busemann_eval, conjugate_check, funk_horofunction, reverse_horofunction, BusemannDescriptor};
use hilbert_horo::lab::{
    almost_geodesic_defect, construct_almost_geodesic, example2_grid, example2_harness, horofunction_limit,
    theorem2_harness, GeodesicOptions, ProbeGrid, SequencePlan, DEFAULT_GRID_SIZE, DEFAULT_SEED, DEFAULT_SEGMENT_STEPS,
};
use hilbert_horo::linalg::{self, Point};
use hilbert_horo::metrics::{hilbert_body, homogeneity_shift, LiftedPolytope, Metric};
use hilbert_horo::polar::{closedness_check, nonclosedness_witness, Closedness};
use hilbert_horo::verify::{run_suite, VerifyOptions};
use hilbert_horo::{Error, PolyCone, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, summary: summary.into() })
}

fn metric_axioms() -> Result<Outcome> {
    let mut worst = Vec::new();
    let mut passed = true;
    let mut asymmetry = 0.0;
    for name in ["disk", "square", "triangle", "cube", "example2"] {
        let body = fixtures::fixture(name)?;
        let r = run_suite(&body, "metric-axioms", &VerifyOptions { samples: 10_000, seed: 1, tol: None })?;
        // The asymmetry witness threshold is only required on the square.
        for p in &r.properties {
            if p.name == "funk-asymmetry-witness" {
                if name == "square" {
                    asymmetry = p.max_residual;
                    passed &= p.passed;
                }
            } else {
                passed &= p.passed;
            }
        }
        let tri = r.properties.iter().find(|p| p.name == "hilbert-triangle").map_or(f64::NAN, |p| p.max_residual);
        worst.push(format!("{name} tri {tri:.1e}"));
    }
    outcome(passed, format!("10^4 triples per fixture; {}; square funk asymmetry {asymmetry:.3}", worst.join(", ")))
}

fn klein_model() -> Result<Outcome> {
    let disk = fixtures::disk()?;
    let mut worst = 0.0f64;
    for k in 1..=9 {
        let r = k as f64 / 10.0;
        let d = hilbert_body(&disk, &[0.0, 0.0], &[r, 0.0])?;
        worst = worst.max((d - ((1.0 + r) / (1.0 - r)).ln()).abs());
    }
    outcome(worst <= 1e-9, format!("max |hilbert - log((1+r)/(1-r))| = {worst:.2e}"))
}

fn route_equivalence() -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for name in ["square", "triangle", "cube"] {
        let body = fixtures::fixture(name)?;
        let r = run_suite(&body, "route-equivalence", &VerifyOptions { samples: 10_000, seed: 2, tol: None })?;
        let p = r.properties.iter().find(|p| p.name == "route-equivalence").expect("property present");
        passed &= r.passed;
        parts.push(format!("{name} {:.1e}", p.max_residual));
    }
    outcome(passed, format!("10^4 pairs per polytope: {}", parts.join(", ")))
}

fn homogeneity() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cones = [(fixtures::half_plane(), 0usize), (fixtures::edge_cone(), 0usize)];
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut samples = 0;
    for (cone, axis) in &cones {
        let d = cone.dim();
        let in_cone = |rng: &mut ChaCha8Rng| loop {
            let v: Point = (0..d).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect();
            if cone.normals().iter().all(|a| linalg::dot(a, &v) > 1e-3) {
                return v;
            }
        };
        for _ in 0..500 {
            let z = linalg::scale(&linalg::basis_vector(d, *axis), 6.0 * rng.random::<f64>() - 3.0);
            let (x, y) = (in_cone(&mut rng), in_cone(&mut rng));
            let alpha = 10f64.powf(4.0 * rng.random::<f64>() - 2.0);
            samples += 1;
            match homogeneity_shift(cone, &z, &x, &y, alpha) {
                Ok(h) => worst = worst.max(h.residual),
                Err(Error::Property(_)) => failures += 1,
                Err(e) => return Err(e),
            }
        }
    }
    outcome(failures == 0 && worst <= 1e-10, format!("{samples} samples, max residual {worst:.2e}, failures {failures}"))
}

fn tangent_family() -> Result<Outcome> {
    let orthant = tangent_cone_family(&PolyCone::orthant(2)).len();
    let square_cone = fixtures::square_cone();
    let members = tangent_cone_family(&square_cone);
    let mut sets: Vec<Vec<usize>> = members
        .iter()
        .map(|m| {
            let sub = square_cone.subcone(&m.normal_indices).expect("solid subcone");
            (0..square_cone.normals().len())
                .filter(|&i| sub.normals().iter().any(|n| linalg::approx_eq(n, &square_cone.normals()[i], 1e-12)))
                .collect()
        })
        .collect();
    sets.sort();
    let dual = dual_face_index_sets(&square_cone)?;
    let matched = sets == dual;
    outcome(
        orthant == 3 && members.len() == 9 && matched,
        format!("orthant {orthant}, square cone {}, dual-face match {matched}", members.len()),
    )
}

fn horofunction_limits() -> Result<Outcome> {
    let sq = fixtures::square()?;
    let lifted = LiftedPolytope::new(sq.as_polytope().expect("polytope"));
    let b = [0.0, 0.0];
    let grid = ProbeGrid::for_body(&sq, &b, DEFAULT_GRID_SIZE, DEFAULT_SEED)?;
    let (bl, mut worst) = (lift_point(&b), [0.0f64; 3]);
    for (z, y) in [([1.0, 0.25], [-0.3, 0.4]), ([1.0, 1.0], [0.2, -0.6]), ([-0.5, -1.0], [0.1, 0.1])] {
        let zl = lift_point(&z);
        let plan = SequencePlan::Segment { from: y.to_vec(), to: z.to_vec(), steps: DEFAULT_SEGMENT_STEPS };
        let rev = reverse_horofunction(&lifted.cone, &zl, &bl)?;
        let funk = funk_horofunction(&open_tangent_cone(&lifted.cone, &zl)?, &lift_point(&y), &bl)?;
        let d = BusemannDescriptor::new(lifted.cone.clone(), zl, vec![], lift_point(&y), bl.clone())?;
        let (mut r, _) = horofunction_limit(&lifted, &plan, &grid, Metric::Reverse)?;
        worst[0] = worst[0].max(r.compare(|q| rev.eval(&lift_point(q)))?);
        let (mut r, _) = horofunction_limit(&lifted, &plan, &grid, Metric::Funk)?;
        worst[1] = worst[1].max(r.compare(|q| funk.eval(&lift_point(q)))?);
        let (mut r, _) = horofunction_limit(&lifted, &plan, &grid, Metric::Hilbert)?;
        worst[2] = worst[2].max(r.compare(|q| busemann_eval(&d, &lift_point(q)))?);
    }
    outcome(
        worst.iter().all(|w| *w <= 1e-6),
        format!("square, 200 probes, sup deviations reverse {:.1e}, funk {:.1e}, hilbert {:.1e}", worst[0], worst[1], worst[2]),
    )
}

fn almost_geodesics() -> Result<Outcome> {
    let o = PolyCone::orthant(3);
    let b = o.interior_point().to_vec();
    let d = BusemannDescriptor::new(o.clone(), vec![1.0, 1.0, 0.0], vec![], vec![0.2, -0.5, 0.7], b.clone())?;
    let out = construct_almost_geodesic(&d, &GeodesicOptions { steps: 1000, ..Default::default() })?;
    let mut defects = Vec::new();
    for metric in [Metric::Funk, Metric::Reverse, Metric::Hilbert] {
        defects.push(almost_geodesic_defect(&o, metric, &out.points)?);
    }
    let split = defects[2]
        .steps
        .iter()
        .map(|s| (s.total - s.funk.unwrap_or(f64::NAN) - s.reverse.unwrap_or(f64::NAN)).abs())
        .fold(0.0, f64::max);
    let grid = ProbeGrid::for_cone(&o, &b, DEFAULT_GRID_SIZE, DEFAULT_SEED)?;
    let (mut r, _) = horofunction_limit(&o, &SequencePlan::Custom(out.points.clone()), &grid, Metric::Hilbert)?;
    let dev = r.compare(|q| busemann_eval(&d, q))?;
    let finite = defects.iter().all(|r| r.epsilon.is_finite());
    outcome(
        finite && split <= 1e-10 && dev <= 1e-4,
        format!(
            "orthant R^3, n = {}: defects funk {:.2e} reverse {:.2e} hilbert {:.2e}, split {split:.1e}, limit deviation {dev:.1e}",
            out.points.len(),
            defects[0].epsilon,
            defects[1].epsilon,
            defects[2].epsilon
        ),
    )
}

fn theorem2() -> Result<Outcome> {
    let disk = fixtures::disk()?;
    let grid = ProbeGrid::for_body(&disk, &[0.0, 0.0], DEFAULT_GRID_SIZE, DEFAULT_SEED)?;
    let a = theorem2_harness(&disk, [vec![1.0, 0.0], vec![0.0, 1.0]], &grid, 40)?;
    let sq = fixtures::square()?;
    let grid = ProbeGrid::for_body(&sq, &[0.0, 0.0], DEFAULT_GRID_SIZE, DEFAULT_SEED)?;
    let b = theorem2_harness(&sq, [vec![1.0, 0.0], vec![-1.0, 0.0]], &grid, 40)?;
    outcome(
        a.oscillation >= 0.1 && b.oscillation >= 0.1,
        format!("tail oscillation disk {:.3}, square {:.3}", a.oscillation, b.oscillation),
    )
}

fn conjugates() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    let sq = fixtures::square_cone();
    let cases = [
        (PolyCone::orthant(2), vec![2.0, 1.0], vec![1.0, 1.0]),
        (sq.clone(), vec![0.3, -0.2, 1.0], vec![0.0, 0.0, 1.0]),
    ];
    for (t, x, b) in &cases {
        let d = t.dim();
        let probes: Vec<Point> = (0..1000).map(|_| (0..d).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect()).collect();
        worst = worst.max(conjugate_check(t, x, b, &probes)?);
    }
    outcome(worst <= 1e-8, format!("10^3 probes on orthant and square cone, max deviation {worst:.1e}"))
}

fn example2() -> Result<Outcome> {
    let mut closed = true;
    for name in ["disk", "square", "triangle"] {
        closed &= closedness_check(&fixtures::fixture(name)?)?.verdict == Closedness::Closed;
    }
    let w = nonclosedness_witness("example2", 100, DEFAULT_SEED)?;
    let sequence_ok = w.sequence.iter().all(|e| e.extreme && e.hausdorff_to_limit <= e.hausdorff_bound + 1e-12);
    let chord_ok = !w.limit_extreme
        && w.chord.midpoint == vec![1.0, 0.0, 0.0]
        && w.chord.endpoints == [vec![1.0, 0.0, 1.0], vec![1.0, 0.0, -1.0]];
    let h = example2_harness(&example2_grid(DEFAULT_SEED)?)?;
    let harness_ok = h.deviation <= 1e-3 && h.separation >= 0.01;
    outcome(
        closed && sequence_ok && chord_ok && harness_ok,
        format!(
            "(a) 2-D closed {closed}; (b) p_n extreme and Hausdorff within bound {sequence_ok}, limit chord {chord_ok}; \
             (c) deviation from log(1-x) {:.1e}, separation {:.3}",
            h.deviation, h.separation
        ),
    )
}

fn determinism() -> Result<Outcome> {
    let dir = std::env::temp_dir().join(format!("hilbert-horo-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| Error::Domain(e.to_string()))?;
    let mut identical = true;
    let runs: [&[&str]; 3] = [
        &["verify", "--fixture", "square", "--samples", "2000", "--seed", "7"],
        &["horosphere", "--fixture", "square", "--boundary", "1,0", "--level", "0.5", "--format", "csv", "--seed", "7"],
        &["horosphere", "--fixture", "example4d", "--center", "0.1,0,0,0", "--level", "0.8", "--seed", "7"],
    ];
    for (k, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let path = dir.join(format!("run{k}-{rep}"));
            let mut full = vec!["hilbert-horo"];
            full.extend_from_slice(args);
            let path_str = path.to_string_lossy().to_string();
            full.extend_from_slice(&["--out", &path_str]);
            let (code, msg) = cli::run(full);
            if code != 0 {
                return outcome(false, format!("run {k} exited with {code}: {msg}"));
            }
            outputs.push(std::fs::read(&path).map_err(|e| Error::Domain(e.to_string()))?);
        }
        identical &= outputs[0] == outputs[1] && !outputs[0].is_empty();
    }
    let disk = fixtures::disk()?;
    let request = HorosphereRequest { metric: Metric::Hilbert, center: Center::Point(vec![0.0, 0.0]), level: 1.0, resolution: 32 };
    let a = cmd_horosphere(&disk, &[0.0, 0.0], &request, LEVEL_TOL, 3)?;
    let b = cmd_horosphere(&disk, &[0.0, 0.0], &request, LEVEL_TOL, 3)?;
    identical &= format!("{a:?}") == format!("{b:?}");
    let _ = std::fs::remove_dir_all(&dir);
    outcome(identical, "repeated verify and horosphere runs are byte-identical")
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 11] = [
        ("metric axioms", metric_axioms),
        ("Klein model", klein_model),
        ("route equivalence", route_equivalence),
        ("homogeneity", homogeneity),
        ("tangent-family counts", tangent_family),
        ("horofunction limits", horofunction_limits),
        ("almost-geodesic machinery", almost_geodesics),
        ("oscillating sequences", theorem2),
        ("conjugate identity", conjugates),
        ("non-closed extreme sets", example2),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, summary) = match check() {
            Ok(o) => (o.passed, o.summary),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        let status = if passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status}: {name}: {summary} ({:.1}s)", k + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
