//! Property tests for the metric, cone and horofunction layers.

use hilbert_horo::cone::{dual_cone, PolyCone};
use hilbert_horo::fixtures;
use hilbert_horo::horo::{conjugate_check, lambda_inv, lambda_map, BusemannDescriptor};
use hilbert_horo::linalg::{self, Point};
use hilbert_horo::metrics::{
    funk_body, funk_body_gauge, funk_cone, hilbert_body, hilbert_cone, homogeneity_shift, reverse_funk_body,
};
use proptest::prelude::*;

fn in_square() -> impl Strategy<Value = Point> {
    prop::collection::vec(-0.95f64..0.95, 2)
}

fn in_disk() -> impl Strategy<Value = Point> {
    (0.0f64..0.95, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| vec![r * t.cos(), r * t.sin()])
}

fn in_triangle() -> impl Strategy<Value = Point> {
    // Barycentric weights over the regular triangle inscribed in the unit circle.
    (0.02f64..1.0, 0.02f64..1.0, 0.02f64..1.0).prop_map(|(a, b, c)| {
        let s = a + b + c;
        let v = |k: f64| {
            let t = std::f64::consts::FRAC_PI_2 + k * std::f64::consts::TAU / 3.0;
            [t.cos(), t.sin()]
        };
        let (p, q, r) = (v(0.0), v(1.0), v(2.0));
        vec![(a * p[0] + b * q[0] + c * r[0]) / s, (a * p[1] + b * q[1] + c * r[1]) / s]
    })
}

fn in_orthant(d: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec(0.05f64..5.0, d)
}

fn in_square_cone() -> impl Strategy<Value = Point> {
    (-0.9f64..0.9, -0.9f64..0.9, 0.2f64..3.0).prop_map(|(a, b, h)| vec![a * h, b * h, h])
}

proptest! {
    #[test]
    fn hilbert_is_symmetric_and_satisfies_triangle(x in in_disk(), y in in_disk(), z in in_disk()) {
        let disk = fixtures::disk().unwrap();
        let xy = hilbert_body(&disk, &x, &y).unwrap();
        let yx = hilbert_body(&disk, &y, &x).unwrap();
        prop_assert!((xy - yx).abs() <= 1e-9 * (1.0 + xy));
        prop_assert!(xy >= -1e-12);
        let xz = hilbert_body(&disk, &x, &z).unwrap();
        let zy = hilbert_body(&disk, &z, &y).unwrap();
        prop_assert!(xy <= xz + zy + 1e-9);
    }

    #[test]
    fn funk_triangle_on_square(x in in_square(), y in in_square(), z in in_square()) {
        let sq = fixtures::square().unwrap();
        let xy = funk_body(&sq, &x, &y).unwrap();
        let xz = funk_body(&sq, &x, &z).unwrap();
        let zy = funk_body(&sq, &z, &y).unwrap();
        prop_assert!(xy <= xz + zy + 1e-9);
    }

    #[test]
    fn reverse_funk_swaps_arguments(x in in_square(), y in in_square()) {
        let sq = fixtures::square().unwrap();
        let r = reverse_funk_body(&sq, &x, &y).unwrap();
        let f = funk_body(&sq, &y, &x).unwrap();
        prop_assert!((r - f).abs() <= 1e-9 * (1.0 + f.abs()));
    }

    #[test]
    fn ray_exit_and_gauge_routes_agree(x in in_triangle(), y in in_triangle()) {
        let tri = fixtures::triangle().unwrap();
        let a = funk_body(&tri, &x, &y).unwrap();
        let b = funk_body_gauge(&tri, &x, &y).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn ray_exit_lands_on_boundary(x in in_triangle(), t in 0.0f64..std::f64::consts::TAU) {
        let tri = fixtures::triangle().unwrap();
        let u = [t.cos(), t.sin()];
        let s = tri.ray_exit(&x, &u).unwrap();
        prop_assert!(s > 0.0);
        let (slack, _) = tri.min_slack(&linalg::axpy(&x, s, &u));
        prop_assert!(slack.abs() <= 1e-9, "slack {slack}");
    }

    #[test]
    fn segments_are_geodesics(x in in_square(), y in in_square(), t in 0.0f64..1.0) {
        let sq = fixtures::square().unwrap();
        let z = linalg::lerp(&x, &y, t);
        let whole = hilbert_body(&sq, &x, &y).unwrap();
        let split = hilbert_body(&sq, &x, &z).unwrap() + hilbert_body(&sq, &z, &y).unwrap();
        prop_assert!((whole - split).abs() <= 1e-8 * (1.0 + whole));
        let whole = funk_body(&sq, &x, &y).unwrap();
        let split = funk_body(&sq, &x, &z).unwrap() + funk_body(&sq, &z, &y).unwrap();
        prop_assert!((whole - split).abs() <= 1e-8 * (1.0 + whole.abs()));
    }

    #[test]
    fn cone_metrics_are_projective(x in in_orthant(3), y in in_orthant(3), s in 0.01f64..100.0, t in 0.01f64..100.0) {
        let o = PolyCone::orthant(3);
        let h = hilbert_cone(&o, &x, &y).unwrap();
        let hs = hilbert_cone(&o, &linalg::scale(&x, s), &linalg::scale(&y, t)).unwrap();
        prop_assert!((h - hs).abs() <= 1e-9 * (1.0 + h));
        let f = funk_cone(&o, &x, &y).unwrap();
        let fs = funk_cone(&o, &linalg::scale(&x, s), &y).unwrap();
        prop_assert!((fs - f - s.ln()).abs() <= 1e-9 * (1.0 + f.abs()));
    }

    #[test]
    fn larger_cone_gives_smaller_funk(x in in_orthant(2), y in in_orthant(2)) {
        let small = PolyCone::orthant(2);
        let big = fixtures::half_plane();
        let fs = funk_cone(&small, &x, &y).unwrap();
        let fb = funk_cone(&big, &x, &y).unwrap();
        prop_assert!(fb <= fs + 1e-12);
    }

    #[test]
    fn homogeneity_shift_on_half_plane(
        x in (-3.0f64..3.0, 0.05f64..3.0), y in (-3.0f64..3.0, 0.05f64..3.0),
        s in -3.0f64..3.0, alpha in 0.01f64..100.0,
    ) {
        let hp = fixtures::half_plane();
        let r = homogeneity_shift(&hp, &[s, 0.0], &[x.0, x.1], &[y.0, y.1], alpha).unwrap();
        prop_assert!(r.residual <= 1e-10);
    }

    #[test]
    fn dual_of_dual_recovers_cone(rows in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 3)) {
        prop_assume!(linalg::det(&rows).abs() > 0.1);
        let c = PolyCone::new(3, rows).unwrap();
        let back = dual_cone(&c).dual().unwrap();
        prop_assert!(back.same_cone(&c));
        // Facet normals of the dual are the extreme rays of the closed cone.
        for ray in dual_cone(&c).facet_normals().unwrap() {
            prop_assert!(c.normals().iter().all(|a| linalg::dot(a, &ray) >= -1e-9));
        }
    }

    #[test]
    fn lambda_maps_roundtrip(x in prop::collection::vec(-5.0f64..5.0, 2), h in 0.01f64..1.0) {
        let mut q = x.clone();
        q.push(h);
        let back = lambda_inv(&lambda_map(&q).unwrap()).unwrap();
        prop_assert!(linalg::approx_eq(&back, &q, 1e-12));
    }

    #[test]
    fn conjugate_identity_on_orthant(x in in_orthant(2), probes in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 2), 20)) {
        let o = PolyCone::orthant(2);
        let gap = conjugate_check(&o, &x, &[1.0, 1.0], &probes).unwrap();
        prop_assert!(gap <= 1e-8, "gap {gap}");
    }

    #[test]
    fn busemann_is_lipschitz_and_ray_invariant(x in in_square_cone(), y in in_square_cone(), s in 0.1f64..10.0) {
        let c = fixtures::square_cone();
        let d = BusemannDescriptor::new(c.clone(), vec![1.0, 0.0, 1.0], vec![], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 1.0])
            .unwrap();
        let (bx, by) = (d.eval(&x).unwrap(), d.eval(&y).unwrap());
        prop_assert!((bx - by).abs() <= hilbert_cone(&c, &x, &y).unwrap() + 1e-9);
        let scaled = d.eval(&linalg::scale(&x, s)).unwrap();
        prop_assert!((scaled - bx).abs() <= 1e-9 * (1.0 + bx.abs()));
    }
}
