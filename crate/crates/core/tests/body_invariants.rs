//! Norm axioms, sandwich radii and linear images across body kinds.

use latnorm::bodies::{estimate_kissing_variant, sample_sphere};
use latnorm::linalg::Matrix;
use latnorm::rng::stream;
use latnorm::NormBody;
use proptest::prelude::*;

/// One body of every kind in dimension 3.
fn zoo() -> Vec<(&'static str, NormBody<f64>)> {
    let skew = Matrix::from_rows(&[vec![2.0, 0.5, 0.0], vec![0.0, 1.0, -0.3], vec![0.1, 0.0, 0.7]]);
    let shape = Matrix::from_rows(&[vec![3.0, 1.0, 0.0], vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 1.0]]);
    let normals = vec![
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![1.0, 1.0, 1.0],
    ];
    let embed = Matrix::from_cols(&[
        vec![1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt(), 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ]);
    vec![
        ("l1", NormBody::lp_ball(3, 1.0).unwrap()),
        ("l1.5", NormBody::lp_ball(3, 1.5).unwrap()),
        ("l2", NormBody::euclidean_ball(3)),
        ("l3", NormBody::lp_ball(3, 3.0).unwrap()),
        ("linf", NormBody::linf_ball(3)),
        ("ellipsoid", NormBody::ellipsoid(shape).unwrap()),
        ("polytope", NormBody::polytope(normals, vec![1.0, 1.0, 2.0, 1.5]).unwrap()),
        ("cylinder", NormBody::cylinder(NormBody::lp_ball(2, 1.0).unwrap())),
        ("image", NormBody::linear_image(skew, NormBody::lp_ball(3, 3.0).unwrap()).unwrap()),
        ("section", NormBody::section(embed, NormBody::lp_ball(4, 1.0).unwrap()).unwrap()),
        ("intersection", NormBody::intersect_ball(NormBody::linf_ball(3), 1.2).unwrap()),
        ("hull", NormBody::hull_with_ball(NormBody::lp_ball(3, 1.0).unwrap(), 0.8).unwrap()),
    ]
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-5.0f64..5.0, 3)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn norm_axioms(x in point(), y in point(), c in -4.0f64..4.0) {
        for (name, body) in zoo() {
            let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let (nx, ny, ns) = (body.norm(&x), body.norm(&y), body.norm(&s));
            prop_assert!(ns - nx - ny <= 1e-9 * (1.0 + nx + ny), "{}: triangle {} > {} + {}", name, ns, nx, ny);
            let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
            prop_assert!((body.norm(&cx) - c.abs() * nx).abs() <= 1e-9 * (1.0 + c.abs() * nx), "{}: homogeneity", name);
        }
    }

    #[test]
    fn image_norm_is_pulled_back(x in point(), rows in proptest::collection::vec(proptest::collection::vec(-2.0f64..2.0, 3), 3)) {
        let t = Matrix::from_rows(&rows);
        prop_assume!(t.determinant().abs() > 0.1);
        for (name, body) in zoo() {
            let image = NormBody::linear_image(t.clone(), body.clone()).unwrap();
            let (a, b) = (image.norm(&t.mul_vec(&x)), body.norm(&x));
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b), "{}: {} vs {}", name, a, b);
        }
    }
}

#[test]
fn sandwich_radii_bound_every_direction() {
    let mut rng = stream(21, &[]);
    for (name, body) in zoo() {
        let s = body.sandwich();
        for _ in 0..1000 {
            let u: Vec<f64> = sample_sphere(3, &mut rng);
            let radius = 1.0 / body.norm(&u);
            assert!(s.r <= radius * (1.0 + 1e-9) && radius <= s.big_r * (1.0 + 1e-9), "{name}: {radius} outside [{}, {}]", s.r, s.big_r);
        }
    }
}

#[test]
fn single_precision_bodies_agree() {
    let x = [0.3f32, -1.2, 0.7];
    let xd: Vec<f64> = x.iter().map(|&v| v as f64).collect();
    for p in [1.0, 2.0, 3.0, f64::INFINITY] {
        let single = NormBody::<f32>::lp_ball(3, p as f32).unwrap().norm(&x) as f64;
        let double = NormBody::<f64>::lp_ball(3, p).unwrap().norm(&xd);
        assert!((single - double).abs() <= 1e-5 * double, "p={p}");
    }
}

/// Monitored, not asserted: greedy counts are only lower bounds, so the
/// cylinder inequality can appear violated when the base count is low.
#[test]
fn cylinder_kissing_ratio_is_reported() {
    let gamma = 0.1;
    let factor = (2.0 / (1.0 - gamma) + 1.0_f64).ceil() as usize;
    for (name, base) in [
        ("l2 n=1", NormBody::euclidean_ball(1)),
        ("l2 n=2", NormBody::euclidean_ball(2)),
        ("linf n=2", NormBody::linf_ball(2)),
        ("l1 n=2", NormBody::lp_ball(2, 1.0).unwrap()),
    ] {
        let q = estimate_kissing_variant(&base, gamma, 2000, &mut stream(22, &[1])).unwrap().count;
        let cyl = NormBody::cylinder(base);
        let q1 = estimate_kissing_variant(&cyl, gamma, 2000, &mut stream(22, &[2])).unwrap().count;
        println!("cylinder kissing {name}: {q1} vs {factor}·{q} = {} ({})", factor * q, if q1 <= factor * q { "holds" } else { "violated" });
        assert!(q > 0 && q1 > 0);
    }
}
