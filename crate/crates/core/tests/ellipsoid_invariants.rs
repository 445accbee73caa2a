//! Affine equivariance, roundness and certificate consistency of the
//! M-ellipsoid construction.

use latnorm::ellipsoid::{build_m_ellipsoid, certify_covering, EllipsoidConfig};
use latnorm::linalg::Matrix;
use latnorm::rng::stream;
use latnorm::NormBody;

fn generic(budget: usize) -> EllipsoidConfig {
    EllipsoidConfig {
        fast_paths: false,
        certify_budget: Some(budget),
        ..Default::default()
    }
}

#[test]
fn covering_ratios_are_affine_invariant() {
    let square = NormBody::linf_ball(2);
    let s = Matrix::from_rows(&[vec![3.0, 1.0], vec![0.5, 0.8]]);
    let skewed = NormBody::linear_image(s, square.clone()).unwrap();
    let cfg = generic(200_000);
    let a = build_m_ellipsoid(&square, 0.5, &cfg, &mut stream(31, &[1])).unwrap();
    let b = build_m_ellipsoid(&skewed, 0.5, &cfg, &mut stream(31, &[2])).unwrap();
    let (ca, cb) = (a.certification.unwrap(), b.certification.unwrap());
    for (x, y) in [
        (&ca.volume_ratio_k_plus_b, &cb.volume_ratio_k_plus_b),
        (&ca.volume_ratio_b_plus_ck, &cb.volume_ratio_b_plus_ck),
    ] {
        assert!((x.value - y.value).abs() <= x.ci + y.ci, "{} ± {} vs {} ± {}", x.value, x.ci, y.value, y.ci);
    }
}

#[test]
fn final_body_is_round() {
    let epsilon = 0.25;
    let cfg = EllipsoidConfig {
        fast_paths: false,
        ..Default::default()
    };
    let bodies = [
        ("l1", NormBody::lp_ball(3, 1.0).unwrap()),
        ("l3", NormBody::lp_ball(3, 3.0).unwrap()),
        (
            "polytope",
            NormBody::polytope(
                vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 1.0, 1.0]],
                vec![1.0, 2.0, 0.5, 1.5],
            )
            .unwrap(),
        ),
    ];
    for (i, (name, body)) in bodies.into_iter().enumerate() {
        let r = build_m_ellipsoid(&body, epsilon, &cfg, &mut stream(32, &[i as u64])).unwrap();
        let limit = (r.c / epsilon).powi(2);
        assert!(r.roundness.ratio() <= limit, "{name}: {} > {limit}", r.roundness.ratio());
        let t = r.trajectory();
        assert!(t.windows(2).all(|w| w[1] <= w[0]), "{name}: {t:?}");
        let halving: Vec<f64> = t.windows(2).map(|w| w[1] / w[0]).collect();
        println!("{name}: trajectory {t:.3?}, step ratios {halving:.3?}");
    }
}

#[test]
fn both_normalizations_measure_the_same_sum() {
    let square = NormBody::linf_ball(2);
    let ellipse = NormBody::ellipsoid(Matrix::from_rows(&[vec![4.0, 0.0], vec![0.0, 1.0]])).unwrap();
    let est = certify_covering(&square, &ellipse, 400_000, &mut stream(33, &[])).unwrap();
    let over_a = est.over_a.expect("both ratios are reported");
    // the square has area 4; the ellipse has semi-axes 2 and 1
    let (va, vb) = (4.0, 2.0 * std::f64::consts::PI);
    let (x, y) = (over_a.value * va, est.over_b.value * vb);
    assert!((x - y).abs() <= over_a.ci * va + est.over_b.ci * vb, "{x} vs {y}");
}
