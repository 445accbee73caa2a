//! The enumeration oracle against brute force and under symmetries.

use latnorm::lattice::basis_from_integers;
use latnorm::linalg::Matrix;
use latnorm::{exact_cvp, exact_svp, Basis, NormBody, Rational};
use proptest::prelude::*;

fn basis(n: usize) -> impl Strategy<Value = Basis> {
    proptest::collection::vec(proptest::collection::vec(-4i64..=4, n), n)
        .prop_filter_map("dependent columns", |cols| basis_from_integers(&cols).ok())
}

fn bodies(n: usize) -> Vec<NormBody<f64>> {
    vec![
        NormBody::euclidean_ball(n),
        NormBody::linf_ball(n),
        NormBody::lp_ball(n, 1.0).unwrap(),
        NormBody::lp_ball(n, 3.0).unwrap(),
    ]
}

/// Minimum of `‖Bx − t‖_K` over a coefficient box that provably contains
/// the minimizer: `|x_i| ≤ ‖row_i(B⁻¹)‖₂ · (‖t‖₂ + R_K · bound)` where
/// `bound` is the `K`-value of the zero vector or shortest column.
fn brute_force(b: &Basis, t: Option<&[f64]>, body: &NormBody<f64>) -> f64 {
    let cols = b.columns_f64();
    let n = cols.len();
    let inv = Matrix::from_cols(&cols).inverse().unwrap();
    let zero = vec![0.0; n];
    let t = t.unwrap_or(&zero);
    let svp = t.iter().all(|&v| v == 0.0);
    let upper = if svp {
        cols.iter().map(|c| body.norm(c)).fold(f64::INFINITY, f64::min)
    } else {
        body.norm(t)
    };
    let t2 = t.iter().map(|v| v * v).sum::<f64>().sqrt();
    let reach = t2 + body.sandwich().big_r * upper;
    let bounds: Vec<i64> = (0..n)
        .map(|i| (inv.row(i).iter().map(|v| v * v).sum::<f64>().sqrt() * reach).ceil() as i64)
        .collect();
    let mut best = f64::INFINITY;
    let mut x: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        if !(svp && x.iter().all(|&v| v == 0)) {
            let v: Vec<f64> = (0..n).map(|i| cols.iter().zip(&x).map(|(c, &a)| c[i] * a as f64).sum::<f64>() - t[i]).collect();
            best = best.min(body.norm(&v));
        }
        let mut k = 0;
        while k < n && x[k] == bounds[k] {
            x[k] = -bounds[k];
            k += 1;
        }
        if k == n {
            return best;
        }
        x[k] += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn svp_matches_brute_force(b in (2usize..=3).prop_flat_map(basis)) {
        for body in bodies(b.dim()) {
            let fast = exact_svp(&b, &body).unwrap().value;
            let slow = brute_force(&b, None, &body);
            prop_assert!((fast - slow).abs() <= 1e-9 * slow, "{} vs {}", fast, slow);
        }
    }

    #[test]
    fn cvp_matches_brute_force(
        (b, t) in (2usize..=3).prop_flat_map(|n| (basis(n), proptest::collection::vec(-6.0f64..6.0, n)))
    ) {
        for body in bodies(b.dim()) {
            let fast = exact_cvp(&b, &t, &body).unwrap().value;
            let slow = brute_force(&b, Some(&t), &body);
            prop_assert!((fast - slow).abs() <= 1e-9 * (1.0 + slow), "{} vs {}", fast, slow);
        }
    }

    #[test]
    fn svp_scales_with_the_lattice(b in (2usize..=4).prop_flat_map(basis)) {
        for body in bodies(b.dim()) {
            let base = exact_svp(&b, &body).unwrap().value;
            for s in [Rational::from_integer(2.into()), Rational::new(1.into(), 3.into())] {
                let sf = num_traits::ToPrimitive::to_f64(&s).unwrap();
                let scaled = exact_svp(&b.scaled(&s), &body).unwrap().value;
                prop_assert!((scaled - sf * base).abs() <= 1e-9 * scaled);
            }
        }
    }

    #[test]
    fn svp_commutes_with_linear_maps(
        (b, rows) in (2usize..=3).prop_flat_map(|n| (basis(n), proptest::collection::vec(proptest::collection::vec(-2.0f64..2.0, n), n)))
    ) {
        let t = Matrix::from_rows(&rows);
        prop_assume!(t.determinant().abs() > 0.2);
        let mapped: Vec<Vec<f64>> = b.columns_f64().iter().map(|c| t.mul_vec(c)).collect();
        let mapped = latnorm::FloatBasis::new(mapped).unwrap();
        for body in bodies(b.dim()) {
            let image = NormBody::linear_image(t.clone(), body.clone()).unwrap();
            let a = exact_svp(&b, &body).unwrap();
            let m = exact_svp(&mapped, &image).unwrap();
            prop_assert!((a.value - m.value).abs() <= 1e-7 * a.value, "{} vs {}", a.value, m.value);
            // the witness maps through T
            let w = t.mul_vec(&b.to_f64().combine(&m.coefficients));
            prop_assert!((image.norm(&w) - m.value).abs() <= 1e-7 * m.value);
        }
    }
}
