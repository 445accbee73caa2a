//! Monte Carlo M-values `M(K) = E‖u‖_K` and `M(K°) = E h_K(u)` over the
//! unit sphere.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{sample_sphere, NormBody};
use crate::error::{Error, Result};
use crate::rng::stream;

const BLOCK: usize = 4096;
const MIN_SAMPLES: usize = 1000;

/// A Monte Carlo mean with a 3σ confidence radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MEstimate {
    pub value: f64,
    pub ci: f64,
    pub samples: usize,
}

impl MEstimate {
    pub fn contains(&self, x: f64) -> bool {
        (self.value - x).abs() <= self.ci
    }
}

/// Mean of `f(u)` over `samples` uniform directions, summed block by block
/// in a fixed order so the result does not depend on the thread count.
pub(crate) fn sphere_mean<R: Rng + ?Sized>(
    n: usize,
    samples: usize,
    rng: &mut R,
    f: impl Fn(&[f64]) -> f64 + Sync,
) -> MEstimate {
    let base: u64 = rng.random();
    let blocks = samples.div_ceil(BLOCK);
    let sums: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut r = stream(base, &[b as u64]);
            let count = BLOCK.min(samples - b * BLOCK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let u: Vec<f64> = sample_sphere(n, &mut r);
                let v = f(&u);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let m = samples as f64;
    let mean = s / m;
    let var = (s2 / m - mean * mean).max(0.0) * m / (m - 1.0).max(1.0);
    MEstimate {
        value: mean,
        ci: 3.0 * (var / m).sqrt(),
        samples,
    }
}

/// `M(K)`: the mean of `‖u‖_K` over the unit sphere.
pub fn estimate_m_value<R: Rng + ?Sized>(
    body: &NormBody<f64>,
    samples: usize,
    rng: &mut R,
) -> Result<MEstimate> {
    check(samples)?;
    Ok(sphere_mean(body.dim(), samples, rng, |u| body.norm(u)))
}

/// `M(K°)`: the mean of the support function `h_K(u)` over the unit sphere.
pub fn estimate_m_dual<R: Rng + ?Sized>(
    body: &NormBody<f64>,
    samples: usize,
    rng: &mut R,
) -> Result<MEstimate> {
    check(samples)?;
    Ok(sphere_mean(body.dim(), samples, rng, |u| body.support(u)))
}

fn check(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::validation(format!("at least {MIN_SAMPLES} samples are required")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use std::f64::consts::PI;

    #[test]
    fn euclidean_ball_is_exact() {
        let b = NormBody::euclidean_ball(5);
        let m = estimate_m_value(&b, 2000, &mut stream(1, &[])).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12);
        let m = estimate_m_dual(&b, 2000, &mut stream(1, &[])).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12);
        let twice = b.scaled(2.0).unwrap();
        let m = estimate_m_value(&twice, 2000, &mut stream(1, &[])).unwrap();
        assert!((m.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn square_closed_forms() {
        let b = NormBody::linf_ball(2);
        let m = estimate_m_value(&b, 100_000, &mut stream(2, &[])).unwrap();
        assert!(m.contains(2.0 * 2f64.sqrt() / PI), "{m:?}");
        let m = estimate_m_dual(&b, 100_000, &mut stream(3, &[])).unwrap();
        assert!(m.contains(4.0 / PI), "{m:?}");
    }

    #[test]
    fn ellipsoid_support_matches_quadrature() {
        let e = NormBody::ellipsoid(Matrix::diag(&[4.0, 1.0])).unwrap();
        let m = estimate_m_dual(&e, 50_000, &mut stream(4, &[])).unwrap();
        // E sqrt(4cos²θ + sin²θ) by the midpoint rule
        let k = 100_000;
        let exact: f64 = (0..k)
            .map(|i| {
                let t = (i as f64 + 0.5) * 2.0 * PI / k as f64;
                (4.0 * t.cos().powi(2) + t.sin().powi(2)).sqrt()
            })
            .sum::<f64>()
            / k as f64;
        assert!(m.contains(exact), "{m:?} vs {exact}");
    }

    #[test]
    fn thread_count_does_not_matter() {
        let b = NormBody::lp_ball(3, 1.5).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let one = pool.install(|| estimate_m_value(&b, 10_000, &mut stream(5, &[])).unwrap());
        let many = estimate_m_value(&b, 10_000, &mut stream(5, &[])).unwrap();
        assert_eq!(one, many);
    }
}
