//! Uniform sampling from norm bodies.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use super::{BodyKind, NormBody};
use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::scalar::Real;

/// Upper bound on proposals drawn for one rejection sample.
const MAX_PROPOSALS: usize = 4_000_000;

/// Standard Gaussian vector.
pub fn sample_gaussian<F: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<F> {
    (0..n)
        .map(|_| F::c(StandardNormal.sample(rng)))
        .collect()
}

/// Uniform point on the unit sphere.
pub fn sample_sphere<F: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<F> {
    loop {
        let g: Vec<F> = sample_gaussian(n, rng);
        let nrm = norm2(&g);
        if nrm > F::zero() {
            return g.into_iter().map(|v| v / nrm).collect();
        }
    }
}

/// Uniform point in the ball of radius `radius`.
pub(crate) fn sample_ball<F: Real, R: Rng + ?Sized>(n: usize, radius: F, rng: &mut R) -> Vec<F> {
    let dir: Vec<F> = sample_sphere(n, rng);
    let u: f64 = rng.random();
    let s = radius * F::c(u.powf(1.0 / n as f64));
    dir.into_iter().map(|v| v * s).collect()
}

/// Draws proposals until `accept` holds.
pub(crate) fn rejection<F: Real, R: Rng + ?Sized>(
    rng: &mut R,
    mut propose: impl FnMut(&mut R) -> Vec<F>,
    mut accept: impl FnMut(&[F]) -> bool,
) -> Result<Vec<F>> {
    for _ in 0..MAX_PROPOSALS {
        let x = propose(rng);
        if accept(&x) {
            return Ok(x);
        }
    }
    Err(Error::SamplingInfeasible {
        acceptance: 1.0 / MAX_PROPOSALS as f64,
        floor: 1e-6,
    })
}

impl<F: Real> NormBody<F> {
    /// Uniform sample from the body.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<F>> {
        let n = self.dim();
        match self.kind() {
            BodyKind::Origin => Ok(vec![F::zero(); n]),
            BodyKind::LpBall { p } => Ok(sample_lp(n, *p, rng)),
            BodyKind::Ellipsoid {
                eigenvalues,
                eigenvectors,
                ..
            } => {
                let b: Vec<F> = sample_ball(n, F::one(), rng);
                let scaled: Vec<F> = b
                    .iter()
                    .zip(eigenvalues)
                    .map(|(&v, &l)| v * l.sqrt())
                    .collect();
                Ok(eigenvectors.mul_vec(&scaled))
            }
            BodyKind::Polytope {
                box_half_widths, ..
            } => rejection(
                rng,
                |rng| {
                    box_half_widths
                        .iter()
                        .map(|&h| h * F::c(rng.random_range(-1.0..=1.0)))
                        .collect()
                },
                |x| self.contains(x),
            ),
            BodyKind::Cylinder { base } => {
                let mut x = base.sample_uniform(rng)?;
                x.push(F::c(rng.random_range(-1.0..=1.0)));
                Ok(x)
            }
            BodyKind::LinearImage { map, base, .. } => Ok(map.mul_vec(&base.sample_uniform(rng)?)),
            BodyKind::Section { .. } | BodyKind::HullWithBall { .. } => {
                let big_r = self.sandwich().big_r;
                rejection(rng, |rng| sample_ball(n, big_r, rng), |x| self.contains(x))
            }
            BodyKind::Intersection { base, radius } => {
                let rad = radius.min(base.sandwich().big_r);
                rejection(rng, |rng| sample_ball(n, rad, rng), |x| self.contains(x))
            }
        }
    }
}

/// Uniform sample from the unit ℓp ball: with `g_i` of density ∝ exp(−|t|^p)
/// and `Z ~ Exp(1)`, the point `g / (Σ|g_i|^p + Z)^{1/p}` is uniform.
fn sample_lp<F: Real, R: Rng + ?Sized>(n: usize, p: F, rng: &mut R) -> Vec<F> {
    if p.is_infinite() {
        return (0..n).map(|_| F::c(rng.random_range(-1.0..=1.0))).collect();
    }
    if p == F::c(2.0) {
        return sample_ball(n, F::one(), rng);
    }
    let pf = p.as_f64();
    let gamma = Gamma::new(1.0 / pf, 1.0).expect("valid gamma parameters");
    let g: Vec<f64> = (0..n)
        .map(|_| {
            let mag: f64 = gamma.sample(rng).powf(1.0 / pf);
            if rng.random::<bool>() {
                mag
            } else {
                -mag
            }
        })
        .collect();
    let z: f64 = Exp1.sample(rng);
    let denom = (g.iter().map(|v| v.abs().powf(pf)).sum::<f64>() + z).powf(1.0 / pf);
    g.into_iter().map(|v| F::c(v / denom)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::rng::stream;

    #[test]
    fn samples_stay_inside() {
        let mut rng = stream(5, &[1]);
        let bodies: Vec<NormBody<f64>> = vec![
            NormBody::lp_ball(3, 1.0).unwrap(),
            NormBody::lp_ball(3, 3.5).unwrap(),
            NormBody::linf_ball(3),
            NormBody::ellipsoid(Matrix::diag(&[4.0, 1.0, 0.25])).unwrap(),
            NormBody::polytope(vec![vec![1.0, 1.0, 0.0], vec![0.0, 1.0, -1.0], vec![1.0, 0.0, 2.0]], vec![1.0, 1.0, 1.0])
                .unwrap(),
            NormBody::cylinder(NormBody::euclidean_ball(2)),
        ];
        for b in &bodies {
            for _ in 0..500 {
                let x = b.sample_uniform(&mut rng).unwrap();
                assert!(b.norm(&x) <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn l1_sample_radial_law() {
        // For a uniform point in an n-dimensional ball of any norm,
        // P(‖x‖ ≤ 1/2) = 2^{-n}.
        let mut rng = stream(9, &[2]);
        let b = NormBody::<f64>::lp_ball(3, 1.0).unwrap();
        let m = 40_000;
        let hits = (0..m)
            .filter(|_| b.norm(&b.sample_uniform(&mut rng).unwrap()) <= 0.5)
            .count() as f64;
        let p = 0.125;
        let sd = (p * (1.0 - p) / m as f64).sqrt();
        assert!((hits / m as f64 - p).abs() <= 4.0 * sd);
    }
}
