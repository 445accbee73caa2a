//! Membership and uniform sampling for Minkowski sums `A + B`.

use rand::Rng;

use super::sample::sample_ball;
use super::{BodyKind, NormBody};
use crate::error::{Error, Result};
use crate::linalg::{dist2, norm2, sub};
use crate::scalar::Real;

const ALTERNATING_ITERATIONS: usize = 200;
const ALTERNATING_RESIDUAL: f64 = 1e-7;
const ACCEPTANCE_FLOOR: f64 = 1e-6;

/// Whether `x ∈ A + B`.
///
/// Exact when either summand is a Euclidean ball or the origin; otherwise
/// alternating projections between `A` and `x − B` decide membership.
pub fn minkowski_contains<F: Real>(a: &NormBody<F>, b: &NormBody<F>, x: &[F]) -> Result<bool> {
    let sa = a.sandwich();
    let sb = b.sandwich();
    let nx = norm2(x);
    if nx > (sa.big_r + sb.big_r) * (F::one() + F::c(1e-12)) {
        return Ok(false);
    }
    if matches!(a.kind(), BodyKind::Origin) {
        return Ok(b.contains(x));
    }
    if matches!(b.kind(), BodyKind::Origin) {
        return Ok(a.contains(x));
    }
    if nx <= sa.r + sb.r {
        return Ok(true);
    }
    if let Some(rho) = b.euclidean_radius() {
        return Ok(a.distance(x)? <= rho * (F::one() + F::c(1e-12)));
    }
    if let Some(rho) = a.euclidean_radius() {
        return Ok(b.distance(x)? <= rho * (F::one() + F::c(1e-12)));
    }
    if a.contains(x) || b.contains(x) {
        return Ok(true);
    }
    let mut c = x.to_vec();
    for _ in 0..ALTERNATING_ITERATIONS {
        let pa = a.project(&c)?;
        let pb = b.project(&sub(x, &pa))?;
        c = sub(x, &pb);
        if dist2(&pa, &c) < F::c(ALTERNATING_RESIDUAL) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Rejection sampler for `A + B` with proposals from the ball of radius
/// `R_A + R_B`. Tracks its acceptance rate.
pub struct MinkowskiSampler<'a, F: Real> {
    a: &'a NormBody<F>,
    b: &'a NormBody<F>,
    radius: F,
    pub proposals: u64,
    pub accepted: u64,
}

impl<'a, F: Real> MinkowskiSampler<'a, F> {
    pub fn new(a: &'a NormBody<F>, b: &'a NormBody<F>) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::validation("Minkowski summands have different dimensions"));
        }
        let radius = a.sandwich().big_r + b.sandwich().big_r;
        Ok(MinkowskiSampler {
            a,
            b,
            radius,
            proposals: 0,
            accepted: 0,
        })
    }

    pub fn bounding_radius(&self) -> F {
        self.radius
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Vec<F>> {
        let n = self.a.dim();
        let cap = (10.0 / ACCEPTANCE_FLOOR) as u64;
        let start = self.proposals;
        loop {
            let x: Vec<F> = sample_ball(n, self.radius, rng);
            self.proposals += 1;
            if minkowski_contains(self.a, self.b, &x)? {
                self.accepted += 1;
                return Ok(x);
            }
            let used = self.proposals - start;
            if used >= cap {
                return Err(Error::SamplingInfeasible {
                    acceptance: self.accepted as f64 / self.proposals as f64,
                    floor: ACCEPTANCE_FLOOR,
                });
            }
        }
    }
}

/// One uniform sample from `A + B`.
pub fn sample_minkowski_sum<F: Real, R: Rng + ?Sized>(
    a: &NormBody<F>,
    b: &NormBody<F>,
    rng: &mut R,
) -> Result<Vec<F>> {
    MinkowskiSampler::new(a, b)?.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn degenerate_summand_gives_disc() {
        let a = NormBody::<f64>::origin(2);
        let b = NormBody::euclidean_ball(2);
        let mut rng = stream(3, &[]);
        let m = 20_000;
        let mut mean = [0.0; 2];
        for _ in 0..m {
            let x = sample_minkowski_sum(&a, &b, &mut rng).unwrap();
            assert!(norm2(&x) <= 1.0 + 1e-12);
            mean[0] += x[0] / m as f64;
            mean[1] += x[1] / m as f64;
        }
        // each coordinate has variance 1/4 on the unit disc
        let sd = (0.25 / m as f64).sqrt();
        assert!(mean[0].abs() < 3.0 * sd && mean[1].abs() < 3.0 * sd);
    }

    #[test]
    fn sum_of_squares_is_square() {
        let a = NormBody::<f64>::linf_ball(2);
        let mut rng = stream(4, &[]);
        let m = 20_000;
        let mut var = 0.0;
        for _ in 0..m {
            let x = sample_minkowski_sum(&a, &a, &mut rng).unwrap();
            assert!(x[0].abs() <= 2.0 + 1e-7 && x[1].abs() <= 2.0 + 1e-7);
            var += x[0] * x[0] / m as f64;
        }
        // Var U(−2,2) = 4/3; Var of x² estimate: E x⁴ − (E x²)² = 16/5 − 16/9
        let sd = ((16.0 / 5.0 - 16.0 / 9.0) / m as f64).sqrt();
        assert!((var - 4.0 / 3.0).abs() < 3.0 * sd, "{var}");
    }

    #[test]
    fn alternating_membership() {
        let a = NormBody::<f64>::linf_ball(2);
        let b = NormBody::lp_ball(2, 1.0).unwrap();
        // A + B is the octagon {|x|,|y| ≤ 2, |x|+|y| ≤ 3}
        assert!(minkowski_contains(&a, &b, &[1.9, 1.0]).unwrap());
        assert!(minkowski_contains(&a, &b, &[1.45, 1.45]).unwrap());
        assert!(!minkowski_contains(&a, &b, &[1.6, 1.6]).unwrap());
        assert!(!minkowski_contains(&a, &b, &[2.1, 0.0]).unwrap());
    }
}
