//! Euclidean projections onto norm bodies.

use super::{golden_section, lp_norm, BodyKind, NormBody};
use crate::error::{Error, Result};
use crate::linalg::{dist2, dot, norm2, Matrix};
use crate::scalar::Real;

impl<F: Real> NormBody<F> {
    /// `argmin_{y ∈ K} ‖x − y‖₂`.
    pub fn project(&self, x: &[F]) -> Result<Vec<F>> {
        assert_eq!(x.len(), self.dim(), "vector dimension does not match body");
        if matches!(self.kind(), BodyKind::Origin) {
            return Ok(vec![F::zero(); x.len()]);
        }
        if self.contains(x) {
            return Ok(x.to_vec());
        }
        match self.kind() {
            BodyKind::Origin => unreachable!(),
            BodyKind::LpBall { p } => project_lp(x, *p),
            BodyKind::Ellipsoid {
                eigenvalues,
                eigenvectors,
                ..
            } => Ok(project_ellipsoid(x, eigenvalues, eigenvectors)),
            BodyKind::Polytope { normals, offsets, .. } => project_polytope(x, normals, offsets),
            BodyKind::Cylinder { base } => {
                let n = x.len();
                let mut y = base.project(&x[..n - 1])?;
                y.push(x[n - 1].max(-F::one()).min(F::one()));
                Ok(y)
            }
            BodyKind::LinearImage {
                map,
                inverse,
                scalar,
                base,
            } => match scalar {
                Some(s) => {
                    let s = s.abs();
                    let inner: Vec<F> = x.iter().map(|&v| v / s).collect();
                    Ok(base.project(&inner)?.into_iter().map(|v| v * s).collect())
                }
                None => project_image(x, map, inverse, base),
            },
            BodyKind::Section { embed, base } => project_section(x, embed, base),
            BodyKind::Intersection { base, radius } => project_intersection(x, base, *radius),
            BodyKind::HullWithBall { base, radius } => project_hull(x, base, *radius),
        }
    }

    /// Euclidean distance from `x` to the body.
    pub fn distance(&self, x: &[F]) -> Result<F> {
        Ok(dist2(x, &self.project(x)?))
    }
}

fn project_lp<F: Real>(x: &[F], p: F) -> Result<Vec<F>> {
    if p.is_infinite() {
        return Ok(x.iter().map(|&v| v.max(-F::one()).min(F::one())).collect());
    }
    if p == F::c(2.0) {
        let n = norm2(x);
        return Ok(x.iter().map(|&v| v / n).collect());
    }
    if p == F::one() {
        return Ok(project_l1(x));
    }
    project_lp_general(x, p)
}

/// Projection onto the ℓ1 ball by sorting (the simplex projection).
fn project_l1<F: Real>(x: &[F]) -> Vec<F> {
    let mut a: Vec<F> = x.iter().map(|v| v.abs()).collect();
    a.sort_by(|p, q| q.partial_cmp(p).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumsum = F::zero();
    let mut theta = F::zero();
    for (j, &v) in a.iter().enumerate() {
        cumsum = cumsum + v;
        let t = (cumsum - F::one()) / F::c((j + 1) as f64);
        if v > t {
            theta = t;
        } else {
            break;
        }
    }
    x.iter()
        .map(|&v| v.signum() * (v.abs() - theta).max(F::zero()))
        .collect()
}

/// Solves `y + c·y^{p−1} = a` for `y ∈ [0, a]` by safeguarded Newton.
fn lp_coordinate<F: Real>(a: F, c: F, p: F) -> F {
    if a == F::zero() {
        return F::zero();
    }
    let (mut lo, mut hi) = (F::zero(), a);
    let mut y = a / (F::one() + c);
    let tol = F::epsilon() * F::c(4.0) * a;
    for _ in 0..100 {
        let g = y + c * y.powf(p - F::one()) - a;
        if g > F::zero() {
            hi = y;
        } else {
            lo = y;
        }
        let dg = F::one() + c * (p - F::one()) * y.powf(p - F::c(2.0));
        let mut next = y - g / dg;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = (lo + hi) / F::c(2.0);
        }
        if (next - y).abs() <= tol {
            return next;
        }
        y = next;
    }
    y
}

/// Projection onto the ℓp ball, `1 < p < ∞`, by Newton on the multiplier.
fn project_lp_general<F: Real>(x: &[F], p: F) -> Result<Vec<F>> {
    let a: Vec<F> = x.iter().map(|v| v.abs()).collect();
    let ys = |lambda: F| -> Vec<F> { a.iter().map(|&ai| lp_coordinate(ai, lambda * p, p)).collect() };
    let phi = |y: &[F]| y.iter().map(|&v| v.powf(p)).sum::<F>() - F::one();
    let mut lo = F::zero();
    let mut hi = F::one();
    while phi(&ys(hi)) > F::zero() {
        lo = hi;
        hi = hi * F::c(2.0);
        if hi > F::c(1e300) {
            return Err(Error::Tolerance {
                what: "lp projection bracket",
                tolerance: 1e-10,
                residual: f64::INFINITY,
            });
        }
    }
    let mut lambda = (lo + hi) / F::c(2.0);
    let tol = F::c(1e-12);
    for _ in 0..200 {
        let y = ys(lambda);
        let val = phi(&y);
        if val.abs() <= tol {
            break;
        }
        if val > F::zero() {
            lo = lambda;
        } else {
            hi = lambda;
        }
        // d/dλ Σ y^p with dy/dλ = −p y^{p−1} / (1 + λ p (p−1) y^{p−2})
        let deriv: F = y
            .iter()
            .filter(|&&v| v > F::zero())
            .map(|&v| {
                let dy = -p * v.powf(p - F::one())
                    / (F::one() + lambda * p * (p - F::one()) * v.powf(p - F::c(2.0)));
                p * v.powf(p - F::one()) * dy
            })
            .sum();
        let mut next = lambda - val / deriv;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = (lo + hi) / F::c(2.0);
        }
        if (hi - lo) <= F::epsilon() * hi {
            break;
        }
        lambda = next;
    }
    let y = ys(lambda);
    let residual = (lp_norm(&y, p) - F::one()).abs();
    if residual > F::c(1e-8) {
        return Err(Error::Tolerance {
            what: "lp projection",
            tolerance: 1e-8,
            residual: residual.as_f64(),
        });
    }
    Ok(y.into_iter().zip(x).map(|(v, &s)| v * s.signum()).collect())
}

/// Projection onto `{y : yᵀA⁻¹y ≤ 1}` by Newton on the multiplier in the
/// eigenbasis of `A`.
fn project_ellipsoid<F: Real>(x: &[F], lambdas: &[F], vecs: &Matrix<F>) -> Vec<F> {
    let xh = vecs.tr_mul_vec(x);
    let f = |mu: F| -> (F, F) {
        let mut val = -F::one();
        let mut der = F::zero();
        for (&xi, &l) in xh.iter().zip(lambdas) {
            let d = l + mu;
            val = val + xi * xi * l / (d * d);
            der = der - F::c(2.0) * xi * xi * l / (d * d * d);
        }
        (val, der)
    };
    let mut mu = F::zero();
    for _ in 0..200 {
        let (v, d) = f(mu);
        if v <= F::c(1e-15) {
            break;
        }
        let step = v / d;
        mu = mu - step;
        if step.abs() <= F::epsilon() * mu.abs() {
            break;
        }
    }
    let yh: Vec<F> = xh
        .iter()
        .zip(lambdas)
        .map(|(&xi, &l)| xi * l / (l + mu))
        .collect();
    vecs.mul_vec(&yh)
}

/// Dykstra's alternating projections over the symmetric slabs.
fn project_polytope<F: Real>(x: &[F], normals: &[Vec<F>], offsets: &[F]) -> Result<Vec<F>> {
    let m = normals.len();
    let n = x.len();
    let sq: Vec<F> = normals.iter().map(|a| dot(a, a)).collect();
    let mut y = x.to_vec();
    let mut incr = vec![vec![F::zero(); n]; m];
    let scale = norm2(x).max(F::one());
    let tol = F::c(1e-12) * scale;
    for _sweep in 0..200_000 {
        let mut change = F::zero();
        for i in 0..m {
            let z: Vec<F> = y.iter().zip(&incr[i]).map(|(&a, &b)| a + b).collect();
            let v = dot(&normals[i], &z);
            let b = offsets[i];
            let shift = if v > b {
                (v - b) / sq[i]
            } else if v < -b {
                (v + b) / sq[i]
            } else {
                F::zero()
            };
            let mut next = z.clone();
            if shift != F::zero() {
                for (nk, &ak) in next.iter_mut().zip(&normals[i]) {
                    *nk = *nk - shift * ak;
                }
            }
            for k in 0..n {
                incr[i][k] = z[k] - next[k];
                change = change.max((next[k] - y[k]).abs());
            }
            y = next;
        }
        if change <= tol {
            let viol = normals
                .iter()
                .zip(offsets)
                .map(|(a, &b)| (dot(a, &y).abs() - b).max(F::zero()) / b)
                .fold(F::zero(), F::max);
            if viol <= F::c(1e-9) {
                return Ok(y);
            }
        }
    }
    Err(Error::Tolerance {
        what: "polytope projection",
        tolerance: tol.as_f64(),
        residual: f64::NAN,
    })
}

/// FISTA on `min ½‖Tz − x‖²` over `z ∈ base`.
fn project_image<F: Real>(
    x: &[F],
    map: &Matrix<F>,
    inverse: &Matrix<F>,
    base: &NormBody<F>,
) -> Result<Vec<F>> {
    let sv = map.singular_values();
    let lip = sv[sv.len() - 1] * sv[sv.len() - 1];
    let step = F::one() / lip;
    let mut z = base.project(&inverse.mul_vec(x))?;
    let mut w = z.clone();
    let mut t = F::one();
    let objective = |z: &[F]| {
        let r = crate::linalg::sub(&map.mul_vec(z), x);
        dot(&r, &r)
    };
    let mut best = objective(&z);
    let scale = norm2(&z).max(F::one());
    let mut last_delta = F::infinity();
    for _ in 0..50_000 {
        let grad = map.tr_mul_vec(&crate::linalg::sub(&map.mul_vec(&w), x));
        let cand: Vec<F> = w.iter().zip(&grad).map(|(&a, &g)| a - step * g).collect();
        let znew = base.project(&cand)?;
        let obj = objective(&znew);
        let tnew = (F::one() + (F::one() + F::c(4.0) * t * t).sqrt()) / F::c(2.0);
        let delta = dist2(&znew, &z);
        if obj > best {
            if t == F::one() {
                // a plain projected-gradient step no longer improves
                return Ok(map.mul_vec(&z));
            }
            // adaptive restart
            w = z.clone();
            t = F::one();
            continue;
        }
        let mom = (t - F::one()) / tnew;
        w = znew
            .iter()
            .zip(&z)
            .map(|(&a, &b)| a + mom * (a - b))
            .collect();
        z = znew;
        t = tnew;
        best = obj;
        last_delta = delta;
        if delta <= F::c(1e-12) * scale {
            return Ok(map.mul_vec(&z));
        }
    }
    Err(Error::Tolerance {
        what: "linear image projection",
        tolerance: 1e-12,
        residual: last_delta.as_f64(),
    })
}

/// Dykstra between the lifted base body and the subspace `range(E)`.
fn project_section<F: Real>(x: &[F], embed: &Matrix<F>, base: &NormBody<F>) -> Result<Vec<F>> {
    let d = embed.rows();
    let lifted = embed.mul_vec(x);
    let mut y = lifted.clone();
    let mut p_incr = vec![F::zero(); d];
    let mut q_incr = vec![F::zero(); d];
    let scale = norm2(x).max(F::one());
    for _ in 0..100_000 {
        let a: Vec<F> = y.iter().zip(&p_incr).map(|(&u, &v)| u + v).collect();
        let pa = base.project(&a)?;
        p_incr = crate::linalg::sub(&a, &pa);
        let b: Vec<F> = pa.iter().zip(&q_incr).map(|(&u, &v)| u + v).collect();
        let coords = embed.tr_mul_vec(&b);
        let qb = embed.mul_vec(&coords);
        q_incr = crate::linalg::sub(&b, &qb);
        let change = dist2(&qb, &y);
        y = qb;
        if change <= F::c(1e-12) * scale && base.norm(&y) <= F::one() + F::c(1e-9) {
            return Ok(embed.tr_mul_vec(&y));
        }
    }
    Err(Error::Tolerance {
        what: "section projection",
        tolerance: 1e-12,
        residual: f64::NAN,
    })
}

/// Projection onto `K ∩ ρB₂`: `y(μ) = P_K(x/(1+μ))` with `|y(μ)| = ρ`.
fn project_intersection<F: Real>(x: &[F], base: &NormBody<F>, rho: F) -> Result<Vec<F>> {
    let y0 = base.project(x)?;
    if norm2(&y0) <= rho {
        return Ok(y0);
    }
    let at = |mu: F| -> Result<Vec<F>> {
        let s = F::one() / (F::one() + mu);
        base.project(&x.iter().map(|&v| v * s).collect::<Vec<_>>())
    };
    let (mut lo, mut hi) = (F::zero(), norm2(x) / rho);
    let mut best = at(hi)?;
    for _ in 0..200 {
        let mid = (lo + hi) / F::c(2.0);
        let y = at(mid)?;
        if norm2(&y) > rho {
            lo = mid;
        } else {
            hi = mid;
            best = y;
        }
        if hi - lo <= F::epsilon() * F::c(4.0) * hi.max(F::one()) {
            break;
        }
    }
    Ok(best)
}

/// Projection onto `conv(K ∪ rB₂) = ∪_λ (λK + (1−λ) rB₂)` by golden section
/// on `λ`.
fn project_hull<F: Real>(x: &[F], base: &NormBody<F>, r: F) -> Result<Vec<F>> {
    let nearest = |lambda: F| -> Result<Vec<F>> {
        if lambda <= F::zero() {
            return Ok(vec![F::zero(); x.len()]);
        }
        let scaled: Vec<F> = x.iter().map(|&v| v / lambda).collect();
        Ok(base.project(&scaled)?.into_iter().map(|v| v * lambda).collect())
    };
    let gap = |lambda: F| -> F {
        match nearest(lambda) {
            Ok(p) => dist2(x, &p) - (F::one() - lambda) * r,
            Err(_) => F::infinity(),
        }
    };
    let (lambda, _) = golden_section(gap, F::zero(), F::one(), F::c(1e-13), 200);
    let candidates = [F::zero(), lambda, F::one()];
    let lambda = candidates
        .into_iter()
        .min_by(|&a, &b| gap(a).partial_cmp(&gap(b)).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap();
    let p = nearest(lambda)?;
    let w = crate::linalg::sub(x, &p);
    let nw = norm2(&w);
    let rad = (F::one() - lambda) * r;
    if nw <= rad {
        return Ok(x.to_vec());
    }
    Ok(p.iter().zip(&w).map(|(&a, &b)| a + rad * b / nw).collect())
}
