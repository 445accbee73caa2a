//! Symmetric convex bodies and the norms they induce.

mod json;
pub(crate) mod kissing;
mod minkowski;
mod project;
mod sample;
mod simplex;

pub use json::NormSpec;
pub use kissing::{estimate_kissing_variant, KissingEstimate};
pub use minkowski::{minkowski_contains, sample_minkowski_sum, MinkowskiSampler};
pub use sample::{sample_gaussian, sample_sphere};
pub(crate) use sample::sample_ball;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, Matrix};
use crate::scalar::Real;

/// Certified radii with `r·B₂ ⊆ K ⊆ R·B₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichRadii<F> {
    pub r: F,
    #[serde(rename = "R")]
    pub big_r: F,
}

impl<F: Real> SandwichRadii<F> {
    pub fn new(r: F, big_r: F) -> Self {
        debug_assert!(r <= big_r * (F::one() + F::c(1e-9)), "r > R");
        SandwichRadii { r, big_r }
    }

    pub fn ratio(&self) -> F {
        self.big_r / self.r
    }
}

/// The shape behind a [`NormBody`].
#[derive(Clone, Debug)]
pub enum BodyKind<F: Real> {
    /// The single point `{0}`; only meaningful as a Minkowski summand.
    Origin,
    /// Unit ℓp ball, `p ∈ [1, ∞]`.
    LpBall { p: F },
    /// `{x : xᵀ A⁻¹ x ≤ 1}`.
    Ellipsoid {
        shape: Matrix<F>,
        inverse: Matrix<F>,
        eigenvalues: Vec<F>,
        eigenvectors: Matrix<F>,
    },
    /// `{x : |<a_i, x>| ≤ b_i}`.
    Polytope {
        normals: Vec<Vec<F>>,
        offsets: Vec<F>,
        box_half_widths: Vec<F>,
    },
    /// `Q × [−1, 1]`, one dimension above the base.
    Cylinder { base: Arc<NormBody<F>> },
    /// `T(base)`.
    LinearImage {
        map: Matrix<F>,
        inverse: Matrix<F>,
        scalar: Option<F>,
        base: Arc<NormBody<F>>,
    },
    /// `{y : E y ∈ base}` for an orthonormal `E`.
    Section { embed: Matrix<F>, base: Arc<NormBody<F>> },
    /// `base ∩ radius·B₂`.
    Intersection { base: Arc<NormBody<F>>, radius: F },
    /// `conv(base ∪ radius·B₂)`.
    HullWithBall { base: Arc<NormBody<F>>, radius: F },
}

/// A symmetric convex body with the origin in its interior.
#[derive(Clone, Debug)]
pub struct NormBody<F: Real = f64> {
    kind: BodyKind<F>,
    dim: usize,
    sandwich: SandwichRadii<F>,
}

fn lp_sandwich<F: Real>(n: usize, p: F) -> SandwichRadii<F> {
    let nf = F::c(n as f64);
    let two = F::c(2.0);
    let expo = if p.is_infinite() {
        F::c(0.5)
    } else {
        F::c(0.5) - F::one() / p
    };
    if p >= two {
        SandwichRadii::new(F::one(), nf.powf(expo))
    } else {
        SandwichRadii::new(nf.powf(expo), F::one())
    }
}

impl<F: Real> NormBody<F> {
    pub fn kind(&self) -> &BodyKind<F> {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sandwich(&self) -> SandwichRadii<F> {
        self.sandwich
    }

    pub fn origin(n: usize) -> Self {
        NormBody {
            kind: BodyKind::Origin,
            dim: n,
            sandwich: SandwichRadii { r: F::zero(), big_r: F::zero() },
        }
    }

    /// The unit ℓp ball. Pass `F::infinity()` for the max norm.
    pub fn lp_ball(n: usize, p: F) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("dimension must be positive"));
        }
        if !(p >= F::one()) {
            return Err(Error::validation(format!("p must be at least 1, got {p}")));
        }
        Ok(NormBody {
            kind: BodyKind::LpBall { p },
            dim: n,
            sandwich: lp_sandwich(n, p),
        })
    }

    pub fn euclidean_ball(n: usize) -> Self {
        Self::lp_ball(n, F::c(2.0)).expect("valid ball")
    }

    pub fn linf_ball(n: usize) -> Self {
        Self::lp_ball(n, F::infinity()).expect("valid ball")
    }

    /// The ellipsoid `{x : xᵀ A⁻¹ x ≤ 1}` for positive definite `A`.
    pub fn ellipsoid(shape: Matrix<F>) -> Result<Self> {
        if !shape.is_square() || shape.rows() == 0 {
            return Err(Error::validation("ellipsoid matrix must be square"));
        }
        if !shape.is_symmetric(F::c(1e-9)) {
            return Err(Error::validation("ellipsoid matrix must be symmetric"));
        }
        let shape = shape.symmetrize();
        let (eigenvalues, eigenvectors) = shape.symmetric_eigen();
        if !(eigenvalues[0] > F::zero()) {
            return Err(Error::validation("ellipsoid matrix must be positive definite"));
        }
        let inverse = shape.spectral_map(|l| F::one() / l);
        let n = shape.rows();
        let sandwich = SandwichRadii::new(eigenvalues[0].sqrt(), eigenvalues[n - 1].sqrt());
        Ok(NormBody {
            kind: BodyKind::Ellipsoid {
                shape,
                inverse,
                eigenvalues,
                eigenvectors,
            },
            dim: n,
            sandwich,
        })
    }

    /// The polytope `{x : |<a_i, x>| ≤ b_i}`. Must be bounded.
    pub fn polytope(normals: Vec<Vec<F>>, offsets: Vec<F>) -> Result<Self> {
        let n = normals
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::validation("polytope needs at least one facet"))?;
        if n == 0 || normals.iter().any(|a| a.len() != n) {
            return Err(Error::validation("polytope facet normals have inconsistent dimension"));
        }
        if normals.len() != offsets.len() {
            return Err(Error::validation("polytope needs one offset per facet"));
        }
        if offsets.iter().any(|&b| !(b > F::zero())) {
            return Err(Error::validation("polytope offsets must be positive"));
        }
        if normals.iter().any(|a| norm2(a) == F::zero()) {
            return Err(Error::validation("polytope facet normal is zero"));
        }
        let mut box_half_widths = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![F::zero(); n];
            e[i] = F::one();
            let (h, _) = simplex::maximize_over_slabs(&normals, &offsets, &e)
                .ok_or_else(|| Error::validation("polytope is unbounded"))?;
            box_half_widths.push(h);
        }
        let r = normals
            .iter()
            .zip(&offsets)
            .map(|(a, &b)| b / norm2(a))
            .fold(F::infinity(), F::min);
        let big_r = box_half_widths.iter().map(|&h| h * h).sum::<F>().sqrt();
        Ok(NormBody {
            kind: BodyKind::Polytope {
                normals,
                offsets,
                box_half_widths,
            },
            dim: n,
            sandwich: SandwichRadii::new(r, big_r.max(r)),
        })
    }

    /// The facets of the ℓ∞ or ℓ1 ball as a polytope description.
    fn lp_as_polytope(n: usize, p: F) -> Option<(Vec<Vec<F>>, Vec<F>)> {
        if p.is_infinite() {
            let normals = (0..n)
                .map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect())
                .collect();
            return Some((normals, vec![F::one(); n]));
        }
        if p == F::one() && n <= 12 {
            let normals: Vec<Vec<F>> = (0..1usize << (n - 1))
                .map(|mask| {
                    (0..n)
                        .map(|j| {
                            if j > 0 && mask >> (j - 1) & 1 == 1 {
                                -F::one()
                            } else {
                                F::one()
                            }
                        })
                        .collect()
                })
                .collect();
            let m = normals.len();
            return Some((normals, vec![F::one(); m]));
        }
        None
    }

    /// `Q^{+1} = Q × [−1, 1]`.
    pub fn cylinder(base: NormBody<F>) -> Self {
        let s = base.sandwich;
        NormBody {
            dim: base.dim + 1,
            sandwich: SandwichRadii::new(s.r.min(F::one()), (s.big_r * s.big_r + F::one()).sqrt()),
            kind: BodyKind::Cylinder { base: Arc::new(base) },
        }
    }

    /// The image `T(base)` of an invertible map.
    ///
    /// Ellipsoids and polytopes stay in their closed-form families; scalar
    /// maps of any body are kept as cheap rescalings.
    pub fn linear_image(map: Matrix<F>, base: NormBody<F>) -> Result<Self> {
        if !map.is_square() || map.rows() != base.dim {
            return Err(Error::validation("linear map dimension does not match body"));
        }
        let inverse = map
            .inverse()
            .ok_or_else(|| Error::validation("linear map is singular"))?;
        if !map.is_finite() || !inverse.is_finite() {
            return Err(Error::validation("linear map is not finite"));
        }
        let scalar = map.as_scalar(F::c(1e-14));
        if let Some(s) = scalar {
            if s == F::one() {
                return Ok(base);
            }
        }
        match (&base.kind, scalar) {
            (BodyKind::Origin, _) => return Ok(base),
            (BodyKind::Ellipsoid { shape, .. }, _) => {
                return Self::ellipsoid(map.mul(shape).mul(&map.transpose()));
            }
            (BodyKind::Polytope { normals, offsets, .. }, None) => {
                let inv_t = inverse.transpose();
                let normals = normals.iter().map(|a| inv_t.mul_vec(a)).collect();
                return Self::polytope(normals, offsets.clone());
            }
            (BodyKind::LpBall { p }, None) => {
                if *p == F::c(2.0) {
                    return Self::ellipsoid(map.mul(&map.transpose()));
                }
                if let Some((normals, offsets)) = Self::lp_as_polytope(base.dim, *p) {
                    return Self::linear_image(map, Self::polytope(normals, offsets)?);
                }
            }
            (
                BodyKind::LinearImage {
                    map: inner,
                    base: inner_base,
                    ..
                },
                _,
            ) => {
                return Self::linear_image(map.mul(inner), (**inner_base).clone());
            }
            _ => {}
        }
        let sv = map.singular_values();
        let s = base.sandwich;
        let sandwich = SandwichRadii::new(s.r * sv[0], s.big_r * sv[sv.len() - 1]);
        Ok(NormBody {
            dim: base.dim,
            kind: BodyKind::LinearImage {
                map,
                inverse,
                scalar,
                base: Arc::new(base),
            },
            sandwich,
        })
    }

    /// `s·K` for `s > 0`.
    pub fn scaled(&self, s: F) -> Result<Self> {
        if !(s > F::zero()) || !s.is_finite() {
            return Err(Error::validation("scale factor must be positive and finite"));
        }
        Self::linear_image(Matrix::scalar(self.dim, s), self.clone())
    }

    /// The section `{y ∈ Rⁿ : E y ∈ K}` for `E` with orthonormal columns.
    pub fn section(embed: Matrix<F>, base: NormBody<F>) -> Result<Self> {
        if embed.rows() != base.dim || embed.cols() > embed.rows() || embed.cols() == 0 {
            return Err(Error::validation("section embedding has the wrong shape"));
        }
        let n = embed.cols();
        let gram = embed.transpose().mul(&embed);
        if gram.sub(&Matrix::identity(n)).max_abs() > F::c(1e-8) {
            return Err(Error::validation("section embedding is not orthonormal"));
        }
        if n == base.dim {
            return Self::linear_image(embed.transpose(), base);
        }
        match &base.kind {
            BodyKind::LpBall { p } if *p == F::c(2.0) => return Ok(Self::euclidean_ball(n)),
            BodyKind::LpBall { p } => {
                if let Some((normals, offsets)) = Self::lp_as_polytope(base.dim, *p) {
                    return Self::section(embed, Self::polytope(normals, offsets)?);
                }
            }
            BodyKind::Ellipsoid { inverse, .. } => {
                let inv = embed.transpose().mul(inverse).mul(&embed);
                let shape = inv
                    .inverse()
                    .ok_or_else(|| Error::validation("degenerate ellipsoid section"))?;
                return Self::ellipsoid(shape);
            }
            BodyKind::Polytope { normals, offsets, .. } => {
                let mut nn = Vec::new();
                let mut oo = Vec::new();
                for (a, &b) in normals.iter().zip(offsets) {
                    let proj = embed.tr_mul_vec(a);
                    if norm2(&proj) > F::c(1e-12) * norm2(a) {
                        nn.push(proj);
                        oo.push(b);
                    }
                }
                return Self::polytope(nn, oo);
            }
            _ => {}
        }
        let sandwich = base.sandwich;
        Ok(NormBody {
            dim: n,
            kind: BodyKind::Section {
                embed,
                base: Arc::new(base),
            },
            sandwich,
        })
    }

    /// `K ∩ radius·B₂`.
    pub fn intersect_ball(base: NormBody<F>, radius: F) -> Result<Self> {
        if !(radius > F::zero()) {
            return Err(Error::validation("intersection radius must be positive"));
        }
        let s = base.sandwich;
        Ok(NormBody {
            dim: base.dim,
            sandwich: SandwichRadii::new(s.r.min(radius), s.big_r.min(radius)),
            kind: BodyKind::Intersection {
                base: Arc::new(base),
                radius,
            },
        })
    }

    /// `conv(K ∪ radius·B₂)`.
    pub fn hull_with_ball(base: NormBody<F>, radius: F) -> Result<Self> {
        if !(radius > F::zero()) {
            return Err(Error::validation("hull radius must be positive"));
        }
        let s = base.sandwich;
        Ok(NormBody {
            dim: base.dim,
            sandwich: SandwichRadii::new(s.r.max(radius), s.big_r.max(radius)),
            kind: BodyKind::HullWithBall {
                base: Arc::new(base),
                radius,
            },
        })
    }

    /// Radius `ρ` when the body is exactly `ρ·B₂`.
    pub fn euclidean_radius(&self) -> Option<F> {
        match &self.kind {
            BodyKind::LpBall { p } if *p == F::c(2.0) => Some(F::one()),
            BodyKind::Ellipsoid { eigenvalues, .. } => {
                let lo = eigenvalues[0];
                let hi = eigenvalues[eigenvalues.len() - 1];
                ((hi - lo).abs() <= F::c(1e-12) * hi).then(|| hi.sqrt())
            }
            BodyKind::LinearImage {
                scalar: Some(s),
                base,
                ..
            } => base.euclidean_radius().map(|r| r * s.abs()),
            _ => None,
        }
    }

    /// Whether evaluating the norm involves an inner iterative solver.
    pub fn is_composite(&self) -> bool {
        match &self.kind {
            BodyKind::Intersection { .. } | BodyKind::HullWithBall { .. } | BodyKind::Section { .. } => {
                true
            }
            BodyKind::Cylinder { base } | BodyKind::LinearImage { base, .. } => base.is_composite(),
            _ => false,
        }
    }

    fn check_dim(&self, x: &[F]) {
        assert_eq!(x.len(), self.dim, "vector dimension does not match body");
    }

    /// The gauge `‖x‖_K = min{s ≥ 0 : x ∈ sK}`.
    pub fn norm(&self, x: &[F]) -> F {
        self.check_dim(x);
        match &self.kind {
            BodyKind::Origin => {
                if x.iter().all(|v| *v == F::zero()) {
                    F::zero()
                } else {
                    F::infinity()
                }
            }
            BodyKind::LpBall { p } => lp_norm(x, *p),
            BodyKind::Ellipsoid { inverse, .. } => dot(x, &inverse.mul_vec(x)).max(F::zero()).sqrt(),
            BodyKind::Polytope { normals, offsets, .. } => normals
                .iter()
                .zip(offsets)
                .map(|(a, &b)| dot(a, x).abs() / b)
                .fold(F::zero(), F::max),
            BodyKind::Cylinder { base } => {
                let (head, last) = x.split_at(self.dim - 1);
                base.norm(head).max(last[0].abs())
            }
            BodyKind::LinearImage {
                inverse,
                scalar,
                base,
                ..
            } => match scalar {
                Some(s) => base.norm(x) / s.abs(),
                None => base.norm(&inverse.mul_vec(x)),
            },
            BodyKind::Section { embed, base } => base.norm(&embed.mul_vec(x)),
            BodyKind::Intersection { base, radius } => base.norm(x).max(norm2(x) / *radius),
            BodyKind::HullWithBall { base, radius } => hull_gauge(base, *radius, x).0,
        }
    }

    pub fn contains(&self, x: &[F]) -> bool {
        self.norm(x) <= F::one() + F::c(1e-12)
    }

    /// A subgradient of the gauge at `x` (zero at the origin).
    pub fn norm_gradient(&self, x: &[F]) -> Vec<F> {
        self.check_dim(x);
        let n = self.dim;
        if x.iter().all(|v| *v == F::zero()) {
            return vec![F::zero(); n];
        }
        match &self.kind {
            BodyKind::Origin => vec![F::zero(); n],
            BodyKind::LpBall { p } => lp_gradient(x, *p),
            BodyKind::Ellipsoid { inverse, .. } => {
                let ax = inverse.mul_vec(x);
                let nv = dot(x, &ax).sqrt();
                ax.into_iter().map(|v| v / nv).collect()
            }
            BodyKind::Polytope { normals, offsets, .. } => {
                let (i, _) = normals
                    .iter()
                    .zip(offsets)
                    .map(|(a, &b)| dot(a, x).abs() / b)
                    .enumerate()
                    .fold((0, F::neg_infinity()), |best, (i, v)| if v > best.1 { (i, v) } else { best });
                let s = dot(&normals[i], x).signum() / offsets[i];
                normals[i].iter().map(|&a| a * s).collect()
            }
            BodyKind::Cylinder { base } => {
                let (head, last) = x.split_at(n - 1);
                let mut g = vec![F::zero(); n];
                if base.norm(head) >= last[0].abs() {
                    g[..n - 1].copy_from_slice(&base.norm_gradient(head));
                } else {
                    g[n - 1] = last[0].signum();
                }
                g
            }
            BodyKind::LinearImage {
                inverse,
                scalar,
                base,
                ..
            } => match scalar {
                Some(s) => base.norm_gradient(x).into_iter().map(|v| v / s.abs()).collect(),
                None => inverse.tr_mul_vec(&base.norm_gradient(&inverse.mul_vec(x))),
            },
            BodyKind::Section { embed, base } => {
                embed.tr_mul_vec(&base.norm_gradient(&embed.mul_vec(x)))
            }
            BodyKind::Intersection { base, radius } => {
                let nx = norm2(x);
                if base.norm(x) >= nx / *radius {
                    base.norm_gradient(x)
                } else {
                    x.iter().map(|&v| v / (nx * *radius)).collect()
                }
            }
            BodyKind::HullWithBall { base, radius } => {
                let (_, mu) = hull_gauge(base, *radius, x);
                if mu <= F::zero() {
                    let nx = norm2(x);
                    return x.iter().map(|&v| v / (nx * *radius)).collect();
                }
                let p: Vec<F> = match base.project(&x.iter().map(|&v| v / mu).collect::<Vec<_>>()) {
                    Ok(y) => y.into_iter().map(|v| v * mu).collect(),
                    Err(_) => return base.norm_gradient(x),
                };
                let w: Vec<F> = x.iter().zip(&p).map(|(&a, &b)| a - b).collect();
                let nw = norm2(&w);
                if nw <= F::c(1e-12) * norm2(x) {
                    base.norm_gradient(x)
                } else {
                    w.into_iter().map(|v| v / (nw * *radius)).collect()
                }
            }
        }
    }

    /// The support function `h_K(u) = max_{y ∈ K} <u, y>`, i.e. the dual norm.
    pub fn support(&self, u: &[F]) -> F {
        self.check_dim(u);
        match &self.kind {
            BodyKind::Origin => F::zero(),
            BodyKind::LpBall { p } => {
                let q = if p.is_infinite() {
                    F::one()
                } else if *p == F::one() {
                    F::infinity()
                } else {
                    *p / (*p - F::one())
                };
                lp_norm(u, q)
            }
            BodyKind::Ellipsoid { shape, .. } => dot(u, &shape.mul_vec(u)).max(F::zero()).sqrt(),
            BodyKind::Polytope {
                normals, offsets, ..
            } => simplex::maximize_over_slabs(normals, offsets, u)
                .map(|(v, _)| v)
                .unwrap_or(F::infinity()),
            BodyKind::Cylinder { base } => {
                let (head, last) = u.split_at(self.dim - 1);
                base.support(head) + last[0].abs()
            }
            BodyKind::LinearImage {
                map, scalar, base, ..
            } => match scalar {
                Some(s) => base.support(u) * s.abs(),
                None => base.support(&map.tr_mul_vec(u)),
            },
            BodyKind::Section { .. } => self.support_by_projection(u),
            BodyKind::Intersection { base, radius } => intersection_support(base, *radius, u),
            BodyKind::HullWithBall { base, radius } => base.support(u).max(*radius * norm2(u)),
        }
    }

    /// Support value via projection of a far point along `u`.
    fn support_by_projection(&self, u: &[F]) -> F {
        let nu = norm2(u);
        if nu == F::zero() {
            return F::zero();
        }
        let big_r = self.sandwich.big_r;
        let s = big_r * big_r / (F::c(2e-10) * self.sandwich.r.max(F::c(1e-300)));
        let far: Vec<F> = u.iter().map(|&v| v / nu * s).collect();
        match self.project(&far) {
            Ok(y) => dot(u, &y),
            Err(_) => big_r * nu,
        }
    }
}

pub(crate) fn lp_norm<F: Real>(x: &[F], p: F) -> F {
    let m = x.iter().fold(F::zero(), |m, v| m.max(v.abs()));
    if p.is_infinite() || m == F::zero() {
        return m;
    }
    if p == F::one() {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == F::c(2.0) {
        return norm2(x);
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<F>().powf(F::one() / p)
}

fn lp_gradient<F: Real>(x: &[F], p: F) -> Vec<F> {
    if p.is_infinite() {
        let (i, _) = x
            .iter()
            .enumerate()
            .fold((0, F::neg_infinity()), |b, (i, v)| if v.abs() > b.1 { (i, v.abs()) } else { b });
        let mut g = vec![F::zero(); x.len()];
        g[i] = x[i].signum();
        return g;
    }
    if p == F::one() {
        return x
            .iter()
            .map(|&v| if v == F::zero() { F::zero() } else { v.signum() })
            .collect();
    }
    let nrm = lp_norm(x, p);
    x.iter()
        .map(|&v| v.signum() * (v.abs() / nrm).powf(p - F::one()))
        .collect()
}

/// Gauge of `conv(K ∪ rB₂)` as `min_{μ ≥ 0} μ + dist₂(x, μK)/r`.
///
/// Returns the value and the minimizing `μ`.
fn hull_gauge<F: Real>(base: &NormBody<F>, r: F, x: &[F]) -> (F, F) {
    let nx = norm2(x);
    if nx == F::zero() {
        return (F::zero(), F::zero());
    }
    let hi = base.norm(x);
    let objective = |mu: F| -> F {
        if mu <= F::zero() {
            return nx / r;
        }
        let scaled: Vec<F> = x.iter().map(|&v| v / mu).collect();
        let dist = match base.project(&scaled) {
            Ok(p) => mu * crate::linalg::dist2(&scaled, &p),
            Err(_) => (nx - mu * base.sandwich.big_r).max(F::zero()),
        };
        mu + dist / r
    };
    let (mu, val) = golden_section(objective, F::zero(), hi, F::c(1e-12) * hi.max(F::one()), 200);
    let at_zero = nx / r;
    if at_zero <= val {
        (at_zero, F::zero())
    } else if hi <= val {
        (hi, hi)
    } else {
        (val, mu)
    }
}

/// Support of `K ∩ ρB₂` by bisection on the multiplier of the ball constraint.
fn intersection_support<F: Real>(base: &NormBody<F>, rho: F, u: &[F]) -> F {
    let nu = norm2(u);
    if nu == F::zero() {
        return F::zero();
    }
    let y_at = |mu: F| -> Option<Vec<F>> {
        let target: Vec<F> = u.iter().map(|&v| v / mu).collect();
        base.project(&target).ok()
    };
    let g = |mu: F, y: &[F]| dot(u, y) - mu * dot(y, y) / F::c(2.0) + mu * rho * rho / F::c(2.0);
    // If the unconstrained maximizer already lies in the ball the bound is slack.
    let tiny = nu / (rho * F::c(1e12));
    let Some(y_tiny) = y_at(tiny) else {
        return base.support(u).min(rho * nu);
    };
    if norm2(&y_tiny) <= rho {
        return base.support(u).min(rho * nu);
    }
    let (mut lo, mut hi) = (tiny, nu / rho);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        match y_at(mid) {
            Some(y) if norm2(&y) > rho => lo = mid,
            Some(_) => hi = mid,
            None => break,
        }
        if hi / lo - F::one() < F::c(1e-13) {
            break;
        }
    }
    match y_at(hi) {
        Some(y) => g(hi, &y).min(rho * nu),
        None => rho * nu,
    }
}

/// Minimizes a unimodal function on `[a, b]`.
pub(crate) fn golden_section<F: Real>(
    f: impl Fn(F) -> F,
    mut a: F,
    mut b: F,
    tol: F,
    max_iter: usize,
) -> (F, F) {
    let phi = F::c(0.618_033_988_749_894_9);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basic_norms() {
        let linf = NormBody::<f64>::linf_ball(2);
        assert_abs_diff_eq!(linf.norm(&[0.5, -0.8]), 0.8);
        let e = NormBody::ellipsoid(Matrix::diag(&[4.0, 1.0])).unwrap();
        assert_abs_diff_eq!(e.norm(&[2.0, 0.0]), 1.0, epsilon = 1e-14);
        let l1 = NormBody::polytope(vec![vec![1.0, 1.0], vec![1.0, -1.0]], vec![1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(l1.norm(&[0.3, 0.4]), 0.7, epsilon = 1e-14);
    }

    #[test]
    fn cylinder_norm() {
        let q = NormBody::<f64>::lp_ball(1, 2.0).unwrap();
        let c = NormBody::cylinder(q);
        assert_abs_diff_eq!(c.norm(&[0.5, -0.7]), 0.7);
        let disc = NormBody::<f64>::euclidean_ball(2);
        let c = NormBody::cylinder(disc);
        assert_abs_diff_eq!(c.norm(&[0.6, 0.0, 0.8]), 0.8);
        let s = c.sandwich();
        assert_abs_diff_eq!(s.r, 1.0);
        assert_abs_diff_eq!(s.big_r, 2f64.sqrt());
    }

    #[test]
    fn image_of_ellipsoid_stays_ellipsoid() {
        let t = Matrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 1.0]]);
        let img = NormBody::linear_image(t.clone(), NormBody::euclidean_ball(2)).unwrap();
        assert!(matches!(img.kind(), BodyKind::Ellipsoid { .. }));
        let x = [0.3, -0.4];
        assert_abs_diff_eq!(img.norm(&t.mul_vec(&x)), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn supports() {
        let linf = NormBody::<f64>::linf_ball(2);
        assert_abs_diff_eq!(linf.support(&[0.3, -0.4]), 0.7, epsilon = 1e-14);
        let e = NormBody::ellipsoid(Matrix::diag(&[4.0, 1.0])).unwrap();
        assert_abs_diff_eq!(e.support(&[1.0, 0.0]), 2.0, epsilon = 1e-14);
        let cut = NormBody::intersect_ball(NormBody::linf_ball(2), 1.2).unwrap();
        // the corner direction is clipped by the ball
        let u = [1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()];
        assert_abs_diff_eq!(cut.support(&u), 1.2, epsilon = 1e-7);
        // along an axis the square face is closer than the ball
        assert_abs_diff_eq!(cut.support(&[1.0, 0.0]), 1.0, epsilon = 1e-7);
    }

    #[test]
    fn hull_gauge_matches_geometry() {
        let hull = NormBody::hull_with_ball(NormBody::linf_ball(2), 1.3).unwrap();
        // along an axis the ball dominates
        assert_abs_diff_eq!(hull.norm(&[1.3, 0.0]), 1.0, epsilon = 1e-8);
        // the square corner is still on the boundary
        assert_abs_diff_eq!(hull.norm(&[1.0, 1.0]), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(hull.support(&[1.0, 0.0]), 1.3, epsilon = 1e-12);
    }

    #[test]
    fn section_of_cube_is_polytope() {
        let e = Matrix::from_cols(&[vec![1.0, 0.0, 0.0]]);
        let s = NormBody::section(e, NormBody::linf_ball(3)).unwrap();
        assert!(matches!(s.kind(), BodyKind::Polytope { .. }));
        assert_abs_diff_eq!(s.norm(&[0.4]), 0.4);
    }

    #[test]
    fn invalid_inputs() {
        assert!(NormBody::<f64>::lp_ball(2, 0.5).is_err());
        assert!(NormBody::ellipsoid(Matrix::diag(&[1.0, -1.0])).is_err());
        assert!(NormBody::polytope(vec![vec![1.0, 0.0]], vec![1.0]).is_err());
        assert!(NormBody::linear_image(Matrix::zeros(2, 2), NormBody::<f64>::linf_ball(2)).is_err());
    }
}
