use super::gso::{gram_schmidt, inner};
use super::GenericBasis;
use crate::bodies::NormBody;
use crate::error::{Error, Result};
use crate::linalg::{norm2, sub, Matrix};
use crate::scalar::LatticeScalar;

/// A full-rank instance equivalent to a CVP instance of lower rank.
#[derive(Clone, Debug)]
pub struct RankReduction {
    /// `n × d` map onto coordinates of `span(L)`.
    pub rotation: Matrix<f64>,
    /// `d × n` embedding back into the ambient space.
    pub back_map: Matrix<f64>,
    pub reduced_basis: GenericBasis<f64>,
    pub reduced_target: Vec<f64>,
    /// `K ∩ span(L)` in the rotated coordinates.
    pub body: NormBody<f64>,
    /// The point `t′` of `span(L)` closest to the target in `K`-distance.
    pub projected_target: Vec<f64>,
    /// `‖t − t′‖_K`.
    pub gap: f64,
    pub target_in_span: bool,
    /// Largest entry of `|EᵀE − I|` for the orthonormal frame `E`.
    pub orthonormality_error: f64,
}

impl RankReduction {
    /// Approximation factor for the original instance given an
    /// `alpha`-approximate answer to the reduced one.
    pub fn approximation_factor(&self, alpha: f64) -> f64 {
        if self.target_in_span {
            alpha
        } else {
            2.0 * alpha + 1.0
        }
    }

    /// Maps reduced coordinates back into the ambient space.
    pub fn lift(&self, y: &[f64]) -> Vec<f64> {
        self.back_map.mul_vec(y)
    }
}

/// Rotates `span(L)` onto `Rⁿ` and replaces the target by its `K`-closest
/// point in the span.
pub fn rank_reduce<S: LatticeScalar>(
    basis: &GenericBasis<S>,
    target: &[S],
    body: &NormBody<f64>,
) -> Result<RankReduction> {
    let d = basis.dim();
    let n = basis.rank();
    if target.len() != d || body.dim() != d {
        return Err(Error::validation("target and body must live in the basis dimension"));
    }
    let gso = gram_schmidt(basis)?;

    // Exact membership test of the target in the span.
    let mut residual = target.to_vec();
    for (bs, nrm) in gso.bstar.iter().zip(&gso.norms) {
        let c = inner(target, bs) / nrm.clone();
        for (r, b) in residual.iter_mut().zip(bs) {
            *r = r.clone() - c.clone() * b.clone();
        }
    }
    let tnorm = inner(target, target);
    let in_span = inner(&residual, &residual).negligible(&tnorm);

    let frame: Vec<Vec<f64>> = gso
        .bstar
        .iter()
        .zip(&gso.norms)
        .map(|(b, nrm)| {
            let s = nrm.to_f64().sqrt();
            b.iter().map(|v| v.to_f64() / s).collect()
        })
        .collect();
    let embed = Matrix::from_cols(&frame);
    let rotation = embed.transpose();
    let orthonormality_error = rotation.mul(&embed).sub(&Matrix::identity(n)).max_abs();

    let reduced_columns: Vec<Vec<f64>> = basis
        .columns_f64()
        .iter()
        .map(|c| rotation.mul_vec(c))
        .collect();
    let reduced_basis = GenericBasis::new(reduced_columns)?;

    let t: Vec<f64> = target.iter().map(LatticeScalar::to_f64).collect();
    let (projected, gap) = if in_span {
        (t.clone(), 0.0)
    } else {
        closest_in_span(&t, &embed, body)?
    };
    let reduced_target = rotation.mul_vec(&projected);
    let section = NormBody::section(embed.clone(), body.clone())?;
    Ok(RankReduction {
        rotation,
        back_map: embed,
        reduced_basis,
        reduced_target,
        body: section,
        projected_target: projected,
        gap,
        target_in_span: in_span,
        orthonormality_error,
    })
}

/// Subgradient descent on `y ↦ ‖t − E y‖_K`, warm-started at the Euclidean
/// projection; stops when the best value improves by less than a relative
/// 1e-6 over 50 iterations.
fn closest_in_span(t: &[f64], embed: &Matrix<f64>, body: &NormBody<f64>) -> Result<(Vec<f64>, f64)> {
    let eval = |y: &[f64]| body.norm(&sub(t, &embed.mul_vec(y)));
    let mut y = embed.tr_mul_vec(t);
    let mut best_y = y.clone();
    let mut best = eval(&y);
    let mut checkpoint = best;
    let step0 = best * body.sandwich().big_r;
    for k in 0..20_000 {
        let r = sub(t, &embed.mul_vec(&y));
        let g = embed.tr_mul_vec(&body.norm_gradient(&r));
        let gn = norm2(&g);
        if gn == 0.0 {
            return Ok((embed.mul_vec(&best_y), best));
        }
        let step = step0 / ((k + 1) as f64).sqrt();
        for (yi, gi) in y.iter_mut().zip(&g) {
            *yi += step * gi / gn;
        }
        let v = eval(&y);
        if v < best {
            best = v;
            best_y = y.clone();
        }
        if (k + 1) % 50 == 0 {
            if checkpoint - best <= 1e-6 * checkpoint.max(f64::MIN_POSITIVE) {
                return Ok((embed.mul_vec(&best_y), best));
            }
            checkpoint = best;
        }
    }
    Err(Error::Tolerance {
        what: "span minimization",
        tolerance: 1e-6,
        residual: checkpoint - best,
    })
}
