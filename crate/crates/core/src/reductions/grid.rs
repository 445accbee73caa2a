//! Geometric guesses for the unknown length scale of a lattice problem.

use crate::bodies::NormBody;
use crate::error::{Error, Result};
use crate::lattice::{lll_reduce, GenericBasis};
use crate::oracle::LllDelta;
use crate::scalar::LatticeScalar;

/// Geometric sequence `top, top·ρ, top·ρ², …` down to `top/2ⁿ`.
pub fn geometric_grid(top: f64, floor: f64, ratio: f64) -> Result<Vec<f64>> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::validation("grid ratio must lie in (0, 1)"));
    }
    if !(top > 0.0 && top.is_finite() && floor > 0.0 && floor <= top) {
        return Err(Error::validation("grid bounds must be positive with floor ≤ top"));
    }
    let mut grid = vec![top];
    loop {
        let next = grid[grid.len() - 1] * ratio;
        if next < floor * (1.0 - 1e-12) {
            break;
        }
        grid.push(next);
    }
    Ok(grid)
}

/// Candidate values of `λ₁(K)`: from the `K`-norm of the first LLL vector
/// down to that value over `2ⁿ`, with ratio `1 − 1/n` unless overridden.
///
/// Dividing the lattice by the candidate closest to `λ₁` from above puts
/// the shortest vector at `K`-norm in `[1 − 1/n, 1]`.
pub fn guess_scalings<S: LatticeScalar + LllDelta>(
    basis: &GenericBasis<S>,
    body: &NormBody<f64>,
    ratio: Option<f64>,
) -> Result<Vec<f64>> {
    if body.dim() != basis.dim() {
        return Err(Error::validation("body dimension does not match basis"));
    }
    let n = basis.rank();
    let reduced = lll_reduce(basis, S::lll_delta())?;
    let first: Vec<f64> = reduced.column(0).iter().map(LatticeScalar::to_f64).collect();
    let top = body.norm(&first);
    if n == 1 {
        return Ok(vec![top]);
    }
    let ratio = ratio.unwrap_or(1.0 - 1.0 / n as f64);
    geometric_grid(top, top / (n as f64).exp2(), ratio)
}
