//! Dense simplex method for the support function of a symmetric polytope.

use crate::scalar::Real;

/// Solves `max <c, x>` subject to `|<a_i, x>| ≤ b_i` with every `b_i > 0`.
///
/// The origin is feasible, so the slack basis is a valid starting point and no
/// phase one is needed. Bland's rule prevents cycling. Returns `None` when the
/// problem is unbounded.
pub(crate) fn maximize_over_slabs<F: Real>(
    normals: &[Vec<F>],
    offsets: &[F],
    c: &[F],
) -> Option<(F, Vec<F>)> {
    let n = c.len();
    let m = normals.len();
    let rows = 2 * m;
    let vars = 2 * n + rows;
    let width = vars + 1;
    let mut t = vec![F::zero(); (rows + 1) * width];
    let at = |r: usize, col: usize| r * width + col;

    for (i, (a, &b)) in normals.iter().zip(offsets).enumerate() {
        for (sign, row) in [(F::one(), i), (-F::one(), m + i)] {
            for j in 0..n {
                t[at(row, j)] = sign * a[j];
                t[at(row, n + j)] = -sign * a[j];
            }
            t[at(row, 2 * n + row)] = F::one();
            t[at(row, vars)] = b;
        }
    }
    for j in 0..n {
        t[at(rows, j)] = -c[j];
        t[at(rows, n + j)] = c[j];
    }
    let mut basis: Vec<usize> = (0..rows).map(|r| 2 * n + r).collect();
    let scale = c.iter().fold(F::one(), |acc, v| acc.max(v.abs()));
    let eps = F::epsilon() * F::c(1e3) * scale;

    for _ in 0..50_000 {
        let Some(enter) = (0..vars).find(|&j| t[at(rows, j)] < -eps) else {
            let mut x = vec![F::zero(); n];
            for (r, &bv) in basis.iter().enumerate() {
                if bv < n {
                    x[bv] = x[bv] + t[at(r, vars)];
                } else if bv < 2 * n {
                    x[bv - n] = x[bv - n] - t[at(r, vars)];
                }
            }
            return Some((t[at(rows, vars)], x));
        };
        let mut leave: Option<usize> = None;
        let mut best = F::infinity();
        for r in 0..rows {
            let coef = t[at(r, enter)];
            if coef > F::epsilon() * F::c(1e3) {
                let ratio = t[at(r, vars)] / coef;
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best || (ratio == best && basis[r] < basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        let leave = leave?;
        let piv = t[at(leave, enter)];
        for col in 0..width {
            t[at(leave, col)] = t[at(leave, col)] / piv;
        }
        for r in 0..=rows {
            if r == leave {
                continue;
            }
            let f = t[at(r, enter)];
            if f == F::zero() {
                continue;
            }
            for col in 0..width {
                t[at(r, col)] = t[at(r, col)] - f * t[at(leave, col)];
            }
        }
        basis[leave] = enter;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_support() {
        let normals: Vec<Vec<f64>> = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let offsets = vec![1.0, 1.0];
        let (v, x): (f64, _) = maximize_over_slabs(&normals, &offsets, &[2.0, -3.0]).unwrap();
        assert!((v - 5.0).abs() < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cross_polytope_support() {
        let normals: Vec<Vec<f64>> = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        let offsets = vec![1.0, 1.0];
        let (v, _): (f64, _) = maximize_over_slabs(&normals, &offsets, &[0.3, 0.7]).unwrap();
        assert!((v - 0.7).abs() < 1e-12);
    }

    #[test]
    fn unbounded_strip() {
        let normals: Vec<Vec<f64>> = vec![vec![1.0, 0.0]];
        let offsets = vec![1.0];
        assert!(maximize_over_slabs(&normals, &offsets, &[0.0, 1.0]).is_none());
    }
}
