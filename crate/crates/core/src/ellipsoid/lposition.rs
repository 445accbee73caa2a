//! The ℓ-position program: maximize `log det T` subject to
//! `E_γ ‖Tx‖_K² ≤ 1` over positive-definite `T`.
//!
//! The expectation is replaced by a sample average over a fixed set of
//! Gaussian vectors, whitened so their empirical covariance is exactly the
//! identity. Since the constraint is homogeneous of degree two, the program
//! is equivalent to maximizing the scale-invariant
//! `Φ(T) = log det T − (n/2) log f(T)` and normalizing afterwards.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bodies::{sample_gaussian, NormBody};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

const EIGEN_FLOOR: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LPositionConfig {
    pub samples: usize,
    pub iterations: usize,
    pub tol: f64,
}

impl Default for LPositionConfig {
    fn default() -> Self {
        LPositionConfig {
            samples: 20_000,
            iterations: 500,
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LPosition {
    /// Symmetric positive-definite `T` with sampled constraint equal to 1.
    pub t: Matrix<f64>,
    pub log_det: f64,
    /// Sample average of `‖Tx‖_K²`.
    pub constraint: f64,
    /// Natural-gradient norm `‖T^{1/2} ∇Φ T^{1/2}‖_F` at the returned point.
    pub stationarity: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Gaussian sample set with empirical covariance exactly `I`.
pub(crate) fn whitened_gaussians<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    if m <= n {
        return Err(Error::validation("need more Gaussian samples than dimensions"));
    }
    let raw: Vec<Vec<f64>> = (0..m).map(|_| sample_gaussian(n, rng)).collect();
    let mut cov = Matrix::zeros(n, n);
    for g in &raw {
        for i in 0..n {
            for j in 0..n {
                cov[(i, j)] += g[i] * g[j] / m as f64;
            }
        }
    }
    let w = cov.symmetrize().psd_inv_sqrt();
    Ok(raw.iter().map(|g| w.mul_vec(g)).collect())
}

struct Program<'a> {
    body: &'a NormBody<f64>,
    samples: Vec<Vec<f64>>,
}

impl Program<'_> {
    fn n(&self) -> usize {
        self.body.dim()
    }

    fn constraint(&self, t: &Matrix<f64>) -> f64 {
        let m = self.samples.len() as f64;
        self.samples
            .iter()
            .map(|g| {
                let v = self.body.norm(&t.mul_vec(g));
                v * v
            })
            .sum::<f64>()
            / m
    }

    /// `∇f = (2/m) Σ ‖Tg‖_K ∇‖·‖_K(Tg) gᵀ`.
    fn constraint_gradient(&self, t: &Matrix<f64>) -> (f64, Matrix<f64>) {
        let n = self.n();
        let m = self.samples.len() as f64;
        let mut grad = Matrix::zeros(n, n);
        let mut f = 0.0;
        for g in &self.samples {
            let y = t.mul_vec(g);
            let v = self.body.norm(&y);
            f += v * v / m;
            let d = self.body.norm_gradient(&y);
            for i in 0..n {
                let di = 2.0 * v * d[i] / m;
                for j in 0..n {
                    grad[(i, j)] += di * g[j];
                }
            }
        }
        (f, grad)
    }

    fn phi(&self, t: &Matrix<f64>) -> f64 {
        log_det(t) - 0.5 * self.n() as f64 * self.constraint(t).ln()
    }
}

fn log_det(t: &Matrix<f64>) -> f64 {
    let (vals, _) = t.symmetric_eigen();
    vals.iter().map(|v| v.ln()).sum()
}

fn min_eigen(t: &Matrix<f64>) -> f64 {
    t.symmetric_eigen().0[0]
}

/// Natural-gradient ascent on `Φ` with backtracking, started at the scaled
/// identity.
pub fn solve_l_position<R: Rng + ?Sized>(
    body: &NormBody<f64>,
    config: &LPositionConfig,
    rng: &mut R,
) -> Result<LPosition> {
    if !(config.tol > 0.0) || config.iterations == 0 {
        return Err(Error::validation("tolerance and iteration cap must be positive"));
    }
    let n = body.dim();
    let program = Program {
        body,
        samples: whitened_gaussians(n, config.samples, rng)?,
    };
    let normalize = |t: Matrix<f64>| -> Matrix<f64> {
        let f = program.constraint(&t);
        t.scale(1.0 / f.sqrt())
    };
    let mut t = normalize(Matrix::identity(n));
    let mut phi = program.phi(&t);
    let mut step = 1.0;
    let mut stationarity = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.iterations {
        iterations += 1;
        let (f, df) = program.constraint_gradient(&t);
        let tinv = t
            .inverse()
            .ok_or_else(|| Error::Failure("position matrix became singular".into()))?;
        let g = tinv.sub(&df.scale(0.5 * n as f64 / f)).symmetrize();
        let direction = t.mul(&g).mul(&t).symmetrize();
        let root = t.psd_sqrt();
        stationarity = root.mul(&g).mul(&root).frobenius();
        if stationarity <= config.tol {
            converged = true;
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let cand = t.add(&direction.scale(step)).symmetrize();
            if min_eigen(&cand) > EIGEN_FLOOR * cand.max_abs() {
                let cand = normalize(cand);
                let value = program.phi(&cand);
                if value > phi {
                    t = cand;
                    phi = value;
                    accepted = true;
                    step = (step * 2.0).min(1.0);
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            // no ascent direction at machine precision
            converged = stationarity <= config.tol.sqrt();
            break;
        }
    }
    let constraint = program.constraint(&t);
    Ok(LPosition {
        log_det: log_det(&t),
        t,
        constraint,
        stationarity,
        iterations,
        converged,
    })
}
