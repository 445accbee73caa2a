//! Exact SVP and CVP in arbitrary norms by ℓ2 enumeration with norm filtering.
//!
//! A `K`-ball of radius `ρ` lies inside the Euclidean ball of radius `ρ·R`
//! where `K ⊆ R·B₂`, so enumerating all lattice points in that Euclidean ball
//! and filtering by the `K`-norm is exact. The radius shrinks whenever a
//! better point is found.

use std::cmp::Ordering;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bodies::NormBody;
use crate::error::{Error, Result};
use crate::lattice::{
    coefficients_to_i64, gram_schmidt, lll_reduce_with_transform, GenericBasis,
};
use crate::linalg::{dot, norm2, sub};
use crate::scalar::LatticeScalar;

/// Default node budget.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

/// Exact solution of an SVP or CVP instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationResult {
    /// Integer coefficients in the input basis.
    pub coefficients: Vec<i64>,
    pub vector: Vec<f64>,
    /// `‖v‖_K` for SVP, `‖t − v‖_K` for CVP.
    pub value: f64,
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    pub node_budget: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// Shortest nonzero lattice vector in `‖·‖_K`.
///
/// Ties are broken by Euclidean length, then by the lexicographically
/// smallest coefficient vector with a positive leading coefficient.
pub fn exact_svp<S: LatticeScalar + LllDelta>(
    basis: &GenericBasis<S>,
    body: &NormBody<f64>,
) -> Result<EnumerationResult> {
    exact_svp_with(basis, body, OracleConfig::default())
}

pub fn exact_svp_with<S: LatticeScalar + LllDelta>(
    basis: &GenericBasis<S>,
    body: &NormBody<f64>,
    config: OracleConfig,
) -> Result<EnumerationResult> {
    Enumerator::new(basis, body, None, config)?.run()
}

/// Closest lattice vector to `target` in `‖·‖_K`.
///
/// Ties are broken by Euclidean distance, then by the lexicographically
/// smallest coefficient vector.
pub fn exact_cvp<S: LatticeScalar + LllDelta>(
    basis: &GenericBasis<S>,
    target: &[f64],
    body: &NormBody<f64>,
) -> Result<EnumerationResult> {
    exact_cvp_with(basis, target, body, OracleConfig::default())
}

pub fn exact_cvp_with<S: LatticeScalar + LllDelta>(
    basis: &GenericBasis<S>,
    target: &[f64],
    body: &NormBody<f64>,
    config: OracleConfig,
) -> Result<EnumerationResult> {
    if target.len() != basis.dim() {
        return Err(Error::validation("target dimension does not match basis"));
    }
    Enumerator::new(basis, body, Some(target), config)?.run()
}

/// The Lovász parameter 0.99 in a given scalar type.
pub trait LllDelta {
    fn lll_delta() -> Self;
}

impl LllDelta for BigRational {
    fn lll_delta() -> Self {
        BigRational::new(99.into(), 100.into())
    }
}

impl LllDelta for f64 {
    fn lll_delta() -> Self {
        0.99
    }
}

impl LllDelta for f32 {
    fn lll_delta() -> Self {
        0.99
    }
}

struct Candidate {
    value: f64,
    l2: f64,
    coeffs: Vec<i64>,
    vector: Vec<f64>,
}

struct Enumerator<'a> {
    body: &'a NormBody<f64>,
    target: Option<Vec<f64>>,
    cols: Vec<Vec<f64>>,
    transform: Vec<Vec<i64>>,
    mu: Vec<Vec<f64>>,
    bnorm: Vec<f64>,
    /// Target coordinates along the Gram–Schmidt vectors.
    tcoord: Vec<f64>,
    /// Squared distance of the target to the span.
    offspan: f64,
    big_r: f64,
    radius2: f64,
    best: Option<Candidate>,
    nodes: u64,
    budget: u64,
    x: Vec<i64>,
}

impl<'a> Enumerator<'a> {
    fn new<S: LatticeScalar + LllDelta>(
        basis: &GenericBasis<S>,
        body: &'a NormBody<f64>,
        target: Option<&[f64]>,
        config: OracleConfig,
    ) -> Result<Self> {
        if body.dim() != basis.dim() {
            return Err(Error::validation("body dimension does not match basis"));
        }
        let lll = lll_reduce_with_transform(basis, S::lll_delta())?;
        let transform = lll
            .transform
            .iter()
            .map(|c| coefficients_to_i64(c))
            .collect::<Result<Vec<_>>>()?;
        let reduced = lll.basis.to_f64();
        let gso = gram_schmidt(&reduced)?;
        let n = reduced.rank();
        let cols = reduced.columns().to_vec();
        let (tcoord, offspan) = match target {
            Some(t) => {
                let tc: Vec<f64> = (0..n).map(|i| dot(t, &gso.bstar[i]) / gso.norms[i]).collect();
                let along: f64 = tc.iter().zip(&gso.norms).map(|(c, b)| c * c * b).sum();
                (tc, (dot(t, t) - along).max(0.0))
            }
            None => (vec![0.0; n], 0.0),
        };
        Ok(Enumerator {
            body,
            target: target.map(<[f64]>::to_vec),
            cols,
            transform,
            mu: gso.mu,
            bnorm: gso.norms,
            tcoord,
            offspan,
            big_r: body.sandwich().big_r,
            radius2: f64::INFINITY,
            best: None,
            nodes: 0,
            budget: config.node_budget,
            x: vec![0; n],
        })
    }

    fn n(&self) -> usize {
        self.cols.len()
    }

    fn vector_of(&self, x: &[i64]) -> Vec<f64> {
        let mut v = vec![0.0; self.cols[0].len()];
        for (c, &xi) in self.cols.iter().zip(x) {
            if xi != 0 {
                for (vk, ck) in v.iter_mut().zip(c) {
                    *vk += xi as f64 * ck;
                }
            }
        }
        v
    }

    fn input_coefficients(&self, x: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.n()];
        for (col, &xi) in self.transform.iter().zip(x) {
            if xi != 0 {
                for (o, &u) in out.iter_mut().zip(col) {
                    *o += u * xi;
                }
            }
        }
        out
    }

    fn offer(&mut self, x: &[i64]) {
        let v = self.vector_of(x);
        let (value, l2) = match &self.target {
            Some(t) => {
                let d = sub(t, &v);
                (self.body.norm(&d), norm2(&d))
            }
            None => {
                if x.iter().all(|&c| c == 0) {
                    return;
                }
                (self.body.norm(&v), norm2(&v))
            }
        };
        let mut coeffs = self.input_coefficients(x);
        let mut vector = v;
        if self.target.is_none() {
            if let Some(&lead) = coeffs.iter().find(|&&c| c != 0) {
                if lead < 0 {
                    coeffs.iter_mut().for_each(|c| *c = -*c);
                    vector.iter_mut().for_each(|c| *c = -*c);
                }
            }
        }
        let cand = Candidate {
            value,
            l2,
            coeffs,
            vector,
        };
        let better = match &self.best {
            None => true,
            Some(b) => compare(&cand, b) == Ordering::Less,
        };
        if better {
            let r = value * self.big_r;
            self.radius2 = r * r * (1.0 + 1e-9) + 1e-12;
            self.best = Some(cand);
        }
    }

    fn initial_bound(&mut self) {
        let n = self.n();
        match &self.target {
            None => {
                for i in 0..n {
                    let mut x = vec![0i64; n];
                    x[i] = 1;
                    self.offer(&x);
                }
            }
            Some(_) => {
                // Babai's nearest plane
                let mut x = vec![0i64; n];
                for i in (0..n).rev() {
                    let c = self.center(i, &x);
                    x[i] = c.round() as i64;
                }
                self.offer(&x);
            }
        }
    }

    fn center(&self, i: usize, x: &[i64]) -> f64 {
        let mut c = self.tcoord[i];
        for j in i + 1..self.n() {
            c -= self.mu[j][i] * x[j] as f64;
        }
        c
    }

    fn run(mut self) -> Result<EnumerationResult> {
        self.initial_bound();
        let n = self.n();
        let partial = self.offspan;
        self.descend(n, partial)?;
        let best = self.best.expect("initial bound always yields a candidate");
        Ok(EnumerationResult {
            coefficients: best.coeffs,
            vector: best.vector,
            value: best.value,
            nodes: self.nodes,
        })
    }

    /// Enumerates coordinate `level − 1` given the coordinates above it.
    fn descend(&mut self, level: usize, partial: f64) -> Result<()> {
        if level == 0 {
            let x = self.x.clone();
            self.offer(&x);
            return Ok(());
        }
        let i = level - 1;
        let c = self.center(i, &self.x);
        let slack = self.radius2 - partial;
        if slack < 0.0 {
            return Ok(());
        }
        let width = (slack / self.bnorm[i]).sqrt();
        let lo = (c - width).ceil() as i64;
        let hi = (c + width).floor() as i64;
        // zig-zag from the center outwards
        let start = c.round() as i64;
        let mut offsets = Vec::with_capacity((hi - lo + 1).max(0) as usize);
        for k in 0..=(hi - lo).max(0) {
            let a = start + k;
            let b = start - k - 1;
            if a <= hi && a >= lo {
                offsets.push(a);
            }
            if b >= lo && b <= hi {
                offsets.push(b);
            }
            if a > hi && b < lo {
                break;
            }
        }
        for xi in offsets {
            let d = xi as f64 - c;
            let next = partial + d * d * self.bnorm[i];
            if next > self.radius2 {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                let best = self.best.take().map(|b| {
                    Box::new(EnumerationResult {
                        coefficients: b.coeffs,
                        vector: b.vector,
                        value: b.value,
                        nodes: self.nodes,
                    })
                });
                return Err(Error::BudgetExceeded {
                    budget: self.budget,
                    best,
                });
            }
            self.x[i] = xi;
            self.descend(i, next)?;
        }
        self.x[i] = 0;
        Ok(())
    }
}

fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn compare(a: &Candidate, b: &Candidate) -> Ordering {
    if !nearly_equal(a.value, b.value) {
        return a.value.partial_cmp(&b.value).unwrap_or(Ordering::Equal);
    }
    if !nearly_equal(a.l2, b.l2) {
        return a.l2.partial_cmp(&b.l2).unwrap_or(Ordering::Equal);
    }
    a.coeffs.cmp(&b.coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::basis_from_integers;

    #[test]
    fn integer_lattice() {
        let b = basis_from_integers(&[vec![1, 0], vec![0, 1]]).unwrap();
        let r = exact_svp(&b, &NormBody::euclidean_ball(2)).unwrap();
        assert_eq!(r.value, 1.0);
        let r = exact_cvp(&b, &[0.4, 0.0], &NormBody::euclidean_ball(2)).unwrap();
        assert_eq!(r.coefficients, vec![0, 0]);
        assert!((r.value - 0.4).abs() < 1e-15);
    }

    #[test]
    fn hand_enumerated_examples() {
        let b = basis_from_integers(&[vec![2, 1], vec![0, 3]]).unwrap();
        let r = exact_svp(&b, &NormBody::euclidean_ball(2)).unwrap();
        assert!((r.value - 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.vector, vec![2.0, 1.0]);
        let r = exact_svp(&b, &NormBody::linf_ball(2)).unwrap();
        assert_eq!(r.value, 2.0);
        assert_eq!(r.vector, vec![2.0, 1.0]);
        let r = exact_cvp(&b, &[1.0, 1.0], &NormBody::euclidean_ball(2)).unwrap();
        assert_eq!(r.vector, vec![2.0, 1.0]);
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lattice_point_target() {
        let b = basis_from_integers(&[vec![2, 1], vec![0, 3]]).unwrap();
        let r = exact_cvp(&b, &[2.0, -2.0], &NormBody::linf_ball(2)).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.coefficients, vec![1, -1]);
    }

    #[test]
    fn budget_reports_best() {
        let b = basis_from_integers(&[vec![3, 1, 0], vec![1, 4, 1], vec![0, 1, 5]]).unwrap();
        let err = exact_svp_with(&b, &NormBody::linf_ball(3), OracleConfig { node_budget: 1 }).unwrap_err();
        match err {
            Error::BudgetExceeded { best, .. } => assert!(best.is_some()),
            e => panic!("unexpected {e:?}"),
        }
    }
}
