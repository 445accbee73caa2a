//! SVP in `K` from a CVP oracle in `ℓ₂` or in a second norm `Q`.
//!
//! After positioning `K` by its M-ellipsoid map and normalizing the lattice
//! by a guess of `λ₁`, a random target is drawn from `K̃ + Q̂`. Each repetition
//! asks the oracle for a point of a random sparsified coset close to the
//! target; the answers and their pairwise differences are lattice vectors,
//! and the shortest nonzero one in `K` wins.

use rayon::prelude::*;
use serde::Serialize;

use super::grid::guess_scalings;
use super::{combine, digest, factor, CvpOracle, Mode, ReductionConfig, ReductionResult, Trace};
use crate::bodies::{MinkowskiSampler, NormBody};
use crate::ellipsoid::build_m_ellipsoid;
use crate::error::{Error, Result};
use crate::lattice::{rank_reduce, GenericBasis};
use crate::linalg::{sub, Matrix};
use crate::oracle::{exact_svp, LllDelta};
use crate::rng::stream;
use crate::scalar::LatticeScalar;
use crate::sparsify::{choose_prime, sparsify};

const TAG_POSITION_K: u64 = 11;
const TAG_POSITION_Q: u64 = 12;
const TAG_TARGET: u64 = 13;
const TAG_REPETITION: u64 = 14;

/// One oracle call on a sparsified coset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepetitionRecord {
    pub repetition: usize,
    pub coset: String,
    /// Coefficients of the answer in the input basis.
    pub answer: Vec<i64>,
    /// Whether the answer satisfies the coset congruence.
    pub in_coset: bool,
    /// Oracle-norm distance from the target to the answer.
    pub oracle_distance: f64,
    /// Oracle-norm length of the answer.
    pub answer_length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SvpGridPoint {
    pub index: usize,
    /// The guess of `λ₁(K)` the lattice was divided by.
    pub scale: f64,
    pub target: Vec<f64>,
    pub steps: Vec<RepetitionRecord>,
    /// Shortest nonzero candidate at this grid point, with its `K`-norm.
    pub best: Option<(Vec<i64>, f64)>,
    /// Whether that candidate is a difference of two answers.
    pub best_is_difference: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SvpTrace {
    pub prime: u64,
    pub budget: usize,
    pub grid_points: Vec<SvpGridPoint>,
}

/// SVP in `K` through an `α`-approximate CVP oracle in `ℓ₂`.
pub fn svp_via_cvp2<S: LatticeScalar + LllDelta>(
    basis: &GenericBasis<S>,
    body: &NormBody<f64>,
    config: &ReductionConfig,
    oracle: CvpOracle<'_>,
) -> Result<ReductionResult> {
    svp_core(basis, body, None, config, oracle, Mode::SvpCvp2)
}

/// SVP in `K` through an `α`-approximate CVP oracle in `Q`, with both
/// bodies positioned independently.
///
/// The cover and oracle norm is `Q̂ = (C/ε²)·T_Q(Q)`, which is exactly the
/// unit ball when `Q` is Euclidean; in that case the prime and repetition
/// count also match the `ℓ₂` variant, so both produce identical traces.
pub fn svp_via_cvp_q<S: LatticeScalar + LllDelta>(
    basis: &GenericBasis<S>,
    body: &NormBody<f64>,
    body_q: &NormBody<f64>,
    config: &ReductionConfig,
    oracle: CvpOracle<'_>,
) -> Result<ReductionResult> {
    svp_core(basis, body, Some(body_q), config, oracle, Mode::SvpCvpQ)
}

/// A full-rank frame for the lattice with the bodies restricted to its span.
pub(crate) struct Frame {
    pub columns: Vec<Vec<f64>>,
    pub body: NormBody<f64>,
    pub body_q: Option<NormBody<f64>>,
    pub target: Vec<f64>,
    pub embed: Option<Matrix<f64>>,
}

pub(crate) fn frame<S: LatticeScalar>(
    basis: &GenericBasis<S>,
    target: &[S],
    body: &NormBody<f64>,
    body_q: Option<&NormBody<f64>>,
) -> Result<Frame> {
    if basis.rank() == basis.dim() {
        return Ok(Frame {
            columns: basis.columns_f64(),
            body: body.clone(),
            body_q: body_q.cloned(),
            target: target.iter().map(LatticeScalar::to_f64).collect(),
            embed: None,
        });
    }
    let rr = rank_reduce(basis, target, body)?;
    let body_q = body_q.map(|q| NormBody::section(rr.back_map.clone(), q.clone())).transpose()?;
    Ok(Frame {
        columns: rr.reduced_basis.columns().to_vec(),
        body: rr.body,
        body_q,
        target: rr.reduced_target,
        embed: Some(rr.back_map),
    })
}

/// `Q̂ = (C/ε²)·T_Q(Q)`, snapped to the unit ball when it is Euclidean.
pub(crate) fn position_q(q: &NormBody<f64>, config: &ReductionConfig) -> Result<NormBody<f64>> {
    let n = q.dim();
    let mq = build_m_ellipsoid(q, config.epsilon, &config.ellipsoid, &mut stream(config.seed, &[TAG_POSITION_Q]))?;
    let scale = config.ellipsoid.c / (config.epsilon * config.epsilon);
    let q_hat = NormBody::linear_image(mq.t_eps.scale(scale), q.clone())?;
    match q_hat.euclidean_radius() {
        Some(r) if (r - 1.0).abs() <= 1e-9 => Ok(NormBody::euclidean_ball(n)),
        _ => Ok(q_hat),
    }
}

/// Scale `ρ` with `K̃/ρ ⊆ Q̂` by the sandwich radii, and the body `K̃/ρ`.
///
/// Dividing the positioned lattice by `ℓ·ρ` instead of `ℓ` puts a `K`-ball
/// of the guessed radius inside the cover body, so vectors of `K`-length
/// `ℓ` have oracle norm at most one.
pub(crate) fn fit_inside(k_tilde: &NormBody<f64>, cover: &NormBody<f64>) -> Result<(f64, NormBody<f64>)> {
    let rho = k_tilde.sandwich().big_r / cover.sandwich().r;
    Ok((rho, k_tilde.scaled(1.0 / rho)?))
}

/// Candidate tracker: shortest nonzero vector in `K`.
struct Best<'a> {
    columns: &'a [Vec<f64>],
    body: &'a NormBody<f64>,
    best: Option<(Vec<i64>, f64)>,
    from_difference: bool,
}

impl<'a> Best<'a> {
    fn new(columns: &'a [Vec<f64>], body: &'a NormBody<f64>) -> Self {
        Best {
            columns,
            body,
            best: None,
            from_difference: false,
        }
    }

    fn offer(&mut self, x: Vec<i64>, difference: bool) {
        if x.iter().all(|&v| v == 0) {
            return;
        }
        let value = self.body.norm(&combine(self.columns, &x));
        if self.best.as_ref().is_none_or(|(_, b)| value < *b) {
            self.best = Some((x, value));
            self.from_difference = difference;
        }
    }
}

fn svp_core<S: LatticeScalar + LllDelta>(
    basis: &GenericBasis<S>,
    body: &NormBody<f64>,
    body_q: Option<&NormBody<f64>>,
    config: &ReductionConfig,
    oracle: CvpOracle<'_>,
    mode: Mode,
) -> Result<ReductionResult> {
    config.validate()?;
    if body.dim() != basis.dim() || body_q.is_some_and(|q| q.dim() != basis.dim()) {
        return Err(Error::validation("body dimension does not match basis"));
    }
    let n = basis.rank();
    let zero = vec![S::zero(); basis.dim()];
    let fr = frame(basis, &zero, body, body_q)?;
    let m_k = build_m_ellipsoid(&fr.body, config.epsilon, &config.ellipsoid, &mut stream(config.seed, &[TAG_POSITION_K]))?;
    let k_tilde = m_k.apply(&fr.body)?;
    let positioned: Vec<Vec<f64>> = fr.columns.iter().map(|c| m_k.t_eps.mul_vec(c)).collect();
    let cover = match &fr.body_q {
        Some(q) => position_q(q, config)?,
        None => NormBody::euclidean_ball(n),
    };
    let (rho, k_unit) = fit_inside(&k_tilde, &cover)?;
    let euclidean = cover.euclidean_radius().is_some();
    let eps = config.epsilon;
    let nf = n as f64;
    let (exponent, formula, text) = if euclidean {
        (3.0, nf * nf * (5.0 * eps * nf).exp2(), "n²·2^{5εn}")
    } else {
        (5.0, (8.0 * eps * nf).exp2(), "2^{8εn}")
    };
    let prime = choose_prime(exponent, eps, n, config.p_min);
    let (budget, budget_note) = config.budget(formula, text);
    let mut notes = vec![budget_note];
    if fr.embed.is_some() {
        notes.push(format!("rank {n} lattice in dimension {}: reduced to its span", basis.dim()));
    }

    let grid = guess_scalings(basis, body, config.scale_grid_ratio)?;
    let ambient = basis.columns_f64();
    let mut overall = Best::new(&ambient, body);
    let mut points = Vec::with_capacity(grid.len());
    for (gi, &scale) in grid.iter().enumerate() {
        let unit = scale * rho;
        let scaled = GenericBasis::new(positioned.iter().map(|c| c.iter().map(|v| v / unit).collect()).collect())?;
        let target = MinkowskiSampler::new(&k_unit, &cover)?.sample(&mut stream(config.seed, &[TAG_TARGET, gi as u64]))?;
        let steps: Vec<RepetitionRecord> = (0..budget)
            .into_par_iter()
            .map(|r| {
                let mut rng = stream(config.seed, &[TAG_REPETITION, gi as u64, r as u64]);
                let coset = sparsify(&scaled, prime, &mut rng)?;
                let shifted = sub(&target, &coset.shift);
                let y = oracle(&coset.sublattice_basis, &shifted, &cover)?;
                if y.len() != coset.sublattice_basis.rank() {
                    return Err(Error::Failure("oracle returned coefficients of the wrong length".into()));
                }
                let mut x = coset.lift_coefficients(&y);
                for (xi, si) in x.iter_mut().zip(&coset.shift_coefficients) {
                    *xi += si;
                }
                let v = combine(scaled.columns(), &x);
                Ok(RepetitionRecord {
                    repetition: r,
                    coset: coset.id(),
                    in_coset: coset.contains(&x),
                    oracle_distance: cover.norm(&sub(&target, &v)),
                    answer_length: cover.norm(&v),
                    answer: x,
                })
            })
            .collect::<Result<_>>()?;

        let mut local = Best::new(&ambient, body);
        if config.low_memory {
            let mut previous: Option<&Vec<i64>> = None;
            for s in &steps {
                local.offer(s.answer.clone(), false);
                if let Some(p) = previous {
                    local.offer(s.answer.iter().zip(p).map(|(a, b)| a - b).collect(), true);
                }
                previous = Some(&s.answer);
            }
        } else {
            for (i, a) in steps.iter().enumerate() {
                local.offer(a.answer.clone(), false);
                for b in &steps[..i] {
                    local.offer(a.answer.iter().zip(&b.answer).map(|(x, y)| x - y).collect(), true);
                }
            }
        }
        if let Some((x, _)) = &local.best {
            overall.offer(x.clone(), local.from_difference);
        }
        points.push(SvpGridPoint {
            index: gi,
            scale,
            target,
            steps,
            best: local.best.clone(),
            best_is_difference: local.from_difference,
        });
    }

    let trace = SvpTrace {
        prime,
        budget,
        grid_points: points,
    };
    let trace_digest = digest(&trace)?;
    let (coefficients, value) = overall.best.ok_or_else(|| {
        Error::Failure(format!(
            "every oracle answer and difference was zero over {} grid points (trace {trace_digest})",
            grid.len()
        ))
    })?;
    let vector: Vec<f64> = basis
        .combine(&coefficients)
        .iter()
        .map(LatticeScalar::to_f64)
        .collect();
    let optimum = if n <= config.oracle_rank_limit {
        Some(exact_svp(basis, body)?.value)
    } else {
        None
    };
    let achieved = optimum.map(|o| factor(value, o));
    Ok(ReductionResult {
        mode,
        coefficients,
        vector,
        value,
        optimum,
        achieved_factor: achieved,
        gamma_realized: achieved,
        epsilon: eps,
        c_eps: m_k.c_eps,
        prime: Some(prime),
        budget,
        grid,
        trace: Trace::Svp(trace),
        trace_digest,
        notes,
    })
}
