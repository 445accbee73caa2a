//! CVP in `K` from a sieve sampler on a Kannan embedding.
//!
//! For each guess of the distance the positioned lattice is normalized, a
//! shifted target `t̃ ∈ t + K̃ + Q̂` is embedded with height `1/n`, and the
//! sieve draws short vectors of the embedded lattice. Any two samples whose
//! last coefficients differ by one give a candidate lattice point; the one
//! closest to `t` in `K` wins.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;

use super::grid::geometric_grid;
use super::kannan::kannan_embed;
use super::svp::{fit_inside, frame, position_q};
use super::{combine, digest, factor, nearest_plane, Mode, ReductionConfig, ReductionResult, Trace};
use crate::bodies::{MinkowskiSampler, NormBody};
use crate::ellipsoid::build_m_ellipsoid;
use crate::error::{Error, Result};
use crate::lattice::GenericBasis;
use crate::linalg::sub;
use crate::oracle::{exact_cvp, LllDelta};
use crate::rng::{derive_seed, stream};
use crate::scalar::LatticeScalar;
use crate::sieve::{list_cap, sieve_sampler, SieveConfig};

const TAG_POSITION_K: u64 = 21;
const TAG_TARGET: u64 = 22;
const TAG_SIEVE: u64 = 23;

/// A pair of sieve samples whose difference strips the target once.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRecord {
    pub first: usize,
    /// `None` pairs a sample with the zero vector.
    pub second: Option<usize>,
    /// Last coordinate of the difference, as an exact rational.
    pub last_coordinate: String,
    /// Candidate coefficients in the input basis.
    pub candidate: Vec<i64>,
    /// `‖t − c‖_K`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvpGridPoint {
    pub index: usize,
    /// The distance guess the positioned lattice was divided by.
    pub scale: f64,
    pub shifted_target: Vec<f64>,
    /// Sieve error, when the run failed.
    pub error: Option<String>,
    pub samples: usize,
    pub list_size: usize,
    /// Samples above the sieve norm bound.
    pub bound_violations: usize,
    pub accepted_pairs: usize,
    /// Exact last coordinate of every accepted pair, tallied.
    pub last_coordinates: BTreeMap<String, usize>,
    /// Best candidate at this grid point.
    pub best: Option<PairRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvpTrace {
    pub budget: usize,
    pub list_cap: usize,
    pub babai: Vec<i64>,
    pub babai_value: f64,
    pub grid_points: Vec<CvpGridPoint>,
}

/// Floor on the sieve budget; the formula's polynomial factor has no fixed
/// constant and a handful of samples is too few at very small rank.
const MIN_SIEVE_BUDGET: usize = 16;

/// CVP in `K` through the Euclidean sieve at radius `1 + 1/n`.
pub fn cvp_via_sieve2<S: LatticeScalar + LllDelta>(
    basis: &GenericBasis<S>,
    target: &[S],
    body: &NormBody<f64>,
    config: &ReductionConfig,
) -> Result<ReductionResult> {
    cvp_core(basis, target, body, None, config, Mode::CvpSieve2)
}

/// CVP in `K` through the sieve in the cylinder norm `Q̂^{+1}` at radius 1.
pub fn cvp_via_sieve_q<S: LatticeScalar + LllDelta>(
    basis: &GenericBasis<S>,
    target: &[S],
    body: &NormBody<f64>,
    body_q: &NormBody<f64>,
    config: &ReductionConfig,
) -> Result<ReductionResult> {
    cvp_core(basis, target, body, Some(body_q), config, Mode::CvpSieveQ)
}

fn last_coordinate(k: i64, n: usize) -> String {
    BigRational::new(k.into(), (n as i64).into()).to_string()
}

fn cvp_core<S: LatticeScalar + LllDelta>(
    basis: &GenericBasis<S>,
    target: &[S],
    body: &NormBody<f64>,
    body_q: Option<&NormBody<f64>>,
    config: &ReductionConfig,
    mode: Mode,
) -> Result<ReductionResult> {
    config.validate()?;
    if target.len() != basis.dim() || body.dim() != basis.dim() || body_q.is_some_and(|q| q.dim() != basis.dim()) {
        return Err(Error::validation("target and bodies must match the basis dimension"));
    }
    let n = basis.rank();
    let nf = n as f64;
    let eps = config.epsilon;
    let ambient = basis.columns_f64();
    let t_ambient: Vec<f64> = target.iter().map(LatticeScalar::to_f64).collect();
    let value_of = |x: &[i64]| body.norm(&sub(&t_ambient, &combine(&ambient, x)));

    let (budget, budget_note) = config.budget(
        (nf * (eps * nf).exp2()).max(MIN_SIEVE_BUDGET as f64),
        "max(16, n·2^{εn})",
    );
    let mut notes = vec![budget_note];
    let fr = frame(basis, target, body, body_q)?;
    if fr.embed.is_some() {
        notes.push(format!("rank {n} lattice in dimension {}: reduced to its span", basis.dim()));
    }
    let frame_basis = GenericBasis::new(fr.columns.clone())?;
    let babai = nearest_plane(&frame_basis, &fr.target)?;
    let babai_value = value_of(&babai);

    let optimum = if n <= config.oracle_rank_limit {
        Some(exact_cvp(basis, &t_ambient, body)?.value)
    } else {
        None
    };
    let finish = |coefficients: Vec<i64>,
                  value: f64,
                  grid: Vec<f64>,
                  trace: CvpTrace,
                  c_eps: f64,
                  notes: Vec<String>|
     -> Result<ReductionResult> {
        let trace_digest = digest(&trace)?;
        let vector = basis.combine(&coefficients).iter().map(LatticeScalar::to_f64).collect();
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
            c_eps,
            prime: None,
            budget,
            grid,
            trace: Trace::Cvp(trace),
            trace_digest,
            notes,
        })
    };

    let scale_ref = t_ambient.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    if babai_value <= 1e-12 * scale_ref {
        notes.push("target lies on the lattice".into());
        let trace = CvpTrace {
            budget,
            list_cap: 0,
            babai: babai.clone(),
            babai_value,
            grid_points: Vec::new(),
        };
        return finish(babai, babai_value, Vec::new(), trace, 0.0, notes);
    }

    let m_k = build_m_ellipsoid(&fr.body, eps, &config.ellipsoid, &mut stream(config.seed, &[TAG_POSITION_K]))?;
    let k_tilde = m_k.apply(&fr.body)?;
    let positioned: Vec<Vec<f64>> = fr.columns.iter().map(|c| m_k.t_eps.mul_vec(c)).collect();
    let t_positioned = m_k.t_eps.mul_vec(&fr.target);
    let (cover, sieve_body, radius) = match &fr.body_q {
        Some(q) => {
            let q_hat = position_q(q, config)?;
            let cyl = NormBody::cylinder(q_hat.clone());
            (q_hat, cyl, 1.0)
        }
        None => (NormBody::euclidean_ball(n), NormBody::euclidean_ball(n + 1), 1.0 + 1.0 / nf),
    };

    let (rho, k_unit) = fit_inside(&k_tilde, &cover)?;

    // Babai is a 2^{n/2}-approximation in ℓ₂, and the sandwich converts norms.
    let ratio = config.scale_grid_ratio.unwrap_or(if n > 1 { 1.0 - 1.0 / nf } else { 0.5 });
    let floor = babai_value / ((nf / 2.0).exp2() * body.sandwich().ratio());
    // Start one doubling above Babai: at very small rank the sieve can miss
    // at the true distance, and a coarser normalization only adds candidates.
    let grid = geometric_grid(2.0 * babai_value, floor, ratio)?;

    let mut template = SieveConfig {
        radius,
        samples: 2 * budget,
        seed: derive_seed(config.seed, &[TAG_SIEVE]),
        ..config.sieve.clone()
    };
    let (cap, _) = list_cap(&sieve_body, &template)?;
    template.max_list_size = Some(cap);

    let mut best: Option<PairRecord> = None;
    let mut points = Vec::with_capacity(grid.len());
    for (gi, &scale) in grid.iter().enumerate() {
        let unit = scale * rho;
        let scaled: Vec<Vec<f64>> = positioned.iter().map(|c| c.iter().map(|v| v / unit).collect()).collect();
        let t_scaled: Vec<f64> = t_positioned.iter().map(|v| v / unit).collect();
        let noise = MinkowskiSampler::new(&k_unit, &cover)?.sample(&mut stream(config.seed, &[TAG_TARGET, gi as u64]))?;
        let shifted: Vec<f64> = t_scaled.iter().zip(&noise).map(|(a, b)| a + b).collect();
        let embedded = kannan_embed(&GenericBasis::new(scaled)?, &shifted, 1.0 / nf)?;
        let cfg = SieveConfig {
            seed: derive_seed(config.seed, &[TAG_SIEVE, gi as u64]),
            ..template.clone()
        };
        let mut point = CvpGridPoint {
            index: gi,
            scale,
            shifted_target: shifted,
            error: None,
            samples: 0,
            list_size: 0,
            bound_violations: 0,
            accepted_pairs: 0,
            last_coordinates: BTreeMap::new(),
            best: None,
        };
        let run = match sieve_sampler(&embedded, &sieve_body, &cfg) {
            Ok(run) => run,
            Err(e @ (Error::SieveFailure { .. } | Error::ListOverflow { .. })) => {
                point.error = Some(e.to_string());
                points.push(point);
                continue;
            }
            Err(e) => return Err(e),
        };
        point.samples = run.samples.len();
        point.list_size = run.list_size;
        point.bound_violations = run.samples.iter().filter(|s| s.norm > s.norm_bound * (1.0 + 1e-9)).count();

        let mut consider = |first: usize, second: Option<usize>, d: Vec<i64>| {
            let k = d[n];
            if k.abs() != 1 {
                return;
            }
            // (t̃ − c, ±1/n) = ±(B̃d′ + k t̃) gives c = −k·B̃d′
            let candidate: Vec<i64> = d[..n].iter().map(|v| -k * v).collect();
            let value = value_of(&candidate);
            point.accepted_pairs += 1;
            *point.last_coordinates.entry(last_coordinate(k, n)).or_default() += 1;
            if point.best.as_ref().is_none_or(|b| value < b.value) {
                point.best = Some(PairRecord {
                    first,
                    second,
                    last_coordinate: last_coordinate(k, n),
                    candidate,
                    value,
                });
            }
        };
        for (i, a) in run.samples.iter().enumerate() {
            consider(i, None, a.coefficients.clone());
            for (j, b) in run.samples[..i].iter().enumerate() {
                let d: Vec<i64> = a.coefficients.iter().zip(&b.coefficients).map(|(x, y)| x - y).collect();
                consider(i, Some(j), d);
            }
        }
        if let Some(p) = &point.best {
            if best.as_ref().is_none_or(|b| p.value < b.value) {
                best = Some(p.clone());
            }
        }
        points.push(point);
    }

    let trace = CvpTrace {
        budget,
        list_cap: cap,
        babai,
        babai_value,
        grid_points: points,
    };
    match best {
        Some(p) => finish(p.candidate, p.value, grid, trace, m_k.c_eps, notes),
        None => Err(Error::Failure(format!(
            "no accepted sieve pair over {} grid points (trace {})",
            grid.len(),
            digest(&trace)?
        ))),
    }
}
