//! One round of isomorphic symmetrization: cut a positioned body with the
//! ball of radius `M(K°)·α` and take the hull with the ball of radius
//! `1/(M(K)·α)`.

use rand::Rng;
use serde::Serialize;

use super::mvalue::{estimate_m_dual, estimate_m_value, MEstimate};
use crate::bodies::{NormBody, SandwichRadii};
use crate::error::{Error, Result};

/// Relative slack when comparing distance estimates.
const MONOTONE_SLACK: f64 = 1e-9;

/// A body `K_j` with its M-values and the derived loop parameters.
#[derive(Clone, Debug, Serialize)]
pub struct BodyPosition {
    #[serde(skip)]
    pub body: NormBody<f64>,
    pub step: usize,
    /// `max(d^{1/4}, ε^{−1/2})`.
    pub alpha: f64,
    /// Sandwich ratio `R/r`, an upper bound on the distance to the ball.
    pub distance_estimate: f64,
    pub sandwich: SandwichRadii<f64>,
    pub m: MEstimate,
    pub m_dual: MEstimate,
    /// Radii of the cut and hull balls that produced this body.
    pub cut_radius: Option<f64>,
    pub hull_radius: Option<f64>,
    /// Whether the distance estimate at least halved in this step.
    pub halved: Option<bool>,
}

pub(crate) fn alpha(distance: f64, epsilon: f64) -> f64 {
    distance.powf(0.25).max(epsilon.powf(-0.5))
}

/// Estimates M-values and loop parameters for `body`.
pub fn position_of<R: Rng + ?Sized>(
    body: NormBody<f64>,
    epsilon: f64,
    samples: usize,
    rng: &mut R,
) -> Result<BodyPosition> {
    check_epsilon(epsilon)?;
    let m = estimate_m_value(&body, samples, rng)?;
    let m_dual = estimate_m_dual(&body, samples, rng)?;
    Ok(from_parts(body, epsilon, m, m_dual))
}

pub(crate) fn from_parts(body: NormBody<f64>, epsilon: f64, m: MEstimate, m_dual: MEstimate) -> BodyPosition {
    let sandwich = body.sandwich();
    let d = sandwich.ratio();
    BodyPosition {
        body,
        step: 0,
        alpha: alpha(d, epsilon),
        distance_estimate: d,
        sandwich,
        m,
        m_dual,
        cut_radius: None,
        hull_radius: None,
        halved: None,
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::validation("epsilon must lie in (0, 1]"));
    }
    Ok(())
}

/// `K_{j+1} = conv((K_j ∩ M(K_j°)α·B₂) ∪ (1/(M(K_j)α))·B₂)`.
///
/// The distance estimate can only shrink: the cut radius is at least the
/// inradius and the hull radius at most the circumradius, because every
/// M-value estimate is an average of quantities bounded by the sandwich.
pub fn symmetrization_step<R: Rng + ?Sized>(
    pos: &BodyPosition,
    epsilon: f64,
    samples: usize,
    rng: &mut R,
) -> Result<BodyPosition> {
    check_epsilon(epsilon)?;
    let cut = pos.m_dual.value * pos.alpha;
    let hull = 1.0 / (pos.m.value * pos.alpha);
    if !(cut.is_finite() && hull.is_finite() && cut > 0.0 && hull > 0.0) {
        return Err(Error::Failure("M-value estimates are degenerate".into()));
    }
    let mut body = pos.body.clone();
    let s = body.sandwich();
    if cut < s.big_r {
        body = NormBody::intersect_ball(body, cut)?;
    }
    if hull > body.sandwich().r {
        body = NormBody::hull_with_ball(body, hull)?;
    }
    let mut next = position_of(body, epsilon, samples, rng)?;
    next.step = pos.step + 1;
    next.cut_radius = Some(cut);
    next.hull_radius = Some(hull);
    next.halved = Some(next.distance_estimate <= 0.5 * pos.distance_estimate);
    if next.distance_estimate > pos.distance_estimate * (1.0 + MONOTONE_SLACK) {
        return Err(Error::LoopDivergence {
            step: next.step,
            previous: pos.distance_estimate,
            current: next.distance_estimate,
            trajectory: vec![pos.distance_estimate, next.distance_estimate],
        });
    }
    Ok(next)
}
