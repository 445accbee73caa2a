//! Algorithmic M-ellipsoids: a linear map `T_ε` such that `T_ε(K)` is
//! covered by few translates of `B₂` and `B₂` by few translates of
//! `c_ε·T_ε(K)`.
//!
//! The body is first put in ℓ-position, then rounded by isomorphic
//! symmetrization until its sandwich ratio drops below `C/ε`.

mod cover;
mod lposition;
mod mvalue;
mod symmetrize;

pub use cover::{certify_covering, random_cover, CoveringEstimate, RandomCover, RatioEstimate};
pub use lposition::{solve_l_position, LPosition, LPositionConfig};
pub use mvalue::{estimate_m_dual, estimate_m_value, MEstimate};
pub use symmetrize::{position_of, symmetrization_step, BodyPosition};

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::bodies::{sample_gaussian, BodyKind, NormBody, SandwichRadii};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EllipsoidConfig {
    /// The universal constant `C`; the loop stops once `R/r ≤ C/ε`.
    pub c: f64,
    pub m_samples: usize,
    pub l_position: LPositionConfig,
    /// Defaults to `max(2, ⌈2·log₂(1 + log₂ d₀)⌉)`.
    pub iteration_cap: Option<usize>,
    /// Use closed forms for ℓp balls and ellipsoids.
    pub fast_paths: bool,
    /// Proposals per Monte Carlo certification; `None` skips certification.
    pub certify_budget: Option<usize>,
    /// Test points for an optional random-cover certificate of `T_ε(K)` by `B₂`.
    pub cover_budget: Option<usize>,
}

impl Default for EllipsoidConfig {
    fn default() -> Self {
        EllipsoidConfig {
            c: 2.0,
            m_samples: 20_000,
            l_position: LPositionConfig::default(),
            iteration_cap: None,
            fast_paths: true,
            certify_budget: None,
            cover_budget: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    #[serde(rename = "volumeRatioKplusB")]
    pub volume_ratio_k_plus_b: RatioEstimate,
    #[serde(rename = "volumeRatioBplusCK")]
    pub volume_ratio_b_plus_ck: RatioEstimate,
    /// `(r, R)` of the final internal body.
    pub roundness: SandwichRadii<f64>,
    #[serde(rename = "coverCenters", skip_serializing_if = "Option::is_none")]
    pub cover_centers: Option<RandomCover>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MEllipsoidResult {
    #[serde(rename = "T_eps", serialize_with = "matrix_rows")]
    pub t_eps: Matrix<f64>,
    pub c_eps: f64,
    pub epsilon: f64,
    pub c: f64,
    pub iterations: Vec<BodyPosition>,
    /// `(r, R)` of the final internal body `M_t·K_t`.
    pub roundness: SandwichRadii<f64>,
    pub condition: f64,
    /// Name of the closed form used, if any.
    pub fast_path: Option<String>,
    pub certification: Option<CoverReport>,
}

impl MEllipsoidResult {
    /// `T_ε(K)`.
    pub fn apply(&self, body: &NormBody<f64>) -> Result<NormBody<f64>> {
        NormBody::linear_image(self.t_eps.clone(), body.clone())
    }

    /// Sequence of distance estimates through the loop.
    pub fn trajectory(&self) -> Vec<f64> {
        self.iterations.iter().map(|p| p.distance_estimate).collect()
    }
}

pub(crate) fn matrix_rows<S: Serializer>(m: &Matrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.to_rows().serialize(s)
}

/// `E‖g‖_p²` for a standard Gaussian `g ∈ Rⁿ`.
///
/// Closed forms for `p ∈ {1, 2}`, one-dimensional quadrature for `p = ∞`
/// and a sample mean otherwise.
pub fn gaussian_lp_moment<R: Rng + ?Sized>(n: usize, p: f64, samples: usize, rng: &mut R) -> f64 {
    let nf = n as f64;
    if p == 1.0 {
        nf + nf * (nf - 1.0) * 2.0 / std::f64::consts::PI
    } else if p == 2.0 {
        nf
    } else if p.is_infinite() {
        // E max|g_i|² = ∫ 2x (1 − erf(x/√2)ⁿ) dx by Simpson's rule
        let (upper, k) = (12.0, 24_000);
        let h = upper / k as f64;
        let f = |x: f64| 2.0 * x * (1.0 - libm::erf(x / std::f64::consts::SQRT_2).powi(n as i32));
        let mut s = f(0.0) + f(upper);
        for i in 1..k {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    } else {
        let total: f64 = (0..samples)
            .map(|_| {
                let g: Vec<f64> = sample_gaussian(n, rng);
                crate::bodies::lp_norm(&g, p).powi(2)
            })
            .sum();
        total / samples as f64
    }
}

struct Positioned {
    /// `P` with the positioned body `P(K)`.
    map: Matrix<f64>,
    body: NormBody<f64>,
    fast_path: Option<String>,
    exact_m: Option<f64>,
}

fn closed_form<R: Rng + ?Sized>(body: &NormBody<f64>, config: &EllipsoidConfig, rng: &mut R) -> Option<Positioned> {
    let n = body.dim();
    match body.kind() {
        BodyKind::LpBall { p } => {
            let scale = gaussian_lp_moment(n, *p, config.l_position.samples, rng).sqrt();
            Some(Positioned {
                map: Matrix::scalar(n, scale),
                body: body.scaled(scale).ok()?,
                fast_path: Some(format!("lp(p={p})")),
                exact_m: (*p == 2.0).then(|| 1.0 / scale),
            })
        }
        BodyKind::Ellipsoid { shape, .. } => {
            let nf = n as f64;
            let map = shape.psd_inv_sqrt().scale(nf.sqrt());
            Some(Positioned {
                body: NormBody::euclidean_ball(n).scaled(nf.sqrt()).ok()?,
                map,
                fast_path: Some("ellipsoid".into()),
                exact_m: Some(1.0 / nf.sqrt()),
            })
        }
        _ => None,
    }
}

/// Positions `K` by the inverse of its ℓ-position, keeping the result only
/// when it does not worsen the certified sandwich ratio.
fn generic_position<R: Rng + ?Sized>(body: &NormBody<f64>, config: &EllipsoidConfig, rng: &mut R) -> Result<Positioned> {
    let n = body.dim();
    let lpos = solve_l_position(body, &config.l_position, rng)?;
    let map = lpos
        .t
        .inverse()
        .ok_or_else(|| Error::Failure("ℓ-position is singular".into()))?;
    let image = NormBody::linear_image(map.clone(), body.clone())?;
    if image.sandwich().ratio() <= body.sandwich().ratio() {
        Ok(Positioned {
            map,
            body: image,
            fast_path: None,
            exact_m: None,
        })
    } else {
        Ok(Positioned {
            map: Matrix::identity(n),
            body: body.clone(),
            fast_path: None,
            exact_m: None,
        })
    }
}

fn default_cap(d0: f64) -> usize {
    let cap = (2.0 * (1.0 + d0.max(1.0).log2()).log2()).ceil();
    (cap as usize).max(2)
}

/// Builds `T_ε` and `c_ε = C²ε⁻⁴` for `body`.
pub fn build_m_ellipsoid<R: Rng + ?Sized>(
    body: &NormBody<f64>,
    epsilon: f64,
    config: &EllipsoidConfig,
    rng: &mut R,
) -> Result<MEllipsoidResult> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::validation("epsilon must lie in (0, 1]"));
    }
    if !(config.c >= 1.0) || !config.c.is_finite() {
        return Err(Error::validation("the constant C must be at least 1"));
    }
    if matches!(
        body.kind(),
        BodyKind::Origin | BodyKind::Intersection { .. } | BodyKind::HullWithBall { .. }
    ) {
        return Err(Error::validation("M-ellipsoids are built for explicit full-dimensional bodies"));
    }
    let fast = if config.fast_paths { closed_form(body, config, rng) } else { None };
    let is_fast = fast.is_some();
    let positioned = match fast {
        Some(p) => p,
        None => generic_position(body, config, rng)?,
    };
    let threshold = config.c / epsilon;

    let (m_final, internal, iterations) = if is_fast {
        let m = match positioned.exact_m {
            Some(m) => m,
            None => estimate_m_value(&positioned.body, config.m_samples, rng)?.value,
        };
        (m, positioned.body.sandwich(), Vec::new())
    } else {
        let mut pos = position_of(positioned.body.clone(), epsilon, config.m_samples, rng)?;
        let cap = config.iteration_cap.unwrap_or_else(|| default_cap(pos.distance_estimate));
        let mut trajectory = vec![pos.clone()];
        while pos.distance_estimate > threshold {
            if trajectory.len() > cap {
                return Err(Error::LoopIterationCap {
                    cap,
                    trajectory: trajectory.iter().map(|p| p.distance_estimate).collect(),
                });
            }
            pos = symmetrization_step(&pos, epsilon, config.m_samples, rng).map_err(|e| match e {
                Error::LoopDivergence {
                    step,
                    previous,
                    current,
                    ..
                } => {
                    let mut t: Vec<f64> = trajectory.iter().map(|p| p.distance_estimate).collect();
                    t.push(current);
                    Error::LoopDivergence {
                        step,
                        previous,
                        current,
                        trajectory: t,
                    }
                }
                e => e,
            })?;
            trajectory.push(pos.clone());
        }
        (pos.m.value, pos.sandwich, trajectory)
    };

    let roundness = SandwichRadii::new(internal.r * m_final, internal.big_r * m_final);
    let limit = threshold * threshold;
    if roundness.ratio() > limit * (1.0 + 1e-9) {
        return Err(Error::Roundness {
            ratio: roundness.ratio(),
            limit,
        });
    }
    let t_eps = positioned.map.scale(epsilon * epsilon / config.c * m_final);
    let sv = t_eps.singular_values();
    let condition = sv[sv.len() - 1] / sv[0];
    if !condition.is_finite() {
        return Err(Error::Failure("T_eps is singular".into()));
    }
    let c_eps = config.c * config.c / epsilon.powi(4);
    let mut result = MEllipsoidResult {
        t_eps,
        c_eps,
        epsilon,
        c: config.c,
        iterations,
        roundness,
        condition,
        fast_path: positioned.fast_path,
        certification: None,
    };
    if let Some(budget) = config.certify_budget {
        result.certification = Some(certify(body, &result, budget, config.cover_budget, rng)?);
    }
    Ok(result)
}

/// Monte Carlo certificate for the two covering clauses of an M-ellipsoid.
pub fn certify<R: Rng + ?Sized>(
    body: &NormBody<f64>,
    result: &MEllipsoidResult,
    budget: usize,
    cover_budget: Option<usize>,
    rng: &mut R,
) -> Result<CoverReport> {
    let n = body.dim();
    let ball = NormBody::euclidean_ball(n);
    let tk = result.apply(body)?;
    let ctk = tk.scaled(result.c_eps)?;
    let k_plus_b = certify_covering(&tk, &ball, budget, rng)?;
    let b_plus_ck = certify_covering(&ball, &ctk, budget, rng)?;
    let cover_centers = match cover_budget {
        Some(b) => Some(random_cover(&tk, &ball, b, rng)?),
        None => None,
    };
    Ok(CoverReport {
        volume_ratio_k_plus_b: k_plus_b.over_b,
        volume_ratio_b_plus_ck: b_plus_ck.over_b,
        roundness: result.roundness,
        cover_centers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn gaussian_moments() {
        let mut rng = stream(1, &[]);
        assert_eq!(gaussian_lp_moment(3, 2.0, 0, &mut rng), 3.0);
        // one coordinate: E g² = 1
        assert!((gaussian_lp_moment(1, f64::INFINITY, 0, &mut rng) - 1.0).abs() < 1e-9);
        let mc = gaussian_lp_moment(4, 1.0 + 1e-12, 200_000, &mut rng);
        let exact = gaussian_lp_moment(4, 1.0, 0, &mut rng);
        assert!((mc - exact).abs() < 0.05 * exact);
        let mut rng2 = stream(2, &[]);
        let mc = (0..200_000)
            .map(|_| {
                let g: Vec<f64> = sample_gaussian(3, &mut rng2);
                g.iter().fold(0.0f64, |a, v| a.max(v.abs())).powi(2)
            })
            .sum::<f64>()
            / 200_000.0;
        assert!((mc - gaussian_lp_moment(3, f64::INFINITY, 0, &mut rng)).abs() < 0.02);
    }

    #[test]
    fn ball_gives_scaled_identity() {
        let eps = 0.5;
        let cfg = EllipsoidConfig::default();
        let r = build_m_ellipsoid(&NormBody::euclidean_ball(3), eps, &cfg, &mut stream(3, &[])).unwrap();
        assert!(r.t_eps.max_off_diagonal() <= 1e-12);
        assert!((r.t_eps[(0, 0)] - eps * eps / 2.0).abs() < 1e-12);
        assert_eq!(r.c_eps, 4.0 * 16.0);
        assert!(r.iterations.is_empty());
    }

    #[test]
    fn ellipsoid_gives_inverse_root() {
        let a = Matrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 2.0]]);
        let eps = 0.5;
        let body = NormBody::ellipsoid(a.clone()).unwrap();
        let r = build_m_ellipsoid(&body, eps, &EllipsoidConfig::default(), &mut stream(4, &[])).unwrap();
        let expected = a.psd_inv_sqrt().scale(eps * eps / 2.0);
        assert!(r.t_eps.sub(&expected).frobenius() < 1e-10);
        assert!((r.roundness.ratio() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn generic_path_on_ball_is_scalar() {
        let cfg = EllipsoidConfig {
            fast_paths: false,
            ..Default::default()
        };
        let r = build_m_ellipsoid(&NormBody::euclidean_ball(3), 0.5, &cfg, &mut stream(5, &[])).unwrap();
        assert!(r.t_eps.max_off_diagonal() <= 1e-6 * r.t_eps.max_abs());
        assert_eq!(r.trajectory(), vec![1.0]);
    }

    fn tight_config(c: f64, cap: usize) -> EllipsoidConfig {
        EllipsoidConfig {
            c,
            fast_paths: false,
            m_samples: 2000,
            iteration_cap: Some(cap),
            l_position: LPositionConfig {
                samples: 4000,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn one_round_of_symmetrization() {
        // C/ε sits between the square's ratio √2 and the ratio after one round
        let r = build_m_ellipsoid(&NormBody::linf_ball(2), 1.0, &tight_config(1.38, 4), &mut stream(6, &[]))
            .unwrap();
        let t = r.trajectory();
        assert_eq!(t.len(), 2, "{t:?}");
        assert!(t[1] < t[0] && t[1] <= 1.38);
        assert!(r.roundness.ratio() <= 1.38 * 1.38);
    }

    #[test]
    fn iteration_cap_reports_trajectory() {
        let err = build_m_ellipsoid(&NormBody::linf_ball(2), 1.0, &tight_config(1.2, 1), &mut stream(7, &[]))
            .unwrap_err();
        match err {
            Error::LoopIterationCap { cap, trajectory } => {
                assert_eq!(cap, 1);
                assert_eq!(trajectory.len(), 2);
                assert!(trajectory[1] <= trajectory[0]);
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn certification_for_ball_matches_closed_form() {
        let eps = 1.0;
        let cfg = EllipsoidConfig {
            certify_budget: Some(100_000),
            ..Default::default()
        };
        let r = build_m_ellipsoid(&NormBody::euclidean_ball(2), eps, &cfg, &mut stream(7, &[])).unwrap();
        let cert = r.certification.unwrap();
        // T(B) = B/2, so vol(T(B) + B)/vol(B) = 1.5²
        assert!(cert.volume_ratio_k_plus_b.contains(2.25), "{:?}", cert.volume_ratio_k_plus_b);
        // c·T(B) = 2B, so vol(B + 2B)/vol(2B) = 9/4
        assert!(cert.volume_ratio_b_plus_ck.contains(2.25));
    }

    #[test]
    fn rejects_bad_input() {
        let b = NormBody::euclidean_ball(2);
        let cfg = EllipsoidConfig::default();
        assert!(build_m_ellipsoid(&b, 0.0, &cfg, &mut stream(0, &[])).unwrap_err().is_validation());
        assert!(build_m_ellipsoid(&b, 1.5, &cfg, &mut stream(0, &[])).unwrap_err().is_validation());
    }
}
