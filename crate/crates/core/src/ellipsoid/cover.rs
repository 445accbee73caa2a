//! Monte Carlo volume ratios for Minkowski sums and greedy random covers.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::{minkowski_contains, sample_ball, MinkowskiSampler, NormBody};
use crate::error::{Error, Result};
use crate::linalg::sub;
use crate::rng::stream;

const BLOCK: usize = 4096;
/// Training coverage target; stricter than the 99% reported on fresh points.
const TRAIN_MISS: f64 = 0.005;
const CANDIDATE_POOL: usize = 2000;
const CENTER_CAP: usize = 1000;

/// A ratio estimate with a 3σ confidence radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioEstimate {
    pub value: f64,
    pub ci: f64,
}

impl RatioEstimate {
    pub fn contains(&self, x: f64) -> bool {
        (self.value - x).abs() <= self.ci
    }
}

/// `vol(A+B)/vol(B)` and `vol(A+B)/vol(A)` from one set of proposals.
#[derive(Clone, Debug, Serialize)]
pub struct CoveringEstimate {
    pub over_b: RatioEstimate,
    /// `None` when `A` has zero volume.
    pub over_a: Option<RatioEstimate>,
    pub proposals: usize,
    pub hits_sum: usize,
    pub hits_a: usize,
    pub hits_b: usize,
}

/// Delta-method estimate of `p₁/p₂` from paired indicators with joint
/// frequency `p₁₂`.
fn ratio(h1: usize, h2: usize, h12: usize, m: usize) -> Option<RatioEstimate> {
    if h2 == 0 {
        return None;
    }
    let m = m as f64;
    let (p1, p2, p12) = (h1 as f64 / m, h2 as f64 / m, h12 as f64 / m);
    let r = p1 / p2;
    let cov = p12 - p1 * p2;
    let var = (p1 * (1.0 - p1) / (p2 * p2) + p1 * p1 * p2 * (1.0 - p2) / p2.powi(4)
        - 2.0 * p1 * cov / p2.powi(3))
        / m;
    Some(RatioEstimate {
        value: r,
        ci: 3.0 * var.max(0.0).sqrt(),
    })
}

/// Hit-or-miss estimate of both volume ratios of `A + B`, with proposals
/// uniform in the ball of radius `R_A + R_B`.
pub fn certify_covering<R: Rng + ?Sized>(
    a: &NormBody<f64>,
    b: &NormBody<f64>,
    budget: usize,
    rng: &mut R,
) -> Result<CoveringEstimate> {
    if a.dim() != b.dim() {
        return Err(Error::validation("bodies have different dimensions"));
    }
    if budget == 0 {
        return Err(Error::validation("budget must be positive"));
    }
    let n = a.dim();
    let radius = a.sandwich().big_r + b.sandwich().big_r;
    let base: u64 = rng.random();
    let blocks = budget.div_ceil(BLOCK);
    let counts: Vec<[usize; 3]> = (0..blocks)
        .into_par_iter()
        .map(|blk| -> Result<[usize; 3]> {
            let mut r = stream(base, &[blk as u64]);
            let mut c = [0usize; 3];
            for _ in 0..BLOCK.min(budget - blk * BLOCK) {
                let x: Vec<f64> = sample_ball(n, radius, &mut r);
                // A ⊆ A+B and B ⊆ A+B for bodies containing the origin
                let in_a = a.contains(&x);
                let in_b = b.contains(&x);
                if in_a || in_b || minkowski_contains(a, b, &x)? {
                    c[0] += 1;
                }
                c[1] += in_a as usize;
                c[2] += in_b as usize;
            }
            Ok(c)
        })
        .collect::<Result<_>>()?;
    let [hs, ha, hb] = counts.iter().fold([0; 3], |acc, c| [acc[0] + c[0], acc[1] + c[1], acc[2] + c[2]]);
    if hb == 0 && ha == 0 {
        return Err(Error::SamplingInfeasible {
            acceptance: 0.0,
            floor: 1.0 / budget as f64,
        });
    }
    let over_b = match ratio(hs, hb, hb, budget) {
        Some(r) => r,
        None => {
            return Err(Error::SamplingInfeasible {
                acceptance: 0.0,
                floor: 1.0 / budget as f64,
            })
        }
    };
    Ok(CoveringEstimate {
        over_b,
        over_a: ratio(hs, ha, ha, budget),
        proposals: budget,
        hits_sum: hs,
        hits_a: ha,
        hits_b: hb,
    })
}

/// Translates `c_i + T` covering a sampled portion of `A`.
#[derive(Clone, Debug, Serialize)]
pub struct RandomCover {
    pub centers: Vec<Vec<f64>>,
    /// Uncovered fraction of the points the centers were chosen against.
    pub train_miss_rate: f64,
    /// Uncovered fraction of an independent set of points of `A`.
    pub miss_rate: f64,
    pub test_points: usize,
    /// Coverage stalled below target before the center cap or pool ran out.
    pub stalled: bool,
}

fn cover_bits(translate: &NormBody<f64>, center: &[f64], points: &[Vec<f64>]) -> Vec<u64> {
    let mut bits = vec![0u64; points.len().div_ceil(64)];
    for (i, x) in points.iter().enumerate() {
        if translate.contains(&sub(x, center)) {
            bits[i / 64] |= 1 << (i % 64);
        }
    }
    bits
}

/// Greedy set cover of `budget` points of `A` by translates of `T` whose
/// centers are drawn uniformly from `A + T`; the reported miss rate is
/// measured on `budget` fresh points.
pub fn random_cover<R: Rng + ?Sized>(
    a: &NormBody<f64>,
    translate: &NormBody<f64>,
    budget: usize,
    rng: &mut R,
) -> Result<RandomCover> {
    if a.dim() != translate.dim() {
        return Err(Error::validation("bodies have different dimensions"));
    }
    if budget == 0 {
        return Err(Error::validation("budget must be positive"));
    }
    let train: Vec<Vec<f64>> = (0..budget).map(|_| a.sample_uniform(rng)).collect::<Result<_>>()?;
    let fresh: Vec<Vec<f64>> = (0..budget).map(|_| a.sample_uniform(rng)).collect::<Result<_>>()?;
    let mut sampler = MinkowskiSampler::new(a, translate)?;
    let pool: Vec<Vec<f64>> = (0..CANDIDATE_POOL)
        .map(|_| sampler.sample(rng))
        .collect::<Result<_>>()?;
    let bits: Vec<Vec<u64>> = pool.par_iter().map(|c| cover_bits(translate, c, &train)).collect();

    let mut uncovered = vec![u64::MAX; budget.div_ceil(64)];
    if budget % 64 != 0 {
        *uncovered.last_mut().unwrap() = (1u64 << (budget % 64)) - 1;
    }
    let count = |u: &[u64]| u.iter().map(|w| w.count_ones() as usize).sum::<usize>();
    let target = (TRAIN_MISS * budget as f64).floor() as usize;
    let mut centers = Vec::new();
    let mut stalled = false;
    while count(&uncovered) > target {
        if centers.len() >= CENTER_CAP {
            stalled = true;
            break;
        }
        let (best, gain) = bits
            .iter()
            .enumerate()
            .map(|(i, b)| (i, b.iter().zip(&uncovered).map(|(x, u)| (x & u).count_ones()).sum::<u32>()))
            .max_by_key(|&(i, g)| (g, std::cmp::Reverse(i)))
            .unwrap();
        if gain == 0 {
            stalled = true;
            break;
        }
        for (u, x) in uncovered.iter_mut().zip(&bits[best]) {
            *u &= !x;
        }
        centers.push(pool[best].clone());
    }
    let missed = fresh
        .iter()
        .filter(|x| !centers.iter().any(|c| translate.contains(&sub(x, c))))
        .count();
    Ok(RandomCover {
        train_miss_rate: count(&uncovered) as f64 / budget as f64,
        miss_rate: missed as f64 / budget as f64,
        centers,
        test_points: budget,
        stalled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn origin_summand_is_neutral() {
        let est = certify_covering(&NormBody::origin(2), &NormBody::euclidean_ball(2), 20_000, &mut stream(1, &[]))
            .unwrap();
        assert_eq!(est.over_b.value, 1.0);
        assert!(est.over_a.is_none());
    }

    #[test]
    fn disc_plus_disc() {
        let d = NormBody::euclidean_ball(2);
        let est = certify_covering(&d, &d, 200_000, &mut stream(2, &[])).unwrap();
        assert!(est.over_b.contains(4.0), "{:?}", est.over_b);
        assert!(est.over_a.unwrap().contains(4.0));
    }

    #[test]
    fn swapping_arguments_swaps_normalizations() {
        let sq = NormBody::linf_ball(2).scaled(0.7).unwrap();
        let d = NormBody::euclidean_ball(2);
        let ab = certify_covering(&sq, &d, 100_000, &mut stream(3, &[])).unwrap();
        let ba = certify_covering(&d, &sq, 100_000, &mut stream(3, &[])).unwrap();
        let x = ab.over_b;
        let y = ba.over_a.unwrap();
        assert!((x.value - y.value).abs() <= x.ci + y.ci);
        // vol(A+B) = 4s² + 8s + π for the square of half-side s
        let s: f64 = 0.7;
        assert!(ab.over_b.contains((4.0 * s * s + 8.0 * s + PI) / PI));
    }

    #[test]
    fn contained_body_needs_one_center() {
        let a = NormBody::euclidean_ball(2).scaled(0.5).unwrap();
        let t = NormBody::euclidean_ball(2);
        let cover = random_cover(&a, &t, 2000, &mut stream(4, &[])).unwrap();
        assert_eq!(cover.centers.len(), 1);
        assert_eq!(cover.miss_rate, 0.0);
    }

    #[test]
    fn square_needs_at_least_four_discs() {
        let a = NormBody::linf_ball(2);
        let t = NormBody::euclidean_ball(2);
        let cover = random_cover(&a, &t, 4000, &mut stream(5, &[])).unwrap();
        assert!(cover.centers.len() >= 4, "{}", cover.centers.len());
        assert!(cover.miss_rate <= 0.01, "{}", cover.miss_rate);
        assert!(!cover.stalled);
    }
}
