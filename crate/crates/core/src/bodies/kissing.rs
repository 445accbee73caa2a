//! Greedy lower bounds for the kissing-number variant `k̃(K, γ)`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::sample::sample_sphere;
use super::NormBody;
use crate::error::{Error, Result};
use crate::scalar::Real;

const RESTARTS: usize = 16;

/// A certified lower bound on `k̃(K, γ)`: the packing itself is the certificate.
#[derive(Clone, Debug, Serialize)]
pub struct KissingEstimate {
    pub gamma: f64,
    pub count: usize,
    pub budget: usize,
    /// Points of the shell `K ∖ (1 − γ/n)K` with pairwise `K`-distance at
    /// least `1 − γ`.
    pub points: Vec<Vec<f64>>,
}

/// Greedy maximal packing over `budget` random shell points, with random
/// restarts and a one-for-two swap improvement.
pub fn estimate_kissing_variant<F: Real, R: Rng + ?Sized>(
    body: &NormBody<F>,
    gamma: F,
    budget: usize,
    rng: &mut R,
) -> Result<KissingEstimate> {
    estimate_with_restarts(body, gamma, budget, RESTARTS, rng)
}

pub(crate) fn estimate_with_restarts<F: Real, R: Rng + ?Sized>(
    body: &NormBody<F>,
    gamma: F,
    budget: usize,
    restarts: usize,
    rng: &mut R,
) -> Result<KissingEstimate> {
    if !(gamma > F::zero() && gamma < F::one()) {
        return Err(Error::validation("gamma must lie in (0, 1)"));
    }
    if budget == 0 {
        return Err(Error::validation("kissing budget must be positive"));
    }
    let n = body.dim();
    let width = gamma / F::c(n as f64);
    let pool: Vec<Vec<F>> = (0..budget)
        .map(|_| {
            let u: Vec<F> = sample_sphere(n, rng);
            let s = F::one() - width * F::c(rng.random::<f64>());
            let nu = body.norm(&u);
            u.into_iter().map(|v| v * s / nu).collect()
        })
        .collect();
    let sep = F::one() - gamma;
    let far = |i: usize, j: usize| -> bool {
        let d: Vec<F> = pool[i].iter().zip(&pool[j]).map(|(&a, &b)| a - b).collect();
        body.norm(&d) >= sep
    };

    let mut best: Vec<usize> = Vec::new();
    let mut order: Vec<usize> = (0..budget).collect();
    for restart in 0..restarts.max(1) {
        if restart > 0 {
            order.shuffle(rng);
        }
        let mut chosen: Vec<usize> = Vec::new();
        for &i in &order {
            if chosen.iter().all(|&j| far(i, j)) {
                chosen.push(i);
            }
        }
        improve(&mut chosen, budget, &far);
        if chosen.len() > best.len() {
            best = chosen;
        }
    }
    best.sort_unstable();
    Ok(KissingEstimate {
        gamma: gamma.as_f64(),
        count: best.len(),
        budget,
        points: best
            .iter()
            .map(|&i| pool[i].iter().map(|v| v.as_f64()).collect())
            .collect(),
    })
}

/// Replaces one chosen point by two compatible ones while possible.
fn improve(chosen: &mut Vec<usize>, budget: usize, far: &impl Fn(usize, usize) -> bool) {
    loop {
        let mut blocked_by: Vec<Vec<usize>> = vec![Vec::new(); chosen.len()];
        for q in 0..budget {
            if chosen.contains(&q) {
                continue;
            }
            let mut single = None;
            let mut conflicts = 0;
            for (k, &s) in chosen.iter().enumerate() {
                if !far(q, s) {
                    conflicts += 1;
                    single = Some(k);
                    if conflicts > 1 {
                        break;
                    }
                }
            }
            match (conflicts, single) {
                (0, _) => {
                    chosen.push(q);
                    blocked_by.push(Vec::new());
                }
                (1, Some(k)) => blocked_by[k].push(q),
                _ => {}
            }
        }
        let swap = blocked_by.iter().enumerate().find_map(|(k, cands)| {
            cands.iter().enumerate().find_map(|(a, &q1)| {
                cands[a + 1..]
                    .iter()
                    .find(|&&q2| far(q1, q2))
                    .map(|&q2| (k, q1, q2))
            })
        });
        match swap {
            Some((k, q1, q2)) => {
                chosen.swap_remove(k);
                chosen.push(q1);
                chosen.push(q2);
            }
            None => return,
        }
    }
}
