//! Randomized list sieve with perturbations, in any norm.
//!
//! A perturbation `e` is drawn uniformly from `ξR·K`, moved to a nearby
//! point `y ≡ e (mod L)` by nearest-plane rounding and reduced against the
//! list; the sample is the lattice vector `y − e`. Because `e` and `e − w`
//! reduce to the same `y` for any lattice vector `w`, a recorded fair coin
//! may add a list vector `w` with `e − w ∈ ξR·K` without changing the output
//! distribution: the two outcomes form the pair `(u, u + w)`.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::kissing::estimate_with_restarts;
use crate::bodies::NormBody;
use crate::error::{Error, Result};
use crate::lattice::{coefficients_to_i64, gram_schmidt, lll_reduce_with_transform, GenericBasis};
use crate::linalg::{norm2, sub};
use crate::oracle::LllDelta;
use crate::rng::stream;
use crate::scalar::LatticeScalar;

const TAG_LIST: u64 = 1;
const TAG_SAMPLE: u64 = 2;
const TAG_KISSING: u64 = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveConfig {
    pub epsilon: f64,
    /// Reduction threshold: `y` is replaced by `y ∓ w` when that shrinks it
    /// by a factor `1 − γ`.
    pub gamma: f64,
    /// Target length scale `R`.
    pub radius: f64,
    /// Number of output samples `N`.
    pub samples: usize,
    /// Explicit list cap; by default the kissing estimate times `2^{εn}`.
    pub max_list_size: Option<usize>,
    pub seed: u64,
    /// Perturbation scale `ξ`.
    pub perturbation: f64,
    /// Norm cap `a`: emitted samples satisfy `‖v‖_K ≤ a·R`.
    pub norm_cap: f64,
    pub kissing_budget: usize,
    /// List growth stops after this many consecutive collisions.
    pub stall: usize,
    /// Redraws per sample before the run is declared failed.
    pub resample_limit: usize,
}

impl SieveConfig {
    pub fn new(radius: f64, samples: usize, seed: u64) -> Self {
        SieveConfig {
            epsilon: 0.25,
            gamma: 0.1,
            radius,
            samples,
            max_list_size: None,
            seed,
            perturbation: 1.0,
            norm_cap: 4.0,
            kissing_budget: 1000,
            stall: 64,
            resample_limit: 64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::validation("epsilon must be positive"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::validation("gamma must lie in (0, 1)"));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::validation("radius must be positive"));
        }
        if self.samples == 0 {
            return Err(Error::validation("at least one sample is required"));
        }
        if !(self.perturbation > 0.0 && self.norm_cap > 0.0) {
            return Err(Error::validation("perturbation scale and norm cap must be positive"));
        }
        if self.kissing_budget == 0 || self.stall == 0 || self.resample_limit == 0 {
            return Err(Error::validation("sieve budgets must be positive"));
        }
        Ok(())
    }
}

/// One emitted lattice vector with its diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveSample {
    /// Coefficients in the input basis.
    pub coefficients: Vec<i64>,
    pub vector: Vec<f64>,
    pub norm: f64,
    /// `a·R`.
    pub norm_bound: f64,
    /// `‖e‖_K` of the accepted perturbation.
    pub perturbation_norm: f64,
    /// The reduced vector `u = y − e` before the coin.
    pub base_coefficients: Vec<i64>,
    /// The list vector `w` forming the pair `(u, u + w)`, if any.
    pub partner_coefficients: Option<Vec<i64>>,
    pub coin: bool,
    pub resamples: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SieveRun {
    pub samples: Vec<SieveSample>,
    pub list_size: usize,
    pub list_cap: usize,
    pub kissing_estimate: usize,
    /// Largest `‖v‖_K / R` over the emitted samples.
    pub realized_a: f64,
    pub radius: f64,
    pub norm_bound: f64,
}

struct Entry {
    vector: Vec<f64>,
    coeffs: Vec<i64>,
}

/// Shared state of one sieve run, in LLL-reduced coordinates.
struct Engine<'a> {
    body: &'a NormBody<f64>,
    config: &'a SieveConfig,
    cols: Vec<Vec<f64>>,
    bstar: Vec<Vec<f64>>,
    bnorm: Vec<f64>,
    /// Column `j`: input-basis coefficients of reduced vector `j`.
    transform: Vec<Vec<i64>>,
    input_cols: Vec<Vec<f64>>,
    list: Vec<Entry>,
}

impl<'a> Engine<'a> {
    fn new<S: LatticeScalar + LllDelta>(
        basis: &GenericBasis<S>,
        body: &'a NormBody<f64>,
        config: &'a SieveConfig,
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
        Ok(Engine {
            body,
            config,
            cols: reduced.columns().to_vec(),
            bstar: gso.bstar,
            bnorm: gso.norms,
            transform,
            input_cols: basis.columns_f64(),
            list: Vec::new(),
        })
    }

    fn n(&self) -> usize {
        self.cols.len()
    }

    fn vector_of(&self, c: &[i64]) -> Vec<f64> {
        let mut v = vec![0.0; self.body.dim()];
        for (col, &ci) in self.cols.iter().zip(c) {
            if ci != 0 {
                for (vk, bk) in v.iter_mut().zip(col) {
                    *vk += ci as f64 * bk;
                }
            }
        }
        v
    }

    fn perturbation<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let s = self.config.perturbation * self.config.radius;
        Ok(self.body.sample_uniform(rng)?.into_iter().map(|v| v * s).collect())
    }

    /// Nearest-plane rounding: returns `y = e − Bx` and the coefficients of
    /// `y − e`.
    fn round(&self, e: &[f64]) -> (Vec<f64>, Vec<i64>) {
        let n = self.n();
        let mut y = e.to_vec();
        let mut c = vec![0i64; n];
        for i in (0..n).rev() {
            let k = (crate::linalg::dot(&y, &self.bstar[i]) / self.bnorm[i]).round();
            if k != 0.0 {
                for (yk, bk) in y.iter_mut().zip(&self.cols[i]) {
                    *yk -= k * bk;
                }
                c[i] = -(k as i64);
            }
        }
        (y, c)
    }

    /// First-fit reduction of `y` against the list.
    fn reduce(&self, y: &mut Vec<f64>, c: &mut [i64]) {
        let shrink = 1.0 - self.config.gamma;
        let mut ny = self.body.norm(y);
        'scan: loop {
            if ny == 0.0 {
                return;
            }
            for w in &self.list {
                for sign in [-1.0, 1.0] {
                    let cand: Vec<f64> = y.iter().zip(&w.vector).map(|(a, b)| a + sign * b).collect();
                    let nc = self.body.norm(&cand);
                    if nc < shrink * ny {
                        *y = cand;
                        let s = sign as i64;
                        for (ck, wk) in c.iter_mut().zip(&w.coeffs) {
                            *ck += s * wk;
                        }
                        ny = nc;
                        continue 'scan;
                    }
                }
            }
            return;
        }
    }

    fn build_list(&mut self, cap: usize, kissing: usize) -> Result<()> {
        let mut rng = stream(self.config.seed, &[TAG_LIST]);
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut consecutive = 0;
        while consecutive < self.config.stall {
            let e = self.perturbation(&mut rng)?;
            let (mut y, mut c) = self.round(&e);
            self.reduce(&mut y, &mut c);
            let key = canonical(&c);
            if c.iter().all(|&v| v == 0) || seen.contains(&key) {
                consecutive += 1;
                continue;
            }
            consecutive = 0;
            seen.insert(key);
            let vector = self.vector_of(&c);
            self.list.push(Entry { vector, coeffs: c });
            if self.list.len() > cap {
                return Err(Error::ListOverflow {
                    cap,
                    kissing_estimate: kissing,
                });
            }
        }
        Ok(())
    }

    fn to_input(&self, c: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.n()];
        for (col, &ci) in self.transform.iter().zip(c) {
            if ci != 0 {
                for (o, &u) in out.iter_mut().zip(col) {
                    *o += u * ci;
                }
            }
        }
        out
    }

    fn input_vector(&self, coeffs: &[i64]) -> Vec<f64> {
        let mut v = vec![0.0; self.body.dim()];
        for (col, &ci) in self.input_cols.iter().zip(coeffs) {
            if ci != 0 {
                for (vk, bk) in v.iter_mut().zip(col) {
                    *vk += ci as f64 * bk;
                }
            }
        }
        v
    }

    fn sample(&self, index: usize) -> Result<Option<SieveSample>> {
        let mut rng = stream(self.config.seed, &[TAG_SAMPLE, index as u64]);
        let bound = self.config.norm_cap * self.config.radius;
        let scale = self.config.perturbation * self.config.radius;
        for attempt in 0..self.config.resample_limit {
            let e = self.perturbation(&mut rng)?;
            let (mut y, mut c) = self.round(&e);
            self.reduce(&mut y, &mut c);
            let partner = self
                .list
                .iter()
                .find(|w| self.body.norm(&sub(&e, &w.vector)) <= scale)
                .map(|w| w.coeffs.clone());
            let coin: bool = rng.random();
            let mut out = c.clone();
            if coin {
                if let Some(w) = &partner {
                    for (o, wk) in out.iter_mut().zip(w) {
                        *o += wk;
                    }
                }
            }
            let coefficients = self.to_input(&out);
            let vector = self.input_vector(&coefficients);
            let norm = self.body.norm(&vector);
            if norm <= bound {
                return Ok(Some(SieveSample {
                    coefficients,
                    vector,
                    norm,
                    norm_bound: bound,
                    perturbation_norm: self.body.norm(&e),
                    base_coefficients: self.to_input(&c),
                    partner_coefficients: partner.map(|w| self.to_input(&w)),
                    coin,
                    resamples: attempt,
                }));
            }
        }
        Ok(None)
    }
}

fn canonical(c: &[i64]) -> Vec<i64> {
    match c.iter().find(|&&v| v != 0) {
        Some(&lead) if lead < 0 => c.iter().map(|v| -v).collect(),
        _ => c.to_vec(),
    }
}

/// List cap `k̃ · 2^{εn}` from a greedy kissing estimate at the configured γ.
pub fn list_cap(body: &NormBody<f64>, config: &SieveConfig) -> Result<(usize, usize)> {
    let mut rng = stream(config.seed, &[TAG_KISSING]);
    let est = estimate_with_restarts(body, config.gamma, config.kissing_budget, 1, &mut rng)?;
    let n = body.dim() as f64;
    let cap = match config.max_list_size {
        Some(c) => c,
        None => ((est.count.max(1) as f64) * (config.epsilon * n).exp2()).ceil() as usize,
    };
    Ok((cap, est.count))
}

/// Draws `config.samples` lattice vectors of `K`-norm at most `a·R`.
///
/// Samples use per-index seed streams, so the output does not depend on the
/// number of threads.
pub fn sieve_sampler<S: LatticeScalar + LllDelta>(
    basis: &GenericBasis<S>,
    body: &NormBody<f64>,
    config: &SieveConfig,
) -> Result<SieveRun> {
    config.validate()?;
    let (cap, kissing) = list_cap(body, config)?;
    let mut engine = Engine::new(basis, body, config)?;
    engine.build_list(cap, kissing)?;
    let drawn: Vec<Result<Option<SieveSample>>> =
        (0..config.samples).into_par_iter().map(|i| engine.sample(i)).collect();
    let mut samples = Vec::with_capacity(config.samples);
    let mut failures = 0;
    for d in drawn {
        match d? {
            Some(s) => samples.push(s),
            None => failures += 1,
        }
    }
    if failures > 0 {
        return Err(Error::SieveFailure {
            attempts: config.samples,
            failures,
        });
    }
    let realized_a = samples.iter().map(|s| s.norm / config.radius).fold(0.0, f64::max);
    Ok(SieveRun {
        samples,
        list_size: engine.list.len(),
        list_cap: cap,
        kissing_estimate: kissing,
        realized_a,
        radius: config.radius,
        norm_bound: config.norm_cap * config.radius,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SvpApprox {
    pub coefficients: Vec<i64>,
    pub vector: Vec<f64>,
    pub value: f64,
    /// The radius at which the returned vector was found.
    pub radius: f64,
    pub grid: Vec<f64>,
    /// `(grid index, succeeded)` for every probed radius.
    pub probes: Vec<(usize, bool)>,
}

/// Geometric radius grid with ratio `1 + 1/n` between a certified lower bound
/// on `λ₁(K)` and the shortest LLL vector in `K`-norm.
pub fn radius_grid<S: LatticeScalar + LllDelta>(
    basis: &GenericBasis<S>,
    body: &NormBody<f64>,
) -> Result<Vec<f64>> {
    let reduced = crate::lattice::lll_reduce(basis, S::lll_delta())?.to_f64();
    let n = reduced.rank();
    let upper = reduced
        .columns()
        .iter()
        .map(|c| body.norm(c))
        .fold(f64::INFINITY, f64::min);
    let gso = gram_schmidt(&reduced)?;
    let min_star = gso.norms.iter().map(|v| v.sqrt()).fold(f64::INFINITY, f64::min);
    let alpha: f64 = 4.0 / (4.0 * 0.99 - 1.0);
    let by_lll = norm2(reduced.column(0)) / alpha.powf((n as f64 - 1.0) / 2.0);
    let lower = (min_star.max(by_lll) / body.sandwich().big_r).min(upper);
    let ratio = 1.0 + 1.0 / n as f64;
    let mut grid = vec![lower];
    while *grid.last().expect("nonempty") * ratio < upper {
        let next = grid.last().expect("nonempty") * ratio;
        grid.push(next);
    }
    grid.push(upper);
    Ok(grid)
}

/// Approximate SVP: binary search for the smallest grid radius at which the
/// sampler emits a nonzero vector, keeping the shortest nonzero sample or
/// pairwise difference seen.
pub fn svp_approx<S: LatticeScalar + LllDelta>(
    basis: &GenericBasis<S>,
    body: &NormBody<f64>,
    config: &SieveConfig,
    retries: usize,
) -> Result<SvpApprox> {
    config.validate()?;
    let grid = radius_grid(basis, body)?;
    let input_cols = basis.columns_f64();
    let mut best: Option<(Vec<i64>, f64, f64)> = None;
    let mut probes = Vec::new();
    let (mut lo, mut hi) = (0usize, grid.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        let mut success = false;
        for attempt in 0..=retries {
            let mut cfg = config.clone();
            cfg.radius = grid[mid];
            cfg.seed = crate::rng::derive_seed(config.seed, &[mid as u64, attempt as u64]);
            let run = match sieve_sampler(basis, body, &cfg) {
                Ok(r) => r,
                Err(Error::SieveFailure { .. }) | Err(Error::ListOverflow { .. }) => continue,
                Err(e) => return Err(e),
            };
            if let Some((c, v)) = shortest_nonzero(&run.samples, &input_cols, body) {
                success = true;
                if best.as_ref().is_none_or(|b| v < b.1) {
                    best = Some((c, v, grid[mid]));
                }
                break;
            }
        }
        probes.push((mid, success));
        if success {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    match best {
        Some((coefficients, value, radius)) => {
            let vector = combine_f64(&input_cols, &coefficients);
            Ok(SvpApprox {
                coefficients,
                vector,
                value,
                radius,
                grid,
                probes,
            })
        }
        _ => Err(Error::Failure(format!(
            "no grid radius produced a nonzero vector after {} retries per radius",
            retries
        ))),
    }
}

pub(crate) fn combine_f64(cols: &[Vec<f64>], c: &[i64]) -> Vec<f64> {
    let mut v = vec![0.0; cols.first().map_or(0, Vec::len)];
    for (col, &ci) in cols.iter().zip(c) {
        if ci != 0 {
            for (vk, bk) in v.iter_mut().zip(col) {
                *vk += ci as f64 * bk;
            }
        }
    }
    v
}

/// Shortest nonzero vector among the samples and their pairwise differences.
fn shortest_nonzero(
    samples: &[SieveSample],
    cols: &[Vec<f64>],
    body: &NormBody<f64>,
) -> Option<(Vec<i64>, f64)> {
    let mut best: Option<(Vec<i64>, f64)> = None;
    let mut consider = |c: Vec<i64>| {
        if c.iter().all(|&v| v == 0) {
            return;
        }
        let c = canonical(&c);
        let value = body.norm(&combine_f64(cols, &c));
        let better = match &best {
            None => true,
            Some((bc, bv)) => value < *bv || (value == *bv && c < *bc),
        };
        if better {
            best = Some((c, value));
        }
    };
    for (i, a) in samples.iter().enumerate() {
        consider(a.coefficients.clone());
        for b in &samples[i + 1..] {
            consider(a.coefficients.iter().zip(&b.coefficients).map(|(x, y)| x - y).collect());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::basis_from_integers;

    fn identity(n: usize) -> GenericBasis<f64> {
        GenericBasis::identity(n)
    }

    #[test]
    fn samples_are_lattice_vectors_within_bound() {
        let b = identity(8);
        let body = NormBody::euclidean_ball(8);
        let cfg = SieveConfig::new(1.0, 200, 3);
        let run = sieve_sampler(&b, &body, &cfg).unwrap();
        assert_eq!(run.samples.len(), 200);
        assert!(run.realized_a <= 8.0);
        for s in &run.samples {
            assert!(s.norm <= s.norm_bound);
            for (x, c) in s.vector.iter().zip(&s.coefficients) {
                assert_eq!(*x, *c as f64);
            }
        }
    }

    #[test]
    fn output_minus_partner_is_base() {
        let b = basis_from_integers(&[vec![3, 1, 0], vec![1, 4, 1], vec![0, 1, 5]]).unwrap();
        let body = NormBody::linf_ball(3);
        let cfg = SieveConfig::new(4.0, 100, 5);
        let run = sieve_sampler(&b, &body, &cfg).unwrap();
        for s in &run.samples {
            let mut base = s.coefficients.clone();
            if let (true, Some(w)) = (s.coin, &s.partner_coefficients) {
                for (x, y) in base.iter_mut().zip(w) {
                    *x -= y;
                }
            }
            assert_eq!(base, s.base_coefficients);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let b = basis_from_integers(&[vec![3, 1, 0], vec![1, 4, 1], vec![0, 1, 5]]).unwrap();
        let body = NormBody::euclidean_ball(3);
        let cfg = SieveConfig::new(3.0, 50, 11);
        let a = sieve_sampler(&b, &body, &cfg).unwrap();
        let c = sieve_sampler(&b, &body, &cfg).unwrap();
        assert_eq!(a.samples, c.samples);
    }

    #[test]
    fn svp_on_integer_lattice() {
        let b = identity(8);
        let body = NormBody::euclidean_ball(8);
        let cfg = SieveConfig::new(1.0, 64, 1);
        let r = svp_approx(&b, &body, &cfg, 4).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = SieveConfig::new(1.0, 10, 0);
        cfg.gamma = 1.5;
        assert!(sieve_sampler(&identity(2), &NormBody::euclidean_ball(2), &cfg).is_err());
    }
}
