//! Constant-factor SVP and CVP in a norm `K` from oracles and samplers in
//! simpler norms: SVP via a CVP oracle in `ℓ₂` or in a second norm `Q`, and
//! CVP via the `ℓ₂` or cylinder sieve on a Kannan embedding.

mod cvp;
mod grid;
mod kannan;
mod svp;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use cvp::{cvp_via_sieve2, cvp_via_sieve_q, CvpGridPoint, CvpTrace, PairRecord};
pub use grid::{geometric_grid, guess_scalings};
pub use kannan::kannan_embed;
pub use svp::{svp_via_cvp2, svp_via_cvp_q, RepetitionRecord, SvpGridPoint, SvpTrace};

use crate::bodies::NormBody;
use crate::ellipsoid::EllipsoidConfig;
use crate::error::{Error, Result};
use crate::lattice::{coefficients_to_i64, gram_schmidt, lll_reduce_with_transform, GenericBasis};
use crate::oracle::{exact_cvp, LllDelta};
use crate::sieve::SieveConfig;
use crate::sparsify::DEFAULT_P_MIN;

/// Default cap on repetition counts.
pub const DEFAULT_MAX_BUDGET: usize = 20_000;

/// A CVP oracle: lattice coefficients of a vector close to the target in the
/// given norm.
pub type CvpOracle<'a> = &'a (dyn Fn(&GenericBasis<f64>, &[f64], &NormBody<f64>) -> Result<Vec<i64>> + Sync);

/// Exact CVP by enumeration, usable as an oracle with `α = 1`.
pub fn exact_oracle(basis: &GenericBasis<f64>, target: &[f64], body: &NormBody<f64>) -> Result<Vec<i64>> {
    Ok(exact_cvp(basis, target, body)?.coefficients)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "svp-cvp2")]
    SvpCvp2,
    #[serde(rename = "svp-cvpQ")]
    SvpCvpQ,
    #[serde(rename = "cvp-sieve2")]
    CvpSieve2,
    #[serde(rename = "cvp-sieveQ")]
    CvpSieveQ,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::SvpCvp2, Mode::SvpCvpQ, Mode::CvpSieve2, Mode::CvpSieveQ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::SvpCvp2 => "svp-cvp2",
            Mode::SvpCvpQ => "svp-cvpQ",
            Mode::CvpSieve2 => "cvp-sieve2",
            Mode::CvpSieveQ => "cvp-sieveQ",
        }
    }

    pub fn is_svp(self) -> bool {
        matches!(self, Mode::SvpCvp2 | Mode::SvpCvpQ)
    }

    pub fn uses_q(self) -> bool {
        matches!(self, Mode::SvpCvpQ | Mode::CvpSieveQ)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::validation(format!("unknown mode {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionConfig {
    pub epsilon: f64,
    /// Overrides the default repetition count.
    pub repetition_budget: Option<usize>,
    /// Cap applied to the default repetition count.
    pub max_budget: usize,
    pub p_min: u64,
    /// Ratio of the scaling grid; `1 − 1/n` by default.
    pub scale_grid_ratio: Option<f64>,
    pub seed: u64,
    /// Keep only the best vector and the previous oracle answer.
    pub low_memory: bool,
    pub ellipsoid: EllipsoidConfig,
    /// Template for the sieve runs; radius, sample count and seed are set
    /// per grid point.
    pub sieve: SieveConfig,
    /// Compare against the exact oracle when the rank is at most this.
    pub oracle_rank_limit: usize,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig {
            epsilon: 0.25,
            repetition_budget: None,
            max_budget: DEFAULT_MAX_BUDGET,
            p_min: DEFAULT_P_MIN,
            scale_grid_ratio: None,
            seed: 0,
            low_memory: false,
            ellipsoid: EllipsoidConfig::default(),
            sieve: SieveConfig::new(1.0, 1, 0),
            oracle_rank_limit: 6,
        }
    }
}

impl ReductionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::validation("epsilon must lie in (0, 1]"));
        }
        if self.repetition_budget == Some(0) || self.max_budget == 0 {
            return Err(Error::validation("repetition budgets must be at least 1"));
        }
        if let Some(r) = self.scale_grid_ratio {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::validation("scale grid ratio must lie in (0, 1)"));
            }
        }
        Ok(())
    }

    /// The repetition count and a note describing where it came from.
    pub(crate) fn budget(&self, formula: f64, formula_text: &str) -> (usize, String) {
        if let Some(b) = self.repetition_budget {
            return (b, format!("repetition budget {b} set explicitly ({formula_text} = {formula:.1})"));
        }
        let exact = formula.ceil().max(1.0);
        if exact > self.max_budget as f64 {
            let b = self.max_budget;
            (b, format!("repetition budget capped at {b} ({formula_text} = {formula:.1})"))
        } else {
            (exact as usize, format!("repetition budget {formula_text} = {exact}"))
        }
    }
}

/// Output of any of the four reductions.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionResult {
    pub mode: Mode,
    /// Integer coefficients in the input basis.
    pub coefficients: Vec<i64>,
    pub vector: Vec<f64>,
    /// `‖v‖_K` for SVP, `‖t − v‖_K` for CVP.
    pub value: f64,
    /// Exact optimum when the oracle comparison ran.
    pub optimum: Option<f64>,
    /// `value / optimum`; for CVP with the target on the lattice, 1 when both
    /// vanish.
    #[serde(rename = "achievedFactor")]
    pub achieved_factor: Option<f64>,
    /// The measured approximation constant.
    #[serde(rename = "gammaRealized")]
    pub gamma_realized: Option<f64>,
    pub epsilon: f64,
    pub c_eps: f64,
    pub prime: Option<u64>,
    pub budget: usize,
    pub grid: Vec<f64>,
    pub trace: Trace,
    /// SHA-256 of the serialized trace.
    pub trace_digest: String,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Trace {
    Svp(SvpTrace),
    Cvp(CvpTrace),
}

pub(crate) fn digest<T: Serialize>(value: &T) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// `value / optimum`, treating `0/0` as an exact hit.
pub(crate) fn factor(value: f64, optimum: f64) -> f64 {
    if optimum <= 0.0 {
        if value <= 1e-9 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        value / optimum
    }
}

/// `Σ x_i b_i` for `f64` columns.
pub(crate) fn combine(columns: &[Vec<f64>], x: &[i64]) -> Vec<f64> {
    let mut v = vec![0.0; columns.first().map_or(0, Vec::len)];
    for (c, &xi) in columns.iter().zip(x) {
        if xi != 0 {
            for (vk, ck) in v.iter_mut().zip(c) {
                *vk += xi as f64 * ck;
            }
        }
    }
    v
}

/// Babai's nearest-plane rounding on the LLL-reduced basis; coefficients in
/// the input basis.
pub(crate) fn nearest_plane(basis: &GenericBasis<f64>, target: &[f64]) -> Result<Vec<i64>> {
    let lll = lll_reduce_with_transform(basis, f64::lll_delta())?;
    let gso = gram_schmidt(&lll.basis)?;
    let n = basis.rank();
    let mut residual = target.to_vec();
    let mut y = vec![0i64; n];
    for i in (0..n).rev() {
        let c: f64 = residual.iter().zip(&gso.bstar[i]).map(|(a, b)| a * b).sum::<f64>() / gso.norms[i];
        let k = c.round();
        y[i] = k as i64;
        for (r, b) in residual.iter_mut().zip(lll.basis.column(i)) {
            *r -= k * b;
        }
    }
    let mut x = vec![num_bigint::BigInt::from(0); n];
    for (col, &yi) in lll.transform.iter().zip(&y) {
        for (xk, ck) in x.iter_mut().zip(col) {
            *xk += ck * yi;
        }
    }
    coefficients_to_i64(&x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
        assert!("svp".parse::<Mode>().unwrap_err().is_validation());
    }

    #[test]
    fn budget_is_capped_and_logged() {
        let cfg = ReductionConfig {
            max_budget: 100,
            ..Default::default()
        };
        let (b, note) = cfg.budget(1e6, "f");
        assert_eq!(b, 100);
        assert!(note.contains("capped"));
        let (b, _) = cfg.budget(3.2, "f");
        assert_eq!(b, 4);
    }

    #[test]
    fn nearest_plane_recovers_lattice_points() {
        let b = GenericBasis::new(vec![vec![3.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let x = nearest_plane(&b, &combine(b.columns(), &[2, -3])).unwrap();
        assert_eq!(x, vec![2, -3]);
    }
}
