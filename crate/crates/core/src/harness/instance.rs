//! Lattice instances on disk and their random generation.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bodies::{NormBody, NormSpec};
use crate::error::{Error, Result};
use crate::lattice::{Basis, GenericBasis};
use crate::scalar::{format_rational, parse_rational};

const RANK_TRIES: usize = 100;
/// Target coefficients are multiples of `1/TARGET_DENOMINATOR`.
const TARGET_DENOMINATOR: i64 = 1024;

/// An exact number in JSON: an integer or a `"p/q"` / decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Text(String),
}

impl Entry {
    pub fn value(&self) -> Result<BigRational> {
        match self {
            Entry::Int(v) => Ok(BigRational::from_integer(BigInt::from(*v))),
            Entry::Text(s) => parse_rational(s).ok_or_else(|| Error::validation(format!("invalid number {s:?}"))),
        }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        match (r.is_integer(), i64::try_from(r.numer())) {
            (true, Ok(v)) => Entry::Int(v),
            _ => Entry::Text(format_rational(r)),
        }
    }
}

/// A lattice instance. `basis` lists the basis vectors, each of length `dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub dim: usize,
    pub rank: usize,
    pub basis: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<Entry>>,
    pub norm: NormSpec,
    /// Second norm for the `Q` variants.
    #[serde(default, rename = "normQ", skip_serializing_if = "Option::is_none")]
    pub norm_q: Option<NormSpec>,
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Instance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.basis.len() != self.rank {
            return Err(Error::validation(format!(
                "rank is {} but the basis has {} vectors",
                self.rank,
                self.basis.len()
            )));
        }
        if self.basis.iter().any(|c| c.len() != self.dim) {
            return Err(Error::validation(format!("every basis vector must have length {}", self.dim)));
        }
        if self.target.as_ref().is_some_and(|t| t.len() != self.dim) {
            return Err(Error::validation(format!("target must have length {}", self.dim)));
        }
        Ok(())
    }

    pub fn lattice(&self) -> Result<Basis> {
        self.validate()?;
        let columns = self
            .basis
            .iter()
            .map(|c| c.iter().map(Entry::value).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        GenericBasis::new(columns)
    }

    pub fn target_values(&self) -> Result<Option<Vec<BigRational>>> {
        self.target
            .as_ref()
            .map(|t| t.iter().map(Entry::value).collect())
            .transpose()
    }

    pub fn body(&self) -> Result<NormBody<f64>> {
        self.norm.build(self.dim)
    }

    pub fn body_q(&self) -> Result<Option<NormBody<f64>>> {
        self.norm_q.as_ref().map(|q| q.build(self.dim)).transpose()
    }
}

/// Parameters of a random instance family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    /// Entries are uniform in `[−bound, bound]`.
    pub bound: i64,
    pub norm: NormSpec,
    #[serde(default, rename = "normQ", skip_serializing_if = "Option::is_none")]
    pub norm_q: Option<NormSpec>,
    #[serde(default)]
    pub target: bool,
    #[serde(default = "one")]
    pub count: usize,
}

fn one() -> usize {
    1
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.bound < 1 || self.count == 0 {
            return Err(Error::validation("instance specs need n ≥ 1, bound ≥ 1 and count ≥ 1"));
        }
        Ok(())
    }
}

/// Random full-rank integer basis, with an optional target uniform on a
/// grid of the fundamental parallelepiped.
pub fn generate_instance<R: Rng + ?Sized>(spec: &InstanceSpec, id: Option<String>, rng: &mut R) -> Result<Instance> {
    spec.validate()?;
    let n = spec.n;
    for _ in 0..RANK_TRIES {
        let columns: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(-spec.bound..=spec.bound)).collect())
            .collect();
        let Ok(basis) = crate::lattice::basis_from_integers(&columns) else {
            continue;
        };
        let target = spec.target.then(|| {
            let coeffs: Vec<BigRational> = (0..n)
                .map(|_| BigRational::new(rng.random_range(0..TARGET_DENOMINATOR).into(), TARGET_DENOMINATOR.into()))
                .collect();
            (0..n)
                .map(|i| {
                    let v = basis
                        .columns()
                        .iter()
                        .zip(&coeffs)
                        .fold(BigRational::from_integer(0.into()), |acc, (c, u)| acc + &c[i] * u);
                    Entry::from_rational(&v)
                })
                .collect()
        });
        return Ok(Instance {
            id,
            dim: n,
            rank: n,
            basis: columns.iter().map(|c| c.iter().map(|&v| Entry::Int(v)).collect()).collect(),
            target,
            norm: spec.norm.clone(),
            norm_q: spec.norm_q.clone(),
        });
    }
    Err(Error::Failure(format!("no full-rank basis after {RANK_TRIES} tries")))
}
