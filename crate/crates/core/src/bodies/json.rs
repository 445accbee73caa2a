//! JSON description of norm bodies.

use serde::{Deserialize, Serialize};

use super::NormBody;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// The exponent of an ℓp ball: a number or the string `"inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Number(f64),
    Text(String),
}

impl Exponent {
    pub fn value(&self) -> Result<f64> {
        match self {
            Exponent::Number(p) => Ok(*p),
            Exponent::Text(s) => match s.to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
                other => other
                    .parse()
                    .map_err(|_| Error::validation(format!("invalid exponent {s:?}"))),
            },
        }
    }
}

/// Serializable norm description; the dimension comes from the instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NormSpec {
    Lp {
        p: Exponent,
    },
    Ellipsoid {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
    },
    Polytope {
        facets: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    Cylinder {
        base: Box<NormSpec>,
    },
    Image {
        #[serde(rename = "T")]
        t: Vec<Vec<f64>>,
        base: Box<NormSpec>,
    },
}

impl NormSpec {
    pub fn lp(p: f64) -> Self {
        let p = if p.is_infinite() {
            Exponent::Text("inf".into())
        } else {
            Exponent::Number(p)
        };
        NormSpec::Lp { p }
    }

    pub fn linf() -> Self {
        Self::lp(f64::INFINITY)
    }

    /// Builds the body in dimension `dim`.
    pub fn build<F: Real>(&self, dim: usize) -> Result<NormBody<F>> {
        let matrix = |rows: &[Vec<f64>]| -> Result<Matrix<F>> {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(Error::validation(format!("matrix must be {dim}x{dim}")));
            }
            let rows: Vec<Vec<F>> = rows.iter().map(|r| r.iter().map(|&v| F::c(v)).collect()).collect();
            Ok(Matrix::from_rows(&rows))
        };
        match self {
            NormSpec::Lp { p } => NormBody::lp_ball(dim, F::c(p.value()?)),
            NormSpec::Ellipsoid { a } => NormBody::ellipsoid(matrix(a)?),
            NormSpec::Polytope { facets, offsets } => {
                if facets.iter().any(|f| f.len() != dim) {
                    return Err(Error::validation(format!("facet normals must have length {dim}")));
                }
                NormBody::polytope(
                    facets.iter().map(|f| f.iter().map(|&v| F::c(v)).collect()).collect(),
                    offsets.iter().map(|&v| F::c(v)).collect(),
                )
            }
            NormSpec::Cylinder { base } => {
                if dim < 2 {
                    return Err(Error::validation("a cylinder needs dimension at least 2"));
                }
                Ok(NormBody::cylinder(base.build(dim - 1)?))
            }
            NormSpec::Image { t, base } => NormBody::linear_image(matrix(t)?, base.build(dim)?),
        }
    }

    /// Short label used in tables.
    pub fn label(&self) -> String {
        match self {
            NormSpec::Lp { p } => match p.value() {
                Ok(v) if v.is_infinite() => "linf".into(),
                Ok(v) => format!("l{v}"),
                Err(_) => "lp".into(),
            },
            NormSpec::Ellipsoid { .. } => "ellipsoid".into(),
            NormSpec::Polytope { .. } => "polytope".into(),
            NormSpec::Cylinder { base } => format!("cylinder({})", base.label()),
            NormSpec::Image { base, .. } => format!("image({})", base.label()),
        }
    }
}
