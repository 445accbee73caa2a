//! Lattice bases and exact preprocessing.

mod gso;
mod hnf;
mod lll;
mod rank;

pub use gso::{gram_schmidt, GsoData};
pub use hnf::{hermite_normal_form, lattice_basis_from_generators, same_lattice};
pub use lll::{lll_reduce, lll_reduce_with_transform, LllResult};
pub use rank::{rank_reduce, RankReduction};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::LatticeScalar;

/// A lattice basis stored as `n` column vectors in dimension `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericBasis<S> {
    columns: Vec<Vec<S>>,
    dim: usize,
}

impl<S: LatticeScalar> GenericBasis<S> {
    /// Builds a basis and checks that the columns are linearly independent.
    pub fn new(columns: Vec<Vec<S>>) -> Result<Self> {
        let basis = Self::from_columns_unchecked(columns)?;
        gram_schmidt(&basis)?;
        Ok(basis)
    }

    /// Builds a basis checking only the shape.
    pub fn from_columns_unchecked(columns: Vec<Vec<S>>) -> Result<Self> {
        let dim = columns
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::validation("basis has no columns"))?;
        if dim == 0 {
            return Err(Error::validation("basis vectors have dimension 0"));
        }
        if columns.iter().any(|c| c.len() != dim) {
            return Err(Error::validation("basis columns have different lengths"));
        }
        if columns.len() > dim {
            return Err(Error::validation(format!(
                "rank {} exceeds dimension {dim}",
                columns.len()
            )));
        }
        Ok(GenericBasis { columns, dim })
    }

    pub fn identity(n: usize) -> Self {
        let columns = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { S::one() } else { S::zero() })
                    .collect()
            })
            .collect();
        GenericBasis { columns, dim: n }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    pub fn column(&self, i: usize) -> &[S] {
        &self.columns[i]
    }

    pub fn columns(&self) -> &[Vec<S>] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<Vec<S>> {
        self.columns
    }

    /// Lattice vector `B·x` for an integer coefficient vector.
    pub fn combine(&self, coeffs: &[i64]) -> Vec<S> {
        assert_eq!(coeffs.len(), self.rank());
        let mut out = vec![S::zero(); self.dim];
        for (col, &c) in self.columns.iter().zip(coeffs) {
            if c == 0 {
                continue;
            }
            let c = S::from_i64(c);
            for (o, v) in out.iter_mut().zip(col) {
                *o = o.clone() + c.clone() * v.clone();
            }
        }
        out
    }

    /// Lattice vector `B·x` for big integer coefficients.
    pub fn combine_big(&self, coeffs: &[BigInt]) -> Vec<S> {
        assert_eq!(coeffs.len(), self.rank());
        let mut out = vec![S::zero(); self.dim];
        for (col, c) in self.columns.iter().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            let c = S::from_bigint(c);
            for (o, v) in out.iter_mut().zip(col) {
                *o = o.clone() + c.clone() * v.clone();
            }
        }
        out
    }

    /// Multiplies every entry by `s`.
    pub fn scaled(&self, s: &S) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn map<T: LatticeScalar>(&self, f: impl Fn(&S) -> T) -> GenericBasis<T> {
        GenericBasis {
            columns: self.columns.iter().map(|c| c.iter().map(&f).collect()).collect(),
            dim: self.dim,
        }
    }

    pub fn to_f64(&self) -> GenericBasis<f64> {
        self.map(|v| v.to_f64())
    }

    /// Columns as `f64` vectors.
    pub fn columns_f64(&self) -> Vec<Vec<f64>> {
        self.columns
            .iter()
            .map(|c| c.iter().map(LatticeScalar::to_f64).collect())
            .collect()
    }

    /// Squared volume of the fundamental parallelepiped (Gram determinant).
    pub fn gram_determinant(&self) -> Result<S> {
        let gso = gram_schmidt(self)?;
        Ok(gso
            .norms
            .iter()
            .fold(S::one(), |acc, v| acc * v.clone()))
    }
}

/// Exact rational basis.
pub type Basis = GenericBasis<BigRational>;

/// Converts integer columns into an exact basis.
pub fn basis_from_integers(columns: &[Vec<i64>]) -> Result<Basis> {
    GenericBasis::new(
        columns
            .iter()
            .map(|c| c.iter().map(|&v| BigRational::from_i64(v)).collect())
            .collect(),
    )
}

/// Converts big integer coefficients to `i64`, failing on overflow.
pub fn coefficients_to_i64(coeffs: &[BigInt]) -> Result<Vec<i64>> {
    coeffs
        .iter()
        .map(|c| {
            c.to_i64()
                .ok_or_else(|| Error::Failure("coefficient exceeds 64-bit range".into()))
        })
        .collect()
}

/// Applies a column transform `U` (columns of integers) to coefficients:
/// returns `U·x`.
pub fn apply_transform(transform: &[Vec<BigInt>], coeffs: &[i64]) -> Vec<BigInt> {
    let n = transform.len();
    let mut out = vec![BigInt::zero(); transform.first().map_or(0, Vec::len)];
    for (col, &c) in transform.iter().zip(coeffs).take(n) {
        if c == 0 {
            continue;
        }
        for (o, u) in out.iter_mut().zip(col) {
            *o += u * c;
        }
    }
    out
}
