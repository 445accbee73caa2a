use num_bigint::BigInt;
use num_integer::{Integer, ExtendedGcd};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Basis, GenericBasis};
use crate::error::{Error, Result};

/// Hermite normal form of the lattice spanned by integer generator vectors.
///
/// Returns the nonzero HNF rows, i.e. a canonical basis of the generated
/// lattice: an echelon form with positive pivots and entries above each pivot
/// reduced into `[0, pivot)`.
pub fn hermite_normal_form(generators: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let Some(d) = generators.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut rows: Vec<Vec<BigInt>> = generators.to_vec();
    let m = rows.len();
    let mut r = 0;
    for col in 0..d {
        if r == m {
            break;
        }
        for i in r + 1..m {
            if rows[i][col].is_zero() {
                continue;
            }
            if rows[r][col].is_zero() {
                rows.swap(r, i);
                continue;
            }
            let a = rows[r][col].clone();
            let b = rows[i][col].clone();
            let ExtendedGcd { gcd: g, x, y } = a.extended_gcd(&b);
            let (ag, bg) = (&a / &g, &b / &g);
            let (top, bottom): (Vec<BigInt>, Vec<BigInt>) = rows[r]
                .iter()
                .zip(&rows[i])
                .map(|(p, q)| (&x * p + &y * q, &bg * p - &ag * q))
                .unzip();
            rows[r] = top;
            rows[i] = bottom;
        }
        if rows[r][col].is_zero() {
            continue;
        }
        if rows[r][col].is_negative() {
            for v in rows[r].iter_mut() {
                *v = -v.clone();
            }
        }
        let pivot = rows[r][col].clone();
        for i in 0..r {
            let q = rows[i][col].div_floor(&pivot);
            if q.is_zero() {
                continue;
            }
            let pivot_row = rows[r].clone();
            for (v, p) in rows[i].iter_mut().zip(&pivot_row) {
                *v -= &q * p;
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows.retain(|row| row.iter().any(|v| !v.is_zero()));
    rows
}

fn common_denominator<'a>(values: impl Iterator<Item = &'a BigRational>) -> BigInt {
    values.fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

fn integer_columns(columns: &[Vec<BigRational>], scale: &BigInt) -> Vec<Vec<BigInt>> {
    columns
        .iter()
        .map(|c| {
            c.iter()
                .map(|v| (v * BigRational::from_integer(scale.clone())).to_integer())
                .collect()
        })
        .collect()
}

/// Extracts a basis of the lattice generated by possibly dependent rational
/// vectors. Returns the basis and its rank.
pub fn lattice_basis_from_generators(generators: &[Vec<BigRational>]) -> Result<(Basis, usize)> {
    let scale = common_denominator(generators.iter().flatten());
    let hnf = hermite_normal_form(&integer_columns(generators, &scale));
    if hnf.is_empty() {
        return Err(Error::validation("generators span the zero lattice"));
    }
    let inv = BigRational::new(BigInt::one(), scale);
    let columns: Vec<Vec<BigRational>> = hnf
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| BigRational::from_integer(v) * inv.clone())
                .collect()
        })
        .collect();
    let rank = columns.len();
    Ok((GenericBasis::from_columns_unchecked(columns)?, rank))
}

/// Whether two rational bases generate the same lattice (HNF comparison).
pub fn same_lattice(a: &Basis, b: &Basis) -> Result<bool> {
    if a.dim() != b.dim() {
        return Ok(false);
    }
    let scale = common_denominator(a.columns().iter().chain(b.columns()).flatten());
    Ok(hermite_normal_form(&integer_columns(a.columns(), &scale))
        == hermite_normal_form(&integer_columns(b.columns(), &scale)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::basis_from_integers;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    #[test]
    fn hnf_of_dependent_generators() {
        let h = hermite_normal_form(&big(&[&[2, 0], &[0, 2], &[1, 1]]));
        assert_eq!(h, big(&[&[1, 1], &[0, 2]]));
    }

    #[test]
    fn unimodular_change_preserves_lattice() {
        let a = basis_from_integers(&[vec![2, 1], vec![0, 3]]).unwrap();
        let b = basis_from_integers(&[vec![2, 4], vec![4, 5]]).unwrap();
        assert!(same_lattice(&a, &b).unwrap());
        let c = basis_from_integers(&[vec![4, 2], vec![0, 3]]).unwrap();
        assert!(!same_lattice(&a, &c).unwrap());
    }

    #[test]
    fn generators_to_basis() {
        let q = |v: i64| BigRational::from_integer(v.into());
        let gens = vec![vec![q(2), q(0)], vec![q(4), q(0)], vec![q(1), q(0)]];
        let (basis, rank) = lattice_basis_from_generators(&gens).unwrap();
        assert_eq!(rank, 1);
        assert_eq!(basis.column(0), &[q(1), q(0)]);
    }
}
