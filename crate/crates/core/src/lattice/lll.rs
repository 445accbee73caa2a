use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::gso::{gram_schmidt, inner};
use super::GenericBasis;
use crate::error::{Error, Result};
use crate::scalar::LatticeScalar;

/// Output of LLL reduction.
#[derive(Clone, Debug)]
pub struct LllResult<S> {
    pub basis: GenericBasis<S>,
    /// Column `j` holds the integer coefficients of reduced vector `j` in the
    /// input basis.
    pub transform: Vec<Vec<BigInt>>,
    pub swaps: usize,
}

/// LLL-reduces `basis` with Lovász parameter `delta`.
pub fn lll_reduce<S: LatticeScalar>(basis: &GenericBasis<S>, delta: S) -> Result<GenericBasis<S>> {
    lll_reduce_with_transform(basis, delta).map(|r| r.basis)
}

/// LLL reduction that also returns the unimodular transform.
pub fn lll_reduce_with_transform<S: LatticeScalar>(
    basis: &GenericBasis<S>,
    delta: S,
) -> Result<LllResult<S>> {
    let quarter = S::one() / S::from_i64(4);
    if !(delta > quarter && delta < S::one()) {
        return Err(Error::validation("LLL delta must lie in (1/4, 1)"));
    }
    let n = basis.rank();
    let mut result = lll_pass(basis, &delta, identity_transform(n))?;
    if !S::EXACT {
        // Incremental float updates can drift; re-run until the conditions
        // hold on a freshly computed GSO.
        for _ in 0..8 {
            if is_lll_reduced(&result.basis, &delta)? {
                break;
            }
            let next = lll_pass(&result.basis, &delta, result.transform.clone())?;
            result = LllResult {
                swaps: result.swaps + next.swaps,
                ..next
            };
        }
    }
    Ok(result)
}

fn identity_transform(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// Checks size reduction (|μ| ≤ 1/2 up to rounding) and the Lovász condition.
pub(crate) fn is_lll_reduced<S: LatticeScalar>(basis: &GenericBasis<S>, delta: &S) -> Result<bool> {
    let g = gram_schmidt(basis)?;
    let half = S::one() / S::from_i64(2);
    let slack = if S::EXACT { S::zero() } else { S::from_f64(1e-9).unwrap() };
    for i in 1..basis.rank() {
        for j in 0..i {
            if g.mu[i][j].abs() > half.clone() + slack.clone() {
                return Ok(false);
            }
        }
        let m = g.mu[i][i - 1].clone();
        let lhs = g.norms[i].clone();
        let rhs = (delta.clone() - m.clone() * m) * g.norms[i - 1].clone();
        if lhs < rhs.clone() - slack.clone() * rhs.abs() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn lll_pass<S: LatticeScalar>(
    basis: &GenericBasis<S>,
    delta: &S,
    mut u: Vec<Vec<BigInt>>,
) -> Result<LllResult<S>> {
    let n = basis.rank();
    let mut b: Vec<Vec<S>> = basis.columns().to_vec();
    let mut bstar: Vec<Vec<S>> = vec![Vec::new(); n];
    let mut mu = vec![vec![S::zero(); n]; n];
    let mut bn = vec![S::zero(); n];
    let mut swaps = 0usize;

    bstar[0] = b[0].clone();
    bn[0] = inner(&b[0], &b[0]);
    if bn[0] == S::zero() {
        return Err(Error::RankDeficient { index: 0 });
    }
    if n == 1 {
        return Ok(LllResult {
            basis: GenericBasis::from_columns_unchecked(b)?,
            transform: u,
            swaps,
        });
    }

    let mut k = 1usize;
    let mut kmax = 0usize;
    let half = S::one() / S::from_i64(2);

    while k < n {
        if k > kmax {
            kmax = k;
            let mut v = b[k].clone();
            for j in 0..k {
                let m = inner(&b[k], &bstar[j]) / bn[j].clone();
                for (vi, bj) in v.iter_mut().zip(&bstar[j]) {
                    *vi = vi.clone() - m.clone() * bj.clone();
                }
                mu[k][j] = m;
            }
            let nv = inner(&v, &v);
            if nv.negligible(&inner(&b[k], &b[k])) {
                return Err(Error::RankDeficient { index: k });
            }
            bn[k] = nv;
            bstar[k] = v;
        }

        size_reduce(k, k - 1, &mut b, &mut u, &mut mu, &half);
        let m = mu[k][k - 1].clone();
        if bn[k] < (delta.clone() - m.clone() * m) * bn[k - 1].clone() {
            swap(k, kmax, &mut b, &mut u, &mut mu, &mut bstar, &mut bn);
            swaps += 1;
            k = (k - 1).max(1);
        } else {
            for l in (0..k.saturating_sub(1)).rev() {
                size_reduce(k, l, &mut b, &mut u, &mut mu, &half);
            }
            k += 1;
        }
    }
    Ok(LllResult {
        basis: GenericBasis::from_columns_unchecked(b)?,
        transform: u,
        swaps,
    })
}

fn size_reduce<S: LatticeScalar>(
    k: usize,
    l: usize,
    b: &mut [Vec<S>],
    u: &mut [Vec<BigInt>],
    mu: &mut [Vec<S>],
    half: &S,
) {
    if mu[k][l].abs() <= *half {
        return;
    }
    let q = mu[k][l].round_int();
    if q.is_zero() {
        return;
    }
    let qs = S::from_bigint(&q);
    let bl = b[l].clone();
    for (x, y) in b[k].iter_mut().zip(&bl) {
        *x = x.clone() - qs.clone() * y.clone();
    }
    let ul = u[l].clone();
    for (x, y) in u[k].iter_mut().zip(&ul) {
        *x -= &q * y;
    }
    mu[k][l] = mu[k][l].clone() - qs.clone();
    for i in 0..l {
        mu[k][i] = mu[k][i].clone() - qs.clone() * mu[l][i].clone();
    }
}

fn swap<S: LatticeScalar>(
    k: usize,
    kmax: usize,
    b: &mut [Vec<S>],
    u: &mut [Vec<BigInt>],
    mu: &mut [Vec<S>],
    bstar: &mut [Vec<S>],
    bn: &mut [S],
) {
    b.swap(k, k - 1);
    u.swap(k, k - 1);
    for j in 0..k.saturating_sub(1) {
        let t = mu[k][j].clone();
        mu[k][j] = mu[k - 1][j].clone();
        mu[k - 1][j] = t;
    }
    let m = mu[k][k - 1].clone();
    let big = bn[k].clone() + m.clone() * m.clone() * bn[k - 1].clone();
    let new_mu = m.clone() * bn[k - 1].clone() / big.clone();
    let old_prev = bstar[k - 1].clone();
    let old_k = bstar[k].clone();
    bstar[k - 1] = old_k
        .iter()
        .zip(&old_prev)
        .map(|(x, y)| x.clone() + m.clone() * y.clone())
        .collect();
    let ratio = bn[k].clone() / big.clone();
    bstar[k] = old_k
        .iter()
        .zip(&old_prev)
        .map(|(x, y)| -(new_mu.clone() * x.clone()) + ratio.clone() * y.clone())
        .collect();
    bn[k] = bn[k - 1].clone() * bn[k].clone() / big.clone();
    bn[k - 1] = big;
    mu[k][k - 1] = new_mu.clone();
    for i in k + 1..=kmax {
        let t = mu[i][k].clone();
        mu[i][k] = mu[i][k - 1].clone() - m.clone() * t.clone();
        mu[i][k - 1] = t + new_mu.clone() * mu[i][k].clone();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{basis_from_integers, same_lattice, Basis};
    use num_rational::BigRational;

    fn delta() -> BigRational {
        BigRational::new(99.into(), 100.into())
    }

    #[test]
    fn identity_is_fixed() {
        let b = Basis::identity(3);
        assert_eq!(lll_reduce(&b, delta()).unwrap(), b);
    }

    #[test]
    fn reduces_skewed_pair() {
        let b = basis_from_integers(&[vec![1, 0], vec![10, 1]]).unwrap();
        let r = lll_reduce_with_transform(&b, delta()).unwrap();
        let first = r.basis.column(0);
        assert_eq!(inner(first, first), BigRational::from_i64(1));
        assert!(is_lll_reduced(&r.basis, &delta()).unwrap());
        assert!(same_lattice(&b, &r.basis).unwrap());
        for (j, col) in r.transform.iter().enumerate() {
            assert_eq!(b.combine_big(col), r.basis.column(j).to_vec());
        }
    }

    #[test]
    fn float_reduction_matches_exact_lengths() {
        let cols = vec![vec![3, 1, 4], vec![1, 5, 9], vec![2, 6, 5]];
        let exact = lll_reduce(&basis_from_integers(&cols).unwrap(), delta()).unwrap();
        let float = lll_reduce(&basis_from_integers(&cols).unwrap().to_f64(), 0.99).unwrap();
        let e: f64 = exact.columns_f64()[0].iter().map(|x| x * x).sum();
        let f: f64 = float.column(0).iter().map(|x| x * x).sum();
        assert!((e - f).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_delta() {
        let b = Basis::identity(2);
        assert!(lll_reduce(&b, BigRational::from_i64(1)).is_err());
    }
}
