//! Mod-p sparsification: random shifted sublattices of index `p`.
//!
//! Everything happens in coefficient space. For `v = Bx` the coset
//! `u + L′` is `{Bx : ⟨z, x⟩ ≡ c (mod p)}`, so membership is a single integer
//! congruence.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{hermite_normal_form, GenericBasis};
use crate::scalar::LatticeScalar;

/// Default floor for the sparsification prime.
pub const DEFAULT_P_MIN: u64 = 11;

/// A shifted sublattice `u + L′` with `L′ = {Bx : ⟨z, x⟩ ≡ 0 (mod p)}`.
#[derive(Clone, Debug, Serialize)]
pub struct SparsifiedCoset<S> {
    pub p: u64,
    pub z: Vec<u64>,
    pub c: u64,
    /// Coefficients of the shift `u` in the parent basis.
    pub shift_coefficients: Vec<i64>,
    pub shift: Vec<S>,
    /// Columns of the sublattice basis as parent-basis coefficient vectors
    /// (Hermite normal form of the congruence kernel).
    pub sublattice_coefficients: Vec<Vec<i64>>,
    #[serde(skip)]
    pub sublattice_basis: GenericBasis<S>,
}

impl<S: LatticeScalar> SparsifiedCoset<S> {
    /// Residue `⟨z, x⟩ mod p` of a coefficient vector.
    pub fn residue(&self, x: &[i64]) -> u64 {
        let p = self.p as i128;
        let s = self
            .z
            .iter()
            .zip(x)
            .fold(0i128, |acc, (&zi, &xi)| (acc + zi as i128 * (xi as i128).rem_euclid(p)) % p);
        s as u64
    }

    /// Whether `Bx ∈ u + L′`.
    pub fn contains(&self, x: &[i64]) -> bool {
        self.residue(x) == self.c
    }

    /// Whether `Bx ∈ L′`.
    pub fn in_sublattice(&self, x: &[i64]) -> bool {
        self.residue(x) == 0
    }

    /// Maps sublattice coefficients `y` to parent coefficients.
    pub fn lift_coefficients(&self, y: &[i64]) -> Vec<i64> {
        let n = self.z.len();
        let mut x = vec![0i64; n];
        for (col, &yi) in self.sublattice_coefficients.iter().zip(y) {
            for (xk, &ck) in x.iter_mut().zip(col) {
                *xk += ck * yi;
            }
        }
        x
    }

    /// A short identifier of the coset, used in traces.
    pub fn id(&self) -> String {
        let z: Vec<String> = self.z.iter().map(u64::to_string).collect();
        format!("p{}:z{}:c{}", self.p, z.join("."), self.c)
    }
}

/// Samples `z` uniform in `Z_pⁿ ∖ {0}` and `c` uniform in `Z_p`.
pub fn sparsify<S: LatticeScalar, R: Rng + ?Sized>(
    basis: &GenericBasis<S>,
    p: u64,
    rng: &mut R,
) -> Result<SparsifiedCoset<S>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n = basis.rank();
    let z = loop {
        let z: Vec<u64> = (0..n).map(|_| rng.random_range(0..p)).collect();
        if z.iter().any(|&v| v != 0) {
            break z;
        }
    };
    let c = rng.random_range(0..p);
    coset_from(basis, p, z, c)
}

/// Builds the coset for explicit `(p, z, c)`.
pub fn coset_from<S: LatticeScalar>(
    basis: &GenericBasis<S>,
    p: u64,
    z: Vec<u64>,
    c: u64,
) -> Result<SparsifiedCoset<S>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n = basis.rank();
    if z.len() != n || c >= p || z.iter().any(|&v| v >= p) {
        return Err(Error::validation("z and c must be reduced residues of matching length"));
    }
    let k = z
        .iter()
        .position(|&v| v != 0)
        .ok_or_else(|| Error::validation("z must be nonzero mod p"))?;
    let zk_inv = mod_inverse(z[k], p);

    // Kernel generators: p·e_k and e_j − (z_j / z_k)·e_k.
    let mut generators: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut g = vec![BigInt::zero(); n];
        if j == k {
            g[k] = BigInt::from(p);
        } else {
            g[j] = BigInt::one();
            g[k] = -BigInt::from(mul_mod(z[j], zk_inv, p));
        }
        generators.push(g);
    }
    let hnf = hermite_normal_form(&generators);
    let sublattice_coefficients: Vec<Vec<i64>> = hnf
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| i64::try_from(v).map_err(|_| Error::validation("sublattice coefficient overflow")))
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<_>>()?;
    let columns: Vec<Vec<S>> = hnf.iter().map(|row| basis.combine_big(row)).collect();
    let sublattice_basis = GenericBasis::from_columns_unchecked(columns)?;

    let mut shift_coefficients = vec![0i64; n];
    shift_coefficients[k] = mul_mod(c, zk_inv, p) as i64;
    let shift = basis.combine(&shift_coefficients);
    Ok(SparsifiedCoset {
        p,
        z,
        c,
        shift_coefficients,
        shift,
        sublattice_coefficients,
        sublattice_basis,
    })
}

/// Lower bound `1/p − N/p² − N/pⁿ` on retaining `w` while deleting `N`
/// given vectors. May be negative.
pub fn retention_bound(p: u64, count: usize, n: usize) -> f64 {
    let p = p as f64;
    let big_n = count as f64;
    1.0 / p - big_n / (p * p) - big_n / p.powi(n as i32)
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime `≥ m`.
pub fn next_prime(m: u64) -> u64 {
    let mut q = m.max(2);
    while !is_prime(q) {
        q += 1;
    }
    q
}

/// `next_prime(max(⌈2^{exponent·ε·n}⌉, p_min))`.
pub fn choose_prime(exponent: f64, epsilon: f64, n: usize, p_min: u64) -> u64 {
    let target = (exponent * epsilon * n as f64).exp2().ceil();
    let target = if target.is_finite() && target < 1e15 {
        target as u64
    } else {
        1_000_000_000_000_000
    };
    next_prime(target.max(p_min))
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat: a^{p−2} mod p
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(result, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::basis_from_integers;
    use crate::rng::stream;
    use num_rational::BigRational;

    #[test]
    fn membership_by_congruence() {
        let b = basis_from_integers(&[vec![1, 0], vec![0, 1]]).unwrap();
        let coset = coset_from(&b, 3, vec![1, 2], 1).unwrap();
        assert!(coset.contains(&[1, 0]));
        assert!(!coset.contains(&[0, 0]));
        assert!(coset.contains(&coset.shift_coefficients));
    }

    #[test]
    fn sublattice_has_index_p() {
        let b = basis_from_integers(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, -1, 4]]).unwrap();
        let det = b.gram_determinant().unwrap();
        let mut rng = stream(9, &[]);
        for _ in 0..20 {
            let coset = sparsify(&b, 5, &mut rng).unwrap();
            let sub = coset.sublattice_basis.gram_determinant().unwrap();
            assert_eq!(sub, det.clone() * BigRational::from_integer(25.into()));
            for col in &coset.sublattice_coefficients {
                assert!(coset.in_sublattice(col));
            }
        }
    }

    #[test]
    fn rejects_composite() {
        let b = basis_from_integers(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(matches!(sparsify(&b, 6, &mut stream(0, &[])), Err(Error::NotPrime(6))));
    }

    #[test]
    fn bound_formula() {
        assert!((retention_bound(5, 0, 4) - 0.2).abs() < 1e-15);
        assert!((retention_bound(5, 2, 4) - 0.1168).abs() < 1e-15);
        // 1/2 − 10/4 − 10/4
        assert!((retention_bound(2, 10, 2) + 4.5).abs() < 1e-15);
    }

    #[test]
    fn prime_helpers() {
        assert_eq!(next_prime(11), 11);
        assert_eq!(next_prime(12), 13);
        assert_eq!(choose_prime(3.0, 0.1, 4, 11), 11);
        assert_eq!(choose_prime(3.0, 1.0, 4, 11), 4099);
        assert_eq!(mul_mod(mod_inverse(7, 13), 7, 13), 1);
    }
}
