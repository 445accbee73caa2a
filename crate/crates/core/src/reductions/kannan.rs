//! Kannan's embedding of a CVP instance one dimension up.

use crate::error::{Error, Result};
use crate::lattice::GenericBasis;
use crate::scalar::LatticeScalar;

/// Basis `[B t; 0 h]`: every column of `B` gains a trailing zero and the
/// target enters as a last column with height `h`.
///
/// A vector with last coefficient `k` has last coordinate `k·h` and equals
/// `(Bx + k·t, k·h)`.
pub fn kannan_embed<S: LatticeScalar>(basis: &GenericBasis<S>, target: &[S], height: S) -> Result<GenericBasis<S>> {
    if target.len() != basis.dim() {
        return Err(Error::validation("target dimension does not match basis"));
    }
    if height == S::zero() {
        return Err(Error::validation("embedding height must be nonzero"));
    }
    let mut columns: Vec<Vec<S>> = basis
        .columns()
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.push(S::zero());
            c
        })
        .collect();
    let mut last = target.to_vec();
    last.push(height);
    columns.push(last);
    GenericBasis::from_columns_unchecked(columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn block_layout() {
        let b = GenericBasis::<BigRational>::identity(2);
        let e = kannan_embed(&b, &[q(1, 2), q(1, 2)], q(1, 2)).unwrap();
        assert_eq!(e.column(0), &[q(1, 1), q(0, 1), q(0, 1)]);
        assert_eq!(e.column(1), &[q(0, 1), q(1, 1), q(0, 1)]);
        assert_eq!(e.column(2), &[q(1, 2), q(1, 2), q(1, 2)]);
    }

    #[test]
    fn shifted_vector_is_short() {
        let n = 3;
        let b = GenericBasis::<f64>::identity(n);
        let t = vec![0.4, -0.3, 0.5];
        let h = 1.0 / n as f64;
        let e = kannan_embed(&b, &t, h).unwrap();
        // (t − c, 1/n) with c = 0 uses coefficients (0, 0, 0, 1)
        let s = e.combine(&[0, 0, 0, 1]);
        assert!(norm2(&t) <= 1.0);
        assert!(norm2(&s) <= 1.0 + h);
        assert_eq!(s[n], h);
    }

    #[test]
    fn zero_target_decouples() {
        let b = GenericBasis::<f64>::new(vec![vec![2.0, 1.0], vec![0.0, 3.0]]).unwrap();
        let e = kannan_embed(&b, &[0.0, 0.0], 0.5).unwrap();
        assert_eq!(e.column(2), &[0.0, 0.0, 0.5]);
        assert!(e.columns()[..2].iter().all(|c| c[2] == 0.0));
    }
}
