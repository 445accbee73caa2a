use super::GenericBasis;
use crate::error::{Error, Result};
use crate::scalar::LatticeScalar;

/// Gram–Schmidt data of a basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GsoData<S> {
    /// Orthogonal vectors `b*_i`.
    pub bstar: Vec<Vec<S>>,
    /// `mu[i][j] = <b_i, b*_j> / <b*_j, b*_j>` for `j < i`.
    pub mu: Vec<Vec<S>>,
    /// Squared norms `‖b*_i‖²`.
    pub norms: Vec<S>,
}

pub(crate) fn inner<S: LatticeScalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Gram–Schmidt orthogonalization without normalization.
///
/// Fails with [`Error::RankDeficient`] when a column lies in the span of the
/// previous ones.
pub fn gram_schmidt<S: LatticeScalar>(basis: &GenericBasis<S>) -> Result<GsoData<S>> {
    let n = basis.rank();
    let mut bstar: Vec<Vec<S>> = Vec::with_capacity(n);
    let mut mu = vec![vec![S::zero(); n]; n];
    let mut norms: Vec<S> = Vec::with_capacity(n);
    for i in 0..n {
        let bi = basis.column(i);
        let mut v = bi.to_vec();
        for j in 0..i {
            let m = inner(bi, &bstar[j]) / norms[j].clone();
            for (vk, bk) in v.iter_mut().zip(&bstar[j]) {
                *vk = vk.clone() - m.clone() * bk.clone();
            }
            mu[i][j] = m;
        }
        mu[i][i] = S::one();
        let nv = inner(&v, &v);
        if nv.negligible(&inner(bi, bi)) {
            return Err(Error::RankDeficient { index: i });
        }
        norms.push(nv);
        bstar.push(v);
    }
    Ok(GsoData { bstar, mu, norms })
}
