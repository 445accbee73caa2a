//! Retention statistics and exact coset structure of the sparsifier.

use latnorm::lattice::basis_from_integers;
use latnorm::rng::stream;
use latnorm::sparsify::{retention_bound, sparsify, SparsifiedCoset};
use latnorm::{Basis, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

fn random_basis(n: usize, seed: u64) -> Basis {
    let mut rng = stream(seed, &[]);
    loop {
        let cols: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-4..=4)).collect()).collect();
        if let Ok(b) = basis_from_integers(&cols) {
            return b;
        }
    }
}

#[test]
fn retention_meets_the_bound() {
    let draws = 10_000;
    for n in [3usize, 4] {
        let basis = random_basis(n, 50 + n as u64);
        for p in [5u64, 11] {
            for count in [0usize, 1, 3] {
                let mut rng = stream(51, &[n as u64, p, count as u64]);
                let w: Vec<i64> = (0..n).map(|_| rng.random_range(-9..=9)).collect();
                // v_i − w must not vanish mod p
                let mut others = Vec::new();
                while others.len() < count {
                    let v: Vec<i64> = (0..n).map(|_| rng.random_range(-9..=9)).collect();
                    if v.iter().zip(&w).any(|(a, b)| (a - b).rem_euclid(p as i64) != 0) {
                        others.push(v);
                    }
                }
                let mut kept = 0usize;
                for _ in 0..draws {
                    let coset = sparsify(&basis, p, &mut rng).unwrap();
                    if coset.contains(&w) && !others.iter().any(|v| coset.contains(v)) {
                        kept += 1;
                    }
                }
                let q = kept as f64 / draws as f64;
                let slack = 4.0 * (q * (1.0 - q) / draws as f64).sqrt();
                let bound = retention_bound(p, count, n);
                assert!(q >= bound - slack, "n={n} p={p} N={count}: {q} < {bound} − {slack}");
            }
        }
    }
}

/// Whether `x − shift` solves `H y = x − shift` over the integers, by exact
/// rational elimination on the sublattice coefficient matrix `H`.
fn in_coset_exact(coset: &SparsifiedCoset<Rational>, x: &[i64]) -> bool {
    let n = x.len();
    let h = &coset.sublattice_coefficients;
    let mut rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut r: Vec<Rational> = h.iter().map(|col| Rational::from_integer(col[i].into())).collect();
            r.push(Rational::from_integer((x[i] - coset.shift_coefficients[i]).into()));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !rows[r][c].is_zero()).expect("sublattice has full rank");
        rows.swap(c, piv);
        let inv = Rational::one() / rows[c][c].clone();
        for v in rows[c].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != c && !rows[r][c].is_zero() {
                let f = rows[r][c].clone();
                for k in 0..=n {
                    let sub = &f * &rows[c][k];
                    rows[r][k] = &rows[r][k] - sub;
                }
            }
        }
    }
    rows.iter().all(|r| r[n].is_integer())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn congruence_matches_exact_membership(
        seed in 0u64..10_000,
        n in 2usize..=4,
        p in prop_oneof![Just(5u64), Just(7), Just(11)],
        x in proptest::collection::vec(-20i64..=20, 4),
    ) {
        let basis = random_basis(n, seed);
        let coset = sparsify(&basis, p, &mut stream(seed, &[1])).unwrap();
        prop_assert_eq!(coset.contains(&x[..n]), in_coset_exact(&coset, &x[..n]));
    }

    #[test]
    fn differences_of_coset_points_lie_in_the_sublattice(
        seed in 0u64..10_000,
        vs in proptest::collection::vec(proptest::collection::vec(-30i64..=30, 3), 2..40),
    ) {
        let basis = random_basis(3, seed);
        let coset = sparsify(&basis, 5, &mut stream(seed, &[2])).unwrap();
        let inside: Vec<&Vec<i64>> = vs.iter().filter(|v| coset.contains(v)).collect();
        for a in &inside {
            for b in &inside {
                let d: Vec<i64> = a.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
                prop_assert!(coset.in_sublattice(&d));
            }
        }
    }
}
