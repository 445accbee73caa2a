//! Invariants of the reductions on small random lattices.

use latnorm::harness::{generate_instance, run_instance, Instance, InstanceSpec};
use latnorm::reductions::{Mode, ReductionConfig, Trace};
use latnorm::rng::stream;
use latnorm::NormSpec;
use proptest::prelude::*;

fn instance(n: usize, p: f64, seed: u64) -> Instance {
    let spec = InstanceSpec {
        n,
        bound: 4,
        norm: NormSpec::lp(p),
        norm_q: Some(NormSpec::lp(1.0)),
        target: true,
        count: 1,
    };
    generate_instance(&spec, None, &mut stream(seed, &[])).unwrap()
}

/// Few repetitions suffice for the SVP reductions at these ranks; the CVP
/// sieve keeps its default sample budget.
fn config(seed: u64, mode: Mode) -> ReductionConfig {
    ReductionConfig {
        seed,
        repetition_budget: mode.is_svp().then_some(4),
        ..Default::default()
    }
}

fn combine(inst: &Instance, c: &[i64]) -> Vec<f64> {
    let cols = inst.lattice().unwrap().columns_f64();
    (0..inst.dim).map(|i| cols.iter().zip(c).map(|(b, &x)| b[i] * x as f64).sum()).collect()
}

fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::SvpCvp2), Just(Mode::SvpCvpQ), Just(Mode::CvpSieve2)]
}

fn norm_p() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), Just(3.0), Just(f64::INFINITY)]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn reductions_are_sound(n in 2usize..=4, p in norm_p(), m in mode(), iseed in 0u64..1000, seed in 0u64..1000) {
        let inst = instance(n, p, iseed);
        let r = run_instance(&inst, m, &config(seed, m)).unwrap();
        // the answer is the lattice combination of its coefficients
        let v = combine(&inst, &r.coefficients);
        for (a, b) in v.iter().zip(&r.vector) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
        if m.is_svp() {
            prop_assert!(r.coefficients.iter().any(|&c| c != 0));
        }
        let f = r.achieved_factor.unwrap();
        prop_assert!(f >= 1.0 - 1e-9, "factor {} below one", f);
        prop_assert!(r.value >= r.optimum.unwrap() - 1e-9);
    }

    #[test]
    fn oracle_answers_pass_the_triangle_gate(n in 2usize..=4, p in norm_p(), q in any::<bool>(), iseed in 0u64..1000, seed in 0u64..1000) {
        let inst = instance(n, p, iseed);
        let m = if q { Mode::SvpCvpQ } else { Mode::SvpCvp2 };
        let r = run_instance(&inst, m, &config(seed, m)).unwrap();
        let Trace::Svp(trace) = &r.trace else { panic!("SVP run without an SVP trace") };
        // the oracle norm of the target: ℓ₂ here, ℓ₁ for the Q runs
        let q_norm = |t: &[f64]| -> f64 {
            if q { t.iter().map(|v| v.abs()).sum() } else { t.iter().map(|v| v * v).sum::<f64>().sqrt() }
        };
        for g in &trace.grid_points {
            let reach = q_norm(&g.target);
            for step in &g.steps {
                prop_assert!(step.in_coset);
                prop_assert!(step.answer_length <= step.oracle_distance + reach + 1e-9 * (1.0 + reach));
            }
        }
    }

    #[test]
    fn reductions_are_deterministic(n in 2usize..=3, m in prop_oneof![mode(), Just(Mode::CvpSieveQ)], iseed in 0u64..1000, seed in 0u64..1000) {
        let inst = instance(n, f64::INFINITY, iseed);
        let a = run_instance(&inst, m, &config(seed, m)).unwrap();
        let b = run_instance(&inst, m, &config(seed, m)).unwrap();
        prop_assert_eq!(&a.trace_digest, &b.trace_digest);
        prop_assert_eq!(a.coefficients, b.coefficients);
    }
}

/// Sparsifying this basis yields a sublattice whose last Gram–Schmidt
/// vector is short relative to its column; it must not read as dependent.
#[test]
fn skewed_sublattice_is_full_rank() {
    let inst = instance(4, 1.0, 642);
    for seed in 0..3 {
        let r = run_instance(&inst, Mode::SvpCvp2, &config(seed, Mode::SvpCvp2)).unwrap();
        assert!((r.value - r.optimum.unwrap()).abs() < 1e-9);
    }
}
