mod common;

use canoma::caching::{case_distribution, zipf_popularity, Averaging, CacheCase, Catalog};
use canoma::channel::{DoubleNakagamiParams, LinkGeometry};
use canoma::noma_full::{
    chain_probability, success_case, success_case_a, Condition, DecodeChain, FullScenario, Semantics,
};
use canoma::optimizer::{average_noma_success, maximize_1d};
use common::baseline;
use proptest::prelude::*;

proptest! {
    #[test]
    fn case_distribution_sums_to_one(t in 1usize..40, zeta in 0.0f64..3.0, k in 0usize..40) {
        let k = k.min(t);
        let d = case_distribution(&Catalog::new(t, zeta, k).unwrap()).unwrap();
        prop_assert!((d.total() - 1.0).abs() < 1e-12);
        prop_assert!(d.iter().all(|(_, p)| p >= 0.0));
    }

    #[test]
    fn top_pair_mass_grows_with_skew(t in 2usize..30, z1 in 0.0f64..3.0, dz in 0.0f64..1.0) {
        let q = |z: f64| zipf_popularity(&Catalog::new(t, z, 0).unwrap()).unwrap()[0];
        let (a, b) = (q(z1), q(z1 + dz));
        prop_assert!(b * b >= a * a - 1e-15);
    }

    #[test]
    fn joint_never_below_product(
        conds in prop::collection::vec((0.0f64..10.0, 0.0f64..3.0, 0.1f64..3.0, 0.05f64..3.0), 1..5),
        m in 0.5f64..3.0,
        omega in 0.2f64..3.0,
    ) {
        let chain = DecodeChain::new(
            conds.iter().map(|&(s, i, n, g)| Condition::new(s, i, n, g)).collect(),
        ).unwrap();
        let chan = DoubleNakagamiParams::symmetric(m, omega).unwrap();
        let geom = LinkGeometry::unit();
        let joint = chain_probability(&chain, &chan, &geom, Semantics::JointEvent).unwrap();
        let prod = chain_probability(&chain, &chan, &geom, Semantics::PaperProduct).unwrap();
        prop_assert!((0.0..=1.0).contains(&joint) && (0.0..=1.0).contains(&prod));
        prop_assert!(joint >= prod - 1e-12);
    }

    #[test]
    fn golden_section_finds_quadratic_peak(peak in 0.0f64..1.0, curv in 0.1f64..50.0, offset in -1.0f64..1.0) {
        let f = |x: f64| offset - curv * (x - peak) * (x - peak);
        let r = maximize_1d(|x| Ok(f(x)), 0.0, 1.0, 1e-6).unwrap();
        let grid = (0..=1000).map(|i| f(i as f64 / 1000.0)).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(r.value >= grid - 1e-9);
        prop_assert!((r.argmax.first() - peak).abs() < 1e-5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]
    #[test]
    fn joint_never_below_product_many_chains(
        conds in prop::collection::vec((0.0f64..10.0, 0.0f64..3.0, 0.1f64..3.0, 0.05f64..3.0), 2..4),
    ) {
        let chain = DecodeChain::new(
            conds.iter().map(|&(s, i, n, g)| Condition::new(s, i, n, g)).collect(),
        ).unwrap();
        let chan = DoubleNakagamiParams::symmetric(1.0, 2.0).unwrap();
        let geom = LinkGeometry::new(1.0, 2.0).unwrap();
        let joint = chain_probability(&chain, &chan, &geom, Semantics::JointEvent).unwrap();
        let prod = chain_probability(&chain, &chan, &geom, Semantics::PaperProduct).unwrap();
        prop_assert!(joint >= prod - 1e-12);
    }
}

#[test]
fn case_a_marginals_are_monotone_in_alpha() {
    let sc = baseline(Semantics::PaperProduct);
    let vals: Vec<(f64, f64)> = (0..=100).map(|i| success_case_a(i as f64 / 100.0, &sc).unwrap()).collect();
    for w in vals.windows(2) {
        assert!(w[1].0 >= w[0].0 - 1e-15);
        assert!(w[1].1 <= w[0].1 + 1e-15);
    }
}

#[test]
fn success_monotone_in_thresholds_and_power() {
    for sem in [Semantics::PaperProduct, Semantics::JointEvent] {
        let base = baseline(sem);
        for case in CacheCase::FULL_FILE {
            for &alpha in &[0.1, 0.3, 0.45, 0.6, 0.75, 0.9] {
                let at = |sc: &FullScenario<f64>| success_case(case, alpha, sc).unwrap();
                let mut prev = at(&base);
                for &g in &[1.2, 1.5, 2.0, 3.0] {
                    let cur = at(&FullScenario {
                        gamma1: base.gamma1 * g,
                        ..base
                    });
                    assert!(cur.0 <= prev.0 + 1e-12 && cur.1 <= prev.1 + 1e-12, "{case} γ1 α={alpha}");
                    prev = cur;
                }
                let mut prev = at(&base);
                for &g in &[1.2, 1.5, 2.0, 3.0] {
                    let cur = at(&FullScenario {
                        gamma2: base.gamma2 * g,
                        ..base
                    });
                    assert!(cur.0 <= prev.0 + 1e-12 && cur.1 <= prev.1 + 1e-12, "{case} γ2 α={alpha}");
                    prev = cur;
                }
                let mut prev = at(&base);
                for &p in &[12.0, 20.0, 50.0, 100.0] {
                    let cur = at(&FullScenario { power: p, ..base });
                    assert!(cur.0 >= prev.0 - 1e-12 && cur.1 >= prev.1 - 1e-12, "{case} P α={alpha}");
                    prev = cur;
                }
            }
        }
    }
}

#[test]
fn average_success_grows_with_cache() {
    let sc = baseline(Semantics::PaperProduct);
    for averaging in [Averaging::Full, Averaging::CasesOnly] {
        let vals: Vec<f64> = (0..=5)
            .map(|k| average_noma_success(&sc, &Catalog::new(5, 0.5, k).unwrap(), averaging).unwrap())
            .collect();
        for w in vals.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "{averaging:?} {vals:?}");
        }
        assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
