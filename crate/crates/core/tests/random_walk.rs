use std::collections::BTreeMap;

use fusionwalk::families::{build, finite_catalog, su2_quantum_dims, FamilySpec};
use fusionwalk::fusion::{fp_dimensions, FusionRing};
use fusionwalk::walk::{
    cesaro_mean, convolve, harmonic_space, is_generating, is_symmetric, kernel, sample_endpoints,
    stationary_check, zero_two_diagnostic, Generation, Measure,
};
use fusionwalk::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn catalog() -> Vec<FusionRing> {
    finite_catalog()
        .iter()
        .map(|(_, s)| build(s).unwrap())
        .collect()
}

fn measure_from(ring: &FusionRing, raw: &[f64]) -> Measure {
    let total: f64 = raw.iter().take(ring.len()).sum();
    let weights: BTreeMap<usize, f64> = raw
        .iter()
        .take(ring.len())
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(i, &w)| (i, w / total))
        .collect();
    Measure::new(ring, weights).unwrap()
}

fn raw_weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0], 30)
        .prop_filter("some mass", |v| v.iter().take(2).any(|&w| w > 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn convolution_is_associative(idx in 0usize..17, a in raw_weights(), b in raw_weights(), c in raw_weights()) {
        let rings = catalog();
        let ring = &rings[idx % rings.len()];
        let d = fp_dimensions(ring).unwrap();
        let (l, n, m) = (measure_from(ring, &a), measure_from(ring, &b), measure_from(ring, &c));
        let left = convolve(ring, &d, &convolve(ring, &d, &l, &n).unwrap(), &m).unwrap();
        let right = convolve(ring, &d, &l, &convolve(ring, &d, &n, &m).unwrap()).unwrap();
        for t in 0..ring.len() {
            prop_assert!((left.get(t) - right.get(t)).abs() < 1e-10);
        }
    }

    #[test]
    fn kernels_are_stochastic_and_stationary(idx in 0usize..17, a in raw_weights()) {
        let rings = catalog();
        let ring = &rings[idx % rings.len()];
        let d = fp_dimensions(ring).unwrap();
        let mu = measure_from(ring, &a);
        let k = kernel(ring, &d, &mu).unwrap();
        prop_assert!(k.is_leak_free());
        for s in 0..ring.len() {
            prop_assert!((k.row_sum(s) - 1.0).abs() <= 1e-12);
        }
        prop_assert!(stationary_check(ring, &d, &mu).unwrap() < 1e-10);
    }

    #[test]
    fn cesaro_average_fixes_constants(idx in 0usize..17, a in raw_weights(), c in -5.0f64..5.0) {
        let rings = catalog();
        let ring = &rings[idx % rings.len()];
        let d = fp_dimensions(ring).unwrap();
        let k = kernel(ring, &d, &measure_from(ring, &a)).unwrap();
        for avg in cesaro_mean(&k, &vec![c; ring.len()], &[1, 7, 20]).unwrap() {
            for v in avg.values {
                prop_assert!((v - c).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn symmetric_measures_that_do_not_generate_have_more_harmonic_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut non_generating = 0;
    for ring in catalog() {
        let d = fp_dimensions(&ring).unwrap();
        for _ in 0..40 {
            let mut weights = BTreeMap::new();
            for s in 0..ring.len() {
                if rng.gen_bool(0.3) {
                    let w = rng.gen_range(0.1..1.0);
                    weights.insert(s, w);
                    weights.insert(ring.dual(s), w);
                }
            }
            if weights.is_empty() {
                continue;
            }
            let total: f64 = weights.values().sum();
            weights.values_mut().for_each(|w| *w /= total);
            let mu = Measure::new(&ring, weights).unwrap();
            assert!(is_symmetric(&mu, &ring));
            let dim = harmonic_space(&kernel(&ring, &d, &mu).unwrap())
                .unwrap()
                .dimension();
            match is_generating(&ring, &mu, 64) {
                Generation::No => {
                    non_generating += 1;
                    assert!(dim >= 2, "{mu:?} on a ring of size {}", ring.len());
                }
                Generation::Yes { .. } => assert_eq!(dim, 1),
                Generation::NoWithinDepth => panic!("finite ring must be decided"),
            }
        }
    }
    assert!(non_generating > 0);
}

#[test]
fn symmetry_on_the_free_group() {
    let ring = build(&FamilySpec::FreeGroup { rank: 2, radius: 2 }).unwrap();
    let a = ring.index_of("a").unwrap();
    let a_inv = ring.index_of("A").unwrap();
    assert!(is_symmetric(&Measure::point(ring.unit()), &ring));
    assert!(!is_symmetric(&Measure::point(a), &ring));
    assert!(is_symmetric(&Measure::uniform(&[a, a_inv]), &ring));
}

#[test]
fn half_spin_walk_is_stationary_on_interior_columns() {
    let ring = build(&FamilySpec::Su2Rep { cutoff: 40 }).unwrap();
    let d = su2_quantum_dims(&ring, 1.0).unwrap();
    assert!(stationary_check(&ring, &d, &Measure::point(1)).unwrap() < 1e-10);
    let dq = su2_quantum_dims(&ring, 1.3).unwrap();
    assert!(stationary_check(&ring, &dq, &Measure::point(1)).unwrap() < 1e-10);
}

#[test]
fn zero_two_decays_on_an_aperiodic_chain() {
    let ring = build(&FamilySpec::VerlindeSu2 { level: 2 }).unwrap();
    let d = fp_dimensions(&ring).unwrap();
    let deltas = zero_two_diagnostic(&ring, &d, &Measure::uniform(&[0, 1]), 30, 1).unwrap();
    assert!(deltas.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    assert!(deltas[29] < 1e-3);
    let identity = zero_two_diagnostic(&ring, &d, &Measure::point(0), 5, 1).unwrap();
    assert!(identity.iter().all(|&x| x == 0.0));
}

#[test]
fn harmonic_functions_need_a_finite_ring() {
    let ring = build(&FamilySpec::Su2Rep { cutoff: 10 }).unwrap();
    let d = su2_quantum_dims(&ring, 1.0).unwrap();
    let k = kernel(&ring, &d, &Measure::point(1)).unwrap();
    assert!(matches!(harmonic_space(&k), Err(Error::NotFinite)));
}

#[test]
fn sampled_distributions_match_kernel_powers() {
    let ring = build(&FamilySpec::Su2Rep { cutoff: 10 }).unwrap();
    let d = su2_quantum_dims(&ring, 1.0).unwrap();
    let mu = Measure::from_labels(
        &ring,
        &BTreeMap::from([("1".to_string(), 0.6), ("2".to_string(), 0.4)]),
    )
    .unwrap();
    let k = kernel(&ring, &d, &mu).unwrap();
    let p = k.to_dense();
    let n = ring.len();
    // reachable within three steps stays on rows 0..=6, all complete
    let mut dist = vec![0.0; n];
    dist[0] = 1.0;
    for steps in 1..=3 {
        dist = (0..n)
            .map(|t| (0..n).map(|s| dist[s] * p[s][t]).sum())
            .collect();
        let paths = 100_000;
        let ends = sample_endpoints(&k, 0, steps, paths, 100 + steps as u64).unwrap();
        let mut counts = vec![0usize; n];
        ends.into_iter().for_each(|e| counts[e] += 1);
        let (mut chi2, mut cats) = (0.0, 0);
        for t in 0..n {
            let expected = dist[t] * paths as f64;
            if expected > 0.0 {
                cats += 1;
                chi2 += (counts[t] as f64 - expected).powi(2) / expected;
            } else {
                assert_eq!(counts[t], 0);
            }
        }
        let critical = ChiSquared::new((cats - 1) as f64)
            .unwrap()
            .inverse_cdf(0.999);
        assert!(chi2 <= critical, "{steps} steps: χ² = {chi2} > {critical}");
    }
}
