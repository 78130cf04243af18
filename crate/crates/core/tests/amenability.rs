use fusionwalk::amenability::{
    amenability_verdict, default_schedule, free_group_benchmark, gamma_norm_lower, truncated_gamma,
    weak_amenability_probe, IterationOptions, ProbeTest, VerdictKind, VerdictOptions,
};
use fusionwalk::families::{build, su2_quantum_dims, FamilySpec};
use fusionwalk::fusion::{Combination, DimensionFunction};
use fusionwalk::walk::Measure;
use nalgebra::DMatrix;

/// Norm of `Γ_S` on the radius-`r` ball of the 4-regular tree, restricted to
/// radial vectors: a `(r+2) × (r+1)` tridiagonal matrix in sphere-normalized
/// coordinates. The Perron vector of each parity class is radial, so this is
/// the full norm.
fn radial_ball_norm(radius: usize) -> f64 {
    let mut m = DMatrix::zeros(radius + 2, radius + 1);
    for n in 0..=radius {
        let up = if n == 0 { 2.0 } else { 3f64.sqrt() };
        m[(n + 1, n)] = up;
        if n > 0 {
            let down = if n == 1 { 2.0 } else { 3f64.sqrt() };
            m[(n - 1, n)] = down;
        }
    }
    m.svd(false, false).singular_values.max()
}

#[test]
fn free_group_benchmark_matches_radial_oracle() {
    let opts = IterationOptions {
        tol: 1e-14,
        max_iter: 200_000,
    };
    for radius in [4, 6, 8] {
        let cert = free_group_benchmark(2, radius, opts).unwrap();
        let oracle = radial_ball_norm(radius);
        assert!(
            (cert.lower_bound - oracle).abs() < 1e-6,
            "radius {radius}: {} vs {oracle}",
            cert.lower_bound
        );
        assert!(cert.lower_bound < 2.0 * 3f64.sqrt());
        assert!(4.0 - cert.lower_bound > 0.5);
    }
}

#[test]
fn radial_oracle_approaches_the_spectral_radius_slowly() {
    let target = 2.0 * 3f64.sqrt();
    let values: Vec<f64> = [4, 8, 12, 16, 32, 64, 400]
        .iter()
        .map(|&r| radial_ball_norm(r))
        .collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]));
    assert!(values.iter().all(|&v| v < target));
    assert!((values[6] - target).abs() < 1e-3);
    // radius 12 stays below 3.45, radius 32 clears it
    assert!(values[2] < 3.45 && values[4] > 3.45);
}

#[test]
fn rank_one_benchmark_tends_to_two() {
    let cert = free_group_benchmark(1, 400, IterationOptions::default()).unwrap();
    assert!(cert.lower_bound > 1.999 && cert.lower_bound <= 2.0);
}

#[test]
fn witness_reproduces_the_bound() {
    let ring = build(&FamilySpec::Su2Rep { cutoff: 64 }).unwrap();
    let object = Combination::basis(2);
    let cert = gamma_norm_lower(&ring, &object, 60, IterationOptions::default()).unwrap();
    let op = truncated_gamma(&ring, &object, 60).unwrap();
    let stretch = op.stretch(&cert.witness);
    assert!((stretch - cert.lower_bound).abs() <= 1e-12 * cert.lower_bound);
    let unit: f64 = cert.witness.iter().map(|x| x * x).sum();
    assert!((unit - 1.0).abs() < 1e-12);
}

#[test]
fn schedule_bounds_are_monotone() {
    let ring = build(&FamilySpec::Su2Rep { cutoff: 600 }).unwrap();
    let d = su2_quantum_dims(&ring, 1.8).unwrap();
    let opts = VerdictOptions {
        movement_tol: 0.0,
        ..VerdictOptions::default()
    };
    let v = amenability_verdict(
        &ring,
        &d,
        &Combination::basis(1),
        &default_schedule(599),
        opts,
    )
    .unwrap();
    assert_eq!(v.steps.len(), default_schedule(599).len());
    for w in v.steps.windows(2) {
        assert!(w[0].lower_bound <= w[1].lower_bound + 1e-12);
    }
    assert_eq!(v.kind, VerdictKind::Inconclusive);
}

#[test]
fn quantum_dimension_gap_is_certified() {
    for (q, cutoff) in [(1.5f64, 1025), (2.0, 1000)] {
        let ring = build(&FamilySpec::Su2Rep { cutoff }).unwrap();
        let d = su2_quantum_dims(&ring, q).unwrap();
        let schedule = default_schedule(cutoff - 1);
        let v = amenability_verdict(
            &ring,
            &d,
            &Combination::basis(1),
            &schedule,
            VerdictOptions::default(),
        )
        .unwrap();
        match v.kind {
            VerdictKind::NonamenableCertificate { gap } => {
                assert!((gap - (q + 1.0 / q - 2.0)).abs() < 2e-3)
            }
            other => panic!("q = {q}: {other:?} {:?}", v.steps),
        }
    }
}

#[test]
fn overflowing_quantum_dimensions_are_rejected() {
    let ring = build(&FamilySpec::Su2Rep { cutoff: 1025 }).unwrap();
    assert!(
        su2_quantum_dims(&ring, 2.0).is_err() || {
            let d = su2_quantum_dims(&ring, 2.0).unwrap();
            amenability_verdict(
                &ring,
                &d,
                &Combination::basis(1),
                &[8],
                VerdictOptions::default(),
            )
            .is_err()
        }
    );
}

#[test]
fn finite_probe_differences_vanish() {
    let ring = build(&FamilySpec::VerlindeSu2 { level: 4 }).unwrap();
    let d = fusionwalk::fusion::fp_dimensions(&ring).unwrap();
    let all: Vec<usize> = (0..ring.len()).collect();
    let mut f = vec![0.0; ring.len()];
    f[0] = 1.0;
    let rows = weak_amenability_probe(
        &ring,
        &d,
        &Measure::uniform(&all),
        &[ProbeTest { generator: 1, f }],
        &[10, 100, 1000],
    )
    .unwrap();
    assert!(rows[2].abs_diff < rows[0].abs_diff);
    assert!(rows[2].abs_diff < 2e-3, "{rows:?}");
    assert!((rows[1].abs_diff / rows[2].abs_diff - 10.0).abs() < 0.1);
}

#[test]
fn integer_lattice_probe_differences_vanish() {
    let ring = build(&FamilySpec::IntegerLattice {
        rank: 1,
        window: 1000,
    })
    .unwrap();
    let d = DimensionFunction::constant(&ring, 1.0);
    let (zero, one, minus) = (
        ring.index_of("0").unwrap(),
        ring.index_of("1").unwrap(),
        ring.index_of("-1").unwrap(),
    );
    let mu = Measure::new(
        &ring,
        [(zero, 0.5), (one, 0.25), (minus, 0.25)]
            .into_iter()
            .collect(),
    )
    .unwrap();
    let mut f = vec![0.0; ring.len()];
    f[zero] = 1.0;
    let rows = weak_amenability_probe(
        &ring,
        &d,
        &mu,
        &[ProbeTest { generator: one, f }],
        &[10, 100, 400],
    )
    .unwrap();
    assert!(rows[2].rel_diff < rows[0].rel_diff);
    assert!(rows[2].rel_diff < 0.1);
}

#[test]
fn free_group_probe_differences_persist() {
    let ring = build(&FamilySpec::FreeGroup { rank: 2, radius: 8 }).unwrap();
    let d = DimensionFunction::constant(&ring, 1.0);
    let e = ring.unit();
    let gens: Vec<usize> = ["a", "A", "b", "B"]
        .iter()
        .map(|l| ring.index_of(l).unwrap())
        .collect();
    let mut weights: std::collections::BTreeMap<usize, f64> =
        gens.iter().map(|&g| (g, 0.125)).collect();
    weights.insert(e, 0.5);
    let mu = Measure::new(&ring, weights).unwrap();
    let mut f = vec![0.0; ring.len()];
    f[e] = 1.0;
    let rows = weak_amenability_probe(
        &ring,
        &d,
        &mu,
        &[ProbeTest {
            generator: gens[0],
            f,
        }],
        &[2, 3],
    )
    .unwrap();
    assert!(rows.iter().all(|r| r.rel_diff > 0.3), "{rows:?}");
}
