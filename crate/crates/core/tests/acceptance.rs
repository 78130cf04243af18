//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use fusionwalk::amenability::{
    amenability_verdict, default_schedule, free_group_benchmark, gamma_norm_lower,
    IterationOptions, VerdictKind, VerdictOptions,
};
use fusionwalk::entropy::{
    decomposition_defect, entropy_gap_bounds, f_maximizer, f_simplex, h_bound_blocks,
    random_decomposition, random_state, Inclusion, SimplexPoint,
};
use fusionwalk::families::{build, finite_catalog, su2_quantum_dims, FamilySpec};
use fusionwalk::fusion::{fp_dimensions, Combination, DimensionFunction, FusionRing};
use fusionwalk::walk::{
    convolve, harmonic_space, is_generating, kernel, sample_endpoints, stationary_check,
    Generation, Measure,
};
use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_measure(ring: &FusionRing, rng: &mut ChaCha8Rng) -> Measure {
    let n = ring.len();
    let k = rng.gen_range(1..=n);
    let mut weights: BTreeMap<usize, f64> = sample(rng, n, k)
        .into_iter()
        .map(|i| (i, rng.gen_range(0.05..1.0)))
        .collect();
    let total: f64 = weights.values().sum();
    weights.values_mut().for_each(|w| *w /= total);
    Measure::new(ring, weights).unwrap()
}

fn full_support_measure(ring: &FusionRing, rng: &mut ChaCha8Rng) -> Measure {
    let mut weights: BTreeMap<usize, f64> = (0..ring.len())
        .map(|i| (i, rng.gen_range(0.05..1.0)))
        .collect();
    let total: f64 = weights.values().sum();
    weights.values_mut().for_each(|w| *w /= total);
    Measure::new(ring, weights).unwrap()
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn catalog_with_dims() -> Vec<(String, FusionRing, DimensionFunction)> {
    finite_catalog()
        .into_iter()
        .map(|(name, spec)| {
            let ring = build(&spec).unwrap();
            let d = fp_dimensions(&ring).unwrap();
            (name, ring, d)
        })
        .collect()
}

fn random_inclusion(rng: &mut ChaCha8Rng) -> Inclusion {
    loop {
        let kk = rng.gen_range(1..=4);
        let ll = rng.gen_range(1..=4);
        let n: Vec<usize> = (0..kk).map(|_| rng.gen_range(1..=3)).collect();
        let a: Vec<Vec<u64>> = (0..kk)
            .map(|_| {
                (0..ll)
                    .map(|_| {
                        if rng.gen_bool(0.5) {
                            0
                        } else {
                            rng.gen_range(1..=2)
                        }
                    })
                    .collect()
            })
            .collect();
        let m: Vec<usize> = (0..ll)
            .map(|l| (0..kk).map(|k| a[k][l] as usize * n[k]).sum())
            .collect();
        if m.iter().any(|&x| x == 0 || x > 6) || a.iter().any(|row| row.iter().all(|&x| x == 0)) {
            continue;
        }
        return Inclusion::new(n, m, a).unwrap();
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut row_err, mut residual) = (0.0f64, 0.0f64);
    let mut rows_checked = 0usize;
    for (_, ring, d) in catalog_with_dims() {
        for _ in 0..50 {
            let mu = random_measure(&ring, &mut rng);
            let k = kernel(&ring, &d, &mu).unwrap();
            for s in 0..ring.len() {
                if k.is_row_complete(s) {
                    row_err = row_err.max((k.row_sum(s) - 1.0).abs());
                    rows_checked += 1;
                }
            }
            residual = residual.max(stationary_check(&ring, &d, &mu).unwrap());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        row_err <= 1e-12 && residual < 1e-10 && secs < 10.0 && rows_checked > 0,
        format!("max |row sum − 1| = {row_err:.1e}, max stationarity residual = {residual:.1e}, {secs:.2} s"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for (_, ring, d) in catalog_with_dims() {
        for _ in 0..20 {
            let mu = random_measure(&ring, &mut rng);
            let nu = random_measure(&ring, &mut rng);
            let pm = kernel(&ring, &d, &mu).unwrap().to_dense();
            let pn = kernel(&ring, &d, &nu).unwrap().to_dense();
            let conv = convolve(&ring, &d, &nu, &mu).unwrap();
            let pc = kernel(&ring, &d, &conv).unwrap().to_dense();
            let prod = matmul(&pm, &pn);
            for (r1, r2) in prod.iter().zip(&pc) {
                for (x, y) in r1.iter().zip(r2) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max |P_μP_ν − P_(ν*μ)| = {worst:.1e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cases: Vec<(String, FusionRing, Measure)> = Vec::new();
    for k in 1..=8 {
        let ring = build(&FamilySpec::VerlindeSu2 { level: k }).unwrap();
        let all: Vec<usize> = (0..ring.len()).collect();
        cases.push((format!("SU(2)_{k} δ_fund"), ring.clone(), Measure::point(1)));
        cases.push((
            format!("SU(2)_{k} uniform"),
            ring.clone(),
            Measure::uniform(&all),
        ));
        let random = full_support_measure(&ring, &mut rng);
        cases.push((format!("SU(2)_{k} random"), ring, random));
    }
    let group = |spec: FamilySpec| build(&spec).unwrap();
    cases.push((
        "ℤ/3 δ_1".into(),
        group(FamilySpec::cyclic(3)),
        Measure::point(1),
    ));
    cases.push((
        "ℤ/4 δ_1".into(),
        group(FamilySpec::cyclic(4)),
        Measure::point(1),
    ));
    cases.push((
        "ℤ/5 uniform{1,2}".into(),
        group(FamilySpec::cyclic(5)),
        Measure::uniform(&[1, 2]),
    ));
    cases.push((
        "ℤ/6 δ_1".into(),
        group(FamilySpec::cyclic(6)),
        Measure::point(1),
    ));
    cases.push((
        "S₃ transposition + 3-cycle".into(),
        group(FamilySpec::symmetric3()),
        Measure::uniform(&[1, 4]),
    ));
    let klein = group(FamilySpec::product(
        FamilySpec::cyclic(2),
        FamilySpec::cyclic(2),
    ));
    cases.push((
        "ℤ/2×ℤ/2 uniform{(0,1),(1,0)}".into(),
        klein.clone(),
        Measure::uniform(&[1, 2]),
    ));

    let mut bad = Vec::new();
    for (name, ring, mu) in &cases {
        let generating = matches!(is_generating(ring, mu, 64), Generation::Yes { .. });
        let d = fp_dimensions(ring).unwrap();
        let dim = harmonic_space(&kernel(ring, &d, mu).unwrap())
            .unwrap()
            .dimension();
        if !generating || dim != 1 {
            bad.push(format!("{name}: generating={generating}, dim={dim}"));
        }
    }
    let d = fp_dimensions(&klein).unwrap();
    let coset_dim = harmonic_space(&kernel(&klein, &d, &Measure::point(2)).unwrap())
        .unwrap()
        .dimension();
    outcome(
        bad.is_empty() && coset_dim == 2 && cases.len() == 30,
        format!(
            "{} generating cases, {} with dimension ≠ 1 {:?}; ℤ/2×ℤ/2 δ_(1,0) dimension {coset_dim}",
            cases.len(),
            bad.len(),
            bad
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let opts = IterationOptions::default();
    let ring = build(&FamilySpec::VerlindeSu2 { level: 3 }).unwrap();
    let verlinde = gamma_norm_lower(&ring, &Combination::basis(1), ring.len(), opts)
        .unwrap()
        .lower_bound;
    let verlinde_ok = (verlinde - 2.0 * (PI / 5.0).cos()).abs() <= 1e-9;

    let mut cutoffs: Vec<usize> = (4..=11).map(|j| 1usize << j).collect();
    cutoffs.push(4000);
    let mut bounds = Vec::new();
    for &c in &cutoffs {
        let ring = build(&FamilySpec::Su2Rep { cutoff: c }).unwrap();
        bounds.push(
            gamma_norm_lower(&ring, &Combination::basis(1), c, opts)
                .unwrap()
                .lower_bound,
        );
    }
    let increasing = bounds.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let su2_last = *bounds.last().unwrap();
    let su2_ok = increasing && (1.999..=2.0 + 1e-9).contains(&su2_last);

    let free = free_group_benchmark(2, 12, opts).unwrap();
    let free_ok = (3.45..=3.4642).contains(&free.lower_bound);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        verlinde_ok && su2_ok && free_ok && secs < 60.0,
        format!(
            "SU(2)_3 fund {verlinde:.12} ({}), SU(2) cutoff 4000 {su2_last:.6} ({}), \
             free group rank 2 radius 12 {:.6} after {} iterations ({}), {secs:.1} s",
            if verlinde_ok { "ok" } else { "off" },
            if su2_ok { "ok" } else { "off" },
            free.lower_bound,
            free.iterations,
            if free_ok { "ok" } else { "below 3.45" },
        ),
    )
}

fn criterion_5() -> Outcome {
    let opts = VerdictOptions::default();
    let fund = Combination::basis(1);

    let ring = build(&FamilySpec::Su2Rep { cutoff: 4000 }).unwrap();
    let classical = su2_quantum_dims(&ring, 1.0).unwrap();
    let v = amenability_verdict(&ring, &classical, &fund, &default_schedule(3999), opts).unwrap();
    let classical_ok = v.kind == VerdictKind::AmenableEvidence;

    let q: f64 = 1.5;
    let ring = build(&FamilySpec::Su2Rep { cutoff: 1025 }).unwrap();
    let quantum = su2_quantum_dims(&ring, q).unwrap();
    let vq = amenability_verdict(&ring, &quantum, &fund, &default_schedule(1024), opts).unwrap();
    let expected = q + 1.0 / q - 2.0;
    let quantum_ok = matches!(vq.kind, VerdictKind::NonamenableCertificate { gap } if (gap - expected).abs() <= 2e-3);

    let mut finite_bad = Vec::new();
    let mut finite_cases = 0;
    for (name, ring, d) in catalog_with_dims() {
        for u in 0..ring.len() {
            finite_cases += 1;
            let v = amenability_verdict(&ring, &d, &Combination::basis(u), &[ring.len()], opts)
                .unwrap();
            if v.kind != VerdictKind::AmenableEvidence {
                finite_bad.push(format!("{name}/{}", ring.label(u)));
            }
        }
    }
    outcome(
        classical_ok && quantum_ok && finite_bad.is_empty(),
        format!(
            "classical {:?} at window {}; q = 1.5 {:?} (expected gap {expected:.6}); \
             {finite_cases} finite objects, {} not amenable {:?}",
            v.kind,
            v.certificate.window,
            vq.kind,
            finite_bad.len(),
            finite_bad
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=8usize {
        let inc = Inclusion::new(vec![1], vec![n], vec![vec![n as u64]]).unwrap();
        let h = h_bound_blocks(&inc, &[vec![1.0]]).unwrap();
        worst = worst.max((h - (n as f64).ln()).abs());
    }
    let diag = Inclusion::new(vec![1, 1], vec![2], vec![vec![1], vec![1]]).unwrap();
    let h = h_bound_blocks(&diag, &[vec![0.5], vec![0.5]]).unwrap();
    worst = worst.max((h - 2f64.ln()).abs());
    outcome(worst <= 1e-12, format!("max deviation {worst:.1e}"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut low_violation, mut high_violation) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for _ in 0..1000 {
        let inc = random_inclusion(&mut rng);
        let psi = random_state(inc.amb_dims(), &mut rng);
        let b = entropy_gap_bounds(&inc, &psi).unwrap();
        low_violation = low_violation.max(b.lower - b.gap);
        high_violation = high_violation.max(b.gap - b.upper);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        low_violation <= 1e-8 && high_violation <= 1e-8 && secs < 30.0,
        format!("max(lower − gap) = {low_violation:.2e}, max(gap − upper) = {high_violation:.2e}, {secs:.2} s"),
    )
}

fn random_matrix(rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    loop {
        let kk = rng.gen_range(1..=4);
        let ll = rng.gen_range(1..=4);
        let a = DMatrix::from_fn(kk, ll, |_, _| {
            if rng.gen_bool(0.4) {
                0.0
            } else {
                rng.gen_range(1..=3) as f64
            }
        });
        if a.iter().any(|&x| x > 0.0) {
            return a;
        }
    }
}

fn random_simplex_point(a: &DMatrix<f64>, rng: &mut ChaCha8Rng) -> SimplexPoint {
    loop {
        let mut v: Vec<Vec<f64>> = (0..a.nrows())
            .map(|k| {
                (0..a.ncols())
                    .map(|l| {
                        if a[(k, l)] == 0.0 || rng.gen_bool(0.3) {
                            0.0
                        } else {
                            -rng.gen::<f64>().max(1e-300).ln()
                        }
                    })
                    .collect()
            })
            .collect();
        let total: f64 = v.iter().flatten().sum();
        if total > 0.0 {
            v.iter_mut().flatten().for_each(|x| *x /= total);
            return SimplexPoint::new(a, v).unwrap();
        }
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut excess, mut max_gap, mut max_mass_err) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let a = random_matrix(&mut rng);
        // oracle: largest singular value from a full SVD
        let norm = a.clone().svd(false, false).singular_values.max();
        let two_log = 2.0 * norm.ln();
        for _ in 0..1000 {
            let xi = random_simplex_point(&a, &mut rng);
            excess = excess.max(f_simplex(&a, &xi) - two_log);
        }
        let m = f_maximizer(&a).unwrap();
        max_gap = max_gap.max((m.value - two_log).abs());
        let mass: f64 = m.point.values().iter().flatten().sum();
        max_mass_err = max_mass_err.max((mass - 1.0).abs());
    }
    outcome(
        excess <= 1e-9 && max_gap <= 1e-9 && max_mass_err <= 1e-12,
        format!(
            "max f(ξ) − 2log‖A‖ = {excess:.2e}, max |f(ξ*) − 2log‖A‖| = {max_gap:.1e}, \
             max |Σξ* − 1| = {max_mass_err:.1e}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let inc = random_inclusion(&mut rng);
        let phi = random_state(inc.amb_dims(), &mut rng);
        let parts = rng.gen_range(2..=4);
        let split = random_decomposition(&phi, parts, &mut rng);
        worst = worst.min(decomposition_defect(&inc, &phi, &split).unwrap());
    }
    outcome(worst >= -1e-8, format!("min defect = {worst:.3e}"))
}

fn criterion_10() -> Outcome {
    const PATHS: usize = 100_000;
    const STEPS: usize = 6;
    let ring = build(&FamilySpec::Su2Rep { cutoff: 12 }).unwrap();
    let d = su2_quantum_dims(&ring, 1.0).unwrap();
    let k = kernel(&ring, &d, &Measure::point(1)).unwrap();
    // oracle: Clebsch–Gordan transition p(s, s±1) = (t+1)/(2(s+1)) on doubled spins
    let n = ring.len();
    let mut dist = vec![0.0; n];
    dist[0] = 1.0;
    for _ in 0..STEPS {
        let mut next = vec![0.0; n];
        for s in 0..n {
            if dist[s] == 0.0 {
                continue;
            }
            for t in [s.wrapping_sub(1), s + 1] {
                if t < n {
                    next[t] += dist[s] * (t + 1) as f64 / (2.0 * (s + 1) as f64);
                }
            }
        }
        dist = next;
    }
    let ends = sample_endpoints(&k, 0, STEPS, PATHS, 10).unwrap();
    let mut counts = vec![0usize; n];
    for e in ends {
        counts[e] += 1;
    }
    let mut chi2 = 0.0;
    let mut categories = 0;
    let mut max_z = 0.0f64;
    for t in 0..n {
        let expected = dist[t] * PATHS as f64;
        if expected > 0.0 {
            categories += 1;
            chi2 += (counts[t] as f64 - expected).powi(2) / expected;
            let se = (PATHS as f64 * dist[t] * (1.0 - dist[t])).sqrt();
            if se > 0.0 {
                max_z = max_z.max((counts[t] as f64 - expected).abs() / se);
            }
        } else if counts[t] > 0 {
            return outcome(false, format!("state {t} sampled but has probability 0"));
        }
    }
    let critical = ChiSquared::new((categories - 1) as f64)
        .unwrap()
        .inverse_cdf(0.999);
    outcome(
        chi2 <= critical && max_z <= 3.0,
        format!(
            "χ² = {chi2:.3} on {} dof (critical {critical:.3}), max |z| = {max_z:.2}",
            categories - 1
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("kernel stochasticity and stationarity", criterion_1),
        ("convolution matches operator composition", criterion_2),
        (
            "harmonic functions are constant for generating measures",
            criterion_3,
        ),
        ("norm certificates", criterion_4),
        ("amenability verdicts", criterion_5),
        ("entropy bound exact cases", criterion_6),
        ("entropy sandwich", criterion_7),
        ("simplex bound and maximizer", criterion_8),
        ("decomposition dominance", criterion_9),
        ("Monte Carlo against kernel powers", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {}", i + 1, result.detail);
        if !result.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
