//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (visible with `cargo test --test acceptance --
//! --nocapture`). Criteria run serially behind a mutex so the stated
//! runtime budgets are measured without cross-test contention.

use census_core::analysis::{loglog_fit, lower_bound_certificate};
use census_core::cantor::{simplex_box_sweep, threshold_alphas, CantorSpec};
use census_core::census::{
    constructive_triangles, count_tetrahedra, count_triangles, visit_triangles, TetraCapCombo,
    TriangleCapCombo,
};
use census_core::geometry::{CapSide, IntVec, LatticeSpec, ParaboloidBody};
use census_core::incidence::{
    energy_estimate, incidence_sweep, mu_params, ratio_divergence, EnergyMethod,
};
use census_core::numbertheory::{
    constructive_an, count_an_brute, count_an_exact, phi_by_gcd, rate_numerator_pi,
    solution_rate_constants, totient_sieve, Lambda,
};
use census_core::records::Method;
use census_core::rng::CounterRng;
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use std::sync::Mutex;
use std::time::{Duration, Instant};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn budget(name: &str, elapsed: Duration, limit: Duration) {
    assert!(
        elapsed <= limit,
        "{name}: runtime {elapsed:?} exceeds budget {limit:?}"
    );
}

#[test]
fn criterion_1_rate_constants() {
    let _guard = serial();
    let started = Instant::now();
    let at_one = rate_numerator_pi(1.0);
    let numerator = rate_numerator_pi(1.05);
    let constants = solution_rate_constants(1.05).unwrap();
    let elapsed = started.elapsed();

    assert_eq!(at_one, 0.0, "numerator must vanish exactly at λ = 1");
    assert!(
        (numerator - 0.3083).abs() <= 0.0001,
        "numerator at λ=1.05 is {numerator}, expected 0.3083 ± 0.0001"
    );
    assert!(
        (constants.value_pi - 0.00781).abs() <= 0.00001,
        "full formula value {} outside 0.00781 ± 0.00001",
        constants.value_pi
    );
    budget("criterion 1", elapsed, Duration::from_millis(1));
    println!(
        "PASS criterion 1: numerator(1) = {at_one}, numerator(1.05) = {numerator:.7} \
         (0.3083 ± 0.0001), value = {:.8} (0.00781 ± 0.00001; numerator and value \
         differ by the 4π² factor), 2π² reading = {:.8}, runtime {elapsed:?}",
        constants.value_pi, constants.value_pi_squared
    );
}

#[test]
fn criterion_2_totient_asymptotics() {
    let _guard = serial();
    let started = Instant::now();
    let table = totient_sieve(1_000_000).unwrap();

    // exact agreement with the gcd-definition summatory up to 10³
    let mut brute_sum = 0u64;
    for m in 1..=1000usize {
        brute_sum += phi_by_gcd(m as u64);
        assert_eq!(table.summatory(m), brute_sum, "Φ({m})");
    }

    // |Φ(m) − 3m²/π²| / (m·log m) ≤ 1.0 on [10², 10⁶]
    let mut worst = 0.0f64;
    let mut worst_m = 0usize;
    for m in 100..=1_000_000usize {
        let mf = m as f64;
        let expected = 3.0 * mf * mf / (std::f64::consts::PI * std::f64::consts::PI);
        let dev = (table.summatory(m) as f64 - expected).abs() / (mf * mf.ln());
        if dev > worst {
            worst = dev;
            worst_m = m;
        }
    }
    let elapsed = started.elapsed();
    assert!(worst <= 1.0, "normalized deviation {worst} at m = {worst_m}");
    budget("criterion 2", elapsed, Duration::from_secs(30));
    println!(
        "PASS criterion 2: sieve = gcd oracle for m ≤ 10³; max |Φ(m) − 3m²/π²|/(m log m) \
         = {worst:.4} at m = {worst_m} (≤ 1.0), runtime {elapsed:?}"
    );
}

#[test]
fn criterion_3_an_oracles_and_growth() {
    let _guard = serial();
    let started = Instant::now();

    for lam in ["1.05", "1.5", "2"] {
        let lambda = Lambda::parse(lam).unwrap();
        for n in 1..=200u64 {
            let brute = count_an_brute(n, &lambda).unwrap().count;
            let fast = count_an_exact(n, &lambda).unwrap().count;
            assert_eq!(brute, fast, "a_n brute vs fast at n={n}, λ={lam}");
        }
    }

    let lambda = Lambda::parse("1.05").unwrap();
    for n in [4u64, 10, 40, 100, 400, 1000, 4000, 10_000, 40_000, 100_000] {
        let cert = constructive_an(n, &lambda, false).unwrap();
        let exact = count_an_exact(n, &lambda).unwrap().count;
        assert!(
            exact >= cert.coprime_pairs,
            "a_{n} = {exact} < constructive count {}",
            cert.coprime_pairs
        );
    }

    let sweep: Vec<(f64, f64)> = [1000u64, 2000, 5000, 10_000, 20_000, 50_000, 100_000]
        .iter()
        .map(|&n| {
            let c = count_an_exact(n, &lambda).unwrap().count;
            (n as f64, c as f64)
        })
        .collect();
    let cert = lower_bound_certificate(&sweep, 1.0, 1e-3).unwrap();
    let elapsed = started.elapsed();
    assert!(
        cert.pass,
        "a_n/n certificate failed: constant {} at witness n = {}",
        cert.constant, cert.witness_x
    );
    budget("criterion 3", elapsed, Duration::from_secs(300));
    println!(
        "PASS criterion 3: fast = brute for n ≤ 200 at λ ∈ {{1.05, 1.5, 2}}; a_n ≥ \
         constructive count up to n = 10⁵; min a_n/n = {:.4} at n = {} (≥ 10⁻³), \
         runtime {elapsed:?}",
        cert.constant, cert.witness_x
    );
}

#[test]
fn criterion_4_triangle_census() {
    let _guard = serial();
    let started = Instant::now();

    // oracle equivalence for d ∈ {2,3,4}, even n ≤ 12, default assignment,
    // plus the full 8-assignment table at d=4, n=8
    for d in [2usize, 3, 4] {
        for n in (2..=12u32).step_by(2) {
            let brute = count_triangles(n, d, TriangleCapCombo::DEFAULT, Method::Brute)
                .unwrap()
                .count;
            let fast = count_triangles(n, d, TriangleCapCombo::DEFAULT, Method::Fast)
                .unwrap()
                .count;
            assert_eq!(brute, fast, "triangles d={d} n={n}");
        }
    }
    for combo in TriangleCapCombo::all() {
        let brute = count_triangles(8, 4, combo, Method::Brute).unwrap().count;
        let fast = count_triangles(8, 4, combo, Method::Fast).unwrap().count;
        assert_eq!(brute, fast, "combo {}", combo.label());
    }

    // every solution passes the exact integer unit tests
    let lat = LatticeSpec::new(8, 4).unwrap();
    for combo in TriangleCapCombo::all() {
        visit_triangles(8, 4, combo, &mut |x, y| {
            let fx = lat.pinned_index(x, combo.x).expect("x in ball");
            let fy = lat.pinned_index(y, combo.y).expect("y in ball");
            let diff: Vec<i64> = fx.iter().zip(&fy).map(|(a, b)| a - b).collect();
            assert!(lat.lies_on_cap(&fx, combo.x));
            assert!(lat.lies_on_cap(&fy, combo.y));
            assert!(lat.lies_on_cap(&diff, combo.diff));
            assert_ne!(lat.classify(&IntVec(diff)), CapSide::NotOnB);
        })
        .unwrap();
    }

    // growth certification at d = 4
    let pts: Vec<(f64, f64)> = (8..=48u32)
        .step_by(2)
        .map(|n| {
            let c = count_triangles(n, 4, TriangleCapCombo::DEFAULT, Method::Fast)
                .unwrap()
                .count;
            (n as f64, c as f64)
        })
        .collect();
    let fit = loglog_fit(&pts).unwrap();
    assert!(
        fit.slope >= 3.7,
        "fitted slope {} below 3.7 (target exponent 2d−4 = 4)",
        fit.slope
    );
    assert!(
        fit.slope <= 4.6,
        "fitted slope {} above the expected band [3.7, 4.6]",
        fit.slope
    );

    // constructive window census at n ∈ {24, 48}
    for n in [24u32, 48] {
        let report = constructive_triangles(n, 4).unwrap();
        assert!(report.record.count > 0, "constructive count must be positive");
        assert!(report.cross_window_verified && report.tail_bounds_verified);
        assert!(report.ball_bounds_verified && report.census_membership_verified);
        assert!(report.certificate.all_hold());
        let exact = count_triangles(n, 4, TriangleCapCombo::DEFAULT, Method::Fast)
            .unwrap()
            .count;
        assert!(
            report.record.count <= exact,
            "constructive {} exceeds census {exact} at n={n}",
            report.record.count
        );
    }
    let elapsed = started.elapsed();
    budget("criterion 4", elapsed, Duration::from_secs(600));
    println!(
        "PASS criterion 4: brute = fast (d ≤ 4, even n ≤ 12; all 8 assignments at d=4 n=8); \
         all solutions exact-verified; d=4 slope = {:.4} over even n ∈ [8,48] (≥ 3.7, \
         r² = {:.4}); constructive ⊂ census with positive count at n ∈ {{24, 48}}, \
         runtime {elapsed:?}",
        fit.slope, fit.r_squared
    );
}

#[test]
fn criterion_5_incidence_pipeline() {
    let _guard = serial();
    let started = Instant::now();
    let n_list: Vec<u32> = (8..=48).step_by(2).collect();
    let rows = incidence_sweep(4, 2.4, &n_list).unwrap();

    let mass_pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.epsilon, r.mass)).collect();
    let mass_fit = loglog_fit(&mass_pts).unwrap();
    let predicted = 6.0 * 2.4 / 5.0;
    assert!(
        (mass_fit.slope - predicted).abs() <= 0.15,
        "mass exponent {} outside {predicted} ± 0.15",
        mass_fit.slope
    );

    let report = ratio_divergence(&rows, 0.1).unwrap();
    assert!(
        report.fit.slope < 0.0,
        "ratio exponent {} must be negative: mass/ε³ grows as ε → 0",
        report.fit.slope
    );

    let mut values = Vec::new();
    for n in [4u32, 6, 8, 10] {
        let params = mu_params(4, 2.4, n).unwrap();
        let e = energy_estimate(&params, 2.4, EnergyMethod::DifferenceConvolution, 0, 0).unwrap();
        values.push(e.value);
    }
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    let elapsed = started.elapsed();
    assert!(
        max <= 2.0 * min,
        "energy estimates vary by more than 2×: {values:?}"
    );
    budget("criterion 5", elapsed, Duration::from_secs(900));
    println!(
        "PASS criterion 5: mass exponent = {:.4} (2.88 ± 0.15), ratio exponent = {:.4} \
         (< 0, margin-0.1 divergence check: {}), energy spread {:.4}–{:.4} \
         (max/min = {:.3} ≤ 2), runtime {elapsed:?}",
        mass_fit.slope,
        report.fit.slope,
        report.diverges,
        min,
        max,
        max / min
    );
}

#[test]
fn criterion_6_cantor_construction() {
    let _guard = serial();
    let started = Instant::now();

    // recursion = leaf enumeration, exactly, through depth 12
    let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    for depth in [4u32, 8, 12] {
        for ratio in [r(1, 4), r(1, 3), r(1, 2)] {
            let spec = CantorSpec::from_ratio(ratio, depth).unwrap();
            for (lo, hi) in [
                (r(0, 1), r(1, 1)),
                (r(1, 7), r(3, 5)),
                (r(0, 1), r(1, 10)),
                (r(-1, 3), r(1, 2)),
            ] {
                assert_eq!(
                    spec.interval_mass(&lo, &hi).unwrap(),
                    spec.interval_mass_enumerated(&lo, &hi).unwrap(),
                    "depth {depth}"
                );
            }
        }
    }

    // exact rational identities for every k ≤ 12, k ≤ d ≤ 2k+1
    for k in 1..=12usize {
        for d in k..=(2 * k + 1) {
            let th = threshold_alphas(k, d).unwrap();
            assert!(th.dim_sum_matches, "Σα ≠ (d+1)/2 at k={k}, d={d}");
            assert!(th.box_exponent_matches, "box exponent ≠ k(k+1)/2 at k={k}, d={d}");
            assert_eq!(th.dim_sum, Ratio::new(d as i64 + 1, 2));
        }
    }

    // fitted box-mass exponents at depth 24
    let mut fitted = Vec::new();
    for (k, d) in [(2usize, 3usize), (2, 4), (3, 4)] {
        let th = threshold_alphas(k, d).unwrap();
        let reports = simplex_box_sweep(k, d, &th.alphas, &[4, 6, 8, 10, 12], 24).unwrap();
        let pts: Vec<(f64, f64)> = reports.iter().map(|r| (r.epsilon, r.mass_f64)).collect();
        let fit = loglog_fit(&pts).unwrap();
        let predicted = *th.box_exponent.numer() as f64 / *th.box_exponent.denom() as f64;
        assert!(
            (fit.slope - predicted).abs() <= 0.05 * predicted,
            "(k,d)=({k},{d}): fitted {} vs predicted {predicted}",
            fit.slope
        );
        fitted.push(((k, d), fit.slope, predicted));
    }
    let elapsed = started.elapsed();
    budget("criterion 6", elapsed, Duration::from_secs(300));
    println!(
        "PASS criterion 6: recursion = enumeration through depth 12; threshold identities \
         exact for all k ≤ 12; box-mass exponents {:?} within 5% of predictions, \
         runtime {elapsed:?}",
        fitted
    );
}

#[test]
fn criterion_7_tetrahedra_exploration() {
    let _guard = serial();
    let started = Instant::now();

    for n in [2u32, 4, 6] {
        let brute = count_tetrahedra(n, 4, TetraCapCombo::DEFAULT, Method::Brute)
            .unwrap()
            .count;
        let fast = count_tetrahedra(n, 4, TetraCapCombo::DEFAULT, Method::Fast)
            .unwrap()
            .count;
        assert_eq!(brute, fast, "tetrahedra n={n}");
    }
    for n in 1..=8u32 {
        assert_eq!(
            count_tetrahedra(n, 2, TetraCapCombo::DEFAULT, Method::Fast).unwrap().count,
            0,
            "d=2 degenerates to 0 = n²/2, no solutions"
        );
    }

    let pts: Vec<(f64, f64)> = (4..=24u32)
        .step_by(2)
        .map(|n| {
            let c = count_tetrahedra(n, 4, TetraCapCombo::DEFAULT, Method::Fast)
                .unwrap()
                .count;
            (n as f64, c as f64)
        })
        .collect();
    let fit = loglog_fit(&pts).unwrap();
    let elapsed = started.elapsed();
    assert!(fit.point_count >= 4, "sweep must produce a usable fit");
    budget("criterion 7", elapsed, Duration::from_secs(900));
    // exploratory: the growth target 3d−6 = 6 has no pass/fail attached
    println!(
        "PASS criterion 7: brute = fast at n ∈ {{2,4,6}}; d=2 sweep identically zero; \
         fitted exponent over even n ∈ [4,24] = {:.4} (r² = {:.4}), reported against \
         the open-question target 3d−6 = 6, runtime {elapsed:?}",
        fit.slope, fit.r_squared
    );
}

#[test]
fn criterion_8_norm_properties() {
    let _guard = serial();
    let started = Instant::now();
    let rng = CounterRng::new(0x5EED);
    let samples = 100_000u64;
    for d in [2usize, 4, 6] {
        let body = ParaboloidBody::new(d).unwrap();
        let draw = |k: u64, off: u64| -> Vec<f64> {
            (0..d)
                .map(|i| 4.0 * rng.symmetric_f64_at(k * 64 + off * 16 + i as u64))
                .collect()
        };
        for k in 0..samples {
            let u = draw(k, 0);
            let v = draw(k, 1);
            let nu = body.norm(&u).unwrap();
            let nv = body.norm(&v).unwrap();

            // symmetry is exact
            let neg: Vec<f64> = u.iter().map(|x| -x).collect();
            assert_eq!(body.norm(&neg).unwrap(), nu);

            // homogeneity within 1e−12 relative
            let t = 0.25 + 3.0 * rng.unit_f64_at(k * 64 + 40);
            let scaled: Vec<f64> = u.iter().map(|x| x * t).collect();
            let lhs = body.norm(&scaled).unwrap();
            assert!(
                (lhs - t * nu).abs() <= 1e-12 * t * nu.max(1e-12),
                "homogeneity d={d} k={k}"
            );

            // triangle inequality within 1e−9
            let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
            assert!(
                body.norm(&sum).unwrap() <= nu + nv + 1e-9,
                "triangle inequality d={d} k={k}"
            );

            // convexity probe on normalized pair
            if nu > 1e-9 && nv > 1e-9 {
                let mid: Vec<f64> = u
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a / nu + b / nv) / 2.0)
                    .collect();
                assert!(
                    body.norm(&mid).unwrap() <= 1.0 + 1e-9,
                    "convexity d={d} k={k}"
                );
            }
        }
    }

    // integer-certified unit lattice vectors have float norm 1 ± 1e−12
    let mut verified = 0usize;
    for (n, d) in [(2u32, 2usize), (6, 2), (4, 3), (8, 4), (4, 6)] {
        let lat = LatticeSpec::new(n, d).unwrap();
        let body = ParaboloidBody::new(d).unwrap();
        let bound = n as i64;
        let mut idx = vec![-bound; d - 1];
        loop {
            for cap in [census_core::geometry::Cap::Upper, census_core::geometry::Cap::Lower] {
                if let Some(full) = lat.pinned_index(&idx, cap) {
                    assert_ne!(lat.classify(&IntVec(full.clone())), CapSide::NotOnB);
                    let norm = body.norm(&lat.embed(&full)).unwrap();
                    assert!((norm - 1.0).abs() <= 1e-12, "norm {norm} at {full:?}");
                    verified += 1;
                }
            }
            let mut k = 0;
            loop {
                if k == d - 1 {
                    break;
                }
                idx[k] += 1;
                if idx[k] <= bound {
                    break;
                }
                idx[k] = -bound;
                k += 1;
            }
            if k == d - 1 {
                break;
            }
        }
    }
    let elapsed = started.elapsed();
    budget("criterion 8", elapsed, Duration::from_secs(60));
    println!(
        "PASS criterion 8: homogeneity/symmetry/triangle/convexity on 10⁵ seeded samples \
         at d ∈ {{2,4,6}}; {verified} integer-certified unit vectors at float norm \
         1 ± 1e−12, runtime {elapsed:?}"
    );
}

#[test]
fn criterion_9_determinism() {
    let _guard = serial();
    let pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
    };
    let one = pool(1);
    let eight = pool(8);

    let payload = |threads_pool: &rayon::ThreadPool| -> String {
        threads_pool.install(|| {
            let tri = count_triangles(8, 4, TriangleCapCombo::DEFAULT, Method::Fast).unwrap();
            let tet = count_tetrahedra(4, 4, TetraCapCombo::DEFAULT, Method::Fast).unwrap();
            let an = count_an_exact(1000, &Lambda::parse("1.05").unwrap()).unwrap();
            let params = mu_params(2, 1.2, 4).unwrap();
            let energy =
                energy_estimate(&params, 1.2, EnergyMethod::DifferenceConvolution, 0, 0).unwrap();
            let mc = energy_estimate(&params, 1.2, EnergyMethod::MonteCarlo, 100_000, 7).unwrap();
            format!(
                "tri={} tet={} an={} conv={:016x} mc={:016x}",
                tri.count,
                tet.count,
                an.count,
                energy.value.to_bits(),
                mc.value.to_bits()
            )
        })
    };

    let a1 = payload(&one);
    let a2 = payload(&one);
    let b1 = payload(&eight);
    let b2 = payload(&eight);
    assert_eq!(a1, a2, "single-worker runs must be byte-identical");
    assert_eq!(b1, b2, "eight-worker runs must be byte-identical");
    assert_eq!(a1, b1, "results must not depend on the worker count");
    println!("PASS criterion 9: payloads byte-identical across worker counts {{1, 8}} and across consecutive runs: {a1}");
}
