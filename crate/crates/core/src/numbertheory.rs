//! Totient machinery, coprime-pair counting, the solution-rate constant in
//! its two readings, and exact counting of lattice solutions of n = xi + yj
//! inside a square box.

use crate::error::Error;
use crate::intmath::{
    ceil_sqrt_ratio, extended_gcd, floor_sqrt_ratio, gcd, intersect, linear_box_interval,
};
use crate::records::{params_of, CountRecord, Method};
use crate::Result;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

pub const SIEVE_MAX: usize = 100_000_000;

/// Euler totients φ(1..=m_max) with prefix sums Φ.
pub struct TotientTable {
    pub m_max: usize,
    phi: Vec<u32>,
    prefix: Vec<u64>,
}

/// Linear sieve: every composite is struck exactly once via its smallest
/// prime factor, so φ is filled multiplicatively in O(m).
pub fn totient_sieve(m_max: usize) -> Result<TotientTable> {
    if m_max == 0 || m_max > SIEVE_MAX {
        return Err(Error::invalid(format!(
            "totient sieve bound must be in 1..={SIEVE_MAX}, got {m_max}"
        )));
    }
    let mut phi = vec![0u32; m_max + 1];
    let mut primes: Vec<u32> = Vec::new();
    phi[1] = 1;
    for i in 2..=m_max {
        if phi[i] == 0 {
            phi[i] = (i - 1) as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            let ip = i * p as usize;
            if ip > m_max {
                break;
            }
            if i % p as usize == 0 {
                phi[ip] = phi[i] * p;
                break;
            }
            phi[ip] = phi[i] * (p - 1);
        }
    }
    let mut prefix = vec![0u64; m_max + 1];
    for i in 1..=m_max {
        prefix[i] = prefix[i - 1] + phi[i] as u64;
    }
    Ok(TotientTable {
        m_max,
        phi,
        prefix,
    })
}

impl TotientTable {
    pub fn phi(&self, m: usize) -> u32 {
        self.phi[m]
    }

    /// Φ(m) = Σ_{j ≤ m} φ(j).
    pub fn summatory(&self, m: usize) -> u64 {
        self.prefix[m]
    }
}

/// φ(m) straight from the definition; oracle for the sieve.
pub fn phi_by_gcd(m: u64) -> u64 {
    (1..=m).filter(|&j| gcd(j as i128, m as i128) == 1).count() as u64
}

/// Ordered pairs (i, j) ∈ [lo, hi]² with gcd(i, j) = 1; dispatches on range
/// width between the direct scan and Möbius inclusion–exclusion.
pub fn coprime_pairs(lo: u64, hi: u64) -> Result<u128> {
    if lo == 0 || lo > hi {
        return Err(Error::invalid(format!("invalid coprime range [{lo}, {hi}]")));
    }
    if hi - lo <= 10_000 {
        Ok(coprime_pairs_gcd(lo, hi))
    } else {
        coprime_pairs_moebius(lo, hi)
    }
}

pub fn coprime_pairs_gcd(lo: u64, hi: u64) -> u128 {
    let mut count = 0u128;
    for i in lo..=hi {
        for j in lo..=hi {
            if gcd(i as i128, j as i128) == 1 {
                count += 1;
            }
        }
    }
    count
}

/// Σ_d μ(d)·cnt(d)² where cnt(d) = #multiples of d in [lo, hi].
pub fn coprime_pairs_moebius(lo: u64, hi: u64) -> Result<u128> {
    if hi as usize > SIEVE_MAX {
        return Err(Error::invalid(format!(
            "Möbius coprime counting supports hi ≤ {SIEVE_MAX}, got {hi}"
        )));
    }
    let mu = moebius_sieve(hi as usize);
    let mut total: i128 = 0;
    for d in 1..=hi {
        let m = mu[d as usize] as i128;
        if m == 0 {
            continue;
        }
        let cnt = (hi / d - (lo - 1) / d) as i128;
        total += m * cnt * cnt;
    }
    u128::try_from(total).map_err(|_| Error::Overflow)
}

fn moebius_sieve(limit: usize) -> Vec<i8> {
    let mut mu = vec![1i8; limit + 1];
    let mut is_comp = vec![false; limit + 1];
    let mut primes: Vec<usize> = Vec::new();
    for i in 2..=limit {
        if !is_comp[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > limit {
                break;
            }
            is_comp[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

/// Exact rational λ for box bounds (the scale factor enters counts through
/// ⌊λ√n⌋ and friends, where float rounding at the boundary would silently
/// change exact counts).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lambda {
    pub num: i64,
    pub den: i64,
}

impl Lambda {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den <= 0 || num <= 0 {
            return Err(Error::invalid("lambda must be a positive rational"));
        }
        let g = gcd(num as i128, den as i128) as i64;
        Ok(Lambda {
            num: num / g,
            den: den / g,
        })
    }

    /// Parse a decimal ("1.05") or fraction ("21/20").
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let num: i64 = p.trim().parse().map_err(|_| Error::invalid(format!("bad fraction {s}")))?;
            let den: i64 = q.trim().parse().map_err(|_| Error::invalid(format!("bad fraction {s}")))?;
            return Lambda::new(num, den);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::invalid(format!("bad decimal {s}")));
            }
            let scale = 10i64.pow(frac.len() as u32);
            let int: i64 = int.parse().map_err(|_| Error::invalid(format!("bad decimal {s}")))?;
            let frac: i64 = frac.parse().map_err(|_| Error::invalid(format!("bad decimal {s}")))?;
            return Lambda::new(int * scale + frac, scale);
        }
        let int: i64 = s.parse().map_err(|_| Error::invalid(format!("bad number {s}")))?;
        Lambda::new(int, 1)
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn ratio(&self) -> Ratio<i64> {
        Ratio::new(self.num, self.den)
    }

    pub fn is_greater_than_one(&self) -> bool {
        self.num > self.den
    }

    /// ⌊λ√n⌋, exact.
    pub fn floor_mul_sqrt(&self, n: u64) -> i64 {
        let p = (self.num as i128) * (self.num as i128) * (n as i128);
        let q = (self.den as i128) * (self.den as i128);
        floor_sqrt_ratio(p, q) as i64
    }

    /// ⌈((λ+1)/2)·√n⌉, exact.
    pub fn ceil_half_plus_mul_sqrt(&self, n: u64) -> i64 {
        let a = (self.num + self.den) as i128;
        let p = a * a * (n as i128);
        let q = 4 * (self.den as i128) * (self.den as i128);
        ceil_sqrt_ratio(p, q) as i64
    }

    /// ⌊λ·x/2⌋ for integer x ≥ 0, exact.
    pub fn floor_mul_half(&self, x: u64) -> i64 {
        ((self.num as i128 * x as i128).div_euclid(2 * self.den as i128)) as i64
    }
}

/// The quadratic rate coefficient in λ, under its two readings: the linear
/// term carrying 2π, and the re-derived variant carrying 2π² (the two differ
/// in where the prefactor of the totient summatory asymptotic 3/π² lands).
/// Both vanish at λ = 1; the 2π variant is positive for every λ > 1, the
/// 2π² variant only for λ > (2π² − 3)/9 ≈ 1.8606.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SolutionRateConstants {
    pub lambda: f64,
    pub numerator_pi: f64,
    pub value_pi: f64,
    pub positive_pi: bool,
    pub numerator_pi_squared: f64,
    pub value_pi_squared: f64,
    pub positive_pi_squared: bool,
}

/// Numerator 9λ² − (6+2π)λ + (2π−3); no precondition so the λ = 1 root can
/// be evaluated directly.
pub fn rate_numerator_pi(lambda: f64) -> f64 {
    use std::f64::consts::PI;
    9.0 * lambda * lambda - (6.0 + 2.0 * PI) * lambda + (2.0 * PI - 3.0)
}

/// Numerator 9λ² − (6+2π²)λ + (2π²−3).
pub fn rate_numerator_pi_squared(lambda: f64) -> f64 {
    use std::f64::consts::PI;
    let pi2 = PI * PI;
    9.0 * lambda * lambda - (6.0 + 2.0 * pi2) * lambda + (2.0 * pi2 - 3.0)
}

pub fn solution_rate_constants(lambda: f64) -> Result<SolutionRateConstants> {
    if lambda <= 1.0 || lambda.is_nan() {
        return Err(Error::invalid(format!("lambda must be > 1, got {lambda}")));
    }
    use std::f64::consts::PI;
    let denom = 4.0 * PI * PI;
    let numerator_pi = rate_numerator_pi(lambda);
    let numerator_pi_squared = rate_numerator_pi_squared(lambda);
    Ok(SolutionRateConstants {
        lambda,
        numerator_pi,
        value_pi: numerator_pi / denom,
        positive_pi: numerator_pi > 0.0,
        numerator_pi_squared,
        value_pi_squared: numerator_pi_squared / denom,
        positive_pi_squared: numerator_pi_squared > 0.0,
    })
}

/// Quadruples (u, v, w, z) ∈ [−k, k]⁴ with u·v + w·z = target, exact.
///
/// Iterates ordered pairs (u, v); each pair leaves the linear Diophantine
/// equation w·z... strictly: for fixed (u, v), counts (w, z) in the box with
/// w·z = target − u·v by divisor-row arithmetic: rows with w = 0 need the
/// residual to be 0 (z free), otherwise z = residual/w must be integral and
/// in the box.
pub fn count_bilinear_box(target: i128, k: i64) -> Result<u128> {
    if k < 0 {
        return Err(Error::invalid("box bound must be nonnegative"));
    }
    let width = 2 * k as u128 + 1;
    let counts: Vec<u128> = (-k..=k)
        .into_par_iter()
        .map(|u| {
            let mut row = 0u128;
            for v in -k..=k {
                let residual = target - (u as i128) * (v as i128);
                // pairs (w, z) in the box with w·z = residual
                if residual == 0 {
                    // w = 0 (z free) plus z = 0 (w free), minus the double-counted origin
                    row += 2 * width - 1;
                    continue;
                }
                for w in 1..=k as i128 {
                    if residual % w == 0 && residual.abs() / w <= k as i128 {
                        row += 2; // (w, residual/w) and (−w, −residual/w)
                    }
                }
            }
            row
        })
        .collect();
    counts
        .into_iter()
        .try_fold(0u128, |acc, c| acc.checked_add(c))
        .filter(|&c| c <= i128::MAX as u128)
        .ok_or(Error::Overflow)
}

/// Exact count of quadruples (i, j, x, y), all in [−⌊λ√n⌋, ⌊λ√n⌋] ∩ ℤ,
/// with x·i + y·j = n.
///
/// Iterates ordered (i, j) pairs. Rows with i = j = 0 contribute nothing;
/// rows with one of them zero reduce to divisor membership with the other
/// variable free; general rows solve the linear Diophantine equation by
/// extended gcd and count the lattice points of the solution line inside the
/// box by interval intersection.
pub fn count_an_exact(n: u64, lambda: &Lambda) -> Result<CountRecord> {
    an_preconditions(n, lambda)?;
    let started = Instant::now();
    let k = lambda.floor_mul_sqrt(n);
    let width = 2 * k as i128 + 1;
    let target = n as i128;
    let rows: Vec<u128> = (-k..=k)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0u128;
            for j in -k..=k {
                if i == 0 && j == 0 {
                    continue;
                }
                if i == 0 {
                    // y·j = n with x free
                    if target % (j as i128) == 0 && (target / j as i128).abs() <= k as i128 {
                        acc += width as u128;
                    }
                    continue;
                }
                if j == 0 {
                    if target % (i as i128) == 0 && (target / i as i128).abs() <= k as i128 {
                        acc += width as u128;
                    }
                    continue;
                }
                let (g, s, _t) = extended_gcd(i as i128, j as i128);
                if target % g != 0 {
                    continue;
                }
                // x = x0 + (j/g)·u, y = y0 − (i/g)·u
                let x0 = s * (target / g);
                let y0 = (target - (i as i128) * x0) / (j as i128);
                let step_x = j as i128 / g;
                let step_y = -(i as i128) / g;
                let iv = intersect(
                    linear_box_interval(step_x, x0, k as i128),
                    linear_box_interval(step_y, y0, k as i128),
                );
                if let Some((lo, hi)) = iv {
                    acc += (hi - lo + 1) as u128;
                }
            }
            acc
        })
        .collect();
    let count = rows
        .into_iter()
        .try_fold(0u128, |acc, c| acc.checked_add(c))
        .filter(|&c| c <= i128::MAX as u128)
        .ok_or(Error::Overflow)?;
    Ok(CountRecord::new(an_params(n, lambda), count, Method::Fast, started))
}

pub const AN_BRUTE_MAX: u64 = 200;

/// Full quadruple enumeration; oracle for the fast counter.
pub fn count_an_brute(n: u64, lambda: &Lambda) -> Result<CountRecord> {
    an_preconditions(n, lambda)?;
    if n > AN_BRUTE_MAX {
        return Err(Error::MethodRefused {
            method: "brute",
            reason: format!("quadruple enumeration bounded at n ≤ {AN_BRUTE_MAX}, got {n}"),
        });
    }
    let started = Instant::now();
    let k = lambda.floor_mul_sqrt(n);
    let target = n as i128;
    let total: u128 = (-k..=k)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0u128;
            for j in -k..=k {
                for x in -k..=k {
                    for y in -k..=k {
                        if (x as i128) * (i as i128) + (y as i128) * (j as i128) == target {
                            acc += 1;
                        }
                    }
                }
            }
            acc
        })
        .sum();
    Ok(CountRecord::new(an_params(n, lambda), total, Method::Brute, started))
}

fn an_preconditions(n: u64, lambda: &Lambda) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be ≥ 1"));
    }
    if n > 1_000_000_000_000 {
        return Err(Error::invalid("n bounded at 10^12"));
    }
    if !lambda.is_greater_than_one() {
        return Err(Error::invalid(format!("lambda must be > 1, got {}", lambda.value())));
    }
    Ok(())
}

fn an_params(n: u64, lambda: &Lambda) -> std::collections::BTreeMap<String, serde_json::Value> {
    params_of(&[
        ("n", n.into()),
        ("lambda", format!("{}/{}", lambda.num, lambda.den).into()),
    ])
}

/// One constructed box solution of x·i + y·j = n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnSolution {
    pub i: i64,
    pub j: i64,
    pub x: i64,
    pub y: i64,
}

/// Certificate for the constructive lower bound on the box solution count:
/// every ordered coprime pair (i, j) with both entries in
/// [⌈√n⌉, ⌊λ√n⌋] yields one in-box solution, so the exact count is at least
/// `coprime_pairs`. The analytic bound Φ(m₂) − Φ(m₁) − ((λ−1)/2)·n is
/// evaluated alongside for comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstructiveAnCertificate {
    pub n: u64,
    pub lambda: f64,
    pub interval_lo: i64,
    pub interval_hi: i64,
    pub m1: i64,
    pub m2: i64,
    pub coprime_pairs: u128,
    pub analytic_lower_bound: f64,
    pub solutions: Option<Vec<AnSolution>>,
}

pub fn constructive_an(
    n: u64,
    lambda: &Lambda,
    collect_solutions: bool,
) -> Result<ConstructiveAnCertificate> {
    if n < 4 {
        return Err(Error::invalid("constructive bound needs n ≥ 4"));
    }
    if !lambda.is_greater_than_one() {
        return Err(Error::invalid("lambda must be > 1"));
    }
    let lo = {
        let f = floor_sqrt_ratio(n as i128, 1);
        if f * f == n as i128 {
            f
        } else {
            f + 1
        }
    } as i64;
    let hi = lambda.floor_mul_sqrt(n);
    let m1 = lambda.ceil_half_plus_mul_sqrt(n);
    let m2 = hi;
    let k_box = hi;

    let mut pairs = 0u128;
    let mut sols = collect_solutions.then(Vec::new);
    if lo <= hi {
        for i in lo..=hi {
            for j in lo..=hi {
                if gcd(i as i128, j as i128) != 1 {
                    continue;
                }
                pairs += 1;
                if let Some(list) = sols.as_mut() {
                    let sol = solve_congruence_solution(n, i, j);
                    debug_assert_eq!(
                        sol.x as i128 * sol.i as i128 + sol.y as i128 * sol.j as i128,
                        n as i128
                    );
                    debug_assert!(sol.x.abs() <= k_box && sol.y.abs() <= k_box);
                    list.push(sol);
                }
            }
        }
    }

    let table = totient_sieve(m1.max(m2).max(1) as usize)?;
    let analytic = table.summatory(m2 as usize) as f64 - table.summatory(m1 as usize) as f64
        - (lambda.value() - 1.0) / 2.0 * n as f64;

    Ok(ConstructiveAnCertificate {
        n,
        lambda: lambda.value(),
        interval_lo: lo,
        interval_hi: hi,
        m1,
        m2,
        coprime_pairs: pairs,
        analytic_lower_bound: analytic,
        solutions: sols,
    })
}

/// For coprime (i, j), the unique x ∈ (0, j] with i·x ≡ n (mod j), and
/// y = (n − i·x)/j. The bounds 0 < x ≤ j ≤ ⌊λ√n⌋ and
/// −⌊λ√n⌋ < y < √n hold by construction.
fn solve_congruence_solution(n: u64, i: i64, j: i64) -> AnSolution {
    let (g, s, _) = extended_gcd(i as i128, j as i128);
    debug_assert_eq!(g, 1);
    // s is i⁻¹ mod j
    let jj = j as i128;
    let mut x = (s % jj * (n as i128 % jj)) % jj;
    if x <= 0 {
        x += jj;
    }
    let y = (n as i128 - i as i128 * x) / jj;
    AnSolution {
        i,
        j,
        x: x as i64,
        y: y as i64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sieve_examples() {
        let t = totient_sieve(100).unwrap();
        assert_eq!(t.summatory(1), 1);
        // Φ(5) = 1+1+2+2+4
        assert_eq!(t.summatory(5), 10);
        for m in 1..=100 {
            assert_eq!(t.phi(m) as u64, phi_by_gcd(m as u64), "phi({m})");
        }
    }

    #[test]
    fn sieve_matches_gcd_definition_to_1000() {
        let t = totient_sieve(1000).unwrap();
        for m in 1..=1000 {
            assert_eq!(t.phi(m) as u64, phi_by_gcd(m as u64));
        }
    }

    #[test]
    fn summatory_asymptotic_at_100() {
        // |Φ(100) − 3·100²/π²| ≤ C·100·log 100 with a small C
        let t = totient_sieve(100).unwrap();
        let expect = 3.0 * 100.0f64.powi(2) / std::f64::consts::PI.powi(2);
        let dev = (t.summatory(100) as f64 - expect).abs();
        assert!(dev <= 1.0 * 100.0 * 100.0f64.ln(), "dev {dev}");
    }

    #[test]
    fn sieve_bounds() {
        assert!(totient_sieve(0).is_err());
        assert!(totient_sieve(SIEVE_MAX + 1).is_err());
    }

    #[test]
    fn coprime_examples() {
        assert_eq!(coprime_pairs(1, 1).unwrap(), 1);
        assert_eq!(coprime_pairs(1, 2).unwrap(), 3);
        assert_eq!(coprime_pairs(2, 4).unwrap(), 4);
        assert!(coprime_pairs(3, 2).is_err());
        assert!(coprime_pairs(0, 2).is_err());
    }

    #[test]
    fn coprime_methods_agree() {
        for (lo, hi) in [(1u64, 50), (2, 2), (7, 99), (100, 290), (13, 13)] {
            assert_eq!(
                coprime_pairs_gcd(lo, hi),
                coprime_pairs_moebius(lo, hi).unwrap(),
                "range [{lo},{hi}]"
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn coprime_methods_agree_random(lo in 1u64..400, width in 0u64..120) {
            let hi = lo + width;
            prop_assert_eq!(coprime_pairs_gcd(lo, hi), coprime_pairs_moebius(lo, hi).unwrap());
        }
    }

    #[test]
    fn lambda_parsing() {
        let l = Lambda::parse("1.05").unwrap();
        assert_eq!((l.num, l.den), (21, 20));
        assert_eq!(Lambda::parse("21/20").unwrap(), l);
        assert_eq!(Lambda::parse("2").unwrap(), Lambda::new(2, 1).unwrap());
        assert!(Lambda::parse("0").is_err());
        assert!(Lambda::parse("x").is_err());
        // ⌊1.05·√100⌋ = 10
        assert_eq!(l.floor_mul_sqrt(100), 10);
        // ⌈1.025·√10000⌉ = 103
        assert_eq!(l.ceil_half_plus_mul_sqrt(10_000), 103);
    }

    #[test]
    fn rate_constants() {
        // both numerators vanish identically at λ = 1
        assert_eq!(rate_numerator_pi(1.0), 0.0);
        assert_eq!(rate_numerator_pi_squared(1.0), 0.0);
        let c = solution_rate_constants(1.05).unwrap();
        assert!((c.numerator_pi - 0.3083407346410206).abs() < 1e-12);
        assert!((c.value_pi - 0.00781036).abs() < 1e-6);
        assert!(c.positive_pi);
        assert!(!c.positive_pi_squared, "2π² reading is negative at λ=1.05");
        // λ = 2 closed form (21 − 2π)/(4π²)
        let c2 = solution_rate_constants(2.0).unwrap();
        use std::f64::consts::PI;
        assert!((c2.value_pi - (21.0 - 2.0 * PI) / (4.0 * PI * PI)).abs() < 1e-15);
        assert!((c2.value_pi - 0.37278).abs() < 1e-4);
        // 2π² reading turns positive at (2π²−3)/9 ≈ 1.85991
        assert!(solution_rate_constants(1.85).unwrap().numerator_pi_squared < 0.0);
        assert!(solution_rate_constants(1.87).unwrap().numerator_pi_squared > 0.0);
        assert!(solution_rate_constants(1.0).is_err());
        assert!(solution_rate_constants(0.5).is_err());
    }

    #[test]
    fn an_small_examples_brute() {
        let l = Lambda::parse("1.05").unwrap();
        assert_eq!(count_an_brute(1, &l).unwrap().count, 20);
        assert_eq!(count_an_brute(2, &l).unwrap().count, 4);
        assert_eq!(count_an_brute(4, &l).unwrap().count, 52);
    }

    #[test]
    fn an_fast_matches_brute_spot() {
        for lam in ["1.05", "1.5", "2"] {
            let l = Lambda::parse(lam).unwrap();
            for n in [1u64, 2, 3, 4, 7, 12, 25, 48, 90, 144] {
                assert_eq!(
                    count_an_exact(n, &l).unwrap().count,
                    count_an_brute(n, &l).unwrap().count,
                    "n={n} lambda={lam}"
                );
            }
        }
    }

    #[test]
    fn an_preconditions_enforced() {
        let l = Lambda::parse("1.05").unwrap();
        assert!(count_an_exact(0, &l).is_err());
        assert!(count_an_brute(201, &l).is_err());
        let bad = Lambda::parse("1").unwrap();
        assert!(count_an_exact(10, &bad).is_err());
    }

    #[test]
    fn constructive_examples() {
        let l = Lambda::parse("1.05").unwrap();
        // n = 100: interval is {10}, gcd(10,10) = 10 → zero pairs
        let c = constructive_an(100, &l, true).unwrap();
        assert_eq!((c.interval_lo, c.interval_hi), (10, 10));
        assert_eq!(c.coprime_pairs, 0);
        assert!(c.solutions.unwrap().is_empty());

        // n = 10⁴: interval [100, 105]
        let c = constructive_an(10_000, &l, true).unwrap();
        assert_eq!((c.interval_lo, c.interval_hi), (100, 105));
        assert_eq!(c.coprime_pairs, coprime_pairs_gcd(100, 105));
        let sols = c.solutions.unwrap();
        assert_eq!(sols.len() as u128, c.coprime_pairs);
        let k = l.floor_mul_sqrt(10_000);
        let mut seen = std::collections::HashSet::new();
        for s in &sols {
            assert_eq!(s.x as i128 * s.i as i128 + s.y as i128 * s.j as i128, 10_000);
            for v in [s.i, s.j, s.x, s.y] {
                assert!(v.abs() <= k);
            }
            // distinct quadruples: the (i, j) key already distinguishes them
            assert!(seen.insert((s.i, s.j)));
        }
    }

    #[test]
    fn constructive_injects_into_exact_count() {
        let l = Lambda::parse("1.05").unwrap();
        for n in [100u64, 1156, 10_000] {
            let cert = constructive_an(n, &l, false).unwrap();
            let exact = count_an_exact(n, &l).unwrap();
            assert!(exact.count >= cert.coprime_pairs, "n={n}");
        }
    }

    #[test]
    fn bilinear_box_matches_quadruple_scan() {
        for (target, k) in [(6i128, 3i64), (0, 2), (-5, 4), (12, 5)] {
            let mut expect = 0u128;
            for u in -k..=k {
                for v in -k..=k {
                    for w in -k..=k {
                        for z in -k..=k {
                            if u as i128 * v as i128 + w as i128 * z as i128 == target {
                                expect += 1;
                            }
                        }
                    }
                }
            }
            assert_eq!(count_bilinear_box(target, k).unwrap(), expect, "t={target} k={k}");
        }
    }
}
