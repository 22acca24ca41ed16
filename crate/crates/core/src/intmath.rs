//! Exact integer helpers shared by the counting modules: gcd / extended gcd,
//! integer square roots (plain and of rationals), floor/ceil division, and
//! integer solution intervals of quadratic inequalities.

/// Greatest common divisor, always nonnegative. `gcd(0, 0) == 0`.
pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended gcd: returns `(g, s, t)` with `s*a + t*b == g` and `g == gcd(a, b) >= 0`.
pub fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Floor division for any sign of divisor.
pub fn floor_div(a: i128, b: i128) -> i128 {
    debug_assert!(b != 0);
    if b < 0 {
        floor_div(-a, -b)
    } else {
        a.div_euclid(b)
    }
}

/// Ceiling division for any sign of divisor.
pub fn ceil_div(a: i128, b: i128) -> i128 {
    debug_assert!(b != 0);
    if b < 0 {
        ceil_div(-a, -b)
    } else {
        -(-a).div_euclid(b)
    }
}

/// ⌊√v⌋ for v ≥ 0.
pub fn floor_sqrt(v: i128) -> i128 {
    assert!(v >= 0, "floor_sqrt of negative value");
    (v as u128).isqrt() as i128
}

/// ⌊√(p/q)⌋ for p ≥ 0, q > 0.
///
/// Exact: for k = ⌊√⌊p/q⌋⌋ we have k² ≤ ⌊p/q⌋ ≤ p/q and
/// (k+1)² ≥ ⌊p/q⌋ + 1 > p/q, so k is also the floor square root of p/q.
pub fn floor_sqrt_ratio(p: i128, q: i128) -> i128 {
    assert!(p >= 0 && q > 0);
    floor_sqrt(p.div_euclid(q))
}

/// ⌈√(p/q)⌉ for p ≥ 0, q > 0.
pub fn ceil_sqrt_ratio(p: i128, q: i128) -> i128 {
    let f = floor_sqrt_ratio(p, q);
    if f * f * q >= p {
        f
    } else {
        f + 1
    }
}

/// Integer solution interval of `a·t² + b·t + c ≤ 0` with `a > 0`.
///
/// Returns the closed interval `[⌈root₋⌉, ⌊root₊⌋]`, or `None` when no
/// integer satisfies the inequality. Exact: roots are located with an
/// integer square root of the discriminant and the endpoints are then
/// corrected by direct evaluation. Panics if the discriminant overflows
/// i128 rather than miscounting; the census preconditions keep every
/// caller far below that bound.
pub fn quadratic_interval(a: i128, b: i128, c: i128) -> Option<(i128, i128)> {
    debug_assert!(a > 0);
    let disc = match (b.checked_mul(b), (4 * a).checked_mul(c)) {
        (Some(bb), Some(fac)) => bb.checked_sub(fac),
        _ => None,
    }
    .expect("quadratic interval coefficients exceed the supported i128 range");
    if disc < 0 {
        return None;
    }
    let sd = floor_sqrt(disc);
    let two_a = 2 * a;
    let eval = |t: i128| a * t * t + b * t + c;
    let mut hi = floor_div(-b + sd, two_a);
    for _ in 0..3 {
        if eval(hi + 1) <= 0 {
            hi += 1;
        }
    }
    for _ in 0..3 {
        if eval(hi) > 0 {
            hi -= 1;
        }
    }
    let mut lo = floor_div(-b - sd, two_a);
    for _ in 0..3 {
        if eval(lo - 1) <= 0 {
            lo -= 1;
        }
    }
    for _ in 0..3 {
        if eval(lo) > 0 {
            lo += 1;
        }
    }
    if lo > hi || eval(lo) > 0 || eval(hi) > 0 {
        None
    } else {
        Some((lo, hi))
    }
}

/// Integer interval of u with `|base + coef·u| ≤ bound` (coef ≠ 0, bound ≥ 0).
pub fn linear_box_interval(coef: i128, base: i128, bound: i128) -> Option<(i128, i128)> {
    debug_assert!(coef != 0 && bound >= 0);
    let (lo_val, hi_val) = (-bound - base, bound - base);
    let (lo, hi) = if coef > 0 {
        (ceil_div(lo_val, coef), floor_div(hi_val, coef))
    } else {
        (ceil_div(hi_val, coef), floor_div(lo_val, coef))
    };
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

/// Intersection of two optional closed intervals.
pub fn intersect(
    a: Option<(i128, i128)>,
    b: Option<(i128, i128)>,
) -> Option<(i128, i128)> {
    let (a, b) = (a?, b?);
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}
