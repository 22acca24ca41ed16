//! Integer solution sets of small linear systems A·y = c, represented as an
//! affine sublattice y₀ + ⟨b₁, …, b_r⟩ with the basis in lower-triangular
//! column form, plus exact enumeration of the set inside intersections of
//! Euclidean balls.
//!
//! The reduction is extended-gcd column elimination (Hermite style): a
//! unimodular column operation with determinant one combines two columns so
//! the working row keeps their gcd in the pivot column and zero elsewhere.
//! The null-space basis is then re-triangularized the same way and the
//! particular solution is size-reduced against it, which keeps the
//! enumeration ranges tight.

use crate::intmath::{extended_gcd, intersect, quadratic_interval};

/// Affine sublattice of ℤ^dim: origin + integer combinations of basis columns.
/// Basis columns are lower triangular: column j has its first nonzero entry in
/// row `pivots[j]`, and pivot rows strictly increase with j.
#[derive(Clone, Debug)]
pub struct AffineLattice {
    pub dim: usize,
    pub origin: Vec<i128>,
    pub basis: Vec<Vec<i128>>,
    pub pivots: Vec<usize>,
}

/// A Euclidean ball constraint |y − center|² ≤ radius_sq on lattice points.
#[derive(Clone, Debug)]
pub struct Ball {
    pub center: Vec<i128>,
    pub radius_sq: i128,
}

impl Ball {
    pub fn at_origin(dim: usize, radius_sq: i128) -> Self {
        Ball {
            center: vec![0; dim],
            radius_sq,
        }
    }
}

/// Disjoint mutable borrows of two columns.
fn column_pair(cols: &mut [Vec<i128>], a: usize, b: usize) -> (&mut Vec<i128>, &mut Vec<i128>) {
    debug_assert!(a != b);
    if a < b {
        let (left, right) = cols.split_at_mut(b);
        (&mut left[a], &mut right[0])
    } else {
        let (left, right) = cols.split_at_mut(a);
        (&mut right[0], &mut left[b])
    }
}

/// Unimodular column operation (c_keep, c_kill) ← (s·c_keep + t·c_kill,
/// −q·c_keep + p·c_kill), determinant s·p + t·q = 1.
fn unimodular_combine(cols: &mut [Vec<i128>], keep: usize, kill: usize, s: i128, t: i128, p: i128, q: i128) {
    let (ck, cj) = column_pair(cols, keep, kill);
    for (x, y) in ck.iter_mut().zip(cj.iter_mut()) {
        let (nx, ny) = (s * *x + t * *y, -q * *x + p * *y);
        *x = nx;
        *y = ny;
    }
}

/// Clear the entry of column `kill` in `row` into column `keep` by an
/// extended-gcd combination.
fn combine_columns(cols: &mut [Vec<i128>], keep: usize, kill: usize, row: usize) {
    let a = cols[keep][row];
    let b = cols[kill][row];
    if b == 0 {
        return;
    }
    let (g, s, t) = extended_gcd(a, b);
    unimodular_combine(cols, keep, kill, s, t, a / g, b / g);
    debug_assert_eq!(cols[keep][row], g);
    debug_assert_eq!(cols[kill][row], 0);
}

/// Solve A·y = rhs over ℤ for a k×m system (k ≤ m, entries small enough that
/// i128 intermediates cannot overflow for the census-scale inputs this crate
/// accepts). Returns None when no integer solution exists.
pub fn solve_linear_system(rows: &[&[i128]], rhs: &[i128]) -> Option<AffineLattice> {
    let k = rows.len();
    assert_eq!(k, rhs.len());
    let m = rows[0].len();
    assert!(rows.iter().all(|r| r.len() == m));

    // h holds the system as columns so column ops are contiguous.
    let mut h: Vec<Vec<i128>> = (0..m).map(|j| (0..k).map(|r| rows[r][j]).collect()).collect();
    let mut v: Vec<Vec<i128>> = (0..m)
        .map(|j| (0..m).map(|i| i128::from(i == j)).collect())
        .collect();

    let mut col = 0usize;
    let mut pivot_list: Vec<(usize, usize)> = Vec::new();
    let mut dependent: Vec<usize> = Vec::new();
    for r in 0..k {
        if col == m {
            dependent.push(r);
            continue;
        }
        for j in col + 1..m {
            if h[j][r] != 0 {
                // bring gcd of (h[col][r], h[j][r]) into column `col`,
                // mirroring every operation on the transform v
                let a = h[col][r];
                let b = h[j][r];
                let (g, s, t) = extended_gcd(a, b);
                unimodular_combine(&mut h, col, j, s, t, a / g, b / g);
                unimodular_combine(&mut v, col, j, s, t, a / g, b / g);
            }
        }
        if h[col][r] == 0 {
            dependent.push(r);
            continue;
        }
        if h[col][r] < 0 {
            for x in h[col].iter_mut() {
                *x = -*x;
            }
            for x in v[col].iter_mut() {
                *x = -*x;
            }
        }
        pivot_list.push((r, col));
        col += 1;
    }
    let rank = col;

    // back-substitute through the lower-triangular leading block
    let mut w = vec![0i128; m];
    for &(r, c) in &pivot_list {
        let mut resid = rhs[r];
        for (j, wj) in w.iter().enumerate().take(c) {
            resid -= h[j][r] * wj;
        }
        if resid % h[c][r] != 0 {
            return None;
        }
        w[c] = resid / h[c][r];
    }
    for &r in &dependent {
        let mut acc = 0i128;
        for (j, wj) in w.iter().enumerate().take(rank) {
            acc += h[j][r] * wj;
        }
        if acc != rhs[r] {
            return None;
        }
    }

    let mut origin = vec![0i128; m];
    for (j, wj) in w.iter().enumerate().take(rank) {
        if *wj != 0 {
            for i in 0..m {
                origin[i] += v[j][i] * wj;
            }
        }
    }
    let mut basis: Vec<Vec<i128>> = v[rank..].to_vec();
    let pivots = triangularize(&mut basis, &mut origin, m);
    Some(AffineLattice {
        dim: m,
        origin,
        basis,
        pivots,
    })
}

/// Put basis columns in lower-triangular column form (pivot rows strictly
/// increasing, pivots positive, entries left of a pivot reduced modulo it)
/// and size-reduce the origin against the basis. Returns the pivot rows.
fn triangularize(basis: &mut [Vec<i128>], origin: &mut [i128], m: usize) -> Vec<usize> {
    let r = basis.len();
    let mut pivots = Vec::with_capacity(r);
    let mut placed = 0usize;
    for row in 0..m {
        if placed == r {
            break;
        }
        for j in placed + 1..r {
            combine_columns(basis, placed, j, row);
        }
        if basis[placed][row] == 0 {
            continue;
        }
        if basis[placed][row] < 0 {
            for x in basis[placed].iter_mut() {
                *x = -*x;
            }
        }
        let pivot = basis[placed][row];
        for j in 0..placed {
            let t = basis[j][row].div_euclid(pivot);
            if t != 0 {
                let (cj, cp) = column_pair(basis, j, placed);
                for (x, &b) in cj[row..].iter_mut().zip(&cp[row..]) {
                    *x -= t * b;
                }
            }
        }
        let t = origin[row].div_euclid(pivot);
        if t != 0 {
            for (o, &b) in origin[row..].iter_mut().zip(&basis[placed][row..]) {
                *o -= t * b;
            }
        }
        pivots.push(row);
        placed += 1;
    }
    assert_eq!(placed, r, "basis columns must be linearly independent");
    pivots
}

impl AffineLattice {
    /// Exact number of lattice points inside every ball. Counting never
    /// materializes points: the innermost basis direction is resolved by
    /// integer quadratic intervals.
    pub fn count_in_balls(&self, balls: &[Ball]) -> u128 {
        let mut total = 0u128;
        self.walk(balls, &mut |n, _| total += n, false);
        total
    }

    /// Visit every lattice point inside every ball.
    pub fn for_each_in_balls(&self, balls: &[Ball], f: &mut dyn FnMut(&[i128])) {
        self.walk(balls, &mut |_, pt| f(pt.expect("visit mode yields points")), true);
    }

    fn walk(
        &self,
        balls: &[Ball],
        emit: &mut dyn FnMut(u128, Option<&[i128]>),
        visit: bool,
    ) {
        debug_assert!(balls.iter().all(|b| b.center.len() == self.dim));
        let r = self.basis.len();
        let mut point = self.origin.clone();
        if r == 0 {
            let ok = balls.iter().all(|b| {
                let s: i128 = (0..self.dim)
                    .map(|i| {
                        let dlt = point[i] - b.center[i];
                        dlt * dlt
                    })
                    .sum();
                s <= b.radius_sq
            });
            if ok {
                emit(1, visit.then_some(point.as_slice()));
            }
            return;
        }
        // partial square sums over rows < pivots[0]
        let partial: Vec<i128> = balls
            .iter()
            .map(|b| {
                (0..self.pivots[0])
                    .map(|i| {
                        let dlt = point[i] - b.center[i];
                        dlt * dlt
                    })
                    .sum()
            })
            .collect();
        if partial.iter().zip(balls).any(|(&p, b)| p > b.radius_sq) {
            return;
        }
        self.level(0, balls, partial, &mut point, emit, visit);
    }

    fn level(
        &self,
        j: usize,
        balls: &[Ball],
        partial: Vec<i128>,
        point: &mut Vec<i128>,
        emit: &mut dyn FnMut(u128, Option<&[i128]>),
        visit: bool,
    ) {
        let r = self.basis.len();
        let p_j = self.pivots[j];
        let col = &self.basis[j];
        if j + 1 == r {
            // leaf: all remaining rows are linear in s
            let mut range: Option<(i128, i128)> = None;
            let mut first = true;
            for (b, &part) in balls.iter().zip(&partial) {
                let budget = b.radius_sq - part;
                if budget < 0 {
                    return;
                }
                let mut qa = 0i128;
                let mut qb = 0i128;
                let mut qc = -budget;
                for i in p_j..self.dim {
                    let u = col[i];
                    let base = point[i] - b.center[i];
                    qa += u * u;
                    qb += 2 * u * base;
                    qc += base * base;
                }
                debug_assert!(qa > 0);
                let iv = quadratic_interval(qa, qb, qc);
                range = if first { iv } else { intersect(range, iv) };
                first = false;
                if range.is_none() {
                    return;
                }
            }
            if let Some((lo, hi)) = range {
                if visit {
                    for s in lo..=hi {
                        let pt: Vec<i128> = (0..self.dim)
                            .map(|i| point[i] + if i >= p_j { s * col[i] } else { 0 })
                            .collect();
                        emit(1, Some(&pt));
                    }
                } else {
                    emit((hi - lo + 1) as u128, None);
                }
            }
            return;
        }
        // bound s by the pivot row alone, then recurse with refreshed partials
        let mut range: Option<(i128, i128)> = None;
        let mut first = true;
        let coef = col[p_j];
        for (b, &part) in balls.iter().zip(&partial) {
            let budget = b.radius_sq - part;
            if budget < 0 {
                return;
            }
            let base = point[p_j] - b.center[p_j];
            // (base + coef·s)² ≤ budget
            let iv = quadratic_interval(coef * coef, 2 * coef * base, base * base - budget);
            range = if first { iv } else { intersect(range, iv) };
            first = false;
            if range.is_none() {
                return;
            }
        }
        let (lo, hi) = match range {
            Some(r) => r,
            None => return,
        };
        let next_p = self.pivots[j + 1];
        for s in lo..=hi {
            if s != 0 {
                for (pt, &c) in point[p_j..].iter_mut().zip(&col[p_j..]) {
                    *pt += s * c;
                }
            }
            let mut next_partial = Vec::with_capacity(balls.len());
            let mut feasible = true;
            for (b, &part) in balls.iter().zip(&partial) {
                let mut acc = part;
                for (pt, c) in point[p_j..next_p].iter().zip(&b.center[p_j..next_p]) {
                    let dlt = pt - c;
                    acc += dlt * dlt;
                }
                if acc > b.radius_sq {
                    feasible = false;
                    break;
                }
                next_partial.push(acc);
            }
            if feasible {
                self.level(j + 1, balls, next_partial, point, emit, visit);
            }
            if s != 0 {
                for (pt, &c) in point[p_j..].iter_mut().zip(&col[p_j..]) {
                    *pt -= s * c;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_count(rows: &[&[i128]], rhs: &[i128], balls: &[Ball], scan: i128) -> u128 {
        let m = rows[0].len();
        let mut count = 0u128;
        let mut y = vec![-scan; m];
        loop {
            let solves = rows
                .iter()
                .zip(rhs)
                .all(|(row, &c)| row.iter().zip(&y).map(|(a, b)| a * b).sum::<i128>() == c);
            if solves {
                let inside = balls.iter().all(|b| {
                    y.iter()
                        .zip(&b.center)
                        .map(|(a, c)| (a - c) * (a - c))
                        .sum::<i128>()
                        <= b.radius_sq
                });
                if inside {
                    count += 1;
                }
            }
            let mut k = 0;
            loop {
                if k == m {
                    return count;
                }
                y[k] += 1;
                if y[k] <= scan {
                    break;
                }
                y[k] = -scan;
                k += 1;
            }
        }
    }

    #[test]
    fn single_equation_line() {
        // 2y₁ + 3y₂ = 1 inside |y|² ≤ 100
        let rows: Vec<&[i128]> = vec![&[2, 3]];
        let lat = solve_linear_system(&rows, &[1]).unwrap();
        let balls = [Ball::at_origin(2, 100)];
        let got = lat.count_in_balls(&balls);
        assert_eq!(got, brute_count(&rows, &[1], &balls, 20));
    }

    #[test]
    fn no_solution_when_gcd_fails() {
        let rows: Vec<&[i128]> = vec![&[2, 4, 6]];
        assert!(solve_linear_system(&rows, &[3]).is_none());
    }

    #[test]
    fn zero_row_consistency() {
        let rows: Vec<&[i128]> = vec![&[0, 0]];
        assert!(solve_linear_system(&rows, &[5]).is_none());
        let lat = solve_linear_system(&rows, &[0]).unwrap();
        // whole plane: count inside radius² 2 ball = 9 points? |y|² ≤ 2 →
        // (0,0),(±1,0),(0,±1),(±1,±1) = 9
        assert_eq!(lat.count_in_balls(&[Ball::at_origin(2, 2)]), 9);
    }

    #[test]
    fn visit_matches_count() {
        let rows: Vec<&[i128]> = vec![&[1, 2, -1]];
        let lat = solve_linear_system(&rows, &[4]).unwrap();
        let balls = [
            Ball::at_origin(3, 64),
            Ball {
                center: vec![1, 1, 0],
                radius_sq: 50,
            },
        ];
        let count = lat.count_in_balls(&balls);
        let mut seen = Vec::new();
        lat.for_each_in_balls(&balls, &mut |p| seen.push(p.to_vec()));
        assert_eq!(count as usize, seen.len());
        for p in &seen {
            assert_eq!(p[0] + 2 * p[1] - p[2], 4);
            assert!(p.iter().map(|x| x * x).sum::<i128>() <= 64);
        }
        seen.sort();
        seen.dedup();
        assert_eq!(count as usize, seen.len(), "visited points must be distinct");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn counts_match_brute_force(
            m in 2usize..=4,
            k in 1usize..3,
            entries in prop::collection::vec(-5i128..=5, 16),
            rhs in prop::collection::vec(-12i128..=12, 2),
            r2 in 1i128..=60,
            cshift in -2i128..=2,
        ) {
            let rows_vec: Vec<Vec<i128>> = (0..k).map(|r| entries[r*m..(r+1)*m].to_vec()).collect();
            let rows: Vec<&[i128]> = rows_vec.iter().map(|r| r.as_slice()).collect();
            let rhs = &rhs[..k];
            let balls = vec![
                Ball::at_origin(m, r2),
                Ball { center: vec![cshift; m], radius_sq: r2 + 10 },
            ];
            let got = match solve_linear_system(&rows, rhs) {
                Some(lat) => {
                    // sanity: origin must solve the system
                    for (row, &c) in rows.iter().zip(rhs) {
                        let v: i128 = row.iter().zip(&lat.origin).map(|(a, b)| a * b).sum();
                        prop_assert_eq!(v, c);
                    }
                    lat.count_in_balls(&balls)
                }
                None => 0,
            };
            let expect = brute_count(&rows, rhs, &balls, 12);
            prop_assert_eq!(got, expect);
        }
    }

    #[test]
    fn high_rank_enumeration_matches_brute() {
        // rank-4 null space (one equation in five unknowns) and a rank-3
        // case with two equations: the recursion passes several non-leaf
        // levels with partial-sum pruning
        let rows: Vec<&[i128]> = vec![&[2, -3, 1, 4, -1]];
        let lat = solve_linear_system(&rows, &[3]).unwrap();
        assert_eq!(lat.basis.len(), 4);
        let balls = [Ball::at_origin(5, 30)];
        assert_eq!(
            lat.count_in_balls(&balls),
            brute_count(&rows, &[3], &balls, 8)
        );

        let rows: Vec<&[i128]> = vec![&[1, 2, 0, -1, 3], &[0, 1, 1, 1, -2]];
        let lat = solve_linear_system(&rows, &[2, -1]).unwrap();
        assert_eq!(lat.basis.len(), 3);
        let balls = [
            Ball::at_origin(5, 26),
            Ball {
                center: vec![1, 0, -1, 0, 1],
                radius_sq: 30,
            },
        ];
        let count = lat.count_in_balls(&balls);
        assert_eq!(count, brute_count(&rows, &[2, -1], &balls, 8));
        // and the visitor agrees with the counter point for point
        let mut seen = 0u128;
        lat.for_each_in_balls(&balls, &mut |p| {
            assert_eq!(p[0] + 2 * p[1] - p[3] + 3 * p[4], 2);
            assert_eq!(p[1] + p[2] + p[3] - 2 * p[4], -1);
            seen += 1;
        });
        assert_eq!(seen, count);
    }
}
