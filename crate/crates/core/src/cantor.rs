//! Two-branch self-similar Cantor sets with exact depth-m interval masses,
//! doubled copies and their product measure, fattened simplex-node boxes,
//! and the threshold dimension-vector identities.
//!
//! A set of nominal dimension α ∈ (0, 1] is realized with branch ratio
//! r = 2^{−1/α} (so dim = log 2 / log(1/r)); the depth-m approximant is the
//! uniform measure on 2^m intervals of length r^m, each carrying mass 2^{−m}.
//! All interval masses here are exact rationals; the deviation from the
//! depth-∞ measure is at most 2·2^{−m} per queried interval (one boundary
//! leaf per endpoint).

use crate::error::Error;
use crate::Result;
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn pow2_inv(level: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << level)
}

/// Parse "p/q" or a plain decimal into an exact rational.
pub fn parse_big_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("cannot parse rational {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p.trim().parse().map_err(|_| bad())?;
        let den: BigInt = q.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1i64, r),
        None => (1, s),
    };
    if let Some((int, frac)) = rest.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: BigInt = if int.is_empty() { BigInt::zero() } else { int.parse().map_err(|_| bad())? };
        let fnum: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(big(sign) * BigRational::new(int * &scale + fnum, scale));
    }
    let int: BigInt = rest.parse().map_err(|_| bad())?;
    Ok(big(sign) * BigRational::from_integer(int))
}

/// One Cantor set with its depth-m measure. `degenerate` marks the α = 0
/// limit, a unit point mass at 0.
#[derive(Clone, Debug)]
pub struct CantorSpec {
    pub alpha: f64,
    pub ratio: BigRational,
    pub depth: u32,
    pub degenerate: bool,
}

impl CantorSpec {
    /// From an explicit branch ratio 0 < r ≤ 1/2.
    pub fn from_ratio(ratio: BigRational, depth: u32) -> Result<Self> {
        if ratio <= BigRational::zero() || ratio > BigRational::new(BigInt::one(), BigInt::from(2)) {
            return Err(Error::invalid("branch ratio must satisfy 0 < r ≤ 1/2"));
        }
        let rf = ratio_to_f64(&ratio);
        Ok(CantorSpec {
            alpha: std::f64::consts::LN_2 / (1.0 / rf).ln(),
            ratio,
            depth,
            degenerate: false,
        })
    }

    /// From a rational dimension α ∈ [0, 1]. The branch ratio 2^{−1/α} is
    /// rational exactly when 1/α is a positive integer; other α are rejected
    /// (pass the ratio directly for sets like the middle-thirds one).
    pub fn from_alpha(alpha: Ratio<i64>, depth: u32) -> Result<Self> {
        if alpha < Ratio::new(0, 1) || alpha > Ratio::new(1, 1) {
            return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        if alpha == Ratio::new(0, 1) {
            return Ok(CantorSpec::point_mass(depth));
        }
        let (num, den) = (*alpha.numer(), *alpha.denom());
        if den % num != 0 {
            return Err(Error::invalid(format!(
                "2^(-1/alpha) is irrational for alpha = {alpha}; construct from the ratio instead"
            )));
        }
        let t = (den / num) as u32;
        CantorSpec::from_ratio(pow2_inv(t), depth)
    }

    /// The α = 0 degeneration: unit mass at the single point 0.
    pub fn point_mass(depth: u32) -> Self {
        CantorSpec {
            alpha: 0.0,
            ratio: BigRational::zero(),
            depth,
            degenerate: true,
        }
    }

    /// Depth-m mass of the closed interval [lo, hi], exact.
    pub fn interval_mass(&self, lo: &BigRational, hi: &BigRational) -> Result<BigRational> {
        if lo > hi {
            return Err(Error::invalid("interval needs lo ≤ hi"));
        }
        if self.degenerate {
            let zero = BigRational::zero();
            return Ok(if lo <= &zero && hi >= &zero { big(1) } else { big(0) });
        }
        Ok(self.node_mass(0, &BigRational::zero(), &big(1), lo, hi))
    }

    /// Recursive subdivision with pruning: nodes disjoint from the query
    /// contribute nothing, nodes inside it their full 2^{−level}; leaves
    /// contribute their overlap fraction.
    fn node_mass(
        &self,
        level: u32,
        node_lo: &BigRational,
        node_len: &BigRational,
        lo: &BigRational,
        hi: &BigRational,
    ) -> BigRational {
        let node_hi = node_lo + node_len;
        if hi <= node_lo || *lo >= node_hi {
            return BigRational::zero();
        }
        if lo <= node_lo && *hi >= node_hi {
            return pow2_inv(level);
        }
        if level == self.depth {
            let cap_hi = if hi < &node_hi { hi.clone() } else { node_hi };
            let cap_lo = if lo > node_lo { lo.clone() } else { node_lo.clone() };
            let overlap = &cap_hi - &cap_lo;
            if overlap <= BigRational::zero() {
                return BigRational::zero();
            }
            return pow2_inv(level) * overlap / node_len.clone();
        }
        let child_len = node_len * &self.ratio;
        let right_lo = &node_hi - &child_len;
        self.node_mass(level + 1, node_lo, &child_len, lo, hi)
            + self.node_mass(level + 1, &right_lo, &child_len, lo, hi)
    }

    /// Oracle: the same mass by enumerating all 2^depth leaves.
    pub fn interval_mass_enumerated(&self, lo: &BigRational, hi: &BigRational) -> Result<BigRational> {
        if self.degenerate {
            return self.interval_mass(lo, hi);
        }
        if self.depth > 20 {
            return Err(Error::invalid("leaf enumeration bounded at depth ≤ 20"));
        }
        let m = self.depth;
        let leaf_mass = pow2_inv(m);
        let mut total = BigRational::zero();
        let mut leaf_len = big(1);
        for _ in 0..m {
            leaf_len *= &self.ratio;
        }
        for leaf in 0u64..(1u64 << m) {
            let mut pos = BigRational::zero();
            let mut len = big(1);
            for bit in 0..m {
                let child_len = &len * &self.ratio;
                if leaf >> (m - 1 - bit) & 1 == 1 {
                    pos = pos + &len - &child_len;
                }
                len = child_len;
            }
            let node_hi = &pos + &leaf_len;
            let cap_hi = if hi < &node_hi { hi.clone() } else { node_hi };
            let cap_lo = if lo > &pos { lo.clone() } else { pos.clone() };
            let overlap = &cap_hi - &cap_lo;
            if overlap > BigRational::zero() {
                total += &leaf_mass * overlap / &leaf_len;
            }
        }
        Ok(total)
    }

    /// Distance between the depth-m mass and the limit measure on any
    /// interval is at most this.
    pub fn error_bound(&self) -> BigRational {
        if self.degenerate {
            BigRational::zero()
        } else {
            big(2) * pow2_inv(self.depth)
        }
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    // adequate for reporting; exact arithmetic never goes through here
    let num = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let den = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    num / den
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    ratio_to_f64(r)
}

/// One product axis: a Cantor set, optionally doubled into C ∪ (C − 1) with
/// half the mass on each copy.
#[derive(Clone, Debug)]
pub struct AxisSpec {
    pub cantor: CantorSpec,
    pub doubled: bool,
}

impl AxisSpec {
    pub fn mass(&self, lo: &BigRational, hi: &BigRational) -> Result<BigRational> {
        if !self.doubled {
            return self.cantor.interval_mass(lo, hi);
        }
        let one = big(1);
        let shifted = self.cantor.interval_mass(&(lo + &one), &(hi + &one))?;
        let plain = self.cantor.interval_mass(lo, hi)?;
        Ok((plain + shifted) / big(2))
    }
}

/// Product of per-axis doubled Cantor measures.
#[derive(Clone, Debug)]
pub struct ProductSpec {
    pub axes: Vec<AxisSpec>,
}

impl ProductSpec {
    /// The doubled-axes product with the given per-axis dimensions.
    pub fn doubled(alphas: &[Ratio<i64>], depth: u32) -> Result<Self> {
        let axes = alphas
            .iter()
            .map(|&a| {
                Ok(AxisSpec {
                    cantor: CantorSpec::from_alpha(a, depth)?,
                    doubled: true,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductSpec { axes })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Product measure of an axis-aligned box.
    pub fn box_mass(&self, intervals: &[(BigRational, BigRational)]) -> Result<BigRational> {
        if intervals.len() != self.axes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.axes.len(),
                got: intervals.len(),
            });
        }
        let mut total = big(1);
        for (axis, (lo, hi)) in self.axes.iter().zip(intervals) {
            total *= axis.mass(lo, hi)?;
            if total.is_zero() {
                break;
            }
        }
        Ok(total)
    }
}

/// The k fattened node boxes of the orthogonal simplex configuration at a
/// corner of the product set. The corner x = (−1, …, −1) puts every
/// coordinate at the left endpoint of the shifted copy; node j sits at
/// x + e_j, and its box has side ε along the first k axes and √ε along the
/// rest. The pair distances of the configuration are 1 (corner to node) and
/// √2 (node to node), C(k+1, 2) distances in all.
#[derive(Clone, Debug)]
pub struct SimplexBoxConfig {
    pub k: usize,
    pub d: usize,
    pub eps_exp: u32,
    /// per-node axis-aligned boxes, each a product of d intervals
    pub boxes: Vec<Vec<(BigRational, BigRational)>>,
    /// node centers, all inside [−1, 1]^d
    pub centers: Vec<Vec<i64>>,
    pub target_distances: Vec<f64>,
}

impl SimplexBoxConfig {
    /// ε = 2^{−eps_exp}; the exponent must be even when √ε sides occur
    /// (k < d) so every interval endpoint stays dyadic.
    pub fn new(k: usize, d: usize, eps_exp: u32) -> Result<Self> {
        if k == 0 || k > d {
            return Err(Error::invalid(format!("need 1 ≤ k ≤ d, got k={k}, d={d}")));
        }
        if k < d && !eps_exp.is_multiple_of(2) {
            return Err(Error::invalid(
                "√ε box sides need an even dyadic exponent when k < d",
            ));
        }
        let half_eps = pow2_inv(eps_exp + 1);
        let half_sqrt_eps = pow2_inv(eps_exp / 2 + 1);
        let mut boxes = Vec::with_capacity(k);
        let mut centers = Vec::with_capacity(k);
        for j in 0..k {
            let mut intervals = Vec::with_capacity(d);
            let mut center_coords = Vec::with_capacity(d);
            for i in 0..d {
                let c: i64 = if i == j { 0 } else { -1 };
                center_coords.push(c);
                let center = big(c);
                let half = if i < k { half_eps.clone() } else { half_sqrt_eps.clone() };
                intervals.push((&center - &half, &center + &half));
            }
            debug_assert!(center_coords.iter().all(|&c| (-1..=1).contains(&c)));
            boxes.push(intervals);
            centers.push(center_coords);
        }
        let mut target_distances = vec![1.0; k];
        target_distances.extend(std::iter::repeat_n(std::f64::consts::SQRT_2, k * (k - 1) / 2));
        Ok(SimplexBoxConfig {
            k,
            d,
            eps_exp,
            boxes,
            centers,
            target_distances,
        })
    }
}

/// Combined mass of the k fattened node boxes, for ε = 2^{−eps_exp}.
#[derive(Clone, Debug)]
pub struct SimplexBoxReport {
    pub eps_exp: u32,
    pub epsilon: f64,
    pub mass: BigRational,
    pub mass_f64: f64,
    /// k(Σ_{i≤k} α_i + Σ_{i>k} α_i/2)
    pub predicted_exponent: Ratio<i64>,
    pub predicted_mass_f64: f64,
}

/// Product-measure mass of the node-box configuration. The recursion depth
/// must reach eps_exp + 1 so node boundaries refine every box endpoint and
/// each mass is exact.
pub fn simplex_box_mass(
    k: usize,
    d: usize,
    alphas: &[Ratio<i64>],
    eps_exp: u32,
    depth: u32,
) -> Result<SimplexBoxReport> {
    if alphas.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: alphas.len(),
        });
    }
    let config = SimplexBoxConfig::new(k, d, eps_exp)?;
    if depth < eps_exp + 1 {
        return Err(Error::invalid(format!(
            "depth {depth} too small for ε = 2^-{eps_exp}: need depth ≥ {}",
            eps_exp + 1
        )));
    }
    let product = ProductSpec::doubled(alphas, depth)?;

    let mut mass = big(1);
    for intervals in &config.boxes {
        mass *= product.box_mass(intervals)?;
        if mass.is_zero() {
            break;
        }
    }

    let mut exponent = Ratio::new(0i64, 1);
    for (i, &a) in alphas.iter().enumerate() {
        exponent += if i < k { a } else { a / 2 };
    }
    exponent *= Ratio::new(k as i64, 1);
    let predicted_mass_f64 =
        2f64.powf(-(eps_exp as f64) * (*exponent.numer() as f64 / *exponent.denom() as f64));
    Ok(SimplexBoxReport {
        eps_exp,
        epsilon: 2f64.powi(-(eps_exp as i32)),
        mass_f64: ratio_to_f64(&mass),
        mass,
        predicted_exponent: exponent,
        predicted_mass_f64,
    })
}

pub fn simplex_box_sweep(
    k: usize,
    d: usize,
    alphas: &[Ratio<i64>],
    eps_exps: &[u32],
    depth: u32,
) -> Result<Vec<SimplexBoxReport>> {
    eps_exps
        .iter()
        .map(|&t| simplex_box_mass(k, d, alphas, t, depth))
        .collect()
}

/// The threshold dimension vector for (k, d) with k ≤ d ≤ 2k+1 and the two
/// exact identities it satisfies: the dimensions sum to (d+1)/2 and the
/// combined box exponent equals k(k+1)/2.
#[derive(Clone, Debug)]
pub struct ThresholdReport {
    pub k: usize,
    pub d: usize,
    pub alphas: Vec<Ratio<i64>>,
    pub dim_sum: Ratio<i64>,
    pub dim_sum_matches: bool,
    pub box_exponent: Ratio<i64>,
    pub box_exponent_matches: bool,
    /// the first k entries vanish at d = 2k+1 (point-mass degeneration)
    pub degenerate: bool,
}

pub fn threshold_alphas(k: usize, d: usize) -> Result<ThresholdReport> {
    if k == 0 {
        return Err(Error::invalid("k must be ≥ 1"));
    }
    if d < k || d > 2 * k + 1 {
        return Err(Error::invalid(format!(
            "threshold assignment needs k ≤ d ≤ 2k+1, got k={k}, d={d}"
        )));
    }
    let kk = k as i64;
    let dd = d as i64;
    let head = Ratio::new(2 * kk + 1 - dd, 2 * kk);
    let mut alphas = vec![head; k];
    alphas.extend(std::iter::repeat_n(Ratio::new(1, 1), d - k));
    let dim_sum: Ratio<i64> = alphas.iter().sum();
    let mut box_exponent = Ratio::new(0i64, 1);
    for (i, &a) in alphas.iter().enumerate() {
        box_exponent += if i < k { a } else { a / 2 };
    }
    box_exponent *= Ratio::new(kk, 1);
    Ok(ThresholdReport {
        k,
        d,
        alphas,
        dim_sum,
        dim_sum_matches: dim_sum == Ratio::new(dd + 1, 2),
        box_exponent,
        box_exponent_matches: box_exponent == Ratio::new(kk * (kk + 1), 2),
        degenerate: head == Ratio::new(0, 1),
    })
}
