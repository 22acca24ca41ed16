//! The lattice-cube measure, its triangle incidence mass, the energy
//! integral estimate, and the closing exponent algebra for the tetrahedra
//! question.
//!
//! The measure lives on cubes of side ε centered at the lattice points
//! inside the half-open box [−2,2)^d, where ε is pinned by ε^s = n^{−(d+1)}.
//! Each cube carries unnormalized mass ε^s; dividing by the 4^d total makes
//! it a probability measure. For s ≤ (d+1)/2 the cube side stays below the
//! finest lattice spacing 1/n², so the cubes are disjoint.

use crate::analysis::{loglog_fit, FitResult};
use crate::census::{count_triangles, TriangleCapCombo};
use crate::error::Error;
use crate::records::Method;
use crate::rng::CounterRng;
use crate::Result;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MeasureParams {
    pub d: usize,
    pub s: f64,
    pub n: u32,
    /// cube side, n^{−(d+1)/s}
    pub epsilon: f64,
    /// ε^s = n^{−(d+1)}, the unnormalized per-cube mass
    pub per_cube_mass: f64,
    /// lattice points of the support box [−2,2)^d: 4^d·n^{d+1}
    pub cube_count: u128,
    /// unnormalized total mass, 4^d
    pub total_mass: f64,
    /// multiply unnormalized masses by this to make the measure a probability
    pub normalization: f64,
}

pub fn mu_params(d: usize, s: f64, n: u32) -> Result<MeasureParams> {
    if d < 2 {
        return Err(Error::invalid(format!("measure dimension must be ≥ 2, got {d}")));
    }
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::invalid(format!("measure scale n must be even and positive, got {n}")));
    }
    if !s.is_finite() || s < d as f64 / 2.0 || s > (d as f64 + 1.0) / 2.0 {
        return Err(Error::invalid(format!(
            "s must lie in [d/2, (d+1)/2] = [{}, {}], got {s}",
            d as f64 / 2.0,
            (d as f64 + 1.0) / 2.0
        )));
    }
    let epsilon = (n as f64).powf(-((d as f64) + 1.0) / s);
    let per_cube_mass = (n as f64).powi(-(d as i32) - 1);
    let cube_count = box_lattice_point_count(d, n)?;
    let total_mass = 4f64.powi(d as i32);
    Ok(MeasureParams {
        d,
        s,
        n,
        epsilon,
        per_cube_mass,
        cube_count,
        total_mass,
        normalization: total_mass.recip(),
    })
}

/// Lattice points of the scaled lattice in [−2,2)^d: 4n per short axis,
/// 4n² on the last axis.
pub fn box_lattice_point_count(d: usize, n: u32) -> Result<u128> {
    let n = n as u128;
    (4 * n)
        .checked_pow(d as u32 - 1)
        .and_then(|v| v.checked_mul(4 * n * n))
        .ok_or(Error::Overflow)
}

/// Anchors whose whole triangle stays inside the support box: offsets of an
/// anchored unit triangle lie in [−1,1]^d, so anchors range over the window
/// [−1,1)^d with 2^d·n^{d+1} lattice points.
pub fn anchor_window_point_count(d: usize, n: u32) -> Result<u128> {
    let n = n as u128;
    (2 * n)
        .checked_pow(d as u32 - 1)
        .and_then(|v| v.checked_mul(2 * n * n))
        .ok_or(Error::Overflow)
}

/// Normalized triple-measure mass contributed by the exact unit triangles
/// with anchors in the window: count × (normalized per-cube mass)³.
/// Deterministic product of the census count and fixed powers of n.
pub fn incidence_mass(params: &MeasureParams, anchored_count: u128) -> Result<f64> {
    let window = anchor_window_point_count(params.d, params.n)?;
    let triangles = anchored_count.checked_mul(window).ok_or(Error::Overflow)?;
    let q = params.per_cube_mass * params.normalization;
    Ok(triangles as f64 * q * q * q)
}

/// Pair distance targets of a configuration band: the mass estimator asks
/// for every pairwise gauge distance to land within ε of its target.
/// The triangle census realizes the all-ones tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetDistances(Vec<f64>);

impl TargetDistances {
    pub fn new(targets: Vec<f64>) -> Result<Self> {
        if targets.is_empty() || targets.iter().any(|&t| t <= 0.0 || !t.is_finite()) {
            return Err(Error::invalid("target distances must be positive and finite"));
        }
        Ok(TargetDistances(targets))
    }

    /// The three unit pair distances of a unit triangle.
    pub fn unit_triangle() -> Self {
        TargetDistances(vec![1.0; 3])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IncidenceRow {
    pub n: u32,
    pub epsilon: f64,
    pub mass: f64,
    pub mass_over_eps3: f64,
    pub anchored_count: u128,
}

/// Sweep the incidence mass over a list of even n at fixed (d, s), using the
/// fast census for the default cap assignment.
pub fn incidence_sweep(d: usize, s: f64, n_list: &[u32]) -> Result<Vec<IncidenceRow>> {
    if n_list.is_empty() {
        return Err(Error::InsufficientData("empty sweep".into()));
    }
    n_list
        .iter()
        .map(|&n| {
            let params = mu_params(d, s, n)?;
            let rec = count_triangles(n, d, TriangleCapCombo::DEFAULT, Method::Fast)?;
            let mass = incidence_mass(&params, rec.count)?;
            Ok(IncidenceRow {
                n,
                epsilon: params.epsilon,
                mass,
                mass_over_eps3: mass / params.epsilon.powi(3),
                anchored_count: rec.count,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub fit: FitResult,
    pub margin: f64,
    /// slope of log(mass/ε³) against log ε at most −margin: the ratio grows
    /// as ε → 0
    pub diverges: bool,
}

/// Fit the exponent of mass/ε³ against ε on the sweep; a negative exponent
/// means the ratio blows up as ε → 0.
pub fn ratio_divergence(rows: &[IncidenceRow], margin: f64) -> Result<DivergenceReport> {
    if rows.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "divergence check needs ≥ 4 sweep points, has {}",
            rows.len()
        )));
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.epsilon, r.mass_over_eps3)).collect();
    let fit = loglog_fit(&pts)?;
    Ok(DivergenceReport {
        fit,
        margin,
        diverges: fit.slope <= -margin,
    })
}

// ---------------------------------------------------------------------------
// Energy integral
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyMethod {
    #[serde(rename = "conv")]
    DifferenceConvolution,
    #[serde(rename = "mc")]
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub value: f64,
    pub method: EnergyMethod,
    pub off_diagonal: f64,
    pub diagonal_term: f64,
    /// unit-cube pair integral constant c(d,s) and its Monte-Carlo error
    pub diag_constant: f64,
    pub diag_constant_stderr: f64,
    pub sample_count: Option<u64>,
    pub standard_error: Option<f64>,
}

pub const DIAG_CONSTANT_SAMPLES: u64 = 1_000_000;
pub const DIAG_CONSTANT_SEED: u64 = 0x00C0_FFEE;

/// The kernel pair integral over two independent copies of the unit cube,
/// ∫∫ |u−v|^{−s} du dv, by seeded Monte Carlo. Exactly 1 for s = 0.
pub fn unit_cube_pair_constant(d: usize, s: f64, samples: u64, seed: u64) -> (f64, f64) {
    if s == 0.0 {
        return (1.0, 0.0);
    }
    let rng = CounterRng::new(seed);
    let stride = 2 * d as u64;
    let chunk = 1u64 << 16;
    let blocks = samples.div_ceil(chunk);
    let partials: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * chunk;
            let hi = (lo + chunk).min(samples);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for t in lo..hi {
                let mut r2 = 0.0;
                for k in 0..d as u64 {
                    let u = rng.unit_f64_at(t * stride + 2 * k);
                    let v = rng.unit_f64_at(t * stride + 2 * k + 1);
                    r2 += (u - v) * (u - v);
                }
                let kern = r2.powf(-s / 2.0);
                sum += kern;
                sumsq += kern * kern;
            }
            (sum, sumsq)
        })
        .collect();
    let (sum, sumsq) = partials
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let nf = samples as f64;
    let mean = sum / nf;
    let var = (sumsq / nf - mean * mean).max(0.0);
    (mean, (var / nf).sqrt())
}

/// Off-diagonal part of the difference-vector convolution, with the support
/// box translated by an integer lattice shift (the estimate is invariant
/// under such shifts because pair counts at each difference are).
pub fn conv_offdiagonal_shifted(params: &MeasureParams, s: f64, shift: &[i64]) -> Result<f64> {
    if shift.len() != params.d {
        return Err(Error::DimensionMismatch {
            expected: params.d,
            got: shift.len(),
        });
    }
    let d = params.d;
    let n = params.n as i64;
    let nf = params.n as f64;
    // axis k: index positions lo..lo+len (half-open), len 4n for the short
    // axes and 4n² for the last
    let lens: Vec<i64> = (0..d)
        .map(|k| if k + 1 == d { 4 * n * n } else { 4 * n })
        .collect();
    let low: Vec<i64> = (0..d)
        .map(|k| shift[k] - if k + 1 == d { 2 * n * n } else { 2 * n })
        .collect();
    let scale: Vec<f64> = (0..d)
        .map(|k| if k + 1 == d { 1.0 / (nf * nf) } else { 1.0 / nf })
        .collect();

    // overlap of [lo, lo+len) with itself shifted by j, as a function the
    // shift actually enters
    let overlap = |k: usize, j: i64| -> f64 {
        let lo = low[k].max(low[k] + j);
        let hi = (low[k] + lens[k]).min(low[k] + lens[k] + j);
        (hi - lo).max(0) as f64
    };

    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        d: usize,
        all_zero: bool,
        weight: f64,
        r2: f64,
        lens: &[i64],
        scale: &[f64],
        s: f64,
        overlap: &dyn Fn(usize, i64) -> f64,
        acc: &mut f64,
    ) {
        if k == d {
            if !all_zero {
                *acc += weight * r2.powf(-s / 2.0);
            }
            return;
        }
        for j in -(lens[k] - 1)..=(lens[k] - 1) {
            let w = overlap(k, j);
            if w == 0.0 {
                continue;
            }
            let delta = j as f64 * scale[k];
            rec(
                k + 1,
                d,
                all_zero && j == 0,
                weight * w,
                r2 + delta * delta,
                lens,
                scale,
                s,
                overlap,
                acc,
            );
        }
    }

    let q = params.per_cube_mass * params.normalization;
    let partials: Vec<f64> = (-(lens[0] - 1)..=(lens[0] - 1))
        .into_par_iter()
        .map(|j1| {
            let w = overlap(0, j1);
            if w == 0.0 {
                return 0.0;
            }
            let delta = j1 as f64 * scale[0];
            let mut acc = 0.0;
            rec(
                1,
                d,
                j1 == 0,
                w,
                delta * delta,
                &lens,
                &scale,
                s,
                &overlap,
                &mut acc,
            );
            acc
        })
        .collect();
    Ok(q * q * partials.iter().sum::<f64>())
}

/// Energy estimate with the spec precondition d/2 ≤ s < d.
pub fn energy_estimate(
    params: &MeasureParams,
    s: f64,
    method: EnergyMethod,
    mc_samples: u64,
    mc_seed: u64,
) -> Result<EnergyEstimate> {
    if s < params.d as f64 / 2.0 {
        return Err(Error::invalid(format!(
            "energy estimate requires s ≥ d/2 = {}, got {s}",
            params.d as f64 / 2.0
        )));
    }
    energy_estimate_any_s(params, s, method, mc_samples, mc_seed)
}

/// Same computation for any 0 ≤ s < d (the diagonal diverges at s ≥ d).
pub fn energy_estimate_any_s(
    params: &MeasureParams,
    s: f64,
    method: EnergyMethod,
    mc_samples: u64,
    mc_seed: u64,
) -> Result<EnergyEstimate> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::invalid(format!("s must be finite and ≥ 0, got {s}")));
    }
    if s >= params.d as f64 {
        return Err(Error::invalid(format!(
            "diagonal cube self-energy diverges for s ≥ d = {}, got {s}",
            params.d
        )));
    }
    let (c, c_err) = unit_cube_pair_constant(params.d, s, DIAG_CONSTANT_SAMPLES, DIAG_CONSTANT_SEED);
    // per-cube self energy: cube_count · (qε^{−d})² · ε^{2d−s} · c; when the
    // kernel exponent equals the measure's s this collapses to c / 4^d
    // because ε^s·n^{d+1} = 1
    let q = params.per_cube_mass * params.normalization;
    let diagonal = params.cube_count as f64 * q * q * params.epsilon.powf(-s) * c;
    match method {
        EnergyMethod::DifferenceConvolution => {
            let off = conv_offdiagonal_shifted(params, s, &vec![0; params.d])?;
            Ok(EnergyEstimate {
                value: off + diagonal,
                method,
                off_diagonal: off,
                diagonal_term: diagonal,
                diag_constant: c,
                diag_constant_stderr: c_err,
                sample_count: None,
                standard_error: None,
            })
        }
        EnergyMethod::MonteCarlo => {
            let (value, stderr) = mc_energy(params, s, mc_samples, mc_seed)?;
            Ok(EnergyEstimate {
                value,
                method,
                off_diagonal: value - diagonal,
                diagonal_term: diagonal,
                diag_constant: c,
                diag_constant_stderr: c_err,
                sample_count: Some(mc_samples),
                standard_error: Some(stderr),
            })
        }
    }
}

/// Unbiased sampler of ∫∫ |x−y|^{−s} dμdμ: draw two cubes uniformly, then a
/// uniform point inside each.
fn mc_energy(params: &MeasureParams, s: f64, samples: u64, seed: u64) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::invalid("Monte Carlo needs ≥ 1 sample"));
    }
    let d = params.d;
    let n = params.n as i64;
    let nf = params.n as f64;
    let eps = params.epsilon;
    let rng = CounterRng::new(seed);
    let radices: Vec<u64> = (0..d)
        .map(|k| if k + 1 == d { (4 * n * n) as u64 } else { (4 * n) as u64 })
        .collect();
    let lows: Vec<i64> = (0..d)
        .map(|k| if k + 1 == d { -2 * n * n } else { -2 * n })
        .collect();
    let scale: Vec<f64> = (0..d)
        .map(|k| if k + 1 == d { 1.0 / (nf * nf) } else { 1.0 / nf })
        .collect();
    let stride = 4 * d as u64;
    let chunk = 1u64 << 16;
    let blocks = samples.div_ceil(chunk);
    let partials: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * chunk;
            let hi = (lo + chunk).min(samples);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for t in lo..hi {
                let base = t * stride;
                let mut r2 = 0.0;
                for k in 0..d {
                    let k64 = k as u64;
                    let i1 = (rng.u64_at(base + 4 * k64) % radices[k]) as i64 + lows[k];
                    let i2 = (rng.u64_at(base + 4 * k64 + 1) % radices[k]) as i64 + lows[k];
                    let o1 = rng.unit_f64_at(base + 4 * k64 + 2) - 0.5;
                    let o2 = rng.unit_f64_at(base + 4 * k64 + 3) - 0.5;
                    let x = i1 as f64 * scale[k] + eps * o1;
                    let y = i2 as f64 * scale[k] + eps * o2;
                    r2 += (x - y) * (x - y);
                }
                let kern = r2.powf(-s / 2.0);
                sum += kern;
                sumsq += kern * kern;
            }
            (sum, sumsq)
        })
        .collect();
    let (sum, sumsq) = partials
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (c2, d2)| (a + c2, b + d2));
    let nf2 = samples as f64;
    let mean = sum / nf2;
    let var = (sumsq / nf2 - mean * mean).max(0.0);
    Ok((mean, (var / nf2).sqrt()))
}

/// Energy of an atomic measure whose points are pairwise at least distance
/// one apart (each atom carries mass `mass`); the kernel is then pointwise
/// nonincreasing in s, so the sum is too.
pub fn separated_atomic_energy(points: &[Vec<f64>], mass: f64, s: f64) -> Result<f64> {
    let mut total = 0.0;
    for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let r2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            if r2 < 1.0 {
                return Err(Error::invalid(format!(
                    "atoms {i} and {j} are closer than 1 ({})",
                    r2.sqrt()
                )));
            }
            total += mass * mass * r2.powf(-s / 2.0);
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Closing exponent algebra for the tetrahedra question
// ---------------------------------------------------------------------------

/// The closing display ε^{4s}·N^{4−9/(d+1)} under the reading N = n^{d+1}
/// = ε^{−s}: the expression simplifies to ε^{9s/(d+1)}, which stays above
/// the ε⁶ benchmark exactly when s < 2(d+1)/3. The two exact power
/// identities tie the display to the count target n^{3d−6}.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TetraExpressionReport {
    pub d: usize,
    pub s: f64,
    /// exponent of ε in the simplified expression: 9s/(d+1)
    pub eps_exponent: f64,
    /// the benchmark exponent 6 is crossed at s = 2(d+1)/3
    pub threshold_s: f64,
    /// eps_exponent < 6, i.e. the expression dominates ε⁶
    pub below_six: bool,
    /// (d+1)·(4 − 9/(d+1)) = 4d − 5, exactly
    pub power_identity_holds: bool,
    /// 4d − 5 = (d+1) + (3d−6), exactly
    pub decomposition_holds: bool,
}

pub fn tetra_expression(d: usize, s: f64) -> Result<TetraExpressionReport> {
    if d < 2 {
        return Err(Error::invalid(format!("d must be ≥ 2, got {d}")));
    }
    if !s.is_finite() || s < 0.0 {
        return Err(Error::invalid(format!("s must be finite and ≥ 0, got {s}")));
    }
    let dd = d as i64;
    let lhs = Ratio::new(dd + 1, 1) * (Ratio::new(4, 1) - Ratio::new(9, dd + 1));
    let power_identity_holds = lhs == Ratio::new(4 * dd - 5, 1);
    let decomposition_holds = 4 * dd - 5 == (dd + 1) + (3 * dd - 6);
    let eps_exponent = 9.0 * s / (d as f64 + 1.0);
    Ok(TetraExpressionReport {
        d,
        s,
        eps_exponent,
        threshold_s: 2.0 * (d as f64 + 1.0) / 3.0,
        below_six: eps_exponent < 6.0,
        power_identity_holds,
        decomposition_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_params_examples() {
        // d=4, s=2.5, n=10 → ε = 10^{−2}
        let p = mu_params(4, 2.5, 10).unwrap();
        assert!((p.epsilon - 1e-2).abs() < 1e-15);
        // defining relation ε^s·n^{d+1} = 1 to machine precision
        for (d, s, n) in [(4usize, 2.4f64, 8u32), (4, 2.5, 10), (2, 1.2, 6), (3, 1.7, 12)] {
            let p = mu_params(d, s, n).unwrap();
            let product = p.epsilon.powf(s) * (n as f64).powi(d as i32 + 1);
            assert!((product - 1.0).abs() < 1e-10, "{product}");
            // cube side below lattice spacing 1/n², so cubes are disjoint
            assert!(p.epsilon <= 1.0 / ((n * n) as f64) + 1e-15);
        }
        assert!(mu_params(4, 2.6, 10).is_err());
        assert!(mu_params(4, 1.9, 10).is_err());
        assert!(mu_params(4, 2.4, 9).is_err());
        assert!(mu_params(1, 0.6, 4).is_err());
    }

    #[test]
    fn box_point_count_by_enumeration() {
        // direct enumeration at n = 2 for d ≤ 4
        for d in [2usize, 3, 4] {
            let n = 2i64;
            let mut count = 0u128;
            let mut idx = vec![0usize; d];
            let radices: Vec<i64> = (0..d)
                .map(|k| if k + 1 == d { 4 * n * n } else { 4 * n })
                .collect();
            loop {
                count += 1;
                let mut k = 0;
                loop {
                    if k == d {
                        break;
                    }
                    idx[k] += 1;
                    if (idx[k] as i64) < radices[k] {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == d {
                    break;
                }
            }
            assert_eq!(count, box_lattice_point_count(d, 2).unwrap());
        }
        assert_eq!(box_lattice_point_count(4, 10).unwrap(), 4u128.pow(4) * 10u128.pow(5));
        assert_eq!(anchor_window_point_count(4, 10).unwrap(), 2u128.pow(4) * 10u128.pow(5));
    }

    #[test]
    fn incidence_mass_deterministic_and_zero() {
        let p = mu_params(4, 2.4, 8).unwrap();
        assert_eq!(incidence_mass(&p, 0).unwrap(), 0.0);
        let a = incidence_mass(&p, 12345).unwrap();
        let b = incidence_mass(&p, 12345).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        // explicit product recomputation
        let window = anchor_window_point_count(4, 8).unwrap() as f64;
        let q = p.per_cube_mass * p.normalization;
        assert_eq!(a, 12345.0 * window * q * q * q);
    }

    #[test]
    fn ratio_exponent_algebra() {
        // boundary s = (d+1)/2: predicted ratio exponent 6s/(d+1) − 3 = 0
        let pred = |d: f64, s: f64| 6.0 * s / (d + 1.0) - 3.0;
        assert_eq!(pred(4.0, 2.5), 0.0);
        assert!((pred(4.0, 2.4) + 0.12).abs() < 1e-12);
        assert!((pred(4.0, 2.0) + 0.6).abs() < 1e-12);
    }

    #[test]
    fn target_distances_validated() {
        assert_eq!(TargetDistances::unit_triangle().as_slice(), &[1.0, 1.0, 1.0]);
        assert!(TargetDistances::new(vec![1.0, 2f64.sqrt()]).is_ok());
        assert!(TargetDistances::new(vec![]).is_err());
        assert!(TargetDistances::new(vec![1.0, 0.0]).is_err());
        assert!(TargetDistances::new(vec![-1.0]).is_err());
    }

    #[test]
    fn triple_mass_exponent_identity() {
        // ε^{3s}·n^{3(d+1)−6} = ε^{6s/(d+1)}, both reducing to n^{−6}
        for (d, s, n) in [(4usize, 2.4f64, 8u32), (4, 2.5, 12), (3, 1.8, 10), (5, 2.7, 6)] {
            let p = mu_params(d, s, n).unwrap();
            let lhs = p.epsilon.powf(3.0 * s) * (n as f64).powi(3 * (d as i32 + 1) - 6);
            let rhs = p.epsilon.powf(6.0 * s / (d as f64 + 1.0));
            let direct = (n as f64).powi(-6);
            assert!((lhs / direct - 1.0).abs() < 1e-10, "lhs {lhs} vs n^-6 {direct}");
            assert!((rhs / direct - 1.0).abs() < 1e-10, "rhs {rhs} vs n^-6 {direct}");
        }
    }

    #[test]
    fn energy_zero_s_is_total_mass_squared() {
        let p = mu_params(2, 1.2, 4).unwrap();
        let e = energy_estimate_any_s(&p, 0.0, EnergyMethod::DifferenceConvolution, 0, 0).unwrap();
        assert!((e.value - 1.0).abs() < 1e-9, "I₀ = {}", e.value);
        assert_eq!(e.diag_constant, 1.0);
    }

    #[test]
    fn energy_translation_invariance() {
        let p = mu_params(2, 1.2, 4).unwrap();
        let base = conv_offdiagonal_shifted(&p, 1.2, &[0, 0]).unwrap();
        let shifted = conv_offdiagonal_shifted(&p, 1.2, &[5, -3]).unwrap();
        assert_eq!(base.to_bits(), shifted.to_bits());
    }

    #[test]
    fn energy_conv_close_to_mc() {
        // kernel exponent chosen with 2s < d so the MC variance is finite
        let p = mu_params(2, 1.2, 4).unwrap();
        let conv = energy_estimate_any_s(&p, 0.8, EnergyMethod::DifferenceConvolution, 0, 0).unwrap();
        let mc = energy_estimate_any_s(&p, 0.8, EnergyMethod::MonteCarlo, 400_000, 99).unwrap();
        let err = mc.standard_error.unwrap();
        assert!(
            (conv.value - mc.value).abs() <= 3.0 * err + 5e-3 * conv.value,
            "conv {} vs mc {} ± {}",
            conv.value,
            mc.value,
            err
        );
    }

    #[test]
    fn energy_preconditions() {
        let p = mu_params(4, 2.4, 4).unwrap();
        assert!(energy_estimate(&p, 1.0, EnergyMethod::DifferenceConvolution, 0, 0).is_err());
        assert!(energy_estimate_any_s(&p, 4.0, EnergyMethod::DifferenceConvolution, 0, 0).is_err());
        assert!(energy_estimate_any_s(&p, -1.0, EnergyMethod::DifferenceConvolution, 0, 0).is_err());
    }

    #[test]
    fn separated_energy_monotone_in_s() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.5, 0.0],
            vec![0.0, 2.0],
            vec![-1.25, -1.0],
        ];
        let mut prev = f64::INFINITY;
        for k in 0..8 {
            let s = 0.4 + 0.2 * k as f64;
            let e = separated_atomic_energy(&pts, 0.25, s).unwrap();
            assert!(e <= prev + 1e-15, "s={s}");
            prev = e;
        }
        // too-close atoms are rejected
        assert!(separated_atomic_energy(&[vec![0.0], vec![0.5]], 1.0, 1.0).is_err());
    }

    #[test]
    fn tetra_expression_readings() {
        let r = tetra_expression(4, 2.5).unwrap();
        assert!((r.eps_exponent - 4.5).abs() < 1e-12);
        assert!(r.below_six);
        assert!(r.power_identity_holds);
        assert!(r.decomposition_holds);
        // boundary: s = 2(d+1)/3 gives exponent exactly 6
        let d = 4;
        let s = 2.0 * (d as f64 + 1.0) / 3.0;
        let r = tetra_expression(d, s).unwrap();
        assert!((r.eps_exponent - 6.0).abs() < 1e-12);
        assert!(!r.below_six);
        for d in 2..10 {
            let r = tetra_expression(d, 1.0).unwrap();
            assert!(r.power_identity_holds && r.decomposition_holds);
        }
    }
}
