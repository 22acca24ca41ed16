//! Log–log exponent fitting and lower-bound certificates shared by the
//! census and measure sweeps.

use crate::error::Error;
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub point_count: usize,
    /// points dropped because y ≤ 0 (parity holes in census sweeps)
    pub dropped: usize,
}

/// Least squares on (ln x, ln y). Points with y ≤ 0 are dropped (and
/// counted), not fatal: zero counts are structural in parity-constrained
/// sweeps.
pub fn loglog_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    let mut dropped = 0usize;
    for &(x, y) in points {
        if x <= 0.0 || !x.is_finite() || !y.is_finite() {
            return Err(Error::invalid(format!("fit needs finite x > 0, got ({x}, {y})")));
        }
        if y > 0.0 {
            xs.push(x.ln());
            ys.push(y.ln());
        } else {
            dropped += 1;
        }
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "log-log fit needs ≥ 2 positive points, has {n}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        point_count: n,
        dropped,
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub exponent: f64,
    pub threshold: f64,
    /// min over the sweep of y / x^exponent
    pub constant: f64,
    /// the x attaining the minimum
    pub witness_x: f64,
    pub pass: bool,
}

/// Certifies y ≥ threshold·x^exponent across the sweep by exhibiting the
/// minimizing point.
pub fn lower_bound_certificate(
    points: &[(f64, f64)],
    exponent: f64,
    threshold: f64,
) -> Result<Certificate> {
    if points.is_empty() {
        return Err(Error::InsufficientData("certificate needs ≥ 1 point".into()));
    }
    let mut constant = f64::INFINITY;
    let mut witness_x = f64::NAN;
    for &(x, y) in points {
        if x <= 0.0 || x.is_nan() {
            return Err(Error::invalid(format!("certificate needs x > 0, got {x}")));
        }
        let c = y / x.powf(exponent);
        if c < constant {
            constant = c;
            witness_x = x;
        }
    }
    Ok(Certificate {
        exponent,
        threshold,
        constant,
        witness_x,
        pass: constant >= threshold,
    })
}
