//! The paraboloid convex body, its gauge norm, and exact membership tests
//! for vectors of the anisotropically scaled lattice.
//!
//! The unit sphere is the union of two paraboloid caps
//!
//! ```text
//!   upper: x_d = 1 − (x_1² + … + x_{d−1}²),   x_1² + … + x_{d−1}² ≤ 1
//!   lower: x_d = −1 + (x_1² + … + x_{d−1}²),  x_1² + … + x_{d−1}² ≤ 1
//! ```
//!
//! which meet at the equator seam; the enclosed region is convex and
//! symmetric, so the gauge is a genuine norm. The scaled lattice has points
//! `(i_1/n, …, i_{d−1}/n, i_d/n²)`, the scaling under which membership of a
//! lattice vector on either cap becomes an integer identity.

use crate::error::Error;
use crate::Result;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Tolerance for cap membership of real-valued input at unit scale.
pub const CAP_TOLERANCE: f64 = 1e-12;

/// One of the two paraboloid caps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cap {
    Upper,
    Lower,
}

impl Cap {
    pub fn sign(self) -> i128 {
        match self {
            Cap::Upper => 1,
            Cap::Lower => -1,
        }
    }

    pub fn flipped(self) -> Cap {
        match self {
            Cap::Upper => Cap::Lower,
            Cap::Lower => Cap::Upper,
        }
    }
}

/// Classification of a vector against the unit sphere of the body.
///
/// Equator points (first-coordinate square sum equal to the squared scale)
/// satisfy both cap equations; `classify` reports them as `LowerCap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CapSide {
    UpperCap,
    LowerCap,
    NotOnB,
}

/// The convex body in dimension d ≥ 2.
#[derive(Clone, Copy, Debug)]
pub struct ParaboloidBody {
    d: usize,
}

impl ParaboloidBody {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::invalid(format!("body dimension must be ≥ 2, got {d}")));
        }
        Ok(ParaboloidBody { d })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    fn check_input(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("{v:?}")));
        }
        Ok(())
    }

    /// Gauge norm of `v`: the unique t ≥ 0 with v/t on the unit sphere
    /// (0 for v = 0).
    ///
    /// Closed form: with S = Σ_{i<d} v_i², the cap equation for v/t reads
    /// |v_d|/t = 1 − S/t², i.e. t² − |v_d|·t − S = 0, whose positive root is
    /// t = (|v_d| + √(v_d² + 4S))/2. That root satisfies t ≥ √S, so
    /// S/t² ≤ 1 and v/t indeed lands on the cap whose sign matches v_d
    /// (for v_d = 0 it lands on the equator).
    pub fn norm(&self, v: &[f64]) -> Result<f64> {
        self.check_input(v)?;
        let s: f64 = v[..self.d - 1].iter().map(|x| x * x).sum();
        let last = v[self.d - 1].abs();
        if s == 0.0 && last == 0.0 {
            return Ok(0.0);
        }
        Ok((last + (last * last + 4.0 * s).sqrt()) / 2.0)
    }

    /// Cap membership of a real vector, within `CAP_TOLERANCE`.
    pub fn cap_membership(&self, v: &[f64]) -> Result<CapSide> {
        self.check_input(v)?;
        let s: f64 = v[..self.d - 1].iter().map(|x| x * x).sum();
        if s > 1.0 + CAP_TOLERANCE {
            return Ok(CapSide::NotOnB);
        }
        let last = v[self.d - 1];
        if (last - (s - 1.0)).abs() <= CAP_TOLERANCE {
            Ok(CapSide::LowerCap)
        } else if (last - (1.0 - s)).abs() <= CAP_TOLERANCE {
            Ok(CapSide::UpperCap)
        } else {
            Ok(CapSide::NotOnB)
        }
    }

    /// Exact cap membership for rational input.
    pub fn cap_membership_exact(&self, v: &[Ratio<i128>]) -> Result<CapSide> {
        if v.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: v.len(),
            });
        }
        let s: Ratio<i128> = v[..self.d - 1].iter().map(|x| x * x).sum();
        let one = Ratio::from_integer(1);
        if s > one {
            return Ok(CapSide::NotOnB);
        }
        let last = v[self.d - 1];
        if last == s - one {
            Ok(CapSide::LowerCap)
        } else if last == one - s {
            Ok(CapSide::UpperCap)
        } else {
            Ok(CapSide::NotOnB)
        }
    }
}

/// Exact integer coordinate vector (lattice index tuple).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntVec(pub Vec<i64>);

impl IntVec {
    /// Squared Euclidean length, accumulated in i128 so entries up to 2³⁰
    /// in absolute value never overflow.
    pub fn norm_sq(&self) -> i128 {
        self.0.iter().map(|&e| (e as i128) * (e as i128)).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Squared Euclidean length of a slice of lattice coordinates.
pub fn norm_sq(entries: &[i64]) -> i128 {
    entries.iter().map(|&e| (e as i128) * (e as i128)).sum()
}

/// The scaled lattice at scale n in dimension d: index (i_1, …, i_d) sits at
/// real coordinates (i_1/n, …, i_{d−1}/n, i_d/n²).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n: u32,
    pub d: usize,
}

impl LatticeSpec {
    pub fn new(n: u32, d: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("lattice scale n must be positive"));
        }
        if d < 2 {
            return Err(Error::invalid(format!("lattice dimension must be ≥ 2, got {d}")));
        }
        Ok(LatticeSpec { n, d })
    }

    pub fn n_sq(&self) -> i128 {
        (self.n as i128) * (self.n as i128)
    }

    /// Does the full index vector (length d) lie on the given cap?
    ///
    /// Pure integer arithmetic: on the upper cap iff Σ_{j<d} i_j² ≤ n² and
    /// i_d = n² − Σ_{j<d} i_j²; lower cap with the opposite sign.
    pub fn lies_on_cap(&self, idx: &[i64], cap: Cap) -> bool {
        assert_eq!(idx.len(), self.d, "index length must equal lattice dimension");
        let s = norm_sq(&idx[..self.d - 1]);
        let n2 = self.n_sq();
        s <= n2 && idx[self.d - 1] as i128 == cap.sign() * (n2 - s)
    }

    /// Classify a full index vector against the unit sphere.
    /// Equator indices (Σ = n², i_d = 0) satisfy both cap identities and are
    /// reported as `LowerCap`.
    pub fn classify(&self, idx: &IntVec) -> CapSide {
        assert_eq!(idx.len(), self.d, "index length must equal lattice dimension");
        if self.lies_on_cap(&idx.0, Cap::Lower) {
            CapSide::LowerCap
        } else if self.lies_on_cap(&idx.0, Cap::Upper) {
            CapSide::UpperCap
        } else {
            CapSide::NotOnB
        }
    }

    /// Real coordinates of an index vector.
    pub fn embed(&self, idx: &[i64]) -> Vec<f64> {
        assert_eq!(idx.len(), self.d, "index length must equal lattice dimension");
        let n = self.n as f64;
        let mut v: Vec<f64> = idx[..self.d - 1].iter().map(|&i| i as f64 / n).collect();
        v.push(idx[self.d - 1] as f64 / (n * n));
        v
    }

    /// Exact rational coordinates of an index vector.
    pub fn embed_exact(&self, idx: &[i64]) -> Vec<Ratio<i128>> {
        assert_eq!(idx.len(), self.d, "index length must equal lattice dimension");
        let n = self.n as i128;
        let mut v: Vec<Ratio<i128>> = idx[..self.d - 1]
            .iter()
            .map(|&i| Ratio::new(i as i128, n))
            .collect();
        v.push(Ratio::new(idx[self.d - 1] as i128, n * n));
        v
    }

    /// The last index pinned by a cap for a free part x of length d−1, if x
    /// fits inside the equator disc. Assembles the full unit index vector.
    pub fn pinned_index(&self, x: &[i64], cap: Cap) -> Option<Vec<i64>> {
        assert_eq!(x.len(), self.d - 1, "free part must have length d − 1");
        let s = norm_sq(x);
        let n2 = self.n_sq();
        if s > n2 {
            return None;
        }
        let last = cap.sign() * (n2 - s);
        let mut full = x.to_vec();
        full.push(i64::try_from(last).ok()?);
        Some(full)
    }
}
