//! Result records attached to exact counts.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

/// How a count was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Fast,
    Constructive,
}

/// An exact solution count together with the parameters that produced it.
/// Counts are exact nonnegative integers below 2^127; overflow past that
/// bound is reported as an error by the producing operation, never wrapped.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountRecord {
    pub params: BTreeMap<String, serde_json::Value>,
    pub count: u128,
    pub method: Method,
    pub elapsed_ms: f64,
}

impl CountRecord {
    pub fn new(
        params: BTreeMap<String, serde_json::Value>,
        count: u128,
        method: Method,
        started: Instant,
    ) -> Self {
        CountRecord {
            params,
            count,
            method,
            elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        }
    }
}

/// Convenience constructor for canonical parameter maps.
pub fn params_of(items: &[(&str, serde_json::Value)]) -> BTreeMap<String, serde_json::Value> {
    items
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}
