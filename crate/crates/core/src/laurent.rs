//! Laurent coefficients by the trapezoidal rule on a circle.
//!
//! Sampling `F` at `M` equispaced nodes `center + r·e^{2πij/M}` and taking one
//! DFT gives
//!
//! ```text
//! c_k ≈ (1/M) Σ_j F(center + r e^{2πij/M}) r^{−k} e^{−2πijk/M}
//! ```
//!
//! which is exact for Laurent polynomials whose degrees lie strictly between
//! `−M/2` and `M/2`. The transform is a plain `O(M·K)` sum.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::harmonic_map::{HarmonicMap, MapError};
use crate::Complex;

pub const DEFAULT_NODES: usize = 256;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LaurentError {
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite sample {value} at node {node} (z = {z})")]
    NonFiniteSample {
        node: usize,
        z: Complex,
        value: Complex,
    },
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub center: Complex,
    pub radius: f64,
    pub nodes: usize,
    pub k_min: i32,
    pub k_max: i32,
}

impl QuadratureConfig {
    pub fn new(center: Complex, radius: f64, k_min: i32, k_max: i32) -> Self {
        QuadratureConfig {
            center,
            radius,
            nodes: DEFAULT_NODES,
            k_min,
            k_max,
        }
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn validate(&self) -> Result<(), LaurentError> {
        let bad = |msg: String| Err(LaurentError::InvalidConfig(msg));
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return bad(format!("radius must be positive, got {}", self.radius));
        }
        if self.nodes < 8 {
            return bad(format!("need at least 8 nodes, got {}", self.nodes));
        }
        if self.k_min > self.k_max {
            return bad(format!("empty range {}..={}", self.k_min, self.k_max));
        }
        if (self.k_max as i64 - self.k_min as i64) >= self.nodes as i64 {
            return bad(format!(
                "range {}..={} does not fit in {} nodes",
                self.k_min, self.k_max, self.nodes
            ));
        }
        if !self.center.is_finite() {
            return bad("center must be finite".into());
        }
        Ok(())
    }
}

/// Coefficients `c_k` for `k_min ≤ k ≤ k_min + len − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub k_min: i32,
    pub values: Vec<Complex>,
}

impl Coefficients {
    /// Coefficients from an explicit list starting at `k_min`.
    pub fn from_slice(k_min: i32, values: &[Complex]) -> Self {
        Coefficients {
            k_min,
            values: values.to_vec(),
        }
    }

    pub fn k_max(&self) -> i32 {
        self.k_min + self.values.len() as i32 - 1
    }

    pub fn contains(&self, k: i32) -> bool {
        k >= self.k_min && k <= self.k_max()
    }

    pub fn get(&self, k: i32) -> Option<Complex> {
        if self.contains(k) {
            Some(self.values[(k - self.k_min) as usize])
        } else {
            None
        }
    }

    /// `c_k`, treating indices outside the stored range as zero.
    pub fn get_or_zero(&self, k: i32) -> Complex {
        self.get(k).unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, Complex)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.k_min + i as i32, c))
    }

    /// `Σ c_k (z − center)^k` over the stored range.
    pub fn eval(&self, center: Complex, z: Complex) -> Complex {
        let w = z - center;
        self.iter().map(|(k, c)| c * w.powi(k)).sum()
    }
}

/// Trapezoidal-rule Laurent coefficients of `func` on the circle of `cfg`.
pub fn laurent_coefficients<F>(
    func: F,
    cfg: &QuadratureConfig,
) -> Result<Coefficients, LaurentError>
where
    F: Fn(Complex) -> Complex,
{
    cfg.validate()?;
    let m = cfg.nodes;
    let twiddle: Vec<Complex> = (0..m)
        .map(|j| Complex::from_polar(1.0, -TAU * j as f64 / m as f64))
        .collect();
    let mut samples = Vec::with_capacity(m);
    for (j, t) in twiddle.iter().enumerate() {
        // conj of the twiddle is e^{+2πij/M}
        let z = cfg.center + cfg.radius * t.conj();
        let value = func(z);
        if !value.is_finite() {
            return Err(LaurentError::NonFiniteSample { node: j, z, value });
        }
        samples.push(value);
    }
    let values = (cfg.k_min..=cfg.k_max)
        .map(|k| {
            let kk = k.rem_euclid(m as i32) as usize;
            let sum: Complex = samples
                .iter()
                .enumerate()
                .map(|(j, &s)| s * twiddle[(j * kk) % m])
                .sum();
            sum / m as f64 * cfg.radius.powi(-k)
        })
        .collect();
    Ok(Coefficients {
        k_min: cfg.k_min,
        values,
    })
}

/// Half the distance from `center` to the nearest other pole, or 1.
pub fn default_radius(map: &HarmonicMap, center: Complex) -> f64 {
    map.nearest_pole_distance(center, 1e-12)
        .map_or(1.0, |d| 0.5 * d)
}

/// Radius of a circle around 0 enclosing every recorded pole with room to
/// spare: twice the largest pole modulus, and at least 2.
pub fn default_radius_at_infinity(map: &HarmonicMap) -> f64 {
    let far = map
        .poles()
        .iter()
        .map(|p| p.location.norm())
        .fold(0.0, f64::max);
    (2.0 * far).max(2.0)
}

/// Laurent coefficients of `h` and `g` of `map` at `cfg.center`.
pub fn expand_map(
    map: &HarmonicMap,
    cfg: &QuadratureConfig,
) -> Result<(Coefficients, Coefficients), LaurentError> {
    if !map.has_analytic_parts() {
        return Err(MapError::MissingAnalyticParts(map.name().to_string()).into());
    }
    let a = laurent_coefficients(
        |z| map.h(z).unwrap_or(Complex::new(f64::NAN, f64::NAN)),
        cfg,
    )?;
    let b = laurent_coefficients(
        |z| map.g(z).unwrap_or(Complex::new(f64::NAN, f64::NAN)),
        cfg,
    )?;
    Ok((a, b))
}
