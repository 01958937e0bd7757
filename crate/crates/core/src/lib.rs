//! Zeros of planar harmonic mappings `f = h + conj(g)`.
//!
//! The crate is organised around the harmonic Newton iteration
//!
//! ```text
//! z ← z − (conj(h'(z)) f(z) − conj(g'(z) f(z))) / (|h'(z)|² − |g'(z)|²)
//! ```
//!
//! * [`harmonic_map`]: evaluators, Jacobian, orientation and a catalog of maps.
//! * [`newton`]: single steps, the stopping rules and the batch driver.
//! * [`seeding`]: initial points near poles, at infinity and near singular zeros.
//! * [`laurent`]: Laurent coefficients by trapezoidal quadrature.
//! * [`certify`]: Newton-Kantorovich certificates and Newton-Mysovskii disks.
//! * [`search`]: grid search, deduplication and basin labels.
//! * [`viz`]: phase plots and basin images.
//!
//! ```
//! use harmonic_newton::harmonic_map::FunctionSpec;
//! use harmonic_newton::search::{find_zeros, GridSpec, Window, DEFAULT_DEDUP_TOL};
//! use harmonic_newton::StoppingConfig;
//!
//! let spec = FunctionSpec::builtin("mpw", serde_json::json!({"n": 3, "r": 0.6}));
//! let map = spec.build().unwrap();
//! let grid = GridSpec::new(Window::new(-2.0, 2.0, -2.0, 2.0), 0.05);
//! let zeros = find_zeros(&map, &grid, &StoppingConfig::default(), DEFAULT_DEDUP_TOL).unwrap();
//! assert_eq!(zeros.len(), 10);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod harmonic_map;
pub mod laurent;
pub mod newton;
mod par;
pub mod search;
pub mod seeding;
pub mod viz;

/// Points of the complex plane.
pub type Complex = num_complex::Complex64;

pub use harmonic_map::{HarmonicMap, Orientation};
pub use newton::{iterate, iterate_batch, IterationOutcome, Status, StoppingConfig};
