//! Harmonic mappings `f = h + conj(g)` and their Wirtinger derivatives.
//!
//! A [`HarmonicMap`] carries evaluators for `f`, `h'` and `g'`, and
//! optionally for `h`, `g`, `h''` and `g''`. The Wirtinger derivatives follow
//! from the decomposition: `∂z f = h'` and `∂z̄ f = conj(g')`. Derivatives are
//! always supplied in closed form by the constructor; nothing in this crate
//! differentiates numerically outside of the test suites.

mod catalog;
mod rational;
mod spec;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::Complex;

pub use catalog::{asin_principal, make_builtin, Builtin};
pub use rational::{make_rational_pair, Polynomial, RationalFn, RationalPair};
pub use spec::{FunctionSpec, RationalPart};

/// Default relative threshold for [`HarmonicMap::classify_orientation`].
pub const DEFAULT_EPS_SINGULAR: f64 = 1e-12;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MapError {
    #[error("unknown builtin function `{0}`")]
    UnknownBuiltin(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("denominator of `{0}` is identically zero")]
    ZeroDenominator(&'static str),
    #[error("Jacobian is not finite at {0}")]
    NonFiniteJacobian(Complex),
    #[error("map `{0}` has no second-derivative evaluators")]
    MissingSecondDerivatives(String),
    #[error("map `{0}` does not expose the analytic parts h and g")]
    MissingAnalyticParts(String),
}

/// The evaluators behind a [`HarmonicMap`].
///
/// Implementations must be pure: the same input always yields the same
/// output. `value` must agree with `h(z) + conj(g(z))`.
pub trait HarmonicParts: Send + Sync {
    /// `f(z)`
    fn value(&self, z: Complex) -> Complex;
    /// `h'(z)`
    fn dh(&self, z: Complex) -> Complex;
    /// `g'(z)`
    fn dg(&self, z: Complex) -> Complex;

    fn h(&self, _z: Complex) -> Option<Complex> {
        None
    }
    fn g(&self, _z: Complex) -> Option<Complex> {
        None
    }
    fn ddh(&self, _z: Complex) -> Option<Complex> {
        None
    }
    fn ddg(&self, _z: Complex) -> Option<Complex> {
        None
    }
}

/// Sign class of the Jacobian at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    SensePreserving,
    SenseReversing,
    Singular,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::SensePreserving => "sense_preserving",
            Orientation::SenseReversing => "sense_reversing",
            Orientation::Singular => "singular",
        })
    }
}

/// A pole (or other isolated singularity) recorded for plot overlays.
///
/// Order 0 marks a non-polar singularity such as a logarithmic branch point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub location: Complex,
    pub order: u32,
}

/// A harmonic mapping `f = h + conj(g)`.
///
/// Cheap to clone and safe to share between threads.
#[derive(Clone)]
pub struct HarmonicMap {
    parts: Arc<dyn HarmonicParts>,
    name: String,
    poles: Vec<Pole>,
}

impl fmt::Debug for HarmonicMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HarmonicMap")
            .field("name", &self.name)
            .field("poles", &self.poles)
            .finish_non_exhaustive()
    }
}

impl HarmonicMap {
    pub fn new(name: impl Into<String>, parts: impl HarmonicParts + 'static) -> Self {
        HarmonicMap {
            parts: Arc::new(parts),
            name: name.into(),
            poles: Vec::new(),
        }
    }

    /// Build a map from closures for `f`, `h'` and `g'`.
    pub fn from_fns<F, DH, DG>(name: impl Into<String>, f: F, dh: DH, dg: DG) -> Self
    where
        F: Fn(Complex) -> Complex + Send + Sync + 'static,
        DH: Fn(Complex) -> Complex + Send + Sync + 'static,
        DG: Fn(Complex) -> Complex + Send + Sync + 'static,
    {
        HarmonicMap::new(name, FnParts { f, dh, dg })
    }

    pub fn with_poles(mut self, poles: Vec<Pole>) -> Self {
        self.poles = poles;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    #[inline]
    pub fn eval(&self, z: Complex) -> Complex {
        self.parts.value(z)
    }

    /// `h'(z)`, which is also `∂z f(z)`.
    #[inline]
    pub fn dh(&self, z: Complex) -> Complex {
        self.parts.dh(z)
    }

    /// `g'(z)`; note `∂z̄ f(z) = conj(g'(z))`.
    #[inline]
    pub fn dg(&self, z: Complex) -> Complex {
        self.parts.dg(z)
    }

    #[inline]
    pub fn dz(&self, z: Complex) -> Complex {
        self.parts.dh(z)
    }

    #[inline]
    pub fn dzbar(&self, z: Complex) -> Complex {
        self.parts.dg(z).conj()
    }

    pub fn h(&self, z: Complex) -> Result<Complex, MapError> {
        self.parts
            .h(z)
            .ok_or_else(|| MapError::MissingAnalyticParts(self.name.clone()))
    }

    pub fn g(&self, z: Complex) -> Result<Complex, MapError> {
        self.parts
            .g(z)
            .ok_or_else(|| MapError::MissingAnalyticParts(self.name.clone()))
    }

    pub fn ddh(&self, z: Complex) -> Result<Complex, MapError> {
        self.parts
            .ddh(z)
            .ok_or_else(|| MapError::MissingSecondDerivatives(self.name.clone()))
    }

    pub fn ddg(&self, z: Complex) -> Result<Complex, MapError> {
        self.parts
            .ddg(z)
            .ok_or_else(|| MapError::MissingSecondDerivatives(self.name.clone()))
    }

    pub fn has_analytic_parts(&self) -> bool {
        let z = Complex::new(0.5, 0.25);
        self.parts.h(z).is_some() && self.parts.g(z).is_some()
    }

    pub fn has_second_derivatives(&self) -> bool {
        let z = Complex::new(0.5, 0.25);
        self.parts.ddh(z).is_some() && self.parts.ddg(z).is_some()
    }

    /// `J_f(z) = |h'(z)|² − |g'(z)|²`. Non-finite derivatives propagate.
    #[inline]
    pub fn jacobian(&self, z: Complex) -> f64 {
        self.dh(z).norm_sqr() - self.dg(z).norm_sqr()
    }

    /// Classify `z` as sense-preserving, sense-reversing or singular.
    ///
    /// The point is singular when `|J_f| <= eps_singular * (|h'|² + |g'|²)`.
    pub fn classify_orientation(
        &self,
        z: Complex,
        eps_singular: f64,
    ) -> Result<Orientation, MapError> {
        let dh2 = self.dh(z).norm_sqr();
        let dg2 = self.dg(z).norm_sqr();
        let jac = dh2 - dg2;
        if !jac.is_finite() {
            return Err(MapError::NonFiniteJacobian(z));
        }
        Ok(if jac.abs() <= eps_singular * (dh2 + dg2) {
            Orientation::Singular
        } else if jac > 0.0 {
            Orientation::SensePreserving
        } else {
            Orientation::SenseReversing
        })
    }

    /// The map `f + constant` (the constant is absorbed into `h`).
    pub fn shifted(&self, constant: Complex) -> HarmonicMap {
        HarmonicMap {
            parts: Arc::new(Shifted {
                base: Arc::clone(&self.parts),
                constant,
            }),
            name: format!("{}{:+}", self.name, constant),
            poles: self.poles.clone(),
        }
    }

    /// Nearest recorded pole to `z`, ignoring poles closer than `exclude`.
    pub fn nearest_pole_distance(&self, z: Complex, exclude: f64) -> Option<f64> {
        self.poles
            .iter()
            .map(|p| (p.location - z).norm())
            .filter(|&d| d > exclude)
            .min_by(f64::total_cmp)
    }
}

struct FnParts<F, DH, DG> {
    f: F,
    dh: DH,
    dg: DG,
}

impl<F, DH, DG> HarmonicParts for FnParts<F, DH, DG>
where
    F: Fn(Complex) -> Complex + Send + Sync,
    DH: Fn(Complex) -> Complex + Send + Sync,
    DG: Fn(Complex) -> Complex + Send + Sync,
{
    fn value(&self, z: Complex) -> Complex {
        (self.f)(z)
    }
    fn dh(&self, z: Complex) -> Complex {
        (self.dh)(z)
    }
    fn dg(&self, z: Complex) -> Complex {
        (self.dg)(z)
    }
}

struct Shifted {
    base: Arc<dyn HarmonicParts>,
    constant: Complex,
}

impl HarmonicParts for Shifted {
    fn value(&self, z: Complex) -> Complex {
        self.base.value(z) + self.constant
    }
    fn dh(&self, z: Complex) -> Complex {
        self.base.dh(z)
    }
    fn dg(&self, z: Complex) -> Complex {
        self.base.dg(z)
    }
    fn h(&self, z: Complex) -> Option<Complex> {
        self.base.h(z).map(|h| h + self.constant)
    }
    fn g(&self, z: Complex) -> Option<Complex> {
        self.base.g(z)
    }
    fn ddh(&self, z: Complex) -> Option<Complex> {
        self.base.ddh(z)
    }
    fn ddg(&self, z: Complex) -> Option<Complex> {
        self.base.ddg(z)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Central finite differences of `f` against the Wirtinger rules
    /// `∂x f = ∂z f + ∂z̄ f` and `∂y f = i(∂z f − ∂z̄ f)`.
    pub(crate) fn wirtinger_defect(map: &HarmonicMap, z: Complex) -> f64 {
        let step = 1e-6 * (1.0 + z.norm());
        let dx = (map.eval(z + step) - map.eval(z - step)) / (2.0 * step);
        let iy = Complex::new(0.0, step);
        let dy = (map.eval(z + iy) - map.eval(z - iy)) / (2.0 * step);
        let (dz, dzb) = (map.dz(z), map.dzbar(z));
        let scale = 1.0 + dz.norm() + dzb.norm();
        let ex = (dx - (dz + dzb)).norm();
        let ey = (dy - Complex::i() * (dz - dzb)).norm();
        ex.max(ey) / scale
    }

    pub(crate) fn random_points(
        seed: u64,
        count: usize,
        center: Complex,
        radius: f64,
        keep: impl Fn(Complex) -> bool,
    ) -> Vec<Complex> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let z = center
                + Complex::new(
                    rng.gen_range(-radius..radius),
                    rng.gen_range(-radius..radius),
                );
            if keep(z) {
                out.push(z);
            }
        }
        out
    }

    fn identity() -> HarmonicMap {
        HarmonicMap::from_fns(
            "z",
            |z| z,
            |_| Complex::new(1.0, 0.0),
            |_| Complex::new(0.0, 0.0),
        )
    }

    fn conj_map() -> HarmonicMap {
        HarmonicMap::from_fns(
            "conj",
            |z: Complex| z.conj(),
            |_| Complex::new(0.0, 0.0),
            |_| Complex::new(1.0, 0.0),
        )
    }

    #[test]
    fn jacobian_of_identity_and_conjugate() {
        assert_eq!(identity().jacobian(Complex::new(0.0, 0.0)), 1.0);
        for z in [Complex::new(0.3, -2.0), Complex::new(5.0, 1.0)] {
            assert_eq!(conj_map().jacobian(z), -1.0);
        }
    }

    #[test]
    fn jacobian_of_einstein_at_two() {
        let map = make_builtin("einstein", &Default::default()).unwrap();
        assert_eq!(map.jacobian(Complex::new(2.0, 0.0)), -0.9375);
    }

    #[test]
    fn orientation_examples() {
        let zero = Complex::new(0.0, 0.0);
        assert_eq!(
            identity().classify_orientation(zero, 1e-12).unwrap(),
            Orientation::SensePreserving
        );
        assert_eq!(
            conj_map().classify_orientation(zero, 1e-12).unwrap(),
            Orientation::SenseReversing
        );
        let einstein = make_builtin("einstein", &Default::default()).unwrap();
        assert_eq!(
            einstein
                .classify_orientation(Complex::new(1.0, 0.0), 1e-12)
                .unwrap(),
            Orientation::Singular
        );
        let tan = make_builtin("tan_conj", &Default::default()).unwrap();
        assert_eq!(
            tan.classify_orientation(Complex::new(1e-10, 0.0), 1e-12)
                .unwrap(),
            Orientation::Singular
        );
    }

    #[test]
    fn orientation_rejects_non_finite_jacobian() {
        let einstein = make_builtin("einstein", &Default::default()).unwrap();
        let err = einstein
            .classify_orientation(Complex::new(0.0, 0.0), 1e-12)
            .unwrap_err();
        assert!(matches!(err, MapError::NonFiniteJacobian(_)));
    }

    #[test]
    fn jacobian_matches_derivative_norms_exactly() {
        let map = make_builtin("mpw", &Default::default()).unwrap();
        for z in random_points(1, 100, Complex::new(0.0, 0.0), 2.0, |_| true) {
            let expect = map.dh(z).norm_sqr() - map.dg(z).norm_sqr();
            assert_eq!(map.jacobian(z).to_bits(), expect.to_bits());
        }
    }

    #[test]
    fn einstein_jacobian_vanishes_on_unit_circle() {
        let map = make_builtin("einstein", &Default::default()).unwrap();
        for k in 0..360 {
            let z = Complex::from_polar(1.0, (k as f64).to_radians());
            assert!(map.jacobian(z).abs() <= 1e-12, "phi = {k}");
        }
    }

    #[test]
    fn analytic_maps_are_never_sense_reversing() {
        let map = HarmonicMap::from_fns(
            "z^3 - 1",
            |z: Complex| z * z * z - 1.0,
            |z| 3.0 * z * z,
            |_| Complex::new(0.0, 0.0),
        );
        for z in random_points(7, 500, Complex::new(0.0, 0.0), 3.0, |_| true) {
            assert_ne!(
                map.classify_orientation(z, DEFAULT_EPS_SINGULAR).unwrap(),
                Orientation::SenseReversing
            );
        }
    }

    #[test]
    fn shifted_map_adds_constant_to_value_and_h() {
        let base = make_builtin("mpw", &Default::default()).unwrap();
        let c = Complex::new(-0.7, 0.0);
        let shifted = base.shifted(c);
        let z = Complex::new(0.2, 0.9);
        assert_eq!(shifted.eval(z), base.eval(z) + c);
        assert_eq!(shifted.h(z).unwrap(), base.h(z).unwrap() + c);
        assert_eq!(shifted.dh(z), base.dh(z));
        assert_eq!(shifted.poles(), base.poles());
    }

    #[test]
    fn closure_maps_lack_optional_evaluators() {
        let map = identity();
        assert!(!map.has_second_derivatives());
        assert!(matches!(
            map.ddh(Complex::new(0.0, 0.0)),
            Err(MapError::MissingSecondDerivatives(_))
        ));
        assert!(!map.has_analytic_parts());
    }
}
