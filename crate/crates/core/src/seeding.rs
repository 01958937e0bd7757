//! Initial points for the harmonic Newton method.
//!
//! * [`pole_seeds`]: `n` points around a pole of order `n`, solving the
//!   leading-order equation `a₋ₙ w + conj(b₋ₙ w) = c` for `w = (z − z₀)^{−n}`.
//! * [`infinity_seeds`]: the same construction at infinity.
//! * [`singular_seeds`]: points near a singular zero `z₀` of `f` that lead to
//!   zeros of the perturbed map `f − δc`, computed from the local normal form
//!   `ζ + conj(ζ) + Σ αₖζᵏ + conj(Σ βₖζᵏ)`.
//!
//! Laurent coefficients may be supplied directly or computed from a
//! [`HarmonicMap`] with [`LaurentData::from_map`] and [`LaurentData::at_infinity`].

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::harmonic_map::{make_rational_pair, HarmonicMap, RationalPair};
use crate::laurent::{expand_map, Coefficients, LaurentError, QuadratureConfig};
use crate::Complex;

/// Relative tolerance for `|a| = |b|` in the linear harmonic solve.
pub const DEGENERACY_TOL: f64 = 1e-14;
/// `c` counts as zero below this fraction of the leading coefficient; that
/// is the noise level of computed Laurent coefficients.
pub const CONSTANT_REL_TOL: f64 = 1e-12;
/// Relative tolerance for `|a₁| = |b₁|` when building a normal form.
pub const SINGULAR_TOL: f64 = 1e-10;
/// Default truncation order of the normal form.
pub const DEFAULT_NORMAL_FORM_ORDER: usize = 6;
/// Highest pole order or degree at infinity searched by automatic detection.
pub const MAX_DETECTED_ORDER: u32 = 16;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SeedError {
    #[error("a·z + conj(b·z) = c has no unique solution: |a| = |b| (a = {a}, b = {b})")]
    NoUniqueSolution { a: Complex, b: Complex },
    #[error("the constant c = −(a₀ + conj(b₀)) vanishes")]
    DegenerateConstant,
    #[error("pole order must be at least 1")]
    InvalidOrder,
    #[error("no pole detected at {0}")]
    NoPole(Complex),
    #[error("neither h nor g grows at infinity")]
    NoGrowthAtInfinity,
    #[error("not a zero of f: |a₀ + conj(b₀)| = {0:e}")]
    NotAZero(f64),
    #[error("not a singular zero: |a₁| = {a1_abs}, |b₁| = {b1_abs}")]
    NotSingularZero { a1_abs: f64, b1_abs: f64 },
    #[error("a₁ = 0 at a singular zero; the normal form needs a₁ ≠ 0")]
    ZeroLeadingCoefficient,
    #[error("delta must be positive when Im(c̃) ≠ 0, got {0}")]
    DeltaNotPositive(f64),
    #[error("delta must be nonzero")]
    ZeroDelta,
    #[error("Im(c̃) = 0 and |α₂| = |β₂| (cusp case); no seed is defined")]
    Cusp,
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// Unique solution of `a·z + conj(b·z) = c` when `|a| ≠ |b|`.
pub fn solve_linear_harmonic(a: Complex, b: Complex, c: Complex) -> Result<Complex, SeedError> {
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    let det = na - nb;
    if !(det.abs() > DEGENERACY_TOL * (na + nb)) {
        return Err(SeedError::NoUniqueSolution { a, b });
    }
    Ok((a.conj() * c - (b * c).conj()) / det)
}

/// Laurent coefficients of `h` (`a`) and `g` (`b`) around `center`, with the
/// order `n` of the pole there (or the degree at infinity).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentData {
    pub center: Complex,
    pub n: u32,
    pub a: Coefficients,
    pub b: Coefficients,
}

impl LaurentData {
    /// Expand `map` around `center` on a circle of the given radius. With
    /// `n = None` the pole order is detected from the coefficients.
    pub fn from_map(
        map: &HarmonicMap,
        center: Complex,
        radius: f64,
        nodes: usize,
        n: Option<u32>,
    ) -> Result<Self, SeedError> {
        let k_lo = -(n.unwrap_or(MAX_DETECTED_ORDER) as i32);
        let cfg = QuadratureConfig::new(center, radius, k_lo, 2).with_nodes(nodes);
        let (a, b) = expand_map(map, &cfg)?;
        let n = match n {
            Some(0) => return Err(SeedError::InvalidOrder),
            Some(n) => n,
            None => detect_order(&a, &b, radius, -1).ok_or(SeedError::NoPole(center))?,
        };
        Ok(LaurentData { center, n, a, b })
    }

    /// Expand `map` on the circle `|z| = radius`, which must enclose every
    /// singularity. `n` is the degree at infinity, detected when `None`.
    pub fn at_infinity(
        map: &HarmonicMap,
        radius: f64,
        nodes: usize,
        n: Option<u32>,
    ) -> Result<Self, SeedError> {
        let k_hi = n.unwrap_or(MAX_DETECTED_ORDER) as i32;
        let center = Complex::new(0.0, 0.0);
        let cfg = QuadratureConfig::new(center, radius, -2, k_hi).with_nodes(nodes);
        let (a, b) = expand_map(map, &cfg)?;
        let n = match n {
            Some(0) => return Err(SeedError::InvalidOrder),
            Some(n) => n,
            None => detect_order(&a, &b, radius, 1).ok_or(SeedError::NoGrowthAtInfinity)?,
        };
        Ok(LaurentData { center, n, a, b })
    }

    /// `c = −(a₀ + conj(b₀))`.
    pub fn constant(&self) -> Complex {
        -(self.a.get_or_zero(0) + self.b.get_or_zero(0).conj())
    }
}

/// Largest `k ≥ 1` such that the `sign·k` term is visible on the sampling
/// circle: `|c_{±k}| r^{±k}` above `1e-10` of the largest term.
fn detect_order(a: &Coefficients, b: &Coefficients, radius: f64, sign: i32) -> Option<u32> {
    let size = |c: &Coefficients, k: i32| c.get_or_zero(k).norm() * radius.powi(k);
    let scale = a
        .iter()
        .chain(b.iter())
        .map(|(k, v)| v.norm() * radius.powi(k))
        .fold(0.0, f64::max);
    (1..=MAX_DETECTED_ORDER as i32)
        .rev()
        .find(|&k| size(a, sign * k).max(size(b, sign * k)) > 1e-10 * scale)
        .map(|k| k as u32)
}

/// The `n` solutions of `w^n = rhs`, sorted by ascending principal argument.
fn nth_roots(rhs: Complex, n: u32) -> Vec<Complex> {
    if n == 1 {
        return vec![rhs];
    }
    let (r, phi) = rhs.to_polar();
    let modulus = r.powf(1.0 / n as f64);
    let mut roots: Vec<Complex> = (0..n)
        .map(|k| Complex::from_polar(modulus, (phi + TAU * k as f64) / n as f64))
        .collect();
    roots.sort_by(|u, v| u.arg().total_cmp(&v.arg()));
    roots
}

fn negligible(c: Complex, a: Complex, b: Complex) -> bool {
    c.norm() <= CONSTANT_REL_TOL * a.norm().max(b.norm())
}

/// Seeds near a pole of order `n` at `data.center`:
/// `(z − z₀)^n = (|a₋ₙ|² − |b₋ₙ|²)/(conj(a₋ₙ)c − conj(b₋ₙ)conj(c))`.
pub fn pole_seeds(data: &LaurentData) -> Result<Vec<Complex>, SeedError> {
    if data.n == 0 {
        return Err(SeedError::InvalidOrder);
    }
    let k = -(data.n as i32);
    let (a, b) = (data.a.get_or_zero(k), data.b.get_or_zero(k));
    let c = data.constant();
    if negligible(c, a, b) {
        return Err(SeedError::DegenerateConstant);
    }
    // w = (z − z₀)^{−n} solves a·w + conj(b·w) = c.
    let w = solve_linear_harmonic(a, b, c)?;
    if w == Complex::new(0.0, 0.0) {
        return Err(SeedError::DegenerateConstant);
    }
    Ok(nth_roots(w.inv(), data.n)
        .into_iter()
        .map(|r| data.center + r)
        .collect())
}

/// Seeds close to infinity:
/// `z^n = (conj(aₙ)c − conj(bₙ)conj(c))/(|aₙ|² − |bₙ|²)`.
pub fn infinity_seeds(
    a: &Coefficients,
    b: &Coefficients,
    n: u32,
) -> Result<Vec<Complex>, SeedError> {
    if n == 0 {
        return Err(SeedError::InvalidOrder);
    }
    let k = n as i32;
    let c = -(a.get_or_zero(0) + b.get_or_zero(0).conj());
    let (ak, bk) = (a.get_or_zero(k), b.get_or_zero(k));
    if negligible(c, ak, bk) {
        return Err(SeedError::DegenerateConstant);
    }
    let w = solve_linear_harmonic(ak, bk, c)?;
    Ok(nth_roots(w, n))
}

/// Local normal form of `f` at a singular zero `z0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFormData {
    pub z0: Complex,
    /// Rotation angle in `[0, π)` with `conj(b₁) = a₁e^{2iθ}`.
    pub theta: f64,
    /// `αₖ` for `2 ≤ k ≤ K`.
    pub alpha: Coefficients,
    /// `βₖ` for `2 ≤ k ≤ K`.
    pub beta: Coefficients,
    /// `conj(b₁)e^{−iθ}`, so that `f(z) = scale · f̃(e^{−iθ}(z − z₀))`.
    pub scale: Complex,
    /// `c̃ = −(α₂ + conj(β₂))`.
    pub c_tilde: Complex,
}

/// Build the normal form from Taylor coefficients `a`, `b` of `h`, `g` at
/// `z0`, truncated at order `order` (at least 2).
pub fn normal_form(
    a: &Coefficients,
    b: &Coefficients,
    z0: Complex,
    order: usize,
) -> Result<NormalFormData, SeedError> {
    let order = order.max(2) as i32;
    let (a1, b1) = (a.get_or_zero(1), b.get_or_zero(1));
    let residual = (a.get_or_zero(0) + b.get_or_zero(0).conj()).norm();
    if residual > SINGULAR_TOL * (1.0 + a1.norm()) {
        return Err(SeedError::NotAZero(residual));
    }
    if a1 == Complex::new(0.0, 0.0) || b1 == Complex::new(0.0, 0.0) {
        return Err(SeedError::ZeroLeadingCoefficient);
    }
    let (na, nb) = (a1.norm(), b1.norm());
    if (na - nb).abs() > SINGULAR_TOL * na.max(nb) {
        return Err(SeedError::NotSingularZero {
            a1_abs: na,
            b1_abs: nb,
        });
    }
    let theta = ((b1.conj() / a1).arg() / 2.0).rem_euclid(PI);
    let rot = |k: i32| Complex::from_polar(1.0, (k - 1) as f64 * theta);
    let alpha: Vec<Complex> = (2..=order)
        .map(|k| a.get_or_zero(k) / a1 * rot(k))
        .collect();
    let beta: Vec<Complex> = (2..=order)
        .map(|k| b.get_or_zero(k) / b1 * rot(k))
        .collect();
    let c_tilde = -(alpha[0] + beta[0].conj());
    Ok(NormalFormData {
        z0,
        theta,
        alpha: Coefficients::from_slice(2, &alpha),
        beta: Coefficients::from_slice(2, &beta),
        scale: b1.conj() * Complex::from_polar(1.0, -theta),
        c_tilde,
    })
}

/// Expand `map` at `z0` and build its normal form.
pub fn normal_form_of_map(
    map: &HarmonicMap,
    z0: Complex,
    radius: f64,
    nodes: usize,
    order: usize,
) -> Result<NormalFormData, SeedError> {
    let k_hi = order.max(2) as i32;
    let cfg = QuadratureConfig::new(z0, radius, 0, k_hi).with_nodes(nodes);
    let (a, b) = expand_map(map, &cfg)?;
    normal_form(&a, &b, z0, order)
}

impl NormalFormData {
    pub fn rotation(&self) -> Complex {
        Complex::from_polar(1.0, self.theta)
    }

    /// `f̃(ζ)` truncated at the stored order.
    pub fn eval_normal(&self, zeta: Complex) -> Complex {
        let h = zeta + self.alpha.eval(Complex::new(0.0, 0.0), zeta);
        let g = zeta + self.beta.eval(Complex::new(0.0, 0.0), zeta);
        h + g.conj()
    }

    /// `scale · f̃(e^{−iθ}(z − z₀))`, the truncated expansion of `f` at `z`.
    pub fn eval_original(&self, z: Complex) -> Complex {
        self.scale * self.eval_normal(self.rotation().conj() * (z - self.z0))
    }

    /// `c = scale · c̃`: the direction of the perturbation `f − δc`.
    pub fn perturbation(&self) -> Complex {
        self.scale * self.c_tilde
    }

    /// Whether `Im(c̃)` counts as zero.
    pub fn c_tilde_is_real(&self) -> bool {
        self.c_tilde.im.abs() <= 1e-12 * self.c_tilde.norm().max(1.0)
    }

    /// The truncated normal form as a harmonic polynomial in `ζ`.
    pub fn normal_map(&self) -> HarmonicMap {
        let poly = |c: &Coefficients| {
            let mut v = vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)];
            v.extend(c.values.iter().copied());
            v
        };
        make_rational_pair(&RationalPair::polynomial(
            poly(&self.alpha),
            poly(&self.beta),
        ))
        .expect("polynomial denominators are 1")
    }
}

/// `f − δc`, the map whose zeros [`singular_seeds`] approximates.
pub fn perturbed_map(map: &HarmonicMap, nf: &NormalFormData, delta: f64) -> HarmonicMap {
    map.shifted(-delta * nf.perturbation())
}

/// Seeds for zeros of `f − δc` near the singular zero `nf.z0`.
///
/// For `Im(c̃) ≠ 0` and `δ > 0` this returns `[z₊, z₋]` with
/// `z± = z₀ ± i√δ e^{iθ}`. For real `c̃` with `|α₂| ≠ |β₂|` it returns
/// `[z₃]`, `z₃ = z₀ + ((1 − √(1 − δc̃²))/c̃)e^{iθ}`.
pub fn singular_seeds(nf: &NormalFormData, delta: f64) -> Result<Vec<Complex>, SeedError> {
    if delta == 0.0 {
        return Err(SeedError::ZeroDelta);
    }
    let rot = nf.rotation();
    if !nf.c_tilde_is_real() {
        if !(delta > 0.0) {
            return Err(SeedError::DeltaNotPositive(delta));
        }
        let offset = Complex::new(0.0, delta.sqrt()) * rot;
        return Ok(vec![nf.z0 + offset, nf.z0 - offset]);
    }
    let (a2, b2) = (
        nf.alpha.get_or_zero(2).norm(),
        nf.beta.get_or_zero(2).norm(),
    );
    if (a2 - b2).abs() <= 1e-12 * a2.max(b2).max(1e-300) {
        return Err(SeedError::Cusp);
    }
    let c = Complex::new(nf.c_tilde.re, 0.0);
    let root = (Complex::new(1.0, 0.0) - delta * c * c).sqrt();
    Ok(vec![nf.z0 + (1.0 - root) / c * rot])
}
