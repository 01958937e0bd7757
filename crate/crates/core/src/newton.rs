//! The harmonic Newton iteration.
//!
//! A single step can be taken with the closed-form update
//! ([`step_harmonic`]), its generalisation to any real-differentiable map
//! written with Wirtinger derivatives ([`step_general`]), or by solving the
//! underlying 2×2 real linear system ([`step_linsys`]). The two forms agree in
//! exact arithmetic; the linear solve survives points where the Jacobian
//! cancels to zero in floating point.
//!
//! [`iterate`] runs one orbit with the stopping rules
//! `|f(z_{k+1})| < restol` or `|z_{k+1} − z_k| < steptol·|z_{k+1}|`, and
//! [`iterate_batch`] runs many orbits with an active set so that finished
//! points are never stepped again.

use serde::{Deserialize, Serialize};

use crate::harmonic_map::HarmonicMap;
use crate::Complex;

/// Pivots below this magnitude make the 2×2 solve fail.
pub const PIVOT_FLOOR: f64 = 1e-300;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum NewtonError {
    #[error("the real 2x2 Jacobian is singular at {0}")]
    SingularJacobian(Complex),
    #[error("invalid stopping configuration: {0}")]
    InvalidConfig(&'static str),
}

/// When to replace the closed-form step by the 2×2 linear solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinsysMode {
    #[default]
    Never,
    Always,
    /// Solve the linear system when `|J_f| < auto_threshold·(|h'|² + |g'|²)`.
    Auto,
}

impl std::str::FromStr for LinsysMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "never" => Ok(LinsysMode::Never),
            "always" => Ok(LinsysMode::Always),
            "auto" => Ok(LinsysMode::Auto),
            other => Err(format!("unknown linsys mode `{other}` (never|always|auto)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingConfig {
    pub maxit: usize,
    pub restol: f64,
    pub steptol: f64,
    pub use_linsys: LinsysMode,
    pub auto_threshold: f64,
}

impl Default for StoppingConfig {
    fn default() -> Self {
        StoppingConfig {
            maxit: 50,
            restol: 1e-14,
            steptol: 1e-14,
            use_linsys: LinsysMode::Never,
            auto_threshold: 1e-12,
        }
    }
}

impl StoppingConfig {
    pub fn validate(&self) -> Result<(), NewtonError> {
        if self.maxit < 1 {
            return Err(NewtonError::InvalidConfig("maxit must be at least 1"));
        }
        if !(self.restol > 0.0) || !(self.steptol > 0.0) {
            return Err(NewtonError::InvalidConfig("tolerances must be positive"));
        }
        if !(self.auto_threshold > 0.0) {
            return Err(NewtonError::InvalidConfig(
                "auto_threshold must be positive",
            ));
        }
        Ok(())
    }

    pub fn with_linsys(mut self, mode: LinsysMode) -> Self {
        self.use_linsys = mode;
        self
    }

    pub fn with_maxit(mut self, maxit: usize) -> Self {
        self.maxit = maxit;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    ConvergedResidual,
    ConvergedStep,
    MaxIterations,
    Diverged,
    SingularJacobian,
}

impl Status {
    pub fn is_converged(self) -> bool {
        matches!(self, Status::ConvergedResidual | Status::ConvergedStep)
    }
}

/// Result of one orbit.
///
/// `residual` is `|f(point)|`, or `+∞` for diverged orbits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationOutcome {
    pub point: Complex,
    pub status: Status,
    pub iterations: usize,
    pub residual: f64,
}

/// One harmonic Newton step from precomputed `f(z)`, `h'(z)` and `g'(z)`.
#[inline]
pub fn harmonic_update(z: Complex, fz: Complex, dh: Complex, dg: Complex) -> Complex {
    z - (dh.conj() * fz - (dg * fz).conj()) / (dh.norm_sqr() - dg.norm_sqr())
}

/// `H_f(z)`. Divides by `J_f(z)`; a vanishing Jacobian yields a non-finite
/// point, which callers treat as divergence.
pub fn step_harmonic(map: &HarmonicMap, z: Complex) -> Complex {
    harmonic_update(z, map.eval(z), map.dh(z), map.dg(z))
}

/// Newton step for a real-differentiable `f` given its Wirtinger derivatives.
#[inline]
pub fn step_general(dz_f: Complex, dzbar_f: Complex, fz: Complex, z: Complex) -> Complex {
    z - (dz_f.conj() * fz - dzbar_f * fz.conj()) / (dz_f.norm_sqr() - dzbar_f.norm_sqr())
}

/// Newton step computed by solving `F'(z) δ = −F(z)` in `R²`.
pub fn step_linsys(map: &HarmonicMap, z: Complex) -> Result<Complex, NewtonError> {
    linsys_update(z, map.eval(z), map.dz(z), map.dzbar(z))
}

fn linsys_update(
    z: Complex,
    fz: Complex,
    dz: Complex,
    dzbar: Complex,
) -> Result<Complex, NewtonError> {
    let a = [
        [dz.re + dzbar.re, -dz.im + dzbar.im],
        [dz.im + dzbar.im, dz.re - dzbar.re],
    ];
    let rhs = [-fz.re, -fz.im];
    let [dx, dy] = solve_2x2(a, rhs).ok_or(NewtonError::SingularJacobian(z))?;
    Ok(z + Complex::new(dx, dy))
}

/// Gaussian elimination with partial pivoting.
fn solve_2x2(mut a: [[f64; 2]; 2], mut b: [f64; 2]) -> Option<[f64; 2]> {
    if a[1][0].abs() > a[0][0].abs() {
        a.swap(0, 1);
        b.swap(0, 1);
    }
    // NaN pivots fail these comparisons too.
    if !(a[0][0].abs() >= PIVOT_FLOOR) {
        return None;
    }
    let l = a[1][0] / a[0][0];
    let u11 = a[1][1] - l * a[0][1];
    if !(u11.abs() >= PIVOT_FLOOR) {
        return None;
    }
    let y = (b[1] - l * b[0]) / u11;
    let x = (b[0] - a[0][1] * y) / a[0][0];
    Some([x, y])
}

/// Per-point iteration state shared by the single and batch drivers.
#[derive(Debug, Clone, Copy)]
struct Orbit {
    z: Complex,
    fz: Complex,
    iterations: usize,
    status: Option<Status>,
}

impl Orbit {
    fn start(map: &HarmonicMap, z0: Complex, cfg: &StoppingConfig) -> Self {
        let fz = map.eval(z0);
        let status = if fz.norm() < cfg.restol {
            Some(Status::ConvergedResidual)
        } else if !fz.is_finite() {
            Some(Status::Diverged)
        } else {
            None
        };
        Orbit {
            z: z0,
            fz,
            iterations: 0,
            status,
        }
    }

    fn advance(&mut self, map: &HarmonicMap, cfg: &StoppingConfig) {
        debug_assert!(self.status.is_none());
        let z_old = self.z;
        let dh = map.dh(z_old);
        let dg = map.dg(z_old);
        let use_linsys = match cfg.use_linsys {
            LinsysMode::Never => false,
            LinsysMode::Always => true,
            LinsysMode::Auto => {
                let (a, b) = (dh.norm_sqr(), dg.norm_sqr());
                (a - b).abs() < cfg.auto_threshold * (a + b)
            }
        };
        let z_new = if use_linsys {
            match linsys_update(z_old, self.fz, dh, dg.conj()) {
                Ok(z) => z,
                Err(_) => {
                    self.iterations += 1;
                    self.status = Some(Status::SingularJacobian);
                    return;
                }
            }
        } else {
            harmonic_update(z_old, self.fz, dh, dg)
        };
        self.iterations += 1;
        self.z = z_new;
        self.fz = map.eval(z_new);
        if self.fz.norm() < cfg.restol {
            self.status = Some(Status::ConvergedResidual);
        } else if !self.fz.is_finite() {
            self.status = Some(Status::Diverged);
        } else if (z_new - z_old).norm() < cfg.steptol * z_new.norm() {
            self.status = Some(Status::ConvergedStep);
        } else if self.iterations >= cfg.maxit {
            self.status = Some(Status::MaxIterations);
        }
    }

    fn outcome(&self) -> IterationOutcome {
        let status = self.status.unwrap_or(Status::MaxIterations);
        let residual = if self.fz.is_finite() {
            self.fz.norm()
        } else {
            f64::INFINITY
        };
        IterationOutcome {
            point: self.z,
            status,
            iterations: self.iterations,
            residual,
        }
    }
}

/// Run the harmonic Newton method from `z0`.
///
/// An initial point that already satisfies the residual test returns with
/// zero iterations. An orbit producing a non-finite `f` is `Diverged`.
pub fn iterate(map: &HarmonicMap, z0: Complex, cfg: &StoppingConfig) -> IterationOutcome {
    let mut orbit = Orbit::start(map, z0, cfg);
    while orbit.status.is_none() {
        orbit.advance(map, cfg);
    }
    orbit.outcome()
}

/// Like [`iterate`], also returning every iterate `z_0, z_1, …`.
pub fn orbit(
    map: &HarmonicMap,
    z0: Complex,
    cfg: &StoppingConfig,
) -> (Vec<Complex>, IterationOutcome) {
    let mut orbit = Orbit::start(map, z0, cfg);
    let mut points = vec![z0];
    while orbit.status.is_none() {
        orbit.advance(map, cfg);
        if orbit.status != Some(Status::SingularJacobian) {
            points.push(orbit.z);
        }
    }
    (points, orbit.outcome())
}

/// Iterate every point, stepping all unfinished points together and dropping
/// each from the active set as soon as it stops. Results are identical to
/// calling [`iterate`] point by point.
pub fn iterate_batch(
    map: &HarmonicMap,
    points: &[Complex],
    cfg: &StoppingConfig,
) -> Vec<IterationOutcome> {
    let mut orbits: Vec<Orbit> = crate::par::map_slice(points, |&z| Orbit::start(map, z, cfg));
    let mut active: Vec<usize> = (0..orbits.len())
        .filter(|&i| orbits[i].status.is_none())
        .collect();
    while !active.is_empty() {
        let stepped: Vec<Orbit> = crate::par::map_slice(&active, |&i| {
            let mut o = orbits[i];
            o.advance(map, cfg);
            o
        });
        for (&i, o) in active.iter().zip(stepped) {
            orbits[i] = o;
        }
        active.retain(|&i| orbits[i].status.is_none());
    }
    orbits.iter().map(Orbit::outcome).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic_map::tests::random_points;
    use crate::harmonic_map::{make_builtin, make_rational_pair, RationalPair};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn builtin(name: &str) -> HarmonicMap {
        make_builtin(name, &Default::default()).unwrap()
    }

    fn poly(p: &[Complex], q: &[Complex]) -> HarmonicMap {
        make_rational_pair(&RationalPair::polynomial(p.to_vec(), q.to_vec())).unwrap()
    }

    /// z + conj(z) + 2i z² + conj(i z²)
    fn fold_quadratic() -> HarmonicMap {
        poly(
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 2.0)],
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)],
        )
    }

    #[test]
    fn analytic_step_is_classical_newton() {
        let map = poly(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], &[]);
        assert_eq!(step_harmonic(&map, c(2.0, 0.0)), c(1.25, 0.0));
    }

    #[test]
    fn einstein_step_closed_form() {
        let z = step_harmonic(&builtin("einstein"), c(0.5, 0.0));
        assert!((z - c(0.8, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn harmonic_step_matches_term_by_term_oracle() {
        // Assembled by hand from h = z + 2i z², g = z + i z² at z = 0.1 + 0.1i:
        // h' = 1 + 4iz, g' = 1 + 2iz.
        let z = c(0.1, 0.1);
        let h = z + c(0.0, 2.0) * z * z;
        let g = z + c(0.0, 1.0) * z * z;
        let f = h + g.conj();
        let dh = 1.0 + c(0.0, 4.0) * z;
        let dg = 1.0 + c(0.0, 2.0) * z;
        let num = dh.conj() * f - (dg * f).conj();
        let den = dh.norm() * dh.norm() - dg.norm() * dg.norm();
        let oracle = z - num / den;
        let got = step_harmonic(&fold_quadratic(), z);
        assert!((got - oracle).norm() < 1e-15, "{got} vs {oracle}");
        // Independently evaluated in double precision: −0.075 − 0.075i.
        assert!((got - c(-0.075, -0.075)).norm() < 1e-15);
    }

    #[test]
    fn general_step_special_cases() {
        let z = c(0.3, -0.2);
        let fz = c(1.5, 0.5);
        let dz = c(2.0, 1.0);
        assert!((step_general(dz, c(0.0, 0.0), fz, z) - (z - fz / dz)).norm() < 1e-15);
        let got = step_general(c(0.0, 0.0), c(1.0, 0.0), fz, z);
        assert_eq!(got, z - fz.conj());
    }

    #[test]
    fn general_step_equals_harmonic_step_bitwise() {
        let map = builtin("mpw");
        for z in random_points(11, 100, c(0.0, 0.0), 1.5, |_| true) {
            let a = step_harmonic(&map, z);
            let b = step_general(map.dz(z), map.dzbar(z), map.eval(z), z);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn linsys_agrees_with_harmonic_step() {
        let map = builtin("mpw");
        let mut checked = 0;
        for z in random_points(12, 200, c(0.0, 0.0), 1.5, |_| true) {
            let (a, b) = (map.dh(z).norm_sqr(), map.dg(z).norm_sqr());
            if (a - b).abs() < 1e-6 * (a + b) {
                continue;
            }
            let zh = step_harmonic(&map, z);
            let zl = step_linsys(&map, z).unwrap();
            assert!((zh - zl).norm() <= 1e-10 * zh.norm().max(1.0), "{z}");
            checked += 1;
        }
        assert!(checked > 150);
    }

    #[test]
    fn tan_near_origin_needs_the_linear_solve() {
        let map = builtin("tan_conj");
        // Off the axes the cancelled Jacobian is exactly zero in double
        // precision while the 2x2 matrix keeps tiny but nonzero pivots.
        let z = Complex::from_polar(1e-10, 0.7);
        assert_eq!(map.jacobian(z), 0.0);
        assert!(!step_harmonic(&map, z).is_finite());
        let next = step_linsys(&map, z).unwrap();
        assert!(next.is_finite());
        // On the imaginary axis h'(z) rounds to exactly 1 and the matrix has
        // an exactly zero column.
        assert_eq!(
            step_linsys(&map, c(0.0, 1e-10)),
            Err(NewtonError::SingularJacobian(c(0.0, 1e-10)))
        );
    }

    #[test]
    fn linsys_singular_for_degenerate_map() {
        let map = poly(&[c(0.0, 0.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)]);
        for z in [c(0.3, 0.1), c(-2.0, 5.0)] {
            assert_eq!(step_linsys(&map, z), Err(NewtonError::SingularJacobian(z)));
        }
        let out = iterate(
            &map,
            c(0.3, 0.1),
            &StoppingConfig::default().with_linsys(LinsysMode::Always),
        );
        assert_eq!(out.status, Status::SingularJacobian);
    }

    #[test]
    fn fixed_point_at_exact_zero() {
        let map = fold_quadratic();
        // Zeros of 2x − 6xy + i(x² − y²): (±1/3, 1/3) are exact in binary only
        // approximately, so use the zero z = 0 of the shifted map instead.
        let z_star = c(0.5, -0.25);
        let shifted = map.shifted(-map.eval(z_star));
        assert_eq!(shifted.eval(z_star), c(0.0, 0.0));
        assert_eq!(step_harmonic(&shifted, z_star), z_star);
    }

    #[test]
    fn mpw_converges_from_055() {
        let out = iterate(&builtin("mpw"), c(0.55, 0.0), &StoppingConfig::default());
        assert!(out.status.is_converged(), "{out:?}");
        assert!(out.residual <= 1e-13);
        assert!(out.iterations <= 50);
    }

    #[test]
    fn einstein_orbit_keeps_argument() {
        let map = builtin("einstein");
        for k in 0..24 {
            let phi = -3.0 + 0.25 * k as f64;
            let out = iterate(
                &map,
                Complex::from_polar(0.5, phi),
                &StoppingConfig::default(),
            );
            assert!(out.status.is_converged());
            assert!((out.point.norm() - 1.0).abs() <= 1e-10);
            assert!((out.point.arg() - phi).abs() <= 1e-10, "{phi} {out:?}");
        }
    }

    #[test]
    fn starting_at_a_zero_takes_no_steps() {
        let out = iterate(
            &builtin("einstein"),
            c(1.0, 0.0),
            &StoppingConfig::default(),
        );
        assert_eq!(out.status, Status::ConvergedResidual);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.residual, 0.0);
    }

    #[test]
    fn pole_start_diverges_immediately() {
        let out = iterate(
            &builtin("einstein"),
            c(0.0, 0.0),
            &StoppingConfig::default(),
        );
        assert_eq!(out.status, Status::Diverged);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.residual, f64::INFINITY);
    }

    #[test]
    fn max_iterations_respected() {
        // Classical Newton for z² + 1 on the real axis never converges.
        let map = poly(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], &[]);
        let cfg = StoppingConfig::default().with_maxit(7);
        let out = iterate(&map, c(0.7, 0.0), &cfg);
        assert_eq!(out.status, Status::MaxIterations);
        assert_eq!(out.iterations, 7);
        assert!(out.residual > 0.0);
    }

    #[test]
    fn batch_matches_single_calls_bitwise() {
        let map = builtin("rhie");
        let cfg = StoppingConfig::default();
        let pts = vec![c(0.1, 0.2), c(-0.9, 0.4), c(1.3, -1.1)];
        let batch = iterate_batch(&map, &pts, &cfg);
        for (p, b) in pts.iter().zip(&batch) {
            let single = iterate(&map, *p, &cfg);
            assert_eq!(single.point.re.to_bits(), b.point.re.to_bits());
            assert_eq!(single.point.im.to_bits(), b.point.im.to_bits());
            assert_eq!(single.status, b.status);
            assert_eq!(single.iterations, b.iterations);
        }
    }

    #[test]
    fn batch_of_zeros_returns_immediately() {
        let map = builtin("einstein");
        let pts: Vec<_> = (0..8)
            .map(|k| Complex::from_polar(1.0, k as f64 * 0.25 * std::f64::consts::PI))
            .collect();
        let cfg = StoppingConfig::default();
        let out = iterate_batch(&map, &pts, &cfg);
        assert!(out.iter().all(
            |o| o.iterations == 0 && o.status == Status::ConvergedResidual
                || map.eval(o.point).norm() < cfg.restol
        ));
        assert!(iterate_batch(&map, &[], &cfg).is_empty());
    }

    #[test]
    fn orbit_records_each_iterate() {
        let map = builtin("einstein");
        let (pts, out) = orbit(&map, c(0.5, 0.0), &StoppingConfig::default());
        assert_eq!(pts.len(), out.iterations + 1);
        assert_eq!(*pts.last().unwrap(), out.point);
    }

    #[test]
    fn quadratic_convergence_near_mpw_zeros() {
        let map = builtin("mpw");
        let cfg = StoppingConfig::default();
        let mut seen = 0;
        for z0 in random_points(21, 40, c(0.0, 0.0), 1.5, |_| true) {
            let (pts, out) = orbit(&map, z0, &cfg);
            if out.status != Status::ConvergedResidual || pts.len() < 5 {
                continue;
            }
            let z_star = out.point;
            let n = pts.len();
            for k in n - 4..n - 2 {
                let (e0, e1) = ((pts[k] - z_star).norm(), (pts[k + 1] - z_star).norm());
                if e1 < 1e-12 || e0 < 1e-8 {
                    continue;
                }
                assert!(e1 / (e0 * e0) < 1e3, "ratio {} from {z0}", e1 / (e0 * e0));
            }
            seen += 1;
        }
        assert!(seen > 10);
    }

    #[test]
    fn config_validation() {
        assert!(StoppingConfig::default().validate().is_ok());
        assert!(StoppingConfig::default().with_maxit(0).validate().is_err());
        let bad = StoppingConfig {
            restol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!("auto".parse::<LinsysMode>(), Ok(LinsysMode::Auto));
        assert!("sometimes".parse::<LinsysMode>().is_err());
    }

    proptest! {
        #[test]
        fn analytic_orbits_match_classical_newton(re in -2.0f64..2.0, im in -2.0f64..2.0) {
            // h = z³ − 2z + 2, g = 0
            let p = [c(2.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
            let map = poly(&p, &[]);
            let mut z = c(re, im);
            for _ in 0..20 {
                let f = ((z * z) * z) - 2.0 * z + 2.0;
                let df = 3.0 * z * z - 2.0;
                if df.norm() < 1e-8 || !z.is_finite() { break; }
                let classical = z - f / df;
                let harmonic = step_harmonic(&map, z);
                prop_assert!((classical - harmonic).norm() <= 1e-12 * classical.norm().max(1.0));
                z = harmonic;
            }
        }

        #[test]
        fn anti_analytic_orbits_match_classical_newton(re in -2.0f64..2.0, im in -2.0f64..2.0) {
            // f = conj(g), g = z² − (1 + i)
            let q = [c(-1.0, -1.0), c(0.0, 0.0), c(1.0, 0.0)];
            let map = poly(&[], &q);
            let mut z = c(re, im);
            for _ in 0..20 {
                let g = z * z - c(1.0, 1.0);
                let dg = 2.0 * z;
                if dg.norm() < 1e-8 { break; }
                let classical = z - g / dg;
                let harmonic = step_harmonic(&map, z);
                prop_assert!((classical - harmonic).norm() <= 1e-12 * classical.norm().max(1.0));
                z = harmonic;
            }
        }
    }
}
