//! Convergence certificates for the harmonic Newton method.
//!
//! [`kantorovich`] bounds, from data at the initial point alone, a ball that
//! contains a zero and the whole Newton orbit. [`mysovskii_disk`] estimates a
//! disk around a known zero from which every orbit converges to it.
//!
//! Supremum and Lipschitz constants estimated on sample grids are lower
//! bounds of the true values, so certificates built from them are marked
//! [`BoundKind::Empirical`].

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::harmonic_map::{HarmonicMap, MapError};
use crate::Complex;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CertifyError {
    #[error("|h'| = |g'| at {0}; the Newton step is undefined")]
    SingularPoint(Complex),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{0} is not a zero: |f| = {1:e}")]
    NotAZero(Complex, f64),
    #[error("every radius in the sweep hit a sample with vanishing Jacobian")]
    AllRadiiSkipped,
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Supremum bounds supplied by the caller.
    Analytic,
    /// Supremum bounds estimated on a sample grid (lower estimates).
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KantorovichCertificate {
    pub alpha: f64,
    pub omega0: f64,
    pub h0: f64,
    /// Radius of the ball containing the orbit; `None` when `h0 > 1/2`.
    pub rho: Option<f64>,
    pub certified: bool,
    pub domain_radius: f64,
    pub bounds: BoundKind,
}

impl KantorovichCertificate {
    /// Assemble a certificate from `alpha` and `omega0`.
    ///
    /// `rho = (1 − √(1 − 2h0))/omega0` is evaluated as
    /// `2·alpha/(1 + √(1 − 2h0))` to avoid cancellation for small `h0`.
    pub fn from_constants(alpha: f64, omega0: f64, domain_radius: f64, bounds: BoundKind) -> Self {
        let h0 = alpha * omega0;
        let rho = if omega0 == 0.0 {
            Some(alpha)
        } else if h0 <= 0.5 {
            Some(2.0 * alpha / (1.0 + (1.0 - 2.0 * h0).sqrt()))
        } else {
            None
        };
        let certified = h0 <= 0.5 && rho.is_some_and(|r| r < domain_radius);
        KantorovichCertificate {
            alpha,
            omega0,
            h0,
            rho,
            certified,
            domain_radius,
            bounds,
        }
    }

    /// Whether `z` lies in the closed ball `B̄(center; (1 + slack)·rho)`.
    pub fn contains(&self, center: Complex, z: Complex, slack: f64) -> bool {
        self.rho
            .is_some_and(|r| (z - center).norm() <= r * (1.0 + slack))
    }
}

/// Kantorovich certificate at `z0` on the disk `B(z0; domain_radius)`, given
/// bounds `sup_ddh ≥ sup|h''|` and `sup_ddg ≥ sup|g''|` on that disk.
pub fn kantorovich(
    map: &HarmonicMap,
    z0: Complex,
    domain_radius: f64,
    sup_ddh: f64,
    sup_ddg: f64,
) -> Result<KantorovichCertificate, CertifyError> {
    certificate(
        map,
        z0,
        domain_radius,
        sup_ddh,
        sup_ddg,
        BoundKind::Analytic,
    )
}

/// [`kantorovich`] with the supremum bounds from [`sup_second_derivatives`].
pub fn kantorovich_estimated(
    map: &HarmonicMap,
    z0: Complex,
    domain_radius: f64,
    grid_n: usize,
) -> Result<KantorovichCertificate, CertifyError> {
    let sup = sup_second_derivatives(map, z0, domain_radius, grid_n)?;
    certificate(
        map,
        z0,
        domain_radius,
        sup.sup_ddh,
        sup.sup_ddg,
        BoundKind::Empirical,
    )
}

fn certificate(
    map: &HarmonicMap,
    z0: Complex,
    domain_radius: f64,
    sup_ddh: f64,
    sup_ddg: f64,
    bounds: BoundKind,
) -> Result<KantorovichCertificate, CertifyError> {
    if !(domain_radius > 0.0) {
        return Err(CertifyError::InvalidArgument(format!(
            "domain radius must be positive, got {domain_radius}"
        )));
    }
    if !(sup_ddh >= 0.0 && sup_ddg >= 0.0) {
        return Err(CertifyError::InvalidArgument(
            "supremum bounds must be non-negative".into(),
        ));
    }
    let gap = (map.dh(z0).norm() - map.dg(z0).norm()).abs();
    if !(gap > 0.0) {
        return Err(CertifyError::SingularPoint(z0));
    }
    let alpha = map.eval(z0).norm() / gap;
    let omega0 = (sup_ddh + sup_ddg) / gap;
    Ok(KantorovichCertificate::from_constants(
        alpha,
        omega0,
        domain_radius,
        bounds,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub sup_ddh: f64,
    pub sup_ddg: f64,
    /// Always true: sampled maxima never exceed the true suprema.
    pub lower_estimate: bool,
}

/// Largest `|h''|` and `|g''|` on a polar grid over `B̄(center; radius)`:
/// `grid_n` radii from 0 to `radius` times `grid_n` angles.
pub fn sup_second_derivatives(
    map: &HarmonicMap,
    center: Complex,
    radius: f64,
    grid_n: usize,
) -> Result<SupEstimate, CertifyError> {
    if grid_n < 8 {
        return Err(CertifyError::InvalidArgument(format!(
            "grid_n must be at least 8, got {grid_n}"
        )));
    }
    if !map.has_second_derivatives() {
        return Err(MapError::MissingSecondDerivatives(map.name().to_string()).into());
    }
    let mut sup_ddh: f64 = 0.0;
    let mut sup_ddg: f64 = 0.0;
    for i in 0..grid_n {
        let r = radius * i as f64 / (grid_n - 1) as f64;
        for j in 0..grid_n {
            let z =
                center + Complex::from_polar(r, std::f64::consts::TAU * j as f64 / grid_n as f64);
            // NaN-propagating max: a pole inside the disk makes the bound infinite.
            let (a, b) = (map.ddh(z)?.norm(), map.ddg(z)?.norm());
            sup_ddh = if a.is_nan() {
                f64::INFINITY
            } else {
                sup_ddh.max(a)
            };
            sup_ddg = if b.is_nan() {
                f64::INFINITY
            } else {
                sup_ddg.max(b)
            };
        }
    }
    Ok(SupEstimate {
        sup_ddh,
        sup_ddg,
        lower_estimate: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MysovskiiConfig {
    pub r_max: f64,
    pub grid_n: usize,
    pub r_steps: usize,
    /// Ordered pairs beyond this count are subsampled.
    pub max_pairs: usize,
    pub seed: u64,
}

impl MysovskiiConfig {
    pub fn new(r_max: f64) -> Self {
        MysovskiiConfig {
            r_max,
            grid_n: 15,
            r_steps: 20,
            max_pairs: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MysovskiiDisk {
    /// Radius of the disk around the zero in which convergence is certified.
    pub radius: f64,
    /// Lipschitz estimate at the radius attaining the maximum.
    pub omega: f64,
    /// Domain radius `r` that attained the maximum.
    pub domain_radius: f64,
    /// Radii skipped because a sample had `J_f = 0`.
    pub skipped: Vec<f64>,
}

/// `F'(x)w = h'(x)w + conj(g'(x)w)`.
#[inline]
fn apply_jacobian(dh: Complex, dg: Complex, w: Complex) -> Complex {
    dh * w + (dg * w).conj()
}

/// `F'(x)^{−1}w = (conj(h'(x))w − conj(g'(x)w))/J_f(x)`.
#[inline]
fn solve_jacobian(dh: Complex, dg: Complex, w: Complex) -> Complex {
    (dh.conj() * w - (dg * w).conj()) / (dh.norm_sqr() - dg.norm_sqr())
}

/// Lipschitz constant of the Newton-Mysovskii theorem on a point sample:
/// `max |F'(x)^{−1}(F'(y) − F'(x))(y − x)| / |y − x|²` over ordered pairs.
/// Returns `None` when some sample has vanishing Jacobian.
fn omega_on_sample(map: &HarmonicMap, pts: &[Complex], max_pairs: usize, seed: u64) -> Option<f64> {
    let derivs: Vec<(Complex, Complex)> = pts.iter().map(|&z| (map.dh(z), map.dg(z))).collect();
    if derivs
        .iter()
        .any(|(a, b)| !(a.norm_sqr() - b.norm_sqr()).is_normal())
    {
        return None;
    }
    let m = pts.len();
    let total = m * m.saturating_sub(1);
    let pair = |idx: usize| {
        let (i, j) = (idx / (m - 1), idx % (m - 1));
        (i, if j >= i { j + 1 } else { j })
    };
    let indices: Vec<usize> = if total <= max_pairs {
        (0..total).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = sample(&mut rng, total, max_pairs).into_vec();
        v.sort_unstable();
        v
    };
    let values = crate::par::map_slice(&indices, |&idx| {
        let (i, j) = pair(idx);
        let (x, y) = (pts[i], pts[j]);
        let ((ax, bx), (ay, by)) = (derivs[i], derivs[j]);
        let d = y - x;
        let diff = apply_jacobian(ay, by, d) - apply_jacobian(ax, bx, d);
        solve_jacobian(ax, bx, diff).norm() / d.norm_sqr()
    });
    Some(values.into_iter().fold(0.0, f64::max))
}

/// Points of a `grid_n × grid_n` square grid that fall in `B̄(center; r)`.
fn disk_sample(center: Complex, r: f64, grid_n: usize) -> Vec<Complex> {
    let step = 2.0 * r / (grid_n - 1) as f64;
    let mut pts = Vec::with_capacity(grid_n * grid_n);
    for iy in 0..grid_n {
        for ix in 0..grid_n {
            let w = Complex::new(-r + ix as f64 * step, -r + iy as f64 * step);
            if w.norm() <= r * (1.0 + 1e-12) {
                pts.push(center + w);
            }
        }
    }
    pts
}

/// Largest disk around the zero `z_star` on which the Newton-Mysovskii
/// theorem guarantees convergence, maximised over `r_steps` domain radii
/// spaced logarithmically in `[r_max·10⁻³, r_max]`.
pub fn mysovskii_disk(
    map: &HarmonicMap,
    z_star: Complex,
    cfg: &MysovskiiConfig,
) -> Result<MysovskiiDisk, CertifyError> {
    if !(cfg.r_max > 0.0) || cfg.grid_n < 3 || cfg.r_steps < 1 || cfg.max_pairs < 1 {
        return Err(CertifyError::InvalidArgument(
            "need r_max > 0, grid_n ≥ 3, r_steps ≥ 1 and max_pairs ≥ 1".into(),
        ));
    }
    let residual = map.eval(z_star).norm();
    if !(residual < 1e-10) {
        return Err(CertifyError::NotAZero(z_star, residual));
    }
    let mut best: Option<(f64, f64, f64)> = None;
    let mut skipped = Vec::new();
    for k in 0..cfg.r_steps {
        let t = if cfg.r_steps == 1 {
            1.0
        } else {
            k as f64 / (cfg.r_steps - 1) as f64
        };
        let r = cfg.r_max * 10f64.powf(-3.0 * (1.0 - t));
        let pts = disk_sample(z_star, r, cfg.grid_n);
        let Some(omega) = omega_on_sample(map, &pts, cfg.max_pairs, cfg.seed) else {
            skipped.push(r);
            continue;
        };
        let radius = if omega > 0.0 { r.min(2.0 / omega) } else { r };
        if best.is_none_or(|(b, _, _)| radius > b) {
            best = Some((radius, omega, r));
        }
    }
    let (radius, omega, domain_radius) = best.ok_or(CertifyError::AllRadiiSkipped)?;
    Ok(MysovskiiDisk {
        radius,
        omega,
        domain_radius,
        skipped,
    })
}
