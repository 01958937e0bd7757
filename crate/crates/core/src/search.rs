//! Grid search for zeros and basins of attraction.
//!
//! Every point of a rectangular grid is iterated with [`iterate_batch`]; the
//! limits of converged orbits are merged by single-linkage clustering into
//! distinct zeros, and each grid point is labelled with the zero its orbit
//! reached.

use std::collections::HashMap;
use std::io::Write;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::harmonic_map::{HarmonicMap, Orientation, DEFAULT_EPS_SINGULAR};
use crate::newton::{iterate_batch, IterationOutcome, Status, StoppingConfig};
use crate::Complex;

pub const DEFAULT_DEDUP_TOL: f64 = 1e-8;
pub const DEFAULT_MATCH_TOL: f64 = 1e-6;

/// A limit reached by the step criterion is accepted when
/// `|f| ≤ STEP_ACCEPT_REL·(|h| + |g|)`. Near a pole the Newton step is also
/// tiny but `|f|` is comparable to `|h| + |g|` there.
pub const STEP_ACCEPT_REL: f64 = 1e-10;

/// Cluster count above which a zero set made only of singular points is
/// reported as possibly non-isolated.
pub const NONISOLATED_MIN_CLUSTERS: usize = 50;
pub const NONISOLATED_JACOBIAN: f64 = 1e-8;

/// Merge radius of an ill-conditioned limit, in units of its forward-error
/// estimate `ε·(|h| + |g|)/||h'| − |g'||`, and the largest radius allowed.
pub const CONDITION_FACTOR: f64 = 4.0;
pub const CONDITION_RADIUS_CAP: f64 = 1e-6;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SearchError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("labels have {got} entries, the grid has {expected}")]
    ShapeMismatch { expected: usize, got: usize },
}

/// Axis-aligned rectangle `[x_min, x_max] × [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Window {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    /// `[c − h, c + h]²` around `center`.
    pub fn square(center: Complex, half_width: f64) -> Self {
        Window::new(
            center.re - half_width,
            center.re + half_width,
            center.im - half_width,
            center.im + half_width,
        )
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.x_min < self.x_max) || !(self.y_min < self.y_max) {
            return Err(SearchError::InvalidGrid(format!(
                "window [{}, {}] x [{}, {}] must be finite with min < max",
                self.x_min, self.x_max, self.y_min, self.y_max
            )));
        }
        Ok(())
    }

    pub fn contains(&self, z: Complex) -> bool {
        (self.x_min..=self.x_max).contains(&z.re) && (self.y_min..=self.y_max).contains(&z.im)
    }
}

impl std::str::FromStr for Window {
    type Err = String;

    /// Parses `x_min,x_max,y_min,y_max`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("bad window `{s}`: {e}"))?;
        match v[..] {
            [a, b, c, d] => {
                let w = Window::new(a, b, c, d);
                w.validate().map_err(|e| e.to_string())?;
                Ok(w)
            }
            _ => Err(format!("window needs 4 comma-separated numbers, got `{s}`")),
        }
    }
}

/// Grid with spacing `mesh` anchored at `(x_min, y_min)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(flatten)]
    pub window: Window,
    pub mesh: f64,
}

impl GridSpec {
    pub fn new(window: Window, mesh: f64) -> Self {
        GridSpec { window, mesh }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        self.window.validate()?;
        if !(self.mesh > 0.0) || !self.mesh.is_finite() {
            return Err(SearchError::InvalidGrid(format!(
                "mesh must be positive, got {}",
                self.mesh
            )));
        }
        Ok(())
    }

    fn count(span: f64, mesh: f64) -> usize {
        // The small slack keeps an endpoint that is a multiple of mesh in
        // exact arithmetic.
        (span / mesh + 1e-9).floor() as usize + 1
    }

    pub fn nx(&self) -> usize {
        Self::count(self.window.width(), self.mesh)
    }

    pub fn ny(&self) -> usize {
        Self::count(self.window.height(), self.mesh)
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid point in column `ix` and row `iy` (row 0 is `y_min`).
    pub fn point(&self, ix: usize, iy: usize) -> Complex {
        Complex::new(
            self.window.x_min + ix as f64 * self.mesh,
            self.window.y_min + iy as f64 * self.mesh,
        )
    }
}

/// Grid points row by row: `y` ascending in the outer loop, `x` ascending
/// in the inner loop.
pub fn make_grid(spec: &GridSpec) -> Result<Vec<Complex>, SearchError> {
    spec.validate()?;
    let (nx, ny) = (spec.nx(), spec.ny());
    let mut pts = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            pts.push(spec.point(ix, iy));
        }
    }
    Ok(pts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub location: Complex,
    pub residual: f64,
    pub jacobian: f64,
    pub orientation: Orientation,
    /// Number of grid points whose orbit converged to this zero.
    pub members: usize,
}

/// Cluster the converged limits in `outcomes` and return one record per
/// cluster, sorted by real then imaginary part.
pub fn zeros_from_outcomes(
    map: &HarmonicMap,
    outcomes: &[IterationOutcome],
    dedup_tol: f64,
) -> Vec<ZeroRecord> {
    let converged: Vec<&IterationOutcome> =
        outcomes.iter().filter(|o| accept_limit(map, o)).collect();
    let points: Vec<Complex> = converged.iter().map(|o| o.point).collect();
    let radii: Vec<f64> = points
        .iter()
        .map(|&z| merge_radius(map, z, dedup_tol))
        .collect();
    let clusters = single_linkage(&points, &radii);

    let mut best: HashMap<usize, (usize, usize)> = HashMap::new();
    for (i, &root) in clusters.iter().enumerate() {
        let entry = best.entry(root).or_insert((i, 0));
        entry.1 += 1;
        if converged[i].residual < converged[entry.0].residual {
            entry.0 = i;
        }
    }
    let mut zeros: Vec<ZeroRecord> = best
        .into_values()
        .map(|(rep, members)| {
            let location = points[rep];
            ZeroRecord {
                location,
                residual: converged[rep].residual,
                jacobian: map.jacobian(location),
                orientation: map
                    .classify_orientation(location, DEFAULT_EPS_SINGULAR)
                    .unwrap_or(Orientation::Singular),
                members,
            }
        })
        .collect();
    zeros.sort_by(|a, b| {
        a.location
            .re
            .total_cmp(&b.location.re)
            .then(a.location.im.total_cmp(&b.location.im))
    });
    zeros
}

/// Whether a converged orbit ended at a zero.
pub fn accept_limit(map: &HarmonicMap, o: &IterationOutcome) -> bool {
    match o.status {
        Status::ConvergedResidual => true,
        Status::ConvergedStep => {
            let scale = match (map.h(o.point), map.g(o.point)) {
                (Ok(h), Ok(g)) => h.norm() + g.norm(),
                _ => 0.0,
            };
            o.residual <= STEP_ACCEPT_REL * scale
        }
        _ => false,
    }
}

/// Integer cell of `z` in a square lattice of side `cell`.
fn cell_of(z: Complex, cell: f64) -> (i64, i64) {
    ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64)
}

/// Distance within which another limit is merged with the limit `z`.
///
/// Zeros where `|h'| ≈ |g'|` are only determined to roughly
/// `ε·(|h| + |g|)/||h'| − |g'||`, so orbits reaching them scatter by more
/// than `tol`. The radius grows with that estimate up to
/// [`CONDITION_RADIUS_CAP`] and never drops below `tol`.
pub fn merge_radius(map: &HarmonicMap, z: Complex, tol: f64) -> f64 {
    let (a, b) = (map.dz(z).norm(), map.dzbar(z).norm());
    let sigma = (a - b).abs();
    let scale = match (map.h(z), map.g(z)) {
        (Ok(h), Ok(g)) => h.norm() + g.norm(),
        _ => map.eval(z).norm() + (a + b) * z.norm().max(1.0),
    };
    let estimate = CONDITION_FACTOR * f64::EPSILON * scale / sigma;
    if estimate.is_nan() {
        return tol;
    }
    estimate.min(CONDITION_RADIUS_CAP).max(tol)
}

/// Cluster representative (union-find root) of each point under
/// single-linkage, joining `i` and `j` when their distance is at most
/// `max(radii[i], radii[j])`.
fn single_linkage(points: &[Complex], radii: &[f64]) -> Vec<usize> {
    let mut uf = UnionFind::<usize>::new(points.len());
    let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let cell = radii.iter().copied().fold(f64::MIN_POSITIVE, f64::max);
    for (i, &p) in points.iter().enumerate() {
        cells.entry(cell_of(p, cell)).or_default().push(i);
    }
    for (i, &p) in points.iter().enumerate() {
        let (cx, cy) = cell_of(p, cell);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(bucket) = cells.get(&(cx + dx, cy + dy)) else {
                    continue;
                };
                for &j in bucket {
                    if j > i && (points[j] - p).norm() <= radii[i].max(radii[j]) {
                        uf.union(i, j);
                    }
                }
            }
        }
    }
    (0..points.len()).map(|i| uf.find(i)).collect()
}

/// Iterate every grid point and return the distinct zeros found.
///
/// Orbits stopped by the residual criterion always count; orbits stopped by
/// the step criterion count when [`accept_limit`] holds, which admits zeros
/// of large maps whose residual cannot reach `restol` in floating point.
pub fn find_zeros(
    map: &HarmonicMap,
    spec: &GridSpec,
    cfg: &StoppingConfig,
    dedup_tol: f64,
) -> Result<Vec<ZeroRecord>, SearchError> {
    let points = make_grid(spec)?;
    let outcomes = iterate_batch(map, &points, cfg);
    Ok(zeros_from_outcomes(map, &outcomes, dedup_tol))
}

/// Heuristic for a continuum of zeros: many clusters, all singular.
pub fn nonisolated_suspected(zeros: &[ZeroRecord]) -> bool {
    zeros.len() > NONISOLATED_MIN_CLUSTERS
        && zeros
            .iter()
            .all(|z| z.jacobian.abs() < NONISOLATED_JACOBIAN)
}

/// Basin label and iteration count for every grid point, row-major as in
/// [`make_grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinLabeling {
    pub grid: GridSpec,
    pub nx: usize,
    pub ny: usize,
    /// Index into `zeros`, or −1 when the orbit did not converge to one.
    pub labels: Vec<i32>,
    pub iteration_counts: Vec<u32>,
    pub zeros: Vec<ZeroRecord>,
}

impl BasinLabeling {
    pub fn label(&self, ix: usize, iy: usize) -> i32 {
        self.labels[iy * self.nx + ix]
    }

    /// Mean iteration count over labelled points.
    pub fn mean_iterations(&self) -> Option<f64> {
        let (sum, n) = self
            .labels
            .iter()
            .zip(&self.iteration_counts)
            .filter(|(l, _)| **l >= 0)
            .fold((0u64, 0u64), |(s, n), (_, &it)| (s + it as u64, n + 1));
        (n > 0).then(|| sum as f64 / n as f64)
    }

    /// Number of zeros whose basin contains at least one grid point.
    pub fn distinct_labels(&self) -> usize {
        let mut seen = vec![false; self.zeros.len()];
        for &l in &self.labels {
            if l >= 0 {
                seen[l as usize] = true;
            }
        }
        seen.into_iter().filter(|&s| s).count()
    }
}

/// Index of the zero nearest to `z` within `tol`.
struct ZeroIndex<'a> {
    zeros: &'a [ZeroRecord],
    cells: HashMap<(i64, i64), Vec<usize>>,
    tol: f64,
}

impl<'a> ZeroIndex<'a> {
    fn new(zeros: &'a [ZeroRecord], tol: f64) -> Self {
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (k, z) in zeros.iter().enumerate() {
            cells.entry(cell_of(z.location, tol)).or_default().push(k);
        }
        ZeroIndex { zeros, cells, tol }
    }

    fn nearest(&self, z: Complex) -> Option<usize> {
        let (cx, cy) = cell_of(z, self.tol);
        let mut best: Option<(f64, usize)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for &k in self.cells.get(&(cx + dx, cy + dy)).into_iter().flatten() {
                    let d = (self.zeros[k].location - z).norm();
                    if d <= self.tol && best.is_none_or(|(bd, bk)| (d, k) < (bd, bk)) {
                        best = Some((d, k));
                    }
                }
            }
        }
        best.map(|(_, k)| k)
    }
}

/// Label grid outcomes (ordered as [`make_grid`]) by matching converged
/// limits to `zeros`.
pub fn label_outcomes(
    spec: &GridSpec,
    outcomes: &[IterationOutcome],
    zeros: Vec<ZeroRecord>,
    match_tol: f64,
) -> Result<BasinLabeling, SearchError> {
    spec.validate()?;
    let (nx, ny) = (spec.nx(), spec.ny());
    if outcomes.len() != nx * ny {
        return Err(SearchError::ShapeMismatch {
            expected: nx * ny,
            got: outcomes.len(),
        });
    }
    let index = ZeroIndex::new(&zeros, match_tol);
    let labels = outcomes
        .iter()
        .map(|o| {
            if o.status.is_converged() && o.residual.is_finite() {
                index.nearest(o.point).map_or(-1, |k| k as i32)
            } else {
                -1
            }
        })
        .collect();
    let iteration_counts = outcomes.iter().map(|o| o.iterations as u32).collect();
    Ok(BasinLabeling {
        grid: *spec,
        nx,
        ny,
        labels,
        iteration_counts,
        zeros,
    })
}

/// Iterate the grid and label each point by the zero it converges to.
pub fn label_basins(
    map: &HarmonicMap,
    spec: &GridSpec,
    cfg: &StoppingConfig,
    zeros: Vec<ZeroRecord>,
    match_tol: f64,
) -> Result<BasinLabeling, SearchError> {
    let points = make_grid(spec)?;
    let outcomes = iterate_batch(map, &points, cfg);
    label_outcomes(spec, &outcomes, zeros, match_tol)
}

/// Zeros and basins from a single pass over the grid.
pub fn search_basins(
    map: &HarmonicMap,
    spec: &GridSpec,
    cfg: &StoppingConfig,
    dedup_tol: f64,
    match_tol: f64,
) -> Result<BasinLabeling, SearchError> {
    let points = make_grid(spec)?;
    let outcomes = iterate_batch(map, &points, cfg);
    let zeros = zeros_from_outcomes(map, &outcomes, dedup_tol);
    label_outcomes(spec, &outcomes, zeros, match_tol)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    re: f64,
    im: f64,
    residual: f64,
    jacobian: f64,
    orientation: &'a str,
    members: usize,
}

fn orientation_name(o: Orientation) -> &'static str {
    match o {
        Orientation::SensePreserving => "sense_preserving",
        Orientation::SenseReversing => "sense_reversing",
        Orientation::Singular => "singular",
    }
}

/// CSV with columns `re, im, residual, jacobian, orientation, members`.
pub fn write_zeros_csv<W: Write>(zeros: &[ZeroRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for z in zeros {
        w.serialize(CsvRow {
            re: z.location.re,
            im: z.location.im,
            residual: z.residual,
            jacobian: z.jacobian,
            orientation: orientation_name(z.orientation),
            members: z.members,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_zeros_json<W: Write>(zeros: &[ZeroRecord], out: W) -> serde_json::Result<()> {
    serde_json::to_writer_pretty(out, zeros)
}
