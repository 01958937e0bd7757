//! Browser bindings: phase plots, basins of attraction and single orbits.
//!
//! Functions are passed as JSON function specifications, e.g.
//! `{"builtin": "mpw", "params": {"n": 3, "r": 0.6}}`. Images come back as
//! RGBA bytes ready for `ImageData`.

use harmonic_newton::harmonic_map::FunctionSpec;
use harmonic_newton::newton::{orbit, LinsysMode};
use harmonic_newton::search::{
    search_basins, GridSpec, Window, DEFAULT_DEDUP_TOL, DEFAULT_MATCH_TOL,
};
use harmonic_newton::viz::{draw_markers, render_basins, render_phase, BLACK, WHITE};
use harmonic_newton::{Complex, HarmonicMap, StoppingConfig};
use wasm_bindgen::prelude::*;

fn build(spec_json: &str) -> Result<HarmonicMap, String> {
    let spec: FunctionSpec = serde_json::from_str(spec_json).map_err(|e| e.to_string())?;
    spec.build().map_err(|e| e.to_string())
}

fn window(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Window, String> {
    let w = Window::new(x_min, x_max, y_min, y_max);
    w.validate().map_err(|e| e.to_string())?;
    Ok(w)
}

fn stopping(maxit: usize, linsys: &str) -> Result<StoppingConfig, String> {
    let mode: LinsysMode = linsys.parse()?;
    let cfg = StoppingConfig::default()
        .with_maxit(maxit)
        .with_linsys(mode);
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

/// An RGBA image with the number of zeros drawn into it.
#[wasm_bindgen]
pub struct Rendered {
    width: usize,
    height: usize,
    rgba: Vec<u8>,
    zeros: Vec<f64>,
}

#[wasm_bindgen]
impl Rendered {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }

    /// Zero locations as `[re0, im0, re1, im1, …]`.
    pub fn zeros(&self) -> Vec<f64> {
        self.zeros.clone()
    }
}

pub fn phase_plot_impl(
    spec_json: &str,
    width: usize,
    height: usize,
    bounds: [f64; 4],
    show_poles: bool,
) -> Result<Rendered, String> {
    if width == 0 || height == 0 || width * height > 4_000_000 {
        return Err("image must have between 1 and 4e6 pixels".into());
    }
    let map = build(spec_json)?;
    let [x0, x1, y0, y1] = bounds;
    let mut img = render_phase(&map, width, height, window(x0, x1, y0, y1)?, 0.0);
    if show_poles {
        let poles: Vec<Complex> = map.poles().iter().map(|p| p.location).collect();
        draw_markers(&mut img, &poles, 3, WHITE);
    }
    Ok(Rendered {
        width,
        height,
        rgba: img.to_rgba(),
        zeros: Vec::new(),
    })
}

pub fn basins_impl(
    spec_json: &str,
    bounds: [f64; 4],
    mesh: f64,
    maxit: usize,
    linsys: &str,
    palette_seed: u64,
) -> Result<Rendered, String> {
    let map = build(spec_json)?;
    let [x0, x1, y0, y1] = bounds;
    let grid = GridSpec::new(window(x0, x1, y0, y1)?, mesh);
    grid.validate().map_err(|e| e.to_string())?;
    if grid.len() > 1_000_000 {
        return Err(format!("{} grid points; use a coarser mesh", grid.len()));
    }
    let cfg = stopping(maxit, linsys)?;
    let lab = search_basins(&map, &grid, &cfg, DEFAULT_DEDUP_TOL, DEFAULT_MATCH_TOL)
        .map_err(|e| e.to_string())?;
    let mut img = render_basins(&lab, palette_seed, maxit as u32);
    let zeros: Vec<Complex> = lab.zeros.iter().map(|z| z.location).collect();
    draw_markers(&mut img, &zeros, 1, BLACK);
    Ok(Rendered {
        width: img.width,
        height: img.height,
        rgba: img.to_rgba(),
        zeros: zeros.iter().flat_map(|z| [z.re, z.im]).collect(),
    })
}

pub fn orbit_impl(
    spec_json: &str,
    re: f64,
    im: f64,
    maxit: usize,
    linsys: &str,
) -> Result<Vec<f64>, String> {
    let map = build(spec_json)?;
    let cfg = stopping(maxit, linsys)?;
    let (points, _) = orbit(&map, Complex::new(re, im), &cfg);
    Ok(points.iter().flat_map(|z| [z.re, z.im]).collect())
}

/// Phase plot of the window `[x_min, x_max] × [y_min, y_max]`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn phase_plot(
    spec_json: &str,
    width: usize,
    height: usize,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    show_poles: bool,
) -> Result<Rendered, JsError> {
    phase_plot_impl(
        spec_json,
        width,
        height,
        [x_min, x_max, y_min, y_max],
        show_poles,
    )
    .map_err(|e| JsError::new(&e))
}

/// Basins of attraction on a grid of the given mesh, one pixel per point.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn basins(
    spec_json: &str,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    mesh: f64,
    maxit: usize,
    linsys: &str,
    palette_seed: u32,
) -> Result<Rendered, JsError> {
    basins_impl(
        spec_json,
        [x_min, x_max, y_min, y_max],
        mesh,
        maxit,
        linsys,
        palette_seed as u64,
    )
    .map_err(|e| JsError::new(&e))
}

/// Newton orbit from `re + i·im` as `[re0, im0, re1, im1, …]`.
#[wasm_bindgen]
pub fn newton_orbit(
    spec_json: &str,
    re: f64,
    im: f64,
    maxit: usize,
    linsys: &str,
) -> Result<Vec<f64>, JsError> {
    orbit_impl(spec_json, re, im, maxit, linsys).map_err(|e| JsError::new(&e))
}
