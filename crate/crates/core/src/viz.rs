//! Phase plots and basin images.
//!
//! Phase plots colour each pixel by the argument of `f` at the pixel centre
//! on the HSV wheel (red at argument 0, then yellow, green, cyan, blue,
//! magenta counterclockwise); zeros are black and non-finite values white.
//! Basin images give each zero a palette colour darkened by the iteration
//! count, with non-converged points black.

use std::f64::consts::TAU;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::harmonic_map::HarmonicMap;
use crate::search::{BasinLabeling, Window};
use crate::Complex;

pub type Rgb = [u8; 3];

pub const BLACK: Rgb = [0, 0, 0];
pub const WHITE: Rgb = [255, 255, 255];

const GOLDEN_RATIO_FRAC: f64 = 0.618_033_988_749_894_9;
const GOLDEN_ANGLE_FRAC: f64 = 0.381_966_011_250_105_1;

/// RGB raster, row-major with the top row at `window.y_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    pub window: Window,
    pub pixels: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, window: Window) -> Self {
        RasterImage {
            width,
            height,
            window,
            pixels: vec![0; 3 * width * height],
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Rgb {
        let i = 3 * (row * self.width + col);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set(&mut self, row: usize, col: usize, rgb: Rgb) {
        let i = 3 * (row * self.width + col);
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    /// Point at the centre of pixel `(row, col)`.
    pub fn pixel_center(&self, row: usize, col: usize) -> Complex {
        pixel_center(&self.window, self.width, self.height, row, col)
    }

    /// Pixel containing `z`, if inside the image.
    pub fn pixel_of(&self, z: Complex) -> Option<(usize, usize)> {
        let w = &self.window;
        let col = ((z.re - w.x_min) / w.width() * self.width as f64).floor();
        let row = ((w.y_max - z.im) / w.height() * self.height as f64).floor();
        let inside =
            (0.0..self.width as f64).contains(&col) && (0.0..self.height as f64).contains(&row);
        inside.then_some((row as usize, col as usize))
    }

    /// RGBA bytes with opaque alpha.
    pub fn to_rgba(&self) -> Vec<u8> {
        self.pixels
            .chunks_exact(3)
            .flat_map(|p| [p[0], p[1], p[2], 255])
            .collect()
    }

    /// Binary PPM (P6).
    pub fn write_ppm<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.pixels)
    }

    pub fn to_ppm_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(self.pixels.len() + 32);
        self.write_ppm(&mut buf)
            .expect("writing to a Vec cannot fail");
        buf
    }

    #[cfg(feature = "png")]
    pub fn write_png<W: Write + io::Seek>(&self, out: W) -> image::ImageResult<()> {
        use image::ImageEncoder;
        image::codecs::png::PngEncoder::new(out).write_image(
            &self.pixels,
            self.width as u32,
            self.height as u32,
            image::ExtendedColorType::Rgb8,
        )
    }

    /// Write PPM or (with the `png` feature) PNG, chosen by file extension.
    pub fn save(&self, path: &std::path::Path) -> io::Result<()> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("ppm") => {
                let mut f = io::BufWriter::new(std::fs::File::create(path)?);
                self.write_ppm(&mut f)?;
                f.flush()
            }
            #[cfg(feature = "png")]
            Some("png") => {
                let f = io::BufWriter::new(std::fs::File::create(path)?);
                self.write_png(f).map_err(io::Error::other)
            }
            _ => Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("unsupported image extension for {}", path.display()),
            )),
        }
    }
}

fn pixel_center(w: &Window, width: usize, height: usize, row: usize, col: usize) -> Complex {
    Complex::new(
        w.x_min + (col as f64 + 0.5) * w.width() / width as f64,
        w.y_max - (row as f64 + 0.5) * w.height() / height as f64,
    )
}

/// HSV with all components in `[0, 1]` to 8-bit RGB.
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> Rgb {
    let h6 = h.rem_euclid(1.0) * 6.0;
    let sector = (h6.floor() as usize).min(5);
    let f = h6 - sector as f64;
    let (p, q, t) = (v * (1.0 - s), v * (1.0 - s * f), v * (1.0 - s * (1.0 - f)));
    let (r, g, b) = match sector {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    let q8 = |x: f64| (255.0 * x).round().clamp(0.0, 255.0) as u8;
    [q8(r), q8(g), q8(b)]
}

/// Hue in `[0, 1)` of an RGB colour; `None` for greys.
pub fn rgb_hue(rgb: Rgb) -> Option<f64> {
    let [r, g, b] = rgb.map(|c| c as f64);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let d = max - min;
    if d == 0.0 {
        return None;
    }
    let h = if max == r {
        ((g - b) / d).rem_euclid(6.0)
    } else if max == g {
        (b - r) / d + 2.0
    } else {
        (r - g) / d + 4.0
    };
    Some(h / 6.0)
}

/// Colour of the value `w` in a phase plot.
pub fn phase_color(w: Complex, zero_threshold: f64) -> Rgb {
    if !w.is_finite() {
        return WHITE;
    }
    let r = w.norm();
    if r <= zero_threshold || r == 0.0 {
        return BLACK;
    }
    hsv_to_rgb((w.arg() / TAU).rem_euclid(1.0), 1.0, 1.0)
}

/// Phase plot of `f` sampled at pixel centres.
pub fn render_phase(
    map: &HarmonicMap,
    width: usize,
    height: usize,
    window: Window,
    zero_threshold: f64,
) -> RasterImage {
    render_phase_fn(|z| map.eval(z), width, height, window, zero_threshold)
}

/// Phase plot of an arbitrary complex function.
pub fn render_phase_fn<F>(
    f: F,
    width: usize,
    height: usize,
    window: Window,
    zero_threshold: f64,
) -> RasterImage
where
    F: Fn(Complex) -> Complex + Sync + Send,
{
    let mut img = RasterImage::new(width, height, window);
    if width == 0 || height == 0 {
        return img;
    }
    crate::par::for_each_chunk(&mut img.pixels, 3 * width, |row, line| {
        for col in 0..width {
            let z = pixel_center(&window, width, height, row, col);
            line[3 * col..3 * col + 3].copy_from_slice(&phase_color(f(z), zero_threshold));
        }
    });
    img
}

/// Base colour of the `k`-th zero: hues stepped by the golden angle.
pub fn palette_color(k: usize, palette_seed: u64) -> Rgb {
    let start = (palette_seed as f64 * GOLDEN_RATIO_FRAC).fract();
    let hue = (start + k as f64 * GOLDEN_ANGLE_FRAC).fract();
    hsv_to_rgb(hue, 0.75, 1.0)
}

/// One pixel per grid point, coloured by basin and shaded by iteration
/// count: `max(0.25, 1 − iterations/max_shade_iters)`.
pub fn render_basins(
    labeling: &BasinLabeling,
    palette_seed: u64,
    max_shade_iters: u32,
) -> RasterImage {
    let (nx, ny) = (labeling.nx, labeling.ny);
    let g = &labeling.grid;
    let half = 0.5 * g.mesh;
    // Pixel centres coincide with grid points.
    let window = Window::new(
        g.window.x_min - half,
        g.window.x_min + (nx as f64 - 0.5) * g.mesh,
        g.window.y_min - half,
        g.window.y_min + (ny as f64 - 0.5) * g.mesh,
    );
    let palette: Vec<Rgb> = (0..labeling.zeros.len())
        .map(|k| palette_color(k, palette_seed))
        .collect();
    let mut img = RasterImage::new(nx, ny, window);
    let max_shade = max_shade_iters.max(1) as f64;
    for iy in 0..ny {
        let row = ny - 1 - iy;
        for ix in 0..nx {
            let idx = iy * nx + ix;
            let label = labeling.labels[idx];
            let rgb = if label < 0 {
                BLACK
            } else {
                let base = palette[label as usize];
                let shade = (1.0 - labeling.iteration_counts[idx] as f64 / max_shade).max(0.25);
                base.map(|c| (c as f64 * shade).round() as u8)
            };
            img.set(row, ix, rgb);
        }
    }
    img
}

/// Filled discs of `radius_px` pixels around each point.
pub fn draw_markers(img: &mut RasterImage, points: &[Complex], radius_px: usize, color: Rgb) {
    let r = radius_px as i64;
    for &p in points {
        let Some((row, col)) = img.pixel_of(p) else {
            continue;
        };
        for dr in -r..=r {
            for dc in -r..=r {
                if dr * dr + dc * dc > r * r {
                    continue;
                }
                let (y, x) = (row as i64 + dr, col as i64 + dc);
                if (0..img.height as i64).contains(&y) && (0..img.width as i64).contains(&x) {
                    img.set(y as usize, x as usize, color);
                }
            }
        }
    }
}

/// Signed number of turns the hue makes along a circle of `radius_px`
/// pixels around pixel `(row, col)`, traversed counterclockwise in the plane.
pub fn hue_winding(
    img: &RasterImage,
    row: usize,
    col: usize,
    radius_px: f64,
    samples: usize,
) -> Option<i64> {
    let mut hues = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = TAU * k as f64 / samples as f64;
        // rows grow downwards, so counterclockwise means decreasing row
        let y = (row as f64 - radius_px * t.sin()).round();
        let x = (col as f64 + radius_px * t.cos()).round();
        if !(0.0..img.height as f64).contains(&y) || !(0.0..img.width as f64).contains(&x) {
            return None;
        }
        hues.push(rgb_hue(img.get(y as usize, x as usize))?);
    }
    let mut total = 0.0;
    for k in 0..samples {
        let d = hues[(k + 1) % samples] - hues[k];
        total += d - d.round();
    }
    Some(total.round() as i64)
}
