use std::fs;
use std::io::{self, Write};
use std::path::Path;

use harmonic_newton::certify::{
    kantorovich, kantorovich_estimated, mysovskii_disk, MysovskiiConfig,
};
use harmonic_newton::harmonic_map::FunctionSpec;
use harmonic_newton::laurent::{
    default_radius, default_radius_at_infinity, expand_map, QuadratureConfig,
};
use harmonic_newton::search::{
    find_zeros, nonisolated_suspected, search_basins, write_zeros_csv, write_zeros_json, GridSpec,
    Window, ZeroRecord,
};
use harmonic_newton::seeding::{
    infinity_seeds, normal_form_of_map, perturbed_map, pole_seeds, singular_seeds, LaurentData,
};
use harmonic_newton::viz::{draw_markers, render_basins, render_phase, RasterImage, BLACK, WHITE};
use harmonic_newton::{iterate, Complex, HarmonicMap, StoppingConfig};
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::error::Failure;
use crate::manifest::{sidecar_path, RunManifest};

/// Values a replayed manifest pins regardless of the recorded flags.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub function: Option<FunctionSpec>,
    pub grid: Option<GridSpec>,
    pub stopping: Option<StoppingConfig>,
}

pub fn execute(cmd: &Command, ov: &Overrides) -> Result<(), Failure> {
    match cmd {
        Command::Solve(a) => solve(cmd, a, ov),
        Command::Basins(a) => basins(cmd, a, ov),
        Command::Phaseplot(a) => phaseplot(cmd, a, ov),
        Command::Seeds(a) => seeds(a, ov),
        Command::Certify(a) => certify(a, ov),
        Command::Laurent(a) => laurent(cmd, a, ov),
        Command::Sweep(a) => sweep(cmd, a, ov),
        Command::Replay(a) => replay(a),
    }
}

fn function_spec(a: &FunctionArgs, ov: &Overrides) -> Result<FunctionSpec, Failure> {
    if let Some(spec) = &ov.function {
        return Ok(spec.clone());
    }
    let has_params =
        a.n.is_some() || a.r.is_some() || a.eps.is_some() || a.k.is_some() || a.w.is_some();
    let mut spec = match (&a.builtin, &a.function) {
        (Some(name), _) => {
            let mut p = Map::new();
            if let Some(n) = a.n {
                p.insert("n".into(), json!(n));
            }
            for (key, v) in [("r", a.r), ("eps", a.eps), ("k", a.k)] {
                if let Some(v) = v {
                    p.insert(key.into(), json!(v));
                }
            }
            if let Some(w) = a.w {
                p.insert("w".into(), json!([w.re, w.im]));
            }
            FunctionSpec::builtin(name, Value::Object(p))
        }
        (None, Some(path)) => {
            if has_params {
                return Err(Failure::usage(
                    "--n, --r, --eps, --k and --w apply to --builtin only",
                ));
            }
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
        }
        (None, None) => return Err(Failure::usage("one of --builtin or --function is required")),
    };
    if let Some(c) = a.shift {
        spec = FunctionSpec::builtin("shifted", json!({"base": spec, "const": [c.re, c.im]}));
    }
    Ok(spec)
}

/// Default window and mesh for each catalog function.
fn default_grid(spec: &FunctionSpec) -> GridSpec {
    let square = Window::new(-2.0, 2.0, -2.0, 2.0);
    match spec {
        FunctionSpec::Builtin { builtin, params } => match builtin.as_str() {
            "tan_conj" => GridSpec::new(Window::new(-8.0, 8.0, -2.0, 2.0), 0.2),
            "wilmshurst" => GridSpec::new(Window::square(Complex::new(0.5, 0.0), 2.0), 0.05),
            "einstein" => GridSpec::new(square, 0.02),
            "shifted" => params
                .get("base")
                .and_then(|b| serde_json::from_value(b.clone()).ok())
                .map_or(GridSpec::new(square, 0.05), |base| default_grid(&base)),
            _ => GridSpec::new(square, 0.05),
        },
        FunctionSpec::Rational { .. } => GridSpec::new(square, 0.05),
    }
}

fn grid_spec(g: &GridArgs, fallback: GridSpec, ov: &Overrides) -> Result<GridSpec, Failure> {
    let spec = ov.grid.unwrap_or(GridSpec::new(
        g.window.unwrap_or(fallback.window),
        g.mesh.unwrap_or(fallback.mesh),
    ));
    spec.validate()?;
    Ok(spec)
}

fn stopping(s: &StopArgs, ov: &Overrides) -> Result<StoppingConfig, Failure> {
    let cfg = ov.stopping.unwrap_or_else(|| {
        let d = StoppingConfig::default();
        StoppingConfig {
            maxit: s.maxit.unwrap_or(d.maxit),
            restol: s.restol.unwrap_or(d.restol),
            steptol: s.steptol.unwrap_or(d.steptol),
            use_linsys: s.linsys.unwrap_or(d.use_linsys),
            auto_threshold: d.auto_threshold,
        }
    });
    cfg.validate()?;
    Ok(cfg)
}

fn check_image_path(path: &Path) -> Result<(), Failure> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("png" | "ppm") => Ok(()),
        _ => Err(Failure::usage(format!(
            "{}: image output must end in .png or .ppm",
            path.display()
        ))),
    }
}

fn save_image(img: &RasterImage, path: &Path) -> Result<(), Failure> {
    img.save(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn create_file(path: &Path) -> Result<io::BufWriter<fs::File>, Failure> {
    fs::File::create(path)
        .map(io::BufWriter::new)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn is_stdout(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn locations(zeros: &[ZeroRecord]) -> Vec<Complex> {
    zeros.iter().map(|z| z.location).collect()
}

/// Shortest round-trip digits; exponent form outside `[1e-4, 1e6)`.
fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn fmt_point(z: Complex) -> String {
    format!("{} {}", fmt_num(z.re), fmt_num(z.im))
}

fn solve(cmd: &Command, a: &SolveArgs, ov: &Overrides) -> Result<(), Failure> {
    let spec = function_spec(&a.function, ov)?;
    let map = spec.build()?;
    let grid = grid_spec(&a.grid, default_grid(&spec), ov)?;
    let cfg = stopping(&a.stop, ov)?;
    let zeros = find_zeros(&map, &grid, &cfg, a.dedup_tol)?;

    let mut manifest = RunManifest::new(cmd, spec);
    manifest.grid = Some(grid);
    manifest.stopping = Some(cfg);
    let mut to_stdout = false;
    if let Some(path) = &a.csv {
        let res = if is_stdout(path) {
            to_stdout = true;
            write_zeros_csv(&zeros, io::stdout().lock())
        } else {
            manifest.outputs.push(path.clone());
            write_zeros_csv(&zeros, create_file(path)?)
        };
        res.map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = &a.json {
        let res = if is_stdout(path) {
            to_stdout = true;
            write_zeros_json(&zeros, io::stdout().lock()).map(|()| println!())
        } else {
            manifest.outputs.push(path.clone());
            write_zeros_json(&zeros, create_file(path)?)
        };
        res.map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    }
    if let Some(first) = manifest.outputs.first() {
        manifest.write(&sidecar_path(first))?;
    }

    let max_res = zeros.iter().map(|z| z.residual).fold(0.0, f64::max);
    let summary = format!("{} zeros, max residual {:.4e}", zeros.len(), max_res);
    if to_stdout {
        eprintln!("{summary}");
    } else {
        println!("{summary}");
    }
    if nonisolated_suspected(&zeros) {
        eprintln!("warning: every zero is singular; the zero set may not be isolated");
    }
    Ok(())
}

fn basins(cmd: &Command, a: &BasinsArgs, ov: &Overrides) -> Result<(), Failure> {
    check_image_path(&a.output)?;
    let spec = function_spec(&a.function, ov)?;
    let map = spec.build()?;
    let grid = grid_spec(&a.grid, default_grid(&spec), ov)?;
    let cfg = stopping(&a.stop, ov)?;
    let lab = search_basins(&map, &grid, &cfg, a.dedup_tol, a.match_tol)?;
    let mut img = render_basins(
        &lab,
        a.palette_seed,
        a.max_shade.unwrap_or(cfg.maxit as u32),
    );
    if let Some(r) = a.markers {
        draw_markers(&mut img, &locations(&lab.zeros), r, BLACK);
    }
    save_image(&img, &a.output)?;

    let mut manifest = RunManifest::new(cmd, spec);
    manifest.grid = Some(grid);
    manifest.stopping = Some(cfg);
    manifest.outputs.push(a.output.clone());
    manifest.palette_seed = Some(a.palette_seed);
    manifest.write(&sidecar_path(&a.output))?;

    let labelled = lab.labels.iter().filter(|&&l| l >= 0).count();
    println!(
        "{} zeros, {labelled} of {} points labelled, mean iterations {:.3}",
        lab.zeros.len(),
        lab.labels.len(),
        lab.mean_iterations().unwrap_or(f64::NAN)
    );
    Ok(())
}

fn phaseplot(cmd: &Command, a: &PhaseplotArgs, ov: &Overrides) -> Result<(), Failure> {
    check_image_path(&a.output)?;
    if a.width == 0 || a.height == Some(0) {
        return Err(Failure::usage("image dimensions must be positive"));
    }
    let spec = function_spec(&a.function, ov)?;
    let map = spec.build()?;
    let grid = grid_spec(&a.grid, default_grid(&spec), ov)?;
    let window = grid.window;
    let height = a.height.unwrap_or_else(|| {
        ((a.width as f64 * window.height() / window.width()).round() as usize).max(1)
    });
    let mut img = render_phase(&map, a.width, height, window, a.zero_threshold);

    let mut manifest = RunManifest::new(cmd, spec);
    manifest.grid = Some(grid);
    if a.zeros {
        let cfg = stopping(&a.stop, ov)?;
        let zeros = find_zeros(
            &map,
            &grid,
            &cfg,
            harmonic_newton::search::DEFAULT_DEDUP_TOL,
        )?;
        draw_markers(&mut img, &locations(&zeros), a.marker_radius, BLACK);
        manifest.stopping = Some(cfg);
    }
    if a.poles {
        let poles: Vec<Complex> = map.poles().iter().map(|p| p.location).collect();
        draw_markers(&mut img, &poles, a.marker_radius, WHITE);
    }
    save_image(&img, &a.output)?;
    manifest.outputs.push(a.output.clone());
    manifest.write(&sidecar_path(&a.output))?;
    println!(
        "{}x{height} phase plot written to {}",
        a.width,
        a.output.display()
    );
    Ok(())
}

fn seeds(a: &SeedsArgs, ov: &Overrides) -> Result<(), Failure> {
    let spec = function_spec(&a.function, ov)?;
    let map = spec.build()?;
    let cfg = stopping(&a.stop, ov)?;

    let (seeds, target): (Vec<Complex>, HarmonicMap) = if let Some(p) = a.target.at_pole {
        let n = a
            .order
            .ok_or_else(|| Failure::usage("--at-pole requires the pole order (--order)"))?;
        let r = a.radius.unwrap_or_else(|| default_radius(&map, p));
        let data = LaurentData::from_map(&map, p, r, a.nodes, Some(n))?;
        println!(
            "# pole {} of order {n}, c = {}",
            fmt_point(p),
            fmt_point(data.constant())
        );
        (pole_seeds(&data)?, map)
    } else if a.target.at_infinity {
        let r = a.radius.unwrap_or_else(|| default_radius_at_infinity(&map));
        let data = LaurentData::at_infinity(&map, r, a.nodes, a.order)?;
        println!(
            "# infinity, degree {}, c = {}",
            data.n,
            fmt_point(data.constant())
        );
        (infinity_seeds(&data.a, &data.b, data.n)?, map)
    } else {
        let z0 = a.target.at_singular.expect("clap enforces one target");
        let delta = a
            .delta
            .ok_or_else(|| Failure::usage("--at-singular requires --delta"))?;
        let r = a.radius.unwrap_or_else(|| default_radius(&map, z0));
        let nf = normal_form_of_map(&map, z0, r, a.nodes, a.normal_order)?;
        let c = nf.perturbation();
        println!(
            "# singular zero {}, theta {}, c_tilde {}, seeds for f - delta*c with c = {}",
            fmt_point(z0),
            nf.theta,
            fmt_point(nf.c_tilde),
            fmt_point(c)
        );
        let target = perturbed_map(&map, &nf, delta);
        (singular_seeds(&nf, delta)?, target)
    };

    for s in seeds {
        if a.iterate {
            let out = iterate(&target, s, &cfg);
            println!(
                "{} -> {} {:?} iterations={} residual={:e}",
                fmt_point(s),
                fmt_point(out.point),
                out.status,
                out.iterations,
                out.residual
            );
        } else {
            println!("{}", fmt_point(s));
        }
    }
    Ok(())
}

fn certify(a: &CertifyArgs, ov: &Overrides) -> Result<(), Failure> {
    let spec = function_spec(&a.function, ov)?;
    let map = spec.build()?;
    for &z in &a.points {
        let mut record = Map::new();
        record.insert("point".into(), json!([z.re, z.im]));
        if matches!(a.method, CertifyMethod::Kantorovich | CertifyMethod::Both) {
            let radius = a.radius.unwrap_or_else(|| default_radius(&map, z));
            let cert = match (a.sup_ddh, a.sup_ddg) {
                (Some(h), Some(g)) => kantorovich(&map, z, radius, h, g)?,
                _ => kantorovich_estimated(&map, z, radius, a.grid_n)?,
            };
            record.insert("kantorovich".into(), serde_json::to_value(cert)?);
        }
        if matches!(a.method, CertifyMethod::Mysovskii | CertifyMethod::Both) {
            let cfg = MysovskiiConfig {
                r_max: a.r_max.unwrap_or_else(|| default_radius(&map, z)),
                grid_n: a.sample_n,
                r_steps: a.r_steps,
                max_pairs: a.max_pairs,
                seed: a.seed,
            };
            let disk = mysovskii_disk(&map, z, &cfg)?;
            record.insert("mysovskii".into(), serde_json::to_value(disk)?);
        }
        println!("{}", Value::Object(record));
    }
    Ok(())
}

fn laurent(cmd: &Command, a: &LaurentArgs, ov: &Overrides) -> Result<(), Failure> {
    let spec = function_spec(&a.function, ov)?;
    let map = spec.build()?;
    let (center, radius) = match a.center {
        Some(c) => (c, a.radius.unwrap_or_else(|| default_radius(&map, c))),
        None => (
            Complex::new(0.0, 0.0),
            a.radius.unwrap_or_else(|| default_radius_at_infinity(&map)),
        ),
    };
    let cfg = QuadratureConfig::new(center, radius, a.k_min, a.k_max).with_nodes(a.nodes);
    let (ca, cb) = expand_map(&map, &cfg)?;
    let mut text = String::from("k,a_re,a_im,b_re,b_im\n");
    for k in a.k_min..=a.k_max {
        let (x, y) = (ca.get_or_zero(k), cb.get_or_zero(k));
        let cols = [x.re, x.im, y.re, y.im].map(fmt_num).join(",");
        text.push_str(&format!("{k},{cols}\n"));
    }
    match &a.csv {
        Some(path) if !is_stdout(path) => {
            fs::write(path, text)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            let mut manifest = RunManifest::new(cmd, spec);
            manifest.outputs.push(path.clone());
            manifest.write(&sidecar_path(path))?;
        }
        _ => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn sweep(cmd: &Command, a: &SweepArgs, ov: &Overrides) -> Result<(), Failure> {
    if a.deltas.is_empty() {
        return Err(Failure::usage("--deltas needs at least one value"));
    }
    let spec = function_spec(&a.function, ov)?;
    let map = spec.build()?;
    let grid = grid_spec(
        &a.grid,
        GridSpec::new(Window::square(a.at, 0.25), 0.0025),
        ov,
    )?;
    let cfg = stopping(&a.stop, ov)?;
    let radius = a.radius.unwrap_or_else(|| default_radius(&map, a.at));
    let nf = normal_form_of_map(&map, a.at, radius, a.nodes, a.normal_order)?;
    fs::create_dir_all(&a.output_dir)
        .map_err(|e| Failure::usage(format!("{}: {e}", a.output_dir.display())))?;

    let mut manifest = RunManifest::new(cmd, spec);
    manifest.grid = Some(grid);
    manifest.stopping = Some(cfg);
    manifest.palette_seed = Some(a.palette_seed);
    println!(
        "# singular zero {}, c = {}",
        fmt_point(a.at),
        fmt_point(nf.perturbation())
    );
    for (i, &delta) in a.deltas.iter().enumerate() {
        let perturbed = perturbed_map(&map, &nf, delta);
        let lab = search_basins(&perturbed, &grid, &cfg, a.dedup_tol, a.match_tol)?;
        let path = a
            .output_dir
            .join(format!("delta_{i}.{}", a.format.extension()));
        let img = render_basins(&lab, a.palette_seed, cfg.maxit as u32);
        save_image(&img, &path)?;
        manifest.outputs.push(path.clone());

        let mut seen = vec![false; lab.zeros.len()];
        for &l in lab.labels.iter().filter(|&&l| l >= 0) {
            seen[l as usize] = true;
        }
        let near = lab
            .zeros
            .iter()
            .zip(&seen)
            .filter(|(z, &s)| s && (z.location - a.at).norm() < a.region)
            .count();
        println!(
            "delta {delta}: {near} zeros with basins within {} of the singular zero, {} in the window -> {}",
            a.region,
            lab.zeros.len(),
            path.display()
        );
        if delta != 0.0 {
            match singular_seeds(&nf, delta) {
                Ok(seeds) => {
                    for s in seeds {
                        let out = iterate(&perturbed, s, &cfg);
                        println!(
                            "  seed {} -> {} {:?} iterations={}",
                            fmt_point(s),
                            fmt_point(out.point),
                            out.status,
                            out.iterations
                        );
                    }
                }
                Err(e) => println!("  no seeds: {e}"),
            }
        }
    }
    manifest.write(&a.output_dir.join("sweep.manifest.json"))?;
    Ok(())
}

fn replay(a: &ReplayArgs) -> Result<(), Failure> {
    let manifest = RunManifest::read(&a.manifest)?;
    if matches!(manifest.command, Command::Replay(_)) {
        return Err(Failure::usage("a manifest cannot replay another replay"));
    }
    let ov = Overrides {
        function: Some(manifest.function),
        grid: manifest.grid,
        stopping: manifest.stopping,
    };
    execute(&manifest.command, &ov)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fargs(builtin: &str) -> FunctionArgs {
        FunctionArgs {
            builtin: Some(builtin.into()),
            ..Default::default()
        }
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.0477611940298508, -3.1e-17, 2.5e8, 1e-4] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_num(-3.1e-17), "-3.1e-17");
        assert_eq!(fmt_num(0.5), "0.5");
    }

    #[test]
    fn builtin_flags_become_params() {
        let a = FunctionArgs {
            n: Some(4),
            r: Some(0.5),
            ..fargs("mpw")
        };
        let spec = function_spec(&a, &Overrides::default()).unwrap();
        assert_eq!(
            spec,
            FunctionSpec::builtin("mpw", json!({"n": 4, "r": 0.5}))
        );
    }

    #[test]
    fn shift_wraps_the_base() {
        let a = FunctionArgs {
            shift: Some(Complex::new(-0.7, 0.0)),
            ..fargs("mpw")
        };
        let map = function_spec(&a, &Overrides::default())
            .unwrap()
            .build()
            .unwrap();
        let z = Complex::new(0.9, 0.1);
        let base = FunctionSpec::builtin("mpw", json!({})).build().unwrap();
        assert_eq!(map.eval(z), base.eval(z) + Complex::new(-0.7, 0.0));
    }

    #[test]
    fn missing_function_is_a_usage_error() {
        let err = function_spec(&FunctionArgs::default(), &Overrides::default()).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::EXIT_USAGE);
    }

    #[test]
    fn grid_defaults_follow_the_catalog() {
        let tan = default_grid(&FunctionSpec::builtin("tan_conj", json!({})));
        assert_eq!((tan.nx(), tan.ny()), (81, 21));
        let shifted = FunctionSpec::builtin("shifted", json!({"base": {"builtin": "einstein"}}));
        assert_eq!(default_grid(&shifted).mesh, 0.02);
        let w = default_grid(&FunctionSpec::builtin("wilmshurst", json!({"n": 10})));
        assert_eq!(w.window, Window::new(-1.5, 2.5, -2.0, 2.0));
    }

    #[test]
    fn overrides_win() {
        let g = GridSpec::new(Window::new(0.0, 1.0, 0.0, 1.0), 0.5);
        let ov = Overrides {
            grid: Some(g),
            ..Default::default()
        };
        let args = GridArgs {
            window: Some(Window::new(-1.0, 1.0, -1.0, 1.0)),
            mesh: Some(0.1),
        };
        assert_eq!(grid_spec(&args, g, &ov).unwrap(), g);
    }
}
