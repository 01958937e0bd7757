//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p harmonic-newton --test acceptance`. The process
//! exits non-zero when any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use harmonic_newton::certify::{kantorovich_estimated, BoundKind, KantorovichCertificate};
use harmonic_newton::harmonic_map::{make_builtin, make_rational_pair, RationalPair};
use harmonic_newton::laurent::{
    default_radius, default_radius_at_infinity, laurent_coefficients, Coefficients,
    QuadratureConfig, DEFAULT_NODES,
};
use harmonic_newton::newton::{
    iterate, orbit, step_harmonic, step_linsys, LinsysMode, StoppingConfig,
};
use harmonic_newton::search::{
    find_zeros, search_basins, GridSpec, Window, ZeroRecord, DEFAULT_DEDUP_TOL, DEFAULT_MATCH_TOL,
};
use harmonic_newton::seeding::{
    infinity_seeds, normal_form_of_map, perturbed_map, pole_seeds, singular_seeds,
    solve_linear_harmonic, LaurentData,
};
use harmonic_newton::viz::{hue_winding, render_phase_fn};
use harmonic_newton::{Complex, HarmonicMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

struct Report {
    failures: usize,
    total: usize,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, detail: String) {
        self.total += 1;
        if !ok {
            self.failures += 1;
        }
        println!("{} [{id}] {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn builtin(name: &str, params: serde_json::Value) -> HarmonicMap {
    let serde_json::Value::Object(p) = params else {
        panic!("params must be an object")
    };
    make_builtin(name, &p).unwrap()
}

fn max_residual(map: &HarmonicMap, zeros: &[ZeroRecord]) -> f64 {
    zeros
        .iter()
        .map(|z| map.eval(z.location).norm())
        .fold(0.0, f64::max)
}

/// h = 1/z³ + 10(1+i), g = 2i/z²
fn pole_function() -> HarmonicMap {
    make_rational_pair(&RationalPair {
        h_num: vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(10.0, 10.0)],
        h_den: vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        g_num: vec![c(0.0, 2.0)],
        g_den: vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
    })
    .unwrap()
}

/// z²/(z³ − 0.6³) − 0.7 − conj(z)
fn shifted_mpw() -> HarmonicMap {
    builtin("mpw", json!({})).shifted(c(-0.7, 0.0))
}

/// Name, map, and each seed with the pole it came from.
type SeedSet = (&'static str, HarmonicMap, Vec<(Complex, Complex)>);

/// Pole seeds of the first function and pole plus infinity seeds of the
/// second.
fn example_seeds() -> Vec<SeedSet> {
    let f1 = pole_function();
    let data = LaurentData::from_map(&f1, c(0.0, 0.0), 1.0, DEFAULT_NODES, Some(3)).unwrap();
    let s1 = pole_seeds(&data)
        .unwrap()
        .into_iter()
        .map(|s| (s, c(0.0, 0.0)))
        .collect();

    let f2 = shifted_mpw();
    let mut s2 = Vec::new();
    for pole in f2.poles().to_vec() {
        let r = default_radius(&f2, pole.location);
        let data = LaurentData::from_map(&f2, pole.location, r, DEFAULT_NODES, Some(1)).unwrap();
        s2.extend(
            pole_seeds(&data)
                .unwrap()
                .into_iter()
                .map(|s| (s, pole.location)),
        );
    }
    let inf = LaurentData::at_infinity(&f2, default_radius_at_infinity(&f2), DEFAULT_NODES, None)
        .unwrap();
    let far = infinity_seeds(&inf.a, &inf.b, inf.n).unwrap();
    s2.extend(
        far.into_iter()
            .map(|s| (s, Complex::new(f64::INFINITY, 0.0))),
    );
    vec![("pole function", f1, s1), ("shifted mpw", f2, s2)]
}

fn criterion_1_and_2(rep: &mut Report) {
    let cfg = StoppingConfig::default();
    let square = GridSpec::new(Window::new(-2.0, 2.0, -2.0, 2.0), 0.05);
    let wilm = GridSpec::new(Window::square(c(0.5, 0.0), 2.0), 0.05);

    let cases: [(&str, HarmonicMap, GridSpec, usize); 3] = [
        (
            "mpw(3, 0.6)",
            builtin("mpw", json!({"n": 3, "r": 0.6})),
            square,
            10,
        ),
        (
            "rhie(3, 0.6, 0.004)",
            builtin("rhie", json!({"n": 3, "r": 0.6, "eps": 0.004})),
            square,
            15,
        ),
        (
            "wilmshurst(3)",
            builtin("wilmshurst", json!({"n": 3})),
            wilm,
            9,
        ),
    ];
    for (name, map, grid, expect) in cases {
        let zeros = find_zeros(&map, &grid, &cfg, DEFAULT_DEDUP_TOL).unwrap();
        rep.check(
            "1",
            zeros.len() == expect,
            format!("{name}: {} zeros (expected {expect})", zeros.len()),
        );
        let res = max_residual(&map, &zeros);
        rep.check(
            "2",
            res <= 1e-13,
            format!("{name}: max residual {res:.4e} (limit 1e-13)"),
        );
    }

    let start = Instant::now();
    let map = builtin("wilmshurst", json!({"n": 10}));
    let zeros = find_zeros(&map, &wilm, &cfg, DEFAULT_DEDUP_TOL).unwrap();
    let secs = start.elapsed().as_secs_f64();
    rep.check(
        "1",
        zeros.len() == 100 && secs <= 300.0,
        format!(
            "wilmshurst(10): {} zeros (expected 100) in {secs:.1} s (limit 300 s)",
            zeros.len()
        ),
    );
    let half = c(0.5, 0.0);
    let (mut inner, mut outer_rel) = (0.0f64, 0.0f64);
    for z in &zeros {
        let d = (z.location - half).norm();
        let r = map.eval(z.location).norm();
        if d > 1.0 {
            outer_rel = outer_rel.max(r / d.powi(10));
        } else {
            inner = inner.max(r);
        }
    }
    rep.check(
        "2",
        outer_rel <= 1.5e-13,
        format!("wilmshurst(10): outer relative residual {outer_rel:.4e} (limit 1.5e-13); inner absolute {inner:.4e}"),
    );

    let tan = builtin("tan_conj", json!({}));
    let grid = GridSpec::new(Window::new(-8.0, 8.0, -2.0, 2.0), 0.2);
    let tcfg = StoppingConfig::default().with_linsys(LinsysMode::Auto);
    let zeros = find_zeros(&tan, &grid, &tcfg, DEFAULT_DEDUP_TOL).unwrap();
    let res = max_residual(&tan, &zeros);
    rep.check(
        "2",
        res <= 1.6e-12,
        format!(
            "tan_conj grid: {} zeros, max residual {res:.4e} (limit 1.6e-12)",
            zeros.len()
        ),
    );
}

fn criterion_3(rep: &mut Report) {
    let cfg = StoppingConfig::default();
    for ((name, map, seeds), budget) in example_seeds().into_iter().zip([9 + 3, 7 + 3]) {
        let mut limits: Vec<Complex> = Vec::new();
        let mut worst_res = 0.0f64;
        let mut worst_it = 0;
        let mut all_converged = true;
        for (s, _) in &seeds {
            let out = iterate(&map, *s, &cfg);
            all_converged &= out.status.is_converged();
            worst_res = worst_res.max(map.eval(out.point).norm());
            worst_it = worst_it.max(out.iterations);
            limits.push(out.point);
        }
        let distinct =
            (0..limits.len()).all(|i| (0..i).all(|j| (limits[i] - limits[j]).norm() > 1e-6));
        let ok = all_converged && distinct && worst_it <= budget && worst_res <= 1e-13;
        rep.check(
            "3",
            ok,
            format!(
                "{name}: {} seeds, converged {all_converged}, distinct {distinct}, max iterations {worst_it} (limit {budget}), max residual {worst_res:.4e} (limit 1e-13)",
                seeds.len()
            ),
        );
    }
}

fn criterion_4(rep: &mut Report) {
    let map = builtin("einstein", json!({}));
    let cfg = StoppingConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_step, mut worst_mod, mut worst_arg) = (0.0f64, 0.0f64, 0.0f64);
    let mut all_converged = true;
    let mut n = 0;
    while n < 10_000 {
        let z0 = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if (z0.norm() - 1.0).abs() < 1e-3 || z0.norm() < 1e-3 {
            continue;
        }
        n += 1;
        let (pts, out) = orbit(&map, z0, &cfg);
        all_converged &= out.status.is_converged();
        for w in pts.windows(2) {
            let closed = 2.0 * w[0] / (1.0 + w[0].norm_sqr());
            worst_step = worst_step.max((w[1] - closed).norm());
        }
        worst_mod = worst_mod.max((out.point.norm() - 1.0).abs());
        let d = (out.point.arg() - z0.arg() + PI).rem_euclid(2.0 * PI) - PI;
        worst_arg = worst_arg.max(d.abs());
    }
    rep.check(
        "4",
        all_converged && worst_step <= 1e-14 && worst_mod <= 1e-10 && worst_arg <= 1e-10,
        format!(
            "einstein, 10^4 random starts: converged {all_converged}, closed-form step error {worst_step:.2e} (limit 1e-14), ||z|-1| {worst_mod:.2e}, arg drift {worst_arg:.2e} (limits 1e-10)"
        ),
    );

    let grid = GridSpec::new(Window::new(-2.0, 2.0, -2.0, 2.0), 0.02);
    let lab = search_basins(&map, &grid, &cfg, DEFAULT_DEDUP_TOL, DEFAULT_MATCH_TOL).unwrap();
    let all_mean = lab.iteration_counts.iter().map(|&k| k as f64).sum::<f64>()
        / lab.iteration_counts.len() as f64;
    rep.check(
        "4",
        (all_mean - 6.4).abs() <= 0.5,
        format!("einstein grid mesh 0.02: mean iteration count {all_mean:.3} (target 6.4 ± 0.5)"),
    );
}

fn criterion_5(rep: &mut Report) {
    let cfg = StoppingConfig::default();
    for (name, map, seeds) in example_seeds() {
        for (seed, pole) in seeds {
            // Disk around the seed reaching half way to its pole; at infinity
            // half the seed's modulus.
            let q = 0.5;
            let radius = if pole.is_finite() {
                q * (seed - pole).norm()
            } else {
                q * seed.norm()
            };
            let cert = match kantorovich_estimated(&map, seed, radius, 64) {
                Ok(cert) => cert,
                Err(e) => {
                    rep.check("5", false, format!("{name}: seed {seed:.4}: {e}"));
                    continue;
                }
            };
            let out = iterate(&map, seed, &cfg);
            let inside = cert.contains(seed, out.point, 0.01);
            let dist = (out.point - seed).norm();
            rep.check(
                "5",
                cert.h0 < 0.5 && inside,
                format!(
                    "{name}: seed {seed:.4}: alpha {:.3e}, omega0 {:.3e}, h0 {:.3} (need < 0.5), rho {}, |limit - seed| {dist:.3e}",
                    cert.alpha,
                    cert.omega0,
                    cert.h0,
                    cert.rho.map_or("none".to_string(), |r| format!("{r:.3e}"))
                ),
            );
        }
    }
}

fn criterion_6(rep: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    // classical reduction, g ≡ 0 and h ≡ 0
    let p = vec![c(2.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
    let analytic = make_rational_pair(&RationalPair::polynomial(p.clone(), vec![])).unwrap();
    let anti = make_rational_pair(&RationalPair::polynomial(vec![], p)).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let f = z * z * z - 2.0 * z + 2.0;
        let df = 3.0 * z * z - 2.0;
        if df.norm() < 1e-3 {
            continue;
        }
        let classical = z - f / df;
        for map in [&analytic, &anti] {
            let d = (step_harmonic(map, z) - classical).norm() / classical.norm().max(1.0);
            worst = worst.max(d);
        }
    }
    rep.check(
        "6",
        worst <= 1e-12,
        format!("classical Newton reduction: max relative difference {worst:.2e} (limit 1e-12)"),
    );

    // step_linsys agreement away from the critical set
    let mpw = builtin("mpw", json!({}));
    let mut worst = 0.0f64;
    let mut count = 0;
    while count < 1000 {
        let z = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let (a, b) = (mpw.dh(z).norm_sqr(), mpw.dg(z).norm_sqr());
        if (a - b).abs() < 1e-6 * (a + b) {
            continue;
        }
        count += 1;
        let zh = step_harmonic(&mpw, z);
        let zl = step_linsys(&mpw, z).unwrap();
        worst = worst.max((zh - zl).norm() / zh.norm().max(1e-300));
    }
    rep.check(
        "6",
        worst <= 1e-10,
        format!("step_linsys vs step_harmonic: max relative difference {worst:.2e} (limit 1e-10)"),
    );

    // linear harmonic solver substitution
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let a = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let b = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let rhs = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let Ok(z) = solve_linear_harmonic(a, b, rhs) else {
            continue;
        };
        let back = a * z + (b * z).conj();
        worst = worst.max((back - rhs).norm() / ((a.norm() + b.norm()) * z.norm() + rhs.norm()));
    }
    rep.check(
        "6",
        worst <= 1e-14,
        format!(
            "linear harmonic solve: max relative substitution residual {worst:.2e} (limit 1e-14)"
        ),
    );

    // Laurent exactness on finite series
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let center = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let vals: Vec<Complex> = (0..11)
            .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let truth = Coefficients::from_slice(-5, &vals);
        let cfg = QuadratureConfig::new(center, rng.gen_range(0.8..1.25), -8, 8).with_nodes(64);
        let got = laurent_coefficients(|z| truth.eval(center, z), &cfg).unwrap();
        for k in -8..=8 {
            worst = worst.max((got.get_or_zero(k) - truth.get_or_zero(k)).norm());
        }
    }
    rep.check(
        "6",
        worst <= 1e-12,
        format!("Laurent exactness: max coefficient error {worst:.2e} (limit 1e-12)"),
    );

    // normal-form round trip for tan(z) − conj(z) at its singular zero
    let tan = builtin("tan_conj", json!({}));
    let nf = normal_form_of_map(
        &tan,
        c(0.0, 0.0),
        default_radius(&tan, c(0.0, 0.0)),
        DEFAULT_NODES,
        6,
    )
    .unwrap();
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 20 {
        let z = c(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
        if z.norm() >= 0.1 {
            continue;
        }
        n += 1;
        worst = worst.max((nf.eval_original(z) - tan.eval(z)).norm());
    }
    rep.check(
        "6",
        worst <= 1e-8,
        format!("normal-form round trip (tan_conj, K = 6): max error {worst:.2e} (limit 1e-8)"),
    );

    // rho asymptotics
    let mut worst_ratio = 0.0f64;
    for i in 0..200 {
        let alpha = 10f64.powf(-6.0 + 7.0 * (i as f64 / 199.0));
        for j in 1..=20 {
            let h0 = 0.1 * j as f64 / 20.0;
            let cert = KantorovichCertificate::from_constants(
                alpha,
                h0 / alpha,
                f64::INFINITY,
                BoundKind::Analytic,
            );
            let r = cert.rho.unwrap();
            worst_ratio = worst_ratio.max((r - alpha).abs() / (2.0 * alpha * cert.h0));
        }
    }
    rep.check(
        "6",
        worst_ratio <= 1.0,
        format!("rho asymptotics: max |rho - alpha|/(2 alpha h0) = {worst_ratio:.3} (limit 1)"),
    );

    // winding numbers of the five basic phase plots
    let window = Window::new(-1.0, 1.0, -1.0, 1.0);
    type Case = (&'static str, fn(Complex) -> Complex, i64);
    let fns: [Case; 5] = [
        ("z", |z| z, 1),
        ("conj(z)", |z| z.conj(), -1),
        ("z^2", |z| z * z, 2),
        ("1/z", |z| z.inv(), -1),
        ("1/conj(z)^3", |z| z.conj().powi(3).inv(), 3),
    ];
    let mut got = Vec::new();
    let mut ok = true;
    for (name, f, expect) in fns {
        let img = render_phase_fn(f, 201, 201, window, 0.0);
        let w = hue_winding(&img, 100, 100, 60.0, 1440);
        ok &= w == Some(expect);
        got.push(format!(
            "{name}: {}",
            w.map_or("?".into(), |w| w.to_string())
        ));
    }
    rep.check(
        "6",
        ok,
        format!(
            "phase-plot winding numbers {} (expected +1, -1, +2, -1, +3)",
            got.join(", ")
        ),
    );
}

fn criterion_7(rep: &mut Report) {
    // z + conj(z) + 2i z² + conj(i z²) has a singular zero at 0.
    let map = make_rational_pair(&RationalPair::polynomial(
        vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 2.0)],
        vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)],
    ))
    .unwrap();
    let nf = normal_form_of_map(&map, c(0.0, 0.0), 0.5, 64, 6).unwrap();
    let cfg = StoppingConfig::default();
    let grid = GridSpec::new(Window::new(-0.1, 0.1, -0.1, 0.1), 0.004);
    // Orbits approaching a singular zero stop ~√eps away from it, so limits
    // are merged on a physical scale.
    let dedup = 1e-4;
    let mut counts = Vec::new();
    for delta in [0.0, 0.003] {
        let perturbed = perturbed_map(&map, &nf, delta);
        let lab = search_basins(&perturbed, &grid, &cfg, dedup, DEFAULT_MATCH_TOL).unwrap();
        let mut seen = vec![0usize; lab.zeros.len()];
        for &l in &lab.labels {
            if l >= 0 {
                seen[l as usize] += 1;
            }
        }
        let near: usize = lab
            .zeros
            .iter()
            .zip(&seen)
            .filter(|(z, &n)| z.location.norm() < 0.1 && n > 0)
            .count();
        counts.push(near);
    }
    rep.check(
        "7",
        counts == [1, 2],
        format!("bifurcation sweep: zeros with basins near the origin {counts:?} for delta = [0, 0.003] (expected [1, 2])"),
    );

    let perturbed = perturbed_map(&map, &nf, 0.003);
    let seeds = singular_seeds(&nf, 0.003).unwrap();
    let outs: Vec<_> = seeds
        .iter()
        .map(|&s| iterate(&perturbed, s, &cfg))
        .collect();
    let ok = outs.len() == 2
        && outs.iter().all(|o| o.status.is_converged())
        && (outs[0].point - outs[1].point).norm() > 1e-3;
    rep.check(
        "7",
        ok,
        format!(
            "singular seeds {:.5} and {:.5} converge to {:.5} and {:.5}",
            seeds[0], seeds[1], outs[0].point, outs[1].point
        ),
    );
}

fn main() {
    let mut rep = Report {
        failures: 0,
        total: 0,
    };
    let start = Instant::now();
    criterion_1_and_2(&mut rep);
    criterion_3(&mut rep);
    criterion_4(&mut rep);
    criterion_5(&mut rep);
    criterion_6(&mut rep);
    criterion_7(&mut rep);
    println!(
        "acceptance: {} passed, {} failed ({:.1} s)",
        rep.total - rep.failures,
        rep.failures,
        start.elapsed().as_secs_f64()
    );
    if rep.failures > 0 {
        std::process::exit(1);
    }
}
