//! Built-in harmonic mappings.
//!
//! | id           | f(z)                                          | params (default)            |
//! |--------------|-----------------------------------------------|-----------------------------|
//! | `mpw`        | `z^(n−1)/(z^n − r^n) − conj(z)`               | `n` (3), `r` (0.6)          |
//! | `rhie`       | `(1−ε) z^(n−1)/(z^n − r^n) + ε/z − conj(z)`   | `n` (3), `r` (0.6), `eps` (0.004) |
//! | `wilmshurst` | `z^n + (z−1)^n + conj(i(z−1)^n − i z^n)`      | `n` (3)                     |
//! | `tan_conj`   | `tan(z) − conj(z)`                            |                             |
//! | `einstein`   | `1/z − conj(z)`                               |                             |
//! | `isothermal` | `z − arcsin(k / conj(z + w))`                 | `k` (1.92), `w` (−0.67i)    |
//! | `shifted`    | `base(z) + const`                             | `base` (function spec), `const` |

use std::f64::consts::{FRAC_PI_2, PI};

use serde_json::{Map, Value};

use super::{FunctionSpec, HarmonicMap, HarmonicParts, MapError, Pole};
use crate::Complex;

/// Principal arcsine with cuts `(−∞, −1] ∪ [1, ∞)`; points on a cut take the
/// limit from the upper half-plane.
pub fn asin_principal(z: Complex) -> Complex {
    if z.im == 0.0 && z.re.abs() > 1.0 {
        Complex::new(FRAC_PI_2.copysign(z.re), z.re.abs().acosh())
    } else {
        z.asin()
    }
}

/// Typed catalog entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    Mpw { n: u32, r: f64 },
    Rhie { n: u32, r: f64, eps: f64 },
    Wilmshurst { n: u32 },
    TanConj,
    Einstein,
    Isothermal { k: f64, w: Complex },
}

impl Builtin {
    pub fn build(&self) -> Result<HarmonicMap, MapError> {
        self.validate()?;
        Ok(match *self {
            Builtin::Mpw { n, r } => {
                HarmonicMap::new(format!("mpw(n={n}, r={r})"), Rhie::new(n, r, 0.0))
                    .with_poles(roots_of_unity_poles(n, r))
            }
            Builtin::Rhie { n, r, eps } => {
                let mut poles = roots_of_unity_poles(n, r);
                poles.push(Pole {
                    location: Complex::new(0.0, 0.0),
                    order: 1,
                });
                HarmonicMap::new(
                    format!("rhie(n={n}, r={r}, eps={eps})"),
                    Rhie::new(n, r, eps),
                )
                .with_poles(poles)
            }
            Builtin::Wilmshurst { n } => {
                HarmonicMap::new(format!("wilmshurst(n={n})"), Wilmshurst { n: n as i32 })
            }
            Builtin::TanConj => {
                let poles = (-10..10)
                    .map(|k| Pole {
                        location: Complex::new((2 * k + 1) as f64 * FRAC_PI_2, 0.0),
                        order: 1,
                    })
                    .collect();
                HarmonicMap::new("tan_conj", TanConj).with_poles(poles)
            }
            Builtin::Einstein => HarmonicMap::new("einstein", Einstein).with_poles(vec![Pole {
                location: Complex::new(0.0, 0.0),
                order: 1,
            }]),
            Builtin::Isothermal { k, w } => {
                HarmonicMap::new(format!("isothermal(k={k}, w={w})"), Isothermal { k, w })
                    .with_poles(vec![Pole {
                        location: -w,
                        order: 0,
                    }])
            }
        })
    }

    fn validate(&self) -> Result<(), MapError> {
        let bad = |name: &str, reason: &str| {
            Err(MapError::InvalidParameter {
                name: name.into(),
                reason: reason.into(),
            })
        };
        match *self {
            Builtin::Mpw { n, r } | Builtin::Rhie { n, r, .. } => {
                if n < 1 {
                    return bad("n", "must be at least 1");
                }
                if !(r > 0.0 && r.is_finite()) {
                    return bad("r", "must be positive and finite");
                }
                if let Builtin::Rhie { eps, .. } = *self {
                    if !(0.0..1.0).contains(&eps) {
                        return bad("eps", "must satisfy 0 <= eps < 1");
                    }
                }
            }
            Builtin::Wilmshurst { n } if n < 1 => return bad("n", "must be at least 1"),
            Builtin::Isothermal { k, w } => {
                if !k.is_finite() || k == 0.0 {
                    return bad("k", "must be finite and nonzero");
                }
                if !w.is_finite() {
                    return bad("w", "must be finite");
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Build a catalog entry from its id and a JSON parameter object.
pub fn make_builtin(name: &str, params: &Map<String, Value>) -> Result<HarmonicMap, MapError> {
    let allowed: &[&str] = match name {
        "mpw" => &["n", "r"],
        "rhie" => &["n", "r", "eps"],
        "wilmshurst" => &["n"],
        "tan_conj" | "einstein" => &[],
        "isothermal" => &["k", "w"],
        "shifted" => &["base", "const"],
        other => return Err(MapError::UnknownBuiltin(other.to_string())),
    };
    if let Some(key) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(MapError::InvalidParameter {
            name: key.clone(),
            reason: format!("not a parameter of `{name}`"),
        });
    }
    let builtin = match name {
        "mpw" => Builtin::Mpw {
            n: param_u32(params, "n", 3)?,
            r: param_f64(params, "r", 0.6)?,
        },
        "rhie" => Builtin::Rhie {
            n: param_u32(params, "n", 3)?,
            r: param_f64(params, "r", 0.6)?,
            eps: param_f64(params, "eps", 0.004)?,
        },
        "wilmshurst" => Builtin::Wilmshurst {
            n: param_u32(params, "n", 3)?,
        },
        "tan_conj" => Builtin::TanConj,
        "einstein" => Builtin::Einstein,
        "isothermal" => Builtin::Isothermal {
            k: param_f64(params, "k", 1.92)?,
            w: param_complex(params, "w", Complex::new(0.0, -0.67))?,
        },
        _ => {
            let base = params
                .get("base")
                .ok_or_else(|| MapError::InvalidParameter {
                    name: "base".into(),
                    reason: "required".into(),
                })?;
            let base: FunctionSpec =
                serde_json::from_value(base.clone()).map_err(|e| MapError::InvalidParameter {
                    name: "base".into(),
                    reason: e.to_string(),
                })?;
            let constant = param_complex(params, "const", Complex::new(0.0, 0.0))?;
            return Ok(base.build()?.shifted(constant));
        }
    };
    builtin.build()
}

fn param_f64(params: &Map<String, Value>, name: &str, default: f64) -> Result<f64, MapError> {
    match params.get(name) {
        None => Ok(default),
        Some(v) => v.as_f64().ok_or_else(|| MapError::InvalidParameter {
            name: name.into(),
            reason: format!("expected a number, got {v}"),
        }),
    }
}

fn param_u32(params: &Map<String, Value>, name: &str, default: u32) -> Result<u32, MapError> {
    match params.get(name) {
        None => Ok(default),
        Some(v) => v
            .as_u64()
            .and_then(|n| u32::try_from(n).ok())
            .ok_or_else(|| MapError::InvalidParameter {
                name: name.into(),
                reason: format!("expected a non-negative integer, got {v}"),
            }),
    }
}

fn param_complex(
    params: &Map<String, Value>,
    name: &str,
    default: Complex,
) -> Result<Complex, MapError> {
    let Some(v) = params.get(name) else {
        return Ok(default);
    };
    if let Some(re) = v.as_f64() {
        return Ok(Complex::new(re, 0.0));
    }
    serde_json::from_value::<[f64; 2]>(v.clone())
        .map(|[re, im]| Complex::new(re, im))
        .map_err(|_| MapError::InvalidParameter {
            name: name.into(),
            reason: format!("expected [re, im], got {v}"),
        })
}

fn roots_of_unity_poles(n: u32, r: f64) -> Vec<Pole> {
    (0..n)
        .map(|k| Pole {
            location: Complex::from_polar(r, 2.0 * PI * k as f64 / n as f64),
            order: 1,
        })
        .collect()
}

#[inline]
fn ipow(z: Complex, k: i32) -> Complex {
    if k == 0 {
        Complex::new(1.0, 0.0)
    } else {
        z.powi(k)
    }
}

/// `(1−ε) z^(n−1)/(z^n − r^n) + ε/z − conj(z)`; `ε = 0` is the mpw family.
struct Rhie {
    n: i32,
    rn: f64,
    eps: f64,
}

impl Rhie {
    fn new(n: u32, r: f64, eps: f64) -> Self {
        Rhie {
            n: n as i32,
            rn: r.powi(n as i32),
            eps,
        }
    }

    /// `q = z^(n−1)/(z^n − r^n)` and its first two derivatives.
    ///
    /// `q' = −z^(n−2) (z^n + (n−1) r^n) / D²` and
    /// `q'' = −(N' D − 2 N D') / D³` with `N = z^(2n−2) + (n−1) r^n z^(n−2)`.
    fn mass_term(&self, z: Complex) -> [Complex; 3] {
        let n = self.n;
        let nf = n as f64;
        let zn = ipow(z, n);
        let den = zn - self.rn;
        let q = ipow(z, n - 1) / den;
        let mut num = ipow(z, 2 * n - 2);
        let mut dnum = (2.0 * nf - 2.0)
            * if n >= 2 {
                ipow(z, 2 * n - 3)
            } else {
                Complex::new(0.0, 0.0)
            };
        if n >= 2 {
            num += (nf - 1.0) * self.rn * ipow(z, n - 2);
        }
        if n >= 3 {
            dnum += (nf - 1.0) * (nf - 2.0) * self.rn * ipow(z, n - 3);
        }
        let dden = nf * ipow(z, n - 1);
        let dq = -num / (den * den);
        let ddq = -(dnum * den - 2.0 * num * dden) / (den * den * den);
        [q, dq, ddq]
    }
}

impl HarmonicParts for Rhie {
    fn value(&self, z: Complex) -> Complex {
        self.h(z).unwrap() - z.conj()
    }
    fn dh(&self, z: Complex) -> Complex {
        let [_, dq, _] = self.mass_term(z);
        if self.eps == 0.0 {
            dq
        } else {
            (1.0 - self.eps) * dq - self.eps / (z * z)
        }
    }
    fn dg(&self, _z: Complex) -> Complex {
        Complex::new(-1.0, 0.0)
    }
    fn h(&self, z: Complex) -> Option<Complex> {
        let q = ipow(z, self.n - 1) / (ipow(z, self.n) - self.rn);
        Some(if self.eps == 0.0 {
            q
        } else {
            (1.0 - self.eps) * q + self.eps / z
        })
    }
    fn g(&self, z: Complex) -> Option<Complex> {
        Some(-z)
    }
    fn ddh(&self, z: Complex) -> Option<Complex> {
        let [_, _, ddq] = self.mass_term(z);
        Some(if self.eps == 0.0 {
            ddq
        } else {
            (1.0 - self.eps) * ddq + 2.0 * self.eps / (z * z * z)
        })
    }
    fn ddg(&self, _z: Complex) -> Option<Complex> {
        Some(Complex::new(0.0, 0.0))
    }
}

/// `p = z^n + (z−1)^n`, `q = i (z−1)^n − i z^n`.
struct Wilmshurst {
    n: i32,
}

impl Wilmshurst {
    /// `(z^k, (z−1)^k)` scaled by the falling factorial `n (n−1) … (n−d+1)`
    /// for the `d`-th derivative.
    fn powers(&self, z: Complex, d: i32) -> (Complex, Complex) {
        let k = self.n - d;
        if k < 0 {
            return (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
        }
        let scale: f64 = (0..d).map(|j| (self.n - j) as f64).product();
        (scale * ipow(z, k), scale * ipow(z - 1.0, k))
    }

    fn p_q(&self, z: Complex, d: i32) -> (Complex, Complex) {
        let (a, b) = self.powers(z, d);
        (a + b, Complex::i() * (b - a))
    }
}

impl HarmonicParts for Wilmshurst {
    fn value(&self, z: Complex) -> Complex {
        let (p, q) = self.p_q(z, 0);
        p + q.conj()
    }
    fn dh(&self, z: Complex) -> Complex {
        self.p_q(z, 1).0
    }
    fn dg(&self, z: Complex) -> Complex {
        self.p_q(z, 1).1
    }
    fn h(&self, z: Complex) -> Option<Complex> {
        Some(self.p_q(z, 0).0)
    }
    fn g(&self, z: Complex) -> Option<Complex> {
        Some(self.p_q(z, 0).1)
    }
    fn ddh(&self, z: Complex) -> Option<Complex> {
        Some(self.p_q(z, 2).0)
    }
    fn ddg(&self, z: Complex) -> Option<Complex> {
        Some(self.p_q(z, 2).1)
    }
}

struct TanConj;

impl HarmonicParts for TanConj {
    fn value(&self, z: Complex) -> Complex {
        z.tan() - z.conj()
    }
    fn dh(&self, z: Complex) -> Complex {
        let t = z.tan();
        1.0 + t * t
    }
    fn dg(&self, _z: Complex) -> Complex {
        Complex::new(-1.0, 0.0)
    }
    fn h(&self, z: Complex) -> Option<Complex> {
        Some(z.tan())
    }
    fn g(&self, z: Complex) -> Option<Complex> {
        Some(-z)
    }
    fn ddh(&self, z: Complex) -> Option<Complex> {
        let t = z.tan();
        Some(2.0 * t * (1.0 + t * t))
    }
    fn ddg(&self, _z: Complex) -> Option<Complex> {
        Some(Complex::new(0.0, 0.0))
    }
}

struct Einstein;

impl HarmonicParts for Einstein {
    fn value(&self, z: Complex) -> Complex {
        // conj(z)·(1 − |z|²)/|z|² keeps the phase of conj(z) exactly; the
        // naive 1/z − conj(z) picks up tangential rounding near the circle.
        let r2 = z.norm_sqr();
        z.conj() * ((1.0 - r2) / r2)
    }
    fn dh(&self, z: Complex) -> Complex {
        -(z * z).inv()
    }
    fn dg(&self, _z: Complex) -> Complex {
        Complex::new(-1.0, 0.0)
    }
    fn h(&self, z: Complex) -> Option<Complex> {
        Some(z.inv())
    }
    fn g(&self, z: Complex) -> Option<Complex> {
        Some(-z)
    }
    fn ddh(&self, z: Complex) -> Option<Complex> {
        Some(2.0 / (z * z * z))
    }
    fn ddg(&self, _z: Complex) -> Option<Complex> {
        Some(Complex::new(0.0, 0.0))
    }
}

/// `z − arcsin(k / conj(z + w))`, so `h = z` and `g = −arcsin(k/(z + w))`
/// away from the cut.
struct Isothermal {
    k: f64,
    w: Complex,
}

impl Isothermal {
    fn zeta(&self, z: Complex) -> Complex {
        self.k / (z + self.w).conj()
    }
}

impl HarmonicParts for Isothermal {
    fn value(&self, z: Complex) -> Complex {
        z - asin_principal(self.zeta(z))
    }
    fn dh(&self, _z: Complex) -> Complex {
        Complex::new(1.0, 0.0)
    }
    fn dg(&self, z: Complex) -> Complex {
        let s = z + self.w;
        let u = self.k / s;
        self.k / (s * s * (1.0 - u * u).sqrt())
    }
    fn h(&self, z: Complex) -> Option<Complex> {
        Some(z)
    }
    fn g(&self, z: Complex) -> Option<Complex> {
        Some(-asin_principal(self.zeta(z)).conj())
    }
    fn ddh(&self, _z: Complex) -> Option<Complex> {
        Some(Complex::new(0.0, 0.0))
    }
    fn ddg(&self, z: Complex) -> Option<Complex> {
        // g = −asin(u), u = k/s: g'' = −u''/σ − u u'²/σ³ with σ = sqrt(1 − u²)
        let s = z + self.w;
        let u = self.k / s;
        let du = -u / s;
        let ddu = 2.0 * u / (s * s);
        let sigma = (1.0 - u * u).sqrt();
        Some(-ddu / sigma - u * du * du / (sigma * sigma * sigma))
    }
}
