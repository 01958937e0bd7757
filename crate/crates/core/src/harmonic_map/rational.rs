use serde::{Deserialize, Serialize};

use super::{HarmonicMap, HarmonicParts, MapError};
use crate::Complex;

/// Complex polynomial with coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial(Vec<Complex>);

impl Polynomial {
    /// Trailing zero coefficients are dropped, so the stored leading
    /// coefficient is nonzero (the zero polynomial has no coefficients).
    pub fn new(mut coeffs: Vec<Complex>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Polynomial(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex) -> Complex {
        self.0
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }
}

/// A quotient `num/den` with its first two derivatives precomputed
/// symbolically.
#[derive(Debug, Clone)]
pub struct RationalFn {
    num: [Polynomial; 3],
    den: [Polynomial; 3],
}

impl RationalFn {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, MapError> {
        if den.is_zero() {
            return Err(MapError::ZeroDenominator("rational function"));
        }
        let (n1, d1) = (num.derivative(), den.derivative());
        let (n2, d2) = (n1.derivative(), d1.derivative());
        Ok(RationalFn {
            num: [num, n1, n2],
            den: [den, d1, d2],
        })
    }

    /// `(r, r', r'')` at `z` via the quotient rule:
    /// `r' = (N' − r D')/D`, `r'' = (N'' − 2 r' D' − r D'')/D`.
    pub fn eval_with_derivatives(&self, z: Complex) -> [Complex; 3] {
        let [n0, n1, n2] = self.num.each_ref().map(|p| p.eval(z));
        let [d0, d1, d2] = self.den.each_ref().map(|p| p.eval(z));
        let r = n0 / d0;
        let r1 = (n1 - r * d1) / d0;
        let r2 = (n2 - 2.0 * r1 * d1 - r * d2) / d0;
        [r, r1, r2]
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.num[0].eval(z) / self.den[0].eval(z)
    }

    pub fn derivative_at(&self, z: Complex) -> Complex {
        let n0 = self.num[0].eval(z);
        let d0 = self.den[0].eval(z);
        (self.num[1].eval(z) - n0 / d0 * self.den[1].eval(z)) / d0
    }
}

/// Coefficient lists (ascending degree) of `h = h_num/h_den` and
/// `g = g_num/g_den`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalPair {
    pub h_num: Vec<Complex>,
    pub h_den: Vec<Complex>,
    pub g_num: Vec<Complex>,
    pub g_den: Vec<Complex>,
}

impl RationalPair {
    /// Harmonic polynomial `p + conj(q)`.
    pub fn polynomial(p: Vec<Complex>, q: Vec<Complex>) -> Self {
        let one = vec![Complex::new(1.0, 0.0)];
        RationalPair {
            h_num: p,
            h_den: one.clone(),
            g_num: q,
            g_den: one,
        }
    }
}

struct RationalParts {
    h: RationalFn,
    g: RationalFn,
}

impl HarmonicParts for RationalParts {
    fn value(&self, z: Complex) -> Complex {
        self.h.eval(z) + self.g.eval(z).conj()
    }
    fn dh(&self, z: Complex) -> Complex {
        self.h.derivative_at(z)
    }
    fn dg(&self, z: Complex) -> Complex {
        self.g.derivative_at(z)
    }
    fn h(&self, z: Complex) -> Option<Complex> {
        Some(self.h.eval(z))
    }
    fn g(&self, z: Complex) -> Option<Complex> {
        Some(self.g.eval(z))
    }
    fn ddh(&self, z: Complex) -> Option<Complex> {
        Some(self.h.eval_with_derivatives(z)[2])
    }
    fn ddg(&self, z: Complex) -> Option<Complex> {
        Some(self.g.eval_with_derivatives(z)[2])
    }
}

pub fn make_rational_pair(spec: &RationalPair) -> Result<HarmonicMap, MapError> {
    make_named_rational_pair("rational", spec)
}

pub(crate) fn make_named_rational_pair(
    name: &str,
    spec: &RationalPair,
) -> Result<HarmonicMap, MapError> {
    let h_den = Polynomial::new(spec.h_den.clone());
    let g_den = Polynomial::new(spec.g_den.clone());
    if h_den.is_zero() {
        return Err(MapError::ZeroDenominator("h"));
    }
    if g_den.is_zero() {
        return Err(MapError::ZeroDenominator("g"));
    }
    let parts = RationalParts {
        h: RationalFn::new(Polynomial::new(spec.h_num.clone()), h_den)?,
        g: RationalFn::new(Polynomial::new(spec.g_num.clone()), g_den)?,
    };
    Ok(HarmonicMap::new(name, parts))
}
