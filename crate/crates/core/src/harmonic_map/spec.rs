//! JSON function specifications.
//!
//! ```json
//! { "builtin": "rhie", "params": { "n": 3, "r": 0.6, "eps": 0.004 } }
//! { "h": { "num": [[0,0],[0,0],[1,0]], "den": [[-0.216,0],[0,0],[0,0],[1,0]] },
//!   "g": { "num": [[0,0],[-1,0]] } }
//! ```
//!
//! Complex numbers are always `[re, im]` pairs; coefficient lists are in
//! ascending degree and a missing `den` means `[[1, 0]]`.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::rational::make_named_rational_pair;
use super::{make_builtin, HarmonicMap, MapError, RationalPair};
use crate::Complex;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Builtin {
        builtin: String,
        #[serde(default)]
        params: Map<String, Value>,
    },
    Rational {
        h: RationalPart,
        g: RationalPart,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalPart {
    #[serde(default)]
    pub num: Vec<[f64; 2]>,
    #[serde(default = "unit_den")]
    pub den: Vec<[f64; 2]>,
}

fn unit_den() -> Vec<[f64; 2]> {
    vec![[1.0, 0.0]]
}

fn to_complex(coeffs: &[[f64; 2]]) -> Vec<Complex> {
    coeffs
        .iter()
        .map(|&[re, im]| Complex::new(re, im))
        .collect()
}

impl FunctionSpec {
    pub fn builtin(name: &str, params: Value) -> Self {
        FunctionSpec::Builtin {
            builtin: name.to_string(),
            params: match params {
                Value::Object(map) => map,
                _ => Map::new(),
            },
        }
    }

    pub fn build(&self) -> Result<HarmonicMap, MapError> {
        match self {
            FunctionSpec::Builtin { builtin, params } => make_builtin(builtin, params),
            FunctionSpec::Rational { h, g, name } => {
                let pair = RationalPair {
                    h_num: to_complex(&h.num),
                    h_den: to_complex(&h.den),
                    g_num: to_complex(&g.num),
                    g_den: to_complex(&g.den),
                };
                make_named_rational_pair(name.as_deref().unwrap_or("rational"), &pair)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_builtin_and_rational_forms() {
        let b: FunctionSpec =
            serde_json::from_str(r#"{"builtin": "mpw", "params": {"n": 3, "r": 0.6}}"#).unwrap();
        let r: FunctionSpec = serde_json::from_str(
            r#"{"h": {"num": [[0,0],[0,0],[1,0]], "den": [[-0.216,0],[0,0],[0,0],[1,0]]},
                "g": {"num": [[0,0],[-1,0]]}}"#,
        )
        .unwrap();
        let (mb, mr) = (b.build().unwrap(), r.build().unwrap());
        let z = Complex::new(0.3, -0.8);
        assert!((mb.eval(z) - mr.eval(z)).norm() < 1e-15);
    }

    #[test]
    fn builtin_without_params_uses_defaults() {
        let spec: FunctionSpec = serde_json::from_str(r#"{"builtin": "einstein"}"#).unwrap();
        assert_eq!(spec.build().unwrap().name(), "einstein");
    }

    #[test]
    fn round_trips_through_json() {
        let spec = FunctionSpec::builtin(
            "shifted",
            serde_json::json!({"base": {"builtin": "mpw"}, "const": [-0.7, 0.0]}),
        );
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<FunctionSpec>(&text).unwrap(), spec);
    }

    #[test]
    fn unknown_builtin_is_an_error() {
        let spec = FunctionSpec::builtin("bogus", Value::Null);
        assert!(matches!(spec.build(), Err(MapError::UnknownBuiltin(_))));
    }
}
