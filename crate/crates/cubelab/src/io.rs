//! JSON function-file format shared by the CLI, examples, and tests.
//!
//! ```json
//! {"n": 3, "kind": "boolean", "bits_hex": "E8"}
//! {"n": 2, "kind": "real", "values": [0.0, 1.0, 0.5, 2.0]}
//! {"n": 4, "kind": "symmetric", "levels": [1.0, 0.5, 0.0, 0.0, 0.0]}
//! ```
//!
//! Unknown keys are ignored on read, so files carrying extra diagnostics
//! blocks still load as functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{BooleanFunction, RealFunction};
use crate::symmetric::{NumericMode, SymmetricProfile};

/// Any of the three function representations.
#[derive(Debug, Clone)]
pub enum CubeFunction {
    Boolean(BooleanFunction),
    Real(RealFunction),
    Symmetric(SymmetricProfile),
}

impl CubeFunction {
    pub fn n(&self) -> usize {
        match self {
            CubeFunction::Boolean(f) => f.n(),
            CubeFunction::Real(f) => f.n(),
            CubeFunction::Symmetric(p) => p.n(),
        }
    }

    /// Dense real view (dense caps permitting).
    pub fn to_real(&self) -> Result<RealFunction> {
        match self {
            CubeFunction::Boolean(f) => f.to_real(),
            CubeFunction::Real(f) => Ok(f.clone()),
            CubeFunction::Symmetric(p) => p.to_dense(),
        }
    }

    /// The packed boolean view, if this is a boolean function.
    pub fn as_boolean(&self) -> Option<&BooleanFunction> {
        match self {
            CubeFunction::Boolean(f) => Some(f),
            _ => None,
        }
    }
}

/// Serialized form of a function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionFile {
    pub n: usize,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bits_hex: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
}

impl FunctionFile {
    pub fn from_function(f: &CubeFunction) -> Self {
        match f {
            CubeFunction::Boolean(f) => Self {
                n: f.n(),
                kind: "boolean".into(),
                bits_hex: Some(f.encode_hex()),
                values: None,
                levels: None,
            },
            CubeFunction::Real(f) => Self {
                n: f.n(),
                kind: "real".into(),
                bits_hex: None,
                values: Some(f.values().to_vec()),
                levels: None,
            },
            CubeFunction::Symmetric(p) => Self {
                n: p.n(),
                kind: "symmetric".into(),
                bits_hex: None,
                values: None,
                levels: Some(p.levels().to_vec()),
            },
        }
    }

    pub fn into_function(self) -> Result<CubeFunction> {
        match self.kind.as_str() {
            "boolean" => {
                let hex = self
                    .bits_hex
                    .ok_or_else(|| Error::parameter("boolean function file missing bits_hex"))?;
                Ok(CubeFunction::Boolean(BooleanFunction::decode_hex(self.n, &hex)?))
            }
            "real" => {
                let values = self
                    .values
                    .ok_or_else(|| Error::parameter("real function file missing values"))?;
                Ok(CubeFunction::Real(RealFunction::from_values(self.n, values)?))
            }
            "symmetric" => {
                let levels = self
                    .levels
                    .ok_or_else(|| Error::parameter("symmetric function file missing levels"))?;
                Ok(CubeFunction::Symmetric(SymmetricProfile::new(
                    self.n,
                    levels,
                    NumericMode::LogFloat,
                )?))
            }
            other => Err(Error::parameter(format!("unknown function kind {other:?}"))),
        }
    }
}

/// Reads a function from a JSON file.
pub fn read_function(path: &std::path::Path) -> Result<CubeFunction> {
    let text = std::fs::read_to_string(path)?;
    let file: FunctionFile = serde_json::from_str(&text)?;
    file.into_function()
}

/// Writes a function as JSON.
pub fn write_function(path: &std::path::Path, f: &CubeFunction) -> Result<()> {
    let file = FunctionFile::from_function(f);
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_round_trip() {
        let f = BooleanFunction::from_fn(3, |x| x.count_ones() % 2 == 1).unwrap();
        let json = serde_json::to_string(&FunctionFile::from_function(&CubeFunction::Boolean(
            f.clone(),
        )))
        .unwrap();
        let back = serde_json::from_str::<FunctionFile>(&json)
            .unwrap()
            .into_function()
            .unwrap();
        assert_eq!(back.as_boolean().unwrap(), &f);
        assert!(json.contains("\"kind\":\"boolean\""));
    }

    #[test]
    fn extra_keys_are_ignored() {
        let json = r#"{"n": 2, "kind": "real", "values": [0.0, 1.0, 2.0, 3.0], "diagnostics": {"anything": true}}"#;
        let f = serde_json::from_str::<FunctionFile>(json)
            .unwrap()
            .into_function()
            .unwrap();
        assert_eq!(f.to_real().unwrap().value(3), 3.0);
    }

    #[test]
    fn missing_payload_rejected() {
        let json = r#"{"n": 2, "kind": "boolean"}"#;
        let err = serde_json::from_str::<FunctionFile>(json)
            .unwrap()
            .into_function();
        assert!(err.is_err());
    }
}
