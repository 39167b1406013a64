//! Compact textual function specs: `family:key=value,key=value`, e.g.
//! `subcube:n=8,t=3`, `hex:n=2,bits=8`, `krawchouk:n=100,s=10`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::constructions;
use crate::error::{Error, Result};
use crate::function::BooleanFunction;
use crate::io::CubeFunction;
use crate::symmetric::NumericMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Subcube,
    Dictator,
    Parity,
    Ball,
    Majority,
    Tribes,
    Krawchouk,
    RandomBoolean,
    Hex,
    File,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Subcube => "subcube",
            Family::Dictator => "dictator",
            Family::Parity => "parity",
            Family::Ball => "ball",
            Family::Majority => "majority",
            Family::Tribes => "tribes",
            Family::Krawchouk => "krawchouk",
            Family::RandomBoolean => "random-boolean",
            Family::Hex => "hex",
            Family::File => "file",
        }
    }

    fn allowed_keys(self) -> &'static [&'static str] {
        match self {
            Family::Subcube => &["n", "t"],
            Family::Dictator | Family::Parity | Family::Majority => &["n"],
            Family::Ball => &["n", "r"],
            Family::Tribes => &["n", "b"],
            Family::Krawchouk => &["n", "s", "mode"],
            Family::RandomBoolean => &["n", "seed", "density"],
            Family::Hex => &["n", "bits"],
            Family::File => &["path"],
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "subcube" => Family::Subcube,
            "dictator" => Family::Dictator,
            "parity" => Family::Parity,
            "ball" => Family::Ball,
            "majority" => Family::Majority,
            "tribes" => Family::Tribes,
            "krawchouk" => Family::Krawchouk,
            "random-boolean" => Family::RandomBoolean,
            "hex" => Family::Hex,
            "file" => Family::File,
            other => return Err(Error::SpecParse(format!("unknown family {other:?}"))),
        })
    }
}

/// A parsed function spec. Parameters are stored key-sorted so that
/// `parse(render(spec)) == spec`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSpec {
    pub family: Family,
    pub params: BTreeMap<String, String>,
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FunctionSpec::parse(s)
    }
}

impl FunctionSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let (family_str, rest) = match text.split_once(':') {
            Some((f, r)) => (f, r),
            None => (text, ""),
        };
        let family: Family = family_str.parse()?;
        let mut params = BTreeMap::new();
        if !rest.is_empty() {
            for pair in rest.split(',') {
                let (key, value) = pair.split_once('=').ok_or_else(|| {
                    Error::SpecParse(format!("expected key=value, got {pair:?}"))
                })?;
                if !family.allowed_keys().contains(&key) {
                    return Err(Error::SpecParse(format!(
                        "unknown key {key:?} for family {} (allowed: {:?})",
                        family.name(),
                        family.allowed_keys()
                    )));
                }
                if params.insert(key.to_string(), value.to_string()).is_some() {
                    return Err(Error::SpecParse(format!("duplicate key {key:?}")));
                }
            }
        }
        Ok(Self { family, params })
    }

    pub fn render(&self) -> String {
        if self.params.is_empty() {
            return self.family.name().to_string();
        }
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!("{}:{}", self.family.name(), params.join(","))
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.params
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::SpecParse(format!("{} requires {key}", self.family.name())))
    }

    fn int(&self, key: &str) -> Result<usize> {
        self.required(key)?
            .parse()
            .map_err(|_| Error::SpecParse(format!("{key} must be a nonnegative integer")))
    }

    /// Builds the function this spec describes.
    pub fn build(&self) -> Result<CubeFunction> {
        Ok(match self.family {
            Family::Subcube => {
                CubeFunction::Boolean(constructions::subcube(self.int("n")?, self.int("t")?)?)
            }
            Family::Dictator => CubeFunction::Boolean(constructions::dictator(self.int("n")?)?),
            Family::Parity => CubeFunction::Boolean(constructions::parity(self.int("n")?)?),
            Family::Ball => {
                CubeFunction::Boolean(constructions::hamming_ball(self.int("n")?, self.int("r")?)?)
            }
            Family::Majority => CubeFunction::Boolean(constructions::majority(self.int("n")?)?),
            Family::Tribes => {
                CubeFunction::Boolean(constructions::tribes(self.int("n")?, self.int("b")?)?)
            }
            Family::Krawchouk => {
                let build = self.build_krawchouk()?;
                CubeFunction::Symmetric(build.profile)
            }
            Family::RandomBoolean => {
                let seed: u64 = self.required("seed")?.parse().map_err(|_| {
                    Error::SpecParse("seed must be an unsigned integer".into())
                })?;
                let density: f64 = match self.params.get("density") {
                    Some(d) => d
                        .parse()
                        .map_err(|_| Error::SpecParse("density must be a float".into()))?,
                    None => 0.5,
                };
                CubeFunction::Boolean(constructions::random_boolean(
                    self.int("n")?,
                    seed,
                    density,
                )?)
            }
            Family::Hex => CubeFunction::Boolean(BooleanFunction::decode_hex(
                self.int("n")?,
                self.required("bits")?,
            )?),
            Family::File => {
                crate::io::read_function(std::path::Path::new(self.required("path")?))?
            }
        })
    }

    /// Builds the full Krawchouk artifact (for specs of that family).
    pub fn build_krawchouk(&self) -> Result<constructions::KrawchoukBuild> {
        if self.family != Family::Krawchouk {
            return Err(Error::SpecParse("not a krawchouk spec".into()));
        }
        let n = self.int("n")?;
        let s = self.int("s")?;
        let mode = match self.params.get("mode").map(String::as_str) {
            None => {
                if n <= constructions::EXACT_CAP {
                    NumericMode::Exact
                } else {
                    NumericMode::LogFloat
                }
            }
            Some("exact") => NumericMode::Exact,
            Some("logfloat") => NumericMode::LogFloat,
            Some(other) => {
                return Err(Error::SpecParse(format!(
                    "mode must be exact or logfloat, got {other:?}"
                )))
            }
        };
        constructions::krawchouk_build(n, s, mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_render_round_trip() {
        for text in [
            "subcube:n=8,t=3",
            "parity:n=5",
            "tribes:b=2,n=6",
            "hex:bits=8,n=2",
            "random-boolean:n=8,seed=7",
            "krawchouk:n=100,s=10",
            "ball:n=3,r=1",
        ] {
            let spec = FunctionSpec::parse(text).unwrap();
            let rendered = spec.render();
            assert_eq!(FunctionSpec::parse(&rendered).unwrap(), spec);
        }
        // Render normalizes key order.
        assert_eq!(
            FunctionSpec::parse("subcube:t=3,n=8").unwrap().render(),
            "subcube:n=8,t=3"
        );
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(FunctionSpec::parse("subcube:n=8,q=3").is_err());
        assert!(FunctionSpec::parse("nosuch:n=8").is_err());
        assert!(FunctionSpec::parse("parity:n=5,n=6").is_err());
        assert!(FunctionSpec::parse("parity:n").is_err());
    }

    #[test]
    fn builds_expected_functions() {
        let and2 = FunctionSpec::parse("hex:n=2,bits=8").unwrap().build().unwrap();
        let f = and2.as_boolean().unwrap();
        assert!(f.value(3) && !f.value(0) && !f.value(1) && !f.value(2));

        let sub = FunctionSpec::parse("subcube:n=8,t=3").unwrap().build().unwrap();
        assert_eq!(sub.as_boolean().unwrap().mean_uniform(), 0.125);

        let kraw = FunctionSpec::parse("krawchouk:n=30,s=3").unwrap().build().unwrap();
        match kraw {
            CubeFunction::Symmetric(p) => assert_eq!(p.level(0), 1.0),
            _ => panic!("expected symmetric"),
        }
    }

    #[test]
    fn random_requires_seed() {
        assert!(FunctionSpec::parse("random-boolean:n=8").unwrap().build().is_err());
        let f = FunctionSpec::parse("random-boolean:n=8,seed=7")
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(f.n(), 8);
    }
}
