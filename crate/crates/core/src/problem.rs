//! The JSON problem format: a fan, a polarization, named divisors, an
//! optional tower of star subdivisions and default command parameters.
//!
//! ```json
//! {"fan": {"rays": [[1,0],[0,1],[-1,-1]], "cones": [[0,1],[1,2],[2,0]]},
//!  "polarization": "anticanonical",
//!  "divisors": {"H": {"coeffs": ["0", "0", "1"]}},
//!  "refinements": [[1,1]]}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LatticeVector;
use crate::rational::{serde_q, Rational};
use crate::toric::{validate_fan, Fan, FanData, FanDiagnostics, Model, ToricDivisor};
use crate::volume_fn::require_nef_and_big;

/// Upper limits that keep a single problem at desk scale.
pub const MAX_DIM: usize = 4;
pub const MAX_RAYS: usize = 64;
pub const MAX_REFINEMENTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorSpec {
    #[serde(with = "serde_q::vec")]
    pub coeffs: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolarizationSpec {
    Named(String),
    Coeffs(DivisorSpec),
}

/// Defaults for command flags; flags given on the command line win.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functionals: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<LatticeVector>,
}

/// Problem file as written on disk, before validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub fan: FanData,
    pub polarization: PolarizationSpec,
    #[serde(default)]
    pub divisors: BTreeMap<String, DivisorSpec>,
    #[serde(default)]
    pub refinements: Vec<LatticeVector>,
    #[serde(default)]
    pub params: Params,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn fan_diagnostics(&self) -> FanDiagnostics {
        validate_fan(&self.fan.rays, &self.fan.cones)
    }
}

/// A validated problem. Divisors live on the model's rays.
#[derive(Debug, Clone)]
pub struct Problem {
    pub file: ProblemFile,
    pub model: Model,
    /// Polarization on the base fan.
    pub l_base: ToricDivisor,
    /// Polarization pulled back to the model.
    pub l: ToricDivisor,
    divisors: BTreeMap<String, ToricDivisor>,
}

/// Built-in divisor names.
pub const BUILTIN_NAMES: [&str; 2] = ["L", "-K"];

impl Problem {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_file(ProblemFile::parse(text)?)
    }

    pub fn from_file(file: ProblemFile) -> Result<Self> {
        if let Some(r) = file.fan.rays.first() {
            if r.dim() > MAX_DIM {
                return Err(Error::InvalidInput(format!(
                    "dimension {} exceeds {MAX_DIM}",
                    r.dim()
                )));
            }
        }
        if file.fan.rays.len() > MAX_RAYS {
            return Err(Error::InvalidInput(format!("more than {MAX_RAYS} rays")));
        }
        if file.refinements.len() > MAX_REFINEMENTS {
            return Err(Error::InvalidInput(format!(
                "more than {MAX_REFINEMENTS} refinements"
            )));
        }
        let diag = file.fan_diagnostics();
        if !diag.is_valid() {
            return Err(Error::InvalidFan(describe(&diag)));
        }
        let base = Fan::new(file.fan.rays.clone(), file.fan.cones.clone())?;
        let model = Model::new(base.clone(), &file.refinements)?;
        let l_base = match &file.polarization {
            PolarizationSpec::Named(n) if n == "anticanonical" => {
                ToricDivisor::anticanonical(base.ray_count())
            }
            PolarizationSpec::Named(n) => {
                return Err(Error::InvalidInput(format!("unknown polarization {n:?}")));
            }
            PolarizationSpec::Coeffs(d) => {
                if d.coeffs.len() != base.ray_count() {
                    return Err(Error::DimensionMismatch {
                        expected: base.ray_count(),
                        got: d.coeffs.len(),
                    });
                }
                ToricDivisor::new(d.coeffs.clone())
            }
        };
        require_nef_and_big(&base, &l_base)
            .map_err(|_| Error::InvalidInput("polarization is not nef and big".into()))?;
        let l = model.pullback_from_base(&l_base)?;
        let mut divisors = BTreeMap::new();
        for (name, entry) in &file.divisors {
            if BUILTIN_NAMES.contains(&name.as_str()) {
                return Err(Error::InvalidInput(format!(
                    "divisor name {name:?} is reserved"
                )));
            }
            let d = ToricDivisor::new(entry.coeffs.clone());
            let on_model = if d.len() == model.fan().ray_count() {
                d
            } else if d.len() == base.ray_count() {
                model.pullback_from_base(&d)?
            } else {
                return Err(Error::InvalidInput(format!(
                    "divisor {name:?} has {} coefficients; expected {} (base) or {} (model)",
                    d.len(),
                    base.ray_count(),
                    model.fan().ray_count()
                )));
            };
            divisors.insert(name.clone(), on_model);
        }
        Ok(Self {
            file,
            model,
            l_base,
            l,
            divisors,
        })
    }

    pub fn fan(&self) -> &Fan {
        self.model.fan()
    }

    /// Named divisor on the model; `L` is the polarization and `-K` the
    /// anticanonical divisor of the model.
    pub fn divisor(&self, name: &str) -> Result<ToricDivisor> {
        match name {
            "L" => Ok(self.l.clone()),
            "-K" => Ok(ToricDivisor::anticanonical(self.fan().ray_count())),
            _ => self
                .divisors
                .get(name)
                .cloned()
                .ok_or_else(|| Error::InvalidInput(format!("unknown divisor {name:?}"))),
        }
    }

    pub fn divisor_names(&self) -> impl Iterator<Item = &String> {
        self.divisors.keys()
    }
}

/// One-line summary of fan problems, e.g. `fan not complete`.
pub fn describe(diag: &FanDiagnostics) -> String {
    let mut parts = Vec::new();
    if !diag.complete {
        parts.push("fan not complete".to_string());
    }
    if !diag.smooth {
        parts.push("fan not smooth".to_string());
    }
    if !diag.primitive {
        parts.push("fan has non-primitive rays".to_string());
    }
    parts.extend(diag.issues.iter().cloned());
    parts.join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    const P2: &str = r#"{"fan": {"rays": [[1,0],[0,1],[-1,-1]], "cones": [[0,1],[1,2],[2,0]]},
        "polarization": "anticanonical",
        "divisors": {"H": {"coeffs": ["0", "0", 1]}, "E": {"coeffs": [0, 0, 0, 1]}},
        "refinements": [[1,1]]}"#;

    #[test]
    fn parses_and_pulls_back() {
        let p = Problem::parse(P2).unwrap();
        assert_eq!(p.fan().ray_count(), 4);
        assert_eq!(p.l, ToricDivisor::from_ints(&[1, 1, 1, 2]));
        assert_eq!(
            p.divisor("H").unwrap(),
            ToricDivisor::from_ints(&[0, 0, 1, 0])
        );
        assert_eq!(
            p.divisor("E").unwrap(),
            ToricDivisor::from_ints(&[0, 0, 0, 1])
        );
        assert_eq!(p.divisor("-K").unwrap().coeffs, vec![int(1); 4]);
        assert!(p.divisor("nope").is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Problem::parse("{"), Err(Error::Parse(_))));
        assert!(matches!(
            Problem::parse(
                r#"{"fan": {"rays": [], "cones": []}, "polarization": "anticanonical", "extra": 1}"#
            ),
            Err(Error::Parse(_))
        ));
        let incomplete = r#"{"fan": {"rays": [[1,0],[0,1],[-1,-1]], "cones": [[0,1],[1,2]]}, "polarization": "anticanonical"}"#;
        match Problem::parse(incomplete) {
            Err(Error::InvalidFan(m)) => assert!(m.contains("fan not complete")),
            other => panic!("{other:?}"),
        }
        let not_nef = r#"{"fan": {"rays": [[1,0],[0,1],[-1,-1]], "cones": [[0,1],[1,2],[2,0]]}, "polarization": {"coeffs": ["-1", 0, 0]}}"#;
        assert!(matches!(
            Problem::parse(not_nef),
            Err(Error::InvalidInput(_))
        ));
        let bad_q = r#"{"fan": {"rays": [[1,0],[0,1],[-1,-1]], "cones": [[0,1],[1,2],[2,0]]}, "polarization": {"coeffs": ["1/0", 0, 0]}}"#;
        assert!(matches!(Problem::parse(bad_q), Err(Error::Parse(_))));
        let reserved = r#"{"fan": {"rays": [[1,0],[0,1],[-1,-1]], "cones": [[0,1],[1,2],[2,0]]}, "polarization": "anticanonical", "divisors": {"L": {"coeffs": [1,1,1]}}}"#;
        assert!(matches!(
            Problem::parse(reserved),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn params_round_trip() {
        let text = r#"{"fan": {"rays": [[1],[-1]], "cones": [[0],[1]]}, "polarization": {"coeffs": ["1/2", "1/2"]},
            "params": {"radius": 3, "u": [1]}}"#;
        let f = ProblemFile::parse(text).unwrap();
        assert_eq!(f.params.radius, Some(3));
        let again = ProblemFile::parse(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(f, again);
        assert!(Problem::from_file(f).is_ok());
    }
}
