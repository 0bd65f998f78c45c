use std::fmt;
use std::path::Path;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::discretize::TruncBc;
use crate::eigensolve::SolverOptions;
use crate::error::{Error, Result};
use crate::geometry::{CurvatureProfile, ProfileSpec, StripGeometry};
use crate::variational::TrialKind;

pub const SCHEMA_VERSION: u32 = 1;

/// Truncation half-length: a fixed value or `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Length {
    Auto,
    Fixed(f64),
}

impl Serialize for Length {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Length::Auto => s.serialize_str("auto"),
            Length::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Length {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Length;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a positive number or \"auto\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Length, E> {
                Ok(Length::Fixed(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Length, E> {
                Ok(Length::Fixed(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Length, E> {
                Ok(Length::Fixed(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Length, E> {
                match v {
                    "auto" => Ok(Length::Auto),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcChoice {
    Dirichlet,
    Neumann,
    Both,
}

impl BcChoice {
    pub fn variants(self) -> Vec<TruncBc> {
        match self {
            BcChoice::Dirichlet => vec![TruncBc::Dirichlet],
            BcChoice::Neumann => vec![TruncBc::Neumann],
            BcChoice::Both => vec![TruncBc::Dirichlet, TruncBc::Neumann],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Solve,
    Certify,
    Transverse,
    Validate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub d: f64,
    pub profile: ProfileSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    #[serde(rename = "L")]
    pub half_length: Length,
    pub trunc_bc: BcChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub ns: usize,
    pub nu: usize,
    #[serde(default = "one")]
    pub refine_levels: usize,
}

fn one() -> usize {
    1
}

fn default_tasks() -> Vec<Task> {
    vec![Task::Solve, Task::Certify, Task::Transverse, Task::Validate]
}

fn default_samples() -> usize {
    41
}

/// Parameter grid for the `sweep` subcommand. `c` is the family's strength
/// (`c` or `amplitude`), `s0` its extent (`s0` or `width`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    #[serde(default)]
    pub c: Vec<f64>,
    #[serde(default)]
    pub d: Vec<f64>,
    #[serde(default)]
    pub s0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub geometry: GeometryConfig,
    pub truncation: TruncationConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default = "default_tasks")]
    pub tasks: Vec<Task>,
    /// Trial family for `certify`; chosen from the profile when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate_kind: Option<TrialKind>,
    #[serde(default = "default_samples")]
    pub transverse_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepGrid>,
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Scenario> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let sc: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
        })?;
        sc.check()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)?;
        Scenario::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Semantic checks that the schema cannot express.
    pub fn check(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("unsupported version {}, accepted: {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.name.trim().is_empty() {
            return Err(Error::config("name", "must not be empty"));
        }
        if !(self.geometry.d > 0.0) || !self.geometry.d.is_finite() {
            return Err(Error::config("geometry.d", format!("must be a positive number, got {}", self.geometry.d)));
        }
        if let Length::Fixed(l) = self.truncation.half_length {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::config("truncation.L", format!("must be positive or \"auto\", got {l}")));
            }
        }
        if self.grid.ns < 4 {
            return Err(Error::config("grid.ns", format!("must be >= 4, got {}", self.grid.ns)));
        }
        if self.grid.nu < 4 {
            return Err(Error::config("grid.nu", format!("must be >= 4, got {}", self.grid.nu)));
        }
        if self.grid.refine_levels > 4 {
            return Err(Error::config("grid.refine_levels", "accepted values: 0..=4"));
        }
        if self.solver.k == 0 {
            return Err(Error::config("solver.k", "must be >= 1"));
        }
        if !(self.solver.tol > 0.0) {
            return Err(Error::config("solver.tol", "must be positive"));
        }
        if self.solver.max_cycles == 0 {
            return Err(Error::config("solver.max_cycles", "must be >= 1"));
        }
        if self.tasks.is_empty() {
            return Err(Error::config("tasks", "accepted values: solve, certify, transverse, validate"));
        }
        if self.transverse_samples < 2 {
            return Err(Error::config("transverse_samples", "must be >= 2"));
        }
        self.profile()?;
        Ok(())
    }

    pub fn profile(&self) -> Result<CurvatureProfile> {
        CurvatureProfile::new(self.geometry.profile.clone()).map_err(|e| Error::config("geometry.profile", e.to_string()))
    }

    /// Builds the strip and refuses metric-degenerate or self-intersecting ones.
    pub fn strip(&self) -> Result<StripGeometry> {
        let g = StripGeometry::new(self.geometry.d, self.profile()?)?;
        if !g.valid.metric_positive {
            return Err(Error::config(
                "geometry.d",
                format!("d * gamma_plus = {} must be < 1", g.d * g.profile.gamma_plus),
            ));
        }
        g.require_valid().map_err(|e| Error::config("geometry.profile", e.to_string()))?;
        Ok(g)
    }
}

pub const PRESET_NAMES: [&str; 5] = ["straight", "prop1_bend", "prop3_bend", "prop2_sbend", "counterexample"];

fn scenario(name: &str, d: f64, profile: ProfileSpec, l: f64, ns: usize, nu: usize) -> Scenario {
    Scenario {
        schema_version: SCHEMA_VERSION,
        name: name.to_string(),
        geometry: GeometryConfig { d, profile },
        truncation: TruncationConfig {
            half_length: Length::Fixed(l),
            trunc_bc: BcChoice::Both,
        },
        grid: GridConfig {
            ns,
            nu,
            refine_levels: 1,
        },
        solver: SolverOptions::default(),
        tasks: default_tasks(),
        certificate_kind: None,
        transverse_samples: default_samples(),
        sweep: None,
    }
}

/// Embedded scenarios: the straight strip, an inward bend, an outward bend,
/// a zero-total-bending S-bend and the two-bump counterexample.
pub fn preset(name: &str) -> Result<Scenario> {
    let sc = match name {
        "straight" => scenario(name, 1.0, ProfileSpec::Zero, 12.0, 480, 48),
        "prop1_bend" => scenario(name, 1.0, ProfileSpec::PolyBump { c: 0.3, s0: 2.0 }, 14.0, 560, 48),
        "prop3_bend" => scenario(name, 1.0, ProfileSpec::PolyBump { c: -0.3, s0: 2.0 }, 14.0, 560, 48),
        "prop2_sbend" => scenario(name, 1.0, ProfileSpec::SBend { amplitude: 0.3, s0: 2.0 }, 60.0, 960, 48),
        "counterexample" => scenario(
            name,
            0.2,
            ProfileSpec::TwoBump {
                s1: -3.0,
                s2: -1.0,
                area1: -0.5,
                s3: 1.0,
                s4: 3.0,
                area2: 0.7,
            },
            6.0,
            240,
            24,
        ),
        other => {
            return Err(Error::config(
                "preset",
                format!("unknown preset `{other}`, accepted: {}", PRESET_NAMES.join(", ")),
            ))
        }
    };
    Ok(sc)
}
