//! Scenario files: JSON with `schema_version: 1`, unknown keys rejected.

use std::path::Path;

use anomaly_core::algebra::{catalog, StructureConstants};
use anomaly_core::curvature::ConnectionParams;
use anomaly_core::flow::{Direction, EventThresholds, IntegratorConfig, Scheme};
use anomaly_core::geometry::HermitianMetric;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dto::{kind_from_name, DtoError, MetricDto, StructureConstantsDto};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{file}:{line}:{column}: at `{field}`: {message}")]
    Parse { file: String, line: usize, column: usize, field: String, message: String },
    #[error("{file}: unsupported schema_version {found} (expected {SCHEMA_VERSION})")]
    Schema { file: String, found: u32 },
    #[error("{file}: at `{field}`: {source}")]
    Invalid { file: String, field: &'static str, source: DtoError },
    #[error("{file}: {message}")]
    Config { file: String, message: String },
}

/// Reads and deserializes a JSON file, reporting the line, column and field path of parse errors.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, InputError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| InputError::Io { path: path.display().to_string(), source })?;
    parse_json(&text, &path.display().to_string())
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, file: &str) -> Result<T, InputError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        InputError::Parse {
            file: file.to_string(),
            line: inner.line(),
            column: inner.column(),
            field,
            message: inner.to_string(),
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Named(String),
    Explicit { structure_constants: StructureConstantsDto },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Full(MetricDto),
    Diagonal { diagonal: [f64; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Rk4,
    Rkf45,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionName {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub scheme: Option<SchemeName>,
    pub dt: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub t_max: Option<f64>,
    pub direction: Option<DirectionName>,
    pub max_steps: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventsSection {
    pub stationary_tol: Option<f64>,
    pub blow_up_cap: Option<f64>,
    pub degeneracy_floor: Option<f64>,
    pub dt_min: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    pub csv_path: Option<String>,
    pub json_path: Option<String>,
    pub sample_stride: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub group: GroupSpec,
    pub initial_metric: MetricSpec,
    pub kappa: f64,
    pub alpha_prime: f64,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub events: EventsSection,
    #[serde(default)]
    pub outputs: OutputsSection,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Setup {
    pub name: String,
    pub constants: StructureConstants,
    pub initial: HermitianMetric,
    pub params: ConnectionParams,
    pub config: IntegratorConfig,
    pub csv_path: String,
    pub json_path: String,
    pub warnings: Vec<String>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Setup, InputError> {
        let s: Scenario = read_json(path)?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into());
        s.validate(&path.display().to_string(), &name)
    }

    pub fn validate(&self, file: &str, name: &str) -> Result<Setup, InputError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(InputError::Schema { file: file.to_string(), found: self.schema_version });
        }
        let invalid =
            |field: &'static str| move |source: DtoError| InputError::Invalid { file: file.to_string(), field, source };
        let constants = match &self.group {
            GroupSpec::Named(n) => catalog(kind_from_name(n).map_err(invalid("group"))?),
            GroupSpec::Explicit { structure_constants } => {
                structure_constants.to_constants().map_err(invalid("group.structure_constants"))?
            }
        };
        let initial = match &self.initial_metric {
            MetricSpec::Full(m) => m.to_metric(),
            MetricSpec::Diagonal { diagonal } => HermitianMetric::diagonal(*diagonal).map_err(DtoError::from),
        }
        .map_err(invalid("initial_metric"))?;
        let config_err = |message: String| InputError::Config { file: file.to_string(), message };
        if !self.kappa.is_finite() || !self.alpha_prime.is_finite() {
            return Err(config_err("kappa and alpha_prime must be finite".into()));
        }
        let params = ConnectionParams::new(self.kappa, self.alpha_prime);
        let mut warnings = Vec::new();
        if params.beta() <= 0.0 {
            warnings.push(format!(
                "alpha' tau = {} <= 0: the case analysis of the flow assumes alpha' tau > 0",
                self.alpha_prime * params.tau()
            ));
        }
        let d = IntegratorConfig::default();
        let i = &self.integrator;
        let e = &self.events;
        let de = d.events;
        let config = IntegratorConfig {
            scheme: match i.scheme {
                Some(SchemeName::Rk4) => Scheme::Rk4Fixed,
                Some(SchemeName::Rkf45) => Scheme::Rkf45Adaptive,
                None => d.scheme,
            },
            dt: i.dt.unwrap_or(d.dt),
            rel_tol: i.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: i.abs_tol.unwrap_or(d.abs_tol),
            t_max: i.t_max.unwrap_or(d.t_max),
            direction: match i.direction {
                Some(DirectionName::Backward) => Direction::Backward,
                Some(DirectionName::Forward) => Direction::Forward,
                None => d.direction,
            },
            events: EventThresholds {
                stationary_tol: e.stationary_tol.unwrap_or(de.stationary_tol),
                blow_up_cap: e.blow_up_cap.unwrap_or(de.blow_up_cap),
                degeneracy_floor: e.degeneracy_floor.unwrap_or(de.degeneracy_floor),
                dt_min: e.dt_min.unwrap_or(de.dt_min),
            },
            max_steps: i.max_steps.unwrap_or(d.max_steps),
            record_stride: self.outputs.sample_stride.unwrap_or(d.record_stride),
        };
        config.validate().map_err(|err| config_err(err.to_string()))?;
        Ok(Setup {
            name: name.to_string(),
            constants,
            initial,
            params,
            config,
            csv_path: self.outputs.csv_path.clone().unwrap_or_else(|| format!("{name}.csv")),
            json_path: self.outputs.json_path.clone().unwrap_or_else(|| format!("{name}.summary.json")),
            warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use anomaly_core::algebra::GroupKind;

    const MINIMAL: &str = r#"{
        "schema_version": 1,
        "group": "sl2c",
        "initial_metric": {"diagonal": [4, 4, 4]},
        "kappa": 1,
        "alpha_prime": 1
    }"#;

    fn setup(text: &str) -> Result<Setup, InputError> {
        parse_json::<Scenario>(text, "test.json")?.validate("test.json", "test")
    }

    #[test]
    fn minimal_scenario_uses_defaults() {
        let s = setup(MINIMAL).unwrap();
        assert_eq!(s.constants.kind(), Some(GroupKind::SL2C));
        assert_eq!(s.params.beta(), 0.5);
        assert_eq!(s.config, IntegratorConfig::default());
        assert_eq!(s.csv_path, "test.csv");
        assert_eq!(s.json_path, "test.summary.json");
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let text = MINIMAL.replace("\"kappa\": 1,", "\"kappa\": 1,\n        \"kapa\": 2,");
        match setup(&text) {
            Err(InputError::Parse { line, message, .. }) => {
                assert_eq!(line, 6);
                assert!(message.contains("kapa"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace("\"alpha_prime\": 1", "\"alpha_prime\": 1, \"integrator\": {\"dtt\": 1}");
        match setup(&text) {
            Err(InputError::Parse { field, .. }) => assert_eq!(field, "integrator.dtt"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_version_is_checked() {
        let text = MINIMAL.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(setup(&text), Err(InputError::Schema { found: 2, .. })));
        let text = MINIMAL.replace("\"schema_version\": 1,", "");
        assert!(matches!(setup(&text), Err(InputError::Parse { .. })));
    }

    #[test]
    fn invalid_values() {
        let text = MINIMAL.replace("[4, 4, 4]", "[4, -1, 4]");
        assert!(matches!(setup(&text), Err(InputError::Invalid { field: "initial_metric", .. })));
        let text = MINIMAL.replace("\"sl2c\"", "\"sl3c\"");
        assert!(matches!(setup(&text), Err(InputError::Invalid { field: "group", .. })));
        let text = MINIMAL.replace("\"alpha_prime\": 1", "\"alpha_prime\": 1, \"integrator\": {\"dt\": -1}");
        assert!(matches!(setup(&text), Err(InputError::Config { .. })));
    }

    #[test]
    fn negative_beta_warns() {
        let s = setup(&MINIMAL.replace("\"alpha_prime\": 1", "\"alpha_prime\": -1")).unwrap();
        assert_eq!(s.warnings.len(), 1);
    }

    #[test]
    fn explicit_constants_and_full_metric() {
        let text = r#"{
            "schema_version": 1,
            "group": {"structure_constants": {"entries": [
                {"d": 3, "a": 1, "b": 2, "re": 1}, {"d": 3, "a": 2, "b": 1, "re": -1}
            ]}},
            "initial_metric": [
                [{"re": 2}, {"re": 0.1, "im": 0.2}, {"re": 0}],
                [{"re": 0.1, "im": -0.2}, {"re": 1}, {"re": 0}],
                [{"re": 0}, {"re": 0}, {"re": 1}]
            ],
            "kappa": 0.5,
            "alpha_prime": 3,
            "integrator": {"scheme": "rk4", "dt": 0.01, "t_max": 2, "direction": "backward"},
            "events": {"blow_up_cap": 1e4},
            "outputs": {"csv_path": "x.csv", "sample_stride": 5}
        }"#;
        let s = setup(text).unwrap();
        assert_eq!(s.constants.max_abs_diff(&catalog(GroupKind::Nilpotent)), 0.0);
        assert_eq!(s.constants.kind(), None);
        assert_eq!(s.config.scheme, Scheme::Rk4Fixed);
        assert_eq!(s.config.direction, Direction::Backward);
        assert_eq!(s.config.events.blow_up_cap, 1e4);
        assert_eq!(s.config.record_stride, 5);
        assert_eq!(s.csv_path, "x.csv");
        assert_eq!(s.initial.entry(0, 1).im, 0.2);
        // tau(1/2) = 0
        assert_eq!(s.warnings.len(), 1);
    }
}
