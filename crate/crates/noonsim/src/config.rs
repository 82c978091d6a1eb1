//! Scenario files: strict JSON with defaults, `--set` overrides and echo.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use noonsim_core::{Complex64, DEFAULT_TAIL_EPSILON};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    NoonFock,
    MziScan,
    CoherentNoon,
    CoherentExact,
    FreePhaseCheck,
    #[serde(rename = "exact_2211")]
    Exact2211,
    NonresolvingN3,
    VerifyIdentity,
    MatrixDump,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::NoonFock => "noon_fock",
            Kind::MziScan => "mzi_scan",
            Kind::CoherentNoon => "coherent_noon",
            Kind::CoherentExact => "coherent_exact",
            Kind::FreePhaseCheck => "free_phase_check",
            Kind::Exact2211 => "exact_2211",
            Kind::NonresolvingN3 => "nonresolving_n3",
            Kind::VerifyIdentity => "verify_identity",
            Kind::MatrixDump => "matrix_dump",
        }
    }

    /// Fields the kind reads, beyond `kind`, `output_path` and `format`.
    fn fields(self) -> &'static [Field] {
        use Field::*;
        match self {
            Kind::NoonFock => &[N],
            Kind::MziScan => &[N, PhiGrid, Efficiency],
            Kind::CoherentNoon | Kind::CoherentExact => &[N, Alpha, TailEpsilon],
            Kind::FreePhaseCheck => &[Theta],
            Kind::Exact2211 | Kind::VerifyIdentity => &[],
            Kind::NonresolvingN3 => &[PhiGrid],
            Kind::MatrixDump => &[N],
        }
    }

    /// Smallest mode count the kind accepts when it needs `n`.
    fn min_n(self) -> usize {
        match self {
            Kind::MatrixDump => 1,
            _ => 2,
        }
    }

    pub fn is_table(self) -> bool {
        matches!(self, Kind::MziScan | Kind::NonresolvingN3)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    N,
    PhiGrid,
    Alpha,
    Theta,
    Efficiency,
    TailEpsilon,
}

impl Field {
    fn name(self) -> &'static str {
        match self {
            Field::N => "n",
            Field::PhiGrid => "phi_grid",
            Field::Alpha => "alpha",
            Field::Theta => "theta",
            Field::Efficiency => "efficiency",
            Field::TailEpsilon => "tail_epsilon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// `count` points from `start` up to, but excluding, `stop`; or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhiGrid {
    Range { start: f64, stop: f64, count: usize },
    List(Vec<f64>),
}

impl PhiGrid {
    pub fn full_period(count: usize) -> Self {
        PhiGrid::Range {
            start: 0.0,
            stop: 2.0 * PI,
            count,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        match self {
            PhiGrid::Range { start, stop, count } => {
                let step = (stop - start) / *count as f64;
                (0..*count).map(|k| start + step * k as f64).collect()
            }
            PhiGrid::List(v) => v.clone(),
        }
    }
}

/// Complex amplitude written as a bare number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

impl Amplitude {
    pub fn value(self) -> Complex64 {
        match self {
            Amplitude::Real(re) => Complex64::new(re, 0.0),
            Amplitude::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// The file as written.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    kind: Kind,
    n: Option<usize>,
    phi_grid: Option<PhiGrid>,
    alpha: Option<Amplitude>,
    theta: Option<f64>,
    efficiency: Option<f64>,
    tail_epsilon: Option<f64>,
    output_path: Option<String>,
    format: Option<Format>,
}

/// A validated scenario with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub kind: Kind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_grid: Option<PhiGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Amplitude>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub efficiency: f64,
    pub tail_epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    pub format: Format,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{origin}:{line}:{column}: {message}\n  {line} | {text}")]
    Syntax {
        origin: String,
        line: usize,
        column: usize,
        message: String,
        text: String,
    },
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

impl Scenario {
    /// Resolve and validate; warnings for fields the kind does not read are
    /// returned alongside.
    fn resolve(raw: RawScenario) -> Result<(Self, Vec<String>), ConfigError> {
        let kind = raw.kind;
        let wanted = kind.fields();
        let mut warnings = Vec::new();
        let present = [
            (Field::N, raw.n.is_some()),
            (Field::PhiGrid, raw.phi_grid.is_some()),
            (Field::Alpha, raw.alpha.is_some()),
            (Field::Theta, raw.theta.is_some()),
            (Field::Efficiency, raw.efficiency.is_some()),
            (Field::TailEpsilon, raw.tail_epsilon.is_some()),
        ];
        // Echoed scenarios carry the defaulted fields; those stay quiet.
        let defaulted = |f: Field| match f {
            Field::Efficiency => raw.efficiency == Some(1.0),
            Field::TailEpsilon => raw.tail_epsilon == Some(DEFAULT_TAIL_EPSILON),
            _ => false,
        };
        for (field, is_set) in present {
            if is_set && !wanted.contains(&field) && !defaulted(field) {
                warnings.push(format!(
                    "field `{}` is ignored by kind {kind}",
                    field.name()
                ));
            }
        }
        for (field, is_set) in present {
            let has_default = matches!(field, Field::Efficiency | Field::TailEpsilon);
            if wanted.contains(&field) && !is_set && !has_default {
                return Err(invalid(format!(
                    "kind {kind} requires field `{}`",
                    field.name()
                )));
            }
        }

        if let Some(n) = raw.n {
            if n < 1 {
                return Err(invalid("n must be ≥ 1"));
            }
            if wanted.contains(&Field::N) && n < kind.min_n() {
                return Err(invalid(format!(
                    "n must be ≥ {} for kind {kind}",
                    kind.min_n()
                )));
            }
        }
        let efficiency = raw.efficiency.unwrap_or(1.0);
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return Err(invalid(format!(
                "efficiency must lie in (0, 1], got {efficiency}"
            )));
        }
        let tail_epsilon = raw.tail_epsilon.unwrap_or(DEFAULT_TAIL_EPSILON);
        if !(tail_epsilon > 0.0 && tail_epsilon < 1.0) {
            return Err(invalid(format!(
                "tail_epsilon must lie in (0, 1), got {tail_epsilon}"
            )));
        }
        if let Some(theta) = raw.theta {
            if !theta.is_finite() {
                return Err(invalid("theta must be finite"));
            }
        }
        if let Some(alpha) = raw.alpha {
            if !alpha.value().is_finite() {
                return Err(invalid("alpha must be finite"));
            }
        }
        if let Some(grid) = &raw.phi_grid {
            match grid {
                PhiGrid::Range { start, stop, count } => {
                    if *count == 0 {
                        return Err(invalid("phi_grid.count must be ≥ 1"));
                    }
                    if !(start.is_finite() && stop.is_finite()) || stop <= start {
                        return Err(invalid("phi_grid needs finite start < stop"));
                    }
                }
                PhiGrid::List(v) => {
                    if v.is_empty() || v.iter().any(|p| !p.is_finite()) {
                        return Err(invalid("phi_grid list must be nonempty and finite"));
                    }
                }
            }
        }
        let format = match (kind, raw.format) {
            (Kind::MatrixDump, Some(Format::Csv)) => {
                warnings.push("matrix_dump always writes JSON".into());
                Format::Json
            }
            (_, Some(f)) => f,
            (k, None) if k.is_table() => Format::Csv,
            (_, None) => Format::Json,
        };

        Ok((
            Scenario {
                kind,
                n: raw.n,
                phi_grid: raw.phi_grid,
                alpha: raw.alpha,
                theta: raw.theta,
                efficiency,
                tail_epsilon,
                output_path: raw.output_path,
                format,
            },
            warnings,
        ))
    }

    /// `n`, validated present for kinds that need it.
    pub fn modes(&self) -> usize {
        self.n.expect("validated scenario carries n")
    }

    pub fn phis(&self) -> Vec<f64> {
        self.phi_grid
            .as_ref()
            .map(PhiGrid::points)
            .expect("validated scenario carries phi_grid")
    }
}

/// Parsed scenario plus any non-fatal warnings.
#[derive(Debug)]
pub struct Loaded {
    pub scenario: Scenario,
    pub warnings: Vec<String>,
}

/// Parse scenario text. `origin` names the source in error messages.
pub fn parse_str(text: &str, origin: &str, overrides: &[String]) -> Result<Loaded, ConfigError> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| syntax(e, text, origin))?;
    let object = value
        .as_object_mut()
        .ok_or_else(|| invalid(format!("{origin}: top level must be an object")))?;
    for ov in overrides {
        apply_override(object, ov)?;
    }
    let raw: RawScenario =
        serde_json::from_value(value).map_err(|e| invalid(format!("{origin}: {e}")))?;
    let (scenario, warnings) = Scenario::resolve(raw)?;
    Ok(Loaded { scenario, warnings })
}

pub fn parse_config(path: &Path, overrides: &[String]) -> Result<Loaded, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_str(&text, &path.display().to_string(), overrides)
}

fn syntax(e: serde_json::Error, text: &str, origin: &str) -> ConfigError {
    let line = e.line();
    ConfigError::Syntax {
        origin: origin.to_string(),
        line,
        column: e.column(),
        message: e.to_string(),
        text: text
            .lines()
            .nth(line.saturating_sub(1))
            .unwrap_or("")
            .to_string(),
    }
}

/// `key=value`; the value is read as JSON, falling back to a plain string.
fn apply_override(object: &mut Map<String, Value>, spec: &str) -> Result<(), ConfigError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| invalid(format!("--set expects key=value, got `{spec}`")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(invalid(format!("--set has an empty key in `{spec}`")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    object.insert(key.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Loaded, ConfigError> {
        parse_str(text, "test.json", &[])
    }

    #[test]
    fn minimal_identity_config_gets_defaults() {
        let l = parse(r#"{"kind": "verify_identity"}"#).unwrap();
        assert_eq!(l.scenario.kind, Kind::VerifyIdentity);
        assert_eq!(l.scenario.efficiency, 1.0);
        assert_eq!(l.scenario.tail_epsilon, 1e-12);
        assert_eq!(l.scenario.format, Format::Json);
        assert!(l.warnings.is_empty());
    }

    #[test]
    fn rejects_bad_values() {
        let e = parse(r#"{"kind": "matrix_dump", "n": 0}"#).unwrap_err();
        assert_eq!(e.to_string(), "n must be ≥ 1");
        let e = parse(r#"{"kind": "mzi_scan", "n": 3, "phi_grid": [0.0], "efficiency": 1.5}"#)
            .unwrap_err();
        assert!(e.to_string().contains("efficiency"), "{e}");
        assert!(parse(r#"{"kind": "mzi_scan", "n": 3}"#).is_err());
        assert!(parse(r#"{"kind": "coherent_noon", "n": 1, "alpha": 0.1}"#).is_err());
    }

    #[test]
    fn unknown_keys_are_errors() {
        let e = parse(r#"{"kind": "exact_2211", "seed": 4}"#).unwrap_err();
        assert!(e.to_string().contains("seed"), "{e}");
    }

    #[test]
    fn irrelevant_fields_warn() {
        let l = parse(r#"{"kind": "exact_2211", "theta": 0.5, "n": 4}"#).unwrap();
        assert_eq!(l.warnings.len(), 2);
    }

    #[test]
    fn syntax_errors_carry_line_context() {
        let e = parse("{\n  \"kind\": \"exact_2211\",\n  \"n\": ,\n}").unwrap_err();
        let msg = e.to_string();
        assert!(msg.starts_with("test.json:3:"), "{msg}");
        assert!(msg.contains("\"n\": ,"), "{msg}");
    }

    #[test]
    fn overrides_replace_fields() {
        let l = parse_str(
            r#"{"kind": "mzi_scan", "n": 3, "phi_grid": {"start": 0, "stop": 1, "count": 4}}"#,
            "t",
            &[
                "n=4".into(),
                "format=json".into(),
                "output_path=out/scan.json".into(),
            ],
        )
        .unwrap();
        assert_eq!(l.scenario.n, Some(4));
        assert_eq!(l.scenario.format, Format::Json);
        assert_eq!(l.scenario.output_path.as_deref(), Some("out/scan.json"));
        assert!(parse_str(r#"{"kind": "exact_2211"}"#, "t", &["bogus=1".into()]).is_err());
        assert!(parse_str(r#"{"kind": "exact_2211"}"#, "t", &["novalue".into()]).is_err());
    }

    #[test]
    fn grids_and_amplitudes() {
        let g = PhiGrid::Range {
            start: 0.0,
            stop: 1.0,
            count: 4,
        };
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75]);
        assert_eq!(
            Amplitude::Complex([0.1, -0.2]).value(),
            Complex64::new(0.1, -0.2)
        );
        assert_eq!(Amplitude::Real(0.3).value(), Complex64::new(0.3, 0.0));
    }
}
