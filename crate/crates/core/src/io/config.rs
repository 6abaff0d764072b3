//! Job files.
//!
//! A job is a TOML document:
//!
//! ```toml
//! samples = 200                      # rulings per table, >= 2 (default 100)
//!
//! [base]
//! c_expr = "[0, 0, 0.5*u]"           # base curve p(u); alias `c`
//! e_expr = "[cos(u), sin(u), 0]"     # director e(u); alias `e`
//! u_range = [0.0, 6.283185307179586]
//!
//! [[offsets]]                        # zero or more
//! theta_deg = 60.0                   # in [0, 180]
//! theta_star = 0.2
//!
//! [mesh]                             # optional
//! v_range = [-1.0, 1.0]
//! v_count = 9
//!
//! [tolerances]                       # optional, every key optional
//! tol_s = 1e-10
//! max_depth = 40
//! tol_cyl = 1e-8
//! tol_mono = 1e-6
//! arc_panels = 64
//! developable = 1e-8
//! verify_threshold = 1e-6
//! ```

use std::fmt;
use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use crate::curve::ParametricCurve;
use crate::error::Error;
use crate::offset::OffsetSpec;
use crate::tolerance::Tolerances;

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_VERIFY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Io {
        path: String,
        message: String,
    },
    /// Malformed TOML or a malformed curve expression, with a 1-based position.
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// A well-formed value outside its admissible range.
    Validation {
        field: String,
        message: String,
    },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, message } => write!(f, "cannot read {path}: {message}"),
            ConfigError::Parse {
                line,
                column,
                message,
            } => write!(f, "parse error at line {line}, column {column}: {message}"),
            ConfigError::Validation { field, message } => write!(f, "invalid {field}: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone)]
pub struct BaseConfig {
    pub c_expr: String,
    pub e_expr: String,
    pub c: ParametricCurve,
    pub e: ParametricCurve,
    pub u_range: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetEntry {
    pub theta_deg: f64,
    pub theta_star: f64,
    pub spec: OffsetSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshConfig {
    pub v_range: (f64, f64),
    pub v_count: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self {
            v_range: (-1.0, 1.0),
            v_count: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct JobConfig {
    pub samples: usize,
    pub base: BaseConfig,
    pub offsets: Vec<OffsetEntry>,
    pub mesh: MeshConfig,
    pub tolerances: Tolerances,
    pub verify_threshold: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    samples: Option<Spanned<i64>>,
    base: RawBase,
    #[serde(default)]
    offsets: Vec<RawOffset>,
    mesh: Option<RawMesh>,
    tolerances: Option<RawTolerances>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBase {
    #[serde(alias = "c")]
    c_expr: Spanned<String>,
    #[serde(alias = "e")]
    e_expr: Spanned<String>,
    u_range: [f64; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOffset {
    theta_deg: f64,
    theta_star: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMesh {
    v_range: Option<[f64; 2]>,
    v_count: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    tol_s: Option<f64>,
    max_depth: Option<i64>,
    tol_cyl: Option<f64>,
    tol_mono: Option<f64>,
    arc_panels: Option<i64>,
    developable: Option<f64>,
    verify_threshold: Option<f64>,
}

/// 1-based line and column of a byte offset.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

fn range(field: &str, r: [f64; 2]) -> Result<(f64, f64), ConfigError> {
    if r.iter().all(|v| v.is_finite()) && r[0] < r[1] {
        Ok((r[0], r[1]))
    } else {
        Err(invalid(
            field,
            format!("expected finite [min, max] with min < max, got {r:?}"),
        ))
    }
}

fn positive(field: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(
            field,
            format!("expected a positive number, got {v}"),
        ))
    }
}

fn count(field: &str, v: i64, min: i64) -> Result<usize, ConfigError> {
    if v >= min {
        Ok(v as usize)
    } else {
        Err(invalid(
            field,
            format!("expected an integer >= {min}, got {v}"),
        ))
    }
}

/// Parses a curve string, locating expression errors inside the document.
fn curve(
    text: &str,
    field: &str,
    value: &Spanned<String>,
    domain: (f64, f64),
) -> Result<ParametricCurve, ConfigError> {
    ParametricCurve::parse(value.get_ref(), domain).map_err(|err| {
        let offset = match &err {
            Error::Syntax { offset, .. } | Error::UnknownIdentifier { offset, .. } => Some(*offset),
            _ => None,
        };
        match offset {
            Some(offset) => {
                // Skip the opening quote; exact for strings without escapes.
                let Range { start, .. } = value.span();
                let (line, column) = position(text, start + 1 + offset);
                ConfigError::Parse {
                    line,
                    column,
                    message: format!("{field}: {err}"),
                }
            }
            None => invalid(field, err.to_string()),
        }
    })
}

pub fn parse_config(text: &str) -> Result<JobConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|err| {
        let (line, column) = err.span().map_or((1, 1), |s| position(text, s.start));
        ConfigError::Parse {
            line,
            column,
            message: err.message().to_string(),
        }
    })?;

    let samples = match &raw.samples {
        Some(s) => count("samples", *s.get_ref(), 2)?,
        None => DEFAULT_SAMPLES,
    };
    let u_range = range("base.u_range", raw.base.u_range)?;
    let c = curve(text, "base.c_expr", &raw.base.c_expr, u_range)?;
    let e = curve(text, "base.e_expr", &raw.base.e_expr, u_range)?;

    let offsets = raw
        .offsets
        .iter()
        .enumerate()
        .map(|(k, o)| {
            if !(0.0..=180.0).contains(&o.theta_deg) {
                return Err(invalid(
                    format!("offsets[{k}].theta_deg"),
                    format!("expected a value in [0, 180], got {}", o.theta_deg),
                ));
            }
            if !o.theta_star.is_finite() {
                return Err(invalid(
                    format!("offsets[{k}].theta_star"),
                    "expected a finite number",
                ));
            }
            let spec = OffsetSpec::from_degrees(o.theta_deg, o.theta_star)
                .map_err(|e| invalid(format!("offsets[{k}].theta_deg"), e.to_string()))?;
            Ok(OffsetEntry {
                theta_deg: o.theta_deg,
                theta_star: o.theta_star,
                spec,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut mesh = MeshConfig::default();
    if let Some(m) = &raw.mesh {
        if let Some(r) = m.v_range {
            mesh.v_range = range("mesh.v_range", r)?;
        }
        if let Some(n) = m.v_count {
            mesh.v_count = count("mesh.v_count", n, 2)?;
        }
    }

    let mut tolerances = Tolerances::default();
    let mut verify_threshold = DEFAULT_VERIFY_THRESHOLD;
    if let Some(t) = &raw.tolerances {
        if let Some(v) = t.tol_s {
            tolerances.arc_length = positive("tolerances.tol_s", v)?;
        }
        if let Some(v) = t.max_depth {
            tolerances.max_depth = count("tolerances.max_depth", v, 1)? as u32;
        }
        if let Some(v) = t.tol_cyl {
            tolerances.cylindrical = positive("tolerances.tol_cyl", v)?;
        }
        if let Some(v) = t.tol_mono {
            tolerances.monotone = positive("tolerances.tol_mono", v)?;
        }
        if let Some(v) = t.arc_panels {
            tolerances.arc_panels = count("tolerances.arc_panels", v, 1)?;
        }
        if let Some(v) = t.developable {
            tolerances.developable = Some(positive("tolerances.developable", v)?);
        }
        if let Some(v) = t.verify_threshold {
            verify_threshold = positive("tolerances.verify_threshold", v)?;
        }
    }

    Ok(JobConfig {
        samples,
        base: BaseConfig {
            c_expr: raw.base.c_expr.into_inner(),
            e_expr: raw.base.e_expr.into_inner(),
            c,
            e,
            u_range,
        },
        offsets,
        mesh,
        tolerances,
        verify_threshold,
    })
}

pub fn load_config(path: impl AsRef<Path>) -> Result<JobConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}
