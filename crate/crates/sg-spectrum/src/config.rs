//! Run configuration: a flat key-value text format with `[section]` headers,
//! parseable in any language.
//!
//! ```text
//! [potential]
//! family = klaus_shaw_breather
//! peak = 1.5707963267948966
//! width = 2.0109
//!
//! [tolerances]
//! integrator = 1e-10
//! quadrature = 1e-10
//! eigenvalue = 1e-8
//!
//! [search]
//! r_min = 0.05
//! r_max = 20.0
//! theta_min = 0.01
//! theta_max = 3.1315926535897933
//!
//! [output]
//! dir = out
//! spectrum_json = true
//! prufer_csv = true
//! plane_scatter = false
//! trajectory_dump = false
//! ```

use crate::potentials::{KinkShape, PotentialError, PotentialProfile};
use crate::search::{RegionKind, SearchRegion};
use crate::Tolerances;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("section [{section}]: missing key '{key}'")]
    MissingKey { section: String, key: String },
    #[error("section [{section}]: key '{key}' = '{value}': {message}")]
    BadValue {
        section: String,
        key: String,
        value: String,
        message: String,
    },
    #[error("[potential] must specify exactly one family")]
    MissingPotential,
    #[error("unknown potential family '{0}'")]
    UnknownFamily(String),
    #[error("tolerances must be positive")]
    NonPositiveTolerance,
    #[error("potential: {0}")]
    Potential(#[from] PotentialError),
    #[error("io: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    BuckinghamMiller,
    MonotoneKink { shape: KinkShape, scale: f64 },
    KlausShawBreather { peak: f64, width: f64 },
    Tabulated { file: PathBuf },
}

impl PotentialSpec {
    pub fn build(&self) -> Result<PotentialProfile, ConfigError> {
        match self {
            PotentialSpec::BuckinghamMiller => Ok(PotentialProfile::buckingham_miller()),
            PotentialSpec::MonotoneKink { shape, scale } => {
                Ok(PotentialProfile::monotone_kink(*shape, *scale)?)
            }
            PotentialSpec::KlausShawBreather { peak, width } => {
                Ok(PotentialProfile::klaus_shaw_breather(*peak, *width)?)
            }
            PotentialSpec::Tabulated { file } => {
                let f = std::fs::File::open(file).map_err(|e| ConfigError::Io(e.to_string()))?;
                Ok(PotentialProfile::from_table(std::io::BufReader::new(f))?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmitFlags {
    pub spectrum_json: bool,
    pub count_json: bool,
    pub prufer_csv: bool,
    pub plane_scatter: bool,
    pub trajectory_dump: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        EmitFlags {
            spectrum_json: true,
            count_json: true,
            prufer_csv: false,
            plane_scatter: false,
            trajectory_dump: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub tolerances: Tolerances,
    pub region: SearchRegion,
    pub out_dir: PathBuf,
    pub emit: EmitFlags,
}

type Sections = BTreeMap<String, BTreeMap<String, (usize, String)>>;

fn parse_sections(text: &str) -> Result<Sections, ConfigError> {
    let mut sections: Sections = BTreeMap::new();
    let mut current = String::from("");
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or(ConfigError::Parse {
                line: idx + 1,
                message: "unterminated section header".into(),
            })?;
            current = name.trim().to_string();
            sections.entry(current.clone()).or_default();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::Parse {
            line: idx + 1,
            message: format!("expected 'key = value', got '{line}'"),
        })?;
        sections
            .entry(current.clone())
            .or_default()
            .insert(key.trim().to_string(), (idx + 1, value.trim().to_string()));
    }
    Ok(sections)
}

fn get_f64(
    sections: &Sections,
    section: &str,
    key: &str,
) -> Result<Option<f64>, ConfigError> {
    match sections.get(section).and_then(|s| s.get(key)) {
        None => Ok(None),
        Some((_, v)) => v
            .parse::<f64>()
            .map(Some)
            .map_err(|e| ConfigError::BadValue {
                section: section.into(),
                key: key.into(),
                value: v.clone(),
                message: e.to_string(),
            }),
    }
}

fn get_bool(
    sections: &Sections,
    section: &str,
    key: &str,
    default: bool,
) -> Result<bool, ConfigError> {
    match sections.get(section).and_then(|s| s.get(key)) {
        None => Ok(default),
        Some((_, v)) => match v.as_str() {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            other => Err(ConfigError::BadValue {
                section: section.into(),
                key: key.into(),
                value: other.into(),
                message: "expected a boolean".into(),
            }),
        },
    }
}

fn require_f64(sections: &Sections, section: &str, key: &str) -> Result<f64, ConfigError> {
    get_f64(sections, section, key)?.ok_or_else(|| ConfigError::MissingKey {
        section: section.into(),
        key: key.into(),
    })
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let sections = parse_sections(text)?;

        let family = sections
            .get("potential")
            .and_then(|s| s.get("family"))
            .map(|(_, v)| v.clone())
            .ok_or(ConfigError::MissingPotential)?;
        let potential = match family.as_str() {
            "buckingham_miller" => PotentialSpec::BuckinghamMiller,
            "monotone_kink" => {
                let shape = match sections
                    .get("potential")
                    .and_then(|s| s.get("shape"))
                    .map(|(_, v)| v.as_str())
                    .unwrap_or("atan_exp")
                {
                    "atan_exp" => KinkShape::AtanExp,
                    "tanh" => KinkShape::Tanh,
                    other => {
                        return Err(ConfigError::BadValue {
                            section: "potential".into(),
                            key: "shape".into(),
                            value: other.into(),
                            message: "expected atan_exp or tanh".into(),
                        })
                    }
                };
                PotentialSpec::MonotoneKink {
                    shape,
                    scale: require_f64(&sections, "potential", "scale")?,
                }
            }
            "klaus_shaw_breather" => PotentialSpec::KlausShawBreather {
                peak: require_f64(&sections, "potential", "peak")?,
                width: require_f64(&sections, "potential", "width")?,
            },
            "tabulated" => {
                let file = sections
                    .get("potential")
                    .and_then(|s| s.get("file"))
                    .map(|(_, v)| PathBuf::from(v))
                    .ok_or(ConfigError::MissingKey {
                        section: "potential".into(),
                        key: "file".into(),
                    })?;
                PotentialSpec::Tabulated { file }
            }
            other => return Err(ConfigError::UnknownFamily(other.into())),
        };

        let defaults = Tolerances::default();
        let tolerances = Tolerances {
            ode: get_f64(&sections, "tolerances", "integrator")?.unwrap_or(defaults.ode),
            quadrature: get_f64(&sections, "tolerances", "quadrature")?
                .unwrap_or(defaults.quadrature),
            eigenvalue: get_f64(&sections, "tolerances", "eigenvalue")?
                .unwrap_or(defaults.eigenvalue),
        };
        if tolerances.ode <= 0.0 || tolerances.quadrature <= 0.0 || tolerances.eigenvalue <= 0.0 {
            return Err(ConfigError::NonPositiveTolerance);
        }

        let default_region = SearchRegion::default();
        let (dr_min, dr_max, dt_min, dt_max) = match default_region.kind {
            RegionKind::AnnulusSector {
                r_min,
                r_max,
                theta_min,
                theta_max,
            } => (r_min, r_max, theta_min, theta_max),
            _ => unreachable!(),
        };
        let region = SearchRegion {
            kind: RegionKind::AnnulusSector {
                r_min: get_f64(&sections, "search", "r_min")?.unwrap_or(dr_min),
                r_max: get_f64(&sections, "search", "r_max")?.unwrap_or(dr_max),
                theta_min: get_f64(&sections, "search", "theta_min")?.unwrap_or(dt_min),
                theta_max: get_f64(&sections, "search", "theta_max")?.unwrap_or(dt_max),
            },
            excluded: Vec::new(),
        };

        let out_dir = sections
            .get("output")
            .and_then(|s| s.get("dir"))
            .map(|(_, v)| PathBuf::from(v))
            .unwrap_or_else(|| PathBuf::from("out"));
        let emit = EmitFlags {
            spectrum_json: get_bool(&sections, "output", "spectrum_json", true)?,
            count_json: get_bool(&sections, "output", "count_json", true)?,
            prufer_csv: get_bool(&sections, "output", "prufer_csv", false)?,
            plane_scatter: get_bool(&sections, "output", "plane_scatter", false)?,
            trajectory_dump: get_bool(&sections, "output", "trajectory_dump", false)?,
        };

        Ok(RunConfig {
            potential,
            tolerances,
            region,
            out_dir,
            emit,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(e.to_string()))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_breather_config() {
        let text = "\
[potential]
family = klaus_shaw_breather
peak = 1.0
width = 2.0

[tolerances]
integrator = 1e-9

[output]
dir = results
prufer_csv = true
";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(
            cfg.potential,
            PotentialSpec::KlausShawBreather {
                peak: 1.0,
                width: 2.0
            }
        );
        assert_eq!(cfg.tolerances.ode, 1e-9);
        assert_eq!(cfg.tolerances.eigenvalue, Tolerances::default().eigenvalue);
        assert_eq!(cfg.out_dir, PathBuf::from("results"));
        assert!(cfg.emit.prufer_csv);
        assert!(cfg.emit.spectrum_json);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(
            RunConfig::parse("[potential\nfamily = x"),
            Err(ConfigError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            RunConfig::parse("[potential]\nfamily klaus"),
            Err(ConfigError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            RunConfig::parse(""),
            Err(ConfigError::MissingPotential)
        ));
        assert!(matches!(
            RunConfig::parse("[potential]\nfamily = warp_drive"),
            Err(ConfigError::UnknownFamily(_))
        ));
        assert!(matches!(
            RunConfig::parse("[potential]\nfamily = monotone_kink\nscale = oops"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            RunConfig::parse(
                "[potential]\nfamily = buckingham_miller\n[tolerances]\nintegrator = -1"
            ),
            Err(ConfigError::NonPositiveTolerance)
        ));
    }
}
