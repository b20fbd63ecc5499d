use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use fockwalk::lattice::{BoundaryPhase, BulkParams, StepFrame};
use fockwalk::pulse::PulseConfig;
use thiserror::Error;

use crate::angle::{parse_angle, AngleError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("key `{0}` given twice")]
    Duplicate(String),
    #[error("no experiment kind given")]
    MissingKind,
    #[error("unknown experiment kind `{0}`")]
    UnknownKind(String),
    #[error("unknown key `{key}` for {kind}")]
    UnknownKey { key: String, kind: &'static str },
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("key `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error("key `{key}`: {source}")]
    BadAngle { key: String, source: AngleError },
}

type Result<T> = std::result::Result<T, ConfigError>;

/// `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: line.to_string(),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        let key_ok = !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
        if !key_ok || v.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: line.to_string(),
            });
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Walk,
    Sweep,
    Quench,
    Ramp,
    Eigen,
    PulseVerify,
    PhaseDiagram,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Walk => "walk",
            Kind::Sweep => "sweep",
            Kind::Quench => "quench",
            Kind::Ramp => "ramp",
            Kind::Eigen => "eigen",
            Kind::PulseVerify => "pulse-verify",
            Kind::PhaseDiagram => "phase-diagram",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Kind::Walk => &["theta1", "theta2", "phi", "steps", "frame", "output"],
            Kind::Sweep => &["vary", "from", "to", "points", "theta1", "theta2", "phi", "steps", "frame"],
            Kind::Quench => &["theta1_i", "theta2_i", "theta1_f", "theta2_f", "phi_i", "phi_f", "n0", "after", "kick", "frame"],
            Kind::Ramp => &[
                "theta1_i", "theta2_i", "theta1_f", "theta2_f", "phi_i", "phi_f", "n0", "nq", "after", "kick", "frame",
            ],
            Kind::Eigen => &["theta1", "theta2", "phi", "n_max", "mode", "frame"],
            Kind::PulseVerify => &["theta1", "theta2", "phi", "n_max", "omega0", "delta0", "tau", "integrator_step"],
            Kind::PhaseDiagram => &["grid", "lo", "hi", "transition_tol"],
        }
    }
}

impl FromStr for Kind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "walk" => Kind::Walk,
            "sweep" => Kind::Sweep,
            "quench" => Kind::Quench,
            "ramp" => Kind::Ramp,
            "eigen" => Kind::Eigen,
            "pulse-verify" => Kind::PulseVerify,
            "phase-diagram" => Kind::PhaseDiagram,
            _ => return Err(ConfigError::UnknownKind(s.to_string())),
        })
    }
}

const COMMON_KEYS: [&str; 4] = ["kind", "out", "json", "threads"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkOutput {
    Timeseries,
    Distribution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Theta1,
    Theta2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeChoice {
    Zero,
    Pi,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Walk {
        params: BulkParams,
        phi: BoundaryPhase,
        steps: usize,
        frame: StepFrame,
        output: WalkOutput,
    },
    Sweep {
        axis: SweepAxis,
        from: f64,
        to: f64,
        points: usize,
        fixed: f64,
        phi: BoundaryPhase,
        steps: usize,
        frame: StepFrame,
    },
    Quench {
        protocol: fockwalk::quench::QuenchProtocol,
    },
    Eigen {
        params: BulkParams,
        phi: BoundaryPhase,
        n_max: usize,
        mode: ModeChoice,
        frame: StepFrame,
    },
    PulseVerify {
        params: BulkParams,
        phi: BoundaryPhase,
        n_max: usize,
        pulse: PulseConfig,
    },
    PhaseDiagram {
        grid: usize,
        lo: f64,
        hi: f64,
        transition_tol: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub experiment: Experiment,
    pub out: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub threads: Option<usize>,
}

struct Values(BTreeMap<String, String>);

impl Values {
    fn raw(&self, key: &'static str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn angle(&self, key: &'static str, default: Option<f64>) -> Result<f64> {
        match self.raw(key) {
            Some(v) => parse_angle(v).map_err(|source| ConfigError::BadAngle {
                key: key.to_string(),
                source,
            }),
            None => default.ok_or(ConfigError::MissingKey(key)),
        }
    }

    fn phase(&self, key: &'static str) -> Result<BoundaryPhase> {
        let v = self.angle(key, Some(0.0))?;
        BoundaryPhase::from_radians(v, 1e-12).ok_or_else(|| ConfigError::BadValue {
            key: key.to_string(),
            reason: format!("boundary phase must be 0 or pi, got {v}"),
        })
    }

    fn number<T: FromStr>(&self, key: &'static str, default: Option<T>) -> Result<T> {
        match self.raw(key) {
            Some(v) => v.parse().map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                reason: format!("cannot parse `{v}`"),
            }),
            None => default.ok_or(ConfigError::MissingKey(key)),
        }
    }

    fn positive(&self, key: &'static str, default: Option<f64>) -> Result<f64> {
        let v: f64 = self.number(key, default)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(ConfigError::BadValue {
                key: key.to_string(),
                reason: format!("must be positive, got {v}"),
            })
        }
    }

    fn at_least(&self, key: &'static str, min: usize, default: Option<usize>) -> Result<usize> {
        let v = self.number(key, default)?;
        if v < min {
            return Err(ConfigError::BadValue {
                key: key.to_string(),
                reason: format!("must be at least {min}, got {v}"),
            });
        }
        Ok(v)
    }

    fn choice<T: Copy>(&self, key: &'static str, options: &[(&str, T)], default: T) -> Result<T> {
        let Some(v) = self.raw(key) else {
            return Ok(default);
        };
        options.iter().find(|(name, _)| *name == v).map(|&(_, t)| t).ok_or_else(|| ConfigError::BadValue {
            key: key.to_string(),
            reason: format!(
                "expected one of {}, got `{v}`",
                options.iter().map(|(n, _)| *n).collect::<Vec<_>>().join("|")
            ),
        })
    }

    fn frame(&self) -> Result<StepFrame> {
        self.choice(
            "frame",
            &[("symmetric", StepFrame::Symmetric), ("standard", StepFrame::Standard)],
            StepFrame::Symmetric,
        )
    }
}

impl ExperimentConfig {
    /// Builds a validated config from key/value pairs; later pairs may not
    /// repeat earlier keys.
    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            let k = k.into();
            if map.insert(k.clone(), v.into()).is_some() {
                return Err(ConfigError::Duplicate(k));
            }
        }
        let kind: Kind = map.get("kind").ok_or(ConfigError::MissingKind)?.parse()?;
        for key in map.keys() {
            if !COMMON_KEYS.contains(&key.as_str()) && !kind.keys().contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey {
                    key: key.clone(),
                    kind: kind.name(),
                });
            }
        }
        let v = Values(map);
        let threads = match v.raw("threads") {
            Some(_) => Some(v.at_least("threads", 1, None)?),
            None => None,
        };
        let experiment = match kind {
            Kind::Walk => Experiment::Walk {
                params: BulkParams::new(v.angle("theta1", None)?, v.angle("theta2", None)?),
                phi: v.phase("phi")?,
                steps: v.at_least("steps", 1, Some(100))?,
                frame: v.frame()?,
                output: v.choice(
                    "output",
                    &[("timeseries", WalkOutput::Timeseries), ("distribution", WalkOutput::Distribution)],
                    WalkOutput::Timeseries,
                )?,
            },
            Kind::Sweep => {
                let axis = v.choice("vary", &[("theta1", SweepAxis::Theta1), ("theta2", SweepAxis::Theta2)], SweepAxis::Theta1)?;
                let (swept, fixed) = match axis {
                    SweepAxis::Theta1 => ("theta1", "theta2"),
                    SweepAxis::Theta2 => ("theta2", "theta1"),
                };
                if v.raw(swept).is_some() {
                    return Err(ConfigError::BadValue {
                        key: swept.to_string(),
                        reason: "this angle is swept; use from/to".into(),
                    });
                }
                Experiment::Sweep {
                    axis,
                    from: v.angle("from", None)?,
                    to: v.angle("to", None)?,
                    points: v.at_least("points", 1, None)?,
                    fixed: v.angle(fixed, None)?,
                    phi: v.phase("phi")?,
                    steps: v.at_least("steps", 1, Some(100))?,
                    frame: v.frame()?,
                }
            }
            Kind::Quench | Kind::Ramp => {
                let initial = BulkParams::new(v.angle("theta1_i", None)?, v.angle("theta2_i", None)?);
                let final_params = BulkParams::new(v.angle("theta1_f", None)?, v.angle("theta2_f", None)?);
                let n0 = v.at_least("n0", 1, Some(20))?;
                let nq = if kind == Kind::Ramp { v.at_least("nq", 1, None)? } else { 1 };
                let after = v.at_least("after", 1, Some(80))?;
                let kick = match v.raw("kick") {
                    None | Some("none") => None,
                    Some(_) => Some(v.number("kick", None)?),
                };
                let mut protocol = fockwalk::quench::QuenchProtocol::ramp(initial, final_params, n0, nq, after);
                protocol.phi_initial = v.phase("phi_i")?;
                protocol.phi_final = v.phase("phi_f")?;
                protocol.kick = kick;
                protocol.frame = v.frame()?;
                Experiment::Quench { protocol }
            }
            Kind::Eigen => Experiment::Eigen {
                params: BulkParams::new(v.angle("theta1", None)?, v.angle("theta2", None)?),
                phi: v.phase("phi")?,
                n_max: v.at_least("n_max", 32, Some(64))?,
                mode: v.choice("mode", &[("zero", ModeChoice::Zero), ("pi", ModeChoice::Pi)], ModeChoice::Zero)?,
                frame: v.frame()?,
            },
            Kind::PulseVerify => Experiment::PulseVerify {
                params: BulkParams::new(v.angle("theta1", None)?, v.angle("theta2", None)?),
                phi: v.phase("phi")?,
                n_max: v.at_least("n_max", 2, Some(10))?,
                pulse: PulseConfig {
                    omega0: v.positive("omega0", Some(1.0))?,
                    delta0: v.positive("delta0", Some(1.0))?,
                    tau: v.positive("tau", Some(100.0))?,
                    integrator_step: v.positive("integrator_step", Some(1e-3))?,
                },
            },
            Kind::PhaseDiagram => {
                let lo = v.angle("lo", Some(-2.0 * std::f64::consts::PI))?;
                let hi = v.angle("hi", Some(2.0 * std::f64::consts::PI))?;
                if hi <= lo {
                    return Err(ConfigError::BadValue {
                        key: "hi".into(),
                        reason: format!("must exceed lo = {lo}"),
                    });
                }
                Experiment::PhaseDiagram {
                    grid: v.at_least("grid", 1, Some(64))?,
                    lo,
                    hi,
                    transition_tol: v.positive("transition_tol", Some(fockwalk::momentum::GAP_TOL))?,
                }
            }
        };
        Ok(Self {
            kind,
            experiment,
            out: v.raw("out").map(PathBuf::from),
            json: v.raw("json").map(PathBuf::from),
            threads,
        })
    }
}
