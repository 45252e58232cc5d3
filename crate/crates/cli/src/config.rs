//! Run configuration: a YAML file, optionally overridden from the command line.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Method {
    SetpropBox,
    SetpropZono,
    SetpropSupport,
    BackwardEuler,
    Newmark,
    Bathe,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::SetpropBox,
        Method::SetpropZono,
        Method::SetpropSupport,
        Method::BackwardEuler,
        Method::Newmark,
        Method::Bathe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::SetpropBox => "setprop_box",
            Method::SetpropZono => "setprop_zono",
            Method::SetpropSupport => "setprop_support",
            Method::BackwardEuler => "backward_euler",
            Method::Newmark => "newmark",
            Method::Bathe => "bathe",
        }
    }

    pub fn is_setprop(self) -> bool {
        matches!(
            self,
            Method::SetpropBox | Method::SetpropZono | Method::SetpropSupport
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
                CliError::Usage(format!(
                    "unknown method '{s}' (expected one of {})",
                    known.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    /// System file, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<PathBuf>,
    /// Builtin parameters (`omega`, `elements`, `young`, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

/// A scalar broadcast over the state, an explicit vector, or per-field
/// values for dynamics states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateValues {
    Scalar(f64),
    List(Vec<f64>),
    Fields { displacement: f64, velocity: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Point(StateValues),
    Box {
        center: StateValues,
        radius: StateValues,
    },
    /// `{s g : s ∈ [lo, hi]}` for a profile `g`; the builtin heat rod has
    /// a default profile.
    Segment {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        profile: Option<Vec<f64>>,
        scale: [f64; 2],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    /// Degree of freedom, read as displacement (or temperature) unless
    /// `field: velocity`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FirstStep {
    /// Lazy first-step set; support directions see the exact intersection.
    #[default]
    Lazy,
    /// Start from its box enclosure.
    Box,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Vertices of the initial box (all of them), the two ends of a segment,
    /// or the point itself.
    #[default]
    Extremes,
    /// `count` random vertices of the initial box.
    Vertices,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    #[serde(default)]
    pub mode: SamplingMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Write one trajectory CSV per sample; the envelope CSV is always
    /// written when there is more than one.
    #[serde(default = "yes")]
    pub write_trajectories: bool,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            mode: SamplingMode::Extremes,
            count: None,
            write_trajectories: true,
        }
    }
}

fn yes() -> bool {
    true
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    /// Kept as text so an unknown name is reported as a usage error.
    pub method: String,
    /// Integrators run alongside the main method and overlaid on its plots.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compare: Vec<String>,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    pub outputs: Vec<OutputSpec>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "serde_yaml::with::singleton_map"
    )]
    pub initial: Option<InitialSpec>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub first_step: FirstStep,
    #[serde(default, skip_serializing_if = "is_default")]
    pub sampling: SamplingSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "yes")]
    pub plot: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Written by `run` into manifests; ignored when read back.
    #[serde(default, skip_serializing)]
    pub report: Option<serde_yaml::Value>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub delta: Option<f64>,
    pub steps: Option<usize>,
    pub method: Option<Method>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// A config whose numeric fields have been checked.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub method: Method,
    pub compare: Vec<Method>,
    pub steps: usize,
    /// Directory that relative paths in the config are read against.
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn parse(text: &str, origin: &str) -> Result<RunConfig, CliError> {
        serde_yaml::from_str(text).map_err(|e| {
            let at = e
                .location()
                .map(|l| format!("{origin}:{}:{}", l.line(), l.column()))
                .unwrap_or_else(|| origin.to_string());
            CliError::Config(format!("{at}: {e}"))
        })
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        RunConfig::parse(&text, &path.display().to_string())
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(d) = o.delta {
            self.delta = d;
            // A horizon stays authoritative only when steps are not given.
            if o.steps.is_none() && self.steps.is_some() {
                self.horizon = None;
            }
        }
        if let Some(n) = o.steps {
            self.steps = Some(n);
            self.horizon = None;
        }
        if let Some(m) = o.method {
            self.method = m.name().to_string();
        }
        if let Some(dir) = &o.out_dir {
            self.out_dir = Some(dir.clone());
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
    }

    pub fn resolve(self, base_dir: &Path) -> Result<Resolved, CliError> {
        let method: Method = self.method.parse()?;
        let compare = self
            .compare
            .iter()
            .map(|m| m.parse())
            .collect::<Result<Vec<Method>, _>>()?;
        if let Some(m) = compare.iter().find(|m| m.is_setprop()) {
            return Err(CliError::Config(format!(
                "compare lists integrators only, found {m}"
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(CliError::Config(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        let steps = match (self.steps, self.horizon) {
            (None, None) => {
                return Err(CliError::Config("give steps or horizon".into()));
            }
            (Some(n), None) => n,
            (n, Some(h)) => {
                if !(h > 0.0 && h.is_finite()) {
                    return Err(CliError::Config(format!("horizon must be positive, got {h}")));
                }
                let k = (h / self.delta).round();
                if (k * self.delta - h).abs() > 1e-9 * h {
                    return Err(CliError::Config(format!(
                        "horizon {h} is not a whole number of steps of {}",
                        self.delta
                    )));
                }
                let k = k as usize;
                if n.is_some_and(|n| n != k) {
                    return Err(CliError::Config(format!(
                        "steps {} disagree with horizon {h} / delta {} = {k}",
                        n.unwrap(),
                        self.delta
                    )));
                }
                k
            }
        };
        if steps == 0 {
            return Err(CliError::Config("steps must be at least 1".into()));
        }
        match (&self.problem.builtin, &self.problem.system) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => {
                return Err(CliError::Config(
                    "problem needs exactly one of 'builtin' and 'system'".into(),
                ))
            }
        }
        if self.outputs.is_empty() {
            return Err(CliError::Config("at least one output is required".into()));
        }
        for (j, o) in self.outputs.iter().enumerate() {
            let given = o.index.is_some() as u8 + o.direction.is_some() as u8 + o.node.is_some() as u8;
            if given != 1 {
                return Err(CliError::Config(format!(
                    "output {j} needs exactly one of 'index', 'direction' and 'node'"
                )));
            }
            if o.field.is_some() && o.node.is_none() {
                return Err(CliError::Config(format!("output {j}: 'field' goes with 'node'")));
            }
        }
        if self.sampling.mode == SamplingMode::Vertices && self.sampling.count.is_none() {
            return Err(CliError::Config("vertex sampling needs a count".into()));
        }
        Ok(Resolved {
            config: self,
            method,
            compare,
            steps,
            base_dir: base_dir.to_path_buf(),
        })
    }
}
