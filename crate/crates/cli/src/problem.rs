//! Turns the `problem`, `initial` and `outputs` sections into core objects.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};

use setprop_core::analysis::{analytic_heat_rod, BarParams, VertexSampler};
use setprop_core::matrix::{csr_from_triplets, LinearOperator};
use setprop_core::model::{
    assemble_bar_1d, assemble_heat_1d, load_system, InputModel, InputTerm, SecondOrderSystem,
    SystemKind,
};
use setprop_core::sets::{Hyperrectangle, SetExpression};

use crate::config::{InitialSpec, OutputSpec, ProblemSpec, SamplingMode, SamplingSpec, StateValues};
use crate::error::CliError;

pub const BUILTINS: [&str; 3] = ["oscillator", "clamped_bar", "heat_rod"];

/// Largest number of box vertices enumerated by `extremes` sampling.
const MAX_EXTREMES: usize = 1 << 12;

#[derive(Debug, Clone)]
pub enum InitialSet {
    Point(DVector<f64>),
    Box(Hyperrectangle),
    Segment {
        profile: DVector<f64>,
        lo: f64,
        hi: f64,
    },
}

impl InitialSet {
    pub fn to_set(&self) -> Result<SetExpression, CliError> {
        Ok(match self {
            InitialSet::Point(x) => SetExpression::singleton(x.clone()),
            InitialSet::Box(h) => h.clone().into(),
            InitialSet::Segment { profile, lo, hi } => {
                let shape = LinearOperator::Dense(DMatrix::from_column_slice(
                    profile.len(),
                    1,
                    profile.as_slice(),
                ));
                let s = Hyperrectangle::from_slices(&[0.5 * (lo + hi)], &[0.5 * (hi - lo)])?;
                SetExpression::linear_map(shape, &s.into())?
            }
        })
    }

    /// Initial states handed to the point integrators.
    pub fn samples(&self, spec: &SamplingSpec, seed: u64) -> Result<Vec<DVector<f64>>, CliError> {
        match (self, spec.mode) {
            (InitialSet::Point(x), _) => Ok(vec![x.clone()]),
            (InitialSet::Segment { profile, lo, hi }, SamplingMode::Extremes) => {
                Ok(vec![profile * *lo, profile * *hi])
            }
            (InitialSet::Segment { .. }, SamplingMode::Vertices) => Err(CliError::Config(
                "vertex sampling needs a box initial set".into(),
            )),
            (InitialSet::Box(h), SamplingMode::Extremes) => {
                let active: Vec<usize> = (0..h.dim()).filter(|&i| h.radius()[i] > 0.0).collect();
                if active.len() > 12 || (1usize << active.len()) > MAX_EXTREMES {
                    return Err(CliError::Config(format!(
                        "initial box has {} uncertain coordinates; use 'mode: vertices' with a count",
                        active.len()
                    )));
                }
                Ok((0..1usize << active.len())
                    .map(|mask| {
                        let mut x = h.center().clone();
                        for (bit, &i) in active.iter().enumerate() {
                            let s = if mask >> bit & 1 == 1 { 1.0 } else { -1.0 };
                            x[i] += s * h.radius()[i];
                        }
                        x
                    })
                    .collect())
            }
            (InitialSet::Box(h), SamplingMode::Vertices) => {
                let count = spec.count.unwrap_or(0);
                Ok(VertexSampler::new(h, seed).take(count).collect())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Output {
    pub id: String,
    /// Direction over the state of the second-order system.
    pub direction: DVector<f64>,
    /// Set when the direction is a unit coordinate vector.
    pub index: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub label: String,
    pub system: SecondOrderSystem,
    pub inputs: Vec<InputTerm>,
    pub initial: InitialSet,
    /// Absolute path of the system file, when there is one.
    pub system_path: Option<PathBuf>,
}

impl Problem {
    pub fn state_dim(&self) -> usize {
        self.system.state_dim()
    }
}

struct Params {
    name: &'static str,
    given: BTreeMap<String, f64>,
}

impl Params {
    fn new(name: &'static str, given: &BTreeMap<String, f64>, known: &[&str]) -> Result<Self, CliError> {
        if let Some(k) = given.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(CliError::Config(format!(
                "{name} has no parameter '{k}' (known: {})",
                known.join(", ")
            )));
        }
        Ok(Params {
            name,
            given: given.clone(),
        })
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        self.given.get(key).copied().unwrap_or(default)
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.given.get(key) {
            None => Ok(default),
            Some(&v) if v >= 1.0 && v.fract() == 0.0 => Ok(v as usize),
            Some(v) => Err(CliError::Config(format!(
                "{}: '{key}' must be a positive integer, got {v}",
                self.name
            ))),
        }
    }
}

fn input_err(e: setprop_core::error::Error) -> CliError {
    CliError::from_input(e, "problem")
}

/// Nodal values of `sin πx + ½ sin 3πx` at the interior nodes of a unit rod.
pub fn heat_rod_profile(elements: usize) -> DVector<f64> {
    DVector::from_fn(elements - 1, |i, _| {
        analytic_heat_rod(0.0, (i + 1) as f64 / elements as f64, 0.0)
    })
}

fn builtin(spec: &ProblemSpec, name: &str) -> Result<(SecondOrderSystem, Vec<InputTerm>, InitialSet), CliError> {
    match name {
        "oscillator" => {
            let p = Params::new("oscillator", &spec.params, &["omega"])?;
            let w = p.get("omega", 4.0 * std::f64::consts::PI);
            let sys = SecondOrderSystem::dynamics(
                csr_from_triplets(1, 1, &[(0, 0, 1.0)]).map_err(input_err)?,
                csr_from_triplets(1, 1, &[]).map_err(input_err)?,
                csr_from_triplets(1, 1, &[(0, 0, w * w)]).map_err(input_err)?,
            )
            .map_err(input_err)?;
            let x0 = Hyperrectangle::from_slices(&[1.0, 0.0], &[0.1, 0.1]).map_err(input_err)?;
            Ok((sys, Vec::new(), InitialSet::Box(x0)))
        }
        "clamped_bar" => {
            let keys = ["elements", "young", "area", "density", "length", "force"];
            let p = Params::new("clamped_bar", &spec.params, &keys)?;
            let r = BarParams::reference();
            let n = p.count("elements", 200)?;
            let sys = assemble_bar_1d(
                p.get("young", r.young),
                p.get("area", r.area),
                p.get("density", r.density),
                p.get("length", r.length),
                n,
            )
            .map_err(input_err)?;
            let mut f0 = DVector::zeros(n);
            f0[n - 1] = 1.0;
            let load = InputTerm::new(f0, InputModel::constant(p.get("force", r.force))).map_err(input_err)?;
            Ok((sys, vec![load], InitialSet::Point(DVector::zeros(2 * n))))
        }
        "heat_rod" => {
            let keys = ["elements", "conductivity", "density", "specific_heat", "length"];
            let p = Params::new("heat_rod", &spec.params, &keys)?;
            let n = p.count("elements", 100)?;
            let sys = assemble_heat_1d(
                p.get("conductivity", 1.0),
                p.get("density", 1.0),
                p.get("specific_heat", 1.0),
                p.get("length", 1.0),
                n,
                true,
            )
            .map_err(input_err)?;
            let x0 = InitialSet::Segment {
                profile: heat_rod_profile(n),
                lo: 0.9,
                hi: 1.1,
            };
            Ok((sys, Vec::new(), x0))
        }
        other => Err(CliError::Config(format!(
            "unknown builtin problem '{other}' (expected one of {})",
            BUILTINS.join(", ")
        ))),
    }
}

fn expand(v: &StateValues, sys: &SecondOrderSystem, what: &str) -> Result<DVector<f64>, CliError> {
    let m = sys.state_dim();
    match v {
        StateValues::Scalar(x) => Ok(DVector::from_element(m, *x)),
        StateValues::List(xs) if xs.len() == m => Ok(DVector::from_column_slice(xs)),
        StateValues::List(xs) => Err(CliError::Config(format!(
            "initial {what} has {} values, the state has {m}",
            xs.len()
        ))),
        StateValues::Fields {
            displacement,
            velocity,
        } => {
            if sys.kind() != SystemKind::Dynamics {
                return Err(CliError::Config(format!(
                    "initial {what}: displacement/velocity fields need a dynamics system"
                )));
            }
            let n = sys.dofs();
            Ok(DVector::from_fn(m, |i, _| if i < n { *displacement } else { *velocity }))
        }
    }
}

fn initial_set(spec: &InitialSpec, sys: &SecondOrderSystem, builtin_default: &InitialSet) -> Result<InitialSet, CliError> {
    match spec {
        InitialSpec::Point(v) => Ok(InitialSet::Point(expand(v, sys, "point")?)),
        InitialSpec::Box { center, radius } => {
            let c = expand(center, sys, "center")?;
            let r = expand(radius, sys, "radius")?;
            Ok(InitialSet::Box(Hyperrectangle::new(c, r).map_err(|e| {
                CliError::Config(format!("initial box: {e}"))
            })?))
        }
        InitialSpec::Segment { profile, scale } => {
            let profile = match (profile, builtin_default) {
                (Some(p), _) => DVector::from_column_slice(p),
                (None, InitialSet::Segment { profile, .. }) => profile.clone(),
                (None, _) => {
                    return Err(CliError::Config(
                        "segment initial set needs a profile for this problem".into(),
                    ))
                }
            };
            if profile.len() != sys.state_dim() {
                return Err(CliError::Config(format!(
                    "segment profile has {} values, the state has {}",
                    profile.len(),
                    sys.state_dim()
                )));
            }
            if !(scale[0] <= scale[1]) || !scale.iter().all(|s| s.is_finite()) {
                return Err(CliError::Config(format!(
                    "segment scale must be an ordered pair, got {scale:?}"
                )));
            }
            Ok(InitialSet::Segment {
                profile,
                lo: scale[0],
                hi: scale[1],
            })
        }
    }
}

pub fn build_problem(
    spec: &ProblemSpec,
    initial: Option<&InitialSpec>,
    base_dir: &Path,
) -> Result<Problem, CliError> {
    let (label, system, inputs, default, system_path) = if let Some(name) = &spec.builtin {
        let (sys, inputs, x0) = builtin(spec, name)?;
        (name.clone(), sys, inputs, x0, None)
    } else {
        let rel = spec.system.as_ref().expect("checked by resolve");
        if !spec.params.is_empty() {
            return Err(CliError::Config("params apply to builtin problems only".into()));
        }
        let path = base_dir.join(rel);
        let origin = path.display().to_string();
        let file = load_system(&path).map_err(|e| CliError::from_input(e, &origin))?;
        let abs = std::fs::canonicalize(&path).unwrap_or(path);
        let n = file.system.state_dim();
        let label = rel.file_stem().map_or("system".into(), |s| s.to_string_lossy().into_owned());
        (label, file.system, file.inputs, InitialSet::Point(DVector::zeros(n)), Some(abs))
    };
    let initial = match initial {
        Some(spec) => initial_set(spec, &system, &default)?,
        None => default,
    };
    Ok(Problem {
        label,
        system,
        inputs,
        initial,
        system_path,
    })
}

pub fn build_outputs(specs: &[OutputSpec], sys: &SecondOrderSystem) -> Result<Vec<Output>, CliError> {
    let m = sys.state_dim();
    let n = sys.dofs();
    let unit = |i: usize| {
        let mut d = DVector::zeros(m);
        d[i] = 1.0;
        d
    };
    let mut out: Vec<Output> = Vec::with_capacity(specs.len());
    for (j, o) in specs.iter().enumerate() {
        let (default_id, direction, index) = if let Some(i) = o.index {
            if i >= m {
                return Err(CliError::Config(format!("output {j}: index {i} is outside the state (size {m})")));
            }
            (format!("x{i}"), unit(i), Some(i))
        } else if let Some(node) = o.node {
            if node >= n {
                return Err(CliError::Config(format!("output {j}: node {node} is outside the {n} degrees of freedom")));
            }
            let field = o.field.as_deref().unwrap_or(match sys.kind() {
                SystemKind::Heat => "temperature",
                SystemKind::Dynamics => "displacement",
            });
            let (prefix, i) = match (sys.kind(), field) {
                (SystemKind::Heat, "temperature") => ("T", node),
                (SystemKind::Dynamics, "displacement") => ("u", node),
                (SystemKind::Dynamics, "velocity") => ("v", n + node),
                (kind, f) => {
                    return Err(CliError::Config(format!(
                        "output {j}: a {} system has no field '{f}'",
                        kind.name()
                    )))
                }
            };
            (format!("{prefix}{node}"), unit(i), Some(i))
        } else {
            let d = o.direction.as_ref().expect("checked by resolve");
            if d.len() != m {
                return Err(CliError::Config(format!(
                    "output {j}: direction has {} entries, the state has {m}",
                    d.len()
                )));
            }
            if d.iter().all(|x| *x == 0.0) || d.iter().any(|x| !x.is_finite()) {
                return Err(CliError::Config(format!("output {j}: direction must be finite and nonzero")));
            }
            (format!("d{j}"), DVector::from_column_slice(d), None)
        };
        let id = o.name.clone().unwrap_or(default_id);
        if id.is_empty() || id.contains(|c: char| c == ',' || c == '/' || c.is_whitespace()) {
            return Err(CliError::Config(format!("output {j}: id '{id}' must be nonempty without commas, slashes or spaces")));
        }
        if out.iter().any(|p| p.id == id) {
            return Err(CliError::Config(format!("output id '{id}' is used twice")));
        }
        out.push(Output { id, direction, index });
    }
    Ok(out)
}
