//! The pipeline behind `run`: homogenize, discretize, propagate, write.

use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use setprop_core::analysis::{flowpipe_envelope_metrics, EnvelopeBuilder};
use setprop_core::discretize::{discretize, DiscretizationMode};
use setprop_core::error::Error as CoreError;
use setprop_core::integrators::{backward_euler_observe, bathe_observe, newmark_observe, StepState};
use setprop_core::model::{homogenize, nominal_forcing, SystemKind};
use setprop_core::propagate::{
    flowpipe_bounds, propagate_box, propagate_support, propagate_zonotope, Bound, Flowpipe, Query,
};

use crate::config::{FirstStep, Method, Resolved, RunConfig};
use crate::error::CliError;
use crate::output::{
    write_envelope_csv, write_flowpipe_csv, write_plot, write_trajectory_csv, Series, LINE_COLORS,
};
use crate::problem::{build_outputs, build_problem, Output, Problem};

/// Trajectories beyond this count are plotted through their envelope only.
const MAX_PLOTTED: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputReport {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_width: Option<f64>,
    pub l1: f64,
    pub linf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorReport {
    pub method: String,
    pub samples: usize,
    pub outputs: Vec<OutputReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub problem: String,
    pub state_dim: usize,
    pub augmented_dim: usize,
    pub method: String,
    pub steps: usize,
    pub horizon: f64,
    pub wall_time_s: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<OutputReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub integrators: Vec<IntegratorReport>,
    pub files: Vec<String>,
}

/// The config as run, followed by what the run produced. Feeding it back to
/// `run` repeats the computation.
#[derive(Serialize)]
struct Manifest<'a> {
    #[serde(flatten)]
    config: &'a RunConfig,
    report: &'a Report,
}

struct IntegratorRun {
    method: Method,
    times: Vec<f64>,
    samples: usize,
    /// `kept[j][o][k]` for the first trajectories only.
    kept: Vec<Vec<Vec<f64>>>,
    lower: Vec<Vec<f64>>,
    upper: Vec<Vec<f64>>,
    report: IntegratorReport,
}

fn check_finite(bounds: &[Bound], context: &'static str) -> Result<(), CliError> {
    match bounds.iter().position(|b| !(b.lo.is_finite() && b.hi.is_finite())) {
        Some(k) => Err(CoreError::NonFinite {
            context,
            step: Some(k),
        }
        .into()),
        None => Ok(()),
    }
}

fn padded(d: &DVector<f64>, dim: usize) -> DVector<f64> {
    let mut out = DVector::zeros(dim);
    out.rows_mut(0, d.len()).copy_from(d);
    out
}

fn set_propagation(
    res: &Resolved,
    problem: &Problem,
    outputs: &[Output],
) -> Result<(Flowpipe, Vec<Vec<Bound>>, usize), CliError> {
    let cfg = &res.config;
    if res.method == Method::SetpropBox {
        if let Some(o) = outputs.iter().find(|o| o.index.is_none()) {
            return Err(CliError::Config(format!(
                "output '{}' is a direction; setprop_box answers coordinates only",
                o.id
            )));
        }
    }
    let x0 = problem.initial.to_set()?;
    let hs = homogenize(&problem.system, &problem.inputs, &x0)?;
    let dim = hs.dim();
    let lazy = res.method == Method::SetpropSupport && cfg.first_step == FirstStep::Lazy;
    let mode = if lazy {
        DiscretizationMode::Symbolic
    } else {
        DiscretizationMode::Box
    };
    let d = discretize(&hs, cfg.delta, res.steps, mode)?;
    let fp = match res.method {
        Method::SetpropBox => propagate_box(d.phi(), d.omega0_box().expect("box mode"), res.steps, cfg.delta)?,
        Method::SetpropZono => propagate_zonotope(
            d.phi(),
            &d.omega0_box().expect("box mode").to_zonotope(),
            res.steps,
            cfg.delta,
        )?,
        Method::SetpropSupport => {
            let dirs: Vec<DVector<f64>> = outputs.iter().map(|o| padded(&o.direction, dim)).collect();
            let start = if lazy {
                d.omega0().clone()
            } else {
                d.omega0_box().expect("box mode").clone().into()
            };
            propagate_support(d.phi(), &start, &dirs, res.steps, cfg.delta)?
        }
        _ => unreachable!("integrators are handled separately"),
    };
    let mut bounds = Vec::with_capacity(outputs.len());
    for o in outputs {
        let q = match o.index {
            Some(i) if res.method != Method::SetpropSupport => Query::Index(i),
            _ => Query::Direction(padded(&o.direction, dim)),
        };
        let b = flowpipe_bounds(&fp, &q)?;
        check_finite(&b, "flowpipe bounds")?;
        bounds.push(b);
    }
    Ok((fp, bounds, dim))
}

fn integrate(
    res: &Resolved,
    problem: &Problem,
    outputs: &[Output],
    method: Method,
    out_dir: &Path,
    files: &mut Vec<String>,
) -> Result<IntegratorRun, CliError> {
    let cfg = &res.config;
    let sys = &problem.system;
    let needed = match method {
        Method::BackwardEuler => SystemKind::Heat,
        _ => SystemKind::Dynamics,
    };
    if sys.kind() != needed {
        return Err(CliError::Config(format!(
            "{method} integrates {} systems, the problem is a {} system",
            needed.name(),
            sys.kind().name()
        )));
    }
    let n = sys.dofs();
    let starts = problem.initial.samples(&cfg.sampling, cfg.seed)?;
    if starts.is_empty() {
        return Err(CliError::Config("sampling produced no initial states".into()));
    }
    let inputs = &problem.inputs;
    let forcing = |t: f64| nominal_forcing(inputs, n, t);
    let times: Vec<f64> = (0..=res.steps).map(|k| k as f64 * cfg.delta).collect();
    let ids: Vec<String> = outputs.iter().map(|o| o.id.clone()).collect();
    let mut builders: Vec<EnvelopeBuilder> = outputs.iter().map(|_| EnvelopeBuilder::new(times.clone())).collect();
    let mut kept = Vec::new();
    let width = (starts.len() - 1).to_string().len();

    for (j, x0) in starts.iter().enumerate() {
        let mut values: Vec<Vec<f64>> = vec![Vec::with_capacity(times.len()); outputs.len()];
        let mut record = |s: StepState<'_>| {
            for (o, out) in outputs.iter().enumerate() {
                let d = &out.direction;
                let mut y = d.rows(0, n).dot(s.u);
                if let Some(v) = s.v {
                    y += d.rows(n, n).dot(v);
                }
                values[o].push(y);
            }
        };
        match method {
            Method::BackwardEuler => backward_euler_observe(sys, forcing, x0, cfg.delta, res.steps, &mut record)?,
            Method::Newmark => {
                let (u0, v0) = (x0.rows(0, n).into_owned(), x0.rows(n, n).into_owned());
                newmark_observe(sys, forcing, &u0, &v0, cfg.delta, res.steps, &mut record)?
            }
            Method::Bathe => {
                let (u0, v0) = (x0.rows(0, n).into_owned(), x0.rows(n, n).into_owned());
                bathe_observe(sys, forcing, &u0, &v0, cfg.delta, res.steps, &mut record)?
            }
            _ => unreachable!("set propagation is handled separately"),
        }
        for (b, v) in builders.iter_mut().zip(&values) {
            b.add(v)?;
        }
        if cfg.sampling.write_trajectories {
            let name = format!("{method}_trajectory_{j:0width$}.csv");
            write_trajectory_csv(&out_dir.join(&name), &times, &ids, &values)?;
            files.push(name);
        }
        if kept.len() < MAX_PLOTTED {
            kept.push(values);
        }
    }

    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut reports = Vec::new();
    for (b, id) in builders.into_iter().zip(&ids) {
        let env = b.build()?;
        let m = env.metrics();
        let peak = env
            .lower
            .iter()
            .zip(&env.upper)
            .map(|(l, u)| u - l)
            .fold(0.0, f64::max);
        reports.push(OutputReport {
            id: id.clone(),
            peak_width: (starts.len() > 1).then_some(peak),
            l1: m.l1,
            linf: m.linf,
        });
        lower.push(env.lower);
        upper.push(env.upper);
    }
    if starts.len() > 1 {
        let name = format!("{method}_envelope.csv");
        write_envelope_csv(&out_dir.join(&name), &times, &ids, &lower, &upper)?;
        files.push(name);
    }
    Ok(IntegratorRun {
        method,
        times,
        samples: starts.len(),
        kept,
        lower,
        upper,
        report: IntegratorReport {
            method: method.name().into(),
            samples: starts.len(),
            outputs: reports,
        },
    })
}

/// Runs a resolved config, writing every artifact into `out_dir`.
pub fn execute(res: &Resolved, out_dir: &Path) -> Result<Report, CliError> {
    let started = Instant::now();
    let cfg = &res.config;
    let problem = build_problem(&cfg.problem, cfg.initial.as_ref(), &res.base_dir)?;
    let outputs = build_outputs(&cfg.outputs, &problem.system)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let ids: Vec<String> = outputs.iter().map(|o| o.id.clone()).collect();
    let mut files = Vec::new();
    let mut output_reports = Vec::new();

    let mut band: Option<Vec<Vec<Bound>>> = None;
    let mut augmented_dim = problem.state_dim();
    if res.method.is_setprop() {
        let (fp, bounds, dim) = set_propagation(res, &problem, &outputs)?;
        augmented_dim = dim;
        write_flowpipe_csv(&out_dir.join("flowpipe.csv"), &ids, &bounds)?;
        files.push("flowpipe.csv".to_string());
        for ((o, b), id) in outputs.iter().zip(&bounds).zip(&ids) {
            let q = match o.index {
                Some(i) if res.method != Method::SetpropSupport => Query::Index(i),
                _ => Query::Direction(padded(&o.direction, dim)),
            };
            let m = flowpipe_envelope_metrics(&fp, &q)?;
            output_reports.push(OutputReport {
                id: id.clone(),
                peak_width: Some(b.iter().map(|x| x.hi - x.lo).fold(0.0, f64::max)),
                l1: m.l1,
                linf: m.linf,
            });
        }
        band = Some(bounds);
    }

    let mut runs = Vec::new();
    let integrators: Vec<Method> = if res.method.is_setprop() {
        res.compare.clone()
    } else {
        std::iter::once(res.method).chain(res.compare.iter().copied().filter(|m| *m != res.method)).collect()
    };
    for m in integrators {
        runs.push(integrate(res, &problem, &outputs, m, out_dir, &mut files)?);
    }

    if cfg.plot {
        for (o, id) in ids.iter().enumerate() {
            let mut series = Vec::new();
            if let Some(b) = &band {
                series.push(Series::Band(&b[o]));
            }
            for (r, run) in runs.iter().enumerate() {
                let color = LINE_COLORS[r % LINE_COLORS.len()];
                if run.samples <= MAX_PLOTTED {
                    for values in &run.kept {
                        series.push(Series::Line { times: &run.times, values: &values[o], color });
                    }
                } else {
                    series.push(Series::Line { times: &run.times, values: &run.lower[o], color });
                    series.push(Series::Line { times: &run.times, values: &run.upper[o], color });
                }
            }
            let name = format!("plot_{id}.svg");
            let methods: Vec<&str> = band
                .as_ref()
                .map(|_| res.method.name())
                .into_iter()
                .chain(runs.iter().map(|r| r.method.name()))
                .collect();
            write_plot(&out_dir.join(&name), &format!("{} {id}: {}", problem.label, methods.join(", ")), &series)?;
            files.push(name);
        }
    }

    let report = Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        problem: problem.label.clone(),
        state_dim: problem.state_dim(),
        augmented_dim,
        method: res.method.name().into(),
        steps: res.steps,
        horizon: res.steps as f64 * cfg.delta,
        wall_time_s: started.elapsed().as_secs_f64(),
        outputs: if res.method.is_setprop() {
            output_reports
        } else {
            runs[0].report.outputs.clone()
        },
        integrators: runs.iter().map(|r| r.report.clone()).collect(),
        files,
    };
    write_manifest(res, &problem, out_dir, &report)?;
    Ok(report)
}

fn write_manifest(res: &Resolved, problem: &Problem, out_dir: &Path, report: &Report) -> Result<(), CliError> {
    let mut cfg = res.config.clone();
    cfg.steps = Some(res.steps);
    cfg.horizon = None;
    cfg.method = res.method.name().into();
    cfg.out_dir = Some(absolute(out_dir));
    if let Some(p) = &problem.system_path {
        cfg.problem.system = Some(p.clone());
    }
    let text = serde_yaml::to_string(&Manifest { config: &cfg, report })
        .map_err(|e| CliError::Io(format!("manifest: {e}")))?;
    let path = out_dir.join("manifest.yaml");
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn absolute(p: &Path) -> PathBuf {
    std::fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf())
}
