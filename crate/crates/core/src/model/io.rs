//! Text format for externally assembled systems.
//!
//! ```text
//! kind: dynamics            # or heat
//! n: 3
//! matrix K                  # 1-based "row col value" triplets follow
//! 1 1 2.0
//! matrix M
//! 1 1 1.0
//! input
//! f0: 0 0 1
//! model: sinusoid 6.28 -1 0 # or: constant c | exponential alpha x0
//! ```
//! Every scalar of a `model:` line may be replaced by a `lo hi` pair; the
//! whole line must then use pairs.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;
use nalgebra_sparse::CsrMatrix;

use super::input::{InputModel, InputTerm};
use super::system::{SecondOrderSystem, SystemKind};
use crate::error::{Error, Result};
use crate::matrix::csr_from_triplets;
use crate::sets::Interval;

/// A system read from disk together with its forcing terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemFile {
    pub system: SecondOrderSystem,
    pub inputs: Vec<InputTerm>,
}

pub fn load_system(path: impl AsRef<Path>) -> Result<SystemFile> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_system(&text)
}

pub fn save_system(
    path: impl AsRef<Path>,
    system: &SecondOrderSystem,
    inputs: &[InputTerm],
) -> Result<()> {
    std::fs::write(path.as_ref(), format_system(system, inputs))
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn num(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| perr(line, format!("expected a number, found '{tok}'")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(perr(line, format!("non-finite number '{tok}'")))
    }
}

enum Section {
    Header,
    Matrix(char),
    Input,
}

#[derive(Default)]
struct PendingInput {
    line: usize,
    f0: Option<DVector<f64>>,
    model: Option<InputModel>,
}

pub fn parse_system(text: &str) -> Result<SystemFile> {
    let mut kind = None;
    let mut n: Option<usize> = None;
    let mut triplets: [Vec<(usize, usize, f64)>; 3] = Default::default();
    let mut seen = [false; 3];
    let mut inputs: Vec<PendingInput> = Vec::new();
    let mut section = Section::Header;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("matrix") {
            let name = rest.trim();
            let slot = match name {
                "K" => 0,
                "C" => 1,
                "M" => 2,
                _ => return Err(perr(line, format!("unknown matrix '{name}'"))),
            };
            if kind.is_none() || n.is_none() {
                return Err(perr(line, "'kind:' and 'n:' must precede matrix blocks"));
            }
            if seen[slot] {
                return Err(perr(line, format!("matrix {name} given twice")));
            }
            if slot == 2 && kind == Some(SystemKind::Heat) {
                return Err(perr(line, "heat systems have no mass matrix"));
            }
            seen[slot] = true;
            section = Section::Matrix(name.chars().next().unwrap());
            continue;
        }
        if content == "input" {
            if n.is_none() {
                return Err(perr(line, "'n:' must precede input blocks"));
            }
            inputs.push(PendingInput {
                line,
                ..Default::default()
            });
            section = Section::Input;
            continue;
        }
        match section {
            Section::Header => {
                let (key, value) = content
                    .split_once(':')
                    .ok_or_else(|| perr(line, format!("expected 'key: value', found '{content}'")))?;
                match key.trim() {
                    "kind" => {
                        kind = Some(match value.trim() {
                            "heat" => SystemKind::Heat,
                            "dynamics" => SystemKind::Dynamics,
                            other => return Err(perr(line, format!("unknown kind '{other}'"))),
                        })
                    }
                    "n" => {
                        let v: usize = value
                            .trim()
                            .parse()
                            .map_err(|_| perr(line, format!("invalid size '{}'", value.trim())))?;
                        if v == 0 {
                            return Err(perr(line, "n must be positive"));
                        }
                        n = Some(v);
                    }
                    other => return Err(perr(line, format!("unknown header key '{other}'"))),
                }
            }
            Section::Matrix(name) => {
                let nn = n.expect("checked when the block opened");
                let toks: Vec<&str> = content.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(perr(line, "expected 'row col value'"));
                }
                let idx = |s: &str| -> Result<usize> {
                    let v: usize = s
                        .parse()
                        .map_err(|_| perr(line, format!("invalid index '{s}'")))?;
                    if v == 0 || v > nn {
                        return Err(Error::DimensionMismatch {
                            context: "matrix entry index",
                            expected: nn,
                            found: v,
                        });
                    }
                    Ok(v - 1)
                };
                let (i, j, v) = (idx(toks[0])?, idx(toks[1])?, num(toks[2], line)?);
                let slot = match name {
                    'K' => 0,
                    'C' => 1,
                    _ => 2,
                };
                triplets[slot].push((i, j, v));
            }
            Section::Input => {
                let cur = inputs.last_mut().expect("input block open");
                let (key, value) = content
                    .split_once(':')
                    .ok_or_else(|| perr(line, format!("expected 'key: value', found '{content}'")))?;
                match key.trim() {
                    "f0" => {
                        let vals = value
                            .split_whitespace()
                            .map(|t| num(t, line))
                            .collect::<Result<Vec<_>>>()?;
                        let nn = n.expect("checked when the block opened");
                        if vals.len() != nn {
                            return Err(Error::DimensionMismatch {
                                context: "load vector",
                                expected: nn,
                                found: vals.len(),
                            });
                        }
                        cur.f0 = Some(DVector::from_vec(vals));
                    }
                    "model" => cur.model = Some(parse_model(value, line)?),
                    other => return Err(perr(line, format!("unknown input key '{other}'"))),
                }
            }
        }
    }

    let kind = kind.ok_or_else(|| perr(0, "missing 'kind:'"))?;
    let n = n.ok_or_else(|| perr(0, "missing 'n:'"))?;
    let build = |slot: usize| csr_from_triplets(n, n, &triplets[slot]);
    if !seen[0] {
        return Err(perr(0, "missing matrix K"));
    }
    let system = match kind {
        SystemKind::Heat => {
            if !seen[1] {
                return Err(perr(0, "heat systems need matrix C"));
            }
            SecondOrderSystem::heat(build(1)?, build(0)?)?
        }
        SystemKind::Dynamics => {
            if !seen[2] {
                return Err(perr(0, "dynamics systems need matrix M"));
            }
            SecondOrderSystem::dynamics(build(2)?, build(1)?, build(0)?)?
        }
    };
    let inputs = inputs
        .into_iter()
        .map(|p| {
            let f0 = p.f0.ok_or_else(|| perr(p.line, "input block without 'f0:'"))?;
            let model = p.model.ok_or_else(|| perr(p.line, "input block without 'model:'"))?;
            InputTerm::new(f0, model)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SystemFile { system, inputs })
}

fn parse_model(value: &str, line: usize) -> Result<InputModel> {
    let toks: Vec<&str> = value.split_whitespace().collect();
    let (name, rest) = toks
        .split_first()
        .ok_or_else(|| perr(line, "empty model"))?;
    let vals = rest
        .iter()
        .map(|t| num(t, line))
        .collect::<Result<Vec<_>>>()?;
    let iv = |lo: f64, hi: f64| {
        Interval::new(lo, hi).map_err(|e| perr(line, e.to_string()))
    };
    // Scalars or lo/hi pairs, never mixed.
    let intervals = |v: &[f64], count: usize| -> Result<Vec<Interval>> {
        if v.len() == count {
            Ok(v.iter().map(|x| Interval::point(*x)).collect())
        } else if v.len() == 2 * count {
            v.chunks(2).map(|c| iv(c[0], c[1])).collect()
        } else {
            Err(perr(
                line,
                format!("expected {count} values or {count} lo/hi pairs, found {}", v.len()),
            ))
        }
    };
    match *name {
        "constant" => Ok(InputModel::Constant {
            value: intervals(&vals, 1)?[0],
        }),
        "exponential" => {
            let (rate, rest) = vals
                .split_first()
                .ok_or_else(|| perr(line, "exponential needs a rate"))?;
            Ok(InputModel::Exponential {
                rate: *rate,
                initial: intervals(rest, 1)?[0],
            })
        }
        "sinusoid" => {
            let (omega, rest) = vals
                .split_first()
                .ok_or_else(|| perr(line, "sinusoid needs a frequency"))?;
            if !(*omega > 0.0) {
                return Err(perr(line, "sinusoid frequency must be positive"));
            }
            let iv = intervals(rest, 2)?;
            Ok(InputModel::Sinusoid {
                omega: *omega,
                value: iv[0],
                derivative: iv[1],
            })
        }
        other => Err(perr(line, format!("unknown input model '{other}'"))),
    }
}

fn format_interval(s: &mut String, i: &Interval) {
    if i.lo() == i.hi() {
        write!(s, " {:e}", i.lo()).unwrap();
    } else {
        write!(s, " {:e} {:e}", i.lo(), i.hi()).unwrap();
    }
}

pub fn format_system(system: &SecondOrderSystem, inputs: &[InputTerm]) -> String {
    let mut s = String::new();
    writeln!(s, "kind: {}", system.kind().name()).unwrap();
    writeln!(s, "n: {}", system.dofs()).unwrap();
    let mut block = |name: &str, m: &CsrMatrix<f64>| {
        writeln!(s, "matrix {name}").unwrap();
        for (i, j, v) in m.triplet_iter() {
            writeln!(s, "{} {} {:e}", i + 1, j + 1, v).unwrap();
        }
    };
    block("K", system.stiffness());
    block("C", system.damping());
    if let Some(m) = system.mass() {
        block("M", m);
    }
    for term in inputs {
        s.push_str("input\nf0:");
        for v in term.f0().iter() {
            write!(s, " {v:e}").unwrap();
        }
        s.push_str("\nmodel: ");
        let iv = term.model().initial_intervals();
        let pairs = iv.iter().any(|i| i.lo() != i.hi());
        let push = |s: &mut String, i: &Interval| {
            if pairs {
                write!(s, " {:e} {:e}", i.lo(), i.hi()).unwrap();
            } else {
                format_interval(s, i);
            }
        };
        match term.model() {
            InputModel::Constant { value } => {
                s.push_str("constant");
                push(&mut s, value);
            }
            InputModel::Exponential { rate, initial } => {
                write!(s, "exponential {rate:e}").unwrap();
                push(&mut s, initial);
            }
            InputModel::Sinusoid {
                omega,
                value,
                derivative,
            } => {
                write!(s, "sinusoid {omega:e}").unwrap();
                push(&mut s, value);
                push(&mut s, derivative);
            }
        }
        s.push('\n');
    }
    s
}
