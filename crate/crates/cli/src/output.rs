//! CSV and SVG artifacts.

use std::fmt::Write as _;
use std::path::Path;

use setprop_core::propagate::Bound;

use crate::error::CliError;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rows `k, t_lo, t_hi, output_id, lo, hi`, time-major.
pub fn write_flowpipe_csv(path: &Path, ids: &[String], bounds: &[Vec<Bound>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "t_lo", "t_hi", "output_id", "lo", "hi"])?;
    let steps = bounds.first().map_or(0, Vec::len);
    for k in 0..steps {
        for (id, b) in ids.iter().zip(bounds) {
            let b = &b[k];
            w.write_record([k.to_string(), num(b.t_lo), num(b.t_hi), id.clone(), num(b.lo), num(b.hi)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Rows `k, t, output_id, value`; `values[o][k]`.
pub fn write_trajectory_csv(path: &Path, times: &[f64], ids: &[String], values: &[Vec<f64>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "t", "output_id", "value"])?;
    for (k, t) in times.iter().enumerate() {
        for (id, v) in ids.iter().zip(values) {
            w.write_record([k.to_string(), num(*t), id.clone(), num(v[k])])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Rows `k, t, output_id, lo, hi` of a sampled envelope.
pub fn write_envelope_csv(
    path: &Path,
    times: &[f64],
    ids: &[String],
    lower: &[Vec<f64>],
    upper: &[Vec<f64>],
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "t", "output_id", "lo", "hi"])?;
    for (k, t) in times.iter().enumerate() {
        for (o, id) in ids.iter().enumerate() {
            w.write_record([k.to_string(), num(*t), id.clone(), num(lower[o][k]), num(upper[o][k])])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One plotted series: a band from a flowpipe or a line from a trajectory.
pub enum Series<'a> {
    Band(&'a [Bound]),
    Line { times: &'a [f64], values: &'a [f64], color: &'static str },
}

const W: f64 = 800.0;
const H: f64 = 420.0;
const MARGIN: f64 = 80.0;
/// Bands and lines are thinned to about this many segments.
const MAX_POINTS: usize = 2000;

pub const LINE_COLORS: [&str; 4] = ["#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

struct Frame {
    t0: f64,
    t1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn x(&self, t: f64) -> f64 {
        MARGIN + (t - self.t0) / (self.t1 - self.t0) * (W - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        H - MARGIN - (v - self.y0) / (self.y1 - self.y0) * (H - 2.0 * MARGIN)
    }
}

/// Merges consecutive steps so a long band keeps its hull with few vertices.
fn thin_band(b: &[Bound]) -> Vec<(f64, f64, f64, f64)> {
    let group = b.len().div_ceil(MAX_POINTS).max(1);
    b.chunks(group)
        .map(|c| {
            let lo = c.iter().map(|x| x.lo).fold(f64::INFINITY, f64::min);
            let hi = c.iter().map(|x| x.hi).fold(f64::NEG_INFINITY, f64::max);
            (c[0].t_lo, c[c.len() - 1].t_hi, lo, hi)
        })
        .collect()
}

pub fn write_plot(path: &Path, title: &str, series: &[Series<'_>]) -> Result<(), CliError> {
    let mut frame = Frame {
        t0: f64::INFINITY,
        t1: f64::NEG_INFINITY,
        y0: f64::INFINITY,
        y1: f64::NEG_INFINITY,
    };
    let mut grow = |t: f64, v: f64| {
        if t.is_finite() && v.is_finite() {
            frame.t0 = frame.t0.min(t);
            frame.t1 = frame.t1.max(t);
            frame.y0 = frame.y0.min(v);
            frame.y1 = frame.y1.max(v);
        }
    };
    for s in series {
        match s {
            Series::Band(b) => b.iter().for_each(|x| {
                grow(x.t_lo, x.lo);
                grow(x.t_hi, x.hi);
            }),
            Series::Line { times, values, .. } => times.iter().zip(*values).for_each(|(t, v)| grow(*t, *v)),
        }
    }
    if !(frame.t1 > frame.t0) {
        frame.t1 = frame.t0 + 1.0;
    }
    if !(frame.y1 > frame.y0) {
        let pad = frame.y0.abs().max(1.0) * 1e-3;
        frame.y0 -= pad;
        frame.y1 += pad;
    }

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#, W / 2.0, escape(title)).unwrap();
    for s_ in series {
        match s_ {
            Series::Band(b) => {
                let cells = thin_band(b);
                let mut pts = String::new();
                for &(ta, tb, _, hi) in &cells {
                    write!(pts, "{:.2},{:.2} {:.2},{:.2} ", frame.x(ta), frame.y(hi), frame.x(tb), frame.y(hi)).unwrap();
                }
                for &(ta, tb, lo, _) in cells.iter().rev() {
                    write!(pts, "{:.2},{:.2} {:.2},{:.2} ", frame.x(tb), frame.y(lo), frame.x(ta), frame.y(lo)).unwrap();
                }
                writeln!(s, r##"<polygon points="{}" fill="#1f77b4" fill-opacity="0.35" stroke="#1f77b4" stroke-width="0.5"/>"##, pts.trim_end()).unwrap();
            }
            Series::Line { times, values, color } => {
                let stride = times.len().div_ceil(MAX_POINTS).max(1);
                let mut pts = String::new();
                for (t, v) in times.iter().zip(values.iter()).step_by(stride) {
                    write!(pts, "{:.2},{:.2} ", frame.x(*t), frame.y(*v)).unwrap();
                }
                writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1"/>"#, pts.trim_end()).unwrap();
            }
        }
    }
    // Axes with their extreme values.
    let (xa, xb, ya, yb) = (MARGIN, W - MARGIN, H - MARGIN, MARGIN);
    writeln!(s, r#"<path d="M{xa},{yb} L{xa},{ya} L{xb},{ya}" fill="none" stroke="black"/>"#).unwrap();
    let label = |s: &mut String, x: f64, y: f64, anchor: &str, v: f64| {
        writeln!(s, r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{v:.4e}</text>"#).unwrap();
    };
    label(&mut s, xa, ya + 16.0, "start", frame.t0);
    label(&mut s, xb, ya + 16.0, "end", frame.t1);
    label(&mut s, xa - 4.0, ya, "end", frame.y0);
    label(&mut s, xa - 4.0, yb + 4.0, "end", frame.y1);
    writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">t</text>"#, W / 2.0, H - 16.0).unwrap();
    s.push_str("</svg>\n");
    std::fs::write(path, s).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
