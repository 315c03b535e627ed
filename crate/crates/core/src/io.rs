//! Plain-text CSV formats for pulse traces and sweep tables.
//!
//! Traces: a `# time_us,signal` header followed by one sample per line;
//! further traces follow after a blank line and a fresh header. Comment lines
//! of the form `# key = value` before a header become trace parameters.
//!
//! Sweep tables: a comment block of fixed parameters, then a
//! `# param,fwhm_us,peak,energy` header. Intensities are in mW/cm², times in μs.
//!
//! Floats are written with 17 significant digits so output is byte-identical
//! for identical input.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::{PulseTrace, TimeUnit};
use crate::sweep::{SweepRow, SweepTable, SweptParameter};
use crate::units;

pub const TRACE_HEADER: &str = "time_us,signal";
pub const SWEEP_HEADER: &str = "param,fwhm_us,peak,energy";

/// `x` with 17 significant digits; negative zero prints as zero.
pub fn fmt_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn parse_f64(field: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::MalformedRow {
        line,
        reason: format!("cannot parse {what} `{}`", field.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::MalformedRow {
            line,
            reason: format!("{what} is not finite"),
        });
    }
    Ok(v)
}

/// `# a,b,...` → Some("a,b,...") for comma-bearing comment lines.
fn header_columns(line: &str) -> Option<String> {
    let body = line.strip_prefix('#')?.trim();
    body.contains(',')
        .then(|| body.split(',').map(str::trim).collect::<Vec<_>>().join(","))
}

fn key_value(line: &str) -> Option<(String, String)> {
    let body = line.strip_prefix('#')?;
    let (k, v) = body.split_once('=')?;
    Some((k.trim().to_string(), v.trim().to_string()))
}

struct Block {
    params: Vec<(String, f64)>,
    header_line: usize,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Block {
    fn finish(self) -> Result<PulseTrace> {
        if self.times.is_empty() {
            return Err(Error::MalformedRow {
                line: self.header_line,
                reason: "trace block has no samples".to_string(),
            });
        }
        let mut tr = PulseTrace::new(self.times, self.values, TimeUnit::Microseconds)?;
        tr.params = self.params;
        Ok(tr)
    }
}

/// Parses trace CSV text. Line numbers in errors are 1-based.
pub fn parse_traces(text: &str) -> Result<Vec<PulseTrace>> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, f64)> = Vec::new();
    let mut block: Option<Block> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim_end_matches('\r').trim();
        if l.is_empty() {
            if let Some(b) = block.take() {
                out.push(b.finish()?);
            }
            continue;
        }
        if l.starts_with('#') {
            if let Some(cols) = header_columns(l) {
                if cols != TRACE_HEADER {
                    let first = cols.split(',').next().unwrap_or_default().to_string();
                    return Err(if first.starts_with("time") && first != "time_us" {
                        Error::UnitMismatch {
                            line,
                            found: first,
                            expected: "time_us",
                        }
                    } else {
                        Error::MalformedRow {
                            line,
                            reason: format!("expected header `# {TRACE_HEADER}`, found `{l}`"),
                        }
                    });
                }
                if let Some(b) = block.take() {
                    out.push(b.finish()?);
                }
                block = Some(Block {
                    params: std::mem::take(&mut pending),
                    header_line: line,
                    times: Vec::new(),
                    values: Vec::new(),
                });
            } else if let Some((k, v)) = key_value(l) {
                // non-numeric annotations are kept out of the numeric record
                if let Ok(x) = v.parse::<f64>() {
                    pending.push((k, x));
                }
            }
            continue;
        }
        let b = block.as_mut().ok_or_else(|| Error::MalformedRow {
            line,
            reason: format!("sample before a `# {TRACE_HEADER}` header"),
        })?;
        let fields: Vec<&str> = l.split(',').collect();
        if fields.len() != 2 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected 2 columns, found {}", fields.len()),
            });
        }
        let t = parse_f64(fields[0], line, "time")?;
        let v = parse_f64(fields[1], line, "signal")?;
        if v < 0.0 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("negative signal {v}"),
            });
        }
        if b.times.last().is_some_and(|&last| !(t > last)) {
            return Err(Error::NonMonotonicTime { line });
        }
        b.times.push(t);
        b.values.push(v);
    }
    if let Some(b) = block.take() {
        out.push(b.finish()?);
    }
    Ok(out)
}

/// Reads and validates every trace in a CSV file.
pub fn ingest_traces(path: impl AsRef<Path>) -> Result<Vec<PulseTrace>> {
    parse_traces(&std::fs::read_to_string(path)?)
}

/// Renders traces in the CSV trace format. `gamma12` [rad/s] converts
/// internal time axes to μs.
pub fn format_traces(traces: &[PulseTrace], gamma12: f64) -> String {
    let mut s = String::new();
    for (n, tr) in traces.iter().enumerate() {
        if n > 0 {
            s.push('\n');
        }
        for (k, v) in &tr.params {
            let _ = writeln!(s, "# {k} = {}", fmt_f64(*v));
        }
        let _ = writeln!(s, "# {TRACE_HEADER}");
        let us = tr.in_unit(TimeUnit::Microseconds, gamma12);
        for (t, v) in us.times().iter().zip(us.values()) {
            let _ = writeln!(s, "{},{}", fmt_f64(*t), fmt_f64(*v));
        }
    }
    s
}

fn param_to_file(p: SweptParameter, v: f64, gamma12: f64) -> f64 {
    match p {
        SweptParameter::StorageTime => units::internal_to_us(v, gamma12),
        _ => v,
    }
}

fn param_from_file(p: SweptParameter, v: f64, gamma12: f64) -> f64 {
    match p {
        SweptParameter::StorageTime => units::us_to_internal(v, gamma12),
        _ => v,
    }
}

fn param_unit(p: SweptParameter) -> &'static str {
    match p {
        SweptParameter::StorageTime => "us",
        _ => "mw_per_cm2",
    }
}

/// Renders a sweep table. The largest relative gap between the closed-form
/// and sampled energies is recorded in the comment block.
pub fn format_sweep_table(table: &SweepTable, gamma12: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# parameter = {}", table.parameter.name());
    let _ = writeln!(s, "# param_unit = {}", param_unit(table.parameter));
    for (k, v) in &table.fixed {
        let _ = writeln!(s, "# {k} = {v}");
    }
    let gap = table
        .rows
        .iter()
        .filter(|r| r.energy > 0.0)
        .map(|r| (r.energy_numeric / r.energy - 1.0).abs())
        .fold(0.0, f64::max);
    let _ = writeln!(s, "# energy_numeric_max_rel_diff = {}", fmt_f64(gap));
    let _ = writeln!(s, "# {SWEEP_HEADER}");
    for r in &table.rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_f64(param_to_file(table.parameter, r.param, gamma12)),
            fmt_f64(units::internal_to_us(r.fwhm, gamma12)),
            fmt_f64(r.peak),
            fmt_f64(r.energy)
        );
    }
    s
}

/// Parses a sweep table written by [`format_sweep_table`] (or by hand).
/// Without a `# parameter = ...` line the parameter is taken to be the read
/// intensity. `energy_numeric` is set equal to `energy`.
pub fn parse_sweep_table(text: &str, gamma12: f64) -> Result<SweepTable> {
    let mut parameter = SweptParameter::ReadIntensity;
    let mut fixed = Vec::new();
    let mut seen_header = false;
    let mut rows: Vec<SweepRow> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if l.starts_with('#') {
            if let Some(cols) = header_columns(l) {
                if cols != SWEEP_HEADER {
                    return Err(Error::MalformedRow {
                        line,
                        reason: format!("expected header `# {SWEEP_HEADER}`"),
                    });
                }
                seen_header = true;
            } else if let Some((k, v)) = key_value(l) {
                if k == "parameter" {
                    parameter = SweptParameter::from_name(&v).ok_or(Error::MalformedRow {
                        line,
                        reason: format!("unknown swept parameter `{v}`"),
                    })?;
                } else {
                    fixed.push((k, v));
                }
            }
            continue;
        }
        if !seen_header {
            return Err(Error::MalformedRow {
                line,
                reason: format!("row before a `# {SWEEP_HEADER}` header"),
            });
        }
        let f: Vec<&str> = l.split(',').collect();
        if f.len() != 4 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected 4 columns, found {}", f.len()),
            });
        }
        let param = param_from_file(parameter, parse_f64(f[0], line, "param")?, gamma12);
        let fwhm = units::us_to_internal(parse_f64(f[1], line, "fwhm_us")?, gamma12);
        let peak = parse_f64(f[2], line, "peak")?;
        let energy = parse_f64(f[3], line, "energy")?;
        if fwhm < 0.0 || peak < 0.0 || energy < 0.0 {
            return Err(Error::MalformedRow {
                line,
                reason: "derived quantities must be >= 0".to_string(),
            });
        }
        if rows.last().is_some_and(|r| !(param > r.param)) {
            return Err(Error::MalformedRow {
                line,
                reason: "param column is not strictly increasing".to_string(),
            });
        }
        rows.push(SweepRow {
            param,
            fwhm,
            peak,
            energy,
            energy_numeric: energy,
        });
    }
    if !seen_header {
        return Err(Error::MalformedRow {
            line: text.lines().count().max(1),
            reason: format!("no `# {SWEEP_HEADER}` header"),
        });
    }
    Ok(SweepTable {
        parameter,
        rows,
        fixed,
    })
}
