use std::io::Write as _;

use log::{info, warn};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use gratingsim::dynamics::{apply_storage, integrate_read, integrate_write, StoredGrating};
use gratingsim::fit::{
    fit_exponential, fit_scale_parameter, DecayConvention, FitResult, Observable, ScaleData,
    ScaleTarget,
};
use gratingsim::io::{self, fmt_f64};
use gratingsim::model::{
    coherence_steady_closed, steady_state_write, AtomParams, BeamSet, DensityMatrix3,
};
use gratingsim::signal::{farfield_amplitude, sample_pulse, PulseTrace, TimeUnit};
use gratingsim::sweep::{
    sweep_read_intensity, sweep_storage_time, sweep_write_intensity, SweepTable, SweptParameter,
};
use gratingsim::units;

use crate::config::{Format, RunConfig};
use crate::svg::{plot, Series};
use crate::{
    CliError, Command, Convention, FarfieldArgs, FitArgs, FitTarget, ObservableArg, Plane,
    PulseArgs, SweepArgs, SweepParam,
};

pub fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<(), CliError> {
    let out = match cmd {
        Command::Steady => steady(cfg)?,
        Command::Pulse(a) => pulse(cfg, a)?,
        Command::Sweep(a) => sweep(cfg, a)?,
        Command::Fit(a) => return fit(cfg, a),
        Command::Farfield(a) => farfield(cfg, a)?,
        Command::Config => cfg.to_toml(),
    };
    emit(cfg, &out)
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.output.path {
        Some(p) => std::fs::write(p, text).map_err(|e| {
            CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display())))
        })?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn unsupported(what: &str, f: Format) -> CliError {
    CliError::Config(format!("`{what}` does not support {f:?} output"))
}

fn cjson(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn steady(cfg: &RunConfig) -> Result<String, CliError> {
    let atom = cfg.atom()?;
    let beams = cfg.beams()?;
    let (w, wp) = (beams.omega_w(&atom)?, beams.omega_wp(&atom)?);
    let lin = steady_state_write(&atom, w, wp)?;
    let closed = coherence_steady_closed(&atom, w, wp)?;
    let diff = (lin.rho_ab - closed).norm();
    let elements: [(&str, Complex64); 6] = [
        ("rho22", lin.rho22.into()),
        ("rho_aa", lin.rho_aa.into()),
        ("rho_bb", lin.rho_bb.into()),
        ("sigma_a2", lin.sigma_a2),
        ("sigma_b2", lin.sigma_b2),
        ("rho_ab", lin.rho_ab),
    ];
    match cfg.output.format {
        Format::Csv => {
            let mut s = String::from("# element,re,im\n");
            for (name, z) in elements {
                s += &format!("{name},{},{}\n", fmt_f64(z.re), fmt_f64(z.im));
            }
            s += "\n# coherence,linear_re,linear_im,closed_re,closed_im,abs_diff\n";
            s += &format!(
                "rho_ab,{},{},{},{},{}\n",
                fmt_f64(lin.rho_ab.re),
                fmt_f64(lin.rho_ab.im),
                fmt_f64(closed.re),
                fmt_f64(closed.im),
                fmt_f64(diff)
            );
            Ok(s)
        }
        Format::Json => {
            let linear: Map<String, Value> =
                elements.iter().map(|(k, z)| (k.to_string(), cjson(*z))).collect();
            Ok(pretty(&json!({
                "linear": linear,
                "closed_rho_ab": cjson(closed),
                "abs_diff": diff,
            })))
        }
        f => Err(unsupported("steady", f)),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

/// Closed-form stored grating: stationary coherence followed by storage decay.
fn closed_grating(atom: &AtomParams, beams: &BeamSet, t_store: f64) -> Result<StoredGrating, CliError> {
    let rho = coherence_steady_closed(atom, beams.omega_w(atom)?, beams.omega_wp(atom)?)?;
    Ok(StoredGrating {
        rho_ab_s: rho * (-atom.gamma_ratio() * t_store).exp(),
        t_store_applied: t_store,
    })
}

fn pulse(cfg: &RunConfig, args: &PulseArgs) -> Result<String, CliError> {
    let atom = cfg.atom()?;
    let beams = cfg.beams()?;
    let seq = cfg.sequence(&atom)?;
    let norm = cfg.normalization()?;
    let detector = cfg.detector(&atom)?;
    let (do_closed, do_numeric) = match (args.closed_form, args.numeric, args.compare) {
        (_, _, true) => (true, true),
        (_, true, _) => (false, true),
        _ => (true, false),
    };
    let tag = |tr: PulseTrace, numeric: bool| {
        tr.with_param("numeric_path", if numeric { 1.0 } else { 0.0 })
            .with_param("i_w_mw_per_cm2", beams.i_w)
            .with_param("i_wp_mw_per_cm2", beams.i_wp)
            .with_param("i_r_mw_per_cm2", beams.i_r)
            .with_param("t_store_us", cfg.sequence.t_store_us)
    };

    let mut traces = Vec::new();
    if do_closed {
        let g = closed_grating(&atom, &beams, seq.t_store)?;
        let steps = (seq.t_read / seq.dt).round().max(1.0) as usize;
        let tr = sample_pulse(&g, beams.effective_read_intensity(), &atom, &norm, seq.t_read, steps)?;
        traces.push(tag(tr, false));
    }
    if do_numeric {
        let (w, wp, r) = (beams.omega_w(&atom)?, beams.omega_wp(&atom)?, beams.omega_r(&atom)?);
        let run = integrate_write(&atom, w, wp, &seq, DensityMatrix3::ground_mixture())?;
        let grating = apply_storage(&run.final_state(), seq.t_store, &atom);
        let traj = integrate_read(&grating, r, &atom, &seq)?;
        let values = traj
            .states
            .iter()
            .map(|s| norm.amp_const * s.sigma_a2.norm_sqr())
            .collect();
        let mut tr = PulseTrace::new(traj.times.clone(), values, TimeUnit::Gamma12)?
            .with_param("rho_s_modulus", grating.modulus());
        if let Some(closed) = traces.first() {
            let gap = max_gap(closed, &tr);
            info!("largest |closed - numeric| over the shared samples: {gap:e}");
            tr = tr.with_param("max_abs_diff_to_closed", gap);
        }
        traces.push(tag(tr, true));
    }
    if let Some(d) = &detector {
        traces = traces.iter().map(|t| d.apply(t)).collect();
    }

    let us: Vec<PulseTrace> = traces
        .iter()
        .map(|t| t.in_unit(TimeUnit::Microseconds, atom.gamma12))
        .collect();
    match cfg.output.format {
        Format::Csv => Ok(io::format_traces(&traces, atom.gamma12)),
        Format::Json => {
            let arr: Vec<Value> = us
                .iter()
                .map(|t| {
                    let params: Map<String, Value> =
                        t.params.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
                    json!({ "params": params, "time_us": t.times(), "signal": t.values() })
                })
                .collect();
            Ok(pretty(&json!({ "traces": arr })))
        }
        Format::Svg => {
            let labels = ["closed form", "numeric"];
            let offset = usize::from(!do_closed);
            let series: Vec<Series> = us
                .iter()
                .enumerate()
                .map(|(i, t)| Series {
                    label: labels[i + offset],
                    x: t.times(),
                    y: t.values(),
                })
                .collect();
            Ok(plot("retrieved pulse", "t (μs)", "S(t)", &series))
        }
    }
}

/// Largest difference between two traces at their common sample times.
fn max_gap(a: &PulseTrace, b: &PulseTrace) -> f64 {
    let n = a.len().min(b.len());
    (0..n)
        .filter(|&i| (a.times()[i] - b.times()[i]).abs() <= 1e-9 * a.times()[i].abs().max(1.0))
        .map(|i| (a.values()[i] - b.values()[i]).abs())
        .fold(0.0, f64::max)
}

pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Config(format!("--grid `{text}`: {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:n"));
        }
        let n: usize = parts[2].trim().parse().map_err(|_| bad("n must be an integer"))?;
        if n == 0 {
            return Err(bad("n must be >= 1"));
        }
        Ok(gratingsim::sweep::linear_grid(num(parts[0])?, num(parts[1])?, n))
    } else {
        text.split(',').map(num).collect()
    }
}

fn parse_bounds(text: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Config(format!("--bounds `{text}`: expected lo:hi with 0 < lo < hi"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let (lo, hi): (f64, f64) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    if !(lo > 0.0 && hi > lo) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn sweep(cfg: &RunConfig, args: &SweepArgs) -> Result<String, CliError> {
    let scenario = cfg.scenario()?;
    let g12 = scenario.atom.gamma12;
    let grid = parse_grid(&args.grid)?;
    let table = match args.param {
        SweepParam::ReadIntensity => sweep_read_intensity(&grid, &scenario)?,
        SweepParam::WriteIntensity => sweep_write_intensity(&grid, &scenario)?,
        SweepParam::StorageTime => {
            let internal: Vec<f64> = grid.iter().map(|&t| units::us_to_internal(t, g12)).collect();
            sweep_storage_time(&internal, &scenario)?
        }
    };
    render_table(&table, cfg.output.format, g12)
}

fn render_table(table: &SweepTable, format: Format, g12: f64) -> Result<String, CliError> {
    let param_out = |v: f64| match table.parameter {
        SweptParameter::StorageTime => units::internal_to_us(v, g12),
        _ => v,
    };
    match format {
        Format::Csv => Ok(io::format_sweep_table(table, g12)),
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "param": param_out(r.param),
                        "fwhm_us": units::internal_to_us(r.fwhm, g12),
                        "peak": r.peak,
                        "energy": r.energy,
                        "energy_numeric": r.energy_numeric,
                    })
                })
                .collect();
            let fixed: Map<String, Value> = table
                .fixed
                .iter()
                .map(|(k, v)| (k.clone(), json!(v)))
                .collect();
            Ok(pretty(&json!({
                "parameter": table.parameter.name(),
                "fixed": fixed,
                "rows": rows,
            })))
        }
        Format::Svg => {
            let x: Vec<f64> = table.rows.iter().map(|r| param_out(r.param)).collect();
            let normed = |f: fn(&gratingsim::sweep::SweepRow) -> f64| {
                let v = table.column(f);
                let m = v.iter().copied().fold(0.0, f64::max);
                v.into_iter().map(|y| if m > 0.0 { y / m } else { 0.0 }).collect::<Vec<f64>>()
            };
            let (fw, pk, en) = (normed(|r| r.fwhm), normed(|r| r.peak), normed(|r| r.energy));
            Ok(plot(
                table.parameter.name(),
                table.parameter.name(),
                "normalized to max",
                &[
                    Series { label: "FWHM", x: &x, y: &fw },
                    Series { label: "peak", x: &x, y: &pk },
                    Series { label: "energy", x: &x, y: &en },
                ],
            ))
        }
    }
}

fn fit_json(target: &str, r: &FitResult, extra: &[(&str, f64)]) -> Value {
    let mut est: Map<String, Value> = r.estimates.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    for (k, v) in extra {
        est.insert(k.to_string(), json!(v));
    }
    json!({
        "target": target,
        "estimates": est,
        "residual_ss": r.residual_ss,
        "iterations": r.iterations,
        "evaluations": r.evaluations,
        "converged": r.converged,
        "warnings": r.warnings,
    })
}

fn fit(cfg: &RunConfig, args: &FitArgs) -> Result<(), CliError> {
    if cfg.output.format != Format::Json {
        warn!("fit reports are always JSON");
    }
    let text = std::fs::read_to_string(&args.data).map_err(|e| {
        CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", args.data.display())))
    })?;
    let is_table = text
        .lines()
        .any(|l| l.trim().trim_start_matches('#').trim().replace(' ', "") == io::SWEEP_HEADER);
    let atom = cfg.atom()?;
    let g12 = atom.gamma12;

    let (target, result, extra) = match args.target {
        FitTarget::Tau => {
            let points: Vec<(f64, f64)> = if is_table {
                let table = io::parse_sweep_table(&text, g12)?;
                if table.parameter != SweptParameter::StorageTime {
                    return Err(CliError::Config(
                        "tau fits from a sweep table need a storage-time sweep".into(),
                    ));
                }
                table
                    .rows
                    .iter()
                    .map(|r| (units::internal_to_us(r.param, g12), r.peak))
                    .collect()
            } else {
                let traces = io::parse_traces(&text)?;
                if traces.len() > 1 {
                    warn!("{} traces found; fitting the first", traces.len());
                }
                let t = traces
                    .first()
                    .ok_or(gratingsim::Error::ShortTrace { found: 0, needed: 3 })?;
                t.times().iter().copied().zip(t.values().iter().copied()).collect()
            };
            let conv = match args.convention {
                Convention::Amplitude => DecayConvention::Amplitude,
                Convention::Intensity => DecayConvention::Intensity,
            };
            let r = fit_exponential(&points, conv)?;
            let gamma_per_us = r.get("gamma").unwrap_or(f64::NAN);
            let extra = vec![
                ("tau_us", r.get("tau").unwrap_or(f64::NAN)),
                ("gamma_per_us", gamma_per_us),
                ("gamma_over_gamma12", gamma_per_us * 1e6 / g12),
            ];
            ("tau", r, extra)
        }
        FitTarget::A | FitTarget::APrime => {
            let (st, key, swept, name) = match args.target {
                FitTarget::A => (ScaleTarget::Read, "i_r_mw_per_cm2", SweptParameter::ReadIntensity, "a"),
                _ => (ScaleTarget::WriteRatio, "i_w_mw_per_cm2", SweptParameter::WriteIntensity, "a_prime"),
            };
            let data = if is_table {
                let table = io::parse_sweep_table(&text, g12)?;
                if table.parameter != swept {
                    return Err(CliError::Config(format!(
                        "fitting {name} needs a {} sweep, found {}",
                        swept.name(),
                        table.parameter.name()
                    )));
                }
                let observable = match args.observable {
                    ObservableArg::Fwhm => Observable::Fwhm,
                    ObservableArg::Peak => Observable::Peak,
                    ObservableArg::Energy => Observable::Energy,
                };
                ScaleData::Curve {
                    params: table.column(|r| r.param),
                    observed: table.column(|r| match observable {
                        Observable::Fwhm => r.fwhm,
                        Observable::Peak => r.peak,
                        Observable::Energy => r.energy,
                    }),
                    observable,
                }
            } else {
                let traces = io::parse_traces(&text)?;
                let mut tagged = Vec::new();
                for (i, t) in traces.into_iter().enumerate() {
                    let p = t.params.iter().find(|(k, _)| k == key).map(|p| p.1).ok_or_else(|| {
                        CliError::Core(gratingsim::Error::MalformedRow {
                            line: 0,
                            reason: format!("trace {} has no `# {key} = ...` line", i + 1),
                        })
                    })?;
                    tagged.push((p, t));
                }
                ScaleData::Traces(tagged)
            };
            let bounds = match &args.bounds {
                Some(b) => parse_bounds(b)?,
                None if st == ScaleTarget::Read => (1e-3, 1.0),
                None => (0.05, 20.0),
            };
            let r = fit_scale_parameter(&data, st, bounds, &cfg.scenario()?)?;
            (name, r, Vec::new())
        }
    };

    let report = pretty(&fit_json(target, &result, &extra));
    emit(cfg, &report)?;
    if !result.converged {
        return Err(CliError::NotConverged(result.warnings.join("; ")));
    }
    Ok(())
}

fn farfield(cfg: &RunConfig, args: &FarfieldArgs) -> Result<String, CliError> {
    let atom = cfg.atom()?;
    let beams = cfg.beams()?;
    let seq = cfg.sequence(&atom)?;
    let norm = cfg.normalization()?;
    let cloud = cfg.cloud()?;
    if !(args.time.is_finite() && args.time >= 0.0) {
        return Err(CliError::Config(format!("--time must be >= 0 μs, got {}", args.time)));
    }
    if args.points < 2 || !(args.extent > 0.0) {
        return Err(CliError::Config("--points must be >= 2 and --extent > 0".into()));
    }
    let grating = closed_grating(&atom, &beams, seq.t_store)?;
    let t = units::us_to_internal(args.time, atom.gamma12);
    let r = beams.omega_r(&atom)?;
    let (i1, i2) = match args.plane {
        Plane::Xy => (0, 1),
        Plane::Xz => (0, 2),
        Plane::Yz => (1, 2),
    };
    let center = cloud.k_wprime.map(|c| -c);
    let half = args.extent / cloud.rms_width;
    let axis = gratingsim::sweep::linear_grid(-half, half, args.points);
    let intensity: Vec<Vec<f64>> = axis
        .iter()
        .map(|&u| {
            axis.iter()
                .map(|&v| {
                    let mut k = center;
                    k[i1] += u;
                    k[i2] += v;
                    farfield_amplitude(k, t, &grating, r, &cloud, &atom, &norm).norm_sqr()
                })
                .collect()
        })
        .collect();
    let names = ["x", "y", "z"];
    let (n1, n2) = (names[i1], names[i2]);
    match cfg.output.format {
        Format::Csv => {
            let mut s = format!(
                "# center_k_per_m = {},{},{}\n# time_us = {}\n# dk{n1}_per_m,dk{n2}_per_m,intensity\n",
                fmt_f64(center[0]),
                fmt_f64(center[1]),
                fmt_f64(center[2]),
                fmt_f64(args.time)
            );
            for (a, row) in axis.iter().zip(&intensity) {
                for (b, v) in axis.iter().zip(row) {
                    s += &format!("{},{},{}\n", fmt_f64(*a), fmt_f64(*b), fmt_f64(*v));
                }
            }
            Ok(s)
        }
        Format::Json => Ok(pretty(&json!({
            "center_k_per_m": center,
            "time_us": args.time,
            "plane": format!("{n1}{n2}"),
            "dk_per_m": axis,
            "intensity": intensity,
        }))),
        Format::Svg => {
            // cut through the centre of the plane
            let mid = args.points / 2;
            let cut: Vec<f64> = intensity.iter().map(|row| row[mid]).collect();
            Ok(plot(
                "far-field cut",
                &format!("dk{n1} (1/m)"),
                "|E_D|²",
                &[Series { label: "intensity", x: &axis, y: &cut }],
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_specs() {
        assert_eq!(parse_grid("1:3:3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_grid("0.5, 2").unwrap(), vec![0.5, 2.0]);
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("1:2:0").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn bounds_specs() {
        assert_eq!(parse_bounds("0.01:0.1").unwrap(), (0.01, 0.1));
        assert!(parse_bounds("0.1:0.01").is_err());
        assert!(parse_bounds("0:1").is_err());
    }
}
