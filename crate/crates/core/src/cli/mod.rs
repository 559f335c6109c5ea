//! Commands behind the `chirped-transfer` binary and their output formats.
//!
//! Each command returns the full file contents as a string. CSV output
//! starts with a `#`-prefixed echo of the complete configuration, then a
//! header row, then data rows; JSON carries the same content as one object.
//! Every number is written with 12 significant digits, so identical
//! configurations give byte-identical files.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;

use serde::Serialize;

pub use config::{load_config, ConfigEcho, OutputFormat, RunConfig, KEYS};

use crate::error::{Error, Result};
use crate::propagator::{propagate, DensityMatrix, TimeSeries};
use crate::sweep::{sweep, sweep_with_workers, AxisSpec, SweepGrid};

pub const SIMULATE_COLUMNS: [&str; 13] = [
    "t",
    "rho11",
    "rho22",
    "rho33",
    "rho44",
    "re_rho12",
    "im_rho12",
    "re_rho23",
    "im_rho23",
    "re_rho24",
    "im_rho24",
    "envelope",
    "inst_freq",
];

pub const POPULATION_COLUMNS: [&str; 4] = ["rho11", "rho22", "rho33", "rho44"];

pub const FREQ_COLUMNS: [&str; 3] = ["t", "inst_freq", "envelope"];

/// 12 significant digits in scientific notation; `-0` is written as `0`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// `x` rounded to the precision [`format_number`] writes.
fn rounded(x: f64) -> f64 {
    if x.is_finite() {
        format_number(x).parse().expect("formatted number parses")
    } else {
        x
    }
}

fn csv_preamble(command: &str, cfg: &RunConfig) -> String {
    let mut out = format!("# chirped-transfer {command}\n");
    for line in cfg.to_config_text().lines() {
        let _ = writeln!(out, "# {line}");
    }
    out
}

fn csv_row(out: &mut String, values: impl IntoIterator<Item = f64>) {
    let cells: Vec<String> = values.into_iter().map(format_number).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct TableJson<'a> {
    command: &'a str,
    config: ConfigEcho<'a>,
    columns: Vec<String>,
    rows: Vec<Vec<Option<f64>>>,
}

fn simulate_rows(ts: &TimeSeries) -> Vec<Vec<f64>> {
    (0..ts.len())
        .map(|k| {
            let rho = &ts.states[k];
            let pops = rho.populations();
            let coh = rho.driven_coherences();
            let mut row = Vec::with_capacity(SIMULATE_COLUMNS.len());
            row.push(ts.times[k]);
            row.extend(pops);
            for z in coh {
                row.push(z.re);
                row.push(z.im);
            }
            row.push(ts.envelope[k]);
            row.push(ts.instantaneous_frequency[k]);
            row
        })
        .collect()
}

fn render_table(
    command: &str,
    cfg: &RunConfig,
    columns: &[String],
    rows: &[Vec<f64>],
    footer: &str,
) -> String {
    match cfg.format {
        OutputFormat::Csv => {
            let mut out = csv_preamble(command, cfg);
            out.push_str(&columns.join(","));
            out.push('\n');
            for row in rows {
                csv_row(&mut out, row.iter().copied());
            }
            out.push_str(footer);
            out
        }
        OutputFormat::Json => to_json(&TableJson {
            command,
            config: ConfigEcho(cfg),
            columns: columns.to_vec(),
            rows: rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| x.is_finite().then(|| rounded(x)))
                        .collect()
                })
                .collect(),
        }),
    }
}

fn names(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

/// Runs the configured propagation and returns the time-series file.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<String> {
    let sys = cfg.level_system()?;
    let ts = propagate(&sys, &cfg.pulse, &cfg.simulation, &DensityMatrix::ground())?;
    Ok(render_table(
        "simulate",
        cfg,
        &names(&SIMULATE_COLUMNS),
        &simulate_rows(&ts),
        "",
    ))
}

/// Final populations ρ₁₁..ρ₄₄ as a single record.
pub fn cmd_final(cfg: &RunConfig) -> Result<String> {
    let sys = cfg.level_system()?;
    let ts = propagate(&sys, &cfg.pulse, &cfg.simulation, &DensityMatrix::ground())?;
    let pops = crate::propagator::final_populations(&ts)?;
    Ok(match cfg.format {
        OutputFormat::Csv => {
            let mut out = csv_preamble("final", cfg);
            out.push_str(&POPULATION_COLUMNS.join(","));
            out.push('\n');
            csv_row(&mut out, pops);
            out
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct FinalJson<'a> {
                command: &'a str,
                config: ConfigEcho<'a>,
                populations: [f64; 4],
            }
            to_json(&FinalJson {
                command: "final",
                config: ConfigEcho(cfg),
                populations: pops.map(rounded),
            })
        }
    })
}

/// Runs a 1D/2D scan. `workers = None` uses every available core.
///
/// Failed points are flagged in the status column; the command fails only
/// when every point failed.
pub fn cmd_sweep(cfg: &RunConfig, axes: &[AxisSpec], workers: Option<usize>) -> Result<String> {
    let sys = cfg.level_system()?;
    let grid = match workers {
        Some(n) => sweep_with_workers(&sys, &cfg.pulse, &cfg.simulation, axes, n)?,
        None => sweep(&sys, &cfg.pulse, &cfg.simulation, axes)?,
    };
    if grid.failed() == grid.points.len() {
        return Err(Error::AllPointsFailed(grid.points.len()));
    }
    Ok(render_sweep(cfg, &grid))
}

/// Serializes a finished grid in the configured format.
pub fn render_sweep(cfg: &RunConfig, grid: &SweepGrid) -> String {
    match cfg.format {
        OutputFormat::Csv => {
            let mut out = csv_preamble("sweep", cfg);
            for (i, a) in grid.axes.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "# axis{}={}:{}:{}:{}",
                    i + 1,
                    a.parameter,
                    a.min,
                    a.max,
                    a.count
                );
            }
            let mut header: Vec<&str> = grid.axes.iter().map(|a| a.parameter.as_str()).collect();
            header.extend(POPULATION_COLUMNS);
            header.push("status");
            out.push_str(&header.join(","));
            out.push('\n');
            let mut failures = String::new();
            for (k, pt) in grid.points.iter().enumerate() {
                let pops = pt.populations().unwrap_or([f64::NAN; 4]);
                let cells: Vec<String> = pt
                    .coords
                    .iter()
                    .chain(pops.iter())
                    .map(|&x| format_number(x))
                    .collect();
                let status = if pt.outcome.is_ok() { "ok" } else { "failed" };
                let _ = writeln!(out, "{},{status}", cells.join(","));
                if let Err(msg) = &pt.outcome {
                    let _ = writeln!(failures, "# point {k}: {msg}");
                }
            }
            out.push_str(&failures);
            out
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct PointJson<'a> {
                coords: Vec<f64>,
                populations: Option<[f64; 4]>,
                status: &'a str,
                #[serde(skip_serializing_if = "Option::is_none")]
                error: Option<&'a str>,
            }
            #[derive(Serialize)]
            struct SweepJson<'a> {
                command: &'a str,
                config: ConfigEcho<'a>,
                axes: &'a [AxisSpec],
                points: Vec<PointJson<'a>>,
            }
            to_json(&SweepJson {
                command: "sweep",
                config: ConfigEcho(cfg),
                axes: &grid.axes,
                points: grid
                    .points
                    .iter()
                    .map(|pt| PointJson {
                        coords: pt.coords.iter().map(|&x| rounded(x)).collect(),
                        populations: pt.populations().map(|p| p.map(rounded)),
                        status: if pt.outcome.is_ok() { "ok" } else { "failed" },
                        error: pt.outcome.as_ref().err().map(String::as_str),
                    })
                    .collect(),
            })
        }
    }
}

/// A transition frequency and the times the chirped carrier crosses it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    pub transition: &'static str,
    pub omega_target: f64,
    pub times: Vec<f64>,
}

pub fn crossings(cfg: &RunConfig) -> Result<Vec<Crossing>> {
    cfg.level_system()?;
    Ok([
        ("omega21", cfg.omega21),
        ("omega32", cfg.omega32),
        ("omega42", cfg.omega42),
    ]
    .into_iter()
    .map(|(transition, w)| Crossing {
        transition,
        omega_target: w,
        times: cfg.pulse.resonance_crossings(w),
    })
    .collect())
}

/// Instantaneous frequency and envelope on the sample grid, with the
/// resonance crossings of the three transitions.
pub fn cmd_freq(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let p = &cfg.pulse;
    let rows: Vec<Vec<f64>> = cfg
        .simulation
        .sample_times()
        .into_iter()
        .map(|t| vec![t, p.instantaneous_frequency(t), p.envelope(t)])
        .collect();
    let crossings = crossings(cfg)?;
    match cfg.format {
        OutputFormat::Csv => {
            let mut footer = String::from("# crossing,transition,omega_target,t\n");
            for c in &crossings {
                for &t in &c.times {
                    let _ = writeln!(
                        footer,
                        "# crossing,{},{},{}",
                        c.transition,
                        format_number(c.omega_target),
                        format_number(t)
                    );
                }
            }
            Ok(render_table(
                "freq",
                cfg,
                &names(&FREQ_COLUMNS),
                &rows,
                &footer,
            ))
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct FreqJson<'a> {
                command: &'a str,
                config: ConfigEcho<'a>,
                columns: Vec<String>,
                rows: Vec<Vec<f64>>,
                crossings: Vec<Crossing>,
            }
            Ok(to_json(&FreqJson {
                command: "freq",
                config: ConfigEcho(cfg),
                columns: names(&FREQ_COLUMNS),
                rows: rows
                    .iter()
                    .map(|r| r.iter().map(|&x| rounded(x)).collect())
                    .collect(),
                crossings: crossings
                    .into_iter()
                    .map(|c| Crossing {
                        omega_target: rounded(c.omega_target),
                        times: c.times.into_iter().map(rounded).collect(),
                        ..c
                    })
                    .collect(),
            }))
        }
    }
}

/// Writes command output to `cfg.output`, or stdout when unset.
pub fn write_output(cfg: &RunConfig, contents: &str) -> Result<()> {
    match &cfg.output {
        Some(path) => fs::write(path, contents).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(contents.as_bytes())
            .map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}
