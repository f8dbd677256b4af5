//! Deterministic result serialization: fixed 9-significant-digit float
//! formatting, CSV/JSON writers, and static SVG line charts.
//!
//! All numeric output flows through [`format_sig9`] so repeated runs with the
//! same configuration are byte-identical and re-parsing reproduces values to
//! the printed precision.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;
use crate::propagate::Trajectory;
use crate::qkd::{ExchangeOutcome, QkdMetrics};
use crate::sorter::{CrosstalkTable, ZmaxResult};

/// Formats with 9 significant digits, locale-independent, `.` separator.
/// Positional notation for decimal exponents in [-4, 8], scientific
/// otherwise. Trailing zeros are kept so columns stay aligned.
pub fn format_sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let sci = format!("{:.8e}", x);
    let (_, exp) = sci.split_once('e').expect("exponent in {:.8e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..=8).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

/// Rounds to the 9 significant decimal digits that [`format_sig9`] prints.
pub fn round_sig9(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format_sig9(x).parse().expect("sig9 output parses back")
}

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct CrosstalkRowOut {
    pub state: String,
    pub p_r1: f64,
    pub p_r2: f64,
    pub p_r3: f64,
    pub p_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct CrosstalkReport<'a> {
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub z_eval_mm: f64,
    pub rows: Vec<CrosstalkRowOut>,
}

impl<'a> CrosstalkReport<'a> {
    pub fn new(config: &'a RunConfig, table: &CrosstalkTable) -> Self {
        let rows = table
            .rows()
            .iter()
            .map(|row| CrosstalkRowOut {
                state: row.label.clone(),
                p_r1: round_sig9(row.reference_probs[0]),
                p_r2: round_sig9(row.reference_probs[1]),
                p_r3: round_sig9(row.reference_probs[2]),
                p_residual: round_sig9(row.residual),
            })
            .collect();
        Self {
            version: VERSION,
            config,
            z_eval_mm: round_sig9(table.z_eval() * 1e3),
            rows,
        }
    }
}

/// CSV form of a crosstalk table: `state,p_r1,p_r2,p_r3,p_residual`.
pub fn write_crosstalk_csv<W: Write>(mut w: W, table: &CrosstalkTable) -> Result<()> {
    writeln!(w, "state,p_r1,p_r2,p_r3,p_residual")?;
    for row in table.rows() {
        writeln!(
            w,
            "{},{},{},{},{}",
            row.label,
            format_sig9(row.reference_probs[0]),
            format_sig9(row.reference_probs[1]),
            format_sig9(row.reference_probs[2]),
            format_sig9(row.residual),
        )?;
    }
    Ok(())
}

/// CSV form of one probability-vs-depth panel: `z_mm,p_r1,p_r2,p_r3`.
pub fn write_panel_csv<W: Write>(mut w: W, trajectory: &Trajectory) -> Result<()> {
    writeln!(w, "z_mm,p_r1,p_r2,p_r3")?;
    for (z, p) in trajectory
        .z_samples()
        .iter()
        .zip(trajectory.probabilities().iter())
    {
        writeln!(
            w,
            "{},{},{},{}",
            format_sig9(z * 1e3),
            format_sig9(p[0]),
            format_sig9(p[1]),
            format_sig9(p[2]),
        )?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct ZmaxReport<'a> {
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub per_state_mm: [f64; 3],
    pub common_mm: f64,
    pub efficiency: [f64; 3],
}

impl<'a> ZmaxReport<'a> {
    pub fn new(config: &'a RunConfig, result: &ZmaxResult) -> Self {
        Self {
            version: VERSION,
            config,
            per_state_mm: result.per_state.map(|z| round_sig9(z * 1e3)),
            common_mm: round_sig9(result.common * 1e3),
            efficiency: result.efficiency_at_common.map(round_sig9),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct QkdMetricsOut {
    pub sift_fraction: f64,
    pub symbol_error_rate: f64,
    pub per_basis_ser: [f64; 4],
}

impl QkdMetricsOut {
    pub fn new(metrics: &QkdMetrics) -> Self {
        Self {
            sift_fraction: round_sig9(metrics.sift_fraction),
            symbol_error_rate: round_sig9(metrics.symbol_error_rate),
            per_basis_ser: metrics.per_basis_ser.map(round_sig9),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MonteCarloOut {
    pub n_symbols: u64,
    pub seed: u64,
    pub n_sifted: u64,
    pub sift_fraction: f64,
    pub symbol_error_rate: f64,
    pub per_basis_ser: [f64; 4],
}

impl MonteCarloOut {
    pub fn new(outcome: &ExchangeOutcome, seed: u64) -> Self {
        Self {
            n_symbols: outcome.n_symbols,
            seed,
            n_sifted: outcome.n_sifted,
            sift_fraction: round_sig9(outcome.metrics.sift_fraction),
            symbol_error_rate: round_sig9(outcome.metrics.symbol_error_rate),
            per_basis_ser: outcome.metrics.per_basis_ser.map(round_sig9),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct QkdReport<'a> {
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub z_eval_mm: [f64; 4],
    pub analytic: QkdMetricsOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloOut>,
}

#[derive(Debug, Serialize)]
pub struct Figure2Entry {
    pub state: String,
    pub file: String,
}

#[derive(Debug, Serialize)]
pub struct Figure2Index<'a> {
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub z_stop_mm: f64,
    pub samples: usize,
    pub files: Vec<Figure2Entry>,
}

/// Serializes a report as pretty JSON with a trailing newline. Key order
/// follows struct declaration order, so output is stable.
pub fn write_json<W: Write, T: Serialize>(mut w: W, report: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    w.write_all(text.as_bytes())?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn save_json<T: Serialize>(path: &Path, report: &T) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_json(std::io::BufWriter::new(file), report)
}

/// A static SVG line chart of the three reference-direction probabilities
/// versus depth: r1 solid, r2 dashed, r3 dotted.
pub fn write_panel_svg<W: Write>(mut w: W, title: &str, trajectory: &Trajectory) -> Result<()> {
    const WIDTH: f64 = 640.0;
    const HEIGHT: f64 = 440.0;
    const LEFT: f64 = 60.0;
    const RIGHT: f64 = 620.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 400.0;
    let zs = trajectory.z_samples();
    let z_max = zs.last().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let x_of = |z: f64| LEFT + (RIGHT - LEFT) * z / z_max;
    let y_of = |p: f64| BOTTOM - (BOTTOM - TOP) * p.clamp(0.0, 1.0);
    writeln!(
        w,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    )?;
    writeln!(
        w,
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    )?;
    writeln!(
        w,
        "  <text x=\"{:.2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{title}</text>",
        (LEFT + RIGHT) / 2.0
    )?;
    // axes
    writeln!(
        w,
        "  <line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>"
    )?;
    writeln!(
        w,
        "  <line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>"
    )?;
    for (frac, label) in [(0.0, "0"), (1.0 / 3.0, "1/3"), (1.0, "1")] {
        let y = y_of(frac);
        writeln!(
            w,
            "  <line x1=\"{LEFT}\" y1=\"{y:.2}\" x2=\"{RIGHT}\" y2=\"{y:.2}\" \
             stroke=\"#cccccc\" stroke-width=\"0.5\"/>"
        )?;
        writeln!(
            w,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" \
             text-anchor=\"end\">{label}</text>",
            LEFT - 6.0,
            y + 4.0
        )?;
    }
    writeln!(
        w,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\">z = 0 .. {} mm</text>",
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 24.0,
        format_sig9(z_max * 1e3)
    )?;
    let dashes = ["none", "8,4", "2,3"];
    for (channel, dash) in dashes.iter().enumerate() {
        let points: Vec<String> = zs
            .iter()
            .zip(trajectory.probabilities().iter())
            .map(|(z, p)| format!("{:.2},{:.2}", x_of(*z), y_of(p[channel])))
            .collect();
        let dash_attr = if *dash == "none" {
            String::new()
        } else {
            format!(" stroke-dasharray=\"{dash}\"")
        };
        writeln!(
            w,
            "  <polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"{dash_attr} \
             points=\"{}\"/>",
            points.join(" ")
        )?;
    }
    writeln!(w, "</svg>")?;
    Ok(())
}
