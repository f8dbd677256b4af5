//! Implementations of the CLI subcommands: each is a pure function of the
//! resolved configuration that writes its outputs under one directory and
//! returns the paths it created.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::hilbert::MubTable;
use crate::qkd;
use crate::report::{
    self, format_sig9, round_sig9, CrosstalkReport, Figure2Entry, Figure2Index, MonteCarloOut,
    QkdMetricsOut, QkdReport, ZmaxReport,
};
use crate::sorter::{self, CrosstalkTable};

/// Scalar knob swept by the `sweep` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParam {
    /// Index modulation depth.
    DeltaN,
    /// Vacuum wavelength in nm.
    LambdaNm,
    /// Additive offset applied to all three signal tilts.
    SignalTiltOffset,
    /// Additive offset applied to all three reference tilts.
    ReferenceTiltOffset,
}

impl SweepParam {
    fn apply(&self, base: &RunConfig, value: f64) -> RunConfig {
        let mut config = base.clone();
        match self {
            SweepParam::DeltaN => config.delta_n = value,
            SweepParam::LambdaNm => config.lambda_nm = value,
            SweepParam::SignalTiltOffset => {
                for t in &mut config.signal_tilts {
                    *t += value;
                }
            }
            SweepParam::ReferenceTiltOffset => {
                for t in &mut config.reference_tilts {
                    *t += value;
                }
            }
        }
        config
    }

    fn name(&self) -> &'static str {
        match self {
            SweepParam::DeltaN => "delta_n",
            SweepParam::LambdaNm => "lambda_nm",
            SweepParam::SignalTiltOffset => "signal_tilt_offset",
            SweepParam::ReferenceTiltOffset => "reference_tilt_offset",
        }
    }
}

fn ensure_out_dir(out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    Ok(())
}

fn depth_from_mm(z_mm: f64) -> Result<f64> {
    if !z_mm.is_finite() || z_mm < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "z = {z_mm} mm must be finite and non-negative"
        )));
    }
    Ok(z_mm * 1e-3)
}

/// Builds the configured sorter and finds its operating depth when the
/// caller did not pin one.
fn resolve_depth(config: &RunConfig, z_mm: Option<f64>) -> Result<(crate::hologram::HologramSpec, MubTable, f64)> {
    let mubs = MubTable::build(3)?;
    let spec = sorter::build_sorter(&config.to_sorter_config()?, &mubs)?;
    let z = match z_mm {
        Some(z_mm) => depth_from_mm(z_mm)?,
        None => sorter::find_zmax(&spec)?.common,
    };
    Ok((spec, mubs, z))
}

/// `crosstalk`: the 12×3 table plus residual column at one depth, as CSV and
/// JSON with full metadata.
pub fn cmd_crosstalk(
    config: &RunConfig,
    z_mm: Option<f64>,
    unit_references: bool,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    ensure_out_dir(out_dir)?;
    let (spec, mubs, z) = resolve_depth(config, z_mm)?;
    let table = sorter::crosstalk_table_with(&spec, &mubs, z, unit_references)?;

    let csv_path = out_dir.join("crosstalk.csv");
    let file = File::create(&csv_path)?;
    report::write_crosstalk_csv(BufWriter::new(file), &table)?;

    let json_path = out_dir.join("crosstalk.json");
    report::save_json(&json_path, &CrosstalkReport::new(config, &table))?;
    Ok(vec![csv_path, json_path])
}

/// `figure2`: one probability-vs-depth CSV per MUB state plus an index JSON,
/// and optionally a static SVG chart per panel.
pub fn cmd_figure2(
    config: &RunConfig,
    z_stop_mm: Option<f64>,
    samples: usize,
    svg: bool,
    unit_references: bool,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    ensure_out_dir(out_dir)?;
    let (spec, mubs, z_stop) = resolve_depth(config, z_stop_mm)?;
    let trajectories =
        sorter::figure2_dataset_with(&spec, &mubs, z_stop, samples, unit_references)?;
    let labels = mubs.labels();

    let mut written = Vec::new();
    let mut entries = Vec::new();
    for (label, traj) in labels.iter().zip(trajectories.iter()) {
        let name = format!("figure2_{label}.csv");
        let path = out_dir.join(&name);
        let file = File::create(&path)?;
        report::write_panel_csv(BufWriter::new(file), traj)?;
        written.push(path);
        entries.push(Figure2Entry {
            state: label.clone(),
            file: name,
        });
        if svg {
            let svg_path = out_dir.join(format!("figure2_{label}.svg"));
            let file = File::create(&svg_path)?;
            report::write_panel_svg(BufWriter::new(file), label, traj)?;
            written.push(svg_path);
        }
    }
    let index_path = out_dir.join("figure2_index.json");
    report::save_json(
        &index_path,
        &Figure2Index {
            version: env!("CARGO_PKG_VERSION"),
            config,
            z_stop_mm: round_sig9(z_stop * 1e3),
            samples,
            files: entries,
        },
    )?;
    written.push(index_path);
    Ok(written)
}

/// `zmax`: per-state and common maximum-efficiency depths as JSON.
pub fn cmd_zmax(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_out_dir(out_dir)?;
    let mubs = MubTable::build(3)?;
    let spec = sorter::build_sorter(&config.to_sorter_config()?, &mubs)?;
    let result = sorter::find_zmax(&spec)?;
    let path = out_dir.join("zmax.json");
    report::save_json(&path, &ZmaxReport::new(config, &result))?;
    Ok(vec![path])
}

/// Builds all four sorters at their own operating depths and returns the
/// crosstalk tables plus the depths (m).
pub fn four_sorter_tables(config: &RunConfig) -> Result<([CrosstalkTable; 4], [f64; 4])> {
    let mubs = MubTable::build(3)?;
    let mut tables = Vec::with_capacity(4);
    let mut depths = [0.0; 4];
    for b in 1..=4 {
        let mut basis_config = config.clone();
        basis_config.mub_index = b;
        let spec = sorter::build_sorter(&basis_config.to_sorter_config()?, &mubs)?;
        let z = sorter::find_zmax(&spec)?.common;
        depths[b - 1] = z;
        tables.push(sorter::crosstalk_table(&spec, &mubs, z)?);
    }
    Ok((tables.try_into().expect("four tables"), depths))
}

/// `qkd`: analytic metrics across the four sorters, plus an optional seeded
/// Monte Carlo exchange.
pub fn cmd_qkd(
    config: &RunConfig,
    monte_carlo: Option<u64>,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    ensure_out_dir(out_dir)?;
    let (tables, depths) = four_sorter_tables(config)?;
    let basis_probs = [0.25; 4];
    let analytic = qkd::qkd_metrics(&tables, basis_probs)?;
    let monte_carlo = match monte_carlo {
        Some(n) => Some(MonteCarloOut::new(
            &qkd::simulate_exchange(&tables, basis_probs, n, config.seed)?,
            config.seed,
        )),
        None => None,
    };
    let path = out_dir.join("qkd.json");
    report::save_json(
        &path,
        &QkdReport {
            version: env!("CARGO_PKG_VERSION"),
            config,
            z_eval_mm: depths.map(|z| round_sig9(z * 1e3)),
            analytic: QkdMetricsOut::new(&analytic),
            monte_carlo,
        },
    )?;
    Ok(vec![path])
}

#[derive(Debug, Serialize)]
struct SweepMeta<'a> {
    version: &'static str,
    config: &'a RunConfig,
    param: &'static str,
    from: f64,
    to: f64,
    steps: usize,
}

/// `sweep`: rebuild the configured sorter across a grid of one scalar
/// parameter and record depth, efficiency, and crosstalk summaries.
pub fn cmd_sweep(
    config: &RunConfig,
    param: SweepParam,
    from: f64,
    to: f64,
    steps: usize,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    if steps == 0 {
        return Err(Error::InvalidConfig("sweep needs at least 1 step".into()));
    }
    if !from.is_finite() || !to.is_finite() {
        return Err(Error::InvalidConfig("sweep bounds must be finite".into()));
    }
    ensure_out_dir(out_dir)?;
    let mubs = MubTable::build(3)?;
    let csv_path = out_dir.join("sweep.csv");
    let file = File::create(&csv_path)?;
    let mut w = BufWriter::new(file);
    use std::io::Write;
    writeln!(
        w,
        "{},common_zmax_mm,min_matched_efficiency,unmatched_min,unmatched_max,basis_ser",
        param.name()
    )?;
    for k in 0..steps {
        let value = if steps == 1 {
            from
        } else {
            from + (to - from) * k as f64 / (steps - 1) as f64
        };
        let point = param.apply(config, value);
        point.validate()?;
        let spec = sorter::build_sorter(&point.to_sorter_config()?, &mubs)?;
        let z = sorter::find_zmax(&spec)?.common;
        let table = sorter::crosstalk_table(&spec, &mubs, z)?;
        let mut min_matched = 1.0_f64;
        let mut unmatched_min = 1.0_f64;
        let mut unmatched_max = 0.0_f64;
        let mut correct_sum = 0.0;
        for basis in 1..=4 {
            for state in 0..3 {
                let row = table.row(basis, state);
                if basis == point.mub_index {
                    min_matched = min_matched.min(row.reference_probs[state]);
                    correct_sum += row.reference_probs[state];
                } else {
                    for p in row.reference_probs {
                        unmatched_min = unmatched_min.min(p);
                        unmatched_max = unmatched_max.max(p);
                    }
                }
            }
        }
        let basis_ser = 1.0 - correct_sum / 3.0;
        writeln!(
            w,
            "{},{},{},{},{},{}",
            format_sig9(value),
            format_sig9(z * 1e3),
            format_sig9(min_matched),
            format_sig9(unmatched_min),
            format_sig9(unmatched_max),
            format_sig9(basis_ser),
        )?;
    }
    drop(w);
    let json_path = out_dir.join("sweep.json");
    report::save_json(
        &json_path,
        &SweepMeta {
            version: env!("CARGO_PKG_VERSION"),
            config,
            param: param.name(),
            from,
            to,
            steps,
        },
    )?;
    Ok(vec![csv_path, json_path])
}
