//! Experiment drivers: build a MUB sorter, locate its maximum-efficiency
//! depth, and produce crosstalk tables and probability-vs-depth curves for
//! all twelve input states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::MubTable;
use crate::hologram::{build_coupling_matrix, HologramSpec, RecordedGrating};
use crate::optics::{make_modes, OpticalConfig};
use crate::propagate::{ModeAmplitudes, Propagator, Trajectory};

/// Number of points in the coarse depth scan that seeds the golden-section
/// refinement.
const SCAN_POINTS: usize = 800;

/// Absolute golden-section tolerance on the located depth (m).
const GOLDEN_TOL: f64 = 1e-11;

/// Everything needed to instantiate one sorter.
#[derive(Debug, Clone)]
pub struct SorterConfig {
    pub optical: OpticalConfig,
    /// Which basis the hologram records (1-based).
    pub mub_index: usize,
    pub reference_tilts: [f64; 3],
    pub signal_tilts: [f64; 3],
    /// Force ρ_i = σ_j = β in the coupled-mode matrix.
    pub degenerate_kz: bool,
}

/// Builds the triple-multiplexed hologram recording basis `mub_index`:
/// grating i records state i of that basis against reference r_i.
pub fn build_sorter(config: &SorterConfig, mubs: &MubTable) -> Result<HologramSpec> {
    if mubs.dim() != 3 {
        return Err(Error::InvalidConfig(format!(
            "the sorter records a 3-dimensional MUB table, got dimension {}",
            mubs.dim()
        )));
    }
    let modes = make_modes(config.reference_tilts, config.signal_tilts, &config.optical)?;
    let mut gratings = Vec::with_capacity(3);
    for (i, mode) in modes.iter().take(3).enumerate() {
        let state = mubs.state(config.mub_index, i)?.clone();
        gratings.push(RecordedGrating::new(*mode, state, i + 1)?);
    }
    HologramSpec::new(
        gratings.try_into().expect("three gratings"),
        config.optical,
        modes,
        config.degenerate_kz,
    )
}

/// Result of the maximum-efficiency depth search.
#[derive(Debug, Clone)]
pub struct ZmaxResult {
    /// Depth maximizing each matched state's diffraction probability (m).
    pub per_state: [f64; 3],
    /// Depth maximizing the minimum matched-state efficiency (m).
    pub common: f64,
    /// Matched-state efficiencies evaluated at `common`.
    pub efficiency_at_common: [f64; 3],
}

/// Locates the maximum-efficiency depths by a coarse scan over
/// `(0, 2·πβ/(2√3κ²)]` followed by golden-section refinement.
pub fn find_zmax(spec: &HologramSpec) -> Result<ZmaxResult> {
    let matrix = build_coupling_matrix(spec)?;
    if matrix.kappa2() <= 0.0 {
        return Err(Error::NoInteriorMaximum);
    }
    let beta = spec.config().beta();
    let z_analytic =
        std::f64::consts::PI * beta / (2.0 * 3.0_f64.sqrt() * matrix.kappa2());
    let z_hi = 2.0 * z_analytic;
    let prop = Propagator::new(&matrix)?;
    let initials: Vec<ModeAmplitudes> = spec
        .gratings()
        .iter()
        .map(|g| ModeAmplitudes::from_signal(g.recorded_state()))
        .collect::<Result<Vec<_>>>()?;
    let eff = |state: usize, z: f64| -> Result<f64> {
        Ok(prop.probabilities_at(&initials[state], z)?[state])
    };

    let zs: Vec<f64> = (1..=SCAN_POINTS)
        .map(|k| z_hi * k as f64 / SCAN_POINTS as f64)
        .collect();
    let mut curves = [const { Vec::new() }; 3];
    for (state, curve) in curves.iter_mut().enumerate() {
        for z in &zs {
            curve.push(eff(state, *z)?);
        }
    }

    let bracket = |curve: &[f64]| -> Result<(f64, f64)> {
        let peak = curve
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .expect("non-empty scan");
        if peak == 0 || peak == curve.len() - 1 {
            return Err(Error::NoInteriorMaximum);
        }
        Ok((zs[peak - 1], zs[peak + 1]))
    };

    let mut per_state = [0.0; 3];
    for state in 0..3 {
        let (a, b) = bracket(&curves[state])?;
        per_state[state] = golden_max(a, b, |z| eff(state, z))?;
    }

    let min_curve: Vec<f64> = (0..zs.len())
        .map(|k| curves[0][k].min(curves[1][k]).min(curves[2][k]))
        .collect();
    let min_eff = |z: f64| -> Result<f64> {
        Ok(eff(0, z)?.min(eff(1, z)?).min(eff(2, z)?))
    };
    let (a, b) = bracket(&min_curve)?;
    let common = golden_max(a, b, min_eff)?;

    let mut efficiency_at_common = [0.0; 3];
    for (state, slot) in efficiency_at_common.iter_mut().enumerate() {
        *slot = eff(state, common)?;
    }
    Ok(ZmaxResult {
        per_state,
        common,
        efficiency_at_common,
    })
}

fn golden_max<F>(mut a: f64, mut b: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.6180339887498949;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut iterations = 0;
    while b - a > GOLDEN_TOL && iterations < 200 {
        if fc < fd {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        }
        iterations += 1;
    }
    Ok((a + b) / 2.0)
}

/// One row of the crosstalk table.
#[derive(Debug, Clone)]
pub struct CrosstalkRow {
    pub label: String,
    pub reference_probs: [f64; 3],
    pub residual: f64,
}

/// Diffraction probabilities of every MUB state into each reference
/// direction at one evaluation depth, plus the residual (undiffracted)
/// signal probability.
#[derive(Debug, Clone)]
pub struct CrosstalkTable {
    z_eval: f64,
    rows: Vec<CrosstalkRow>,
}

impl CrosstalkTable {
    /// Validates that every row is a probability distribution.
    pub fn new(z_eval: f64, rows: Vec<CrosstalkRow>) -> Result<Self> {
        for row in &rows {
            let probs = [
                row.reference_probs[0],
                row.reference_probs[1],
                row.reference_probs[2],
                row.residual,
            ];
            if probs.iter().any(|p| !(0.0..=1.0 + 1e-12).contains(p)) {
                return Err(Error::InvalidConfig(format!(
                    "row {} has probabilities outside [0, 1]",
                    row.label
                )));
            }
            let total: f64 = probs.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidConfig(format!(
                    "row {} probabilities sum to {total}",
                    row.label
                )));
            }
        }
        Ok(Self { z_eval, rows })
    }

    pub fn z_eval(&self) -> f64 {
        self.z_eval
    }

    pub fn rows(&self) -> &[CrosstalkRow] {
        &self.rows
    }

    /// Row for state `state` (0-based) of basis `basis` (1-based).
    pub fn row(&self, basis: usize, state: usize) -> &CrosstalkRow {
        &self.rows[(basis - 1) * 3 + state]
    }
}

/// Per-state crosstalk at depth `z`, with dark initial references.
pub fn crosstalk_table(
    spec: &HologramSpec,
    mubs: &MubTable,
    z: f64,
) -> Result<CrosstalkTable> {
    crosstalk_table_with(spec, mubs, z, false)
}

/// Like [`crosstalk_table`], optionally seeding unit reference amplitudes
/// (the compatibility initial condition).
pub fn crosstalk_table_with(
    spec: &HologramSpec,
    mubs: &MubTable,
    z: f64,
    unit_references: bool,
) -> Result<CrosstalkTable> {
    if z < 0.0 {
        return Err(Error::NegativeDepth { z });
    }
    let matrix = build_coupling_matrix(spec)?;
    let prop = Propagator::new(&matrix)?;
    let mut rows = Vec::with_capacity(mubs.num_bases() * mubs.dim());
    for basis in 1..=mubs.num_bases() {
        for state in 0..mubs.dim() {
            let input = mubs.state(basis, state)?;
            let initial = if unit_references {
                ModeAmplitudes::from_signal_with_unit_references(input)?
            } else {
                ModeAmplitudes::from_signal(input)?
            };
            let p = prop.probabilities_at(&initial, z)?;
            rows.push(CrosstalkRow {
                label: mubs.state_label(basis, state),
                reference_probs: [p[0], p[1], p[2]],
                residual: p[3] + p[4] + p[5],
            });
        }
    }
    CrosstalkTable::new(z, rows)
}

/// Probability-vs-depth curves for every MUB state on a uniform grid from 0
/// to `z_stop`, one trajectory per state in table order.
pub fn figure2_dataset(
    spec: &HologramSpec,
    mubs: &MubTable,
    z_stop: f64,
    samples: usize,
) -> Result<Vec<Trajectory>> {
    figure2_dataset_with(spec, mubs, z_stop, samples, false)
}

/// Like [`figure2_dataset`], optionally seeding unit reference amplitudes.
pub fn figure2_dataset_with(
    spec: &HologramSpec,
    mubs: &MubTable,
    z_stop: f64,
    samples: usize,
    unit_references: bool,
) -> Result<Vec<Trajectory>> {
    if samples < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    if !z_stop.is_finite() || z_stop <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "z_stop = {z_stop} must be positive and finite"
        )));
    }
    let matrix = build_coupling_matrix(spec)?;
    let prop = Propagator::new(&matrix)?;
    let rho = matrix.rho();
    let sigma = matrix.sigma();
    let zs: Vec<f64> = (0..samples)
        .map(|j| z_stop * j as f64 / (samples - 1) as f64)
        .collect();
    let mut trajectories = Vec::with_capacity(mubs.num_bases() * mubs.dim());
    for basis in 1..=mubs.num_bases() {
        for state in 0..mubs.dim() {
            let input = mubs.state(basis, state)?;
            let initial = if unit_references {
                ModeAmplitudes::from_signal_with_unit_references(input)?
            } else {
                ModeAmplitudes::from_signal(input)?
            };
            let amps = zs
                .iter()
                .map(|z| prop.evolve(&initial, *z))
                .collect::<Result<Vec<_>>>()?;
            trajectories.push(Trajectory::from_samples(zs.clone(), amps, &rho, &sigma)?);
        }
    }
    Ok(trajectories)
}

/// Reconstructs the scalar field at `(x, z)` from the six primary modes:
/// `E(x, z) = Σ_k amp_k exp(i(kx_k x + kz_k z))`.
///
/// The physical mode wavevectors are used regardless of the degenerate-kz
/// matrix option.
pub fn reconstruct_field(
    spec: &HologramSpec,
    amps: &ModeAmplitudes,
    x: f64,
    z: f64,
) -> Complex64 {
    spec.modes()
        .iter()
        .zip(amps.values().iter())
        .map(|(mode, amp)| amp * Complex64::from_polar(1.0, mode.kx() * x + mode.kz() * z))
        .sum()
}
