//! The triple-multiplexed grating model: per-exposure intensity modulations,
//! the recorded index profile, the coupling constant, and assembly of the
//! 6×6 coupled-mode matrix.

use nalgebra::Matrix6;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::StateVector;
use crate::optics::{ModeLabel, OpticalConfig, PlaneWaveMode};

const SQRT3: f64 = 1.7320508075688772;

/// Tolerance for the pairwise orthogonality of the recorded states.
const ORTHO_TOL: f64 = 1e-10;

/// One recorded exposure: a MUB state interfered with its reference wave.
#[derive(Debug, Clone)]
pub struct RecordedGrating {
    reference: PlaneWaveMode,
    recorded_state: StateVector,
    index: usize,
}

impl RecordedGrating {
    /// `index` is 1-based and must match the reference label r_index.
    pub fn new(reference: PlaneWaveMode, recorded_state: StateVector, index: usize) -> Result<Self> {
        if !(1..=3).contains(&index) {
            return Err(Error::InvalidSpec(format!(
                "grating index {index} out of range 1..=3"
            )));
        }
        let expected = ModeLabel::ALL[index - 1];
        if reference.label() != expected {
            return Err(Error::InvalidSpec(format!(
                "grating {index} must reference {expected}, got {}",
                reference.label()
            )));
        }
        if recorded_state.dim() != 3 {
            return Err(Error::InvalidSpec(format!(
                "recorded state has dimension {}, expected 3",
                recorded_state.dim()
            )));
        }
        Ok(Self {
            reference,
            recorded_state,
            index,
        })
    }

    pub fn reference(&self) -> &PlaneWaveMode {
        &self.reference
    }

    pub fn recorded_state(&self) -> &StateVector {
        &self.recorded_state
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Unnormalized construction coefficients of the recorded state
    /// (unit-modulus phases for a superposition row, a unit vector for a
    /// computational-basis row).
    pub fn raw_coefficients(&self) -> Vec<Complex64> {
        let amps = self.recorded_state.amps();
        let max_mod = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
        amps.iter().map(|a| a / max_mod).collect()
    }
}

/// The full triple-multiplexed hologram: three gratings recording one MUB,
/// the optical configuration, and the six primary modes.
#[derive(Debug, Clone)]
pub struct HologramSpec {
    gratings: [RecordedGrating; 3],
    config: OpticalConfig,
    modes: [PlaneWaveMode; 6],
    degenerate_kz: bool,
}

impl HologramSpec {
    /// Validates that the recorded states form one complete orthogonal basis
    /// and that grating i references mode r_i. `degenerate_kz` forces
    /// ρ_i = σ_j = β in the assembled coupled-mode matrix (the modes keep
    /// their physical wavevectors).
    pub fn new(
        gratings: [RecordedGrating; 3],
        config: OpticalConfig,
        modes: [PlaneWaveMode; 6],
        degenerate_kz: bool,
    ) -> Result<Self> {
        for (slot, mode) in modes.iter().enumerate() {
            if mode.label() != ModeLabel::ALL[slot] {
                return Err(Error::InvalidSpec(format!(
                    "mode slot {slot} holds {}, expected {}",
                    mode.label(),
                    ModeLabel::ALL[slot]
                )));
            }
        }
        for (slot, g) in gratings.iter().enumerate() {
            if g.index() != slot + 1 {
                return Err(Error::InvalidSpec(format!(
                    "grating in slot {slot} carries index {}",
                    g.index()
                )));
            }
            if g.reference() != &modes[slot] {
                return Err(Error::InvalidSpec(format!(
                    "grating {} reference does not match mode table entry",
                    g.index()
                )));
            }
        }
        check_recorded_orthogonality(&gratings)?;
        Ok(Self {
            gratings,
            config,
            modes,
            degenerate_kz,
        })
    }

    pub fn gratings(&self) -> &[RecordedGrating; 3] {
        &self.gratings
    }

    pub fn config(&self) -> &OpticalConfig {
        &self.config
    }

    pub fn modes(&self) -> &[PlaneWaveMode; 6] {
        &self.modes
    }

    pub fn signal_modes(&self) -> &[PlaneWaveMode] {
        &self.modes[3..6]
    }

    pub fn degenerate_kz(&self) -> bool {
        self.degenerate_kz
    }

    /// Longitudinal wavevector components of the reference modes.
    pub fn rho(&self) -> [f64; 3] {
        if self.degenerate_kz {
            [self.config.beta(); 3]
        } else {
            [self.modes[0].kz(), self.modes[1].kz(), self.modes[2].kz()]
        }
    }

    /// Longitudinal wavevector components of the signal modes.
    pub fn sigma(&self) -> [f64; 3] {
        if self.degenerate_kz {
            [self.config.beta(); 3]
        } else {
            [self.modes[3].kz(), self.modes[4].kz(), self.modes[5].kz()]
        }
    }

    /// Intensity modulation of grating `index` (1-based) at `(x, z)`.
    pub fn intensity_modulation(&self, index: usize, x: f64, z: f64) -> Result<f64> {
        if !(1..=3).contains(&index) {
            return Err(Error::InvalidSpec(format!(
                "grating index {index} out of range 1..=3"
            )));
        }
        Ok(intensity_modulation(
            &self.gratings[index - 1],
            self.signal_modes(),
            x,
            z,
        ))
    }
}

fn check_recorded_orthogonality(gratings: &[RecordedGrating; 3]) -> Result<()> {
    for i in 0..3 {
        for j in (i + 1)..3 {
            let ip = crate::hilbert::inner(
                gratings[i].recorded_state(),
                gratings[j].recorded_state(),
            )?;
            if ip.norm() > ORTHO_TOL {
                return Err(Error::InvalidSpec(format!(
                    "recorded states {} and {} are not orthogonal (|<i|j>| = {:.3e})",
                    i + 1,
                    j + 1,
                    ip.norm()
                )));
            }
        }
    }
    Ok(())
}

/// Coupling constant `κ² = β² (Δn/n₀) / (6(3+√3))` (rad²/m²).
pub fn kappa2(config: &OpticalConfig) -> f64 {
    let beta = config.beta();
    beta * beta * config.material().modulation_ratio() / (6.0 * (3.0 + SQRT3))
}

/// Intensity modulation of one recorded grating at position `(x, z)`:
/// `2 − |e^{i k_r·r} + Σ_j c̃_j e^{i k_j·r}|²` with the normalized recorded
/// amplitudes c̃_j. Values lie in `[2 − (1+√3)², 2]`.
pub fn intensity_modulation(
    grating: &RecordedGrating,
    signal_modes: &[PlaneWaveMode],
    x: f64,
    z: f64,
) -> f64 {
    let phase =
        |m: &PlaneWaveMode| Complex64::from_polar(1.0, m.kx() * x + m.kz() * z);
    let mut field = phase(grating.reference());
    for (amp, mode) in grating.recorded_state().amps().iter().zip(signal_modes) {
        field += amp * phase(mode);
    }
    2.0 - field.norm_sqr()
}

/// Refractive index at `(x, z)`:
/// `n = n₀ (1 + (Δn/n₀)(I_R1 + I_R2 + I_R3)/(6(1+√3)))`.
///
/// The three exposures are recorded incoherently, so their modulations add
/// without cross terms.
pub fn index_profile(spec: &HologramSpec, x: f64, z: f64) -> f64 {
    let total: f64 = spec
        .gratings
        .iter()
        .map(|g| intensity_modulation(g, spec.signal_modes(), x, z))
        .sum();
    let m = spec.config.material();
    m.n0() * (1.0 + m.modulation_ratio() * total / (6.0 * (1.0 + SQRT3)))
}

/// The 6×6 coupled-mode matrix `E'(z) = M E(z)` in the fixed mode ordering
/// (R₁, R₂, R₃, S_a, S_b, S_c).
///
/// Both diagonal 3×3 blocks are exactly zero; the off-diagonal blocks carry
/// `entry(R_i, S_j) = iκ² conj(c_j⁽ⁱ⁾)/ρ_i` and
/// `entry(S_j, R_i) = iκ² c_j⁽ⁱ⁾/σ_j`, which makes the flux-weighted form
/// `D·M + M†·D` vanish identically.
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    entries: Matrix6<Complex64>,
    kappa2: f64,
    rho: [f64; 3],
    sigma: [f64; 3],
}

impl CouplingMatrix {
    pub fn entries(&self) -> &Matrix6<Complex64> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn kappa2(&self) -> f64 {
        self.kappa2
    }

    pub fn rho(&self) -> [f64; 3] {
        self.rho
    }

    pub fn sigma(&self) -> [f64; 3] {
        self.sigma
    }

    /// Flux weights `(ρ₁, ρ₂, ρ₃, σ_a, σ_b, σ_c)` in mode order.
    pub fn flux_weights(&self) -> [f64; 6] {
        [
            self.rho[0],
            self.rho[1],
            self.rho[2],
            self.sigma[0],
            self.sigma[1],
            self.sigma[2],
        ]
    }

    /// The generator of the depth-reversed flow (entrywise negation; in the
    /// flux-weighted frame this is the adjoint of the forward generator).
    pub fn reversed(&self) -> CouplingMatrix {
        CouplingMatrix {
            entries: -self.entries,
            kappa2: self.kappa2,
            rho: self.rho,
            sigma: self.sigma,
        }
    }
}

/// Assembles the coupled-mode matrix for a hologram spec.
pub fn build_coupling_matrix(spec: &HologramSpec) -> Result<CouplingMatrix> {
    check_recorded_orthogonality(spec.gratings())?;
    let k2 = kappa2(spec.config());
    let rho = spec.rho();
    let sigma = spec.sigma();
    let i_unit = Complex64::new(0.0, 1.0);
    let mut entries = Matrix6::from_element(Complex64::new(0.0, 0.0));
    for g in spec.gratings() {
        let row = g.index() - 1;
        let coeffs = g.raw_coefficients();
        for (j, c) in coeffs.iter().enumerate() {
            entries[(row, 3 + j)] = i_unit * k2 * c.conj() / rho[row];
            entries[(3 + j, row)] = i_unit * k2 * c / sigma[j];
        }
    }
    if entries.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
        return Err(Error::NonFinite("coupled-mode matrix entries".into()));
    }
    Ok(CouplingMatrix {
        entries,
        kappa2: k2,
        rho,
        sigma,
    })
}
