//! Run configuration: a flat JSON document with built-in PTR-glass defaults.
//!
//! Fields use human-scale units (nm, mm, µm) as their names indicate; the
//! conversion to SI happens exactly once, in [`RunConfig::to_sorter_config`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{Material, OpticalConfig};
use crate::sorter::SorterConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n0: f64,
    pub delta_n: f64,
    pub lambda_nm: f64,
    pub aperture_mm: f64,
    pub emulsion_mm: f64,
    pub mub_index: usize,
    pub reference_tilts: [f64; 3],
    pub signal_tilts: [f64; 3],
    pub degenerate_kz: bool,
    pub rk4_step_um: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n0: 1.4865,
            delta_n: 0.0005,
            lambda_nm: 1085.0,
            aperture_mm: 10.0,
            emulsion_mm: 10.0,
            mub_index: 4,
            reference_tilts: [2000.0, 3000.0, 4000.0],
            signal_tilts: [1.0, 2.0, 3.0],
            degenerate_kz: false,
            rk4_step_um: 10.0,
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Parses and validates a config document. Missing fields take the
    /// defaults; unknown fields are rejected.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: RunConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidConfig(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_json_str(&text)
    }

    /// Runs the full module-level validation without building anything.
    pub fn validate(&self) -> Result<()> {
        let sc = self.to_sorter_config()?;
        crate::optics::make_modes(sc.reference_tilts, sc.signal_tilts, &sc.optical)?;
        Ok(())
    }

    /// Converts to SI units and validates against the optics preconditions.
    pub fn to_sorter_config(&self) -> Result<SorterConfig> {
        if !(1..=4).contains(&self.mub_index) {
            return Err(Error::InvalidConfig(format!(
                "mub_index = {} out of range 1..=4",
                self.mub_index
            )));
        }
        if !self.rk4_step_um.is_finite() || self.rk4_step_um <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "rk4_step_um = {} must be positive and finite",
                self.rk4_step_um
            )));
        }
        let material = Material::new(self.n0, self.delta_n)?;
        let optical = OpticalConfig::new(
            material,
            self.lambda_nm * 1e-9,
            self.aperture_mm * 1e-3,
            self.emulsion_mm * 1e-3,
        )?;
        Ok(SorterConfig {
            optical,
            mub_index: self.mub_index,
            reference_tilts: self.reference_tilts,
            signal_tilts: self.signal_tilts,
            degenerate_kz: self.degenerate_kz,
        })
    }

    /// RK4 step in meters.
    pub fn rk4_step_m(&self) -> f64 {
        self.rk4_step_um * 1e-6
    }
}
