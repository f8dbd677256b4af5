//! Plane-wave geometry inside the emulsion: waves-of-tilt quantum numbers,
//! 4-momentum components, and the longitudinal wavevector components consumed
//! by the coupled-mode system.
//!
//! All geometry is computed with the in-medium wavenumber `β = 2π n₀/λ`; the
//! tilt quantum numbers are taken as defined inside the glass.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Emulsion material: bulk index and index-modulation depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    n0: f64,
    delta_n: f64,
}

impl Material {
    /// `delta_n = 0` is allowed (unexposed glass); ratios above 1% of the
    /// bulk index leave the coupled-mode validity regime and log a warning.
    pub fn new(n0: f64, delta_n: f64) -> Result<Self> {
        if !n0.is_finite() || n0 <= 1.0 {
            return Err(Error::InvalidMaterial(format!(
                "bulk index n0 = {n0} must be finite and > 1"
            )));
        }
        if !delta_n.is_finite() || delta_n < 0.0 {
            return Err(Error::InvalidMaterial(format!(
                "index modulation delta_n = {delta_n} must be finite and >= 0"
            )));
        }
        if delta_n / n0 > 0.01 {
            log::warn!(
                "delta_n/n0 = {:.3e} exceeds 1e-2; coupled-mode theory is marginal here",
                delta_n / n0
            );
        }
        Ok(Self { n0, delta_n })
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn delta_n(&self) -> f64 {
        self.delta_n
    }

    /// Modulation ratio `Δn/n₀`.
    pub fn modulation_ratio(&self) -> f64 {
        self.delta_n / self.n0
    }
}

/// Material plus the lengths that fix the sorter geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalConfig {
    material: Material,
    lambda: f64,
    aperture_d: f64,
    emulsion_l: f64,
}

impl OpticalConfig {
    /// All lengths in meters (vacuum wavelength, aperture, emulsion depth).
    pub fn new(material: Material, lambda: f64, aperture_d: f64, emulsion_l: f64) -> Result<Self> {
        for (name, v) in [
            ("lambda", lambda),
            ("aperture_d", aperture_d),
            ("emulsion_l", emulsion_l),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} = {v} must be finite and positive"
                )));
            }
        }
        Ok(Self {
            material,
            lambda,
            aperture_d,
            emulsion_l,
        })
    }

    pub fn material(&self) -> &Material {
        &self.material
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn aperture_d(&self) -> f64 {
        self.aperture_d
    }

    pub fn emulsion_l(&self) -> f64 {
        self.emulsion_l
    }

    /// In-medium wavenumber `β = 2π n₀ / λ` (rad/m).
    pub fn beta(&self) -> f64 {
        TAU * self.material.n0 / self.lambda
    }
}

/// Identifier of one of the six primary modes, in the fixed coupled-mode
/// ordering (R₁, R₂, R₃, S_a, S_b, S_c).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeLabel {
    R1,
    R2,
    R3,
    A,
    B,
    C,
}

impl ModeLabel {
    pub const ALL: [ModeLabel; 6] = [
        ModeLabel::R1,
        ModeLabel::R2,
        ModeLabel::R3,
        ModeLabel::A,
        ModeLabel::B,
        ModeLabel::C,
    ];

    pub fn is_reference(&self) -> bool {
        matches!(self, ModeLabel::R1 | ModeLabel::R2 | ModeLabel::R3)
    }

    /// Position in the coupled-mode ordering.
    pub fn index(&self) -> usize {
        match self {
            ModeLabel::R1 => 0,
            ModeLabel::R2 => 1,
            ModeLabel::R3 => 2,
            ModeLabel::A => 3,
            ModeLabel::B => 4,
            ModeLabel::C => 5,
        }
    }
}

impl std::fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModeLabel::R1 => "r1",
            ModeLabel::R2 => "r2",
            ModeLabel::R3 => "r3",
            ModeLabel::A => "a",
            ModeLabel::B => "b",
            ModeLabel::C => "c",
        };
        f.write_str(s)
    }
}

/// A propagating plane wave characterized by its waves of tilt across the
/// aperture. `kx = tilt · 2π/D`, `kz = √(β² − kx²) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveMode {
    label: ModeLabel,
    tilt_waves: f64,
    kx: f64,
    kz: f64,
}

impl PlaneWaveMode {
    pub fn new(label: ModeLabel, tilt_waves: f64, config: &OpticalConfig) -> Result<Self> {
        let p = four_momentum(tilt_waves, config)?;
        Ok(Self {
            label,
            tilt_waves,
            kx: p.px,
            kz: p.pz,
        })
    }

    pub fn label(&self) -> ModeLabel {
        self.label
    }

    pub fn tilt_waves(&self) -> f64 {
        self.tilt_waves
    }

    pub fn kx(&self) -> f64 {
        self.kx
    }

    pub fn kz(&self) -> f64 {
        self.kz
    }
}

/// 4-momentum components of a tilted plane wave, in units of ħ·rad/m with
/// c = 1: `(pt, px, py, pz) = (β, q·2π/D, 0, √(β² − px²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourMomentum {
    pub pt: f64,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl FourMomentum {
    /// Minkowski interval `pt² − px² − py² − pz²`; zero for a null ray.
    pub fn interval(&self) -> f64 {
        self.pt * self.pt - self.px * self.px - self.py * self.py - self.pz * self.pz
    }
}

/// 4-momentum of a plane wave with `tilt_waves` waves of tilt across the
/// aperture. Written so the longitudinal component is regular at zero tilt.
pub fn four_momentum(tilt_waves: f64, config: &OpticalConfig) -> Result<FourMomentum> {
    let beta = config.beta();
    let px = tilt_waves * TAU / config.aperture_d();
    if px.abs() >= beta {
        return Err(Error::EvanescentMode { tilt_waves });
    }
    let pz = if px == 0.0 {
        beta
    } else {
        (beta * beta - px * px).sqrt()
    };
    Ok(FourMomentum {
        pt: beta,
        px,
        py: 0.0,
        pz,
    })
}

/// Builds the six primary modes in coupled-mode order from the three
/// reference and three signal tilts.
///
/// The reference `kz` values are the ρ_i and the signal `kz` values the σ_j
/// of the coupled-mode system. All six tilts must be distinct and
/// propagating; a reference tilt less than 10× the largest signal tilt logs
/// a warning because the gratings then stop being angularly well separated.
pub fn make_modes(
    reference_tilts: [f64; 3],
    signal_tilts: [f64; 3],
    config: &OpticalConfig,
) -> Result<[PlaneWaveMode; 6]> {
    let all: [f64; 6] = [
        reference_tilts[0],
        reference_tilts[1],
        reference_tilts[2],
        signal_tilts[0],
        signal_tilts[1],
        signal_tilts[2],
    ];
    for i in 0..6 {
        for j in (i + 1)..6 {
            if all[i] == all[j] {
                return Err(Error::DegenerateGeometry(format!(
                    "tilts {} and {} coincide ({} waves)",
                    ModeLabel::ALL[i],
                    ModeLabel::ALL[j],
                    all[i]
                )));
            }
        }
    }
    let min_ref = reference_tilts.iter().fold(f64::INFINITY, |m, t| m.min(t.abs()));
    let max_sig = signal_tilts.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    if min_ref < 10.0 * max_sig {
        log::warn!(
            "smallest reference tilt ({min_ref} waves) is below 10x the largest signal tilt \
             ({max_sig} waves); reference and signal orders are poorly separated"
        );
    }
    let mut modes = Vec::with_capacity(6);
    for (label, tilt) in ModeLabel::ALL.iter().zip(all.iter()) {
        modes.push(PlaneWaveMode::new(*label, *tilt, config)?);
    }
    Ok(modes.try_into().expect("six modes"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ptr_config() -> OpticalConfig {
        let material = Material::new(1.4865, 0.0005).unwrap();
        OpticalConfig::new(material, 1.085e-6, 0.01, 0.01).unwrap()
    }

    #[test]
    fn beta_for_ptr_glass_at_1085nm() {
        // 2π · 1.4865 / 1.085e-6
        let beta = ptr_config().beta();
        assert!((beta - 8_608_253.418546041).abs() / beta < 1e-12);
    }

    #[test]
    fn beta_unit_case_and_scaling() {
        let m = Material::new(1.0 + 1e-12, 0.0).unwrap();
        let c = OpticalConfig::new(m, TAU, 1.0, 1.0).unwrap();
        assert!((c.beta() - 1.0).abs() < 1e-9);

        let base = ptr_config();
        let doubled = OpticalConfig::new(*base.material(), 2.0 * base.lambda(), 0.01, 0.01).unwrap();
        assert!((doubled.beta() - base.beta() / 2.0).abs() / base.beta() < 1e-15);
    }

    #[test]
    fn modulation_ratio_in_ppm() {
        let m = Material::new(1.4865, 0.0005).unwrap();
        let ppm = m.modulation_ratio() * 1e6;
        assert!((ppm - 336.4).abs() < 0.05, "got {ppm}");
        assert_eq!(ppm.round() as i64, 336);
    }

    #[test]
    fn four_momentum_at_normal_incidence() {
        let c = ptr_config();
        let p = four_momentum(0.0, &c).unwrap();
        let beta = c.beta();
        assert_eq!(p.pt, beta);
        assert_eq!(p.px, 0.0);
        assert_eq!(p.py, 0.0);
        assert_eq!(p.pz, beta);
    }

    #[test]
    fn four_momentum_three_waves_of_tilt() {
        let c = ptr_config();
        let p = four_momentum(3.0, &c).unwrap();
        assert!((p.px - 1884.9555921538758).abs() / p.px < 1e-12);
        assert!((p.pz - 8_608_253.212170983).abs() / p.pz < 1e-12);
    }

    #[test]
    fn four_momentum_is_null() {
        let c = ptr_config();
        let beta2 = c.beta() * c.beta();
        for q in [0.0, 0.5, 1.0, 3.0, 100.0, 4000.0, -2500.0] {
            let p = four_momentum(q, &c).unwrap();
            assert!(p.interval().abs() / beta2 < 1e-14, "q={q}");
        }
    }

    #[test]
    fn four_momentum_is_odd_in_tilt() {
        let c = ptr_config();
        for q in [0.5, 2.0, 1234.5] {
            let plus = four_momentum(q, &c).unwrap();
            let minus = four_momentum(-q, &c).unwrap();
            assert_eq!(plus.px, -minus.px);
            assert_eq!(plus.pz, minus.pz);
        }
    }

    #[test]
    fn evanescent_tilt_is_rejected() {
        let c = ptr_config();
        // beta * D / 2π ≈ 13700 waves is the propagation limit.
        assert!(matches!(
            four_momentum(20000.0, &c),
            Err(Error::EvanescentMode { .. })
        ));
        assert!(four_momentum(13000.0, &c).is_ok());
    }

    #[test]
    fn default_geometry_mode_table() {
        let c = ptr_config();
        let modes = make_modes([2000.0, 3000.0, 4000.0], [1.0, 2.0, 3.0], &c).unwrap();
        let expect_kz = [
            8_516_037.236516483,
            8_399_343.387046242,
            8_233_193.797136833,
            8_608_253.395615479,
            8_608_253.326823793,
            8_608_253.212170983,
        ];
        for (mode, kz) in modes.iter().zip(expect_kz.iter()) {
            assert!(
                (mode.kz() - kz).abs() / kz < 1e-12,
                "{}: {} vs {}",
                mode.label(),
                mode.kz(),
                kz
            );
            assert!(mode.kz() > 0.0);
        }
        assert_eq!(modes[0].label(), ModeLabel::R1);
        assert_eq!(modes[5].label(), ModeLabel::C);
    }

    #[test]
    fn modes_satisfy_dispersion() {
        let c = ptr_config();
        let modes = make_modes([2000.0, 3000.0, 4000.0], [1.0, 2.0, 3.0], &c).unwrap();
        let beta2 = c.beta() * c.beta();
        for m in &modes {
            let sum = m.kx() * m.kx() + m.kz() * m.kz();
            assert!((sum - beta2).abs() / beta2 < 1e-9, "{}", m.label());
        }
    }

    #[test]
    fn zero_tilt_mode_has_kz_beta_exactly() {
        let c = ptr_config();
        let modes = make_modes([2000.0, 3000.0, 4000.0], [0.0, 2.0, 3.0], &c).unwrap();
        assert_eq!(modes[3].kz(), c.beta());
    }

    #[test]
    fn duplicate_tilts_are_degenerate() {
        let c = ptr_config();
        assert!(matches!(
            make_modes([2000.0, 2000.0, 4000.0], [1.0, 2.0, 3.0], &c),
            Err(Error::DegenerateGeometry(_))
        ));
        assert!(matches!(
            make_modes([2000.0, 3000.0, 4000.0], [1.0, 2.0, 2000.0], &c),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn material_validation() {
        assert!(Material::new(0.9, 0.0005).is_err());
        assert!(Material::new(1.4865, -1e-4).is_err());
        assert!(Material::new(1.4865, 0.0).is_ok());
        assert!(Material::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn config_rejects_nonpositive_lengths() {
        let m = Material::new(1.4865, 0.0005).unwrap();
        assert!(OpticalConfig::new(m, 0.0, 0.01, 0.01).is_err());
        assert!(OpticalConfig::new(m, 1.085e-6, -0.01, 0.01).is_err());
        assert!(OpticalConfig::new(m, 1.085e-6, 0.01, f64::INFINITY).is_err());
    }
}
