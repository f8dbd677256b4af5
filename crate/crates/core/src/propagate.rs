//! Integration of the linear coupled-mode system `E'(z) = M E(z)` by two
//! independent routes — unitary matrix exponential and fixed-step RK4 — and
//! conversion of mode amplitudes to flux-weighted diffraction probabilities.

use nalgebra::{Matrix6, Vector6};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::StateVector;
use crate::hologram::CouplingMatrix;

/// The six mode amplitudes in coupled-mode order (R₁, R₂, R₃, S_a, S_b, S_c).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes {
    values: [Complex64; 6],
}

impl ModeAmplitudes {
    pub fn new(values: [Complex64; 6]) -> Result<Self> {
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("mode amplitudes".into()));
        }
        Ok(Self { values })
    }

    pub fn zero() -> Self {
        Self {
            values: [Complex64::new(0.0, 0.0); 6],
        }
    }

    /// Readout initial condition: the signal channels carry the input state
    /// amplitudes and the reference channels start dark.
    pub fn from_signal(input: &StateVector) -> Result<Self> {
        Self::with_reference(input, [Complex64::new(0.0, 0.0); 3])
    }

    /// Compatibility initial condition with unit reference amplitudes
    /// alongside the signal state, selectable from the CLI for
    /// investigation runs.
    pub fn from_signal_with_unit_references(input: &StateVector) -> Result<Self> {
        Self::with_reference(input, [Complex64::new(1.0, 0.0); 3])
    }

    fn with_reference(input: &StateVector, reference: [Complex64; 3]) -> Result<Self> {
        if input.dim() != 3 {
            return Err(Error::DimensionMismatch {
                left: input.dim(),
                right: 3,
            });
        }
        let amps = input.amps();
        Self::new([
            reference[0],
            reference[1],
            reference[2],
            amps[0],
            amps[1],
            amps[2],
        ])
    }

    pub fn values(&self) -> &[Complex64; 6] {
        &self.values
    }

    /// Reference amplitude `R_{i+1}` (0-based `i`).
    pub fn reference(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    /// Signal amplitude `S_j` (0-based `j` over a, b, c).
    pub fn signal(&self, j: usize) -> Complex64 {
        self.values[3 + j]
    }

    fn as_vector(&self) -> Vector6<Complex64> {
        Vector6::from_row_slice(&self.values)
    }

    fn from_vector(v: &Vector6<Complex64>) -> Self {
        let mut values = [Complex64::new(0.0, 0.0); 6];
        for (slot, x) in values.iter_mut().zip(v.iter()) {
            *slot = *x;
        }
        Self { values }
    }
}

/// z-directed power `Σ ρ_i |R_i|² + Σ σ_j |S_j|²`, the conserved quantity of
/// the lossless coupled-mode system.
pub fn flux(amps: &ModeAmplitudes, rho: &[f64; 3], sigma: &[f64; 3]) -> f64 {
    let v = amps.values();
    rho.iter()
        .zip(v[0..3].iter())
        .chain(sigma.iter().zip(v[3..6].iter()))
        .map(|(w, a)| w * a.norm_sqr())
        .sum()
}

/// Flux-weighted probabilities `p_k = w_k |E_k|² / flux`; they sum to 1 up to
/// rounding for any nonzero amplitude vector.
pub fn probabilities(
    amps: &ModeAmplitudes,
    rho: &[f64; 3],
    sigma: &[f64; 3],
) -> Result<[f64; 6]> {
    let total = flux(amps, rho, sigma);
    if total <= 0.0 {
        return Err(Error::ZeroFlux);
    }
    let w = [rho[0], rho[1], rho[2], sigma[0], sigma[1], sigma[2]];
    let mut p = [0.0; 6];
    for k in 0..6 {
        p[k] = w[k] * amps.values()[k].norm_sqr() / total;
    }
    Ok(p)
}

/// Exact propagator for a fixed coupling matrix.
///
/// The similarity transform `H = D^{1/2} M D^{-1/2}` with
/// `D = diag(ρ, σ)` is anti-Hermitian, so `K = H/i` is Hermitian and admits a
/// unitary eigendecomposition; evolution to any depth is then a phase
/// rotation in the eigenbasis and conserves flux to rounding.
#[derive(Debug, Clone)]
pub struct Propagator {
    eigenvalues: Vector6<f64>,
    vectors: Matrix6<Complex64>,
    d_sqrt: [f64; 6],
    rho: [f64; 3],
    sigma: [f64; 3],
}

impl Propagator {
    pub fn new(matrix: &CouplingMatrix) -> Result<Self> {
        let w = matrix.flux_weights();
        if w.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(Error::InvalidSpec(
                "flux weights must be positive and finite".into(),
            ));
        }
        if matrix
            .entries()
            .iter()
            .any(|e| !e.re.is_finite() || !e.im.is_finite())
        {
            return Err(Error::NonFinite("coupling matrix".into()));
        }
        let d_sqrt: [f64; 6] = std::array::from_fn(|k| w[k].sqrt());
        let mut hermitian = Matrix6::from_element(Complex64::new(0.0, 0.0));
        for r in 0..6 {
            for c in 0..6 {
                // K = (D^{1/2} M D^{-1/2}) / i
                let h = matrix.entry(r, c) * (d_sqrt[r] / d_sqrt[c]);
                hermitian[(r, c)] = h / Complex64::new(0.0, 1.0);
            }
        }
        let (eigenvalues, vectors) = hermitian_eigen(&hermitian);
        Ok(Self {
            eigenvalues,
            vectors,
            d_sqrt,
            rho: matrix.rho(),
            sigma: matrix.sigma(),
        })
    }

    pub fn rho(&self) -> [f64; 3] {
        self.rho
    }

    pub fn sigma(&self) -> [f64; 3] {
        self.sigma
    }

    /// Largest coupling frequency (rad/m): the spectral radius of the
    /// flux-frame generator.
    pub fn max_frequency(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Step size giving at least 100 RK4 steps per quarter cycle of the
    /// fastest coupling frequency.
    pub fn recommended_step(&self) -> f64 {
        std::f64::consts::PI / (200.0 * self.max_frequency())
    }

    /// `exp(M z) · initial` for `z ≥ 0`.
    pub fn evolve(&self, initial: &ModeAmplitudes, z: f64) -> Result<ModeAmplitudes> {
        if z < 0.0 {
            return Err(Error::NegativeDepth { z });
        }
        if z == 0.0 {
            return Ok(initial.clone());
        }
        let mut y = initial.as_vector();
        for k in 0..6 {
            y[k] *= Complex64::new(self.d_sqrt[k], 0.0);
        }
        let mut coeffs = self.vectors.adjoint() * y;
        for k in 0..6 {
            coeffs[k] *= Complex64::from_polar(1.0, self.eigenvalues[k] * z);
        }
        let mut out = self.vectors * coeffs;
        for k in 0..6 {
            out[k] /= Complex64::new(self.d_sqrt[k], 0.0);
        }
        Ok(ModeAmplitudes::from_vector(&out))
    }

    /// Probabilities of the evolved state at depth `z`.
    pub fn probabilities_at(&self, initial: &ModeAmplitudes, z: f64) -> Result<[f64; 6]> {
        let amps = self.evolve(initial, z)?;
        probabilities(&amps, &self.rho, &self.sigma)
    }

    /// The transfer matrix `exp(M z)` in mode coordinates.
    pub fn transfer_matrix(&self, z: f64) -> Matrix6<Complex64> {
        let mut phases = Matrix6::from_element(Complex64::new(0.0, 0.0));
        for k in 0..6 {
            phases[(k, k)] = Complex64::from_polar(1.0, self.eigenvalues[k] * z);
        }
        let flux_frame = self.vectors * phases * self.vectors.adjoint();
        let mut out = flux_frame;
        for r in 0..6 {
            for c in 0..6 {
                out[(r, c)] *= self.d_sqrt[c] / self.d_sqrt[r];
            }
        }
        out
    }

    /// The flux-frame transfer operator `U(z) = D^{1/2} exp(M z) D^{-1/2}`,
    /// unitary up to rounding.
    pub fn flux_frame_transfer(&self, z: f64) -> Matrix6<Complex64> {
        let mut phases = Matrix6::from_element(Complex64::new(0.0, 0.0));
        for k in 0..6 {
            phases[(k, k)] = Complex64::from_polar(1.0, self.eigenvalues[k] * z);
        }
        self.vectors * phases * self.vectors.adjoint()
    }
}

/// Unitary eigendecomposition of a 6×6 Hermitian matrix by cyclic complex
/// Jacobi rotations: returns real eigenvalues and the unitary matrix of
/// eigenvectors with `K = V Λ V†` to machine precision. Jacobi keeps full
/// accuracy on clustered and degenerate spectra, which this system has in
/// the degenerate-kz geometry.
fn hermitian_eigen(k: &Matrix6<Complex64>) -> (Vector6<f64>, Matrix6<Complex64>) {
    let mut a = *k;
    let mut v = Matrix6::identity();
    let frob_sq: f64 = a.iter().map(|e| e.norm_sqr()).sum();
    let tol_sq = frob_sq * 2.5e-31;
    for _sweep in 0..40 {
        let mut off_sq = 0.0;
        for p in 0..6 {
            for q in (p + 1)..6 {
                off_sq += 2.0 * a[(p, q)].norm_sqr();
            }
        }
        if off_sq <= tol_sq {
            break;
        }
        for p in 0..6 {
            for q in (p + 1)..6 {
                let beta = a[(p, q)];
                let beta_mod = beta.norm();
                if beta_mod == 0.0 {
                    continue;
                }
                // Diagonalize the 2x2 Hermitian block [[alpha, beta],
                // [conj(beta), gamma]]: strip the phase of beta, then apply
                // the real Jacobi rotation with the inner tangent root.
                let alpha = a[(p, p)].re;
                let gamma = a[(q, q)].re;
                let phase = beta / beta_mod;
                let tau = (gamma - alpha) / (2.0 * beta_mod);
                // Smaller-magnitude root of t² − 2τt − 1 = 0 for this
                // rotation layout.
                let t = -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column rotation: (col_p, col_q) <- (c*col_p + s*phasē*col_q,
                // -s*phase*col_p + c*col_q), then the matching row rotation.
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(-s, 0.0) * phase;
                let jqp = Complex64::new(s, 0.0) * phase.conj();
                let jqq = Complex64::new(c, 0.0);
                for r in 0..6 {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = arp * jpp + arq * jqp;
                    a[(r, q)] = arp * jpq + arq * jqq;
                }
                for col in 0..6 {
                    let apc = a[(p, col)];
                    let aqc = a[(q, col)];
                    a[(p, col)] = jpp.conj() * apc + jqp.conj() * aqc;
                    a[(q, col)] = jpq.conj() * apc + jqq.conj() * aqc;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                for r in 0..6 {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp * jpp + vrq * jqp;
                    v[(r, q)] = vrp * jpq + vrq * jqq;
                }
            }
        }
    }
    let mut eigenvalues = Vector6::zeros();
    for i in 0..6 {
        eigenvalues[i] = a[(i, i)].re;
    }
    (eigenvalues, v)
}

/// Single-shot matrix-exponential propagation `exp(M z) · initial`.
pub fn propagate_expm(
    matrix: &CouplingMatrix,
    initial: &ModeAmplitudes,
    z: f64,
) -> Result<ModeAmplitudes> {
    Propagator::new(matrix)?.evolve(initial, z)
}

/// A sampled propagation history with per-sample probabilities.
#[derive(Debug, Clone)]
pub struct Trajectory {
    z_samples: Vec<f64>,
    amplitudes: Vec<ModeAmplitudes>,
    probabilities: Vec<[f64; 6]>,
}

impl Trajectory {
    pub fn z_samples(&self) -> &[f64] {
        &self.z_samples
    }

    pub fn amplitudes(&self) -> &[ModeAmplitudes] {
        &self.amplitudes
    }

    pub fn probabilities(&self) -> &[[f64; 6]] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.z_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z_samples.is_empty()
    }

    pub fn endpoint(&self) -> &ModeAmplitudes {
        self.amplitudes.last().expect("trajectory has samples")
    }

    /// Writes the trajectory as CSV with columns
    /// `z_m, p_r1, p_r2, p_r3, p_sa, p_sb, p_sc`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "z_m,p_r1,p_r2,p_r3,p_sa,p_sb,p_sc")?;
        for (z, p) in self.z_samples.iter().zip(self.probabilities.iter()) {
            let cols: Vec<String> = std::iter::once(*z)
                .chain(p.iter().copied())
                .map(crate::report::format_sig9)
                .collect();
            writeln!(w, "{}", cols.join(","))?;
        }
        Ok(())
    }

    pub(crate) fn from_samples(
        z_samples: Vec<f64>,
        amplitudes: Vec<ModeAmplitudes>,
        rho: &[f64; 3],
        sigma: &[f64; 3],
    ) -> Result<Self> {
        let probabilities = amplitudes
            .iter()
            .map(|a| probabilities(a, rho, sigma))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            z_samples,
            amplitudes,
            probabilities,
        })
    }
}

/// Classical fixed-step fourth-order Runge-Kutta integration of
/// `E' = M E` from 0 to `z`, sampled every `step` (with one short final step
/// when `z` is not a multiple of `step`).
pub fn propagate_rk4(
    matrix: &CouplingMatrix,
    initial: &ModeAmplitudes,
    z: f64,
    step: f64,
) -> Result<Trajectory> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::InvalidStep { step });
    }
    if z < 0.0 {
        return Err(Error::NegativeDepth { z });
    }
    if step > z && z > 0.0 {
        return Err(Error::InvalidStep { step });
    }
    let m = matrix.entries();
    let rho = matrix.rho();
    let sigma = matrix.sigma();
    let deriv = |e: &Vector6<Complex64>| m * e;

    let mut state = initial.as_vector();
    let mut zs = vec![0.0];
    let mut amps = vec![initial.clone()];
    let n_full = if z > 0.0 { (z / step).floor() as u64 } else { 0 };
    let mut current_z = 0.0;
    let advance = |state: &mut Vector6<Complex64>, h: f64| {
        let k1 = deriv(state);
        let k2 = deriv(&(*state + k1 * Complex64::new(h / 2.0, 0.0)));
        let k3 = deriv(&(*state + k2 * Complex64::new(h / 2.0, 0.0)));
        let k4 = deriv(&(*state + k3 * Complex64::new(h, 0.0)));
        *state += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4)
            * Complex64::new(h / 6.0, 0.0);
    };
    for k in 1..=n_full {
        advance(&mut state, step);
        current_z = step * k as f64;
        zs.push(current_z);
        amps.push(ModeAmplitudes::from_vector(&state));
    }
    let remainder = z - current_z;
    if remainder > step * 1e-9 {
        advance(&mut state, remainder);
        zs.push(z);
        amps.push(ModeAmplitudes::from_vector(&state));
    }
    Trajectory::from_samples(zs, amps, &rho, &sigma)
}
