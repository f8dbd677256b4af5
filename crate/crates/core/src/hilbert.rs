//! Hilbert-space arithmetic over the planewave basis: roots of unity, the
//! complete set of mutually unbiased bases, and the sorter projection
//! operator.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance applied when validating norms and overlaps.
pub const NORM_TOL: f64 = 1e-12;

/// `exp(i 2π power / d)`: the `power`-th power of the primitive d-th root of
/// unity. The exponent is reduced modulo `d` before evaluation so full cycles
/// land exactly on 1.
pub fn omega(d: usize, power: i64) -> Result<Complex64> {
    if d < 2 {
        return Err(Error::InvalidDimension { dim: d });
    }
    let r = power.rem_euclid(d as i64);
    if r == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let angle = 2.0 * std::f64::consts::PI * (r as f64) / (d as f64);
    Ok(Complex64::from_polar(1.0, angle))
}

/// A normalized pure state over the planewave basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 {
            return Err(Error::InvalidState("zero-norm amplitude vector".into()));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { amps })
    }

    /// The computational basis state `|index⟩` in dimension `dim`.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        if index >= dim {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// `⟨u|v⟩ = Σ conj(u_j) v_j`.
pub fn inner(u: &StateVector, v: &StateVector) -> Result<Complex64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    Ok(u.amps
        .iter()
        .zip(v.amps.iter())
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Phase exponents of the nine superposition states, bases 2..4, in the
/// row order a, b, c over components (|a⟩, |b⟩, |c⟩).
const D3_EXPONENTS: [[[i64; 3]; 3]; 3] = [
    [[0, 0, 0], [0, 1, 2], [0, 2, 1]], // basis 2
    [[0, 0, 1], [0, 1, 0], [0, 2, 2]], // basis 3
    [[0, 0, 2], [0, 1, 1], [0, 2, 0]], // basis 4
];

/// The complete set of `d + 1` mutually unbiased bases of a d-dimensional
/// Hilbert space, with the computational (planewave) basis as basis 1.
///
/// States are stored normalized; the integer-phase construction coefficients
/// are kept alongside because the grating model consumes them unnormalized.
#[derive(Debug, Clone)]
pub struct MubTable {
    dim: usize,
    bases: Vec<Vec<StateVector>>,
    raw: Vec<Vec<Vec<Complex64>>>,
}

/// Builds the MUB table for dimension `d`.
///
/// `d = 3` yields the cube-root-of-unity table exactly; any other odd prime
/// uses the quadratic construction (state `m` of basis `j` has components
/// `ω^(j k² + m k)`). Even or composite `d` is rejected.
pub fn build_mub_table(d: usize) -> Result<MubTable> {
    MubTable::build(d)
}

impl MubTable {
    pub fn build(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension { dim: d });
        }
        if d.is_multiple_of(2) || !is_prime(d) {
            return Err(Error::UnsupportedDimension { dim: d });
        }
        let mut raw: Vec<Vec<Vec<Complex64>>> = Vec::with_capacity(d + 1);
        let mut computational = Vec::with_capacity(d);
        for s in 0..d {
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            v[s] = Complex64::new(1.0, 0.0);
            computational.push(v);
        }
        raw.push(computational);
        if d == 3 {
            for basis in &D3_EXPONENTS {
                let mut states = Vec::with_capacity(3);
                for exps in basis {
                    states.push(
                        exps.iter()
                            .map(|&e| omega(3, e))
                            .collect::<Result<Vec<_>>>()?,
                    );
                }
                raw.push(states);
            }
        } else {
            for j in 1..=d as i64 {
                let mut states = Vec::with_capacity(d);
                for m in 0..d as i64 {
                    let mut v = Vec::with_capacity(d);
                    for k in 0..d as i64 {
                        v.push(omega(d, j * k * k + m * k)?);
                    }
                    states.push(v);
                }
                raw.push(states);
            }
        }
        let bases = raw
            .iter()
            .map(|basis| {
                basis
                    .iter()
                    .map(|v| StateVector::new(v.clone()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim: d, bases, raw })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of bases, `d + 1`.
    pub fn num_bases(&self) -> usize {
        self.bases.len()
    }

    /// Basis `index` (1-based, matching the MUB₁..MUB₄ naming).
    pub fn basis(&self, index: usize) -> Result<&[StateVector]> {
        self.check_basis(index)?;
        Ok(&self.bases[index - 1])
    }

    /// State `state` (0-based) of basis `basis` (1-based).
    pub fn state(&self, basis: usize, state: usize) -> Result<&StateVector> {
        self.check_basis(basis)?;
        self.check_state(state)?;
        Ok(&self.bases[basis - 1][state])
    }

    /// The unnormalized construction coefficients of a state: unit-modulus
    /// phases for the superposition bases, a unit vector for basis 1.
    pub fn raw_coefficients(&self, basis: usize, state: usize) -> Result<&[Complex64]> {
        self.check_basis(basis)?;
        self.check_state(state)?;
        Ok(&self.raw[basis - 1][state])
    }

    /// Label of the form `a4`: state letter plus 1-based basis index.
    pub fn state_label(&self, basis: usize, state: usize) -> String {
        let letter = if state < 26 {
            ((b'a' + state as u8) as char).to_string()
        } else {
            format!("s{state}")
        };
        format!("{letter}{basis}")
    }

    /// Labels of all `(d+1) · d` states in table order (basis-major).
    pub fn labels(&self) -> Vec<String> {
        (1..=self.num_bases())
            .flat_map(|b| (0..self.dim).map(move |s| (b, s)))
            .map(|(b, s)| self.state_label(b, s))
            .collect()
    }

    fn check_basis(&self, index: usize) -> Result<()> {
        if index == 0 || index > self.num_bases() {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range 1..={}",
                self.num_bases()
            )));
        }
        Ok(())
    }

    fn check_state(&self, index: usize) -> Result<()> {
        if index >= self.dim {
            return Err(Error::InvalidState(format!(
                "state index {index} out of range for dimension {}",
                self.dim
            )));
        }
        Ok(())
    }
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// The sorter projection operator: the states of one MUB paired with the
/// reference-mode identifiers they diffract into.
#[derive(Debug, Clone)]
pub struct Projector {
    mub_index: usize,
    recorded: Vec<StateVector>,
    reference_labels: Vec<String>,
}

impl Projector {
    /// Projector onto basis `mub_index` of `table`, with references r1..rd.
    pub fn for_basis(table: &MubTable, mub_index: usize) -> Result<Self> {
        let recorded = table.basis(mub_index)?.to_vec();
        let reference_labels = (1..=table.dim()).map(|i| format!("r{i}")).collect();
        Ok(Self {
            mub_index,
            recorded,
            reference_labels,
        })
    }

    pub fn mub_index(&self) -> usize {
        self.mub_index
    }

    pub fn recorded(&self) -> &[StateVector] {
        &self.recorded
    }

    pub fn reference_labels(&self) -> &[String] {
        &self.reference_labels
    }

    /// Amplitudes diffracted onto each reference: `⟨recorded_i | input⟩`.
    ///
    /// The recorded set is an orthonormal basis, so the squared moduli sum
    /// to 1 for any normalized input.
    pub fn apply(&self, input: &StateVector) -> Result<Vec<Complex64>> {
        self.recorded
            .iter()
            .map(|rec| inner(rec, input))
            .collect()
    }
}

/// Free-function form of [`Projector::apply`].
pub fn apply_projector(p: &Projector, input: &StateVector) -> Result<Vec<Complex64>> {
    p.apply(input)
}
