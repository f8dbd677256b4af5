//! Twelve-state QKD desk metrics derived from sorter crosstalk tables.
//!
//! The error model is measurement-only: preparation and the channel are
//! ideal, so all symbol errors come from sorter crosstalk. Both parties draw
//! their basis independently from the same distribution; a round is sifted
//! when the choices coincide, and a sifted symbol decodes correctly when the
//! photon lands in the reference direction matching Alice's state. A
//! residual (undiffracted) outcome counts as a wrong decode.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::sorter::CrosstalkTable;

/// Analytic QKD quality metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct QkdMetrics {
    /// Probability that Alice and Bob choose the same basis: `Σ p_b²`.
    pub sift_fraction: f64,
    /// Probability of a wrong decode given matched bases, averaged over the
    /// per-basis rates with the conditional basis-use weights `p_b²/Σp²`.
    pub symbol_error_rate: f64,
    pub per_basis_ser: [f64; 4],
}

/// Result of a Monte Carlo key exchange.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeOutcome {
    pub metrics: QkdMetrics,
    pub n_symbols: u64,
    pub n_sifted: u64,
    pub per_basis_sifted: [u64; 4],
    pub per_basis_errors: [u64; 4],
}

fn validate_inputs(tables: &[CrosstalkTable; 4], basis_probs: &[f64; 4]) -> Result<()> {
    if basis_probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidConfig(
            "basis probabilities must be finite and non-negative".into(),
        ));
    }
    let total: f64 = basis_probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "basis probabilities sum to {total}, expected 1"
        )));
    }
    for (b, table) in tables.iter().enumerate() {
        if table.rows().len() != 12 {
            return Err(Error::InvalidConfig(format!(
                "crosstalk table {} has {} rows, expected 12",
                b + 1,
                table.rows().len()
            )));
        }
    }
    Ok(())
}

/// Analytic metrics from the four sorter tables, each evaluated at its own
/// operating depth. `basis_probs` is the common basis-choice distribution.
pub fn qkd_metrics(
    tables: &[CrosstalkTable; 4],
    basis_probs: [f64; 4],
) -> Result<QkdMetrics> {
    validate_inputs(tables, &basis_probs)?;
    let mut per_basis_ser = [0.0; 4];
    for b in 0..4 {
        let correct: f64 = (0..3)
            .map(|s| tables[b].row(b + 1, s).reference_probs[s])
            .sum::<f64>()
            / 3.0;
        per_basis_ser[b] = 1.0 - correct;
    }
    let sift_fraction: f64 = basis_probs.iter().map(|p| p * p).sum();
    let symbol_error_rate = basis_probs
        .iter()
        .zip(per_basis_ser.iter())
        .map(|(p, ser)| p * p * ser)
        .sum::<f64>()
        / sift_fraction;
    Ok(QkdMetrics {
        sift_fraction,
        symbol_error_rate,
        per_basis_ser,
    })
}

/// Seeded Monte Carlo exchange of `n_symbols` qudits. The same seed always
/// produces bit-identical output; empirical rates converge to
/// [`qkd_metrics`] as `n_symbols` grows.
pub fn simulate_exchange(
    tables: &[CrosstalkTable; 4],
    basis_probs: [f64; 4],
    n_symbols: u64,
    seed: u64,
) -> Result<ExchangeOutcome> {
    validate_inputs(tables, &basis_probs)?;
    if n_symbols == 0 {
        return Err(Error::InvalidConfig("n_symbols must be at least 1".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut per_basis_sifted = [0u64; 4];
    let mut per_basis_errors = [0u64; 4];
    for _ in 0..n_symbols {
        let alice = sample_index(&mut rng, &basis_probs);
        let state = rng.gen_range(0..3usize);
        let bob = sample_index(&mut rng, &basis_probs);
        if alice != bob {
            continue;
        }
        per_basis_sifted[alice] += 1;
        let row = tables[alice].row(alice + 1, state);
        let outcome_probs = [
            row.reference_probs[0],
            row.reference_probs[1],
            row.reference_probs[2],
            row.residual,
        ];
        let outcome = sample_index(&mut rng, &outcome_probs);
        if outcome != state {
            per_basis_errors[alice] += 1;
        }
    }
    let n_sifted: u64 = per_basis_sifted.iter().sum();
    let n_errors: u64 = per_basis_errors.iter().sum();
    let mut per_basis_ser = [0.0; 4];
    for b in 0..4 {
        if per_basis_sifted[b] > 0 {
            per_basis_ser[b] = per_basis_errors[b] as f64 / per_basis_sifted[b] as f64;
        }
    }
    let metrics = QkdMetrics {
        sift_fraction: n_sifted as f64 / n_symbols as f64,
        symbol_error_rate: if n_sifted > 0 {
            n_errors as f64 / n_sifted as f64
        } else {
            0.0
        },
        per_basis_ser,
    };
    Ok(ExchangeOutcome {
        metrics,
        n_symbols,
        n_sifted,
        per_basis_sifted,
        per_basis_errors,
    })
}

fn sample_index<R: Rng, const N: usize>(rng: &mut R, probs: &[f64; N]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    N - 1
}
