//! Coupled-mode simulator for triple-multiplexed thick-hologram sorters of
//! photonic mutually-unbiased-basis (MUB) states.
//!
//! A thick phase hologram that records each state of one MUB against its own
//! reference plane wave acts as a projection operator on the full set of MUB
//! states: matched inputs route cleanly into their reference direction while
//! unbiased inputs split evenly three ways. This crate models that device
//! with coupled-mode theory over six primary plane-wave modes and derives
//! twelve-state QKD quality metrics from the simulated response.
//!
//! Module map:
//! - [`hilbert`]: complex state vectors, the MUB table, projection operators.
//! - [`optics`]: plane-wave geometry, tilt quantum numbers, 4-momentum.
//! - [`hologram`]: grating model, index profile, the 6×6 coupling matrix.
//! - [`propagate`]: matrix-exponential and RK4 integration, probabilities.
//! - [`sorter`]: experiment drivers — depth search, crosstalk tables, curves.
//! - [`qkd`]: sifted-key fraction and symbol error rates, analytic and
//!   Monte Carlo.
//! - [`config`], [`report`], [`commands`]: CLI configuration and
//!   deterministic CSV/JSON/SVG output.

pub mod commands;
pub mod config;
pub mod error;
pub mod hilbert;
pub mod hologram;
pub mod optics;
pub mod propagate;
pub mod qkd;
pub mod report;
pub mod sorter;

pub use error::{Error, Result};
