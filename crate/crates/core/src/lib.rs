//! Joint transmit beamforming and antenna selection for secrecy-rate
//! optimization in multiuser downlink systems with eavesdroppers.
//!
//! A base station with more antennas than RF chains must pick which
//! antennas to drive and how to beamform so that the weighted secrecy
//! sum-rate (WSSR) across users is maximized while colluding eavesdroppers
//! overhear. The crate provides:
//!
//! - [`model`]: domain types and exact SINR / leakage / secrecy-rate metrics;
//! - [`numerics`]: Hermitian eigendecomposition, SPD solve, bisection;
//! - [`transforms`]: the fractional-programming surrogate (auxiliary
//!   variables with closed-form updates) that makes the WSSR tractable;
//! - [`pdd`]: a penalty dual decomposition solver treating the 0/1
//!   selection exactly via an augmented Lagrangian;
//! - [`so`]: a two-stage heuristic (beamform on all antennas, then greedy
//!   selection);
//! - [`benchmarks`]: random / energy-based / MRT baselines;
//! - [`sim`]: seeded Rayleigh-fading Monte Carlo harness with paired draws.

pub mod benchmarks;
pub mod error;
pub mod model;
pub mod numerics;
pub mod pdd;
pub mod sim;
pub mod so;
pub mod testutil;
pub mod transforms;

pub use error::{Error, Result};
pub use model::{
    eve_snr, g_bound, secrecy_rate, sinr_ut, wssr, Beamformer, ChannelSet, SecrecyReport,
    SelectionMode, SelectionState, SystemConfig,
};
