//! Domain types and exact performance metrics.
//!
//! A base station with M antennas but only N < M RF chains serves K users
//! while J eavesdroppers listen. The antenna switch is a 0/1 vector s
//! applied as a diagonal mask, so the effective channel seen through the
//! precoder column w_k is h_kᴴ diag(s) w_k. Everything in this module
//! evaluates the exact metrics:
//!
//!   sinr_k     = |h_kᴴ Δ w_k|² / (σ²_k + Σ_{i≠k} |h_kᴴ Δ w_i|²)
//!   eve_snr_k  = Σ_j |g_jᴴ Δ w_k|² / δ²_j           (worst case: Eves collude
//!                                                      and cancel interference)
//!   rate_k     = [log2(1+sinr_k) − log2(1+eve_snr_k)]⁺   bits/s/Hz
//!   wssr       = Σ_k weight_k · rate_k
//!
//! Rates are in bits throughout this module; the solvers keep their
//! surrogate objectives in natural log and convert at the reporting edge.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Static scenario parameters. Powers are linear watts; dB conversions
/// happen at the CLI boundary only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemConfig {
    pub num_antennas: usize,
    pub num_rf_chains: usize,
    pub num_users: usize,
    pub num_eves: usize,
    pub power_budget: f64,
    /// QoS weight per user, nonnegative.
    pub weights: Vec<f64>,
    /// Receiver noise power per user, watts.
    pub noise_ut: Vec<f64>,
    /// Receiver noise power per eavesdropper, watts.
    pub noise_eve: Vec<f64>,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Err(Error::InvalidConfig { reason });
        if self.num_rf_chains < 1 || self.num_rf_chains >= self.num_antennas {
            return fail(format!(
                "need 1 <= rf_chains < antennas, got rf_chains={} antennas={}",
                self.num_rf_chains, self.num_antennas
            ));
        }
        if self.num_users < 1 {
            return fail("need at least one user".into());
        }
        if self.num_eves < 1 {
            return fail("need at least one eavesdropper".into());
        }
        if !(self.power_budget.is_finite() && self.power_budget > 0.0) {
            return fail(format!("power budget must be positive, got {}", self.power_budget));
        }
        if self.weights.len() != self.num_users {
            return fail(format!(
                "weights length {} != num_users {}",
                self.weights.len(),
                self.num_users
            ));
        }
        if self.noise_ut.len() != self.num_users {
            return fail(format!(
                "noise_ut length {} != num_users {}",
                self.noise_ut.len(),
                self.num_users
            ));
        }
        if self.noise_eve.len() != self.num_eves {
            return fail(format!(
                "noise_eve length {} != num_eves {}",
                self.noise_eve.len(),
                self.num_eves
            ));
        }
        if self.weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return fail("user weights must be finite and nonnegative".into());
        }
        if self.noise_ut.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return fail("user noise powers must be positive".into());
        }
        if self.noise_eve.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return fail("eavesdropper noise powers must be positive".into());
        }
        Ok(())
    }
}

/// Channel matrices: column k of `h` is the user-k vector, column j of `g`
/// the eavesdropper-j vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h: DMatrix<Complex64>,
    pub g: DMatrix<Complex64>,
}

impl ChannelSet {
    pub fn validate(&self, cfg: &SystemConfig) -> Result<()> {
        let m = cfg.num_antennas;
        if self.h.nrows() != m || self.h.ncols() != cfg.num_users {
            return Err(Error::DimensionMismatch {
                context: "ChannelSet.h",
                expected: format!("{m}x{}", cfg.num_users),
                got: format!("{}x{}", self.h.nrows(), self.h.ncols()),
            });
        }
        if self.g.nrows() != m || self.g.ncols() != cfg.num_eves {
            return Err(Error::DimensionMismatch {
                context: "ChannelSet.g",
                expected: format!("{m}x{}", cfg.num_eves),
                got: format!("{}x{}", self.g.nrows(), self.g.ncols()),
            });
        }
        if self
            .h
            .iter()
            .chain(self.g.iter())
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                context: "ChannelSet",
            });
        }
        Ok(())
    }
}

/// Transmit precoder, column per user, entries in √watts.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub w: DMatrix<Complex64>,
}

impl Beamformer {
    pub fn zeros(m: usize, k: usize) -> Self {
        Self {
            w: DMatrix::zeros(m, k),
        }
    }

    /// tr(W Wᴴ) = Σ_k ‖w_k‖², the total transmit power.
    pub fn trace_power(&self) -> f64 {
        self.w.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Power feasibility with the 1e-6 relative slack the contract allows.
    pub fn power_feasible(&self, budget: f64) -> bool {
        self.trace_power() <= budget * (1.0 + 1e-6)
    }

    pub fn validate(&self, cfg: &SystemConfig) -> Result<()> {
        if self.w.nrows() != cfg.num_antennas || self.w.ncols() != cfg.num_users {
            return Err(Error::DimensionMismatch {
                context: "Beamformer",
                expected: format!("{}x{}", cfg.num_antennas, cfg.num_users),
                got: format!("{}x{}", self.w.nrows(), self.w.ncols()),
            });
        }
        if self.w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "Beamformer",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionMode {
    Relaxed,
    Binary,
}

/// Antenna-selection vector together with whether it is a relaxed iterate
/// or an exact 0/1 selection. The diagonal mask diag(s) is never formed;
/// every consumer applies s elementwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionState {
    pub s: DVector<f64>,
    pub mode: SelectionMode,
}

impl SelectionState {
    pub fn relaxed(s: DVector<f64>) -> Self {
        Self {
            s,
            mode: SelectionMode::Relaxed,
        }
    }

    /// Binary selection activating exactly the given antenna indices.
    pub fn binary_from_indices(m: usize, active: &[usize]) -> Self {
        let mut s = DVector::zeros(m);
        for &i in active {
            s[i] = 1.0;
        }
        Self {
            s,
            mode: SelectionMode::Binary,
        }
    }

    pub fn active_indices(&self) -> Vec<usize> {
        self.s
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn validate(&self, cfg: &SystemConfig) -> Result<()> {
        if self.s.len() != cfg.num_antennas {
            return Err(Error::DimensionMismatch {
                context: "SelectionState",
                expected: format!("{}", cfg.num_antennas),
                got: format!("{}", self.s.len()),
            });
        }
        if self.s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "SelectionState",
            });
        }
        if self.mode == SelectionMode::Binary {
            if self.s.iter().any(|&v| v != 0.0 && v != 1.0) {
                return Err(Error::InvariantViolation {
                    context: "SelectionState",
                    detail: "binary mode requires every entry in {0, 1}".into(),
                });
            }
            let active = self.s.iter().filter(|&&v| v == 1.0).count();
            if active != cfg.num_rf_chains {
                return Err(Error::InvariantViolation {
                    context: "SelectionState",
                    detail: format!(
                        "binary mode requires exactly {} active antennas, got {active}",
                        cfg.num_rf_chains
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Exact per-user metrics and their weighted aggregate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SecrecyReport {
    pub gamma: Vec<f64>,
    pub gamma_bar: Vec<f64>,
    /// Per-user secrecy rates, bits/s/Hz, clamped at zero.
    pub rates: Vec<f64>,
    pub wssr: f64,
}

fn check_inputs(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    sel: &SelectionState,
) -> Result<()> {
    ch.validate(cfg)?;
    bf.validate(cfg)?;
    sel.validate(cfg)
}

fn check_user(cfg: &SystemConfig, k: usize) -> Result<()> {
    if k >= cfg.num_users {
        return Err(Error::IndexOutOfRange {
            context: "user index",
            index: k,
            len: cfg.num_users,
        });
    }
    Ok(())
}

/// Inner product xᴴ diag(s) y without materializing the mask.
pub(crate) fn masked_inner(
    x: nalgebra::DVectorView<Complex64>,
    s: &DVector<f64>,
    y: nalgebra::DVectorView<Complex64>,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..s.len() {
        acc += x[m].conj() * s[m] * y[m];
    }
    acc
}

/// SINR at user k under the masked precoder.
pub fn sinr_ut(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    sel: &SelectionState,
    k: usize,
) -> Result<f64> {
    check_inputs(cfg, ch, bf, sel)?;
    check_user(cfg, k)?;
    let h_k = ch.h.column(k);
    let mut signal = 0.0;
    let mut interference = 0.0;
    for i in 0..cfg.num_users {
        let gain = masked_inner(h_k, &sel.s, bf.w.column(i)).norm_sqr();
        if i == k {
            signal = gain;
        } else {
            interference += gain;
        }
    }
    Ok(signal / (cfg.noise_ut[k] + interference))
}

/// Aggregated eavesdropper SNR on user k's stream: the Eves jointly cancel
/// all other streams, so only w_k leaks.
pub fn eve_snr(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    sel: &SelectionState,
    k: usize,
) -> Result<f64> {
    check_inputs(cfg, ch, bf, sel)?;
    check_user(cfg, k)?;
    let w_k = bf.w.column(k);
    let mut snr = 0.0;
    for j in 0..cfg.num_eves {
        snr += masked_inner(ch.g.column(j), &sel.s, w_k).norm_sqr() / cfg.noise_eve[j];
    }
    Ok(snr)
}

/// Secrecy rate of user k, bits/s/Hz, clamped at zero.
pub fn secrecy_rate(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    sel: &SelectionState,
    k: usize,
) -> Result<f64> {
    let gamma = sinr_ut(cfg, ch, bf, sel, k)?;
    let gamma_bar = eve_snr(cfg, ch, bf, sel, k)?;
    Ok((((1.0 + gamma).log2()) - ((1.0 + gamma_bar).log2())).max(0.0))
}

/// Full per-user metric report plus the weighted secrecy sum-rate.
pub fn wssr(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    sel: &SelectionState,
) -> Result<SecrecyReport> {
    check_inputs(cfg, ch, bf, sel)?;
    let k_users = cfg.num_users;
    let mut gamma = Vec::with_capacity(k_users);
    let mut gamma_bar = Vec::with_capacity(k_users);
    let mut rates = Vec::with_capacity(k_users);
    let mut total = 0.0;
    for k in 0..k_users {
        let g = sinr_ut(cfg, ch, bf, sel, k)?;
        let gb = eve_snr(cfg, ch, bf, sel, k)?;
        let rate = ((1.0 + g).log2() - (1.0 + gb).log2()).max(0.0);
        total += cfg.weights[k] * rate;
        gamma.push(g);
        gamma_bar.push(gb);
        rates.push(rate);
    }
    Ok(SecrecyReport {
        gamma,
        gamma_bar,
        rates,
        wssr: total,
    })
}

/// Matched-filter precoder: w_k ∝ h_k with the budget split evenly across
/// users. A user whose channel is numerically zero gets a zero column and
/// its power share moves to the remaining users, keeping tr(WWᴴ) = p
/// whenever any channel is nonzero.
pub fn mrt_beamformer(cfg: &SystemConfig, ch: &ChannelSet) -> Result<Beamformer> {
    ch.validate(cfg)?;
    let norms: Vec<f64> = (0..cfg.num_users).map(|k| ch.h.column(k).norm()).collect();
    let live = norms.iter().filter(|&&n| n > 0.0).count();
    let mut w = DMatrix::zeros(cfg.num_antennas, cfg.num_users);
    if live == 0 {
        return Ok(Beamformer { w });
    }
    let per_user = (cfg.power_budget / live as f64).sqrt();
    for k in 0..cfg.num_users {
        if norms[k] > 0.0 {
            let col = ch.h.column(k) * Complex64::new(per_user / norms[k], 0.0);
            w.set_column(k, &col);
        }
    }
    Ok(Beamformer { w })
}

/// Uniform upper bound on every eavesdropper SNR: g = Σ_j (p/δ²_j)‖g_j‖².
/// Cauchy-Schwarz plus the power budget gives γ̄_k ≤ g for any feasible
/// precoder and any selection with entries in [0, 1].
pub fn g_bound(cfg: &SystemConfig, ch: &ChannelSet) -> Result<f64> {
    ch.validate(cfg)?;
    let mut g = 0.0;
    for j in 0..cfg.num_eves {
        let norm_sq: f64 = ch.g.column(j).iter().map(|z| z.norm_sqr()).sum();
        g += cfg.power_budget / cfg.noise_eve[j] * norm_sq;
    }
    Ok(g)
}
