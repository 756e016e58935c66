//! Fractional-programming surrogate for the weighted secrecy sum-rate.
//!
//! The exact objective Σ w_k [log2(1+γ_k) − log2(1+γ̄_k)]⁺ is neither
//! smooth nor concave in the precoder. A chain of four equivalences turns
//! it into a surrogate with closed-form block updates:
//!
//! 1. activity weights b_k ∈ [0, w_k] absorb the [·]⁺ (bang-bang optimum);
//! 2. with g an instance-wide upper bound on every γ̄_k, the leakage term
//!    −log(1+γ̄) is rewritten as log(1 + (g−γ̄)/(1+γ̄)) − log(1+g), moving
//!    the fraction into ratio form at the cost of a per-user constant;
//! 3. a Lagrangian dual transform introduces α_k (for the SINR ratio) and
//!    β_k (for the Eve-gap ratio):
//!    f1_k = log(1+α_k) − α_k + (1+α_k)·|h_kᴴΔw_k|²/(Σ_i|h_kᴴΔw_i|²+σ²_k),
//!    f2_k = log(1+β_k) − β_k + (1+β_k)(g−γ̄_k)/(1+g);
//! 4. a quadratic transform with multiplier η_k linearizes f1's fraction:
//!    g1_k = log(1+α_k) − α_k + (1+α_k)·(2ℜ{η_k*·h_kᴴΔw_k}
//!    − |η_k|²(Σ_i|h_kᴴΔw_i|²+σ²_k))
//!
//! The working objective is L = Σ_k b_k (g1_k + f2_k) in natural-log
//! units. At the closed-form auxiliaries every transform is tight, and
//! L/ln2 differs from the exact weighted secrecy sum-rate only by the
//! per-active-user constant log2(1+g) from step 2.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{
    eve_snr, g_bound, masked_inner, sinr_ut, Beamformer, ChannelSet, SelectionMode,
    SelectionState, SystemConfig,
};

/// Auxiliary variables of the surrogate problem, one entry per user.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxState {
    /// Secrecy-activity weights, each in [0, w_k].
    pub b: Vec<f64>,
    /// SINR surrogates (optimal value: the exact SINR).
    pub alpha: Vec<f64>,
    /// Eve-gap surrogates (optimal value: (g − γ̄_k)/(1 + γ̄_k)).
    pub beta: Vec<f64>,
    /// Quadratic-transform multipliers.
    pub eta: Vec<Complex64>,
}

impl AuxState {
    /// All auxiliaries at the closed-form optimum for the given (W, s),
    /// with b set to the full weights (no user deactivated yet).
    pub fn tight(
        cfg: &SystemConfig,
        ch: &ChannelSet,
        bf: &Beamformer,
        sel: &SelectionState,
    ) -> Result<Self> {
        Ok(Self {
            b: cfg.weights.clone(),
            alpha: update_alpha(cfg, ch, bf, sel)?,
            beta: update_beta(cfg, ch, bf, sel)?,
            eta: update_eta(cfg, ch, bf, sel)?,
        })
    }
}

/// Signal power |h_kᴴΔw_k|² and total received power Σ_i|h_kᴴΔw_i|² + σ²_k.
fn received_powers(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    sel: &SelectionState,
    k: usize,
) -> (f64, f64) {
    let h_k = ch.h.column(k);
    let mut total = cfg.noise_ut[k];
    let mut signal = 0.0;
    for i in 0..cfg.num_users {
        let gain = masked_inner(h_k, &sel.s, bf.w.column(i)).norm_sqr();
        if i == k {
            signal = gain;
        }
        total += gain;
    }
    (signal, total)
}

/// Bang-bang activity update: b_k = w_k exactly when the user's surrogate
/// contribution g1_k + f2_k is strictly positive.
pub fn update_b(g1: &[f64], f2: &[f64], weights: &[f64]) -> Vec<f64> {
    g1.iter()
        .zip(f2)
        .zip(weights)
        .map(|((&a, &b), &w)| if a + b > 0.0 { w } else { 0.0 })
        .collect()
}

/// α⋆_k = γ_k, the exact SINR.
pub fn update_alpha(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    sel: &SelectionState,
) -> Result<Vec<f64>> {
    (0..cfg.num_users)
        .map(|k| sinr_ut(cfg, ch, bf, sel, k))
        .collect()
}

/// β⋆_k = (g − γ̄_k)/(1 + γ̄_k) with g from [`g_bound`].
///
/// For a binary selection γ̄_k ≤ g is a theorem, so any violation beyond
/// 1e-8 is reported as an invariant error (it means the inputs were not
/// actually feasible, e.g. an over-budget precoder). Relaxed iterates may
/// legitimately overshoot the bound mid-optimization; there the gap is
/// clamped at zero instead.
pub fn update_beta(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    sel: &SelectionState,
) -> Result<Vec<f64>> {
    let g = g_bound(cfg, ch)?;
    (0..cfg.num_users)
        .map(|k| {
            let gamma_bar = eve_snr(cfg, ch, bf, sel, k)?;
            if sel.mode == SelectionMode::Binary && gamma_bar > g + 1e-8 {
                return Err(Error::InvariantViolation {
                    context: "update_beta",
                    detail: format!(
                        "eavesdropper SNR {gamma_bar} exceeds its bound {g} for user {k}; \
                         inputs are infeasible"
                    ),
                });
            }
            Ok(((g - gamma_bar) / (1.0 + gamma_bar)).max(0.0))
        })
        .collect()
}

/// η⋆_k = h_kᴴΔw_k / (Σ_i |h_kᴴΔw_i|² + σ²_k).
pub fn update_eta(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    sel: &SelectionState,
) -> Result<Vec<Complex64>> {
    ch.validate(cfg)?;
    bf.validate(cfg)?;
    sel.validate(cfg)?;
    Ok((0..cfg.num_users)
        .map(|k| {
            let num = masked_inner(ch.h.column(k), &sel.s, bf.w.column(k));
            let (_, total) = received_powers(cfg, ch, bf, sel, k);
            num / total
        })
        .collect())
}

/// Dual-transform term for the SINR ratio, natural log.
pub fn surrogate_f1(
    k: usize,
    alpha_k: f64,
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    sel: &SelectionState,
) -> Result<f64> {
    let (signal, total) = checked_powers(cfg, ch, bf, sel, k)?;
    Ok((1.0 + alpha_k).ln() - alpha_k + (1.0 + alpha_k) * signal / total)
}

/// Dual-transform term for the Eve gap, natural log.
pub fn surrogate_f2(
    k: usize,
    beta_k: f64,
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    sel: &SelectionState,
    g: f64,
) -> Result<f64> {
    let gamma_bar = eve_snr(cfg, ch, bf, sel, k)?;
    Ok((1.0 + beta_k).ln() - beta_k + (1.0 + beta_k) * (g - gamma_bar) / (1.0 + g))
}

/// Quadratic-transform term replacing f1's fraction by its linearization.
pub fn surrogate_g1(
    k: usize,
    alpha_k: f64,
    eta_k: Complex64,
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    sel: &SelectionState,
) -> Result<f64> {
    let (_, total) = checked_powers(cfg, ch, bf, sel, k)?;
    let num = masked_inner(ch.h.column(k), &sel.s, bf.w.column(k));
    let lin = 2.0 * (eta_k.conj() * num).re - eta_k.norm_sqr() * total;
    Ok((1.0 + alpha_k).ln() - alpha_k + (1.0 + alpha_k) * lin)
}

fn checked_powers(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    sel: &SelectionState,
    k: usize,
) -> Result<(f64, f64)> {
    ch.validate(cfg)?;
    bf.validate(cfg)?;
    sel.validate(cfg)?;
    if k >= cfg.num_users {
        return Err(Error::IndexOutOfRange {
            context: "user index",
            index: k,
            len: cfg.num_users,
        });
    }
    Ok(received_powers(cfg, ch, bf, sel, k))
}

/// Working objective L = Σ_k b_k (g1_k + f2_k), natural-log units.
pub fn surrogate_objective(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    sel: &SelectionState,
    aux: &AuxState,
    g: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for k in 0..cfg.num_users {
        if aux.b[k] == 0.0 {
            continue;
        }
        let g1 = surrogate_g1(k, aux.alpha[k], aux.eta[k], cfg, ch, bf, sel)?;
        let f2 = surrogate_f2(k, aux.beta[k], cfg, ch, bf, sel, g)?;
        total += aux.b[k] * (g1 + f2);
    }
    Ok(total)
}

/// Exact composed-lemma identity check value: at tight auxiliaries and the
/// bang-bang activity taken at the pre-constant level (where the exact
/// activity test is γ_k > γ̄_k), L/ln2 − Σ_k b_k·log2(1+g) reproduces the
/// exact weighted secrecy sum-rate. Returns (L, b) for callers that want
/// the identity's ingredients.
pub fn tight_surrogate(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    sel: &SelectionState,
) -> Result<(f64, AuxState)> {
    let g = g_bound(cfg, ch)?;
    let mut aux = AuxState::tight(cfg, ch, bf, sel)?;
    let offset = (1.0 + g).ln();
    let mut g1 = Vec::with_capacity(cfg.num_users);
    let mut f2_shifted = Vec::with_capacity(cfg.num_users);
    for k in 0..cfg.num_users {
        g1.push(surrogate_g1(k, aux.alpha[k], aux.eta[k], cfg, ch, bf, sel)?);
        // Subtracting the per-user constant log(1+g) restores the exact
        // (pre-rewrite) activity indicator γ_k > γ̄_k.
        f2_shifted.push(surrogate_f2(k, aux.beta[k], cfg, ch, bf, sel, g)? - offset);
    }
    aux.b = update_b(&g1, &f2_shifted, &cfg.weights);
    let objective = surrogate_objective(cfg, ch, bf, sel, &aux, g)?;
    Ok((objective, aux))
}
