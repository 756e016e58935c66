//! Sequential low-complexity solver: fractional-programming beamforming
//! with every antenna active, then greedy antenna selection on the exact
//! objective. Runs in a small fraction of the penalty solver's time and
//! lands close to it on average.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{
    self, g_bound, mrt_beamformer, Beamformer, ChannelSet, SecrecyReport, SelectionState,
    SystemConfig,
};
use crate::pdd::update_w;
use crate::transforms::{
    surrogate_f2, surrogate_g1, surrogate_objective, update_alpha, update_b, update_beta,
    update_eta, AuxState,
};

pub const FP_INNER_TOL: f64 = 1e-6;
pub const FP_MAX_ITERS: usize = 200;
const BISECT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SoConfig {
    pub inner_tol: f64,
    pub max_iters: usize,
    /// Re-run the beamforming loop restricted to the selected antennas and
    /// keep the better of the two precoders. Off by default: the baseline
    /// pipeline evaluates the all-antenna precoder on the selected subset.
    pub refine: bool,
}

impl Default for SoConfig {
    fn default() -> Self {
        Self {
            inner_tol: FP_INNER_TOL,
            max_iters: FP_MAX_ITERS,
            refine: false,
        }
    }
}

/// Beamforming loop with the antenna mask held fixed: alternates the
/// closed-form updates of {W, b, α, β, η} until the surrogate objective
/// stalls. Returns the precoder and the per-iteration objective trace
/// (nondecreasing, since every block is a marginal maximizer).
pub fn fp_beamform_masked(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    sel: &SelectionState,
    inner_tol: f64,
    max_iters: usize,
) -> Result<(Beamformer, Vec<f64>)> {
    let g = g_bound(cfg, ch)?;
    let mut bf = mrt_beamformer(cfg, ch)?;
    let mut aux = AuxState::tight(cfg, ch, &bf, sel)?;
    let mut trace = vec![surrogate_objective(cfg, ch, &bf, sel, &aux, g)?];
    for _ in 0..max_iters {
        let wu = update_w(cfg, ch, sel, &aux, g, BISECT_TOL)?;
        bf = wu.bf;
        let mut g1 = Vec::with_capacity(cfg.num_users);
        let mut f2 = Vec::with_capacity(cfg.num_users);
        for k in 0..cfg.num_users {
            g1.push(surrogate_g1(k, aux.alpha[k], aux.eta[k], cfg, ch, &bf, sel)?);
            f2.push(surrogate_f2(k, aux.beta[k], cfg, ch, &bf, sel, g)?);
        }
        aux.b = update_b(&g1, &f2, &cfg.weights);
        aux.alpha = update_alpha(cfg, ch, &bf, sel)?;
        aux.beta = update_beta(cfg, ch, &bf, sel)?;
        aux.eta = update_eta(cfg, ch, &bf, sel)?;
        let obj = surrogate_objective(cfg, ch, &bf, sel, &aux, g)?;
        let prev = *trace.last().unwrap();
        trace.push(obj);
        if (obj - prev).abs() < inner_tol {
            break;
        }
    }
    Ok((bf, trace))
}

/// All-antenna beamforming: the mask is the all-ones vector.
pub fn fp_beamforming(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    inner_tol: f64,
    max_iters: usize,
) -> Result<Beamformer> {
    let sel = SelectionState::relaxed(DVector::from_element(cfg.num_antennas, 1.0));
    Ok(fp_beamform_masked(cfg, ch, &sel, inner_tol, max_iters)?.0)
}

/// Greedy selection with an evaluation counter: N rounds, each activating
/// the antenna that maximizes the exact weighted secrecy sum-rate given
/// the fixed precoder, ties toward the lowest index. The counter equals
/// Σ_{t=1..N}(M−t+1) by construction.
pub fn greedy_select_counted(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
) -> Result<(SelectionState, usize)> {
    ch.validate(cfg)?;
    bf.validate(cfg)?;
    let m = cfg.num_antennas;
    let mut s = DVector::<f64>::zeros(m);
    let mut active = Vec::with_capacity(cfg.num_rf_chains);
    let mut evals = 0usize;
    for _ in 0..cfg.num_rf_chains {
        let mut best: Option<(f64, usize)> = None;
        for cand in 0..m {
            if s[cand] != 0.0 {
                continue;
            }
            s[cand] = 1.0;
            let probe = SelectionState::relaxed(s.clone());
            let val = model::wssr(cfg, ch, bf, &probe)?.wssr;
            s[cand] = 0.0;
            evals += 1;
            // Strict improvement required to displace an earlier candidate,
            // so equal values keep the lowest index.
            if best.is_none_or(|(bv, _)| val > bv) {
                best = Some((val, cand));
            }
        }
        let (_, winner) = best.expect("at least one inactive antenna remains because N < M");
        s[winner] = 1.0;
        active.push(winner);
    }
    Ok((SelectionState::binary_from_indices(m, &active), evals))
}

/// Greedy selection of exactly N antennas for a fixed precoder.
pub fn greedy_select(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
) -> Result<SelectionState> {
    Ok(greedy_select_counted(cfg, ch, bf)?.0)
}

/// Full sequential solve: all-antenna beamforming, greedy selection, exact
/// report. With `refine` set, a second beamforming pass runs against the
/// selected mask and the better precoder wins.
pub fn so_solve(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    so_cfg: &SoConfig,
) -> Result<(Beamformer, SelectionState, SecrecyReport)> {
    cfg.validate()?;
    let bf = fp_beamforming(cfg, ch, so_cfg.inner_tol, so_cfg.max_iters)?;
    let sel = greedy_select(cfg, ch, &bf)?;
    let report = model::wssr(cfg, ch, &bf, &sel)?;
    if !so_cfg.refine {
        return Ok((bf, sel, report));
    }
    let (refined, _) = fp_beamform_masked(cfg, ch, &sel, so_cfg.inner_tol, so_cfg.max_iters)?;
    let refined_report = model::wssr(cfg, ch, &refined, &sel)?;
    if refined_report.wssr > report.wssr {
        Ok((refined, sel, refined_report))
    } else {
        Ok((bf, sel, report))
    }
}
