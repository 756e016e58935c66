//! Penalty dual decomposition solver for the joint beamforming and
//! antenna-selection problem.
//!
//! The binary constraint s_m ∈ {0,1} is lifted with a copy vector s̄
//! (s_m = s̄_m and s_m(1 − s̄_m) = 0 force binarity) and the equality
//! constraints move into an augmented-Lagrangian penalty
//!
//!   f_ρ = (1/2ρ)[ (1ᵀs − N + ρξ)²
//!                 + Σ_m (s_m − s̄_m + ρμ_m)² + (s_m(1−s̄_m) + ρλ_m)² ].
//!
//! The inner loop runs block coordinate ascent on the surrogate minus the
//! penalty over {W, s, s̄, b, α, β, η}; every block has a closed form, so
//! the inner objective never decreases. The outer loop tightens duals when
//! the constraint violation h = max{|1ᵀs−N|, |s̄_m−s_m|, |s_m(1−s̄_m)|}
//! falls below a shrinking threshold, and shrinks ρ otherwise, driving s
//! to an exact 0/1 selection.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    self, g_bound, mrt_beamformer, Beamformer, ChannelSet, SelectionState, SystemConfig,
};
use crate::numerics::{bisect_monotone, hermitian_eig, solve_spd, BisectionSpec, HermitianEig};
use crate::transforms::{
    surrogate_f2, surrogate_g1, surrogate_objective, update_alpha, update_b, update_beta,
    update_eta, AuxState,
};

/// Outer-loop termination threshold on the constraint violation.
pub const FINAL_VIOLATION_TOL: f64 = 1e-4;

/// Penalty floor; shrinking ρ further changes nothing once s is binary to
/// far below the violation tolerance, but would overflow 1/(2ρ).
const RHO_FLOOR: f64 = 1e-12;

/// Dual variables and the penalty parameter of the augmented Lagrangian.
#[derive(Debug, Clone)]
pub struct DualState {
    pub xi: f64,
    pub mu: DVector<f64>,
    pub lambda: DVector<f64>,
    pub rho: f64,
}

impl DualState {
    pub fn zeros(m: usize, rho: f64) -> Self {
        Self {
            xi: 0.0,
            mu: DVector::zeros(m),
            lambda: DVector::zeros(m),
            rho,
        }
    }
}

/// How pdd_solve picks its starting point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PddInit {
    /// Matched-filter precoder directions, fractional selection tilted
    /// toward the strongest rows.
    Deterministic,
    /// Random precoder and selection drawn from the solver seed.
    Random,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PddConfig {
    /// Initial dual-update threshold on the constraint violation.
    pub violation_threshold_init: f64,
    pub rho_init: f64,
    /// Shrink factor for both ρ and the violation threshold, in (0,1).
    pub chi: f64,
    pub inner_tol: f64,
    pub inner_max_iters: usize,
    pub outer_max_iters: usize,
    pub bisect_tol: f64,
    pub init: PddInit,
}

impl Default for PddConfig {
    fn default() -> Self {
        Self {
            violation_threshold_init: 1.0,
            rho_init: 1.0,
            chi: 0.1,
            inner_tol: 1e-6,
            inner_max_iters: 200,
            outer_max_iters: 300,
            bisect_tol: 1e-10,
            init: PddInit::Deterministic,
        }
    }
}

impl PddConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Err(Error::InvalidConfig { reason });
        if !(self.chi > 0.0 && self.chi < 1.0) {
            return fail(format!("chi must lie in (0,1), got {}", self.chi));
        }
        for (name, v) in [
            ("violation_threshold_init", self.violation_threshold_init),
            ("rho_init", self.rho_init),
            ("inner_tol", self.inner_tol),
            ("bisect_tol", self.bisect_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return fail(format!("{name} must be positive, got {v}"));
            }
        }
        if self.inner_max_iters == 0 || self.outer_max_iters == 0 {
            return fail("iteration caps must be positive".into());
        }
        Ok(())
    }
}

/// Convergence record of one solve. The inner augmented-Lagrangian trace
/// is stored flattened with per-outer segment lengths so monotonicity can
/// be checked within each inner loop (the objective legitimately jumps
/// when duals or ρ change between outer iterations).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PddTrace {
    pub objective_per_inner_iter: Vec<f64>,
    pub inner_iters_per_outer: Vec<usize>,
    pub violation_per_outer_iter: Vec<f64>,
    /// Exact WSSR of the top-N binarization of each outer iterate.
    pub wssr_per_outer_iter: Vec<f64>,
    pub outer_iters_used: usize,
    pub converged: bool,
}

impl PddTrace {
    /// Inner AL trace segments, one per outer iteration.
    pub fn inner_segments(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(self.inner_iters_per_outer.len());
        let mut start = 0;
        for &len in &self.inner_iters_per_outer {
            out.push(&self.objective_per_inner_iter[start..start + len]);
            start += len;
        }
        out
    }
}

/// Primal variables of the lifted problem.
#[derive(Debug, Clone)]
pub struct PddState {
    pub bf: Beamformer,
    pub sel: SelectionState,
    pub s_bar: DVector<f64>,
    pub aux: AuxState,
}

/// Augmented-Lagrangian penalty f_ρ.
pub fn penalty_term(s: &DVector<f64>, s_bar: &DVector<f64>, dual: &DualState, n: usize) -> f64 {
    let rho = dual.rho;
    let sum_res = s.sum() - n as f64 + rho * dual.xi;
    let mut acc = sum_res * sum_res;
    for m in 0..s.len() {
        let copy_res = s[m] - s_bar[m] + rho * dual.mu[m];
        let bin_res = s[m] * (1.0 - s_bar[m]) + rho * dual.lambda[m];
        acc += copy_res * copy_res + bin_res * bin_res;
    }
    acc / (2.0 * rho)
}

/// h = max residual magnitude over the lifted equality constraints.
pub fn constraint_violation(s: &DVector<f64>, s_bar: &DVector<f64>, n: usize) -> f64 {
    let mut h = (s.sum() - n as f64).abs();
    for m in 0..s.len() {
        h = h.max((s_bar[m] - s[m]).abs());
        h = h.max((s[m] * (1.0 - s_bar[m])).abs());
    }
    h
}

/// Result of the precoder block update.
#[derive(Debug, Clone)]
pub struct WUpdate {
    pub bf: Beamformer,
    /// Power-constraint multiplier (0 when the constraint is inactive).
    pub lambda: f64,
    /// True when every linear term vanished (all users inactive); the
    /// returned precoder is zero.
    pub degenerate: bool,
}

/// Minimizes Σ_k (w_kᴴ A_k w_k − 2ℜ{w_kᴴ a_k}) subject to Σ_k ‖w_k‖² ≤ p.
///
/// Solved through one Hermitian eigendecomposition per A_k: the optimum is
/// w_k = (A_k + λI)⁻¹ a_k with λ ≥ 0 chosen by complementary slackness.
/// When the pseudo-inverse solution already fits the budget λ = 0;
/// otherwise λ solves Σ_k Σ_m |vᴴ_{km} a_k|²/(λ_{km} + λ)² = p, bracketed
/// by [0, √(Σ‖a_k‖²/p)] and polished with a few Newton steps.
pub fn constrained_quadratic_min(
    a_mats: &[DMatrix<Complex64>],
    a_vecs: &[DVector<Complex64>],
    p: f64,
    bisect_tol: f64,
) -> Result<(Vec<DVector<Complex64>>, f64, bool)> {
    let k_users = a_mats.len();
    let m = if k_users > 0 { a_mats[0].nrows() } else { 0 };
    let mut cols: Vec<DVector<Complex64>> = vec![DVector::zeros(m); k_users];

    struct Spectral {
        k: usize,
        eig: HermitianEig,
        proj: DVector<Complex64>,
    }
    let mut spectra = Vec::new();
    let mut norm_sq_sum = 0.0;
    for k in 0..k_users {
        let norm_sq: f64 = a_vecs[k].iter().map(|z| z.norm_sqr()).sum();
        if norm_sq == 0.0 {
            continue;
        }
        norm_sq_sum += norm_sq;
        let eig = hermitian_eig(&a_mats[k])?;
        let proj = eig.eigenvectors.adjoint() * &a_vecs[k];
        spectra.push(Spectral { k, eig, proj });
    }
    if spectra.is_empty() {
        return Ok((cols, 0.0, true));
    }

    // Pseudo-inverse power: components on the numerical null space carry
    // no mass because each a_k lies in range(A_k) by construction.
    let mut unconstrained_power = 0.0;
    for sp in &spectra {
        let lam_max = sp.eig.eigenvalues[sp.eig.eigenvalues.len() - 1].max(0.0);
        let floor = 1e-12 * lam_max;
        for i in 0..sp.eig.eigenvalues.len() {
            let lam = sp.eig.eigenvalues[i];
            if lam > floor && lam > 0.0 {
                unconstrained_power += sp.proj[i].norm_sqr() / (lam * lam);
            }
        }
    }

    let build = |spectra: &[Spectral], lambda: f64, cols: &mut Vec<DVector<Complex64>>| {
        for sp in spectra {
            let lam_max = sp.eig.eigenvalues[sp.eig.eigenvalues.len() - 1].max(0.0);
            let floor = 1e-12 * lam_max;
            let scaled = DVector::from_fn(sp.proj.len(), |i, _| {
                let lam = sp.eig.eigenvalues[i];
                if lambda == 0.0 && (lam <= floor || lam <= 0.0) {
                    Complex64::new(0.0, 0.0)
                } else {
                    sp.proj[i] / (lam + lambda)
                }
            });
            cols[sp.k] = &sp.eig.eigenvectors * scaled;
        }
    };

    if unconstrained_power <= p {
        build(&spectra, 0.0, &mut cols);
        return Ok((cols, 0.0, false));
    }

    let power_and_slope = |lambda: f64| -> (f64, f64) {
        let mut pw = 0.0;
        let mut slope = 0.0;
        for sp in &spectra {
            for i in 0..sp.proj.len() {
                let denom = sp.eig.eigenvalues[i].max(0.0) + lambda;
                if denom > 0.0 {
                    let mass = sp.proj[i].norm_sqr();
                    pw += mass / (denom * denom);
                    slope += -2.0 * mass / (denom * denom * denom);
                } else if sp.proj[i].norm_sqr() > 0.0 {
                    pw = f64::INFINITY;
                    slope = f64::NEG_INFINITY;
                }
            }
        }
        (pw, slope)
    };

    let upper = (norm_sq_sum / p).sqrt();
    let spec = BisectionSpec {
        lower: 0.0,
        upper,
        tolerance: bisect_tol,
        max_iters: 300,
    };
    // At λ = 0 the full power is at least the pseudo-inverse power, which
    // this branch already knows exceeds p, so the bracket sign is safe even
    // when a zero eigenvalue sends it to +inf.
    let root = bisect_monotone(|l| power_and_slope(l).0 - p, &spec)?;
    let mut lambda = root.root.max(0.0);
    for _ in 0..4 {
        let (pw, slope) = power_and_slope(lambda);
        if !pw.is_finite() || slope == 0.0 {
            break;
        }
        if (pw - p).abs() <= 1e-12 * p {
            break;
        }
        let next = lambda - (pw - p) / slope;
        if next.is_finite() && next > 0.0 {
            lambda = next;
        } else {
            break;
        }
    }
    build(&spectra, lambda, &mut cols);
    Ok((cols, lambda, false))
}

/// Per-user coefficients shared by the W- and s-subproblem assemblies.
struct BlockCoeffs {
    /// b_k (1+α_k) |η_k|², weight of the user-k channel outer product.
    chan: Vec<f64>,
    /// b_k (1+β_k)/(1+g), weight of the Eve leakage quadratic for user k.
    eve: Vec<f64>,
    /// b_k (1+α_k) η_k, linear-term multiplier.
    lin: Vec<Complex64>,
}

fn block_coeffs(cfg: &SystemConfig, aux: &AuxState, g: f64) -> BlockCoeffs {
    let k_users = cfg.num_users;
    let mut chan = Vec::with_capacity(k_users);
    let mut eve = Vec::with_capacity(k_users);
    let mut lin = Vec::with_capacity(k_users);
    for k in 0..k_users {
        let b = aux.b[k];
        chan.push(b * (1.0 + aux.alpha[k]) * aux.eta[k].norm_sqr());
        eve.push(b * (1.0 + aux.beta[k]) / (1.0 + g));
        lin.push(aux.eta[k] * (b * (1.0 + aux.alpha[k])));
    }
    BlockCoeffs { chan, eve, lin }
}

/// acc += weight · v vᴴ.
fn rank_one_acc(acc: &mut DMatrix<Complex64>, v: &DVector<Complex64>, weight: f64) {
    let n = v.len();
    for c in 0..n {
        let vc = v[c].conj() * weight;
        for r in 0..n {
            acc[(r, c)] += v[r] * vc;
        }
    }
}

/// Precoder block update: exact minimizer of the surrogate's W-marginal
/// under the power budget.
pub fn update_w(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    sel: &SelectionState,
    aux: &AuxState,
    g: f64,
    bisect_tol: f64,
) -> Result<WUpdate> {
    ch.validate(cfg)?;
    sel.validate(cfg)?;
    let m = cfg.num_antennas;
    let co = block_coeffs(cfg, aux, g);

    // Masked channel columns s ⊙ h_i and s ⊙ g_j.
    let masked_h: Vec<DVector<Complex64>> = (0..cfg.num_users)
        .map(|i| DVector::from_fn(m, |r, _| ch.h[(r, i)] * sel.s[r]))
        .collect();
    let masked_g: Vec<DVector<Complex64>> = (0..cfg.num_eves)
        .map(|j| DVector::from_fn(m, |r, _| ch.g[(r, j)] * sel.s[r]))
        .collect();

    let mut common = DMatrix::<Complex64>::zeros(m, m);
    for i in 0..cfg.num_users {
        if co.chan[i] != 0.0 {
            rank_one_acc(&mut common, &masked_h[i], co.chan[i]);
        }
    }
    // Leakage quadratic, weighted by each Eve's noise power.
    let mut eve_quad = DMatrix::<Complex64>::zeros(m, m);
    for j in 0..cfg.num_eves {
        rank_one_acc(&mut eve_quad, &masked_g[j], 1.0 / cfg.noise_eve[j]);
    }

    let mut a_mats = Vec::with_capacity(cfg.num_users);
    let mut a_vecs = Vec::with_capacity(cfg.num_users);
    for k in 0..cfg.num_users {
        let mat = if co.eve[k] != 0.0 {
            &common + eve_quad.scale(co.eve[k])
        } else {
            common.clone()
        };
        a_mats.push(mat);
        a_vecs.push(masked_h[k].map(|z| z * co.lin[k]));
    }

    let (cols, lambda, degenerate) =
        constrained_quadratic_min(&a_mats, &a_vecs, cfg.power_budget, bisect_tol)?;
    let mut w = DMatrix::zeros(m, cfg.num_users);
    for (k, col) in cols.into_iter().enumerate() {
        w.set_column(k, &col);
    }
    Ok(WUpdate {
        bf: Beamformer { w },
        lambda,
        degenerate,
    })
}

/// Quadratic form and linear term of the s-subproblem: the relaxed
/// selection minimizes sᵀQs − sᵀlin, so s⋆ = ½Q⁻¹lin.
pub fn selection_quadratic(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    s_bar: &DVector<f64>,
    aux: &AuxState,
    dual: &DualState,
    g: f64,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    ch.validate(cfg)?;
    bf.validate(cfg)?;
    let m = cfg.num_antennas;
    let rho = dual.rho;
    let co = block_coeffs(cfg, aux, g);

    let mut q = DMatrix::<f64>::zeros(m, m);
    let mut add_outer = |v: &DVector<Complex64>, weight: f64| {
        if weight == 0.0 {
            return;
        }
        for r in 0..m {
            for c in 0..m {
                q[(r, c)] += weight * (v[r] * v[c].conj()).re;
            }
        }
    };
    // User terms: |h_kᴴ diag(s) w_i|² = |sᵀ(conj(h_k) ⊙ w_i)|².
    for k in 0..cfg.num_users {
        if co.chan[k] == 0.0 {
            continue;
        }
        for i in 0..cfg.num_users {
            let v = DVector::from_fn(m, |r, _| ch.h[(r, k)].conj() * bf.w[(r, i)]);
            add_outer(&v, co.chan[k]);
        }
    }
    // Eve terms, noise-normalized per eavesdropper.
    for k in 0..cfg.num_users {
        if co.eve[k] == 0.0 {
            continue;
        }
        for j in 0..cfg.num_eves {
            let v = DVector::from_fn(m, |r, _| ch.g[(r, j)].conj() * bf.w[(r, k)]);
            add_outer(&v, co.eve[k] / cfg.noise_eve[j]);
        }
    }
    // Penalty curvature: (1/2ρ)(11ᵀ + I + diag((1 − s̄_m)²)).
    let half_inv_rho = 1.0 / (2.0 * rho);
    for r in 0..m {
        for c in 0..m {
            q[(r, c)] += half_inv_rho;
        }
        let d = 1.0 - s_bar[r];
        q[(r, r)] += half_inv_rho * (1.0 + d * d);
    }

    // Linear term: 2q − (1/ρ)[(ρξ − N)1 + (ρμ − s̄) + ρ(1 − s̄)⊙λ], where
    // q_m = Σ_k b_k(1+α_k) ℜ{η_k conj(w_k[m]) h_k[m]}.
    let n = cfg.num_rf_chains as f64;
    let mut lin = DVector::<f64>::zeros(m);
    for k in 0..cfg.num_users {
        if co.lin[k] == Complex64::new(0.0, 0.0) {
            continue;
        }
        for r in 0..m {
            lin[r] += 2.0 * (co.lin[k] * bf.w[(r, k)].conj() * ch.h[(r, k)]).re;
        }
    }
    for r in 0..m {
        lin[r] -= (rho * dual.xi - n) / rho
            + (rho * dual.mu[r] - s_bar[r]) / rho
            + (1.0 - s_bar[r]) * dual.lambda[r];
    }
    Ok((q, lin))
}

/// Relaxed selection block update: s⋆ = ½Q⁻¹lin.
pub fn update_s(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    s_bar: &DVector<f64>,
    aux: &AuxState,
    dual: &DualState,
    g: f64,
) -> Result<DVector<f64>> {
    let (q, lin) = selection_quadratic(cfg, ch, bf, s_bar, aux, dual, g)?;
    let x = solve_spd(&q, &lin, "update_s")?;
    Ok(x.scale(0.5))
}

/// Copy-vector block update, coordinatewise:
/// s̄_m = (s_m + ρμ_m + s_m² + s_m ρλ_m)/(1 + s_m²).
pub fn update_s_bar(s: &DVector<f64>, dual: &DualState) -> DVector<f64> {
    let rho = dual.rho;
    DVector::from_fn(s.len(), |m, _| {
        let sm = s[m];
        (sm + rho * dual.mu[m] + sm * sm + sm * rho * dual.lambda[m]) / (1.0 + sm * sm)
    })
}

/// Classic augmented-Lagrangian dual ascent with step 1/ρ on each residual.
pub fn update_duals(
    s: &DVector<f64>,
    s_bar: &DVector<f64>,
    dual: &DualState,
    n: usize,
) -> DualState {
    let inv_rho = 1.0 / dual.rho;
    DualState {
        xi: dual.xi + inv_rho * (s.sum() - n as f64),
        mu: DVector::from_fn(s.len(), |m, _| dual.mu[m] + inv_rho * (s[m] - s_bar[m])),
        lambda: DVector::from_fn(s.len(), |m, _| {
            dual.lambda[m] + inv_rho * s[m] * (1.0 - s_bar[m])
        }),
        rho: dual.rho,
    }
}

/// Inner objective: surrogate minus penalty, natural-log units.
pub fn al_objective(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    state: &PddState,
    dual: &DualState,
    g: f64,
) -> Result<f64> {
    let l = surrogate_objective(cfg, ch, &state.bf, &state.sel, &state.aux, g)?;
    Ok(l - penalty_term(&state.sel.s, &state.s_bar, dual, cfg.num_rf_chains))
}

/// Outcome of one inner BCD run.
#[derive(Debug, Clone)]
pub struct InnerRun {
    /// AL objective before the first sweep and after each sweep.
    pub trace: Vec<f64>,
    pub converged: bool,
}

fn refresh_activity(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    state: &mut PddState,
    g: f64,
) -> Result<()> {
    let mut g1 = Vec::with_capacity(cfg.num_users);
    let mut f2 = Vec::with_capacity(cfg.num_users);
    for k in 0..cfg.num_users {
        g1.push(surrogate_g1(
            k,
            state.aux.alpha[k],
            state.aux.eta[k],
            cfg,
            ch,
            &state.bf,
            &state.sel,
        )?);
        f2.push(surrogate_f2(
            k,
            state.aux.beta[k],
            cfg,
            ch,
            &state.bf,
            &state.sel,
            g,
        )?);
    }
    state.aux.b = update_b(&g1, &f2, &cfg.weights);
    Ok(())
}

fn refresh_closed_form_aux(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    state: &mut PddState,
) -> Result<()> {
    state.aux.alpha = update_alpha(cfg, ch, &state.bf, &state.sel)?;
    state.aux.beta = update_beta(cfg, ch, &state.bf, &state.sel)?;
    state.aux.eta = update_eta(cfg, ch, &state.bf, &state.sel)?;
    Ok(())
}

/// One sweep of the block sequence W, s, s̄, b, α, β, η.
fn bcd_sweep(
    state: &mut PddState,
    cfg: &SystemConfig,
    ch: &ChannelSet,
    dual: &DualState,
    g: f64,
    bisect_tol: f64,
) -> Result<()> {
    let wu = update_w(cfg, ch, &state.sel, &state.aux, g, bisect_tol)?;
    // When every activity weight is zero the objective no longer depends on
    // W and any precoder is marginally optimal. Keep the previous one: the
    // zero precoder returned by the degenerate branch would zero η at the
    // next refresh and lock the activity weights off permanently.
    if !wu.degenerate {
        state.bf = wu.bf;
    }
    state.sel.s = update_s(cfg, ch, &state.bf, &state.s_bar, &state.aux, dual, g)?;
    state.s_bar = update_s_bar(&state.sel.s, dual);
    refresh_activity(cfg, ch, state, g)?;
    refresh_closed_form_aux(cfg, ch, state)
}

/// Block coordinate ascent on the AL objective until it stalls.
pub fn bcd_inner_loop(
    state: &mut PddState,
    cfg: &SystemConfig,
    ch: &ChannelSet,
    dual: &DualState,
    pdd_cfg: &PddConfig,
) -> Result<InnerRun> {
    let g = g_bound(cfg, ch)?;
    let mut trace = vec![al_objective(cfg, ch, state, dual, g)?];
    let mut converged = false;
    for _ in 0..pdd_cfg.inner_max_iters {
        bcd_sweep(state, cfg, ch, dual, g, pdd_cfg.bisect_tol)?;
        let obj = al_objective(cfg, ch, state, dual, g)?;
        let prev = *trace.last().unwrap();
        trace.push(obj);
        if (obj - prev).abs() < pdd_cfg.inner_tol {
            converged = true;
            break;
        }
    }
    Ok(InnerRun { trace, converged })
}

/// Top-N binarization: the N largest entries become 1, ties broken toward
/// the lower antenna index.
pub fn binarize_top_n(s: &DVector<f64>, n: usize) -> SelectionState {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    SelectionState::binary_from_indices(s.len(), &order[..n])
}

fn initial_state(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    pdd_cfg: &PddConfig,
    rng_seed: u64,
) -> Result<PddState> {
    let m = cfg.num_antennas;
    let (bf, s) = match pdd_cfg.init {
        PddInit::Deterministic => {
            let bf = mrt_beamformer(cfg, ch)?;
            // Start s tilted toward the N strongest rows rather than uniform.
            // A uniform start sits on the symmetry ridge between selection
            // basins and the first inner solve then tends to spread mass
            // over more than N antennas, a stationary pattern the penalty
            // schedule cannot leave. The tilt seeds an N-high basin while
            // staying far from binary so the solver can still reorder.
            let mut order: Vec<usize> = (0..m).collect();
            let energy: Vec<f64> = (0..m)
                .map(|r| ch.h.row(r).iter().map(|z| z.norm_sqr()).sum())
                .collect();
            order.sort_by(|&a, &b| {
                energy[b].partial_cmp(&energy[a]).unwrap_or(std::cmp::Ordering::Equal)
            });
            let mut s = DVector::from_element(m, 0.1);
            for &r in order.iter().take(cfg.num_rf_chains) {
                s[r] = 0.7;
            }
            (bf, s)
        }
        PddInit::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            let mut w = DMatrix::from_fn(m, cfg.num_users, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let trace: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            if trace > 0.0 {
                w.scale_mut((cfg.power_budget / trace).sqrt());
            }
            // Random N-subset rather than random fractions: a selection
            // vector initialized on the feasible set starts at zero
            // violation inside an N-high basin, mirroring the tilt used
            // by the deterministic start.
            let mut order: Vec<usize> = (0..m).collect();
            for i in (1..m).rev() {
                let j = rng.gen_range(0..=i);
                order.swap(i, j);
            }
            let mut s = DVector::from_element(m, 0.0);
            for &r in order.iter().take(cfg.num_rf_chains) {
                s[r] = 1.0;
            }
            (Beamformer { w }, s)
        }
    };
    let sel = SelectionState::relaxed(s.clone());
    let aux = AuxState::tight(cfg, ch, &bf, &sel)?;
    Ok(PddState {
        bf,
        sel,
        s_bar: s,
        aux,
    })
}

/// Full Algorithm-1 style solve: double loop, then exact binarization and
/// a final precoder refresh against the binary selection.
pub fn pdd_solve(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    pdd_cfg: &PddConfig,
    rng_seed: u64,
) -> Result<(Beamformer, SelectionState, PddTrace)> {
    cfg.validate()?;
    ch.validate(cfg)?;
    pdd_cfg.validate()?;
    let g = g_bound(cfg, ch)?;
    let n = cfg.num_rf_chains;

    let mut state = initial_state(cfg, ch, pdd_cfg, rng_seed)?;
    let mut dual = DualState::zeros(cfg.num_antennas, pdd_cfg.rho_init);
    let mut threshold = pdd_cfg.violation_threshold_init;
    let mut trace = PddTrace::default();

    for _ in 0..pdd_cfg.outer_max_iters {
        let inner = bcd_inner_loop(&mut state, cfg, ch, &dual, pdd_cfg)?;
        trace.inner_iters_per_outer.push(inner.trace.len());
        trace.objective_per_inner_iter.extend_from_slice(&inner.trace);

        let h = constraint_violation(&state.sel.s, &state.s_bar, n);
        trace.violation_per_outer_iter.push(h);
        let snapshot_sel = binarize_top_n(&state.sel.s, n);
        let snapshot = model::wssr(cfg, ch, &state.bf, &snapshot_sel)?;
        trace.wssr_per_outer_iter.push(snapshot.wssr);
        trace.outer_iters_used += 1;

        if h <= FINAL_VIOLATION_TOL && inner.converged {
            trace.converged = true;
            break;
        }
        if h < threshold {
            dual = update_duals(&state.sel.s, &state.s_bar, &dual, n);
        } else {
            dual.rho = (dual.rho * pdd_cfg.chi).max(RHO_FLOOR);
        }
        threshold = pdd_cfg.chi * h;
    }

    // Exact selection: project, retune auxiliaries, refresh the precoder
    // once against the binary mask.
    let sel = binarize_top_n(&state.sel.s, n);
    state.sel = sel.clone();
    refresh_closed_form_aux(cfg, ch, &mut state)?;
    refresh_activity(cfg, ch, &mut state, g)?;
    let wu = update_w(cfg, ch, &state.sel, &state.aux, g, pdd_cfg.bisect_tol)?;
    if !wu.degenerate {
        state.bf = wu.bf;
    }

    Ok((state.bf, sel, trace))
}
