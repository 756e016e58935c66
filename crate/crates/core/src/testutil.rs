//! Synthetic instance generators shared by the unit and integration test
//! suites. Deterministic given the caller's RNG; not used by the solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::model::{Beamformer, ChannelSet, SelectionState, SystemConfig};

/// Circularly symmetric complex Gaussian entry with E|z|² = scale².
pub fn cn_entry<R: Rng>(scale: f64, rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * (scale / 2f64.sqrt())
}

/// Channel matrices with i.i.d. CN(0, scale²) entries.
pub fn random_channels<R: Rng>(cfg: &SystemConfig, scale: f64, rng: &mut R) -> ChannelSet {
    let h = DMatrix::from_fn(cfg.num_antennas, cfg.num_users, |_, _| cn_entry(scale, rng));
    let g = DMatrix::from_fn(cfg.num_antennas, cfg.num_eves, |_, _| cn_entry(scale, rng));
    ChannelSet { h, g }
}

/// Random precoder rescaled to use a random fraction of the power budget.
pub fn random_feasible_beamformer<R: Rng>(cfg: &SystemConfig, rng: &mut R) -> Beamformer {
    let mut w = DMatrix::from_fn(cfg.num_antennas, cfg.num_users, |_, _| cn_entry(1.0, rng));
    let trace: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    if trace > 0.0 {
        let target = cfg.power_budget * rng.gen_range(0.3..1.0);
        w.scale_mut((target / trace).sqrt());
    }
    Beamformer { w }
}

/// Uniformly random binary selection activating exactly N antennas.
pub fn random_binary_selection<R: Rng>(cfg: &SystemConfig, rng: &mut R) -> SelectionState {
    let picks = sample(rng, cfg.num_antennas, cfg.num_rf_chains).into_vec();
    SelectionState::binary_from_indices(cfg.num_antennas, &picks)
}

/// Relaxed selection with entries in (0, 1).
pub fn random_relaxed_selection<R: Rng>(cfg: &SystemConfig, rng: &mut R) -> SelectionState {
    let s = DVector::from_fn(cfg.num_antennas, |_, _| rng.gen_range(0.05..0.95));
    SelectionState::relaxed(s)
}

/// Σ_k (w_kᴴ A_k w_k − 2ℜ{w_kᴴ a_k}), the objective of the separable
/// power-constrained quadratic program.
pub fn quadratic_objective(
    a_mats: &[DMatrix<Complex64>],
    a_vecs: &[DVector<Complex64>],
    cols: &[DVector<Complex64>],
) -> f64 {
    let mut total = 0.0;
    for k in 0..a_mats.len() {
        let quad = (cols[k].adjoint() * &a_mats[k] * &cols[k])[(0, 0)].re;
        let lin = (cols[k].adjoint() * &a_vecs[k])[(0, 0)].re;
        total += quad - 2.0 * lin;
    }
    total
}

/// Accelerated projected-gradient reference minimizer for the same program,
/// kept deliberately free of eigendecompositions so it exercises none of
/// the production solver's machinery. Step size from a Frobenius bound on
/// the curvature; projection rescales onto the power ball.
pub fn fista_quadratic_min(
    a_mats: &[DMatrix<Complex64>],
    a_vecs: &[DVector<Complex64>],
    p: f64,
    iters: usize,
) -> Vec<DVector<Complex64>> {
    let k_users = a_mats.len();
    let lipschitz = 2.0
        * a_mats
            .iter()
            .map(|a| a.norm())
            .fold(f64::MIN_POSITIVE, f64::max);
    let step = 1.0 / lipschitz;

    let project = |cols: &mut Vec<DVector<Complex64>>| {
        let power: f64 = cols
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        if power > p {
            let scale = (p / power).sqrt();
            for c in cols.iter_mut() {
                c.scale_mut(scale);
            }
        }
    };

    let m = a_vecs[0].len();
    let mut x: Vec<DVector<Complex64>> = vec![DVector::zeros(m); k_users];
    let mut y = x.clone();
    let mut t = 1.0f64;
    for _ in 0..iters {
        let mut next: Vec<DVector<Complex64>> = Vec::with_capacity(k_users);
        for k in 0..k_users {
            let grad = &a_mats[k] * &y[k] - &a_vecs[k];
            next.push(&y[k] - grad.scale(2.0 * step));
        }
        project(&mut next);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        for k in 0..k_users {
            y[k] = &next[k] + (&next[k] - &x[k]).scale(momentum);
        }
        x = next;
        t = t_next;
    }
    project(&mut x);
    x
}
