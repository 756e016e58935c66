//! Comparison schemes: random selection, strongest-channel selection, and
//! matched-filter beamforming. Each returns the same (precoder, selection,
//! report) triple as the main solvers so the harness can treat all schemes
//! uniformly.

use rand::seq::index::sample;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{
    self, mrt_beamformer, Beamformer, ChannelSet, SecrecyReport, SelectionState, SystemConfig,
};
use crate::so::{fp_beamform_masked, greedy_select, FP_INNER_TOL, FP_MAX_ITERS};

type SchemeOutput = (Beamformer, SelectionState, SecrecyReport);

fn beamform_for(cfg: &SystemConfig, ch: &ChannelSet, sel: SelectionState) -> Result<SchemeOutput> {
    let (bf, _) = fp_beamform_masked(cfg, ch, &sel, FP_INNER_TOL, FP_MAX_ITERS)?;
    let report = model::wssr(cfg, ch, &bf, &sel)?;
    Ok((bf, sel, report))
}

/// Uniformly random N-subset of antennas (seeded), then beamforming
/// against that fixed mask.
pub fn random_scheme(cfg: &SystemConfig, ch: &ChannelSet, rng_seed: u64) -> Result<SchemeOutput> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut picks = sample(&mut rng, cfg.num_antennas, cfg.num_rf_chains).into_vec();
    picks.sort_unstable();
    let sel = SelectionState::binary_from_indices(cfg.num_antennas, &picks);
    beamform_for(cfg, ch, sel)
}

/// Selects the N antennas with the largest legitimate-channel energy
/// e_m = Σ_k |H[m,k]|² (ties toward the lower index), then beamforms
/// against that mask. Eavesdropper channels do not enter the metric.
pub fn energy_scheme(cfg: &SystemConfig, ch: &ChannelSet) -> Result<SchemeOutput> {
    cfg.validate()?;
    ch.validate(cfg)?;
    let energies = antenna_energies(cfg, ch);
    let mut order: Vec<usize> = (0..cfg.num_antennas).collect();
    order.sort_by(|&a, &b| energies[b].total_cmp(&energies[a]).then(a.cmp(&b)));
    let sel = SelectionState::binary_from_indices(cfg.num_antennas, &order[..cfg.num_rf_chains]);
    beamform_for(cfg, ch, sel)
}

/// Per-antenna energy across the legitimate channels.
pub fn antenna_energies(cfg: &SystemConfig, ch: &ChannelSet) -> Vec<f64> {
    (0..cfg.num_antennas)
        .map(|m| (0..cfg.num_users).map(|k| ch.h[(m, k)].norm_sqr()).sum())
        .collect()
}

/// Matched-filter precoder with an even power split, selection by greedy
/// search against that fixed precoder.
pub fn mrt_scheme(cfg: &SystemConfig, ch: &ChannelSet) -> Result<SchemeOutput> {
    cfg.validate()?;
    let bf = mrt_beamformer(cfg, ch)?;
    let sel = greedy_select(cfg, ch, &bf)?;
    let report = model::wssr(cfg, ch, &bf, &sel)?;
    Ok((bf, sel, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_channels;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn cfg(m: usize, n: usize, k: usize, j: usize) -> SystemConfig {
        SystemConfig {
            num_antennas: m,
            num_rf_chains: n,
            num_users: k,
            num_eves: j,
            power_budget: 2.0,
            weights: vec![1.0; k],
            noise_ut: vec![1.0; k],
            noise_eve: vec![1.0; j],
        }
    }

    #[test]
    fn random_scheme_is_seed_deterministic() {
        let cfg = cfg(6, 2, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ch = random_channels(&cfg, 1.0, &mut rng);
        let (bf1, sel1, r1) = random_scheme(&cfg, &ch, 99).unwrap();
        let (bf2, sel2, r2) = random_scheme(&cfg, &ch, 99).unwrap();
        assert_eq!(sel1, sel2);
        assert_eq!(bf1, bf2);
        assert_eq!(r1.wssr, r2.wssr);
        sel1.validate(&cfg).unwrap();
        assert!(bf1.power_feasible(cfg.power_budget));
    }

    #[test]
    fn random_subsets_are_roughly_uniform() {
        let cfg = cfg(2, 1, 1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = random_channels(&cfg, 1.0, &mut rng);
        let mut first = 0usize;
        for seed in 0..1000u64 {
            // Only the subset draw matters here; skip the beamforming by
            // reproducing the selection path.
            let mut srng = ChaCha8Rng::seed_from_u64(seed);
            let picks = sample(&mut srng, cfg.num_antennas, cfg.num_rf_chains).into_vec();
            if picks[0] == 0 {
                first += 1;
            }
        }
        // Binomial(1000, 1/2): allow 4 standard deviations around 500.
        assert!(
            (437..=563).contains(&first),
            "antenna 0 chosen {first}/1000 times"
        );
        // And the full scheme runs on one of those seeds.
        let (_, sel, _) = random_scheme(&cfg, &ch, 0).unwrap();
        assert_eq!(sel.active_indices().len(), 1);
    }

    #[test]
    fn energy_scheme_sorts_and_breaks_ties_low() {
        let cfg = cfg(3, 2, 1, 1);
        let ch = ChannelSet {
            h: DMatrix::from_row_slice(
                3,
                1,
                &[
                    Complex64::new(3.0, 0.0),
                    Complex64::new(1.0, 0.0),
                    Complex64::new(2.0, 0.0),
                ],
            ),
            g: DMatrix::zeros(3, 1),
        };
        let (_, sel, _) = energy_scheme(&cfg, &ch).unwrap();
        assert_eq!(sel.active_indices(), vec![0, 2]);

        let flat = ChannelSet {
            h: DMatrix::from_element(3, 1, Complex64::new(1.0, 1.0)),
            g: DMatrix::zeros(3, 1),
        };
        let (_, sel, _) = energy_scheme(&cfg, &flat).unwrap();
        assert_eq!(sel.active_indices(), vec![0, 1]);
    }

    #[test]
    fn antenna_energies_match_direct_recomputation() {
        let cfg = cfg(5, 2, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let ch = random_channels(&cfg, 1.0, &mut rng);
        let e = antenna_energies(&cfg, &ch);
        for m in 0..5 {
            let direct: f64 = (0..2)
                .map(|k| {
                    let z = ch.h[(m, k)];
                    z.re * z.re + z.im * z.im
                })
                .sum();
            assert!((e[m] - direct).abs() <= 1e-15 * (1.0 + direct));
        }
    }

    #[test]
    fn mrt_scheme_power_split() {
        // Single user: the whole budget rides the matched filter.
        let cfg1 = cfg(4, 2, 1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ch = random_channels(&cfg1, 1.0, &mut rng);
        let (bf, sel, _) = mrt_scheme(&cfg1, &ch).unwrap();
        assert!((bf.trace_power() - cfg1.power_budget).abs() < 1e-12);
        sel.validate(&cfg1).unwrap();

        // Two users, orthogonal equal-norm channels: p/2 each.
        let cfg2 = cfg(4, 2, 2, 1);
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let mut h = DMatrix::from_element(4, 2, zero);
        h[(0, 0)] = one;
        h[(1, 0)] = one;
        h[(2, 1)] = one;
        h[(3, 1)] = one;
        let ch2 = ChannelSet {
            h,
            g: DMatrix::zeros(4, 1),
        };
        let (bf, _, _) = mrt_scheme(&cfg2, &ch2).unwrap();
        assert!((bf.w.column(0).norm_squared() - 1.0).abs() < 1e-12);
        assert!((bf.w.column(1).norm_squared() - 1.0).abs() < 1e-12);
        assert!((bf.trace_power() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn all_schemes_satisfy_contracts() {
        let cfg = cfg(6, 3, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let ch = random_channels(&cfg, 1.0, &mut rng);
            for (bf, sel, report) in [
                random_scheme(&cfg, &ch, 1).unwrap(),
                energy_scheme(&cfg, &ch).unwrap(),
                mrt_scheme(&cfg, &ch).unwrap(),
            ] {
                sel.validate(&cfg).unwrap();
                assert_eq!(sel.active_indices().len(), cfg.num_rf_chains);
                assert!(bf.power_feasible(cfg.power_budget));
                assert!(report.wssr >= 0.0);
            }
        }
    }
}
