//! Monte Carlo harness: Rayleigh channel generation with a fixed path
//! loss, seeded execution of every requested scheme on identical channel
//! draws, and mean/standard-error aggregation per sweep point.
//!
//! Channel draws depend only on (seed, realization index) and the array
//! dimensions, never on the sweep position: each realization gets its own
//! counter stream of one generator, so every scheme at every sweep point
//! sees the same fading when dimensions match. That pairing is what makes
//! small-sample scheme comparisons and monotone-in-budget checks sharp.

use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{energy_scheme, mrt_scheme, random_scheme};
use crate::error::{Error, Result};
use crate::model::{self, ChannelSet, SystemConfig};
use crate::pdd::{pdd_solve, PddConfig, PddTrace};
use crate::so::{so_solve, SoConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Pdd,
    So,
    Random,
    Energy,
    Mrt,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Pdd,
        Scheme::So,
        Scheme::Random,
        Scheme::Energy,
        Scheme::Mrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Pdd => "pdd",
            Scheme::So => "so",
            Scheme::Random => "random",
            Scheme::Energy => "energy",
            Scheme::Mrt => "mrt",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pdd" => Ok(Scheme::Pdd),
            "so" => Ok(Scheme::So),
            "random" => Ok(Scheme::Random),
            "energy" => Ok(Scheme::Energy),
            "mrt" => Ok(Scheme::Mrt),
            other => Err(Error::InvalidConfig {
                reason: format!("unknown scheme '{other}'; expected one of pdd, so, random, energy, mrt"),
            }),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// What varies across the experiment's x-axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Sweep {
    /// Single point at the configured budget and RF count.
    None,
    /// Power budgets, linear watts.
    Power(Vec<f64>),
    /// RF chain counts.
    Rf(Vec<usize>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub cfg: SystemConfig,
    /// Large-scale attenuation in dB applied to every channel entry's
    /// variance: var = 10^(path_loss_db/10).
    pub path_loss_db: f64,
    pub sweep: Sweep,
    pub num_realizations: usize,
    pub rng_seed: u64,
    pub schemes: Vec<Scheme>,
    pub pdd: PddConfig,
    pub so: SoConfig,
}

impl Default for ScenarioSpec {
    /// The headline experimental profile: 24 antennas, 6 RF chains, 6
    /// users, 4 eavesdroppers, 10 dBm budget, −120 dBm noise everywhere,
    /// −120 dB path loss, 500 realizations.
    fn default() -> Self {
        Self {
            cfg: SystemConfig {
                num_antennas: 24,
                num_rf_chains: 6,
                num_users: 6,
                num_eves: 4,
                power_budget: 0.01,
                weights: vec![1.0; 6],
                noise_ut: vec![1e-15; 6],
                noise_eve: vec![1e-15; 4],
            },
            path_loss_db: -120.0,
            sweep: Sweep::None,
            num_realizations: 500,
            rng_seed: 1,
            schemes: Scheme::ALL.to_vec(),
            pdd: PddConfig::default(),
            so: SoConfig::default(),
        }
    }
}

impl ScenarioSpec {
    /// The scaled profile used by the fast test gate: 12 antennas, 4 RF
    /// chains, 3 users, 2 eavesdroppers, 50 realizations.
    pub fn desk() -> Self {
        let base = Self::default();
        Self {
            cfg: SystemConfig {
                num_antennas: 12,
                num_rf_chains: 4,
                num_users: 3,
                num_eves: 2,
                power_budget: 0.01,
                weights: vec![1.0; 3],
                noise_ut: vec![1e-15; 3],
                noise_eve: vec![1e-15; 2],
            },
            num_realizations: 50,
            ..base
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        let fail = |reason: String| Err(Error::InvalidConfig { reason });
        if !self.path_loss_db.is_finite() {
            return fail("path_loss_db must be finite".into());
        }
        if self.num_realizations == 0 {
            return fail("num_realizations must be at least 1".into());
        }
        if self.schemes.is_empty() {
            return fail("at least one scheme must be requested".into());
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return fail(format!("scheme '{s}' listed twice"));
            }
        }
        match &self.sweep {
            Sweep::None => {}
            Sweep::Power(ps) => {
                if ps.is_empty() {
                    return fail("power sweep needs at least one value".into());
                }
                for &p in ps {
                    if !(p.is_finite() && p > 0.0) {
                        return fail(format!("swept power must be positive linear watts, got {p}"));
                    }
                }
            }
            Sweep::Rf(ns) => {
                if ns.is_empty() {
                    return fail("rf sweep needs at least one value".into());
                }
                for &n in ns {
                    if n < 1 || n >= self.cfg.num_antennas {
                        return fail(format!(
                            "swept rf count must satisfy 1 <= n < {}, got {n}",
                            self.cfg.num_antennas
                        ));
                    }
                }
            }
        }
        self.pdd.validate()?;
        Ok(())
    }

    /// Sweep points as (axis value, effective config) pairs.
    pub fn sweep_points(&self) -> Vec<(f64, SystemConfig)> {
        match &self.sweep {
            Sweep::None => vec![(self.cfg.power_budget, self.cfg.clone())],
            Sweep::Power(ps) => ps
                .iter()
                .map(|&p| {
                    (
                        p,
                        SystemConfig {
                            power_budget: p,
                            ..self.cfg.clone()
                        },
                    )
                })
                .collect(),
            Sweep::Rf(ns) => ns
                .iter()
                .map(|&n| {
                    (
                        n as f64,
                        SystemConfig {
                            num_rf_chains: n,
                            ..self.cfg.clone()
                        },
                    )
                })
                .collect(),
        }
    }
}

/// Deterministic per-realization seed derivation (splitmix-style) for the
/// solver-internal randomness, distinct from the channel streams.
fn mix_seed(seed: u64, idx: u64) -> u64 {
    let mut z = seed ^ idx.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// I.i.d. circularly symmetric complex Gaussian channels with per-entry
/// variance 10^(path_loss_db/10). Deterministic in (rng_seed,
/// realization_index): each realization is a separate counter stream, so
/// draws never depend on how many sweep points ran before.
pub fn gen_channels(
    cfg: &SystemConfig,
    path_loss_db: f64,
    rng_seed: u64,
    realization_index: usize,
) -> ChannelSet {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(realization_index as u64);
    let amp = (10f64.powf(path_loss_db / 10.0) / 2.0).sqrt();
    let draw = |rng: &mut ChaCha8Rng| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * amp, im * amp)
    };
    let mut h = DMatrix::zeros(cfg.num_antennas, cfg.num_users);
    for c in 0..cfg.num_users {
        for r in 0..cfg.num_antennas {
            h[(r, c)] = draw(&mut rng);
        }
    }
    let mut g = DMatrix::zeros(cfg.num_antennas, cfg.num_eves);
    for c in 0..cfg.num_eves {
        for r in 0..cfg.num_antennas {
            g[(r, c)] = draw(&mut rng);
        }
    }
    ChannelSet { h, g }
}

/// One (sweep point, scheme) aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub mean_wssr: f64,
    pub stderr: f64,
    pub n_ok: usize,
    pub n_fail: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PddTraceRecord {
    pub realization: usize,
    pub trace: PddTrace,
}

/// Everything a run produces. All fields except `solve_seconds` are
/// bit-reproducible given the same spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateResult {
    pub cells: Vec<CellStats>,
    /// Convergence traces from the first sweep point only (the trace file
    /// schema has no sweep column; use a single-point run for trace
    /// studies).
    pub pdd_traces: Vec<PddTraceRecord>,
    pub solve_seconds: f64,
}

struct RealizationOutcome {
    wssr_by_scheme: Vec<Option<f64>>,
    pdd_trace: Option<PddTrace>,
}

fn run_realization(
    spec: &ScenarioSpec,
    point_cfg: &SystemConfig,
    realization: usize,
    keep_trace: bool,
) -> RealizationOutcome {
    let ch = gen_channels(point_cfg, spec.path_loss_db, spec.rng_seed, realization);
    let mut wssr_by_scheme = Vec::with_capacity(spec.schemes.len());
    let mut pdd_trace = None;
    for &scheme in &spec.schemes {
        let value = match scheme {
            Scheme::Pdd => pdd_solve(
                point_cfg,
                &ch,
                &spec.pdd,
                mix_seed(spec.rng_seed, realization as u64),
            )
            .and_then(|(bf, sel, trace)| {
                let report = model::wssr(point_cfg, &ch, &bf, &sel)?;
                if keep_trace {
                    pdd_trace = Some(trace);
                }
                Ok(report.wssr)
            }),
            Scheme::So => so_solve(point_cfg, &ch, &spec.so).map(|(_, _, r)| r.wssr),
            Scheme::Random => random_scheme(
                point_cfg,
                &ch,
                mix_seed(spec.rng_seed ^ 0x5e1ec7, realization as u64),
            )
            .map(|(_, _, r)| r.wssr),
            Scheme::Energy => energy_scheme(point_cfg, &ch).map(|(_, _, r)| r.wssr),
            Scheme::Mrt => mrt_scheme(point_cfg, &ch).map(|(_, _, r)| r.wssr),
        };
        wssr_by_scheme.push(value.ok());
    }
    RealizationOutcome {
        wssr_by_scheme,
        pdd_trace,
    }
}

/// Executes every requested scheme on identical channel draws at every
/// sweep point and aggregates. Realizations run in parallel; aggregation
/// order is fixed by (sweep index, scheme index), so results are
/// reproducible regardless of thread scheduling.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<AggregateResult> {
    spec.validate()?;
    let points = spec.sweep_points();
    for (_, cfg) in &points {
        cfg.validate()?;
    }
    let started = Instant::now();
    let mut cells = Vec::with_capacity(points.len() * spec.schemes.len());
    let mut pdd_traces = Vec::new();

    for (sweep_index, (sweep_value, point_cfg)) in points.iter().enumerate() {
        let keep_trace = sweep_index == 0 && spec.schemes.contains(&Scheme::Pdd);
        let outcomes: Vec<RealizationOutcome> = (0..spec.num_realizations)
            .into_par_iter()
            .map(|r| run_realization(spec, point_cfg, r, keep_trace))
            .collect();

        for (scheme_index, &scheme) in spec.schemes.iter().enumerate() {
            let values: Vec<f64> = outcomes
                .iter()
                .filter_map(|o| o.wssr_by_scheme[scheme_index])
                .collect();
            let n_ok = values.len();
            let n_fail = spec.num_realizations - n_ok;
            let mean = if n_ok > 0 {
                values.iter().sum::<f64>() / n_ok as f64
            } else {
                f64::NAN
            };
            let stderr = if n_ok > 1 {
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                    / (n_ok - 1) as f64;
                (var / n_ok as f64).sqrt()
            } else {
                0.0
            };
            cells.push(CellStats {
                sweep_value: *sweep_value,
                scheme,
                mean_wssr: mean,
                stderr,
                n_ok,
                n_fail,
            });
        }
        if keep_trace {
            for (realization, outcome) in outcomes.into_iter().enumerate() {
                if let Some(trace) = outcome.pdd_trace {
                    pdd_traces.push(PddTraceRecord { realization, trace });
                }
            }
        }
    }

    Ok(AggregateResult {
        cells,
        pdd_traces,
        solve_seconds: started.elapsed().as_secs_f64(),
    })
}
