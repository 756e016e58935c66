//! Fast invariant suite. Each property computes a worst-case residual and
//! passes when it stays under the property's tolerance; the hidden
//! `--corrupt <name>` hook inflates the named property's residual so the
//! failure path stays testable.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use secbeam::model::{self, g_bound, SelectionState, SystemConfig};
use secbeam::pdd::{constrained_quadratic_min, pdd_solve, PddConfig, FINAL_VIOLATION_TOL};
use secbeam::so::greedy_select;
use secbeam::testutil::{
    fista_quadratic_min, quadratic_objective, random_channels, random_feasible_beamformer,
    random_binary_selection,
};
use secbeam::transforms::tight_surrogate;

use crate::{CliError, SelftestArgs};

struct Property {
    name: &'static str,
    tolerance: f64,
    run: fn() -> f64,
}

const PROPERTIES: &[Property] = &[
    Property {
        name: "surrogate-identity",
        tolerance: 1e-9,
        run: surrogate_identity_residual,
    },
    Property {
        name: "power-solver",
        tolerance: 1e-6,
        run: power_solver_residual,
    },
    Property {
        name: "greedy-vs-exhaustive",
        tolerance: 1e-9,
        run: greedy_residual,
    },
    Property {
        name: "scheme-contracts",
        tolerance: 0.5,
        run: scheme_contract_residual,
    },
    Property {
        name: "pdd-violation",
        tolerance: FINAL_VIOLATION_TOL,
        run: pdd_violation_residual,
    },
];

pub fn cmd_selftest(args: &SelftestArgs) -> Result<(), CliError> {
    if let Some(name) = &args.corrupt {
        if !PROPERTIES.iter().any(|p| p.name == name) {
            let names: Vec<&str> = PROPERTIES.iter().map(|p| p.name).collect();
            return Err(CliError::validation(format!(
                "unknown property '{name}'; expected one of {}",
                names.join(", ")
            )));
        }
    }
    let mut failures = 0;
    for prop in PROPERTIES {
        let mut residual = (prop.run)();
        if args.corrupt.as_deref() == Some(prop.name) {
            residual += 1.0;
        }
        if residual <= prop.tolerance {
            println!("PASS {} (residual {residual:.3e})", prop.name);
        } else {
            println!(
                "FAIL {} (residual {residual:.3e} > tolerance {:.3e})",
                prop.name, prop.tolerance
            );
            failures += 1;
        }
    }
    if failures > 0 {
        Err(CliError::runtime(format!(
            "{failures} propert{} failed",
            if failures == 1 { "y" } else { "ies" }
        )))
    } else {
        Ok(())
    }
}

fn small_cfg() -> SystemConfig {
    SystemConfig {
        num_antennas: 6,
        num_rf_chains: 3,
        num_users: 3,
        num_eves: 2,
        power_budget: 2.0,
        weights: vec![1.0, 0.8, 1.2],
        noise_ut: vec![1.0; 3],
        noise_eve: vec![1.0; 2],
    }
}

/// Worst deviation of the tight surrogate (offset removed) from the exact
/// weighted secrecy sum-rate over random feasible instances.
fn surrogate_identity_residual() -> f64 {
    let cfg = small_cfg();
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let ch = random_channels(&cfg, 1.0, &mut rng);
        let bf = random_feasible_beamformer(&cfg, &mut rng);
        let sel = random_binary_selection(&cfg, &mut rng);
        let g = g_bound(&cfg, &ch).unwrap();
        let (l, aux) = tight_surrogate(&cfg, &ch, &bf, &sel).unwrap();
        let offset: f64 = aux.b.iter().map(|b| b * (1.0 + g).log2()).sum();
        let exact = model::wssr(&cfg, &ch, &bf, &sel).unwrap().wssr;
        worst = worst.max((l / std::f64::consts::LN_2 - offset - exact).abs());
    }
    worst
}

/// Scalar closed-form case plus random instances against the accelerated
/// projected-gradient reference.
fn power_solver_residual() -> f64 {
    let mut worst = 0.0f64;

    let a_mat = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    let a_vec = DVector::from_element(1, Complex64::new(2.0, 0.0));
    let (cols, lambda, _) =
        constrained_quadratic_min(&[a_mat], &[a_vec], 1.0, 1e-12).unwrap();
    worst = worst.max((lambda - 1.0).abs());
    worst = worst.max((cols[0][0] - Complex64::new(1.0, 0.0)).norm());

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..3 {
        let m = 4;
        let mut a_mats = Vec::new();
        let mut a_vecs = Vec::new();
        for _ in 0..2 {
            let b = DMatrix::from_fn(m, 3, |_, _| {
                Complex64::new(
                    rand::Rng::gen_range(&mut rng, -1.0..1.0),
                    rand::Rng::gen_range(&mut rng, -1.0..1.0),
                )
            });
            let mat = &b * b.adjoint();
            let v = DVector::from_fn(m, |_, _| {
                Complex64::new(
                    rand::Rng::gen_range(&mut rng, -1.0..1.0),
                    rand::Rng::gen_range(&mut rng, -1.0..1.0),
                )
            });
            a_vecs.push(&mat * v);
            a_mats.push(mat);
        }
        let p = 1.0;
        let (cols, _, _) = constrained_quadratic_min(&a_mats, &a_vecs, p, 1e-12).unwrap();
        let oracle = fista_quadratic_min(&a_mats, &a_vecs, p, 20_000);
        let gap = quadratic_objective(&a_mats, &a_vecs, &cols)
            - quadratic_objective(&a_mats, &a_vecs, &oracle);
        worst = worst.max(gap.abs());
    }
    worst
}

/// Greedy must never beat exhaustive search and must match it on most
/// instances; residual is the worst overshoot plus a miss penalty.
fn greedy_residual() -> f64 {
    let cfg = SystemConfig {
        num_antennas: 6,
        num_rf_chains: 2,
        num_users: 2,
        num_eves: 1,
        power_budget: 2.0,
        weights: vec![1.0, 1.0],
        noise_ut: vec![1.0, 1.0],
        noise_eve: vec![1.0],
    };
    let mut worst = 0.0f64;
    let mut hits = 0;
    let trials = 10;
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + seed);
        let ch = random_channels(&cfg, 1.0, &mut rng);
        let bf = random_feasible_beamformer(&cfg, &mut rng);
        let sel = greedy_select(&cfg, &ch, &bf).unwrap();
        let greedy_val = model::wssr(&cfg, &ch, &bf, &sel).unwrap().wssr;
        let mut best = f64::NEG_INFINITY;
        for a in 0..6 {
            for b in (a + 1)..6 {
                let cand = SelectionState::binary_from_indices(6, &[a, b]);
                best = best.max(model::wssr(&cfg, &ch, &bf, &cand).unwrap().wssr);
            }
        }
        worst = worst.max(greedy_val - best);
        if (best - greedy_val).abs() <= 1e-12 {
            hits += 1;
        }
    }
    if hits * 10 < trials * 6 {
        worst += 1.0;
    }
    worst
}

/// Binary selection, power feasibility, and nonnegative rates for every
/// comparison scheme; residual counts violations.
fn scheme_contract_residual() -> f64 {
    let cfg = small_cfg();
    let mut violations = 0.0;
    for seed in 0..3 {
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + seed);
        let ch = random_channels(&cfg, 1.0, &mut rng);
        let outputs = [
            secbeam::benchmarks::random_scheme(&cfg, &ch, seed),
            secbeam::benchmarks::energy_scheme(&cfg, &ch),
            secbeam::benchmarks::mrt_scheme(&cfg, &ch),
        ];
        for out in outputs {
            match out {
                Ok((bf, sel, report)) => {
                    if sel.validate(&cfg).is_err()
                        || !bf.power_feasible(cfg.power_budget)
                        || !(report.wssr >= 0.0)
                    {
                        violations += 1.0;
                    }
                }
                Err(_) => violations += 1.0,
            }
        }
    }
    violations
}

/// One full penalty-solver run on a small instance; residual is its final
/// constraint violation.
fn pdd_violation_residual() -> f64 {
    let cfg = SystemConfig {
        num_antennas: 8,
        num_rf_chains: 3,
        num_users: 2,
        num_eves: 2,
        power_budget: 2.0,
        weights: vec![1.0, 1.0],
        noise_ut: vec![1.0, 1.0],
        noise_eve: vec![1.0, 1.0],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5000);
    let ch = random_channels(&cfg, 1.0, &mut rng);
    match pdd_solve(&cfg, &ch, &PddConfig::default(), 0) {
        Ok((_, _, trace)) => *trace
            .violation_per_outer_iter
            .last()
            .unwrap_or(&f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}
