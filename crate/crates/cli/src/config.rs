//! Flat TOML scenario configuration. Every key is optional; the empty
//! file yields the reference profile (24 antennas, 6 RF chains, 6 users,
//! 4 eavesdroppers, 10 dBm budget, −120 dBm noise, −120 dB path loss,
//! 500 realizations, all schemes). Powers are written in dBm and path
//! loss in dB; conversion to linear watts happens here and nowhere else.

use std::path::Path;

use serde::{Deserialize, Serialize};

use secbeam::pdd::PddInit;
use secbeam::sim::{ScenarioSpec, Scheme, Sweep};

use crate::{CliError, RunArgs, SweepKind};

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// On-disk schema. `deny_unknown_fields` makes a typo an error that lists
/// every valid key.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileConfig {
    num_antennas: Option<usize>,
    num_rf_chains: Option<usize>,
    num_users: Option<usize>,
    num_eves: Option<usize>,
    power_dbm: Option<f64>,
    /// Per-user rate weights; defaults to all ones.
    weights: Option<Vec<f64>>,
    noise_ut_dbm: Option<f64>,
    noise_eve_dbm: Option<f64>,
    path_loss_db: Option<f64>,
    num_realizations: Option<usize>,
    rng_seed: Option<u64>,
    /// Subset of {pdd, so, random, energy, mrt}; defaults to all five.
    schemes: Option<Vec<String>>,
    /// One of "none", "power", "rf".
    sweep: Option<String>,
    /// dBm values for a power sweep; RF-chain counts for an rf sweep.
    sweep_values: Option<Vec<f64>>,
    pdd_rho_init: Option<f64>,
    pdd_chi: Option<f64>,
    pdd_violation_threshold_init: Option<f64>,
    pdd_inner_tol: Option<f64>,
    pdd_inner_max_iters: Option<usize>,
    pdd_outer_max_iters: Option<usize>,
    pdd_bisect_tol: Option<f64>,
    pdd_random_init: Option<bool>,
    so_inner_tol: Option<f64>,
    so_max_iters: Option<usize>,
    so_refine: Option<bool>,
}

fn parse_schemes(names: &[String]) -> Result<Vec<Scheme>, CliError> {
    names
        .iter()
        .map(|n| n.parse::<Scheme>().map_err(|e| CliError::validation(e.to_string())))
        .collect()
}

fn sweep_from_parts(
    kind: &str,
    values: Option<&[f64]>,
) -> Result<Sweep, CliError> {
    match kind {
        "none" => Ok(Sweep::None),
        "power" => {
            let dbm = values.ok_or_else(|| {
                CliError::validation("sweep = \"power\" requires sweep_values (dBm)")
            })?;
            Ok(Sweep::Power(dbm.iter().map(|&v| dbm_to_watts(v)).collect()))
        }
        "rf" => {
            let raw = values.ok_or_else(|| {
                CliError::validation("sweep = \"rf\" requires sweep_values (RF-chain counts)")
            })?;
            let mut counts = Vec::with_capacity(raw.len());
            for &v in raw {
                if v.fract() != 0.0 || v < 1.0 {
                    return Err(CliError::validation(format!(
                        "rf sweep values must be positive integers, got {v}"
                    )));
                }
                counts.push(v as usize);
            }
            Ok(Sweep::Rf(counts))
        }
        other => Err(CliError::validation(format!(
            "sweep must be one of none, power, rf; got '{other}'"
        ))),
    }
}

pub fn parse_scenario(path: &Path) -> Result<ScenarioSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::validation(format!("cannot read config {}: {e}", path.display()))
    })?;
    let file: FileConfig = toml::from_str(&text)
        .map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))?;

    let mut spec = ScenarioSpec::default();
    let cfg = &mut spec.cfg;
    if let Some(v) = file.num_antennas {
        cfg.num_antennas = v;
    }
    if let Some(v) = file.num_rf_chains {
        cfg.num_rf_chains = v;
    }
    if let Some(v) = file.num_users {
        cfg.num_users = v;
    }
    if let Some(v) = file.num_eves {
        cfg.num_eves = v;
    }
    if let Some(v) = file.power_dbm {
        cfg.power_budget = dbm_to_watts(v);
    }
    let noise_ut = dbm_to_watts(file.noise_ut_dbm.unwrap_or(-120.0));
    let noise_eve = dbm_to_watts(file.noise_eve_dbm.unwrap_or(-120.0));
    cfg.noise_ut = vec![noise_ut; cfg.num_users];
    cfg.noise_eve = vec![noise_eve; cfg.num_eves];
    cfg.weights = match file.weights {
        Some(w) => w,
        None => vec![1.0; cfg.num_users],
    };

    if let Some(v) = file.path_loss_db {
        spec.path_loss_db = v;
    }
    if let Some(v) = file.num_realizations {
        spec.num_realizations = v;
    }
    if let Some(v) = file.rng_seed {
        spec.rng_seed = v;
    }
    if let Some(names) = &file.schemes {
        spec.schemes = parse_schemes(names)?;
    }
    let kind = file.sweep.as_deref().unwrap_or("none");
    spec.sweep = sweep_from_parts(kind, file.sweep_values.as_deref())?;

    if let Some(v) = file.pdd_rho_init {
        spec.pdd.rho_init = v;
    }
    if let Some(v) = file.pdd_chi {
        spec.pdd.chi = v;
    }
    if let Some(v) = file.pdd_violation_threshold_init {
        spec.pdd.violation_threshold_init = v;
    }
    if let Some(v) = file.pdd_inner_tol {
        spec.pdd.inner_tol = v;
    }
    if let Some(v) = file.pdd_inner_max_iters {
        spec.pdd.inner_max_iters = v;
    }
    if let Some(v) = file.pdd_outer_max_iters {
        spec.pdd.outer_max_iters = v;
    }
    if let Some(v) = file.pdd_bisect_tol {
        spec.pdd.bisect_tol = v;
    }
    if let Some(v) = file.pdd_random_init {
        spec.pdd.init = if v { PddInit::Random } else { PddInit::Deterministic };
    }
    if let Some(v) = file.so_inner_tol {
        spec.so.inner_tol = v;
    }
    if let Some(v) = file.so_max_iters {
        spec.so.max_iters = v;
    }
    if let Some(v) = file.so_refine {
        spec.so.refine = v;
    }

    spec.validate()
        .map_err(|e| CliError::validation(e.to_string()))?;
    Ok(spec)
}

/// Command-line flags override the corresponding file keys.
pub fn apply_overrides(spec: &mut ScenarioSpec, args: &RunArgs) -> Result<(), CliError> {
    if let Some(kind) = args.sweep {
        let kind_str = match kind {
            SweepKind::Power => "power",
            SweepKind::Rf => "rf",
        };
        let values: Option<Vec<f64>> = args.values.clone().or_else(|| match &spec.sweep {
            // Re-use file-provided values only when the axis kind matches.
            Sweep::Power(ws) if kind == SweepKind::Power => {
                Some(ws.iter().map(|w| 10.0 * w.log10() + 30.0).collect())
            }
            Sweep::Rf(ns) if kind == SweepKind::Rf => {
                Some(ns.iter().map(|&n| n as f64).collect())
            }
            _ => None,
        });
        spec.sweep = sweep_from_parts(kind_str, values.as_deref())?;
    } else if let Some(values) = &args.values {
        // --values without --sweep reshapes the axis configured in the file.
        let kind = match &spec.sweep {
            Sweep::Power(_) => "power",
            Sweep::Rf(_) => "rf",
            Sweep::None => {
                return Err(CliError::validation(
                    "--values given but no sweep axis is configured; add --sweep power|rf",
                ))
            }
        };
        spec.sweep = sweep_from_parts(kind, Some(values))?;
    }
    if let Some(names) = &args.schemes {
        spec.schemes = parse_schemes(names)?;
    }
    if let Some(n) = args.realizations {
        spec.num_realizations = n;
    }
    if let Some(seed) = args.seed {
        spec.rng_seed = seed;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn parse_str(text: &str) -> Result<ScenarioSpec, CliError> {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        parse_scenario(f.path())
    }

    #[test]
    fn empty_file_yields_reference_profile() {
        let spec = parse_str("").unwrap();
        assert_eq!(spec.cfg.num_antennas, 24);
        assert_eq!(spec.cfg.num_rf_chains, 6);
        assert_eq!(spec.cfg.num_users, 6);
        assert_eq!(spec.cfg.num_eves, 4);
        assert!((spec.cfg.power_budget - 0.01).abs() < 1e-15);
        assert!((spec.cfg.noise_ut[0] - 1e-15).abs() < 1e-27);
        assert_eq!(spec.cfg.weights, vec![1.0; 6]);
        assert_eq!(spec.path_loss_db, -120.0);
        assert_eq!(spec.num_realizations, 500);
        assert_eq!(spec.schemes.len(), 5);
        assert!((spec.pdd.rho_init - 1.0).abs() < 1e-15);
        assert!((spec.pdd.chi - 0.1).abs() < 1e-15);
    }

    #[test]
    fn invariant_violations_carry_field_messages() {
        let err = parse_str("num_rf_chains = 30\n").unwrap_err();
        assert_eq!(err.code, 2);
        assert!(err.message.contains("rf_chains"), "{}", err.message);
    }

    #[test]
    fn unknown_keys_are_rejected_with_the_valid_list() {
        let err = parse_str("numb_antennas = 8\n").unwrap_err();
        assert_eq!(err.code, 2);
        assert!(err.message.contains("unknown field"), "{}", err.message);
        assert!(err.message.contains("num_antennas"), "{}", err.message);
    }

    #[test]
    fn round_trip_through_serialization() {
        let spec = parse_str(
            "num_antennas = 8\nnum_rf_chains = 3\nnum_users = 2\nnum_eves = 1\n\
             sweep = \"rf\"\nsweep_values = [2, 3]\nschemes = [\"mrt\", \"energy\"]\n",
        )
        .unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: ScenarioSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn dbm_conversion_happens_once_at_the_boundary() {
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        assert!((dbm_to_watts(10.0) - 0.01).abs() < 1e-15);
        assert!((dbm_to_watts(-120.0) - 1e-15).abs() < 1e-27);
        let spec = parse_str("power_dbm = 0.0\nsweep = \"power\"\nsweep_values = [0, 10]\n")
            .unwrap();
        assert!((spec.cfg.power_budget - 0.001).abs() < 1e-15);
        match &spec.sweep {
            Sweep::Power(ws) => {
                assert!((ws[0] - 0.001).abs() < 1e-15);
                assert!((ws[1] - 0.01).abs() < 1e-15);
            }
            other => panic!("wrong sweep {other:?}"),
        }
    }

    #[test]
    fn rf_sweep_values_must_be_integers() {
        let err = parse_str("sweep = \"rf\"\nsweep_values = [2.5]\n").unwrap_err();
        assert!(err.message.contains("integer"), "{}", err.message);
    }
}
