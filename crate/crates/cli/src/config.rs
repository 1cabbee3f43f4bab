//! Plain key=value configuration files for engine and operator settings.
//! Lines starting with '#' and blank lines are ignored; keys apply in file
//! order. Command-line flags are applied after the file, so they win.

use crate::CliError;
use std::path::Path;
use tscflp::engine::EngineConfig;
use tscflp::heuristics::DepotIndexPolicy;
use tscflp::search::LsCompare;
use tscflp::surrogate::{Activation, HiddenPolicy};

pub fn apply_config_file(cfg: &mut EngineConfig, path: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Validation(format!("config line {}: expected key=value", lineno + 1))
        })?;
        apply_key(cfg, key.trim(), value.trim())
            .map_err(|msg| CliError::Validation(format!("config line {}: {msg}", lineno + 1)))?;
    }
    Ok(())
}

fn apply_key(cfg: &mut EngineConfig, key: &str, value: &str) -> Result<(), String> {
    fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
        value
            .parse()
            .map_err(|_| format!("bad value {value:?} for {key}"))
    }
    match key {
        "population_size" => {
            let np: usize = parse(key, value)?;
            cfg.population_size = np;
            cfg.elite_count = EngineConfig::default_elite_count(np);
        }
        "max_iterations" => cfg.max_iterations = parse(key, value)?,
        "max_stall" => cfg.max_stall = parse(key, value)?,
        "elite_count" => cfg.elite_count = parse(key, value)?,
        "pc_min" => cfg.operators.pc_min = parse(key, value)?,
        "pc_max" => cfg.operators.pc_max = parse(key, value)?,
        "pm_min" => cfg.operators.pm_min = parse(key, value)?,
        "pm_max" => cfg.operators.pm_max = parse(key, value)?,
        "hidden_nodes" => cfg.elm.hidden = HiddenPolicy::Fixed(parse(key, value)?),
        "activation" => {
            cfg.elm.activation = match value {
                "sigmoid" => Activation::Sigmoid,
                "tanh" => Activation::Tanh,
                other => return Err(format!("unknown activation {other:?}")),
            }
        }
        "ls_compare" => {
            cfg.ls_compare = match value {
                "surrogate" => LsCompare::Surrogate,
                "mixed" => LsCompare::Mixed,
                other => return Err(format!("unknown ls_compare {other:?}")),
            }
        }
        "use_local_search" => cfg.use_local_search = parse(key, value)?,
        "depot_index_policy" => {
            cfg.depot_index_policy = match value {
                "open-plants" => DepotIndexPolicy::OpenPlants,
                "all-plants" => DepotIndexPolicy::AllPlants,
                other => return Err(format!("unknown depot_index_policy {other:?}")),
            }
        }
        other => return Err(format!("unknown key {other:?}")),
    }
    Ok(())
}
