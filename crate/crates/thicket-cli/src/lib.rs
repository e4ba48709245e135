//! Command implementations for the `thicket` binary, exposed as a library
//! so the commands can be driven in-process by tests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use thicket::bench::{
    aggregate, format_t_tests, format_t_tests_csv, format_table, format_table_csv,
    pairwise_t_tests, run_experiment,
};
use thicket::render::{Layers, RenderSpec};
use thicket::scenario::{parse_scenario, Scenario, StrategyKind};
use thicket::{plan_with_tree, Environment, PlanResult, PlannerParams, PotentialParams};

/// Exit codes: 0 solution/success, 2 no solution, 3 configuration error,
/// 4 I/O error.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("no solution found")]
    NoSolution,
    #[error("{0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::NoSolution => 2,
            CliError::Config(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// Load and fully validate a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_scenario(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn build_env(scenario: &Scenario) -> Result<Environment, CliError> {
    scenario.environment().map_err(config_err)
}

fn profile_params(
    scenario: &Scenario,
    env: &Environment,
    profile: &str,
    seed: u64,
) -> Result<PlannerParams, CliError> {
    let mut params = scenario
        .planner_params(profile, env)
        .ok_or_else(|| CliError::Config(format!("unknown profile `{profile}`")))?;
    params.rng_seed = seed;
    params.validate().map_err(config_err)?;
    Ok(params)
}

/// Serialized once per planning run.
#[derive(Debug, Serialize)]
pub struct RunRecord<'a> {
    pub profile: &'a str,
    pub seed: u64,
    pub params: &'a PlannerParams,
    pub result: &'a PlanResult,
}

pub fn parse_layers(list: &str) -> Result<Layers, CliError> {
    let mut layers = Layers {
        world: false,
        tree: false,
        path: false,
        quiver: false,
    };
    for item in list.split(',') {
        match item.trim() {
            "world" => layers.world = true,
            "tree" => layers.tree = true,
            "path" => layers.path = true,
            "quiver" => layers.quiver = true,
            other => {
                return Err(CliError::Config(format!(
                    "unknown layer `{other}` (expected world, tree, path, quiver)"
                )))
            }
        }
    }
    Ok(layers)
}

/// Potential parameters used for quiver rendering: the profile's own when
/// it is biased, otherwise the scenario defaults.
fn quiver_potentials(
    scenario: &Scenario,
    env: &Environment,
    params: &PlannerParams,
) -> Option<PotentialParams> {
    if let Some(p) = params.strategy.potentials() {
        return Some(p.clone());
    }
    scenario.potentials.as_ref().map(|p| {
        PotentialParams {
            k_att: p.k_att,
            k_rep_perm: p.k_rep_perm,
            k_rep_imp: p.k_rep_imp,
            d_star_perm: p.d_star_perm,
            d_star_imp: p.d_star_imp,
            beta: p.beta,
            f_att_max: 0.0,
        }
        .scaled_for(env)
    })
}

pub struct PlanOptions<'a> {
    pub scenario: &'a Path,
    pub profile: &'a str,
    pub seed: u64,
    pub out_dir: Option<&'a Path>,
    pub svg: Option<&'a Path>,
    pub layers: Layers,
    /// Override the profile's iteration budget (used by `render`).
    pub iterations: Option<u32>,
}

/// Run a single plan, write its run record and optional SVG. Returns the
/// result; callers map an unsolved plan to exit code 2.
pub fn cmd_plan(opts: &PlanOptions) -> Result<PlanResult, CliError> {
    let scenario = load_scenario(opts.scenario)?;
    let env = build_env(&scenario)?;
    let mut params = profile_params(&scenario, &env, opts.profile, opts.seed)?;
    if let Some(iters) = opts.iterations {
        params.max_iterations = iters;
        params.checkpoints.retain(|&c| c <= iters);
        params.validate().map_err(config_err)?;
    }
    let (result, tree) = plan_with_tree(&env, &params).map_err(config_err)?;

    if let Some(dir) = opts.out_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let record = RunRecord {
            profile: opts.profile,
            seed: opts.seed,
            params: &params,
            result: &result,
        };
        let json = serde_json::to_string_pretty(&record).expect("record serializes");
        let path = dir.join(format!("plan-{}-seed{}.json", opts.profile, opts.seed));
        fs::write(&path, json + "\n").map_err(|e| CliError::io(path, e))?;
    }

    if let Some(svg_path) = opts.svg {
        let spec = RenderSpec {
            layers: opts.layers,
            ..RenderSpec::default()
        };
        let potentials = quiver_potentials(&scenario, &env, &params);
        let svg = thicket::render::render_svg(
            &env,
            Some(&tree),
            result.path.as_deref(),
            potentials.as_ref(),
            &spec,
        )
        .map_err(config_err)?;
        if let Some(parent) = svg_path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        fs::write(svg_path, svg).map_err(|e| CliError::io(svg_path, e))?;
    }
    Ok(result)
}

#[derive(Debug, Serialize)]
struct BenchMetadata<'a> {
    scenario: String,
    trials: u32,
    base_seed: u64,
    profiles: Vec<&'a str>,
    seed_schedule: &'static str,
}

/// Run the scenario's experiment block: all profiles, seed-paired trials.
/// Writes per-trial records, the aggregate table (text and CSV), pairwise
/// Welch t-tests and run metadata into `out_dir`. Returns the table text.
pub fn cmd_bench(scenario_path: &Path, out_dir: &Path) -> Result<String, CliError> {
    let scenario = load_scenario(scenario_path)?;
    let env = build_env(&scenario)?;
    let spec = scenario.experiment_spec(&env).map_err(config_err)?;

    let runs = run_experiment(&env, &spec).map_err(config_err)?;

    let records_dir = out_dir.join("records");
    fs::create_dir_all(&records_dir).map_err(|e| CliError::io(&records_dir, e))?;
    for (entry, run) in spec.algorithms.iter().zip(&runs) {
        let mut lines = String::new();
        for (trial, result) in run.results.iter().enumerate() {
            let mut params = entry.params.clone();
            params.rng_seed = spec.base_seed.wrapping_add(trial as u64);
            let record = RunRecord {
                profile: &run.label,
                seed: params.rng_seed,
                params: &params,
                result,
            };
            lines.push_str(&serde_json::to_string(&record).expect("record serializes"));
            lines.push('\n');
        }
        let path = records_dir.join(format!("{}.jsonl", run.label));
        fs::write(&path, lines).map_err(|e| CliError::io(path, e))?;
    }

    let rows = aggregate(&runs);
    let tests = pairwise_t_tests(&runs);
    let table = format_table(&rows);
    for (name, contents) in [
        ("table.txt", table.clone()),
        ("table.csv", format_table_csv(&rows)),
        ("ttests.txt", format_t_tests(&tests)),
        ("ttests.csv", format_t_tests_csv(&tests)),
    ] {
        let path = out_dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(path, e))?;
    }
    let metadata = BenchMetadata {
        scenario: scenario_path.display().to_string(),
        trials: spec.trials,
        base_seed: spec.base_seed,
        profiles: spec.algorithms.iter().map(|a| a.label.as_str()).collect(),
        seed_schedule: "trial i of every profile runs with base_seed + i (seed-paired)",
    };
    let path = out_dir.join("metadata.json");
    fs::write(
        &path,
        serde_json::to_string_pretty(&metadata).expect("metadata serializes") + "\n",
    )
    .map_err(|e| CliError::io(path, e))?;
    Ok(table)
}

/// Parse, build and smoke-plan every profile of a scenario. Returns a
/// human-readable summary on success.
pub fn cmd_validate(scenario_path: &Path, smoke_iterations: u32) -> Result<String, CliError> {
    let scenario = load_scenario(scenario_path)?;
    let env = build_env(&scenario)?;
    let mut summary = format!(
        "{}: {} profiles, {} obstacles\n",
        scenario_path.display(),
        scenario.profiles.len(),
        scenario.world.obstacles().len()
    );
    for profile in &scenario.profiles {
        let mut params = profile_params(&scenario, &env, &profile.name, 0)?;
        params.max_iterations = smoke_iterations;
        params.checkpoints.retain(|&c| c <= smoke_iterations);
        if profile.strategy == StrategyKind::SampleBias {
            // Smoke runs keep the configured bias parameters.
        }
        let (result, tree) = plan_with_tree(&env, &params).map_err(config_err)?;
        let violations = tree.validate(&env);
        if !violations.is_empty() {
            return Err(CliError::Config(format!(
                "profile `{}` produced an inconsistent tree: {}",
                profile.name, violations[0]
            )));
        }
        summary.push_str(&format!(
            "  profile {}: smoke plan ok ({} nodes{})\n",
            profile.name,
            result.tree_size,
            if result.solved() { ", solved" } else { "" }
        ));
    }
    Ok(summary)
}
