//! Scenario files: a sectioned key-value text format describing an
//! environment, its obstacles, named planner profiles and an optional
//! experiment block.
//!
//! The format is line-oriented. `[section]` headers open sections,
//! `key = value` lines fill them, `#` starts a comment. Keys are
//! exact-match: unknown or duplicate keys are errors, and every diagnostic
//! carries the offending line number. Parsing resolves all defaults, so
//! emitting a parsed scenario and re-parsing it reproduces the same value.
//!
//! ```text
//! [environment]
//! kind = point2d
//!
//! [world]
//! bounds = 0 0 100 100
//!
//! [obstacle]
//! shape = rect 45 0 55 100
//! permeability = permeable 100
//!
//! [start]
//! config = 10 50
//!
//! [goal]
//! config = 90 50
//!
//! [potentials]
//! k_att = 50
//! k_rep_perm = 500
//! k_rep_imp = 500
//! d_obs_star = 5
//! beta = 1
//!
//! [profile apf]
//! strategy = nearest_node_bias
//! max_iterations = 5000
//! delta = 3
//! checkpoints = 1000 2500 5000
//!
//! [experiment]
//! trials = 100
//! base_seed = 42
//! profiles = apf
//! ```

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::apf::PotentialParams;
use crate::bench::{AlgorithmEntry, BenchError, ExperimentSpec};
use crate::cspace::{arm_env, point2d_env, Config, EnvError, Environment, PlanarArm};
use crate::geometry::{ObstacleRegion, Permeability, Point2, Shape, World};
use crate::planner::{ExtendStrategy, PlannerParams};

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ScenarioError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    Point2d,
    PlanarArm,
}

/// Potential-field gains as written in the scenario; `f_att_max` is derived
/// from the start-goal distance when profiles are instantiated.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialsSection {
    pub k_att: f64,
    pub k_rep_perm: f64,
    pub k_rep_imp: f64,
    pub d_star_perm: f64,
    pub d_star_imp: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    None,
    NearestNodeBias,
    SampleBias,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub name: String,
    pub strategy: StrategyKind,
    /// Blend hyperparameter for biased strategies.
    pub beta: Option<f64>,
    /// Gradient-descent step for the sample-bias strategy.
    pub bias_step: Option<f64>,
    /// Gradient-descent iterations for the sample-bias strategy.
    pub bias_iters: Option<u32>,
    pub max_iterations: u32,
    pub delta: f64,
    pub neighbor_radius: f64,
    pub goal_radius: f64,
    pub edge_check_resolution: f64,
    pub checkpoints: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentBlock {
    pub trials: u32,
    pub base_seed: u64,
    pub profiles: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: EnvKind,
    pub world: World,
    pub arm: Option<PlanarArm>,
    pub start: Config,
    pub goal: Config,
    pub goal_pose: Option<Point2>,
    pub potentials: Option<PotentialsSection>,
    pub profiles: Vec<Profile>,
    pub experiment: Option<ExperimentBlock>,
}

// ---------------------------------------------------------------------------
// Raw section scanning

struct RawEntry {
    key: String,
    value: String,
    line: usize,
    consumed: bool,
}

struct RawSection {
    name: String,
    arg: Option<String>,
    line: usize,
    entries: Vec<RawEntry>,
}

impl RawSection {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries
            .iter_mut()
            .find(|e| !e.consumed && e.key == key)
            .map(|e| {
                e.consumed = true;
                (e.value.clone(), e.line)
            })
    }

    fn require(&mut self, key: &str) -> Result<(String, usize), ScenarioError> {
        self.take(key)
            .ok_or_else(|| ScenarioError {
                line: self.line,
                message: format!("section [{}] is missing required key `{}`", self.label(), key),
            })
    }

    fn label(&self) -> String {
        match &self.arg {
            Some(a) => format!("{} {}", self.name, a),
            None => self.name.clone(),
        }
    }

    fn finish(&self) -> Result<(), ScenarioError> {
        for e in &self.entries {
            if !e.consumed {
                return err(e.line, format!("unknown key `{}` in section [{}]", e.key, self.label()));
            }
        }
        Ok(())
    }
}

fn scan_sections(text: &str) -> Result<Vec<RawSection>, ScenarioError> {
    let mut sections: Vec<RawSection> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[') {
            let Some(inner) = inner.strip_suffix(']') else {
                return err(line_no, "malformed section header (missing `]`)");
            };
            let mut parts = inner.split_whitespace();
            let Some(name) = parts.next() else {
                return err(line_no, "empty section header");
            };
            let arg = parts.next().map(str::to_string);
            if parts.next().is_some() {
                return err(line_no, "section header has too many tokens");
            }
            sections.push(RawSection {
                name: name.to_string(),
                arg,
                line: line_no,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(line_no, "expected `key = value` or `[section]`");
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let Some(section) = sections.last_mut() else {
            return err(line_no, "key outside any section");
        };
        if section.entries.iter().any(|e| e.key == key) {
            return err(line_no, format!("duplicate key `{key}` in section [{}]", section.label()));
        }
        section.entries.push(RawEntry {
            key,
            value,
            line: line_no,
            consumed: false,
        });
    }
    Ok(sections)
}

// ---------------------------------------------------------------------------
// Value parsers

fn parse_f64(value: &str, line: usize, key: &str) -> Result<f64, ScenarioError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ScenarioError {
            line,
            message: format!("`{key}` expects a finite number, got `{value}`"),
        })
}

fn parse_u32(value: &str, line: usize, key: &str) -> Result<u32, ScenarioError> {
    value.parse::<u32>().map_err(|_| ScenarioError {
        line,
        message: format!("`{key}` expects a non-negative integer, got `{value}`"),
    })
}

fn parse_u64(value: &str, line: usize, key: &str) -> Result<u64, ScenarioError> {
    value.parse::<u64>().map_err(|_| ScenarioError {
        line,
        message: format!("`{key}` expects a non-negative integer, got `{value}`"),
    })
}

fn parse_f64_list(value: &str, line: usize, key: &str) -> Result<Vec<f64>, ScenarioError> {
    value
        .split_whitespace()
        .map(|tok| parse_f64(tok, line, key))
        .collect()
}

fn parse_u32_list(value: &str, line: usize, key: &str) -> Result<Vec<u32>, ScenarioError> {
    value
        .split_whitespace()
        .map(|tok| parse_u32(tok, line, key))
        .collect()
}

fn fixed_f64_list(
    value: &str,
    line: usize,
    key: &str,
    n: usize,
) -> Result<Vec<f64>, ScenarioError> {
    let vals = parse_f64_list(value, line, key)?;
    if vals.len() != n {
        return err(line, format!("`{key}` expects {n} numbers, got {}", vals.len()));
    }
    Ok(vals)
}

// ---------------------------------------------------------------------------
// Section assembly

fn parse_obstacle(section: &mut RawSection) -> Result<ObstacleRegion, ScenarioError> {
    let (shape_val, shape_line) = section.require("shape")?;
    let mut toks = shape_val.split_whitespace();
    let shape = match toks.next() {
        Some("circle") => {
            let rest: Vec<&str> = toks.collect();
            if rest.len() != 3 {
                return err(shape_line, "`shape = circle` expects `circle CX CY R`");
            }
            let cx = parse_f64(rest[0], shape_line, "shape")?;
            let cy = parse_f64(rest[1], shape_line, "shape")?;
            let r = parse_f64(rest[2], shape_line, "shape")?;
            Shape::circle(Point2::new(cx, cy), r)
                .map_err(|e| ScenarioError { line: shape_line, message: e.to_string() })?
        }
        Some("rect") => {
            let rest: Vec<&str> = toks.collect();
            if rest.len() != 4 {
                return err(shape_line, "`shape = rect` expects `rect MINX MINY MAXX MAXY`");
            }
            let vals: Vec<f64> = rest
                .iter()
                .map(|t| parse_f64(t, shape_line, "shape"))
                .collect::<Result<_, _>>()?;
            Shape::rect(Point2::new(vals[0], vals[1]), Point2::new(vals[2], vals[3]))
                .map_err(|e| ScenarioError { line: shape_line, message: e.to_string() })?
        }
        other => {
            return err(
                shape_line,
                format!("unknown shape `{}` (expected `circle` or `rect`)", other.unwrap_or("")),
            )
        }
    };
    let (perm_val, perm_line) = section.require("permeability")?;
    let mut toks = perm_val.split_whitespace();
    let permeability = match toks.next() {
        Some("impermeable") => {
            if toks.next().is_some() {
                return err(perm_line, "`impermeable` takes no cost");
            }
            Permeability::Impermeable
        }
        Some("permeable") => {
            let Some(cost_tok) = toks.next() else {
                return err(perm_line, "`permeable` expects a cost: `permeable COST`");
            };
            if toks.next().is_some() {
                return err(perm_line, "`permeable` expects a single cost");
            }
            Permeability::Permeable(parse_f64(cost_tok, perm_line, "permeability")?)
        }
        other => {
            return err(
                perm_line,
                format!(
                    "unknown permeability `{}` (expected `permeable COST` or `impermeable`)",
                    other.unwrap_or("")
                ),
            )
        }
    };
    ObstacleRegion::new(shape, permeability)
        .map_err(|e| ScenarioError { line: perm_line, message: e.to_string() })
}

fn parse_profile(section: &mut RawSection) -> Result<Profile, ScenarioError> {
    let name = section
        .arg
        .clone()
        .ok_or_else(|| ScenarioError {
            line: section.line,
            message: "profile section needs a name: `[profile NAME]`".into(),
        })?;
    let (strategy_val, strategy_line) = section.require("strategy")?;
    let strategy = match strategy_val.as_str() {
        "none" => StrategyKind::None,
        "nearest_node_bias" => StrategyKind::NearestNodeBias,
        "sample_bias" => StrategyKind::SampleBias,
        other => {
            return err(
                strategy_line,
                format!("unknown strategy `{other}` (expected `none`, `nearest_node_bias` or `sample_bias`)"),
            )
        }
    };
    let (iters_val, iters_line) = section.require("max_iterations")?;
    let max_iterations = parse_u32(&iters_val, iters_line, "max_iterations")?;
    if max_iterations == 0 {
        return err(iters_line, "`max_iterations` must be positive");
    }
    let (delta_val, delta_line) = section.require("delta")?;
    let delta = parse_f64(&delta_val, delta_line, "delta")?;
    if delta <= 0.0 {
        return err(delta_line, "`delta` must be positive");
    }

    let mut opt_pos = |key: &str, default: f64| -> Result<(f64, usize), ScenarioError> {
        match section.take(key) {
            Some((v, line)) => {
                let v = parse_f64(&v, line, key)?;
                if v <= 0.0 {
                    return err(line, format!("`{key}` must be positive"));
                }
                Ok((v, line))
            }
            None => Ok((default, delta_line)),
        }
    };
    let (neighbor_radius, nr_line) = opt_pos("neighbor_radius", delta)?;
    if neighbor_radius > delta {
        return err(
            nr_line,
            format!("`neighbor_radius` ({neighbor_radius}) must not exceed `delta` ({delta})"),
        );
    }
    let (goal_radius, _) = opt_pos("goal_radius", delta)?;
    let (edge_check_resolution, _) = opt_pos("edge_check_resolution", delta / 10.0)?;

    let checkpoints = match section.take("checkpoints") {
        Some((v, line)) => {
            let cps = parse_u32_list(&v, line, "checkpoints")?;
            if cps.windows(2).any(|w| w[0] >= w[1]) {
                return err(line, "`checkpoints` must be strictly increasing");
            }
            if cps.last().is_some_and(|&last| last > max_iterations) {
                return err(line, "`checkpoints` may not exceed `max_iterations`");
            }
            cps
        }
        None => Vec::new(),
    };

    let beta = match section.take("beta") {
        Some((v, line)) => {
            if strategy == StrategyKind::None {
                return err(line, "`beta` is only meaningful for biased strategies");
            }
            let b = parse_f64(&v, line, "beta")?;
            if b <= 0.0 {
                return err(line, "`beta` must be positive");
            }
            Some(b)
        }
        None => None,
    };
    let bias_step = match section.take("bias_step") {
        Some((v, line)) => {
            if strategy != StrategyKind::SampleBias {
                return err(line, "`bias_step` is only meaningful for `sample_bias`");
            }
            let s = parse_f64(&v, line, "bias_step")?;
            if s <= 0.0 {
                return err(line, "`bias_step` must be positive");
            }
            Some(s)
        }
        None => None,
    };
    let bias_iters = match section.take("bias_iters") {
        Some((v, line)) => {
            if strategy != StrategyKind::SampleBias {
                return err(line, "`bias_iters` is only meaningful for `sample_bias`");
            }
            Some(parse_u32(&v, line, "bias_iters")?)
        }
        None => None,
    };
    if strategy == StrategyKind::SampleBias && (bias_step.is_none() || bias_iters.is_none()) {
        return err(
            section.line,
            "`sample_bias` profiles require `bias_step` and `bias_iters`",
        );
    }

    Ok(Profile {
        name,
        strategy,
        beta,
        bias_step,
        bias_iters,
        max_iterations,
        delta,
        neighbor_radius,
        goal_radius,
        edge_check_resolution,
        checkpoints,
    })
}

/// Parse scenario text into a fully resolved [`Scenario`], or fail with the
/// first line-anchored diagnostic.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut sections = scan_sections(text)?;

    let mut env_section = None;
    let mut world_section = None;
    let mut arm_section = None;
    let mut start_section = None;
    let mut goal_section = None;
    let mut potentials_section = None;
    let mut obstacle_sections = Vec::new();
    let mut profile_sections = Vec::new();
    let mut experiment_section = None;

    for section in &mut sections {
        let slot = match section.name.as_str() {
            "environment" => &mut env_section,
            "world" => &mut world_section,
            "arm" => &mut arm_section,
            "start" => &mut start_section,
            "goal" => &mut goal_section,
            "potentials" => &mut potentials_section,
            "experiment" => &mut experiment_section,
            "obstacle" => {
                obstacle_sections.push(section);
                continue;
            }
            "profile" => {
                profile_sections.push(section);
                continue;
            }
            other => {
                return err(section.line, format!("unknown section [{other}]"));
            }
        };
        if section.arg.is_some() {
            return err(section.line, format!("section [{}] takes no argument", section.name));
        }
        if slot.is_some() {
            return err(section.line, format!("duplicate section [{}]", section.name));
        }
        *slot = Some(section);
    }

    let env_section = env_section
        .ok_or_else(|| ScenarioError { line: 1, message: "missing [environment] section".into() })?;
    let (kind_val, kind_line) = env_section.require("kind")?;
    let kind = match kind_val.as_str() {
        "point2d" => EnvKind::Point2d,
        "planar_arm" => EnvKind::PlanarArm,
        other => {
            return err(kind_line, format!("unknown environment kind `{other}`"));
        }
    };
    env_section.finish()?;

    let world_section = world_section
        .ok_or_else(|| ScenarioError { line: 1, message: "missing [world] section".into() })?;
    let (bounds_val, bounds_line) = world_section.require("bounds")?;
    let b = fixed_f64_list(&bounds_val, bounds_line, "bounds", 4)?;
    world_section.finish()?;

    let mut obstacles = Vec::new();
    for section in &mut obstacle_sections {
        obstacles.push(parse_obstacle(section)?);
        section.finish()?;
    }
    let world = World::new(Point2::new(b[0], b[1]), Point2::new(b[2], b[3]), obstacles)
        .map_err(|e| ScenarioError { line: bounds_line, message: e.to_string() })?;

    let arm = match (kind, arm_section) {
        (EnvKind::PlanarArm, Some(section)) => {
            let (links_val, links_line) = section.require("link_lengths")?;
            let link_lengths = parse_f64_list(&links_val, links_line, "link_lengths")?;
            let base = match section.take("base") {
                Some((v, line)) => {
                    let b = fixed_f64_list(&v, line, "base", 2)?;
                    Point2::new(b[0], b[1])
                }
                None => Point2::new(0.0, 0.0),
            };
            let joint_limits = match section.take("joint_limits") {
                Some((v, line)) => {
                    let vals = parse_f64_list(&v, line, "joint_limits")?;
                    if vals.len() != 2 * link_lengths.len() {
                        return err(
                            line,
                            format!(
                                "`joint_limits` expects {} numbers (lo hi per joint), got {}",
                                2 * link_lengths.len(),
                                vals.len()
                            ),
                        );
                    }
                    vals.chunks(2).map(|c| (c[0], c[1])).collect()
                }
                None => vec![(-PI, PI); link_lengths.len()],
            };
            let samples_per_link = match section.take("samples_per_link") {
                Some((v, line)) => parse_u32(&v, line, "samples_per_link")? as usize,
                None => 8,
            };
            section.finish()?;
            Some(
                PlanarArm::new(link_lengths, base, joint_limits, samples_per_link)
                    .map_err(|e| ScenarioError { line: section.line, message: e.to_string() })?,
            )
        }
        (EnvKind::PlanarArm, None) => {
            return err(env_section.line, "planar_arm scenarios require an [arm] section");
        }
        (EnvKind::Point2d, Some(section)) => {
            return err(section.line, "[arm] section is only valid for planar_arm scenarios");
        }
        (EnvKind::Point2d, None) => None,
    };
    let dim = match &arm {
        Some(a) => a.dof(),
        None => 2,
    };

    let start_section = start_section
        .ok_or_else(|| ScenarioError { line: 1, message: "missing [start] section".into() })?;
    let (start_val, start_line) = start_section.require("config")?;
    let start = Config::new(fixed_f64_list(&start_val, start_line, "config", dim)?);
    start_section.finish()?;

    let goal_section = goal_section
        .ok_or_else(|| ScenarioError { line: 1, message: "missing [goal] section".into() })?;
    let (goal_val, goal_line) = goal_section.require("config")?;
    let goal = Config::new(fixed_f64_list(&goal_val, goal_line, "config", dim)?);
    let goal_pose = match goal_section.take("pose") {
        Some((v, line)) => {
            if kind == EnvKind::Point2d {
                return err(line, "`pose` is only meaningful for planar_arm scenarios");
            }
            let p = fixed_f64_list(&v, line, "pose", 2)?;
            Some(Point2::new(p[0], p[1]))
        }
        None => None,
    };
    goal_section.finish()?;

    let potentials = match potentials_section {
        Some(section) => {
            let (v, l) = section.require("k_att")?;
            let k_att = parse_f64(&v, l, "k_att")?;
            let (v, l) = section.require("k_rep_perm")?;
            let k_rep_perm = parse_f64(&v, l, "k_rep_perm")?;
            let (v, l) = section.require("k_rep_imp")?;
            let k_rep_imp = parse_f64(&v, l, "k_rep_imp")?;
            let (v, l) = section.require("d_obs_star")?;
            let d_obs_star = parse_f64(&v, l, "d_obs_star")?;
            if d_obs_star <= 0.0 {
                return err(l, "`d_obs_star` must be positive");
            }
            let mut d_star_perm = d_obs_star;
            let mut d_star_imp = d_obs_star;
            if let Some((v, l)) = section.take("d_obs_star_perm") {
                d_star_perm = parse_f64(&v, l, "d_obs_star_perm")?;
                if d_star_perm <= 0.0 {
                    return err(l, "`d_obs_star_perm` must be positive");
                }
            }
            if let Some((v, l)) = section.take("d_obs_star_imp") {
                d_star_imp = parse_f64(&v, l, "d_obs_star_imp")?;
                if d_star_imp <= 0.0 {
                    return err(l, "`d_obs_star_imp` must be positive");
                }
            }
            let (v, l) = section.require("beta")?;
            let beta = parse_f64(&v, l, "beta")?;
            if beta <= 0.0 {
                return err(l, "`beta` must be positive");
            }
            for (name, v, l) in [
                ("k_att", k_att, section.line),
                ("k_rep_perm", k_rep_perm, section.line),
                ("k_rep_imp", k_rep_imp, section.line),
            ] {
                if v < 0.0 {
                    return err(l, format!("`{name}` must be non-negative"));
                }
            }
            section.finish()?;
            Some(PotentialsSection {
                k_att,
                k_rep_perm,
                k_rep_imp,
                d_star_perm,
                d_star_imp,
                beta,
            })
        }
        None => None,
    };

    let mut profiles = Vec::new();
    let mut seen = BTreeSet::new();
    for section in &mut profile_sections {
        let profile = parse_profile(section)?;
        if !seen.insert(profile.name.clone()) {
            return err(section.line, format!("duplicate profile `{}`", profile.name));
        }
        if profile.strategy != StrategyKind::None && potentials.is_none() {
            return err(
                section.line,
                format!("profile `{}` uses a biased strategy but there is no [potentials] section", profile.name),
            );
        }
        profiles.push(profile);
        section.finish()?;
    }
    if profiles.is_empty() {
        return err(1, "scenario defines no [profile NAME] sections");
    }

    let experiment = match experiment_section {
        Some(section) => {
            let (v, l) = section.require("trials")?;
            let trials = parse_u32(&v, l, "trials")?;
            if trials < 2 {
                return err(l, "`trials` must be at least 2");
            }
            let (v, l) = section.require("base_seed")?;
            let base_seed = parse_u64(&v, l, "base_seed")?;
            let (v, l) = section.require("profiles")?;
            let names: Vec<String> = v.split_whitespace().map(str::to_string).collect();
            if names.is_empty() {
                return err(l, "`profiles` must list at least one profile");
            }
            for name in &names {
                if !profiles.iter().any(|p| &p.name == name) {
                    return err(l, format!("experiment references unknown profile `{name}`"));
                }
                let p = profiles.iter().find(|p| &p.name == name).unwrap();
                if p.checkpoints.is_empty() {
                    return err(l, format!("experiment profile `{name}` has no checkpoints"));
                }
            }
            let first = profiles.iter().find(|p| p.name == names[0]).unwrap();
            for name in &names[1..] {
                let p = profiles.iter().find(|p| &p.name == name).unwrap();
                if p.checkpoints != first.checkpoints {
                    return err(
                        l,
                        format!("experiment profiles `{}` and `{name}` have different checkpoints", names[0]),
                    );
                }
            }
            section.finish()?;
            Some(ExperimentBlock {
                trials,
                base_seed,
                profiles: names,
            })
        }
        None => None,
    };

    Ok(Scenario {
        kind,
        world,
        arm,
        start,
        goal,
        goal_pose,
        potentials,
        profiles,
        experiment,
    })
}

// ---------------------------------------------------------------------------
// Emission

fn join_nums(vals: impl IntoIterator<Item = f64>) -> String {
    vals.into_iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

impl Scenario {
    /// Canonical text rendition; parsing it reproduces this scenario.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("[environment]\n");
        let kind = match self.kind {
            EnvKind::Point2d => "point2d",
            EnvKind::PlanarArm => "planar_arm",
        };
        let _ = writeln!(out, "kind = {kind}\n");

        let (lo, hi) = self.world.bounds();
        out.push_str("[world]\n");
        let _ = writeln!(out, "bounds = {}\n", join_nums([lo.x, lo.y, hi.x, hi.y]));

        for obs in self.world.obstacles() {
            out.push_str("[obstacle]\n");
            match obs.shape {
                Shape::Circle { center, radius } => {
                    let _ = writeln!(out, "shape = circle {}", join_nums([center.x, center.y, radius]));
                }
                Shape::Rect { min, max } => {
                    let _ = writeln!(out, "shape = rect {}", join_nums([min.x, min.y, max.x, max.y]));
                }
            }
            match obs.permeability {
                Permeability::Permeable(cost) => {
                    let _ = writeln!(out, "permeability = permeable {cost}\n");
                }
                Permeability::Impermeable => {
                    out.push_str("permeability = impermeable\n\n");
                }
            }
        }

        if let Some(arm) = &self.arm {
            out.push_str("[arm]\n");
            let _ = writeln!(out, "base = {}", join_nums([arm.base.x, arm.base.y]));
            let _ = writeln!(out, "link_lengths = {}", join_nums(arm.link_lengths.iter().copied()));
            let _ = writeln!(
                out,
                "joint_limits = {}",
                join_nums(arm.joint_limits.iter().flat_map(|&(lo, hi)| [lo, hi]))
            );
            let _ = writeln!(out, "samples_per_link = {}\n", arm.samples_per_link);
        }

        out.push_str("[start]\n");
        let _ = writeln!(out, "config = {}\n", join_nums(self.start.0.iter().copied()));

        out.push_str("[goal]\n");
        let _ = writeln!(out, "config = {}", join_nums(self.goal.0.iter().copied()));
        if let Some(pose) = self.goal_pose {
            let _ = writeln!(out, "pose = {}", join_nums([pose.x, pose.y]));
        }
        out.push('\n');

        if let Some(p) = &self.potentials {
            out.push_str("[potentials]\n");
            let _ = writeln!(out, "k_att = {}", p.k_att);
            let _ = writeln!(out, "k_rep_perm = {}", p.k_rep_perm);
            let _ = writeln!(out, "k_rep_imp = {}", p.k_rep_imp);
            // A shared value keeps the canonical form minimal.
            if p.d_star_perm == p.d_star_imp {
                let _ = writeln!(out, "d_obs_star = {}", p.d_star_perm);
            } else {
                let _ = writeln!(out, "d_obs_star = {}", p.d_star_perm);
                let _ = writeln!(out, "d_obs_star_perm = {}", p.d_star_perm);
                let _ = writeln!(out, "d_obs_star_imp = {}", p.d_star_imp);
            }
            let _ = writeln!(out, "beta = {}\n", p.beta);
        }

        for profile in &self.profiles {
            let _ = writeln!(out, "[profile {}]", profile.name);
            let strategy = match profile.strategy {
                StrategyKind::None => "none",
                StrategyKind::NearestNodeBias => "nearest_node_bias",
                StrategyKind::SampleBias => "sample_bias",
            };
            let _ = writeln!(out, "strategy = {strategy}");
            if let Some(beta) = profile.beta {
                let _ = writeln!(out, "beta = {beta}");
            }
            if let Some(step) = profile.bias_step {
                let _ = writeln!(out, "bias_step = {step}");
            }
            if let Some(iters) = profile.bias_iters {
                let _ = writeln!(out, "bias_iters = {iters}");
            }
            let _ = writeln!(out, "max_iterations = {}", profile.max_iterations);
            let _ = writeln!(out, "delta = {}", profile.delta);
            let _ = writeln!(out, "neighbor_radius = {}", profile.neighbor_radius);
            let _ = writeln!(out, "goal_radius = {}", profile.goal_radius);
            let _ = writeln!(out, "edge_check_resolution = {}", profile.edge_check_resolution);
            if !profile.checkpoints.is_empty() {
                let _ = writeln!(
                    out,
                    "checkpoints = {}",
                    profile
                        .checkpoints
                        .iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                );
            }
            out.push('\n');
        }

        if let Some(exp) = &self.experiment {
            out.push_str("[experiment]\n");
            let _ = writeln!(out, "trials = {}", exp.trials);
            let _ = writeln!(out, "base_seed = {}", exp.base_seed);
            let _ = writeln!(out, "profiles = {}", exp.profiles.join(" "));
        }
        out
    }

    /// Instantiate the environment this scenario describes.
    pub fn environment(&self) -> Result<Environment, EnvError> {
        match self.kind {
            EnvKind::Point2d => {
                point2d_env(self.world.clone(), self.start.clone(), self.goal.clone())
            }
            EnvKind::PlanarArm => arm_env(
                self.arm.clone().expect("planar_arm scenario carries an arm"),
                self.world.clone(),
                self.start.clone(),
                self.goal_pose.unwrap_or_else(|| {
                    let arm = self.arm.as_ref().unwrap();
                    arm.end_effector(&self.goal)
                }),
                self.goal.clone(),
            ),
        }
    }

    pub fn profile(&self, name: &str) -> Option<&Profile> {
        self.profiles.iter().find(|p| p.name == name)
    }

    /// Potential parameters for a profile, scaled against the environment.
    fn potential_params(&self, profile: &Profile, env: &Environment) -> PotentialParams {
        let p = self
            .potentials
            .as_ref()
            .expect("biased profiles require potentials (validated at parse)");
        PotentialParams {
            k_att: p.k_att,
            k_rep_perm: p.k_rep_perm,
            k_rep_imp: p.k_rep_imp,
            d_star_perm: p.d_star_perm,
            d_star_imp: p.d_star_imp,
            beta: profile.beta.unwrap_or(p.beta),
            f_att_max: 0.0,
        }
        .scaled_for(env)
    }

    /// Planner parameters for the named profile. The seed is a placeholder;
    /// callers override it per run.
    pub fn planner_params(&self, name: &str, env: &Environment) -> Option<PlannerParams> {
        let profile = self.profile(name)?;
        let strategy = match profile.strategy {
            StrategyKind::None => ExtendStrategy::Unbiased,
            StrategyKind::NearestNodeBias => {
                ExtendStrategy::NearestNodeBias(self.potential_params(profile, env))
            }
            StrategyKind::SampleBias => ExtendStrategy::SampleBias {
                potentials: self.potential_params(profile, env),
                step: profile.bias_step.expect("validated at parse"),
                iters: profile.bias_iters.expect("validated at parse"),
            },
        };
        Some(PlannerParams {
            max_iterations: profile.max_iterations,
            delta: profile.delta,
            neighbor_radius: profile.neighbor_radius,
            goal_radius: profile.goal_radius,
            edge_check_resolution: profile.edge_check_resolution,
            strategy,
            rng_seed: 0,
            checkpoints: profile.checkpoints.clone(),
        })
    }

    /// Experiment spec from the `[experiment]` block.
    pub fn experiment_spec(&self, env: &Environment) -> Result<ExperimentSpec, BenchError> {
        let block = self.experiment.as_ref().ok_or(BenchError::NoAlgorithms)?;
        let algorithms = block
            .profiles
            .iter()
            .map(|name| AlgorithmEntry {
                label: name.clone(),
                params: self
                    .planner_params(name, env)
                    .expect("experiment profiles validated at parse"),
            })
            .collect();
        let spec = ExperimentSpec {
            algorithms,
            trials: block.trials,
            base_seed: block.base_seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}
