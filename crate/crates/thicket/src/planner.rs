//! Cost-based RRT* with optional potential-field biasing.
//!
//! The tree minimizes a combined objective: path length plus the collision
//! costs of the permeable-obstacle nodes along the path. A node's cost is
//!
//! ```text
//! c_path(new) = d(new, parent) + c_path(parent) + c_perm(parent)
//! ```
//!
//! so routing through a node standing on a permeable obstacle is penalized
//! by that node's collision cost. Parent selection and rewiring both use
//! this rule. Impermeable obstacles are hard constraints: nodes inside them
//! are rejected and candidate edges are checked at a sampled resolution.
//!
//! Three extension strategies share the loop: unbiased (cost-based RRT*),
//! nearest-node potential biasing, and random-sample potential biasing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apf::{bias_random_sample, biased_extend_direction, PotentialParams};
use crate::cspace::{Config, EnvError, Environment};
use crate::rng::PlannerRng;

/// Tolerance for the node-cost consistency check in [`Tree::validate`].
pub const COST_CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("invalid planner parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// How line-5 extension picks its direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ExtendStrategy {
    /// Extend straight toward the random sample.
    Unbiased,
    /// Blend the sample direction with the potential-force direction at the
    /// nearest node, weighted adaptively.
    NearestNodeBias(PotentialParams),
    /// Shift the random sample down the potential gradient before an
    /// unbiased extension.
    SampleBias {
        potentials: PotentialParams,
        step: f64,
        iters: u32,
    },
}

impl ExtendStrategy {
    pub fn potentials(&self) -> Option<&PotentialParams> {
        match self {
            ExtendStrategy::Unbiased => None,
            ExtendStrategy::NearestNodeBias(p) => Some(p),
            ExtendStrategy::SampleBias { potentials, .. } => Some(potentials),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams {
    pub max_iterations: u32,
    /// Extension step size.
    pub delta: f64,
    /// Rewiring neighborhood radius, at most `delta`.
    pub neighbor_radius: f64,
    /// Nodes within this distance of the goal qualify as goal parents.
    pub goal_radius: f64,
    /// Sample spacing for impermeable edge checks.
    pub edge_check_resolution: f64,
    pub strategy: ExtendStrategy,
    pub rng_seed: u64,
    /// Iterations at which the current best solution cost is recorded;
    /// sorted ascending.
    pub checkpoints: Vec<u32>,
}

impl PlannerParams {
    /// Unbiased planner with the documented defaults: `r = delta`,
    /// `goal_radius = delta`, edge checks at `delta / 10`.
    pub fn new(max_iterations: u32, delta: f64, rng_seed: u64) -> Self {
        PlannerParams {
            max_iterations,
            delta,
            neighbor_radius: delta,
            goal_radius: delta,
            edge_check_resolution: delta / 10.0,
            strategy: ExtendStrategy::Unbiased,
            rng_seed,
            checkpoints: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        if self.max_iterations == 0 {
            return Err(PlanError::InvalidParams("max_iterations must be positive".into()));
        }
        for (name, v) in [
            ("delta", self.delta),
            ("neighbor_radius", self.neighbor_radius),
            ("goal_radius", self.goal_radius),
            ("edge_check_resolution", self.edge_check_resolution),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(PlanError::InvalidParams(format!("{name} must be positive")));
            }
        }
        if self.neighbor_radius > self.delta {
            return Err(PlanError::InvalidParams(format!(
                "neighbor_radius {} exceeds delta {}",
                self.neighbor_radius, self.delta
            )));
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PlanError::InvalidParams("checkpoints must be strictly increasing".into()));
        }
        if let Some(&last) = self.checkpoints.last() {
            if last > self.max_iterations {
                return Err(PlanError::InvalidParams(format!(
                    "checkpoint {last} exceeds max_iterations {}",
                    self.max_iterations
                )));
            }
        }
        if let ExtendStrategy::SampleBias { step, .. } = self.strategy {
            if !step.is_finite() || step <= 0.0 {
                return Err(PlanError::InvalidParams("sample-bias step must be positive".into()));
            }
        }
        if let Some(p) = self.strategy.potentials() {
            p.validate()
                .map_err(|e| PlanError::InvalidParams(e.to_string()))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: usize,
    pub config: Config,
    pub parent: Option<usize>,
    /// Distance to the parent, cached at insertion/rewiring time.
    pub edge_len: f64,
    /// Cost of the path from the root, per the combined objective.
    pub c_path: f64,
    /// This node's own collision cost (positive on permeable obstacles).
    pub c_perm: f64,
    pub children: Vec<usize>,
}

/// Violations reported by [`Tree::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum TreeViolation {
    NoRoot,
    MultipleRoots(Vec<usize>),
    RootCost { id: usize, c_path: f64 },
    Cycle { id: usize },
    ParentOutOfRange { id: usize, parent: usize },
    CostMismatch { id: usize, stored: f64, recomputed: f64 },
    ImpermeableNode { id: usize },
}

impl std::fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TreeViolation::NoRoot => write!(f, "tree has no root"),
            TreeViolation::MultipleRoots(ids) => write!(f, "multiple roots: {ids:?}"),
            TreeViolation::RootCost { id, c_path } => {
                write!(f, "root {id} has nonzero cost {c_path}")
            }
            TreeViolation::Cycle { id } => write!(f, "parent cycle through node {id}"),
            TreeViolation::ParentOutOfRange { id, parent } => {
                write!(f, "node {id} references missing parent {parent}")
            }
            TreeViolation::CostMismatch {
                id,
                stored,
                recomputed,
            } => write!(
                f,
                "node {id} cost {stored} differs from recomputed {recomputed}"
            ),
            TreeViolation::ImpermeableNode { id } => {
                write!(f, "node {id} lies inside an impermeable obstacle")
            }
        }
    }
}

/// Search tree with parent links and cached child lists. Node ids are
/// insertion-ordered and stable; ties in distance queries break toward the
/// lowest id.
#[derive(Debug, Clone)]
pub struct Tree {
    nodes: Vec<TreeNode>,
}

impl Tree {
    /// Tree rooted at `config` with the given collision cost.
    pub fn new(config: Config, c_perm: f64) -> Self {
        Tree {
            nodes: vec![TreeNode {
                id: 0,
                config,
                parent: None,
                edge_len: 0.0,
                c_path: 0.0,
                c_perm,
                children: Vec::new(),
            }],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// Id of the node closest to `q`; ties go to the earliest-inserted node.
    pub fn nearest(&self, env: &Environment, q: &Config) -> usize {
        let mut best = 0;
        let mut best_d2 = f64::INFINITY;
        for n in &self.nodes {
            let d2 = env.distance_squared(&n.config, q);
            if d2 < best_d2 {
                best_d2 = d2;
                best = n.id;
            }
        }
        best
    }

    /// Ids of all nodes within `radius` of `q`, ascending by id.
    pub fn neighbors_within(&self, env: &Environment, q: &Config, radius: f64) -> Vec<usize> {
        let r2 = radius * radius;
        self.nodes
            .iter()
            .filter(|n| env.distance_squared(&n.config, q) <= r2)
            .map(|n| n.id)
            .collect()
    }

    /// Insert a node under `parent` with the given edge length and costs.
    pub fn insert(
        &mut self,
        config: Config,
        parent: usize,
        edge_len: f64,
        c_path: f64,
        c_perm: f64,
    ) -> usize {
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            id,
            config,
            parent: Some(parent),
            edge_len,
            c_path,
            c_perm,
            children: Vec::new(),
        });
        self.nodes[parent].children.push(id);
        id
    }

    /// Pick the neighbor minimizing the combined cost of reaching `q_new`
    /// through it, skipping neighbors whose connecting edge crosses an
    /// impermeable obstacle. Returns the parent id, the edge length, and
    /// the resulting path cost; `None` when every candidate edge is
    /// blocked. Ties in cost go to the lowest id.
    pub fn choose_parent(
        &self,
        env: &Environment,
        q_new: &Config,
        neighbors: &[usize],
        edge_resolution: f64,
    ) -> Option<(usize, f64, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for &id in neighbors {
            let n = &self.nodes[id];
            let d = env.distance(q_new, &n.config);
            let cost = d + n.c_path + n.c_perm;
            if let Some((_, _, best_cost)) = best {
                if cost >= best_cost {
                    continue;
                }
            }
            if env.edge_blocked(&n.config, q_new, edge_resolution) {
                continue;
            }
            best = Some((id, d, cost));
        }
        best
    }

    fn ancestors(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.nodes[id].parent;
        while let Some(p) = cur {
            out.push(p);
            cur = self.nodes[p].parent;
        }
        out
    }

    /// Try to reparent each neighbor through the freshly inserted node,
    /// keeping the combined cost rule; cost decreases propagate through the
    /// whole affected subtree. The new node's ancestors are skipped to keep
    /// the tree acyclic. Only strict improvements rewire. Returns the
    /// number of reparented neighbors.
    pub fn rewire(
        &mut self,
        env: &Environment,
        new_id: usize,
        neighbors: &[usize],
        edge_resolution: f64,
    ) -> usize {
        let ancestors = self.ancestors(new_id);
        let new_cost_base = self.nodes[new_id].c_path + self.nodes[new_id].c_perm;
        let q_new = self.nodes[new_id].config.clone();
        let mut rewired = 0;
        for &id in neighbors {
            if id == new_id || ancestors.contains(&id) {
                continue;
            }
            let d = env.distance(&self.nodes[id].config, &q_new);
            let candidate = d + new_cost_base;
            if candidate >= self.nodes[id].c_path {
                continue;
            }
            if env.edge_blocked(&q_new, &self.nodes[id].config, edge_resolution) {
                continue;
            }
            let old_parent = self.nodes[id].parent.expect("rewire target is not the root");
            self.nodes[old_parent].children.retain(|&c| c != id);
            self.nodes[id].parent = Some(new_id);
            self.nodes[id].edge_len = d;
            self.nodes[id].c_path = candidate;
            self.nodes[new_id].children.push(id);
            self.propagate_costs(id);
            rewired += 1;
        }
        rewired
    }

    /// Recompute descendant costs after `id`'s cost changed.
    fn propagate_costs(&mut self, id: usize) {
        let mut stack = self.nodes[id].children.clone();
        while let Some(c) = stack.pop() {
            let p = self.nodes[c].parent.unwrap();
            self.nodes[c].c_path =
                self.nodes[c].edge_len + self.nodes[p].c_path + self.nodes[p].c_perm;
            stack.extend_from_slice(&self.nodes[c].children);
        }
    }

    /// Structural and cost-consistency audit: exactly one zero-cost root,
    /// no parent cycles, every node's stored cost within
    /// [`COST_CONSISTENCY_TOL`] of the recomputed combined cost, and no
    /// node inside an impermeable obstacle. Works from parent links alone.
    pub fn validate(&self, env: &Environment) -> Vec<TreeViolation> {
        let mut violations = Vec::new();
        let roots: Vec<usize> = self
            .nodes
            .iter()
            .filter(|n| n.parent.is_none())
            .map(|n| n.id)
            .collect();
        match roots.as_slice() {
            [] => violations.push(TreeViolation::NoRoot),
            [root] => {
                let r = &self.nodes[*root];
                if r.c_path != 0.0 {
                    violations.push(TreeViolation::RootCost {
                        id: *root,
                        c_path: r.c_path,
                    });
                }
            }
            _ => violations.push(TreeViolation::MultipleRoots(roots.clone())),
        }
        for n in &self.nodes {
            if let Some(p) = n.parent {
                if p >= self.nodes.len() {
                    violations.push(TreeViolation::ParentOutOfRange { id: n.id, parent: p });
                    continue;
                }
                // Walk to the root; more than `len` steps means a cycle.
                let mut cur = n.parent;
                let mut steps = 0;
                while let Some(c) = cur {
                    steps += 1;
                    if steps > self.nodes.len() {
                        violations.push(TreeViolation::Cycle { id: n.id });
                        break;
                    }
                    cur = self.nodes[c].parent;
                }
                let parent = &self.nodes[p];
                let recomputed =
                    env.distance(&n.config, &parent.config) + parent.c_path + parent.c_perm;
                if (n.c_path - recomputed).abs() > COST_CONSISTENCY_TOL {
                    violations.push(TreeViolation::CostMismatch {
                        id: n.id,
                        stored: n.c_path,
                        recomputed,
                    });
                }
            }
            if env.classify(&n.config).is_impermeable() {
                violations.push(TreeViolation::ImpermeableNode { id: n.id });
            }
        }
        violations
    }

    #[cfg(test)]
    pub(crate) fn corrupt_cost_for_test(&mut self, id: usize, c_path: f64) {
        self.nodes[id].c_path = c_path;
    }

    #[cfg(test)]
    pub(crate) fn corrupt_parent_for_test(&mut self, id: usize, parent: usize) {
        self.nodes[id].parent = Some(parent);
    }
}

/// Best solution cost recorded at a checkpoint iteration; `None` until a
/// qualifying goal connection exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckpointCost {
    pub iteration: u32,
    pub cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    /// Start-to-goal configurations, absent when no solution was found.
    pub path: Option<Vec<Config>>,
    /// Length of the path under the environment metric.
    pub path_length: f64,
    /// Path nodes with positive collision cost.
    pub n_collision: usize,
    /// Path length plus the collision costs of every path node.
    pub total_cost: f64,
    pub checkpoint_costs: Vec<CheckpointCost>,
    pub tree_size: usize,
    pub rng_seed: u64,
}

impl PlanResult {
    pub fn solved(&self) -> bool {
        self.path.is_some()
    }

    pub fn cost_at(&self, iteration: u32) -> Option<f64> {
        self.checkpoint_costs
            .iter()
            .find(|c| c.iteration == iteration)
            .and_then(|c| c.cost)
    }
}

/// One extension step: the configuration reached from `q_near` when growing
/// toward `q_rand` under the given strategy. Sample biasing happens at
/// sampling time, so here it behaves exactly like the unbiased strategy.
pub fn extend(
    env: &Environment,
    params: &PlannerParams,
    q_near: &Config,
    q_rand: &Config,
) -> Result<Config, EnvError> {
    let direction = match &params.strategy {
        ExtendStrategy::Unbiased | ExtendStrategy::SampleBias { .. } => {
            let diff = env.difference(q_near, q_rand);
            let n = diff.iter().map(|d| d * d).sum::<f64>().sqrt();
            if n == 0.0 {
                return Err(EnvError::ZeroDirection);
            }
            diff.iter().map(|d| d / n).collect::<Vec<f64>>()
        }
        ExtendStrategy::NearestNodeBias(p) => biased_extend_direction(env, p, q_near, q_rand)?,
    };
    env.steer(q_near, &direction, params.delta)
}

struct GoalCandidate {
    id: usize,
    edge_len: f64,
    /// Combined cost of the goal node when parented here.
    cost: f64,
}

/// Cheapest impermeable-free goal connection available right now.
fn best_goal_candidate(
    env: &Environment,
    params: &PlannerParams,
    tree: &Tree,
) -> Option<GoalCandidate> {
    let goal = env.goal();
    let r2 = params.goal_radius * params.goal_radius;
    let mut best: Option<GoalCandidate> = None;
    for n in tree.nodes() {
        let d2 = env.distance_squared(&n.config, goal);
        if d2 > r2 {
            continue;
        }
        let d = d2.sqrt();
        let cost = d + n.c_path + n.c_perm;
        if let Some(ref b) = best {
            if cost >= b.cost {
                continue;
            }
        }
        if env.edge_blocked(&n.config, goal, params.edge_check_resolution) {
            continue;
        }
        best = Some(GoalCandidate {
            id: n.id,
            edge_len: d,
            cost,
        });
    }
    best
}

/// Run the full planning loop and extract the best solution.
pub fn plan(env: &Environment, params: &PlannerParams) -> Result<PlanResult, PlanError> {
    let (result, _) = plan_with_tree(env, params)?;
    Ok(result)
}

/// Like [`plan`], also returning the final tree for inspection.
pub fn plan_with_tree(
    env: &Environment,
    params: &PlannerParams,
) -> Result<(PlanResult, Tree), PlanError> {
    params.validate()?;
    let mut rng = PlannerRng::seed_from_u64(params.rng_seed);
    let start = env.start().clone();
    if env.classify(&start).is_impermeable() {
        return Err(PlanError::Env(EnvError::StartImpermeable));
    }
    let goal_class = env.classify(env.goal());
    if goal_class.is_impermeable() {
        return Err(PlanError::Env(EnvError::GoalImpermeable));
    }
    let goal_c_perm = goal_class.collision_cost();

    let mut tree = Tree::new(start.clone(), env.classify(&start).collision_cost());
    let mut checkpoint_costs = Vec::with_capacity(params.checkpoints.len());
    let mut next_checkpoint = 0;

    for iteration in 1..=params.max_iterations {
        let sampled = env.sample_free(&mut rng)?;
        let q_rand = match &params.strategy {
            ExtendStrategy::SampleBias {
                potentials,
                step,
                iters,
            } => bias_random_sample(env, potentials, sampled, *step, *iters),
            _ => sampled,
        };

        'grow: {
            let near_id = tree.nearest(env, &q_rand);
            if env.distance_squared(&tree.node(near_id).config, &q_rand) == 0.0 {
                break 'grow;
            }
            let Ok(q_new) = extend(env, params, &tree.node(near_id).config, &q_rand) else {
                break 'grow;
            };
            if env.classify(&q_new).is_impermeable() {
                break 'grow;
            }
            let mut neighbors = tree.neighbors_within(env, &q_new, params.neighbor_radius);
            if !neighbors.contains(&near_id) {
                neighbors.push(near_id);
                neighbors.sort_unstable();
            }
            let Some((parent, edge_len, c_path)) =
                tree.choose_parent(env, &q_new, &neighbors, params.edge_check_resolution)
            else {
                break 'grow;
            };
            let c_perm = env.classify(&q_new).collision_cost();
            let new_id = tree.insert(q_new, parent, edge_len, c_path, c_perm);
            tree.rewire(env, new_id, &neighbors, params.edge_check_resolution);
        }

        if next_checkpoint < params.checkpoints.len()
            && iteration == params.checkpoints[next_checkpoint]
        {
            let cost = best_goal_candidate(env, params, &tree)
                .map(|c| c.cost + goal_c_perm);
            checkpoint_costs.push(CheckpointCost {
                iteration,
                cost,
            });
            next_checkpoint += 1;
        }
    }

    let result = match best_goal_candidate(env, params, &tree) {
        Some(candidate) => {
            let mut ids = vec![candidate.id];
            let mut cur = tree.node(candidate.id).parent;
            while let Some(p) = cur {
                ids.push(p);
                cur = tree.node(p).parent;
            }
            ids.reverse();
            let mut path: Vec<Config> =
                ids.iter().map(|&id| tree.node(id).config.clone()).collect();
            path.push(env.goal().clone());
            let path_length: f64 = ids.iter().map(|&id| tree.node(id).edge_len).sum::<f64>()
                + candidate.edge_len;
            let perm_costs: f64 =
                ids.iter().map(|&id| tree.node(id).c_perm).sum::<f64>() + goal_c_perm;
            let n_collision = ids
                .iter()
                .filter(|&&id| tree.node(id).c_perm > 0.0)
                .count()
                + usize::from(goal_c_perm > 0.0);
            PlanResult {
                path: Some(path),
                path_length,
                n_collision,
                total_cost: path_length + perm_costs,
                checkpoint_costs,
                tree_size: tree.len(),
                rng_seed: params.rng_seed,
            }
        }
        None => PlanResult {
            path: None,
            path_length: 0.0,
            n_collision: 0,
            total_cost: f64::INFINITY,
            checkpoint_costs,
            tree_size: tree.len(),
            rng_seed: params.rng_seed,
        },
    };
    Ok((result, tree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cspace::point2d_env;
    use crate::geometry::{ObstacleRegion, Permeability, Point2, Shape, World};
    use approx::assert_relative_eq;

    fn pt(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn open_env() -> Environment {
        let world = World::new(pt(0.0, 0.0), pt(100.0, 100.0), vec![]).unwrap();
        point2d_env(
            world,
            Config::from_xy(10.0, 50.0),
            Config::from_xy(90.0, 50.0),
        )
        .unwrap()
    }

    fn wall_env(cost: f64) -> Environment {
        let world = World::new(
            pt(0.0, 0.0),
            pt(100.0, 100.0),
            vec![ObstacleRegion::new(
                Shape::rect(pt(45.0, 0.0), pt(55.0, 100.0)).unwrap(),
                Permeability::Permeable(cost),
            )
            .unwrap()],
        )
        .unwrap();
        point2d_env(
            world,
            Config::from_xy(10.0, 50.0),
            Config::from_xy(90.0, 50.0),
        )
        .unwrap()
    }

    fn impermeable_env() -> Environment {
        let world = World::new(
            pt(0.0, 0.0),
            pt(100.0, 100.0),
            vec![ObstacleRegion::new(
                Shape::rect(pt(45.0, 20.0), pt(55.0, 80.0)).unwrap(),
                Permeability::Impermeable,
            )
            .unwrap()],
        )
        .unwrap();
        point2d_env(
            world,
            Config::from_xy(10.0, 50.0),
            Config::from_xy(90.0, 50.0),
        )
        .unwrap()
    }

    #[test]
    fn nearest_single_node() {
        let env = open_env();
        let tree = Tree::new(Config::from_xy(10.0, 50.0), 0.0);
        assert_eq!(tree.nearest(&env, &Config::from_xy(90.0, 90.0)), 0);
    }

    #[test]
    fn nearest_picks_minimum_distance() {
        let env = open_env();
        let mut tree = Tree::new(Config::from_xy(10.0, 50.0), 0.0);
        // Nodes at distances 5, 2, 7 from the query.
        tree.insert(Config::from_xy(20.0, 55.0), 0, 0.0, 0.0, 0.0);
        tree.insert(Config::from_xy(20.0, 52.0), 0, 0.0, 0.0, 0.0);
        tree.insert(Config::from_xy(20.0, 43.0), 0, 0.0, 0.0, 0.0);
        assert_eq!(tree.nearest(&env, &Config::from_xy(20.0, 50.0)), 2);
    }

    #[test]
    fn nearest_ties_break_to_earlier_insertion() {
        let env = open_env();
        let mut tree = Tree::new(Config::from_xy(10.0, 50.0), 0.0);
        tree.insert(Config::from_xy(20.0, 55.0), 0, 0.0, 0.0, 0.0);
        tree.insert(Config::from_xy(20.0, 45.0), 0, 0.0, 0.0, 0.0);
        assert_eq!(tree.nearest(&env, &Config::from_xy(20.0, 50.0)), 1);
    }

    #[test]
    fn choose_parent_minimizes_combined_cost() {
        let env = open_env();
        // Root plus neighbors A (d=1, c_path=10, c_perm=0) and
        // B (d=2, c_path=5, c_perm=0): B wins with cost 7.
        let mut tree = Tree::new(Config::from_xy(10.0, 50.0), 0.0);
        let a = tree.insert(Config::from_xy(50.0, 51.0), 0, 0.0, 10.0, 0.0);
        let b = tree.insert(Config::from_xy(50.0, 52.0), 0, 0.0, 5.0, 0.0);
        let q_new = Config::from_xy(50.0, 50.0);
        let (parent, d, cost) = tree
            .choose_parent(&env, &q_new, &[a, b], 0.3)
            .unwrap();
        assert_eq!(parent, b);
        assert_relative_eq!(d, 2.0);
        assert_relative_eq!(cost, 7.0);
    }

    #[test]
    fn choose_parent_penalizes_collision_cost() {
        let env = open_env();
        // A (d=1, c_path=10, c_perm=0) vs B (d=1, c_path=5, c_perm=100):
        // routing through B costs 106, so A wins at 11.
        let mut tree = Tree::new(Config::from_xy(10.0, 50.0), 0.0);
        let a = tree.insert(Config::from_xy(50.0, 51.0), 0, 0.0, 10.0, 0.0);
        let b = tree.insert(Config::from_xy(50.0, 49.0), 0, 0.0, 5.0, 100.0);
        let q_new = Config::from_xy(50.0, 50.0);
        let (parent, _, cost) = tree
            .choose_parent(&env, &q_new, &[a, b], 0.3)
            .unwrap();
        assert_eq!(parent, a);
        assert_relative_eq!(cost, 11.0);
    }

    #[test]
    fn choose_parent_single_neighbor() {
        let env = open_env();
        let tree = Tree::new(Config::from_xy(10.0, 50.0), 0.0);
        let (parent, _, _) = tree
            .choose_parent(&env, &Config::from_xy(12.0, 50.0), &[0], 0.3)
            .unwrap();
        assert_eq!(parent, 0);
    }

    #[test]
    fn choose_parent_rejects_blocked_edges() {
        let env = impermeable_env();
        let mut tree = Tree::new(Config::from_xy(10.0, 50.0), 0.0);
        let a = tree.insert(Config::from_xy(44.0, 50.0), 0, 34.0, 34.0, 0.0);
        // q_new on the far side of the impermeable block: the only edge
        // crosses it, so no parent qualifies.
        let q_new = Config::from_xy(56.0, 50.0);
        assert!(tree.choose_parent(&env, &q_new, &[a], 0.3).is_none());
    }

    #[test]
    fn rewire_improves_and_propagates() {
        let env = open_env();
        let mut tree = Tree::new(Config::from_xy(0.0, 0.0), 0.0);
        // Detour chain: root -> det -> a -> b -> c, then a shortcut node
        // close to `a` but reached directly from the root.
        let det = tree.insert(Config::from_xy(0.0, 40.0), 0, 40.0, 40.0, 0.0);
        let a = tree.insert(Config::from_xy(30.0, 40.0), det, 30.0, 70.0, 0.0);
        let b = tree.insert(Config::from_xy(31.0, 40.0), a, 1.0, 71.0, 0.0);
        let c = tree.insert(Config::from_xy(32.0, 40.0), b, 1.0, 72.0, 0.0);
        let q_new = Config::from_xy(30.0, 39.0);
        let d_root = env.distance(&tree.node(0).config, &q_new);
        let new_id = tree.insert(q_new.clone(), 0, d_root, d_root, 0.0);
        let rewired = tree.rewire(&env, new_id, &[a], 0.3);
        assert_eq!(rewired, 1);
        assert_eq!(tree.node(a).parent, Some(new_id));
        let expected_a = d_root + 1.0;
        assert_relative_eq!(tree.node(a).c_path, expected_a, epsilon = 1e-12);
        // Descendants dropped by the same amount.
        assert_relative_eq!(tree.node(b).c_path, expected_a + 1.0, epsilon = 1e-12);
        assert_relative_eq!(tree.node(c).c_path, expected_a + 2.0, epsilon = 1e-12);
        assert!(tree.validate(&env).is_empty());
    }

    #[test]
    fn rewire_requires_strict_improvement() {
        let env = open_env();
        let mut tree = Tree::new(Config::from_xy(0.0, 0.0), 0.0);
        let a = tree.insert(Config::from_xy(10.0, 0.0), 0, 10.0, 10.0, 0.0);
        // New node whose candidate cost for `a` equals a.c_path exactly.
        let new_id = tree.insert(Config::from_xy(5.0, 0.0), 0, 5.0, 5.0, 0.0);
        let rewired = tree.rewire(&env, new_id, &[a], 0.3);
        assert_eq!(rewired, 0);
        assert_eq!(tree.node(a).parent, Some(0));
    }

    #[test]
    fn rewire_skips_parent_and_ancestors() {
        let env = open_env();
        let mut tree = Tree::new(Config::from_xy(0.0, 0.0), 0.0);
        let a = tree.insert(Config::from_xy(3.0, 0.0), 0, 3.0, 3.0, 0.0);
        let new_id = tree.insert(Config::from_xy(6.0, 0.0), a, 3.0, 6.0, 0.0);
        let rewired = tree.rewire(&env, new_id, &[0, a], 0.3);
        assert_eq!(rewired, 0);
        assert!(tree.validate(&env).is_empty());
    }

    #[test]
    fn validate_reports_cost_corruption() {
        let env = open_env();
        let mut tree = Tree::new(Config::from_xy(10.0, 50.0), 0.0);
        tree.insert(Config::from_xy(13.0, 50.0), 0, 3.0, 3.0, 0.0);
        assert!(tree.validate(&env).is_empty());
        tree.corrupt_cost_for_test(1, 99.0);
        let violations = tree.validate(&env);
        assert_eq!(violations.len(), 1);
        assert!(matches!(violations[0], TreeViolation::CostMismatch { id: 1, .. }));
    }

    #[test]
    fn validate_reports_cycles() {
        let env = open_env();
        let mut tree = Tree::new(Config::from_xy(10.0, 50.0), 0.0);
        let a = tree.insert(Config::from_xy(13.0, 50.0), 0, 3.0, 3.0, 0.0);
        let b = tree.insert(Config::from_xy(16.0, 50.0), a, 3.0, 6.0, 0.0);
        tree.corrupt_parent_for_test(a, b);
        let violations = tree.validate(&env);
        assert!(violations.iter().any(|v| matches!(v, TreeViolation::Cycle { .. })));
    }

    #[test]
    fn plan_trivial_adjacent_goal() {
        let world = World::new(pt(0.0, 0.0), pt(100.0, 100.0), vec![]).unwrap();
        let env = point2d_env(
            world,
            Config::from_xy(50.0, 50.0),
            Config::from_xy(52.0, 50.0),
        )
        .unwrap();
        let params = PlannerParams::new(50, 3.0, 1);
        let result = plan(&env, &params).unwrap();
        assert!(result.solved());
        assert_eq!(result.n_collision, 0);
        assert_relative_eq!(result.total_cost, result.path_length);
        let path = result.path.unwrap();
        assert!(path.len() >= 2);
        assert_eq!(path[0], Config::from_xy(50.0, 50.0));
        assert_eq!(path[path.len() - 1], Config::from_xy(52.0, 50.0));
    }

    #[test]
    fn plan_is_deterministic() {
        let env = wall_env(100.0);
        let mut params = PlannerParams::new(400, 3.0, 7);
        params.checkpoints = vec![200, 400];
        let a = plan(&env, &params).unwrap();
        let b = plan(&env, &params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let env = wall_env(100.0);
        let a = plan(&env, &PlannerParams::new(300, 3.0, 1)).unwrap();
        let b = plan(&env, &PlannerParams::new(300, 3.0, 2)).unwrap();
        assert_ne!(a.tree_size, 0);
        assert!(a.path != b.path || a.total_cost != b.total_cost);
    }

    #[test]
    fn checkpoint_costs_non_increasing() {
        let env = wall_env(100.0);
        let mut params = PlannerParams::new(1500, 3.0, 3);
        params.checkpoints = vec![300, 600, 900, 1200, 1500];
        let result = plan(&env, &params).unwrap();
        let costs: Vec<f64> = result
            .checkpoint_costs
            .iter()
            .filter_map(|c| c.cost)
            .collect();
        assert!(!costs.is_empty());
        for w in costs.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{:?}", costs);
        }
    }

    #[test]
    fn strategy_equivalence_with_zero_gains() {
        let env = wall_env(100.0);
        let mut unbiased = PlannerParams::new(500, 3.0, 11);
        unbiased.checkpoints = vec![250, 500];
        let mut biased = unbiased.clone();
        let p = PotentialParams::new(0.0, 0.0, 5.0, 1.0).scaled_for(&env);
        biased.strategy = ExtendStrategy::NearestNodeBias(p);
        let a = plan(&env, &unbiased).unwrap();
        let b = plan(&env, &biased).unwrap();
        assert_eq!(a.path, b.path);
        assert_eq!(a.total_cost.to_bits(), b.total_cost.to_bits());
        assert_eq!(a.checkpoint_costs, b.checkpoint_costs);
    }

    #[test]
    fn sample_bias_with_zero_iterations_matches_unbiased() {
        let env = wall_env(100.0);
        let unbiased = PlannerParams::new(400, 3.0, 13);
        let mut biased = unbiased.clone();
        let p = PotentialParams::new(50.0, 500.0, 5.0, 1.0).scaled_for(&env);
        biased.strategy = ExtendStrategy::SampleBias {
            potentials: p,
            step: 0.5,
            iters: 0,
        };
        let a = plan(&env, &unbiased).unwrap();
        let b = plan(&env, &biased).unwrap();
        assert_eq!(a.path, b.path);
        assert_eq!(a.total_cost.to_bits(), b.total_cost.to_bits());
    }

    #[test]
    fn extend_unbiased_step() {
        let env = open_env();
        let params = PlannerParams::new(10, 3.0, 1);
        let q = extend(
            &env,
            &params,
            &Config::from_xy(0.0, 0.0),
            &Config::from_xy(10.0, 0.0),
        )
        .unwrap();
        assert_eq!(q.0, vec![3.0, 0.0]);
    }

    #[test]
    fn planned_tree_validates_and_avoids_impermeable() {
        let env = impermeable_env();
        let mut params = PlannerParams::new(800, 3.0, 5);
        params.checkpoints = vec![400, 800];
        let (result, tree) = plan_with_tree(&env, &params).unwrap();
        assert!(tree.validate(&env).is_empty());
        if let Some(path) = &result.path {
            for q in path {
                assert!(!env.classify(q).is_impermeable());
            }
            for pair in path.windows(2) {
                assert!(!env.edge_blocked(&pair[0], &pair[1], params.edge_check_resolution));
            }
        }
    }

    #[test]
    fn path_cost_identity_with_uniform_permeable_cost() {
        let env = wall_env(100.0);
        let params = PlannerParams::new(2000, 3.0, 17);
        let result = plan(&env, &params).unwrap();
        assert!(result.solved());
        assert_relative_eq!(
            result.total_cost,
            result.path_length + 100.0 * result.n_collision as f64,
            epsilon = 1e-9
        );
    }

    #[test]
    fn params_validation_rejects_bad_values() {
        let mut p = PlannerParams::new(100, 3.0, 1);
        p.neighbor_radius = 4.0;
        assert!(matches!(p.validate(), Err(PlanError::InvalidParams(_))));
        let mut p = PlannerParams::new(100, 3.0, 1);
        p.checkpoints = vec![50, 200];
        assert!(p.validate().is_err());
        let mut p = PlannerParams::new(100, 3.0, 1);
        p.checkpoints = vec![60, 30];
        assert!(p.validate().is_err());
        assert!(PlannerParams::new(100, 3.0, 1).validate().is_ok());
    }
}
