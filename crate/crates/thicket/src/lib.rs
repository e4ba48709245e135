//! Cost-aware sampling-based motion planning through permeable obstacles.
//!
//! Obstacles are either *permeable* — enterable at a collision cost — or
//! *impermeable* hard constraints. The planner grows an RRT* whose path
//! cost combines length with the collision costs of permeable-obstacle
//! nodes, optionally biased by an adaptive artificial potential field.
//! A benchmark harness runs seeded multi-trial comparisons between the
//! biasing strategies and reports aggregate statistics.

pub mod apf;
pub mod bench;
pub mod cspace;
pub mod geometry;
pub mod planner;
pub mod render;
pub mod rng;
pub mod scenario;

pub use apf::{PotentialParams, PotentialSample};
pub use cspace::{arm_env, forward_kinematics, point2d_env, Config, EnvError, Environment, PlanarArm};
pub use geometry::{
    ClassDistances, ObstacleRegion, Permeability, Point2, PointClass, Shape, World, WorldError,
};
pub use planner::{
    plan, plan_with_tree, ExtendStrategy, PlanError, PlanResult, PlannerParams, Tree, TreeNode,
    TreeViolation,
};
pub use rng::PlannerRng;
