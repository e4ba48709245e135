//! Configuration spaces: a 2-D point robot and a planar N-link arm.
//!
//! Both environments expose the same contract — sampling, a metric,
//! interpolation, steering, collision classification, goal distance and
//! per-class workspace clearance — so the planner and potential field are
//! written once against [`Environment`].
//!
//! Permeable configurations belong to the free space: sampling only rejects
//! impermeable configurations.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::geometry::{ClassDistances, Point2, PointClass, World};
use crate::rng::PlannerRng;

/// Rejection-sampling attempts before giving up on free-space sampling.
const MAX_SAMPLE_ATTEMPTS: usize = 100_000;

#[derive(Debug, Error, PartialEq)]
pub enum EnvError {
    #[error("configuration has dimension {got}, environment expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("configuration contains a non-finite coordinate")]
    NonFinite,
    #[error("start configuration is inside an impermeable obstacle")]
    StartImpermeable,
    #[error("goal configuration is inside an impermeable obstacle")]
    GoalImpermeable,
    #[error("configuration is outside the environment bounds")]
    OutOfBounds,
    #[error("joint {joint} angle {angle} violates limits [{lo}, {hi}]")]
    JointLimit {
        joint: usize,
        angle: f64,
        lo: f64,
        hi: f64,
    },
    #[error("arm must have at least 2 links")]
    TooFewLinks,
    #[error("link lengths must be positive")]
    InvalidLinkLength,
    #[error("joint limits must lie within (-pi, pi]")]
    InvalidJointLimits,
    #[error("free-space sampling failed after {0} attempts")]
    SamplingExhausted(usize),
    #[error("direction vector has zero norm")]
    ZeroDirection,
}

/// A point in configuration space: planar coordinates for the point robot,
/// joint angles in radians (stored in `(-pi, pi]`) for the arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config(pub Vec<f64>);

impl Config {
    pub fn new(coords: Vec<f64>) -> Self {
        Config(coords)
    }

    pub fn from_xy(x: f64, y: f64) -> Self {
        Config(vec![x, y])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn to_point2(&self) -> Point2 {
        Point2::new(self.0[0], self.0[1])
    }
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// Planar arm with revolute joints at fixed base. Collision queries sample
/// `samples_per_link` points along each link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarArm {
    pub link_lengths: Vec<f64>,
    pub base: Point2,
    /// Per-joint `(lo, hi)` interval, each within `(-pi, pi]`.
    pub joint_limits: Vec<(f64, f64)>,
    pub samples_per_link: usize,
}

impl PlanarArm {
    pub fn new(
        link_lengths: Vec<f64>,
        base: Point2,
        joint_limits: Vec<(f64, f64)>,
        samples_per_link: usize,
    ) -> Result<Self, EnvError> {
        if link_lengths.len() < 2 {
            return Err(EnvError::TooFewLinks);
        }
        if link_lengths.iter().any(|&l| !l.is_finite() || l <= 0.0) {
            return Err(EnvError::InvalidLinkLength);
        }
        if joint_limits.len() != link_lengths.len() {
            return Err(EnvError::InvalidJointLimits);
        }
        for &(lo, hi) in &joint_limits {
            if !(lo.is_finite() && hi.is_finite()) || lo >= hi || lo < -PI || hi > PI {
                return Err(EnvError::InvalidJointLimits);
            }
        }
        if samples_per_link == 0 {
            return Err(EnvError::InvalidJointLimits);
        }
        Ok(PlanarArm {
            link_lengths,
            base,
            joint_limits,
            samples_per_link,
        })
    }

    pub fn dof(&self) -> usize {
        self.link_lengths.len()
    }

    pub fn check_joint_limits(&self, q: &Config) -> Result<(), EnvError> {
        if q.dim() != self.dof() {
            return Err(EnvError::DimensionMismatch {
                expected: self.dof(),
                got: q.dim(),
            });
        }
        for (i, (&a, &(lo, hi))) in q.0.iter().zip(&self.joint_limits).enumerate() {
            if a < lo || a > hi {
                return Err(EnvError::JointLimit {
                    joint: i,
                    angle: a,
                    lo,
                    hi,
                });
            }
        }
        Ok(())
    }

    /// Joint positions: base, then each link's far end.
    pub fn joint_positions(&self, q: &Config) -> Vec<Point2> {
        let mut pts = Vec::with_capacity(self.dof() + 1);
        let mut p = self.base;
        let mut theta = 0.0;
        pts.push(p);
        for (angle, len) in q.0.iter().zip(&self.link_lengths) {
            theta += angle;
            p = Point2::new(p.x + len * theta.cos(), p.y + len * theta.sin());
            pts.push(p);
        }
        pts
    }

    pub fn end_effector(&self, q: &Config) -> Point2 {
        *self.joint_positions(q).last().unwrap()
    }

    /// Sample points along the whole arm body: the base, then
    /// `samples_per_link` evenly spaced points per link up to and including
    /// each link's far end. Joint positions and the end effector are always
    /// among the samples.
    pub fn body_points(&self, q: &Config) -> Vec<Point2> {
        let n = self.samples_per_link;
        let mut pts = Vec::with_capacity(1 + self.dof() * n);
        let mut p = self.base;
        let mut theta = 0.0;
        pts.push(p);
        for (angle, len) in q.0.iter().zip(&self.link_lengths) {
            theta += angle;
            let (dx, dy) = (theta.cos(), theta.sin());
            for k in 1..=n {
                let s = len * k as f64 / n as f64;
                pts.push(Point2::new(p.x + s * dx, p.y + s * dy));
            }
            p = Point2::new(p.x + len * dx, p.y + len * dy);
        }
        pts
    }
}

/// Checked forward kinematics: body sample points for a configuration
/// within joint limits.
pub fn forward_kinematics(arm: &PlanarArm, q: &Config) -> Result<Vec<Point2>, EnvError> {
    arm.check_joint_limits(q)?;
    Ok(arm.body_points(q))
}

#[derive(Debug, Clone)]
pub struct PointEnv {
    pub(crate) world: World,
    pub(crate) start: Config,
    pub(crate) goal: Config,
}

#[derive(Debug, Clone)]
pub struct ArmEnv {
    pub(crate) arm: PlanarArm,
    pub(crate) world: World,
    pub(crate) start: Config,
    pub(crate) goal_config: Config,
    pub(crate) goal_pose: Point2,
}

/// A concrete configuration space. All queries are pure; environments are
/// immutable after construction and safe to share across planner instances.
#[derive(Debug, Clone)]
pub enum Environment {
    Point2d(PointEnv),
    PlanarArm(ArmEnv),
}

/// 2-D point robot over a workspace world. Distance is Euclidean; sampling
/// is uniform over the bounds with impermeable rejection.
pub fn point2d_env(world: World, start: Config, goal: Config) -> Result<Environment, EnvError> {
    for q in [&start, &goal] {
        if q.dim() != 2 {
            return Err(EnvError::DimensionMismatch {
                expected: 2,
                got: q.dim(),
            });
        }
        if !q.is_finite() {
            return Err(EnvError::NonFinite);
        }
    }
    let (lo, hi) = world.bounds();
    for q in [&start, &goal] {
        let p = q.to_point2();
        if p.x < lo.x || p.x > hi.x || p.y < lo.y || p.y > hi.y {
            return Err(EnvError::OutOfBounds);
        }
    }
    if world.classify_point(start.to_point2()).is_impermeable() {
        return Err(EnvError::StartImpermeable);
    }
    if world.classify_point(goal.to_point2()).is_impermeable() {
        return Err(EnvError::GoalImpermeable);
    }
    Ok(Environment::Point2d(PointEnv { world, start, goal }))
}

/// Planar arm reaching a fixed goal configuration. The goal pose is the
/// workspace target the goal configuration was solved for; it is carried
/// along for rendering and reporting only.
pub fn arm_env(
    arm: PlanarArm,
    world: World,
    start: Config,
    goal_pose: Point2,
    goal_config: Config,
) -> Result<Environment, EnvError> {
    arm.check_joint_limits(&start)?;
    arm.check_joint_limits(&goal_config)?;
    let env = ArmEnv {
        arm,
        world,
        start,
        goal_config,
        goal_pose,
    };
    if classify_arm(&env, &env.start).is_impermeable() {
        return Err(EnvError::StartImpermeable);
    }
    if classify_arm(&env, &env.goal_config).is_impermeable() {
        return Err(EnvError::GoalImpermeable);
    }
    Ok(Environment::PlanarArm(env))
}

/// Worst classification over the arm's body points: impermeable dominates,
/// permeable cost is the maximum over colliding points.
fn classify_arm(env: &ArmEnv, q: &Config) -> PointClass {
    let mut max_cost: Option<f64> = None;
    for p in env.arm.body_points(q) {
        match env.world.classify_point(p) {
            PointClass::Impermeable => return PointClass::Impermeable,
            PointClass::Permeable(c) => {
                max_cost = Some(max_cost.map_or(c, |m: f64| m.max(c)));
            }
            PointClass::Free => {}
        }
    }
    match max_cost {
        Some(c) => PointClass::Permeable(c),
        None => PointClass::Free,
    }
}

fn arm_hits_impermeable(env: &ArmEnv, q: &Config) -> bool {
    if !env.world.has_impermeable() {
        return false;
    }
    env.arm
        .body_points(q)
        .iter()
        .any(|&p| env.world.hits_impermeable(p))
}

impl Environment {
    pub fn dimension(&self) -> usize {
        match self {
            Environment::Point2d(_) => 2,
            Environment::PlanarArm(e) => e.arm.dof(),
        }
    }

    /// Per-dimension `(lo, hi)` sampling bounds.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        match self {
            Environment::Point2d(e) => {
                let (lo, hi) = e.world.bounds();
                vec![(lo.x, hi.x), (lo.y, hi.y)]
            }
            Environment::PlanarArm(e) => e.arm.joint_limits.clone(),
        }
    }

    pub fn start(&self) -> &Config {
        match self {
            Environment::Point2d(e) => &e.start,
            Environment::PlanarArm(e) => &e.start,
        }
    }

    pub fn goal(&self) -> &Config {
        match self {
            Environment::Point2d(e) => &e.goal,
            Environment::PlanarArm(e) => &e.goal_config,
        }
    }

    pub fn world(&self) -> &World {
        match self {
            Environment::Point2d(e) => &e.world,
            Environment::PlanarArm(e) => &e.world,
        }
    }

    pub fn arm(&self) -> Option<&PlanarArm> {
        match self {
            Environment::Point2d(_) => None,
            Environment::PlanarArm(e) => Some(&e.arm),
        }
    }

    pub fn goal_pose(&self) -> Option<Point2> {
        match self {
            Environment::Point2d(_) => None,
            Environment::PlanarArm(e) => Some(e.goal_pose),
        }
    }

    /// Uniform sample over the bounds, rejecting impermeable configurations.
    /// Consumes exactly `dimension` RNG draws per attempt.
    pub fn sample_free(&self, rng: &mut PlannerRng) -> Result<Config, EnvError> {
        let bounds = self.bounds();
        for _ in 0..MAX_SAMPLE_ATTEMPTS {
            let coords: Vec<f64> = bounds.iter().map(|&(lo, hi)| rng.in_range(lo, hi)).collect();
            let q = Config(coords);
            if !self.classify(&q).is_impermeable() {
                return Ok(q);
            }
        }
        Err(EnvError::SamplingExhausted(MAX_SAMPLE_ATTEMPTS))
    }

    /// The configuration-space metric: Euclidean for the point robot,
    /// Euclidean over wrapped joint differences for the arm.
    pub fn distance(&self, a: &Config, b: &Config) -> f64 {
        self.distance_squared(a, b).sqrt()
    }

    pub fn distance_squared(&self, a: &Config, b: &Config) -> f64 {
        match self {
            Environment::Point2d(_) => {
                let dx = a.0[0] - b.0[0];
                let dy = a.0[1] - b.0[1];
                dx * dx + dy * dy
            }
            Environment::PlanarArm(_) => a
                .0
                .iter()
                .zip(&b.0)
                .map(|(&x, &y)| {
                    let d = wrap_angle(x - y);
                    d * d
                })
                .sum(),
        }
    }

    /// Displacement vector from `from` to `to` in the chart the planner
    /// steers in (wrapped per joint for the arm).
    pub fn difference(&self, from: &Config, to: &Config) -> Vec<f64> {
        match self {
            Environment::Point2d(_) => {
                vec![to.0[0] - from.0[0], to.0[1] - from.0[1]]
            }
            Environment::PlanarArm(_) => from
                .0
                .iter()
                .zip(&to.0)
                .map(|(&f, &t)| wrap_angle(t - f))
                .collect(),
        }
    }

    pub fn classify(&self, q: &Config) -> PointClass {
        match self {
            Environment::Point2d(e) => e.world.classify_point(q.to_point2()),
            Environment::PlanarArm(e) => classify_arm(e, q),
        }
    }

    /// Linear interpolation; the arm interpolates along wrapped joint
    /// differences and re-wraps.
    pub fn interpolate(&self, a: &Config, b: &Config, t: f64) -> Config {
        match self {
            Environment::Point2d(_) => Config(vec![
                a.0[0] + (b.0[0] - a.0[0]) * t,
                a.0[1] + (b.0[1] - a.0[1]) * t,
            ]),
            Environment::PlanarArm(_) => Config(
                a.0.iter()
                    .zip(&b.0)
                    .map(|(&x, &y)| wrap_angle(x + wrap_angle(y - x) * t))
                    .collect(),
            ),
        }
    }

    /// Distance to the goal configuration under the environment metric.
    pub fn goal_distance(&self, q: &Config) -> f64 {
        self.distance(q, self.goal())
    }

    /// Per-class minimum workspace clearance. For the arm this is the
    /// minimum over all body sample points, the workspace-distance
    /// approximation of configuration-space obstacle proximity.
    pub fn clearance_per_class(&self, q: &Config) -> ClassDistances {
        match self {
            Environment::Point2d(e) => e.world.min_distance_per_class(q.to_point2()),
            Environment::PlanarArm(e) => {
                let mut perm: Option<f64> = None;
                let mut imp: Option<f64> = None;
                for p in e.arm.body_points(q) {
                    let d = e.world.min_distance_per_class(p);
                    if let Some(dp) = d.permeable {
                        perm = Some(perm.map_or(dp, |m: f64| m.min(dp)));
                    }
                    if let Some(di) = d.impermeable {
                        imp = Some(imp.map_or(di, |m: f64| m.min(di)));
                    }
                }
                ClassDistances {
                    permeable: perm,
                    impermeable: imp,
                }
            }
        }
    }

    /// Move `delta` along a unit `direction` from `from`, then clamp to the
    /// bounds (point robot) or wrap and clamp joints (arm).
    pub fn steer(&self, from: &Config, direction: &[f64], delta: f64) -> Result<Config, EnvError> {
        let norm2: f64 = direction.iter().map(|d| d * d).sum();
        if norm2 == 0.0 {
            return Err(EnvError::ZeroDirection);
        }
        match self {
            Environment::Point2d(e) => {
                let (lo, hi) = e.world.bounds();
                let x = (from.0[0] + delta * direction[0]).clamp(lo.x, hi.x);
                let y = (from.0[1] + delta * direction[1]).clamp(lo.y, hi.y);
                Ok(Config(vec![x, y]))
            }
            Environment::PlanarArm(e) => Ok(Config(
                from.0
                    .iter()
                    .zip(direction)
                    .zip(&e.arm.joint_limits)
                    .map(|((&a, &d), &(lo, hi))| wrap_angle(a + delta * d).clamp(lo, hi))
                    .collect(),
            )),
        }
    }

    /// Sampled impermeable check along the segment `[a, b]` in configuration
    /// space, endpoints included, at spacing at most `resolution`.
    pub fn edge_blocked(&self, a: &Config, b: &Config, resolution: f64) -> bool {
        match self {
            Environment::Point2d(e) => {
                e.world
                    .segment_hits_impermeable(a.to_point2(), b.to_point2(), resolution)
            }
            Environment::PlanarArm(e) => {
                if !e.world.has_impermeable() {
                    return false;
                }
                let len = self.distance(a, b);
                let steps = if len == 0.0 {
                    0
                } else {
                    (len / resolution).ceil() as usize
                };
                for i in 0..=steps {
                    let t = if steps == 0 {
                        0.0
                    } else {
                        i as f64 / steps as f64
                    };
                    let q = self.interpolate(a, b, t);
                    if arm_hits_impermeable(e, &q) {
                        return true;
                    }
                }
                false
            }
        }
    }
}
