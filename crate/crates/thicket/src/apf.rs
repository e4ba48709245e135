//! Artificial potential field: quadratic attractive potential toward the
//! goal, inverse repulsive potential near obstacles with per-class gains,
//! the adaptive blend weight `lambda`, and the two tree-biasing strategies
//! built on top (nearest-node biasing and random-sample biasing).
//!
//! The potential at a configuration is `U_tot = U_att + U_rep`, with the
//! repulsive term summed over the two obstacle classes using each class's
//! nearest-obstacle clearance.

use serde::{Deserialize, Serialize};

use crate::cspace::{Config, EnvError, Environment};
use crate::geometry::ClassDistances;

/// Clearance clamp applied before the repulsive formula. Permeable contact
/// is legal, so the potential must stay finite at zero clearance.
pub const MIN_CLEARANCE: f64 = 1e-3;

/// Finite-difference step for arm-environment gradients (radians).
pub const FD_STEP: f64 = 1e-5;

/// Below this norm a direction is treated as degenerate and the caller
/// falls back to pure exploration.
pub const EPS_DIRECTION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObstacleClass {
    Permeable,
    Impermeable,
}

/// Gains and scaling constants for the potential field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub k_att: f64,
    pub k_rep_perm: f64,
    pub k_rep_imp: f64,
    pub d_star_perm: f64,
    pub d_star_imp: f64,
    pub beta: f64,
    /// Attractive-force magnitude used to scale the blend weight; by
    /// convention the attractive force at the start configuration.
    pub f_att_max: f64,
}

impl PotentialParams {
    /// Shared repulsive gain and effective distance across both classes.
    pub fn new(k_att: f64, k_rep: f64, d_obs_star: f64, beta: f64) -> Self {
        PotentialParams {
            k_att,
            k_rep_perm: k_rep,
            k_rep_imp: k_rep,
            d_star_perm: d_obs_star,
            d_star_imp: d_obs_star,
            beta,
            f_att_max: 0.0,
        }
    }

    /// Set `f_att_max` to the attractive force magnitude at the start:
    /// `2 * k_att * d(start, goal)`.
    pub fn scaled_for(mut self, env: &Environment) -> Self {
        self.f_att_max = 2.0 * self.k_att * env.distance(env.start(), env.goal());
        self
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let fields = [
            self.k_att,
            self.k_rep_perm,
            self.k_rep_imp,
            self.d_star_perm,
            self.d_star_imp,
            self.beta,
            self.f_att_max,
        ];
        if fields.iter().any(|f| !f.is_finite()) {
            return Err(EnvError::NonFinite);
        }
        if self.k_att < 0.0
            || self.k_rep_perm < 0.0
            || self.k_rep_imp < 0.0
            || self.d_star_perm <= 0.0
            || self.d_star_imp <= 0.0
            || self.beta <= 0.0
            || self.f_att_max < 0.0
        {
            return Err(EnvError::NonFinite);
        }
        Ok(())
    }

    fn gains(&self, class: ObstacleClass) -> (f64, f64) {
        match class {
            ObstacleClass::Permeable => (self.k_rep_perm, self.d_star_perm),
            ObstacleClass::Impermeable => (self.k_rep_imp, self.d_star_imp),
        }
    }
}

/// Potential field evaluated at one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSample {
    pub u_att: f64,
    pub u_rep: f64,
    pub u_tot: f64,
    pub grad_u_tot: Vec<f64>,
    pub f_total_scalar: f64,
    pub lambda: f64,
}

/// `U_att = K_att * d_goal^2`.
pub fn attractive_potential(params: &PotentialParams, d_goal: f64) -> f64 {
    params.k_att * d_goal * d_goal
}

/// `U_rep = 1/2 * K_rep * (1/d - 1/d*)^2` inside the effective distance,
/// zero beyond it. Clearance is clamped to [`MIN_CLEARANCE`] so contact
/// yields a finite cap.
pub fn repulsive_potential(params: &PotentialParams, d_obs: f64, class: ObstacleClass) -> f64 {
    let (k_rep, d_star) = params.gains(class);
    if d_obs > d_star {
        return 0.0;
    }
    let d = d_obs.max(MIN_CLEARANCE);
    let inv = 1.0 / d - 1.0 / d_star;
    0.5 * k_rep * inv * inv
}

fn repulsive_total(params: &PotentialParams, clearance: &ClassDistances) -> f64 {
    let mut u = 0.0;
    if let Some(d) = clearance.permeable {
        u += repulsive_potential(params, d, ObstacleClass::Permeable);
    }
    if let Some(d) = clearance.impermeable {
        u += repulsive_potential(params, d, ObstacleClass::Impermeable);
    }
    u
}

fn attractive_at(env: &Environment, params: &PotentialParams, q: &Config) -> f64 {
    attractive_potential(params, env.goal_distance(q))
}

fn repulsive_at(env: &Environment, params: &PotentialParams, q: &Config) -> f64 {
    repulsive_total(params, &env.clearance_per_class(q))
}

/// Total potential `U_att + U_rep` at `q`.
pub fn total_potential(env: &Environment, params: &PotentialParams, q: &Config) -> f64 {
    attractive_at(env, params, q) + repulsive_at(env, params, q)
}

fn central_fd(f: impl Fn(&Config) -> f64, q: &Config, h: f64) -> Vec<f64> {
    let mut grad = Vec::with_capacity(q.dim());
    let mut probe = q.clone();
    for i in 0..q.dim() {
        let orig = probe.0[i];
        probe.0[i] = orig + h;
        let hi = f(&probe);
        probe.0[i] = orig - h;
        let lo = f(&probe);
        probe.0[i] = orig;
        grad.push((hi - lo) / (2.0 * h));
    }
    grad
}

/// Gradient of the attractive potential. Analytic for the point robot,
/// central finite differences for the arm.
pub fn attractive_gradient(env: &Environment, params: &PotentialParams, q: &Config) -> Vec<f64> {
    match env {
        Environment::Point2d(_) => {
            let goal = env.goal();
            vec![
                2.0 * params.k_att * (q.0[0] - goal.0[0]),
                2.0 * params.k_att * (q.0[1] - goal.0[1]),
            ]
        }
        Environment::PlanarArm(_) => {
            central_fd(|c| attractive_at(env, params, c), q, FD_STEP)
        }
    }
}

/// Gradient of the repulsive potential. Analytic (chain rule through the
/// nearest obstacle's distance field) for the point robot, finite
/// differences for the arm, whose clearance is a minimum over sampled
/// link points and has no closed-form derivative.
pub fn repulsive_gradient(env: &Environment, params: &PotentialParams, q: &Config) -> Vec<f64> {
    match env {
        Environment::Point2d(e) => {
            let p = q.to_point2();
            let (perm, imp) = e.world.nearest_per_class(p);
            let mut grad = [0.0, 0.0];
            for (nearest, class) in [
                (perm, ObstacleClass::Permeable),
                (imp, ObstacleClass::Impermeable),
            ] {
                let Some((d, idx)) = nearest else { continue };
                let (k_rep, d_star) = params.gains(class);
                // Beyond the effective distance the field is zero; below the
                // clamp it is a constant plateau. Both have zero gradient.
                if d > d_star || d <= MIN_CLEARANCE {
                    continue;
                }
                let du_dd = k_rep * (1.0 / d - 1.0 / d_star) * (-1.0 / (d * d));
                let dd = e.world.obstacles()[idx].shape.distance_gradient(p);
                grad[0] += du_dd * dd[0];
                grad[1] += du_dd * dd[1];
            }
            grad.to_vec()
        }
        Environment::PlanarArm(_) => {
            central_fd(|c| repulsive_at(env, params, c), q, FD_STEP)
        }
    }
}

/// Gradient of `U_tot` in configuration-space coordinates.
pub fn potential_gradient(env: &Environment, params: &PotentialParams, q: &Config) -> Vec<f64> {
    let att = attractive_gradient(env, params, q);
    let rep = repulsive_gradient(env, params, q);
    att.iter().zip(&rep).map(|(a, r)| a + r).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Signed total-force scalar: the projection of `F_att + F_rep` onto the
/// attractive direction. Zero when there is no attractive force.
pub fn total_force_scalar(f_att: &[f64], f_rep: &[f64]) -> f64 {
    let n_att = norm(f_att);
    if n_att == 0.0 {
        return 0.0;
    }
    f_att
        .iter()
        .zip(f_rep)
        .map(|(a, r)| (a + r) * a)
        .sum::<f64>()
        / n_att
}

/// Adaptive blend weight in `(0, 1]`: fully explorative (`lambda = 1`) when
/// the net force opposes the goal direction, increasingly exploitative as
/// the net force approaches the maximum attractive force.
pub fn lambda_weight(params: &PotentialParams, f_att: &[f64], f_rep: &[f64]) -> f64 {
    let f_total = total_force_scalar(f_att, f_rep);
    if f_total <= 0.0 || params.f_att_max <= 0.0 {
        return 1.0;
    }
    1.0 / (params.beta * f_total / params.f_att_max + 1.0)
}

/// Evaluate the full potential sample at `q`, including the blend weight.
pub fn sample_potential(env: &Environment, params: &PotentialParams, q: &Config) -> PotentialSample {
    let u_att = attractive_at(env, params, q);
    let u_rep = repulsive_at(env, params, q);
    let g_att = attractive_gradient(env, params, q);
    let g_rep = repulsive_gradient(env, params, q);
    let grad_u_tot: Vec<f64> = g_att.iter().zip(&g_rep).map(|(a, r)| a + r).collect();
    let f_att: Vec<f64> = g_att.iter().map(|x| -x).collect();
    let f_rep: Vec<f64> = g_rep.iter().map(|x| -x).collect();
    let f_total_scalar = total_force_scalar(&f_att, &f_rep);
    let lambda = lambda_weight(params, &f_att, &f_rep);
    PotentialSample {
        u_att,
        u_rep,
        u_tot: u_att + u_rep,
        grad_u_tot,
        f_total_scalar,
        lambda,
    }
}

/// Blend the exploration direction (toward the random sample) with the
/// potential-force direction, weighted by `lambda`. Returns a unit vector.
///
/// With `lambda = 1` the exploration direction is returned unchanged, so a
/// zero-gain potential field reproduces unbiased extension exactly.
pub fn biased_extend_direction(
    env: &Environment,
    params: &PotentialParams,
    q_near: &Config,
    q_rand: &Config,
) -> Result<Vec<f64>, EnvError> {
    let diff = env.difference(q_near, q_rand);
    let n = norm(&diff);
    if n == 0.0 {
        return Err(EnvError::ZeroDirection);
    }
    let v_r: Vec<f64> = diff.iter().map(|d| d / n).collect();

    let g_att = attractive_gradient(env, params, q_near);
    let g_rep = repulsive_gradient(env, params, q_near);
    let f_att: Vec<f64> = g_att.iter().map(|x| -x).collect();
    let f_rep: Vec<f64> = g_rep.iter().map(|x| -x).collect();
    let lambda = lambda_weight(params, &f_att, &f_rep);
    if lambda == 1.0 {
        return Ok(v_r);
    }

    let force: Vec<f64> = f_att.iter().zip(&f_rep).map(|(a, r)| a + r).collect();
    let fn_norm = norm(&force);
    let v_p: Vec<f64> = if fn_norm < EPS_DIRECTION {
        v_r.clone()
    } else {
        force.iter().map(|f| f / fn_norm).collect()
    };

    let blended: Vec<f64> = v_r
        .iter()
        .zip(&v_p)
        .map(|(r, p)| lambda * r + (1.0 - lambda) * p)
        .collect();
    let bn = norm(&blended);
    if bn < EPS_DIRECTION {
        Ok(v_r)
    } else {
        Ok(blended.iter().map(|b| b / bn).collect())
    }
}

/// Shift a random sample down the potential gradient: `k` steps of length
/// `step`, re-evaluating the gradient each time. Stops early when the
/// gradient vanishes or the next shift would land in impermeable space
/// (the last valid sample is returned).
pub fn bias_random_sample(
    env: &Environment,
    params: &PotentialParams,
    q_rand: Config,
    step: f64,
    iters: u32,
) -> Config {
    let mut q = q_rand;
    for _ in 0..iters {
        let grad = potential_gradient(env, params, &q);
        let n = norm(&grad);
        if n < EPS_DIRECTION {
            break;
        }
        let dir: Vec<f64> = grad.iter().map(|g| -g / n).collect();
        let Ok(next) = env.steer(&q, &dir, step) else {
            break;
        };
        if env.classify(&next).is_impermeable() {
            break;
        }
        q = next;
    }
    q
}
