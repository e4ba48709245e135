//! Deterministic SVG rendering of worlds, search trees, solution paths and
//! the potential field.
//!
//! Output is byte-deterministic for identical inputs: coordinates are
//! formatted at fixed precision and elements are emitted in a fixed order.
//! Point environments draw the tree in the plane; arm environments draw the
//! workspace with the arm posed at its start and goal configurations plus
//! the end-effector trace of the solution path.

use std::fmt::Write as _;
use thiserror::Error;

use crate::apf::{potential_gradient, PotentialParams};
use crate::cspace::{Config, Environment};
use crate::geometry::{Permeability, Point2, Shape};
use crate::planner::Tree;

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("canvas must be at least 100x100 pixels, got {0}x{1}")]
    CanvasTooSmall(u32, u32),
    #[error("layer `{0}` is not supported for this environment")]
    UnsupportedLayer(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layers {
    pub world: bool,
    pub tree: bool,
    pub path: bool,
    pub quiver: bool,
}

impl Default for Layers {
    fn default() -> Self {
        Layers {
            world: true,
            tree: true,
            path: true,
            quiver: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub width: u32,
    pub height: u32,
    pub layers: Layers,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            width: 800,
            height: 800,
            layers: Layers::default(),
        }
    }
}

const IMPERMEABLE_FILL: &str = "#4a4a4a";
const PERMEABLE_FILL: &str = "#bcd9a0";
const TREE_STROKE: &str = "#9f9f9f";
const PATH_STROKE: &str = "#d62728";
const START_FILL: &str = "#1f77b4";
const GOAL_STROKE: &str = "#2ca02c";
const ARM_START_STROKE: &str = "#1f77b4";
const ARM_GOAL_STROKE: &str = "#2ca02c";
const QUIVER_STROKE: &str = "#7f5aa0";

struct Canvas {
    height: f64,
    min: Point2,
    scale_x: f64,
    scale_y: f64,
}

impl Canvas {
    fn new(spec: &RenderSpec, lo: Point2, hi: Point2) -> Self {
        Canvas {
            height: spec.height as f64,
            min: lo,
            scale_x: spec.width as f64 / (hi.x - lo.x),
            scale_y: spec.height as f64 / (hi.y - lo.y),
        }
    }

    fn x(&self, wx: f64) -> f64 {
        (wx - self.min.x) * self.scale_x
    }

    /// World y points up; SVG y points down.
    fn y(&self, wy: f64) -> f64 {
        self.height - (wy - self.min.y) * self.scale_y
    }

    fn pt(&self, p: Point2) -> (f64, f64) {
        (self.x(p.x), self.y(p.y))
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

fn line(out: &mut String, a: (f64, f64), b: (f64, f64), stroke: &str, width: f64) {
    let _ = writeln!(
        out,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="{}"/>"#,
        fmt(a.0),
        fmt(a.1),
        fmt(b.0),
        fmt(b.1),
        fmt(width)
    );
}

fn circle(out: &mut String, c: (f64, f64), r: f64, fill: &str, stroke: Option<&str>) {
    let stroke_attr = match stroke {
        Some(s) => format!(r#" stroke="{s}" stroke-width="1.5""#),
        None => String::new(),
    };
    let _ = writeln!(
        out,
        r#"<circle cx="{}" cy="{}" r="{}" fill="{fill}"{stroke_attr}/>"#,
        fmt(c.0),
        fmt(c.1),
        fmt(r)
    );
}

fn polyline(out: &mut String, pts: &[(f64, f64)], stroke: &str, width: f64) {
    let coords: Vec<String> = pts
        .iter()
        .map(|(x, y)| format!("{},{}", fmt(*x), fmt(*y)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{}" stroke-linejoin="round"/>"#,
        coords.join(" "),
        fmt(width)
    );
}

fn draw_world(out: &mut String, canvas: &Canvas, env: &Environment) {
    for obs in env.world().obstacles() {
        let fill = match obs.permeability {
            Permeability::Permeable(_) => PERMEABLE_FILL,
            Permeability::Impermeable => IMPERMEABLE_FILL,
        };
        match obs.shape {
            Shape::Circle { center, radius } => {
                let (cx, cy) = canvas.pt(center);
                let _ = writeln!(
                    out,
                    r#"<ellipse cx="{}" cy="{}" rx="{}" ry="{}" fill="{fill}"/>"#,
                    fmt(cx),
                    fmt(cy),
                    fmt(radius * canvas.scale_x),
                    fmt(radius * canvas.scale_y)
                );
            }
            Shape::Rect { min, max } => {
                let (x, y) = (canvas.x(min.x), canvas.y(max.y));
                let _ = writeln!(
                    out,
                    r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}"/>"#,
                    fmt(x),
                    fmt(y),
                    fmt((max.x - min.x) * canvas.scale_x),
                    fmt((max.y - min.y) * canvas.scale_y)
                );
            }
        }
    }
}

fn draw_quiver(
    out: &mut String,
    canvas: &Canvas,
    env: &Environment,
    potentials: &PotentialParams,
) {
    const GRID: usize = 20;
    let bounds = env.bounds();
    let (lo_x, hi_x) = bounds[0];
    let (lo_y, hi_y) = bounds[1];
    let cell_x = (hi_x - lo_x) / GRID as f64;
    let cell_y = (hi_y - lo_y) / GRID as f64;
    let arrow_len = 0.38 * cell_x.min(cell_y);
    for i in 0..GRID {
        for j in 0..GRID {
            let wx = lo_x + (i as f64 + 0.5) * cell_x;
            let wy = lo_y + (j as f64 + 0.5) * cell_y;
            let q = Config::from_xy(wx, wy);
            if env.classify(&q).is_impermeable() {
                continue;
            }
            let grad = potential_gradient(env, potentials, &q);
            let n = (grad[0] * grad[0] + grad[1] * grad[1]).sqrt();
            let base = canvas.pt(Point2::new(wx, wy));
            circle(out, base, 1.2, QUIVER_STROKE, None);
            if n < 1e-12 {
                continue;
            }
            // Arrows follow the force, the negative gradient.
            let tip = Point2::new(
                wx - grad[0] / n * arrow_len,
                wy - grad[1] / n * arrow_len,
            );
            line(out, base, canvas.pt(tip), QUIVER_STROKE, 1.0);
        }
    }
}

/// Render the scene to an SVG document.
///
/// The tree and quiver layers require a point environment; arm scenes draw
/// the workspace with start/goal arm poses and the end-effector trace of
/// the path instead.
pub fn render_svg(
    env: &Environment,
    tree: Option<&Tree>,
    path: Option<&[Config]>,
    potentials: Option<&PotentialParams>,
    spec: &RenderSpec,
) -> Result<String, RenderError> {
    if spec.width < 100 || spec.height < 100 {
        return Err(RenderError::CanvasTooSmall(spec.width, spec.height));
    }
    let is_arm = env.arm().is_some();
    if is_arm && spec.layers.tree {
        return Err(RenderError::UnsupportedLayer("tree"));
    }
    if spec.layers.quiver && (is_arm || potentials.is_none()) {
        return Err(RenderError::UnsupportedLayer("quiver"));
    }

    let (lo, hi) = env.world().bounds();
    let canvas = Canvas::new(spec, lo, hi);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        spec.width, spec.height, spec.width, spec.height
    );
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="{}" height="{}" fill="white" stroke="#202020" stroke-width="1"/>"##,
        spec.width, spec.height
    );

    if spec.layers.world {
        draw_world(&mut out, &canvas, env);
    }
    if spec.layers.quiver {
        if let Some(p) = potentials {
            draw_quiver(&mut out, &canvas, env, p);
        }
    }

    if is_arm {
        let arm = env.arm().unwrap();
        if spec.layers.path {
            if let Some(path) = path {
                let trace: Vec<(f64, f64)> = path
                    .iter()
                    .map(|q| canvas.pt(arm.end_effector(q)))
                    .collect();
                if trace.len() >= 2 {
                    polyline(&mut out, &trace, PATH_STROKE, 2.5);
                }
            }
        }
        for (q, stroke) in [(env.start(), ARM_START_STROKE), (env.goal(), ARM_GOAL_STROKE)] {
            let pts: Vec<(f64, f64)> = arm
                .joint_positions(q)
                .iter()
                .map(|&p| canvas.pt(p))
                .collect();
            polyline(&mut out, &pts, stroke, 3.0);
            for &p in &pts {
                circle(&mut out, p, 3.0, stroke, None);
            }
        }
        if let Some(pose) = env.goal_pose() {
            let c = canvas.pt(pose);
            circle(&mut out, c, 5.0, "none", Some(GOAL_STROKE));
            circle(&mut out, c, 1.8, GOAL_STROKE, None);
        }
    } else {
        if spec.layers.tree {
            if let Some(tree) = tree {
                for node in tree.nodes() {
                    if let Some(parent) = node.parent {
                        let a = canvas.pt(node.config.to_point2());
                        let b = canvas.pt(tree.node(parent).config.to_point2());
                        line(&mut out, a, b, TREE_STROKE, 0.6);
                    }
                }
            }
        }
        if spec.layers.path {
            if let Some(path) = path {
                let pts: Vec<(f64, f64)> = path
                    .iter()
                    .map(|q| canvas.pt(q.to_point2()))
                    .collect();
                if pts.len() >= 2 {
                    polyline(&mut out, &pts, PATH_STROKE, 2.5);
                }
            }
        }
        let start = canvas.pt(env.start().to_point2());
        circle(&mut out, start, 5.0, START_FILL, None);
        let goal = canvas.pt(env.goal().to_point2());
        circle(&mut out, goal, 5.0, "none", Some(GOAL_STROKE));
        circle(&mut out, goal, 1.8, GOAL_STROKE, None);
    }

    out.push_str("</svg>\n");
    Ok(out)
}
