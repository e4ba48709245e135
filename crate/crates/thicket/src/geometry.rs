//! 2-D workspace geometry: obstacle shapes, permeability labels, point
//! classification and distance queries.
//!
//! Obstacles come in two flavours. *Permeable* regions may be entered at a
//! positive collision cost; *impermeable* regions are hard constraints.
//! Regions are closed: boundary points count as inside.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WorldError {
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("circle radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("rectangle min must be strictly below max on both axes")]
    InvalidRect,
    #[error("permeable collision cost must be positive, got {0}")]
    InvalidPermeableCost(f64),
    #[error("world bounds are degenerate")]
    DegenerateBounds,
    #[error("obstacle {0} does not intersect the world bounds")]
    ObstacleOutsideBounds(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Circle { center: Point2, radius: f64 },
    /// Axis-aligned rectangle, `min` strictly below `max` on both axes.
    Rect { min: Point2, max: Point2 },
}

impl Shape {
    pub fn circle(center: Point2, radius: f64) -> Result<Self, WorldError> {
        if !center.is_finite() || !radius.is_finite() {
            return Err(WorldError::NonFinite);
        }
        if radius <= 0.0 {
            return Err(WorldError::InvalidRadius(radius));
        }
        Ok(Shape::Circle { center, radius })
    }

    pub fn rect(min: Point2, max: Point2) -> Result<Self, WorldError> {
        if !min.is_finite() || !max.is_finite() {
            return Err(WorldError::NonFinite);
        }
        if min.x >= max.x || min.y >= max.y {
            return Err(WorldError::InvalidRect);
        }
        Ok(Shape::Rect { min, max })
    }

    /// Closed containment test: boundary points are inside.
    pub fn contains(&self, p: Point2) -> bool {
        match *self {
            Shape::Circle { center, radius } => p.distance(center) <= radius,
            Shape::Rect { min, max } => {
                p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y
            }
        }
    }

    /// Euclidean distance from `p` to the closest point of the shape; 0 inside.
    pub fn distance_to(&self, p: Point2) -> f64 {
        match *self {
            Shape::Circle { center, radius } => (p.distance(center) - radius).max(0.0),
            Shape::Rect { min, max } => {
                let dx = (min.x - p.x).max(0.0).max(p.x - max.x);
                let dy = (min.y - p.y).max(0.0).max(p.y - max.y);
                dx.hypot(dy)
            }
        }
    }

    /// Unit direction of steepest increase of `distance_to` at `p`.
    /// Zero inside the shape (the distance is identically zero there) and at
    /// a circle's exact center.
    pub fn distance_gradient(&self, p: Point2) -> [f64; 2] {
        match *self {
            Shape::Circle { center, radius } => {
                let d = p.distance(center);
                if d <= radius || d == 0.0 {
                    [0.0, 0.0]
                } else {
                    [(p.x - center.x) / d, (p.y - center.y) / d]
                }
            }
            Shape::Rect { min, max } => {
                if self.contains(p) {
                    return [0.0, 0.0];
                }
                let cx = p.x.clamp(min.x, max.x);
                let cy = p.y.clamp(min.y, max.y);
                let d = (p.x - cx).hypot(p.y - cy);
                [(p.x - cx) / d, (p.y - cy) / d]
            }
        }
    }

    fn intersects_rect(&self, min: Point2, max: Point2) -> bool {
        match *self {
            Shape::Circle { radius, .. } => {
                let rect = Shape::Rect { min, max };
                rect.distance_to(match *self {
                    Shape::Circle { center, .. } => center,
                    _ => unreachable!(),
                }) <= radius
            }
            Shape::Rect {
                min: smin,
                max: smax,
            } => smin.x <= max.x && smax.x >= min.x && smin.y <= max.y && smax.y >= min.y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Permeability {
    /// May be entered; each tree node inside incurs this cost (> 0).
    Permeable(f64),
    /// Hard constraint, never entered.
    Impermeable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObstacleRegion {
    pub shape: Shape,
    pub permeability: Permeability,
}

impl ObstacleRegion {
    pub fn new(shape: Shape, permeability: Permeability) -> Result<Self, WorldError> {
        if let Permeability::Permeable(cost) = permeability {
            if !cost.is_finite() || cost <= 0.0 {
                return Err(WorldError::InvalidPermeableCost(cost));
            }
        }
        Ok(ObstacleRegion {
            shape,
            permeability,
        })
    }

    pub fn is_impermeable(&self) -> bool {
        matches!(self.permeability, Permeability::Impermeable)
    }
}

/// Classification of a workspace point against all obstacles.
/// Impermeable dominates permeable on overlap; overlapping permeable
/// regions take the maximum cost, not the sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PointClass {
    Free,
    Permeable(f64),
    Impermeable,
}

impl PointClass {
    pub fn collision_cost(&self) -> f64 {
        match *self {
            PointClass::Permeable(c) => c,
            _ => 0.0,
        }
    }

    pub fn is_impermeable(&self) -> bool {
        matches!(self, PointClass::Impermeable)
    }
}

/// Per-class minimum clearance. `None` when the class has no obstacles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassDistances {
    pub permeable: Option<f64>,
    pub impermeable: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    bounds_min: Point2,
    bounds_max: Point2,
    obstacles: Vec<ObstacleRegion>,
    has_impermeable: bool,
}

impl World {
    pub fn new(
        bounds_min: Point2,
        bounds_max: Point2,
        obstacles: Vec<ObstacleRegion>,
    ) -> Result<Self, WorldError> {
        if !bounds_min.is_finite() || !bounds_max.is_finite() {
            return Err(WorldError::NonFinite);
        }
        if bounds_min.x >= bounds_max.x || bounds_min.y >= bounds_max.y {
            return Err(WorldError::DegenerateBounds);
        }
        for (i, obs) in obstacles.iter().enumerate() {
            if !obs.shape.intersects_rect(bounds_min, bounds_max) {
                return Err(WorldError::ObstacleOutsideBounds(i));
            }
        }
        let has_impermeable = obstacles.iter().any(|o| o.is_impermeable());
        Ok(World {
            bounds_min,
            bounds_max,
            obstacles,
            has_impermeable,
        })
    }

    pub fn bounds(&self) -> (Point2, Point2) {
        (self.bounds_min, self.bounds_max)
    }

    pub fn obstacles(&self) -> &[ObstacleRegion] {
        &self.obstacles
    }

    pub fn has_impermeable(&self) -> bool {
        self.has_impermeable
    }

    /// Classify a point against all obstacles. Total function: any finite
    /// point maps to exactly one class.
    pub fn classify_point(&self, p: Point2) -> PointClass {
        let mut max_perm_cost: Option<f64> = None;
        for obs in &self.obstacles {
            if !obs.shape.contains(p) {
                continue;
            }
            match obs.permeability {
                Permeability::Impermeable => return PointClass::Impermeable,
                Permeability::Permeable(cost) => {
                    max_perm_cost = Some(max_perm_cost.map_or(cost, |m: f64| m.max(cost)));
                }
            }
        }
        match max_perm_cost {
            Some(cost) => PointClass::Permeable(cost),
            None => PointClass::Free,
        }
    }

    /// True iff `p` lies inside (or on the boundary of) an impermeable shape.
    pub fn hits_impermeable(&self, p: Point2) -> bool {
        self.has_impermeable
            && self
                .obstacles
                .iter()
                .any(|o| o.is_impermeable() && o.shape.contains(p))
    }

    /// Per-class minimum of `distance_to` over the obstacles of that class.
    pub fn min_distance_per_class(&self, p: Point2) -> ClassDistances {
        let mut perm: Option<f64> = None;
        let mut imp: Option<f64> = None;
        for obs in &self.obstacles {
            let d = obs.shape.distance_to(p);
            let slot = match obs.permeability {
                Permeability::Permeable(_) => &mut perm,
                Permeability::Impermeable => &mut imp,
            };
            *slot = Some(slot.map_or(d, |m: f64| m.min(d)));
        }
        ClassDistances {
            permeable: perm,
            impermeable: imp,
        }
    }

    /// Nearest obstacle of each class: (distance, obstacle index), ties going
    /// to the lowest index.
    pub fn nearest_per_class(&self, p: Point2) -> (Option<(f64, usize)>, Option<(f64, usize)>) {
        let mut perm: Option<(f64, usize)> = None;
        let mut imp: Option<(f64, usize)> = None;
        for (i, obs) in self.obstacles.iter().enumerate() {
            let d = obs.shape.distance_to(p);
            let slot = match obs.permeability {
                Permeability::Permeable(_) => &mut perm,
                Permeability::Impermeable => &mut imp,
            };
            match slot {
                Some((best, _)) if *best <= d => {}
                _ => *slot = Some((d, i)),
            }
        }
        (perm, imp)
    }

    /// Sampled test for impermeable collisions along the segment `[a, b]`,
    /// endpoints included. Samples are spaced at most `resolution` apart, so
    /// features thinner than `resolution` can slip between samples.
    pub fn segment_hits_impermeable(&self, a: Point2, b: Point2, resolution: f64) -> bool {
        assert!(resolution > 0.0, "resolution must be positive");
        if !self.has_impermeable {
            return false;
        }
        let len = a.distance(b);
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
            let p = Point2::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t);
            if self.hits_impermeable(p) {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pt(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    /// Independent distance oracle: densely sample the shape boundary and
    /// take the minimum point distance (interior handled separately).
    fn distance_oracle(shape: &Shape, p: Point2, samples: usize) -> f64 {
        if shape.contains(p) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        match *shape {
            Shape::Circle { center, radius } => {
                for i in 0..samples {
                    let a = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
                    let q = pt(center.x + radius * a.cos(), center.y + radius * a.sin());
                    best = best.min(p.distance(q));
                }
            }
            Shape::Rect { min, max } => {
                for i in 0..=samples {
                    let t = i as f64 / samples as f64;
                    let x = min.x + (max.x - min.x) * t;
                    let y = min.y + (max.y - min.y) * t;
                    best = best.min(p.distance(pt(x, min.y)));
                    best = best.min(p.distance(pt(x, max.y)));
                    best = best.min(p.distance(pt(min.x, y)));
                    best = best.min(p.distance(pt(max.x, y)));
                }
            }
        }
        best
    }

    fn wall_world() -> World {
        World::new(
            pt(0.0, 0.0),
            pt(100.0, 100.0),
            vec![ObstacleRegion::new(
                Shape::rect(pt(45.0, 0.0), pt(55.0, 100.0)).unwrap(),
                Permeability::Permeable(100.0),
            )
            .unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn classify_inside_permeable_wall() {
        let w = wall_world();
        assert_eq!(
            w.classify_point(pt(50.0, 50.0)),
            PointClass::Permeable(100.0)
        );
    }

    #[test]
    fn classify_free_point() {
        let w = wall_world();
        assert_eq!(w.classify_point(pt(10.0, 10.0)), PointClass::Free);
    }

    #[test]
    fn impermeable_dominates_permeable() {
        let w = World::new(
            pt(0.0, 0.0),
            pt(10.0, 10.0),
            vec![
                ObstacleRegion::new(
                    Shape::circle(pt(5.0, 5.0), 2.0).unwrap(),
                    Permeability::Permeable(100.0),
                )
                .unwrap(),
                ObstacleRegion::new(
                    Shape::circle(pt(5.0, 5.0), 1.0).unwrap(),
                    Permeability::Impermeable,
                )
                .unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(w.classify_point(pt(5.0, 5.0)), PointClass::Impermeable);
    }

    #[test]
    fn overlapping_permeable_takes_max_cost() {
        let w = World::new(
            pt(0.0, 0.0),
            pt(10.0, 10.0),
            vec![
                ObstacleRegion::new(
                    Shape::circle(pt(5.0, 5.0), 2.0).unwrap(),
                    Permeability::Permeable(30.0),
                )
                .unwrap(),
                ObstacleRegion::new(
                    Shape::circle(pt(5.0, 5.0), 3.0).unwrap(),
                    Permeability::Permeable(100.0),
                )
                .unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(
            w.classify_point(pt(5.0, 5.0)),
            PointClass::Permeable(100.0)
        );
    }

    #[test]
    fn boundary_counts_as_inside() {
        let c = Shape::circle(pt(0.0, 0.0), 1.0).unwrap();
        assert!(c.contains(pt(1.0, 0.0)));
        let r = Shape::rect(pt(0.0, 0.0), pt(2.0, 2.0)).unwrap();
        assert!(r.contains(pt(2.0, 1.0)));
    }

    #[test]
    fn circle_distance_collinear() {
        let c = Shape::circle(pt(0.0, 0.0), 1.0).unwrap();
        assert_relative_eq!(c.distance_to(pt(3.0, 0.0)), 2.0);
    }

    #[test]
    fn rect_distance_interior_is_zero() {
        let r = Shape::rect(pt(0.0, 0.0), pt(2.0, 2.0)).unwrap();
        assert_eq!(r.distance_to(pt(1.0, 1.0)), 0.0);
    }

    #[test]
    fn rect_distance_corner_matches_oracle() {
        let r = Shape::rect(pt(0.0, 0.0), pt(2.0, 2.0)).unwrap();
        let d = r.distance_to(pt(3.0, 3.0));
        assert_relative_eq!(d, 2.0_f64.sqrt(), epsilon = 1e-12);
        let oracle = distance_oracle(&r, pt(3.0, 3.0), 20_000);
        assert_relative_eq!(d, oracle, epsilon = 1e-4);
    }

    #[test]
    fn min_distance_per_class_basic() {
        let w = World::new(
            pt(-10.0, -10.0),
            pt(10.0, 10.0),
            vec![ObstacleRegion::new(
                Shape::circle(pt(0.0, 0.0), 1.0).unwrap(),
                Permeability::Permeable(5.0),
            )
            .unwrap()],
        )
        .unwrap();
        let d = w.min_distance_per_class(pt(3.0, 0.0));
        assert_relative_eq!(d.permeable.unwrap(), 2.0);
        assert!(d.impermeable.is_none());
    }

    #[test]
    fn min_distance_per_class_empty_world() {
        let w = World::new(pt(0.0, 0.0), pt(1.0, 1.0), vec![]).unwrap();
        let d = w.min_distance_per_class(pt(0.5, 0.5));
        assert!(d.permeable.is_none());
        assert!(d.impermeable.is_none());
    }

    #[test]
    fn min_distance_per_class_takes_minimum() {
        let w = World::new(
            pt(-10.0, -10.0),
            pt(10.0, 10.0),
            vec![
                ObstacleRegion::new(
                    Shape::circle(pt(5.0, 0.0), 1.0).unwrap(),
                    Permeability::Permeable(5.0),
                )
                .unwrap(),
                ObstacleRegion::new(
                    Shape::circle(pt(-3.0, 0.0), 1.0).unwrap(),
                    Permeability::Permeable(5.0),
                )
                .unwrap(),
            ],
        )
        .unwrap();
        // p at (1,0): distances are 3 and 3 to centers -> 3-1=2 and 4-1=3
        let d = w.min_distance_per_class(pt(1.0, 0.0));
        assert_relative_eq!(d.permeable.unwrap(), 3.0);
        let d = w.min_distance_per_class(pt(2.0, 0.0));
        assert_relative_eq!(d.permeable.unwrap(), 2.0);
    }

    #[test]
    fn segment_in_free_space_misses() {
        let w = wall_world();
        assert!(!w.segment_hits_impermeable(pt(1.0, 1.0), pt(20.0, 20.0), 0.5));
    }

    #[test]
    fn segment_through_impermeable_hits() {
        let w = World::new(
            pt(0.0, 0.0),
            pt(10.0, 10.0),
            vec![ObstacleRegion::new(
                Shape::rect(pt(4.0, 0.0), pt(6.0, 10.0)).unwrap(),
                Permeability::Impermeable,
            )
            .unwrap()],
        )
        .unwrap();
        assert!(w.segment_hits_impermeable(pt(1.0, 5.0), pt(9.0, 5.0), 2.0));
    }

    #[test]
    fn thin_wall_can_slip_between_samples() {
        // Wall of width resolution/2 centered between two samples: the
        // sampled check misses it. Documented limitation.
        let res = 1.0;
        let w = World::new(
            pt(0.0, 0.0),
            pt(10.0, 10.0),
            vec![ObstacleRegion::new(
                Shape::rect(pt(4.3, 0.0), pt(4.8, 10.0)).unwrap(),
                Permeability::Impermeable,
            )
            .unwrap()],
        )
        .unwrap();
        // Segment from x=0 to x=8, length 8, resolution 1 -> samples at
        // integer x. Wall (4.3, 4.8) avoids them all.
        assert!(!w.segment_hits_impermeable(pt(0.0, 5.0), pt(8.0, 5.0), res));
        // A finer resolution catches it.
        assert!(w.segment_hits_impermeable(pt(0.0, 5.0), pt(8.0, 5.0), 0.1));
    }

    #[test]
    fn adding_permeable_never_changes_impermeable_classification() {
        let imp = ObstacleRegion::new(
            Shape::circle(pt(5.0, 5.0), 1.0).unwrap(),
            Permeability::Impermeable,
        )
        .unwrap();
        let w1 = World::new(pt(0.0, 0.0), pt(10.0, 10.0), vec![imp]).unwrap();
        let perm = ObstacleRegion::new(
            Shape::circle(pt(5.0, 5.0), 3.0).unwrap(),
            Permeability::Permeable(50.0),
        )
        .unwrap();
        let w2 = World::new(pt(0.0, 0.0), pt(10.0, 10.0), vec![imp, perm]).unwrap();
        for &p in &[pt(5.0, 5.0), pt(5.5, 5.0), pt(4.2, 4.6)] {
            if w1.classify_point(p) == PointClass::Impermeable {
                assert_eq!(w2.classify_point(p), PointClass::Impermeable);
            }
        }
    }

    #[test]
    fn constructor_rejects_bad_inputs() {
        assert_eq!(
            Shape::circle(pt(0.0, 0.0), 0.0).unwrap_err(),
            WorldError::InvalidRadius(0.0)
        );
        assert_eq!(
            Shape::rect(pt(1.0, 0.0), pt(1.0, 2.0)).unwrap_err(),
            WorldError::InvalidRect
        );
        assert_eq!(
            ObstacleRegion::new(
                Shape::circle(pt(0.0, 0.0), 1.0).unwrap(),
                Permeability::Permeable(0.0)
            )
            .unwrap_err(),
            WorldError::InvalidPermeableCost(0.0)
        );
        assert!(World::new(pt(0.0, 0.0), pt(0.0, 1.0), vec![]).is_err());
        // Obstacle entirely outside the bounds is rejected.
        let far = ObstacleRegion::new(
            Shape::circle(pt(50.0, 50.0), 1.0).unwrap(),
            Permeability::Impermeable,
        )
        .unwrap();
        assert_eq!(
            World::new(pt(0.0, 0.0), pt(10.0, 10.0), vec![far]).unwrap_err(),
            WorldError::ObstacleOutsideBounds(0)
        );
    }

    proptest! {
        #[test]
        fn classify_consistent_with_distance(x in -20.0..20.0f64, y in -20.0..20.0f64) {
            let w = World::new(
                pt(-20.0, -20.0),
                pt(20.0, 20.0),
                vec![
                    ObstacleRegion::new(
                        Shape::circle(pt(3.0, 4.0), 2.5).unwrap(),
                        Permeability::Permeable(10.0),
                    )
                    .unwrap(),
                    ObstacleRegion::new(
                        Shape::rect(pt(-8.0, -8.0), pt(-2.0, -1.0)).unwrap(),
                        Permeability::Impermeable,
                    )
                    .unwrap(),
                ],
            )
            .unwrap();
            let p = pt(x, y);
            if w.classify_point(p) != PointClass::Free {
                let hit = w.obstacles().iter().any(|o| o.shape.distance_to(p) == 0.0);
                prop_assert!(hit);
            }
        }

        #[test]
        fn distance_satisfies_lipschitz_bound(
            px in -10.0..10.0f64, py in -10.0..10.0f64,
            qx in -10.0..10.0f64, qy in -10.0..10.0f64,
        ) {
            let shapes = [
                Shape::circle(pt(1.0, -2.0), 1.5).unwrap(),
                Shape::rect(pt(-3.0, 0.0), pt(2.0, 4.0)).unwrap(),
            ];
            let p = pt(px, py);
            let q = pt(qx, qy);
            for s in &shapes {
                let lhs = (s.distance_to(p) - s.distance_to(q)).abs();
                prop_assert!(lhs <= p.distance(q) + 1e-9);
            }
        }
    }
}
