//! Planar geometry primitives shared by collision, occlusion and rasterization.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Closed axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    pub fn centered(center: Point2, half_x: f64, half_y: f64) -> Self {
        Self {
            min: Point2::new(center.x - half_x, center.y - half_y),
            max: Point2::new(center.x + half_x, center.y + half_y),
        }
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    fn corners(&self) -> [Point2; 4] {
        [
            self.min,
            Point2::new(self.max.x, self.min.y),
            self.max,
            Point2::new(self.min.x, self.max.y),
        ]
    }
}

pub fn point_rect_distance(p: Point2, r: &Rect) -> f64 {
    let dx = (r.min.x - p.x).max(0.0).max(p.x - r.max.x);
    let dy = (r.min.y - p.y).max(0.0).max(p.y - r.max.y);
    dx.hypot(dy)
}

pub fn rect_rect_distance(a: &Rect, b: &Rect) -> f64 {
    let dx = (b.min.x - a.max.x).max(a.min.x - b.max.x).max(0.0);
    let dy = (b.min.y - a.max.y).max(a.min.y - b.max.y).max(0.0);
    dx.hypot(dy)
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let (vx, vy) = (b.x - a.x, b.y - a.y);
    let len2 = vx * vx + vy * vy;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * vx + (p.y - a.y) * vy) / len2).clamp(0.0, 1.0);
    p.distance(Point2::new(a.x + t * vx, a.y + t * vy))
}

/// Slab test: does the closed segment `a`-`b` touch the closed rectangle?
pub fn segment_intersects_rect(a: Point2, b: Point2, r: &Rect) -> bool {
    let mut t0 = 0.0_f64;
    let mut t1 = 1.0_f64;
    let d = [b.x - a.x, b.y - a.y];
    let origin = [a.x, a.y];
    let lo = [r.min.x, r.min.y];
    let hi = [r.max.x, r.max.y];
    for axis in 0..2 {
        if d[axis] == 0.0 {
            if origin[axis] < lo[axis] || origin[axis] > hi[axis] {
                return false;
            }
            continue;
        }
        let inv = 1.0 / d[axis];
        let mut near = (lo[axis] - origin[axis]) * inv;
        let mut far = (hi[axis] - origin[axis]) * inv;
        if near > far {
            std::mem::swap(&mut near, &mut far);
        }
        t0 = t0.max(near);
        t1 = t1.min(far);
        if t0 > t1 {
            return false;
        }
    }
    true
}

/// Minimum distance between a segment and a rectangle (zero when they touch).
pub fn segment_rect_distance(a: Point2, b: Point2, r: &Rect) -> f64 {
    if segment_intersects_rect(a, b, r) {
        return 0.0;
    }
    let endpoint = point_rect_distance(a, r).min(point_rect_distance(b, r));
    r.corners()
        .iter()
        .map(|&c| point_segment_distance(c, a, b))
        .fold(endpoint, f64::min)
}

/// Exact sine/cosine for the four axis headings, libm elsewhere.
pub fn sin_cos_deg(deg: f64) -> (f64, f64) {
    if deg == 0.0 {
        (0.0, 1.0)
    } else if deg == 90.0 {
        (1.0, 0.0)
    } else if deg == -90.0 {
        (-1.0, 0.0)
    } else if deg == 180.0 || deg == -180.0 {
        (0.0, -1.0)
    } else {
        deg.to_radians().sin_cos()
    }
}
