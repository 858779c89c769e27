use super::Vec2;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Bounded curve pieces. Both are parametrized by t in [0, 1] at constant
/// speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Primitive {
    Segment { from: Vec2, to: Vec2 },
    /// Circular arc r = center + radius (cos theta, sin theta), theta running
    /// from `start` to `end` (clockwise when end < start).
    Arc { center: Vec2, radius: f64, start: f64, end: f64 },
}

impl Primitive {
    pub fn segment(from: Vec2, to: Vec2) -> Self {
        Primitive::Segment { from, to }
    }

    pub fn arc(center: Vec2, radius: f64, start: f64, end: f64) -> Self {
        Primitive::Arc { center, radius, start, end }
    }

    pub fn start_point(&self) -> Vec2 {
        Piece::Prim(*self).point(0.0)
    }

    pub fn end_point(&self) -> Vec2 {
        Piece::Prim(*self).point(1.0)
    }

    pub fn length(&self) -> f64 {
        match *self {
            Primitive::Segment { from, to } => (to - from).norm(),
            Primitive::Arc { radius, start, end, .. } => radius * (end - start).abs(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            Primitive::Segment { from, to } => {
                if !(from.z.is_finite() && from.x.is_finite() && to.z.is_finite() && to.x.is_finite()) {
                    return Err("segment has non-finite endpoints".into());
                }
                if (to - from).norm() == 0.0 {
                    return Err("segment has zero length".into());
                }
            }
            Primitive::Arc { center, radius, start, end } => {
                if !(center.z.is_finite() && center.x.is_finite() && start.is_finite() && end.is_finite()) {
                    return Err("arc has non-finite data".into());
                }
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(format!("arc radius must be positive, got {radius}"));
                }
                let sweep = (end - start).abs();
                if sweep == 0.0 || sweep > 2.0 * PI * (1.0 + 1e-14) {
                    return Err(format!("arc sweep must lie in (0, 2 pi], got {sweep}"));
                }
            }
        }
        Ok(())
    }

    /// True for a full circle.
    pub fn is_closed(&self) -> bool {
        match *self {
            Primitive::Arc { start, end, .. } => ((end - start).abs() - 2.0 * PI).abs() < 1e-12,
            Primitive::Segment { .. } => false,
        }
    }
}

/// A piece of an interface curve: a bounded primitive or one of the rays
/// along a semi-infinite waveguide. Rays are parametrized by arclength s from
/// `start`; a reversed ray is traversed from infinity toward `start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Prim(Primitive),
    Ray { start: Vec2, dir: Vec2, reversed: bool, siw: usize },
}

/// Closest point of a piece to a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Closest {
    pub t: f64,
    pub point: Vec2,
    pub dist: f64,
    /// Closest point is at t = 0 (Some(false)) or at the far end (Some(true)).
    pub endpoint: Option<bool>,
}

impl Piece {
    pub fn point(&self, t: f64) -> Vec2 {
        match *self {
            Piece::Prim(Primitive::Segment { from, to }) => from + (to - from) * t,
            Piece::Prim(Primitive::Arc { center, radius, start, end }) => {
                center + Vec2::from_angle(start + t * (end - start)) * radius
            }
            Piece::Ray { start, dir, .. } => start + dir * t,
        }
    }

    /// |dr/dt|.
    pub fn speed(&self) -> f64 {
        match *self {
            Piece::Prim(p) => p.length(),
            Piece::Ray { .. } => 1.0,
        }
    }

    /// Unit tangent in the direction of traversal.
    pub fn tangent(&self, t: f64) -> Vec2 {
        match *self {
            Piece::Prim(Primitive::Segment { from, to }) => (to - from).normalized(),
            Piece::Prim(Primitive::Arc { start, end, .. }) => {
                let th = start + t * (end - start);
                Vec2::from_angle(th).perp() * (end - start).signum()
            }
            Piece::Ray { dir, reversed, .. } => {
                if reversed {
                    -dir
                } else {
                    dir
                }
            }
        }
    }

    /// Unit normal to the left of the traversal direction.
    pub fn normal(&self, t: f64) -> Vec2 {
        self.tangent(t).perp()
    }

    pub fn is_ray(&self) -> bool {
        matches!(self, Piece::Ray { .. })
    }

    /// r(ta) - r(tb) together with its projections on the normals at ta and
    /// tb, computed without cancellation for nearby parameters.
    pub fn chord(&self, ta: f64, tb: f64) -> (Vec2, f64, f64) {
        self.chord_dt(ta, ta - tb)
    }

    /// As `chord` with tb = ta - dt, for differences too small to survive
    /// the subtraction.
    pub fn chord_dt(&self, ta: f64, dt: f64) -> (Vec2, f64, f64) {
        match *self {
            Piece::Prim(Primitive::Segment { from, to }) => ((to - from) * dt, 0.0, 0.0),
            Piece::Ray { dir, .. } => (dir * dt, 0.0, 0.0),
            Piece::Prim(Primitive::Arc { radius, start, end, .. }) => {
                let sweep = end - start;
                let half = 0.5 * dt * sweep;
                let mu = start + (ta - 0.5 * dt) * sweep;
                let sh = half.sin();
                let (sm, cm) = mu.sin_cos();
                let d = Vec2::new(-sm, cm) * (2.0 * radius * sh);
                let p = 2.0 * radius * sh * sh * sweep.signum();
                (d, -p, p)
            }
        }
    }

    pub fn closest(&self, r: Vec2) -> Closest {
        match *self {
            Piece::Prim(Primitive::Segment { from, to }) => {
                let e = to - from;
                let t = ((r - from).dot(e) / e.norm_sq()).clamp(0.0, 1.0);
                self.closest_at(r, t)
            }
            Piece::Ray { start, dir, .. } => {
                let t = (r - start).dot(dir).max(0.0);
                self.closest_at(r, t)
            }
            Piece::Prim(Primitive::Arc { center, start, end, .. }) => {
                let sweep = end - start;
                let v = r - center;
                if v.norm() == 0.0 {
                    return self.closest_at(r, 0.0);
                }
                let phi = v.angle();
                let two_pi = 2.0 * PI;
                let delta = if sweep > 0.0 {
                    (phi - start).rem_euclid(two_pi)
                } else {
                    -(start - phi).rem_euclid(two_pi)
                };
                let t = delta / sweep;
                if t <= 1.0 {
                    self.closest_at(r, t)
                } else {
                    let a = self.closest_at(r, 0.0);
                    let b = self.closest_at(r, 1.0);
                    if a.dist <= b.dist {
                        a
                    } else {
                        b
                    }
                }
            }
        }
    }

    fn closest_at(&self, r: Vec2, t: f64) -> Closest {
        let point = self.point(t);
        let endpoint = match self {
            Piece::Ray { .. } => (t == 0.0).then_some(false),
            Piece::Prim(_) => {
                if t <= 0.0 {
                    Some(false)
                } else if t >= 1.0 {
                    Some(true)
                } else {
                    None
                }
            }
        };
        Closest { t, point, dist: (r - point).norm(), endpoint }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_chord_matches_direct_difference() {
        let p = Piece::Prim(Primitive::arc(Vec2::new(1.0, -2.0), 1.5, 0.3, -2.0));
        for (ta, tb) in [(0.1, 0.7), (0.5, 0.5 + 1e-3), (0.9, 0.2)] {
            let (d, dna, dnb) = p.chord(ta, tb);
            let direct = p.point(ta) - p.point(tb);
            assert!((d - direct).norm() < 1e-14);
            assert!((dna - direct.dot(p.normal(ta))).abs() < 1e-14);
            assert!((dnb - direct.dot(p.normal(tb))).abs() < 1e-14);
        }
    }

    #[test]
    fn clockwise_arc_normal_points_outward() {
        let p = Piece::Prim(Primitive::arc(Vec2::ZERO, 2.0, 0.0, -2.0 * PI));
        let n = p.normal(0.25);
        let r = p.point(0.25);
        assert!((n - r * 0.5).norm() < 1e-14);
    }

    #[test]
    fn closest_on_arc_and_beyond_ends() {
        let p = Piece::Prim(Primitive::arc(Vec2::ZERO, 1.0, 0.0, PI / 2.0));
        let c = p.closest(Vec2::new(2.0, 2.0));
        assert!((c.t - 0.5).abs() < 1e-14);
        assert!((c.dist - (8f64.sqrt() - 1.0)).abs() < 1e-14);
        let c = p.closest(Vec2::new(1.0, -3.0));
        assert_eq!(c.endpoint, Some(false));
        let c = p.closest(Vec2::new(-3.0, 1.0));
        assert_eq!(c.endpoint, Some(true));
    }

    #[test]
    fn reversed_ray_tangent() {
        let p = Piece::Ray { start: Vec2::new(0.0, 1.0), dir: Vec2::new(-1.0, 0.0), reversed: true, siw: 0 };
        assert_eq!(p.tangent(3.0), Vec2::new(1.0, 0.0));
        assert_eq!(p.normal(3.0), Vec2::new(0.0, 1.0));
        let c = p.closest(Vec2::new(-4.0, 3.0));
        assert_eq!(c.t, 4.0);
    }
}
