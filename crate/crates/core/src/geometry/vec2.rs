use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// A point or vector in the (z, x) plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub z: f64,
    pub x: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { z: 0.0, x: 0.0 };

    pub const fn new(z: f64, x: f64) -> Self {
        Self { z, x }
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { z: c, x: s }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.z * o.z + self.x * o.x
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.z * o.x - self.x * o.z
    }

    pub fn norm(self) -> f64 {
        self.z.hypot(self.x)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.z / n, self.x / n)
    }

    /// Rotation by +90 degrees: the left normal of a tangent.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.x, self.z)
    }

    pub fn angle(self) -> f64 {
        self.x.atan2(self.z)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.z + o.z, self.x + o.x)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.z += o.z;
        self.x += o.x;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.z - o.z, self.x - o.x)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.z * s, self.x * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.z, -self.x)
    }
}
