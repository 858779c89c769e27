//! Scene description: regions, interface curves, semi-infinite waveguides
//! and the incident field.

mod primitive;
mod vec2;
pub mod discretize;

pub use primitive::{Closest, Piece, Primitive};
pub use vec2::Vec2;

use crate::error::{Error, Result};
use crate::modes::{Parity, SiwFrame, SlabSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    TE,
    TM,
}

impl std::str::FromStr for Polarization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TE" => Ok(Polarization::TE),
            "TM" => Ok(Polarization::TM),
            _ => Err(Error::Config(format!("unknown polarization '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: usize,
    #[serde(rename = "wavenumber", alias = "k")]
    pub k: f64,
    #[serde(default)]
    pub label: String,
}

/// Attachment of a curve to the ray at transverse side `side` (+1 or -1) of
/// waveguide `siw`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayEnd {
    pub siw: usize,
    pub side: i8,
}

/// Interface between regions `plus` < `minus`. The normal points into
/// `plus`, which lies to the left of the direction of traversal. A curve is
/// either closed (no rays) or runs from infinity along `head` to infinity
/// along `tail`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceCurve {
    pub plus: usize,
    pub minus: usize,
    #[serde(default)]
    pub head: Option<RayEnd>,
    #[serde(default, alias = "primitives")]
    pub body: Vec<Primitive>,
    #[serde(default)]
    pub tail: Option<RayEnd>,
}

/// Semi-infinite straight waveguide with core `core` and half-width
/// `half_width`, leaving the structure from `origin` along `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiwDescriptor {
    pub origin: Vec2,
    pub direction: Vec2,
    pub half_width: f64,
    pub core: usize,
}

impl SiwDescriptor {
    pub fn frame(&self) -> SiwFrame {
        SiwFrame { origin: self.origin, direction: self.direction.normalized() }
    }

    /// First point of the ray at transverse side `side`.
    pub fn ray_start(&self, side: i8) -> Vec2 {
        let f = self.frame();
        self.origin + f.perp() * (side as f64 * self.half_width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeTerm {
    pub parity: Parity,
    pub order: usize,
    pub amplitude: Complex64,
}

/// Gaussian superposition of plane waves
/// u = amplitude * int_{-pi/2}^{pi/2} exp(-coeff (alpha - center)^2)
///     exp(i k ((z - zf) cos alpha - (x - xf) sin alpha)) d alpha.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBeam {
    pub region: usize,
    pub focus: Vec2,
    pub center: f64,
    pub coeff: f64,
    pub amplitude: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Illumination {
    /// Guided modes travelling inward along waveguide `siw`.
    Mode { siw: usize, terms: Vec<ModeTerm> },
    Beam(GaussianBeam),
    /// exp(i k (z cos angle + x sin angle)) in `region`.
    PlaneWave { region: usize, angle: f64, amplitude: Complex64 },
}

/// Derived data for one waveguide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiwInfo {
    pub frame: SiwFrame,
    pub h: f64,
    pub core: usize,
    /// Cladding regions at x_loc > h (index 0) and x_loc < -h (index 1).
    pub cladding: [usize; 2],
    /// Member curves at sides +1 and -1.
    pub members: [usize; 2],
    pub spec: SlabSpec,
}

impl SiwInfo {
    pub fn cladding_at(&self, side: i8) -> usize {
        if side > 0 {
            self.cladding[0]
        } else {
            self.cladding[1]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    #[serde(default)]
    pub name: String,
    pub regions: Vec<Region>,
    pub curves: Vec<InterfaceCurve>,
    #[serde(default)]
    pub siws: Vec<SiwDescriptor>,
    pub polarization: Polarization,
    pub illumination: Illumination,
}

/// Result of locating a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Region(usize),
    /// Within the boundary tolerance of curve `curve`.
    Boundary { curve: usize },
}

/// Points closer than this to a curve are treated as on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-10;

impl InterfaceCurve {
    /// Pieces in order of traversal.
    pub fn pieces(&self, siws: &[SiwDescriptor]) -> Vec<Piece> {
        let mut out = Vec::with_capacity(self.body.len() + 2);
        if let Some(e) = self.head {
            let s = &siws[e.siw];
            out.push(Piece::Ray { start: s.ray_start(e.side), dir: s.direction.normalized(), reversed: true, siw: e.siw });
        }
        out.extend(self.body.iter().map(|p| Piece::Prim(*p)));
        if let Some(e) = self.tail {
            let s = &siws[e.siw];
            out.push(Piece::Ray { start: s.ray_start(e.side), dir: s.direction.normalized(), reversed: false, siw: e.siw });
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.head.is_none() && self.tail.is_none()
    }

    pub fn regions(&self) -> [usize; 2] {
        [self.plus, self.minus]
    }

    pub fn touches(&self, region: usize) -> bool {
        self.plus == region || self.minus == region
    }
}

/// Endpoint of a piece in traversal order.
fn piece_ends(p: &Piece) -> (Option<Vec2>, Option<Vec2>) {
    match p {
        Piece::Ray { start, reversed: true, .. } => (None, Some(*start)),
        Piece::Ray { start, reversed: false, .. } => (Some(*start), None),
        Piece::Prim(q) => (Some(q.start_point()), Some(q.end_point())),
    }
}

/// Traversal-order end parameter of a piece: (first t, last t).
fn piece_end_params(p: &Piece) -> (f64, f64) {
    match p {
        Piece::Ray { reversed: true, .. } => (f64::INFINITY, 0.0),
        Piece::Ray { reversed: false, .. } => (0.0, f64::INFINITY),
        Piece::Prim(_) => (0.0, 1.0),
    }
}

impl Scene {
    pub fn k(&self, region: usize) -> f64 {
        self.regions[region - 1].k
    }

    pub fn n_regions(&self) -> usize {
        self.regions.len()
    }

    /// Derivative weight nu_{jl} for the pair (plus, minus).
    pub fn nu(&self, plus: usize, minus: usize) -> f64 {
        match self.polarization {
            Polarization::TE => 1.0,
            Polarization::TM => (self.k(plus) / self.k(minus)).powi(2),
        }
    }

    pub fn curve_nu(&self, c: usize) -> f64 {
        let cv = &self.curves[c];
        self.nu(cv.plus, cv.minus)
    }

    /// Largest wavelength over all regions.
    pub fn max_wavelength(&self) -> f64 {
        self.regions.iter().map(|r| 2.0 * std::f64::consts::PI / r.k).fold(0.0, f64::max)
    }

    pub fn min_wavelength(&self) -> f64 {
        self.regions.iter().map(|r| 2.0 * std::f64::consts::PI / r.k).fold(f64::INFINITY, f64::min)
    }

    /// Characteristic length used for geometric tolerances.
    pub fn length_scale(&self) -> f64 {
        let mut m: f64 = 1.0;
        for c in &self.curves {
            for p in &c.body {
                for q in [p.start_point(), p.end_point()] {
                    m = m.max(q.z.abs()).max(q.x.abs());
                }
                if let Primitive::Arc { center, radius, .. } = p {
                    m = m.max(center.z.abs() + radius).max(center.x.abs() + radius);
                }
            }
        }
        for s in &self.siws {
            m = m.max(s.origin.z.abs()).max(s.origin.x.abs());
        }
        m
    }

    pub fn siw_info(&self, i: usize) -> Result<SiwInfo> {
        let s = self
            .siws
            .get(i)
            .ok_or_else(|| Error::Config(format!("waveguide {i} does not exist")))?;
        let frame = s.frame();
        let mut members = [usize::MAX; 2];
        let mut cladding = [0usize; 2];
        for (ci, c) in self.curves.iter().enumerate() {
            for end in [c.head, c.tail].into_iter().flatten() {
                if end.siw != i {
                    continue;
                }
                let slot = if end.side > 0 { 0 } else { 1 };
                if members[slot] != usize::MAX {
                    return Err(Error::Geometry(format!(
                        "waveguide {i} has more than one curve on side {}",
                        end.side
                    )));
                }
                members[slot] = ci;
                if !c.touches(s.core) {
                    return Err(Error::Geometry(format!(
                        "curve {ci} runs along waveguide {i} but does not bound its core region {}",
                        s.core
                    )));
                }
                cladding[slot] = if c.plus == s.core { c.minus } else { c.plus };
            }
        }
        if members.contains(&usize::MAX) {
            return Err(Error::Geometry(format!("waveguide {i} needs one curve on each side")));
        }
        let (k_co, k0, k1) = (self.k(s.core), self.k(cladding[0]), self.k(cladding[1]));
        if (k0 - k1).abs() > 1e-12 * k0 {
            return Err(Error::Config(format!(
                "waveguide {i} has different cladding wavenumbers {k0} and {k1}"
            )));
        }
        let spec = SlabSpec::new(k_co, k0, s.half_width, self.polarization)
            .map_err(|e| Error::Config(format!("waveguide {i}: {e}")))?;
        Ok(SiwInfo { frame, h: s.half_width, core: s.core, cladding, members, spec })
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.regions.len();
        if n < 2 {
            return Err(Error::Config("a scene needs at least two regions".into()));
        }
        for (i, r) in self.regions.iter().enumerate() {
            if r.id != i + 1 {
                return Err(Error::Config(format!("region ids must be 1..{n} in order, found {}", r.id)));
            }
            if !(r.k > 0.0 && r.k.is_finite()) {
                return Err(Error::Config(format!("region {} has invalid wavenumber {}", r.id, r.k)));
            }
        }
        if self.curves.is_empty() {
            return Err(Error::Config("a scene needs at least one curve".into()));
        }
        for (i, s) in self.siws.iter().enumerate() {
            let dn = s.direction.norm();
            if !(dn > 0.0 && dn.is_finite()) {
                return Err(Error::Config(format!("waveguide {i} has a degenerate direction")));
            }
            if !(s.half_width > 0.0 && s.half_width.is_finite()) {
                return Err(Error::Config(format!("waveguide {i} has invalid half-width")));
            }
            if s.core == 0 || s.core > n {
                return Err(Error::Config(format!("waveguide {i} names missing core region {}", s.core)));
            }
        }
        let tol = 1e-9 * self.length_scale();
        for (ci, c) in self.curves.iter().enumerate() {
            let err = |m: String| Error::Geometry(format!("curve {ci}: {m}"));
            if !(c.plus >= 1 && c.minus <= n && c.plus < c.minus) {
                return Err(err(format!(
                    "needs regions plus < minus within 1..{n}, got ({}, {})",
                    c.plus, c.minus
                )));
            }
            if c.head.is_some() != c.tail.is_some() {
                return Err(err("an open curve needs both a head and a tail ray".into()));
            }
            for e in [c.head, c.tail].into_iter().flatten() {
                if e.siw >= self.siws.len() {
                    return Err(err(format!("names missing waveguide {}", e.siw)));
                }
                if e.side != 1 && e.side != -1 {
                    return Err(err(format!("ray side must be +1 or -1, got {}", e.side)));
                }
            }
            if c.is_closed() && c.body.is_empty() {
                return Err(err("closed curve has no primitives".into()));
            }
            for (pi, p) in c.body.iter().enumerate() {
                p.validate().map_err(|m| err(format!("primitive {pi}: {m}")))?;
            }
            let pieces = c.pieces(&self.siws);
            for (pi, w) in pieces.windows(2).enumerate() {
                let (Some(a), Some(b)) = (piece_ends(&w[0]).1, piece_ends(&w[1]).0) else {
                    return Err(err("rays must be joined by primitives".into()));
                };
                if a.dist(b) > tol {
                    return Err(err(format!(
                        "pieces {pi} and {} are not connected ({:?} vs {:?})",
                        pi + 1,
                        a,
                        b
                    )));
                }
            }
            if c.is_closed() {
                let a = c.body.last().unwrap().end_point();
                let b = c.body[0].start_point();
                if a.dist(b) > tol {
                    return Err(err("closed curve does not return to its start".into()));
                }
            }
            // Plus side of a ray must match the core/cladding assignment.
            for (end, piece) in [(c.head, pieces.first()), (c.tail, pieces.last())] {
                let (Some(e), Some(p)) = (end, piece) else { continue };
                let s = &self.siws[e.siw];
                if !c.touches(s.core) {
                    return Err(err(format!("does not bound the core of waveguide {}", e.siw)));
                }
                let outward = s.frame().perp() * e.side as f64;
                let normal_out = p.normal(1.0).dot(outward) > 0.0;
                let plus_is_core = c.plus == s.core;
                if normal_out == plus_is_core {
                    return Err(err(format!(
                        "orientation along waveguide {} puts region {} on the wrong side",
                        e.siw, c.plus
                    )));
                }
            }
        }
        for i in 0..self.siws.len() {
            self.siw_info(i)?;
        }
        match &self.illumination {
            Illumination::Mode { siw, terms } => {
                if *siw >= self.siws.len() {
                    return Err(Error::Config(format!("illumination names missing waveguide {siw}")));
                }
                if terms.is_empty() {
                    return Err(Error::Config("mode illumination needs at least one term".into()));
                }
            }
            Illumination::Beam(b) => {
                if b.region == 0 || b.region > n {
                    return Err(Error::Config(format!("beam region {} does not exist", b.region)));
                }
                if !(b.coeff > 0.0) {
                    return Err(Error::Config("beam spectral width coefficient must be positive".into()));
                }
            }
            Illumination::PlaneWave { region, .. } => {
                if *region == 0 || *region > n {
                    return Err(Error::Config(format!("plane-wave region {region} does not exist")));
                }
            }
        }
        Ok(())
    }

    /// Corners of curve `c`: indices i such that pieces i and i+1 (cyclic
    /// for closed curves) meet at a nonzero angle.
    pub fn corners(&self, c: usize) -> Vec<usize> {
        let pieces = self.curves[c].pieces(&self.siws);
        let m = pieces.len();
        let closed = self.curves[c].is_closed();
        let count = if closed { m } else { m.saturating_sub(1) };
        let mut out = Vec::new();
        for i in 0..count {
            let a = &pieces[i];
            let b = &pieces[(i + 1) % m];
            let ta = a.tangent(piece_end_params(a).1.min(1e300));
            let tb = b.tangent(piece_end_params(b).0.min(1e300));
            let ang = ta.cross(tb).atan2(ta.dot(tb)).abs();
            if ang > 1e-8 {
                out.push(i);
            }
        }
        out
    }

    /// Region containing `r`, found from the nearest curve point.
    pub fn locate(&self, r: Vec2) -> Location {
        let mut best: Vec<(usize, Piece, Closest)> = Vec::new();
        let mut dmin = f64::INFINITY;
        for (ci, c) in self.curves.iter().enumerate() {
            for p in c.pieces(&self.siws) {
                let cl = p.closest(r);
                if cl.dist < dmin * (1.0 + 1e-9) + 1e-14 {
                    if cl.dist < dmin {
                        dmin = cl.dist;
                    }
                    best.push((ci, p, cl));
                }
            }
        }
        let cut = dmin * (1.0 + 1e-9) + 1e-14;
        best.retain(|b| b.2.dist <= cut);
        let (ci, p0, c0) = best[0];
        if c0.dist < BOUNDARY_TOL {
            return Location::Boundary { curve: ci };
        }
        // Sum the normals of every piece of this curve sharing the closest
        // point (pseudo-normal at vertices).
        let mut normal = Vec2::ZERO;
        for (cj, p, cl) in &best {
            if *cj == ci && cl.point.dist(c0.point) <= 1e-12 * (1.0 + c0.point.norm()) {
                normal += p.normal(cl.t);
            }
        }
        if normal.norm() == 0.0 {
            normal = p0.normal(c0.t);
        }
        let c = &self.curves[ci];
        if (r - c0.point).dot(normal) > 0.0 {
            Location::Region(c.plus)
        } else {
            Location::Region(c.minus)
        }
    }

    pub fn region_of(&self, r: Vec2) -> Option<usize> {
        match self.locate(r) {
            Location::Region(j) => Some(j),
            Location::Boundary { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn slab() -> Scene {
        let siws = vec![
            SiwDescriptor { origin: Vec2::new(-1.0, 0.0), direction: Vec2::new(-1.0, 0.0), half_width: 0.5, core: 2 },
            SiwDescriptor { origin: Vec2::new(1.0, 0.0), direction: Vec2::new(1.0, 0.0), half_width: 0.5, core: 2 },
        ];
        Scene {
            name: "slab".into(),
            regions: vec![
                Region { id: 1, k: PI, label: String::new() },
                Region { id: 2, k: 2.0 * PI, label: String::new() },
                Region { id: 3, k: PI, label: String::new() },
            ],
            curves: vec![
                InterfaceCurve {
                    plus: 1,
                    minus: 2,
                    head: Some(RayEnd { siw: 0, side: 1 }),
                    body: vec![Primitive::segment(Vec2::new(-1.0, 0.5), Vec2::new(1.0, 0.5))],
                    // The transverse axis of a guide pointing to +z is -x.
                    tail: Some(RayEnd { siw: 1, side: -1 }),
                },
                InterfaceCurve {
                    plus: 2,
                    minus: 3,
                    head: Some(RayEnd { siw: 0, side: -1 }),
                    body: vec![Primitive::segment(Vec2::new(-1.0, -0.5), Vec2::new(1.0, -0.5))],
                    tail: Some(RayEnd { siw: 1, side: 1 }),
                },
            ],
            siws,
            polarization: Polarization::TE,
            illumination: Illumination::Mode {
                siw: 0,
                terms: vec![ModeTerm { parity: Parity::Symmetric, order: 0, amplitude: Complex64::new(1.0, 0.0) }],
            },
        }
    }

    #[test]
    fn slab_validates_and_locates() {
        let s = slab();
        s.validate().unwrap();
        assert_eq!(s.region_of(Vec2::new(0.0, 2.0)), Some(1));
        assert_eq!(s.region_of(Vec2::new(-30.0, 0.1)), Some(2));
        assert_eq!(s.region_of(Vec2::new(50.0, -0.7)), Some(3));
        assert_eq!(s.locate(Vec2::new(0.3, 0.5)), Location::Boundary { curve: 0 });
        assert!(s.corners(0).is_empty());
        let info = s.siw_info(0).unwrap();
        assert_eq!(info.cladding, [1, 3]);
    }

    #[test]
    fn orientation_error_detected() {
        let mut s = slab();
        s.curves[0].plus = 2;
        s.curves[0].minus = 1;
        assert!(s.validate().is_err());
    }

    #[test]
    fn disconnected_curve_rejected() {
        let mut s = slab();
        s.curves[0].body = vec![Primitive::segment(Vec2::new(-1.0, 0.5), Vec2::new(0.9, 0.5))];
        assert!(matches!(s.validate(), Err(Error::Geometry(_))));
    }

    #[test]
    fn pseudo_normal_at_square_corner() {
        // Clockwise, so the left normal points out of the square.
        let sq = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, -1.0), Vec2::new(0.0, -1.0)];
        let body = (0..4).map(|i| Primitive::segment(sq[i], sq[(i + 1) % 4])).collect();
        let s = Scene {
            name: String::new(),
            regions: vec![Region { id: 1, k: 1.0, label: String::new() }, Region { id: 2, k: 2.0, label: String::new() }],
            curves: vec![InterfaceCurve { plus: 1, minus: 2, head: None, body, tail: None }],
            siws: vec![],
            polarization: Polarization::TE,
            illumination: Illumination::PlaneWave { region: 1, angle: 0.0, amplitude: Complex64::new(1.0, 0.0) },
        };
        s.validate().unwrap();
        assert_eq!(s.corners(0).len(), 4);
        assert_eq!(s.region_of(Vec2::new(0.5, -0.5)), Some(2));
        assert_eq!(s.region_of(Vec2::new(-0.1, 0.1)), Some(1));
        assert_eq!(s.region_of(Vec2::new(-0.1, 0.05)), Some(1));
        assert_eq!(s.region_of(Vec2::new(1.2, -1.3)), Some(1));
        assert_eq!(s.region_of(Vec2::new(0.9, -0.95)), Some(2));
    }
}
