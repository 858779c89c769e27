//! The benchmark scene library. Geometric details that only matter up to
//! smooth deformation (bend radii, fillets, obstacle offsets) are fixed here
//! and exposed through the scene files.

use crate::error::{Error, Result};
use crate::geometry::{
    GaussianBeam, Illumination, InterfaceCurve, ModeTerm, Polarization, Primitive, RayEnd, Region, Scene,
    SiwDescriptor, Vec2,
};
use crate::modes::Parity;
use num_complex::Complex64;
use std::f64::consts::PI;

pub const SCENE_NAMES: [&str; 7] = ["FLAT", "COUPLER", "BRANCH", "HORN", "DISK", "ILLUM", "LBEND"];

/// A scene with its default window size (in units of the largest
/// wavelength), its probe line and the unknown count reported for it.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedScene {
    pub scene: Scene,
    pub window_lambdas: f64,
    pub probe: Vec<Vec2>,
    pub reference_unknowns: usize,
    /// The total field equals the incident mode everywhere.
    pub exact_mode: bool,
}

pub fn named_scene(name: &str) -> Result<NamedScene> {
    let ns = match name.to_ascii_uppercase().as_str() {
        "FLAT" => flat(),
        "COUPLER" => coupler(),
        "BRANCH" => branch(),
        "HORN" => horn(),
        "DISK" => disk(),
        "ILLUM" => illum(),
        "LBEND" => lbend(),
        _ => {
            return Err(Error::Config(format!(
                "unknown scene '{name}', expected one of {}",
                SCENE_NAMES.join(", ")
            )))
        }
    };
    Ok(ns)
}

/// `n` equispaced points from `a` to `b`.
pub fn probe_line(a: Vec2, b: Vec2, n: usize) -> Vec<Vec2> {
    (0..n).map(|i| a + (b - a) * (i as f64 / (n - 1) as f64)).collect()
}

fn regions(ks: &[f64]) -> Vec<Region> {
    ks.iter().enumerate().map(|(i, &k)| Region { id: i + 1, k, label: String::new() }).collect()
}

fn curve(plus: usize, minus: usize, head: Option<(usize, i8)>, body: Vec<Primitive>, tail: Option<(usize, i8)>) -> InterfaceCurve {
    let end = |e: Option<(usize, i8)>| e.map(|(siw, side)| RayEnd { siw, side });
    InterfaceCurve { plus, minus, head: end(head), body, tail: end(tail) }
}

fn mode(siw: usize, parity: Parity) -> Illumination {
    Illumination::Mode { siw, terms: vec![ModeTerm { parity, order: 0, amplitude: Complex64::new(1.0, 0.0) }] }
}

fn siw(origin: Vec2, direction: Vec2, half_width: f64, core: usize) -> SiwDescriptor {
    SiwDescriptor { origin, direction, half_width, core }
}

/// Path builder of straight runs and circular turns. `offset` shifts the
/// traced curve by a fixed distance along the left normal of the path, so
/// the two walls of a bent guide come from one centerline.
#[derive(Debug, Clone)]
pub struct Turtle {
    pos: Vec2,
    heading: f64,
    offset: f64,
    prims: Vec<Primitive>,
}

impl Turtle {
    pub fn new(pos: Vec2, heading: f64, offset: f64) -> Self {
        Self { pos, heading, offset, prims: Vec::new() }
    }

    fn normal(&self) -> Vec2 {
        Vec2::from_angle(self.heading).perp()
    }

    /// Current point of the offset curve.
    pub fn point(&self) -> Vec2 {
        self.pos + self.normal() * self.offset
    }

    pub fn forward(mut self, len: f64) -> Self {
        let a = self.point();
        self.pos += Vec2::from_angle(self.heading) * len;
        self.prims.push(Primitive::segment(a, self.point()));
        self
    }

    /// Turn by `angle` (positive to the left) on a centerline radius.
    pub fn turn(mut self, radius: f64, angle: f64) -> Self {
        let s = angle.signum();
        let center = self.pos + self.normal() * (s * radius);
        let start = self.heading - s * PI / 2.0;
        let r = radius - s * self.offset;
        self.prims.push(Primitive::arc(center, r, start, start + angle));
        self.heading += angle;
        self.pos = center + Vec2::from_angle(start + angle) * radius;
        self
    }

    pub fn finish(self) -> Vec<Primitive> {
        self.prims
    }
}

/// Two half-planes separated by a straight slab of half-width 1/2.
fn flat() -> NamedScene {
    let scene = Scene {
        name: "FLAT".into(),
        regions: regions(&[PI, 2.0 * PI, PI]),
        curves: vec![curve(1, 2, Some((0, 1)), vec![], Some((1, -1))), curve(2, 3, Some((0, -1)), vec![], Some((1, 1)))],
        siws: vec![
            siw(Vec2::ZERO, Vec2::new(-1.0, 0.0), 0.5, 2),
            siw(Vec2::ZERO, Vec2::new(1.0, 0.0), 0.5, 2),
        ],
        polarization: Polarization::TE,
        illumination: mode(0, Parity::Symmetric),
    };
    let probe = probe_line(Vec2::new(0.0, -2.0), Vec2::new(0.0, 2.0), 100);
    NamedScene { scene, window_lambdas: 9.0, probe, reference_unknowns: 1752, exact_mode: true }
}

/// Coupler geometry: guide axes at |x| = COUPLER_OFFSET far from the
/// coupling section, S-bends of centerline radius COUPLER_RADIUS and a
/// straight coupling section of length COUPLER_LENGTH.
pub const COUPLER_OFFSET: f64 = 4.5;
pub const COUPLER_RADIUS: f64 = 10.0;
pub const COUPLER_LENGTH: f64 = 8.0;

/// Two guides brought within a gap of 0.2 by S-bends.
fn coupler() -> NamedScene {
    let h = 0.5;
    let gap = 0.2;
    let inner = h + gap / 2.0;
    let drop = COUPLER_OFFSET - inner;
    let theta = (1.0 - drop / (2.0 * COUPLER_RADIUS)).acos();
    let zs = COUPLER_LENGTH / 2.0 + 2.0 * COUPLER_RADIUS * theta.sin();
    // Top guide centerline from left to right; the bottom guide mirrors it.
    let path = |sign: f64, offset: f64| {
        Turtle::new(Vec2::new(-zs, sign * COUPLER_OFFSET), 0.0, offset)
            .turn(COUPLER_RADIUS, -sign * theta)
            .turn(COUPLER_RADIUS, sign * theta)
            .forward(COUPLER_LENGTH)
            .turn(COUPLER_RADIUS, sign * theta)
            .turn(COUPLER_RADIUS, -sign * theta)
            .finish()
    };
    let l = Vec2::new(-1.0, 0.0);
    let r = Vec2::new(1.0, 0.0);
    let scene = Scene {
        name: "COUPLER".into(),
        // Above, top core, between, bottom core, below.
        regions: regions(&[PI, 2.0 * PI, PI, 2.0 * PI, PI]),
        curves: vec![
            curve(1, 2, Some((0, 1)), path(1.0, h), Some((1, -1))),
            curve(2, 3, Some((0, -1)), path(1.0, -h), Some((1, 1))),
            curve(3, 4, Some((2, 1)), path(-1.0, h), Some((3, -1))),
            curve(4, 5, Some((2, -1)), path(-1.0, -h), Some((3, 1))),
        ],
        siws: vec![
            siw(Vec2::new(-zs, COUPLER_OFFSET), l, h, 2),
            siw(Vec2::new(zs, COUPLER_OFFSET), r, h, 2),
            siw(Vec2::new(-zs, -COUPLER_OFFSET), l, h, 4),
            siw(Vec2::new(zs, -COUPLER_OFFSET), r, h, 4),
        ],
        polarization: Polarization::TE,
        illumination: mode(0, Parity::Symmetric),
    };
    let z = zs + 1.0;
    let probe = probe_line(Vec2::new(z, -COUPLER_OFFSET - 1.5), Vec2::new(z, COUPLER_OFFSET + 1.5), 100);
    NamedScene { scene, window_lambdas: 12.0, probe, reference_unknowns: 6450, exact_mode: false }
}

/// Y-branch geometry: arms leave at +-BRANCH_ANGLE / 2 after wall bends of
/// radius BRANCH_BEND; the obstacle sits on the bisector of the crotch at
/// distance BRANCH_OBSTACLE_DIST from it.
pub const BRANCH_ANGLE: f64 = 5.0 * PI / 12.0;
pub const BRANCH_BEND: f64 = 3.0;
pub const BRANCH_OBSTACLE_DIST: f64 = 3.5;

fn line_intersection(p: Vec2, d: Vec2, q: Vec2, e: Vec2) -> (f64, f64) {
    let den = d.cross(e);
    let w = q - p;
    (w.cross(e) / den, w.cross(d) / den)
}

/// A wide guide splitting into a two-mode and a single-mode arm with a
/// circular obstacle between the arms.
fn branch() -> NamedScene {
    let (h0, ht, hb) = (1.0, 0.5, 0.25);
    let th = BRANCH_ANGLE / 2.0;
    let dt = Vec2::from_angle(th);
    let db = Vec2::from_angle(-th);
    let (nt, nb) = (dt.perp(), db.perp());
    // Outer walls bend away from the axis of the wide guide.
    let top = Turtle::new(Vec2::new(0.0, h0), 0.0, 0.0).turn(BRANCH_BEND, th);
    let bot = Turtle::new(Vec2::new(0.0, -h0), 0.0, 0.0).turn(BRANCH_BEND, -th);
    let (pt, pb) = (top.point(), bot.point());
    // Inner walls meet at the crotch p.
    let it = pt - nt * (2.0 * ht);
    let ib = pb + nb * (2.0 * hb);
    let (s, u) = line_intersection(it, dt, ib, db);
    let p = it + dt * s;
    // Arm origins sit level with the later of the two wall starts.
    let at = s.max(0.0);
    let ab = u.max(0.0);
    let ot = pt - nt * ht + dt * at;
    let ob = pb + nb * hb + db * ab;
    let mut upper = top.finish();
    if at > 0.0 {
        upper.push(Primitive::segment(pt, pt + dt * at));
    }
    let mut lower = bot.finish();
    if ab > 0.0 {
        lower.push(Primitive::segment(pb, pb + db * ab));
    }
    let mut crotch = Vec::new();
    if s < 0.0 {
        crotch.push(Primitive::segment(it, p));
    }
    if u < 0.0 {
        crotch.push(Primitive::segment(p, ib));
    }
    let center = p + Vec2::new(BRANCH_OBSTACLE_DIST, 0.0);
    let scene = Scene {
        name: "BRANCH".into(),
        // Above, between the arms, core, below, obstacle.
        regions: regions(&[PI, PI, 2.0 * PI, PI, 2.5 * PI]),
        curves: vec![
            curve(1, 3, Some((0, 1)), upper, Some((1, -1))),
            curve(2, 3, Some((1, 1)), crotch, Some((2, -1))),
            curve(3, 4, Some((0, -1)), lower, Some((2, 1))),
            curve(2, 5, None, vec![Primitive::arc(center, 1.0, PI, -PI)], None),
        ],
        siws: vec![
            siw(Vec2::ZERO, Vec2::new(-1.0, 0.0), h0, 3),
            siw(ot, dt, ht, 3),
            siw(ob, db, hb, 3),
        ],
        polarization: Polarization::TE,
        illumination: mode(0, Parity::Antisymmetric),
    };
    // Across the single-mode arm, one unit beyond its origin.
    let c = ob + db * 1.0;
    let probe = probe_line(c - nb * 1.5, c + nb * 1.5, 100);
    NamedScene { scene, window_lambdas: 14.0, probe, reference_unknowns: 5978, exact_mode: false }
}

/// Horn geometry: wall bend radius, flare angle and length, lip fillet
/// radius, and the gap between the aperture and the obstacle.
pub const HORN_BEND: f64 = 2.0;
pub const HORN_FLARE: f64 = PI / 6.0;
pub const HORN_FLARE_LENGTH: f64 = 3.0;
pub const HORN_LIP: f64 = 0.3;
pub const HORN_GAP: f64 = 1.5;

/// A guide ending in a flared horn that radiates toward a dielectric disk.
fn horn() -> NamedScene {
    let h = 0.5;
    let top = Turtle::new(Vec2::new(0.0, h), 0.0, 0.0)
        .turn(HORN_BEND, HORN_FLARE)
        .forward(HORN_FLARE_LENGTH)
        .turn(HORN_LIP, -(HORN_FLARE + PI / 2.0));
    let mouth = top.point();
    let wall = top
        .forward(2.0 * mouth.x)
        .turn(HORN_LIP, -(HORN_FLARE + PI / 2.0))
        .forward(HORN_FLARE_LENGTH)
        .turn(HORN_BEND, HORN_FLARE)
        .finish();
    let aperture = mouth.z + HORN_LIP;
    let radius = 2.0;
    let center = Vec2::new(aperture + HORN_GAP + radius, 0.0);
    let scene = Scene {
        name: "HORN".into(),
        regions: regions(&[4.0 * PI / 3.0, 2.0 * PI, 4.0 * PI]),
        curves: vec![
            curve(1, 2, Some((0, 1)), wall, Some((0, -1))),
            curve(1, 3, None, vec![Primitive::arc(center, radius, PI, -PI)], None),
        ],
        siws: vec![siw(Vec2::ZERO, Vec2::new(-1.0, 0.0), h, 2)],
        polarization: Polarization::TE,
        illumination: mode(0, Parity::Antisymmetric),
    };
    // Between the aperture and the obstacle.
    let z = aperture + HORN_GAP / 2.0;
    let probe = probe_line(Vec2::new(z, -3.0), Vec2::new(z, 3.0), 100);
    NamedScene { scene, window_lambdas: 15.0, probe, reference_unknowns: 2902, exact_mode: false }
}

/// Two straight guides of half-width 0.2 passing a disk of radius 5 at a
/// gap of 0.2.
fn disk() -> NamedScene {
    let h = 0.2;
    let radius = 5.0;
    let gap = 0.2;
    let c = radius + gap + h;
    let k_co = 250.0 * PI / 127.0;
    let k_cl = 125.0 * PI / 127.0;
    let l = Vec2::new(-1.0, 0.0);
    let r = Vec2::new(1.0, 0.0);
    let scene = Scene {
        name: "DISK".into(),
        // Above, top core, between, bottom core, below, disk.
        regions: regions(&[k_cl, k_co, k_cl, k_co, k_cl, k_co]),
        curves: vec![
            curve(1, 2, Some((0, 1)), vec![], Some((1, -1))),
            curve(2, 3, Some((0, -1)), vec![], Some((1, 1))),
            curve(3, 4, Some((2, 1)), vec![], Some((3, -1))),
            curve(4, 5, Some((2, -1)), vec![], Some((3, 1))),
            curve(3, 6, None, vec![Primitive::arc(Vec2::ZERO, radius, PI, -PI)], None),
        ],
        siws: vec![
            siw(Vec2::new(0.0, c), l, h, 2),
            siw(Vec2::new(0.0, c), r, h, 2),
            siw(Vec2::new(0.0, -c), l, h, 4),
            siw(Vec2::new(0.0, -c), r, h, 4),
        ],
        polarization: Polarization::TE,
        illumination: mode(0, Parity::Symmetric),
    };
    let probe = probe_line(Vec2::new(-3.0, -6.5), Vec2::new(-3.0, 6.5), 100);
    NamedScene { scene, window_lambdas: 16.0, probe, reference_unknowns: 6556, exact_mode: false }
}

/// A guide with a semicircular tip at the origin, excited by a Gaussian
/// beam focused on the tip.
fn illum() -> NamedScene {
    let h = 0.5;
    let scene = Scene {
        name: "ILLUM".into(),
        regions: regions(&[4.0 * PI / 3.0, 2.0 * PI]),
        curves: vec![curve(
            1,
            2,
            Some((0, 1)),
            vec![Primitive::arc(Vec2::ZERO, h, -PI / 2.0, -3.0 * PI / 2.0)],
            Some((0, -1)),
        )],
        siws: vec![siw(Vec2::ZERO, Vec2::new(1.0, 0.0), h, 2)],
        polarization: Polarization::TE,
        illumination: Illumination::Beam(GaussianBeam {
            region: 1,
            focus: Vec2::ZERO,
            center: -PI / 10.0,
            coeff: 12.5,
            amplitude: Complex64::new(1.0, 0.0),
        }),
    };
    let probe = probe_line(Vec2::new(3.0, -2.0), Vec2::new(3.0, 2.0), 100);
    NamedScene { scene, window_lambdas: 15.0, probe, reference_unknowns: 1374, exact_mode: false }
}

/// A guide turning through a sharp right angle.
fn lbend() -> NamedScene {
    let h = 0.5;
    let scene = Scene {
        name: "LBEND".into(),
        // Inside the bend, core, outside the bend.
        regions: regions(&[2.0 * PI / 3.0, 2.0 * PI, 2.0 * PI / 3.0]),
        curves: vec![
            curve(1, 2, Some((0, 1)), vec![], Some((1, -1))),
            curve(
                2,
                3,
                Some((0, -1)),
                vec![
                    Primitive::segment(Vec2::new(-h, -h), Vec2::new(h, -h)),
                    Primitive::segment(Vec2::new(h, -h), Vec2::new(h, h)),
                ],
                Some((1, 1)),
            ),
        ],
        siws: vec![
            siw(Vec2::new(-h, 0.0), Vec2::new(-1.0, 0.0), h, 2),
            siw(Vec2::new(0.0, h), Vec2::new(0.0, 1.0), h, 2),
        ],
        polarization: Polarization::TM,
        illumination: mode(0, Parity::Antisymmetric),
    };
    let probe = probe_line(Vec2::new(-2.0, 2.0), Vec2::new(2.0, 2.0), 100);
    NamedScene { scene, window_lambdas: 12.0, probe, reference_unknowns: 2516, exact_mode: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_scenes_validate() {
        for name in SCENE_NAMES {
            let ns = named_scene(name).unwrap();
            ns.scene.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(ns.probe.len(), 100);
            for p in &ns.probe {
                assert!(ns.scene.region_of(*p).is_some(), "{name}: probe point {p:?} on an interface");
            }
        }
    }

    #[test]
    fn turtle_offsets_are_concentric() {
        let c = Turtle::new(Vec2::ZERO, 0.0, 0.0).turn(2.0, 1.0).forward(1.0).finish();
        let o = Turtle::new(Vec2::ZERO, 0.0, 0.5).turn(2.0, 1.0).forward(1.0).finish();
        match (c[0], o[0]) {
            (Primitive::Arc { center: a, radius: ra, .. }, Primitive::Arc { center: b, radius: rb, .. }) => {
                assert!(a.dist(b) < 1e-15);
                assert!((ra - rb - 0.5).abs() < 1e-15);
            }
            _ => panic!("expected arcs"),
        }
        assert!(c[0].end_point().dist(c[1].start_point()) < 1e-14);
        assert!((o[1].start_point() - c[1].start_point()).norm() - 0.5 < 1e-14);
    }

    #[test]
    fn branch_lower_arm_is_single_mode() {
        let s = named_scene("BRANCH").unwrap().scene;
        assert_eq!(crate::modes::find_modes(&s.siw_info(2).unwrap().spec).len(), 1);
        assert!(crate::modes::find_modes(&s.siw_info(0).unwrap().spec).len() >= 2);
    }
}
