//! Window truncation of the interface curves and their discretization into
//! Gauss-Legendre panels with geometric refinement toward corners.

use super::{Piece, Primitive, Scene, SiwInfo, Vec2};
use crate::error::{Error, Result};
use crate::modes::{select_mode, Branch, Mode};
use crate::quad::{Barycentric, GaussLegendre};
use crate::geometry::Illumination;
use crate::window::WindowParams;

/// One finite piece of a truncated curve. Parameters run over [t0, t1]; rays
/// use arclength from the ray start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncPiece {
    pub curve: usize,
    pub piece: Piece,
    pub t0: f64,
    pub t1: f64,
    /// Waveguide and side for rays.
    pub ray: Option<(usize, i8)>,
    /// Corner at the parameter end t0 / t1.
    pub corner_lo: bool,
    pub corner_hi: bool,
    /// Arclength position of the traversal start of this piece along its
    /// truncated curve.
    pub arc_start: f64,
}

impl TruncPiece {
    pub fn length(&self) -> f64 {
        self.piece.speed() * (self.t1 - self.t0)
    }

    /// Arclength coordinate along the truncated curve of parameter t.
    pub fn arc_of(&self, t: f64) -> f64 {
        let sp = self.piece.speed();
        match self.piece {
            Piece::Ray { reversed: true, .. } => self.arc_start + sp * (self.t1 - t),
            _ => self.arc_start + sp * (t - self.t0),
        }
    }
}

/// Transverse cross-section of one region at the far end of the window on
/// the illuminated waveguide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerpSegment {
    pub region: usize,
    pub a: Vec2,
    pub b: Vec2,
    /// Local transverse coordinates of `a` and `b`.
    pub x0: f64,
    pub x1: f64,
    pub branch: Branch,
}

/// Incident-field data for the illuminated waveguide.
#[derive(Debug, Clone, PartialEq)]
pub struct IlluminatedSiw {
    pub siw: usize,
    pub info: SiwInfo,
    pub modes: Vec<(Mode, num_complex::Complex64)>,
    pub perp: Vec<PerpSegment>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedBoundary {
    pub pieces: Vec<TruncPiece>,
    /// Range of `pieces` belonging to each curve.
    pub curve_pieces: Vec<std::ops::Range<usize>>,
    pub window: WindowParams,
    pub illuminated: Option<IlluminatedSiw>,
    /// Shared endpoints of consecutive pieces: (piece a, t on a, piece b,
    /// t on b).
    pub junctions: Vec<(usize, f64, usize, f64)>,
}

impl TruncatedBoundary {
    /// Parameters of the point shared by two pieces, if any.
    pub fn junction(&self, a: usize, b: usize) -> Option<(f64, f64)> {
        self.junctions.iter().find_map(|&(pa, ta, pb, tb)| {
            if pa == a && pb == b {
                Some((ta, tb))
            } else if pa == b && pb == a {
                Some((tb, ta))
            } else {
                None
            }
        })
    }
}

/// Transverse extent beyond the core used to cut the cross-section
/// segments, 16 ln(10) / gamma_cl.
pub fn perp_extent(gamma_cl_min: f64) -> f64 {
    16.0 * std::f64::consts::LN_10 / gamma_cl_min
}

/// Cuts every ray at s = A and, for mode illumination, builds the transverse
/// cross-sections at z_loc = -A.
pub fn truncate_boundary(scene: &Scene, window: WindowParams) -> Result<TruncatedBoundary> {
    scene.validate()?;
    let a = window.a;
    let infos: Vec<SiwInfo> = (0..scene.siws.len()).map(|i| scene.siw_info(i)).collect::<Result<_>>()?;
    check_plateau(scene, &infos, &window)?;

    let mut pieces = Vec::new();
    let mut curve_pieces = Vec::new();
    let mut junctions = Vec::new();
    for (ci, c) in scene.curves.iter().enumerate() {
        let first = pieces.len();
        let ps = c.pieces(&scene.siws);
        let corners = scene.corners(ci);
        let m = ps.len();
        let closed = c.is_closed();
        let mut arc = 0.0;
        for (pi, p) in ps.iter().enumerate() {
            // Corners at the traversal start / end of this piece.
            let at_start = if pi > 0 { corners.contains(&(pi - 1)) } else { closed && corners.contains(&(m - 1)) };
            let at_end = corners.contains(&pi);
            let (t0, t1, ray, lo, hi) = match *p {
                Piece::Ray { reversed, siw, .. } => {
                    let side = if reversed { c.head.unwrap().side } else { c.tail.unwrap().side };
                    let corner = if reversed { at_end } else { at_start };
                    (0.0, a, Some((siw, side)), corner, false)
                }
                Piece::Prim(_) => (0.0, 1.0, None, at_start, at_end),
            };
            let tp = TruncPiece { curve: ci, piece: *p, t0, t1, ray, corner_lo: lo, corner_hi: hi, arc_start: arc };
            arc += tp.length();
            pieces.push(tp);
        }
        let end_t = |p: &Piece| if matches!(p, Piece::Ray { reversed: true, .. }) { 0.0 } else { 1.0 };
        for k in 1..m {
            junctions.push((first + k - 1, end_t(&ps[k - 1]), first + k, 0.0));
        }
        if closed && m > 1 {
            junctions.push((first + m - 1, 1.0, first, 0.0));
        }
        curve_pieces.push(first..pieces.len());
    }

    let illuminated = match &scene.illumination {
        Illumination::Mode { siw, terms } => {
            let info = infos[*siw];
            let mut modes = Vec::new();
            for t in terms {
                modes.push((select_mode(&info.spec, t.parity, t.order)?, t.amplitude));
            }
            let gmin = modes.iter().map(|m| m.0.gamma_cl).fold(f64::INFINITY, f64::min);
            let ext = perp_extent(gmin);
            let h = info.h;
            let f = info.frame;
            let seg = |region, x0: f64, x1: f64, branch| PerpSegment {
                region,
                a: f.to_global(-a, x0),
                b: f.to_global(-a, x1),
                x0,
                x1,
                branch,
            };
            let perp = vec![
                seg(info.cladding[0], h, h + ext, Branch::Cladding),
                seg(info.core, -h, h, Branch::Core),
                seg(info.cladding[1], -h - ext, -h, Branch::Cladding),
            ];
            let ill = IlluminatedSiw { siw: *siw, info, modes, perp };
            check_perp_crossings(scene, &ill, &pieces)?;
            Some(ill)
        }
        _ => None,
    };
    Ok(TruncatedBoundary { pieces, curve_pieces, window, illuminated, junctions })
}

/// Bounded features must stay clear of every waveguide's window rise zone.
fn check_plateau(scene: &Scene, infos: &[SiwInfo], window: &WindowParams) -> Result<()> {
    let z_rise = -window.plateau();
    for (si, info) in infos.iter().enumerate() {
        let reach = 2.0 * info.h;
        for (ci, c) in scene.curves.iter().enumerate() {
            for (pi, p) in c.body.iter().enumerate() {
                let piece = Piece::Prim(*p);
                for k in 0..=64 {
                    let r = piece.point(k as f64 / 64.0);
                    let (z, x) = info.frame.to_local(r);
                    if z < z_rise && x.abs() < reach {
                        return Err(Error::Config(format!(
                            "curve {ci} primitive {pi} reaches the window rise zone of waveguide {si} \
                             (z_loc = {z:.3} beyond the plateau edge {z_rise:.3}); increase the window size"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_perp_crossings(scene: &Scene, ill: &IlluminatedSiw, pieces: &[TruncPiece]) -> Result<()> {
    let far = 1e3 * (scene.length_scale() + ill.perp.iter().map(|s| s.a.norm() + s.b.norm()).sum::<f64>());
    for seg in &ill.perp {
        for tp in pieces {
            if let Some((siw, _)) = tp.ray {
                if siw == ill.siw {
                    continue;
                }
            }
            let hit = match tp.piece {
                Piece::Ray { start, dir, .. } => segments_cross(seg.a, seg.b, start, start + dir * far),
                Piece::Prim(Primitive::Segment { from, to }) => segments_cross(seg.a, seg.b, from, to),
                Piece::Prim(Primitive::Arc { center, radius, start, end }) => {
                    segment_hits_arc(seg.a, seg.b, center, radius, start, end)
                }
            };
            if hit {
                return Err(Error::Config(format!(
                    "curve {} crosses the cross-section of region {} at the window end of waveguide {}; \
                     move the structure or change the window size",
                    tp.curve, seg.region, ill.siw
                )));
            }
        }
    }
    Ok(())
}

fn segments_cross(p0: Vec2, p1: Vec2, q0: Vec2, q1: Vec2) -> bool {
    let r = p1 - p0;
    let s = q1 - q0;
    let den = r.cross(s);
    if den == 0.0 {
        return false;
    }
    let t = (q0 - p0).cross(s) / den;
    let u = (q0 - p0).cross(r) / den;
    (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)
}

fn segment_hits_arc(p0: Vec2, p1: Vec2, c: Vec2, radius: f64, start: f64, end: f64) -> bool {
    let d = p1 - p0;
    let f = p0 - c;
    let a = d.norm_sq();
    let b = 2.0 * f.dot(d);
    let cc = f.norm_sq() - radius * radius;
    let disc = b * b - 4.0 * a * cc;
    if disc < 0.0 {
        return false;
    }
    let sq = disc.sqrt();
    let arc = Piece::Prim(Primitive::Arc { center: c, radius, start, end });
    for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
        if (0.0..=1.0).contains(&t) {
            let q = p0 + d * t;
            if arc.closest(q).dist < 1e-12 * (1.0 + radius) {
                return true;
            }
        }
    }
    false
}

/// Discretization controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretizationParams {
    /// Mean nodes per minimum wavelength.
    pub ppw: f64,
    /// Nodes per panel.
    pub order: usize,
    /// Number of geometric refinement levels toward a corner.
    pub corner_levels: usize,
    /// Length ratio between successive refinement levels.
    pub corner_ratio: f64,
    /// Exponent of the graded map on the panel touching a corner.
    pub grading: f64,
}

impl Default for DiscretizationParams {
    fn default() -> Self {
        Self { ppw: 10.0, order: 16, corner_levels: 6, corner_ratio: 0.2, grading: 3.0 }
    }
}

impl DiscretizationParams {
    pub fn with_ppw(ppw: f64) -> Self {
        Self { ppw, ..Self::default() }
    }
}

/// Map from the reference interval u in [-1, 1] to a piece parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PanelMap {
    Linear { t0: f64, t1: f64 },
    /// t = tc + (tf - tc) ((u + 1) / 2)^q, concentrating nodes at tc.
    Graded { tc: f64, tf: f64, q: f64 },
}

impl PanelMap {
    pub fn t(&self, u: f64) -> f64 {
        match *self {
            PanelMap::Linear { t0, t1 } => 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * u,
            PanelMap::Graded { tc, tf, q } => tc + (tf - tc) * (0.5 * (u + 1.0)).powf(q),
        }
    }

    /// |dt/du|.
    pub fn dt_du(&self, u: f64) -> f64 {
        match *self {
            PanelMap::Linear { t0, t1 } => 0.5 * (t1 - t0).abs(),
            PanelMap::Graded { tc, tf, q } => 0.5 * q * (tf - tc).abs() * (0.5 * (u + 1.0)).powf(q - 1.0),
        }
    }

    /// t(u + s) - t(u) without cancellation for small s.
    pub fn delta(&self, u: f64, s: f64) -> f64 {
        match *self {
            PanelMap::Linear { t0, t1 } => 0.5 * (t1 - t0) * s,
            PanelMap::Graded { tc, tf, q } => {
                let a = 0.5 * (u + 1.0);
                let b = 0.5 * s;
                (tf - tc) * a.powf(q) * (q * (b / a).ln_1p()).exp_m1()
            }
        }
    }

    /// t(u) - t_ref, exact for graded maps referenced to their corner
    /// where t(u) itself may round onto the corner.
    pub fn offset(&self, u: f64, t_ref: f64) -> f64 {
        match *self {
            PanelMap::Graded { tc, tf, q } if tc == t_ref => (tf - tc) * (0.5 * (u + 1.0)).powf(q),
            _ => self.t(u) - t_ref,
        }
    }

    pub fn param_range(&self) -> (f64, f64) {
        let (a, b) = (self.t(-1.0), self.t(1.0));
        (a.min(b), a.max(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub curve: usize,
    /// Index into `TruncatedBoundary::pieces`.
    pub piece: usize,
    pub map: PanelMap,
    pub first: usize,
    pub len: usize,
    pub length: f64,
    pub center: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub pos: Vec2,
    pub normal: Vec2,
    pub tangent: Vec2,
    pub curvature: f64,
    /// Arclength quadrature weight.
    pub weight: f64,
    /// |dr/du| at the node.
    pub jac: f64,
    pub u: f64,
    /// Piece parameter.
    pub t: f64,
    /// Arclength coordinate along the truncated curve.
    pub arc: f64,
    pub window: f64,
    pub curve: usize,
    pub panel: usize,
}

#[derive(Debug, Clone)]
pub struct DiscreteBoundary {
    pub truncated: TruncatedBoundary,
    pub panels: Vec<Panel>,
    pub nodes: Vec<Node>,
    pub curve_nodes: Vec<std::ops::Range<usize>>,
    pub params: DiscretizationParams,
    pub rule: GaussLegendre,
    pub interp: Barycentric,
}

impl DiscreteBoundary {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn piece(&self, panel: &Panel) -> &TruncPiece {
        &self.truncated.pieces[panel.piece]
    }

    /// Position, unit normal and |dr/du| at reference point u of a panel.
    pub fn eval(&self, panel: &Panel, u: f64) -> (Vec2, Vec2, f64) {
        let tp = &self.truncated.pieces[panel.piece];
        let t = panel.map.t(u);
        (tp.piece.point(t), tp.piece.normal(t), tp.piece.speed() * panel.map.dt_du(u))
    }

    /// Nodes whose window value is nonzero on the illuminated waveguide's
    /// rays, the support of the incident traces.
    pub fn incident_nodes(&self) -> Vec<usize> {
        let Some(ill) = &self.truncated.illuminated else { return Vec::new() };
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| {
                let tp = &self.truncated.pieces[self.panels[n.panel].piece];
                matches!(tp.ray, Some((s, _)) if s == ill.siw)
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// Largest angle subtended by one panel on an arc.
const MAX_PANEL_SWEEP: f64 = std::f64::consts::FRAC_PI_3;

/// Breakpoints of a piece in parameter space, with geometric refinement at
/// corner ends.
fn piece_maps(tp: &TruncPiece, panel_len: f64, prm: &DiscretizationParams) -> Vec<PanelMap> {
    let sp = tp.piece.speed();
    let mut breaks: Vec<f64> = Vec::new();
    if tp.ray.is_some() {
        // Fixed grid from the ray start, independent of the window size.
        let step = panel_len / sp;
        let mut k = 0usize;
        loop {
            let b = k as f64 * step;
            if b >= tp.t1 {
                break;
            }
            breaks.push(b);
            k += 1;
        }
        if breaks.len() > 1 && tp.t1 - breaks[breaks.len() - 1] < 0.3 * step {
            breaks.pop();
        }
        breaks.push(tp.t1);
    } else {
        let mut n = ((tp.length() / panel_len).ceil() as usize).max(1);
        if let Piece::Prim(Primitive::Arc { start, end, .. }) = tp.piece {
            n = n.max(((end - start).abs() / MAX_PANEL_SWEEP).ceil() as usize);
        }
        for k in 0..=n {
            breaks.push(tp.t0 + (tp.t1 - tp.t0) * k as f64 / n as f64);
        }
    }
    let mut maps: Vec<PanelMap> = breaks.windows(2).map(|w| PanelMap::Linear { t0: w[0], t1: w[1] }).collect();
    if tp.corner_lo && tp.corner_hi && maps.len() == 1 {
        let mid = 0.5 * (tp.t0 + tp.t1);
        maps = vec![PanelMap::Linear { t0: tp.t0, t1: mid }, PanelMap::Linear { t0: mid, t1: tp.t1 }];
    }
    let levels = prm.corner_levels;
    let ratio = prm.corner_ratio;
    let refine = |t_corner: f64, t_far: f64| -> Vec<PanelMap> {
        // Ordered from the corner outward.
        let mut out = Vec::new();
        let len = t_far - t_corner;
        let mut inner = t_corner + len * ratio.powi(levels as i32);
        out.push(PanelMap::Graded { tc: t_corner, tf: inner, q: prm.grading });
        for k in (0..levels).rev() {
            let outer = t_corner + len * ratio.powi(k as i32);
            let (a, b) = if len > 0.0 { (inner, outer) } else { (outer, inner) };
            out.push(PanelMap::Linear { t0: a, t1: b });
            inner = outer;
        }
        out
    };
    if tp.corner_hi {
        let last = maps.pop().unwrap();
        let PanelMap::Linear { t0, t1 } = last else { unreachable!() };
        let mut r = refine(t1, t0);
        r.reverse();
        maps.extend(r);
    }
    if tp.corner_lo {
        let first = maps.remove(0);
        let PanelMap::Linear { t0, t1 } = first else { unreachable!() };
        let r = refine(t0, t1);
        maps.splice(0..0, r);
    }
    maps
}

/// Discretizes the truncated curves with panels of `order` Gauss-Legendre
/// nodes, sized for `ppw` nodes per `min_wavelength` on average.
pub fn discretize(tb: &TruncatedBoundary, prm: &DiscretizationParams, min_wavelength: f64) -> Result<DiscreteBoundary> {
    if !(prm.ppw >= 4.0) {
        return Err(Error::Config(format!("points per wavelength must be at least 4, got {}", prm.ppw)));
    }
    if prm.order < 4 || prm.order > 40 {
        return Err(Error::Config(format!("panel order must lie in 4..=40, got {}", prm.order)));
    }
    if !(min_wavelength > 0.0) {
        return Err(Error::Config("minimum wavelength must be positive".into()));
    }
    let p = prm.order;
    let rule = GaussLegendre::new(p);
    let interp = Barycentric::new(&rule.nodes);
    let panel_len = p as f64 * min_wavelength / prm.ppw;
    let mut panels = Vec::new();
    let mut nodes = Vec::new();
    let mut curve_nodes = Vec::new();
    for range in &tb.curve_pieces {
        let first_node = nodes.len();
        for pi in range.clone() {
            let tp = &tb.pieces[pi];
            if tp.length() <= 0.0 {
                return Err(Error::Geometry(format!("curve {} has a degenerate piece", tp.curve)));
            }
            let mut maps = piece_maps(tp, panel_len, prm);
            if matches!(tp.piece, Piece::Ray { reversed: true, .. }) {
                maps.reverse();
            }
            for map in maps {
                let pidx = panels.len();
                let first = nodes.len();
                for (k, &u) in rule.nodes.iter().enumerate() {
                    let t = map.t(u);
                    let jac = tp.piece.speed() * map.dt_du(u);
                    let tangent = tp.piece.tangent(t);
                    let curvature = match tp.piece {
                        Piece::Prim(Primitive::Arc { radius, start, end, .. }) => (end - start).signum() / radius,
                        _ => 0.0,
                    };
                    let window = match tp.ray {
                        Some(_) => tb.window.value(t),
                        None => 1.0,
                    };
                    nodes.push(Node {
                        pos: tp.piece.point(t),
                        normal: tangent.perp(),
                        tangent,
                        curvature,
                        weight: jac * rule.weights[k],
                        jac,
                        u,
                        t,
                        arc: tp.arc_of(t),
                        window,
                        curve: tp.curve,
                        panel: pidx,
                    });
                }
                let (lo, hi) = map.param_range();
                let length = tp.piece.speed() * (hi - lo);
                panels.push(Panel {
                    curve: tp.curve,
                    piece: pi,
                    map,
                    first,
                    len: p,
                    length,
                    center: tp.piece.point(map.t(0.0)),
                });
            }
        }
        curve_nodes.push(first_node..nodes.len());
    }
    Ok(DiscreteBoundary { truncated: tb.clone(), panels, nodes, curve_nodes, params: *prm, rule, interp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{InterfaceCurve, Polarization, Region};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn circle_scene(radius: f64, k_out: f64, k_in: f64) -> Scene {
        Scene {
            name: "circle".into(),
            regions: vec![
                Region { id: 1, k: k_out, label: String::new() },
                Region { id: 2, k: k_in, label: String::new() },
            ],
            curves: vec![InterfaceCurve {
                plus: 1,
                minus: 2,
                head: None,
                body: vec![Primitive::arc(Vec2::ZERO, radius, 0.0, -2.0 * PI)],
                tail: None,
            }],
            siws: vec![],
            polarization: Polarization::TE,
            illumination: Illumination::PlaneWave { region: 1, angle: 0.0, amplitude: Complex64::new(1.0, 0.0) },
        }
    }

    #[test]
    fn circle_node_count_weights_and_orientation() {
        let s = circle_scene(2.0, 4.0 * PI, 4.0 * PI);
        let tb = truncate_boundary(&s, WindowParams::new(1.0, 0.5).unwrap()).unwrap();
        assert!(tb.illuminated.is_none());
        let db = discretize(&tb, &DiscretizationParams::with_ppw(10.0), 0.5).unwrap();
        assert!(db.n_nodes() >= 252, "{}", db.n_nodes());
        let total: f64 = db.nodes.iter().map(|n| n.weight).sum();
        assert!((total - 4.0 * PI).abs() < 1e-10);
        for n in &db.nodes {
            assert!(n.normal.dot(n.tangent).abs() < 1e-12);
            assert!((n.normal - n.pos * 0.5).norm() < 1e-12);
            assert!((n.pos.norm() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn graded_map_endpoints() {
        let m = PanelMap::Graded { tc: 0.2, tf: 0.1, q: 6.0 };
        assert_eq!(m.t(-1.0), 0.2);
        assert!((m.t(1.0) - 0.1).abs() < 1e-15);
        let h = 1e-6;
        let fd = (m.t(0.3 + h) - m.t(0.3 - h)) / (2.0 * h);
        assert!((fd.abs() - m.dt_du(0.3)).abs() < 1e-8);
        for s in [0.4, -0.2, 1e-9] {
            assert!((m.delta(0.3, s) - (m.t(0.3 + s) - m.t(0.3))).abs() < 1e-15);
        }
    }

    #[test]
    fn segments_crossing() {
        let o = Vec2::ZERO;
        assert!(segments_cross(o, Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0), Vec2::new(1.0, 0.0)));
        assert!(!segments_cross(o, Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(1.0, 1.0)));
        assert!(segment_hits_arc(Vec2::new(-2.0, 0.5), Vec2::new(2.0, 0.5), o, 1.0, 0.0, PI));
        assert!(!segment_hits_arc(Vec2::new(-2.0, -0.5), Vec2::new(2.0, -0.5), o, 1.0, 0.0, PI));
    }
}
