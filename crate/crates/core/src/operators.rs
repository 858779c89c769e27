//! Nyström discretization of the layer potentials: panel quadrature for
//! far, near and self interactions and dense assembly of the windowed
//! transmission system.

use crate::geometry::discretize::{DiscreteBoundary, Panel, PanelMap};
use crate::geometry::{Scene, Vec2};
use crate::kernels::{combined_kernels, single_kernels, Geom, RegionTerm};
use crate::quad::GaussLegendre;
use num_complex::Complex64;
use std::sync::OnceLock;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

type C = Complex64;

/// A panel counts as near when the target is closer to its center than
/// this multiple of its length.
const NEAR_FACTOR: f64 = 1.0;
/// Geometric ratio and depth of the self-panel refinement toward the target.
const SELF_RATIO: f64 = 0.2;
const SELF_LEVELS: usize = 8;
const MAX_DEPTH: usize = 60;

fn sub_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

/// Evaluation point for the panel quadrature. `on` identifies boundary
/// nodes so that same-piece geometry can be computed from chords.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub pos: Vec2,
    pub normal: Vec2,
    pub on: Option<OnCurve>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnCurve {
    pub piece: usize,
    pub panel: usize,
    pub t: f64,
    pub u: f64,
}

impl Target {
    pub fn node(db: &DiscreteBoundary, i: usize) -> Self {
        let n = &db.nodes[i];
        let piece = db.panels[n.panel].piece;
        Self { pos: n.pos, normal: n.normal, on: Some(OnCurve { piece, panel: n.panel, t: n.t, u: n.u }) }
    }

    pub fn point(pos: Vec2) -> Self {
        Self { pos, normal: Vec2::ZERO, on: None }
    }

    pub fn with_normal(pos: Vec2, normal: Vec2) -> Self {
        Self { pos, normal, on: None }
    }
}

/// Geometry between the target and the point u of a panel. For a target
/// on the panel itself the source is given by its offset s = u - u_target.
fn geom_at(db: &DiscreteBoundary, target: &Target, panel: &Panel, u: f64, offset: Option<f64>) -> Geom {
    let tp = &db.truncated.pieces[panel.piece];
    let t = panel.map.t(u);
    let n_s = tp.piece.normal(t);
    if let Some(on) = target.on {
        if let Some(s) = offset {
            let dt = -panel.map.delta(on.u, s);
            let (d, dn_t, dn_s) = tp.piece.chord_dt(on.t, dt);
            return Geom::from_chord(d, dn_t, dn_s, target.normal, n_s);
        }
        let tmap = &db.panels[on.panel].map;
        if on.piece == panel.piece {
            // Offsets from a common corner keep graded nodes apart.
            let dt = match panel.map {
                PanelMap::Graded { tc, .. } => tmap.offset(on.u, tc) - panel.map.offset(u, tc),
                _ => on.t - t,
            };
            let (d, dn_t, dn_s) = tp.piece.chord_dt(on.t, dt);
            return Geom::from_chord(d, dn_t, dn_s, target.normal, n_s);
        }
        if let Some((tj_t, tj_s)) = db.truncated.junction(on.piece, panel.piece) {
            // Both points relative to the shared vertex.
            let a = db.truncated.pieces[on.piece].piece.chord_dt(on.t, tmap.offset(on.u, tj_t)).0;
            let b = tp.piece.chord_dt(t, panel.map.offset(u, tj_s)).0;
            let d = a - b;
            return Geom::from_chord(d, d.dot(target.normal), d.dot(n_s), target.normal, n_s);
        }
    }
    Geom::new(target.pos, target.normal, tp.piece.point(t), n_s)
}

/// Quadrature weights W_m = J_m * int K(u) L_m(u) du over one panel, where
/// L_m are the Lagrange polynomials on the panel nodes and J_m = |dr/du| at
/// node m. Densities are thus interpolated as density * |dr/du|, which stays
/// smooth on graded corner panels. `out` must have one entry per node.
pub fn panel_weights<const M: usize, F>(db: &DiscreteBoundary, target: &Target, pidx: usize, kern: &F, out: &mut [[C; M]])
where
    F: Fn(&Geom) -> [C; M],
{
    let panel = &db.panels[pidx];
    let p = panel.len;
    for o in out.iter_mut() {
        *o = [C::new(0.0, 0.0); M];
    }
    let is_self = matches!(target.on, Some(on) if on.panel == pidx);
    if !is_self && (target.pos - panel.center).norm() >= NEAR_FACTOR * panel.length {
        for m in 0..p {
            let node = &db.nodes[panel.first + m];
            let g = match target.on {
                Some(on) if on.piece == panel.piece => geom_at(db, target, panel, node.u, None),
                _ => Geom::new(target.pos, target.normal, node.pos, node.normal),
            };
            let k = kern(&g);
            for j in 0..M {
                out[m][j] = k[j] * node.weight;
            }
        }
        return;
    }
    let mut basis = [0.0f64; 64];
    let basis = &mut basis[..p];
    let mut add = |u: f64, offset: Option<f64>, w: f64, out: &mut [[C; M]]| {
        let g = geom_at(db, target, panel, u, offset);
        let k = kern(&g);
        db.interp.basis(u, basis);
        for m in 0..p {
            let c = w * basis[m];
            for j in 0..M {
                out[m][j] += k[j] * c;
            }
        }
    };
    let rule = sub_rule();
    if is_self {
        let ut = target.on.unwrap().u;
        for side in [-1.0, 1.0] {
            let mut outer = if side < 0.0 { ut + 1.0 } else { 1.0 - ut };
            for _ in 0..SELF_LEVELS {
                let inner = outer * SELF_RATIO;
                for (s, w) in rule.mapped(inner, outer) {
                    add(ut + side * s, Some(side * s), w, out);
                }
                outer = inner;
            }
            // s = outer * tau^4 removes the logarithmic singularity.
            for (tau, w) in rule.mapped(0.0, 1.0) {
                let t3 = tau * tau * tau;
                let s = side * outer * t3 * tau;
                add(ut + s, Some(s), w * 4.0 * outer * t3, out);
            }
        }
    } else {
        // Distances come from the chord geometry so that targets within
        // rounding of a corner vertex still separate from the source.
        let speed = db.piece(panel).piece.speed();
        let mut stack = vec![(-1.0f64, 1.0f64, 0usize)];
        while let Some((a, b, depth)) = stack.pop() {
            let len = speed * (panel.map.t(b) - panel.map.t(a)).abs();
            let dist = geom_at(db, target, panel, 0.5 * (a + b), None).rho;
            if depth >= MAX_DEPTH || dist >= NEAR_FACTOR * len {
                for (u, w) in rule.mapped(a, b) {
                    add(u, None, w, out);
                }
            } else {
                let mid = 0.5 * (a + b);
                stack.push((a, mid, depth + 1));
                stack.push((mid, b, depth + 1));
            }
        }
    }
    for m in 0..p {
        let jac = db.nodes[panel.first + m].jac;
        for j in 0..M {
            out[m][j] *= jac;
        }
    }
}

/// Region coefficients of the transmission blocks for every ordered pair of
/// (target curve, source curve).
#[derive(Debug, Clone)]
pub struct TransmissionTerms {
    n_curves: usize,
    terms: Vec<Vec<RegionTerm>>,
}

impl TransmissionTerms {
    pub fn new(scene: &Scene) -> Self {
        let nc = scene.curves.len();
        let mut terms = Vec::with_capacity(nc * nc);
        for ct in &scene.curves {
            for cs in &scene.curves {
                let mut v = Vec::new();
                for r in ct.regions() {
                    if !cs.touches(r) {
                        continue;
                    }
                    let (b, nu) = if r == cs.plus { (1.0, 1.0) } else { (-1.0, scene.nu(cs.plus, cs.minus)) };
                    v.push(RegionTerm { k: scene.k(r), c_dn: -b, c_sk: b / nu });
                }
                terms.push(v);
            }
        }
        Self { n_curves: nc, terms }
    }

    pub fn get(&self, target_curve: usize, source_curve: usize) -> &[RegionTerm] {
        &self.terms[target_curve * self.n_curves + source_curve]
    }
}

/// Diagonal of the identity part: 1 for the value row and
/// (1 + nu) / (2 nu) for the flux row.
pub fn identity_part(scene: &Scene, curve: usize) -> (f64, f64) {
    let nu = scene.curve_nu(curve);
    (1.0, (1.0 + nu) / (2.0 * nu))
}

/// Dense column-major complex matrix.
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<C>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C::new(0.0, 0.0); n * n] }
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.data[j * self.n + i]
    }

    pub fn matvec(&self, x: &[C]) -> Vec<C> {
        let n = self.n;
        let mut y = vec![C::new(0.0, 0.0); n];
        for (j, xj) in x.iter().enumerate() {
            if *xj == C::new(0.0, 0.0) {
                continue;
            }
            let col = &self.data[j * n..(j + 1) * n];
            for (yi, a) in y.iter_mut().zip(col) {
                *yi += a * xj;
            }
        }
        y
    }
}

struct SyncPtr(*mut C);
// SAFETY: each worker writes only the columns owned by its panel, and panels
// own disjoint node ranges, so no two threads touch the same element.
unsafe impl Sync for SyncPtr {}
unsafe impl Send for SyncPtr {}

/// Fills the columns of one panel for all targets. `write(col, row, value)`
/// must only be called with columns of this panel.
fn for_each_panel<F>(n_panels: usize, f: F)
where
    F: Fn(usize) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    (0..n_panels).into_par_iter().for_each(f);
    #[cfg(not(feature = "parallel"))]
    (0..n_panels).for_each(f);
}

fn for_each_target<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return (0..n).into_par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return (0..n).map(f).collect();
}

/// Assembles E + T diag(w) for the unknowns (phi, psi) at all nodes.
pub fn assemble_system(scene: &Scene, db: &DiscreteBoundary) -> DenseMatrix {
    let nn = db.n_nodes();
    let n = 2 * nn;
    let mut mat = DenseMatrix::zeros(n);
    let terms = TransmissionTerms::new(scene);
    let ptr = SyncPtr(mat.data.as_mut_ptr());
    let ptr = &ptr;
    for_each_panel(db.panels.len(), |pidx| {
        let panel = &db.panels[pidx];
        let mut w = vec![[C::new(0.0, 0.0); 4]; panel.len];
        for i in 0..nn {
            let tgt = Target::node(db, i);
            let tt = terms.get(db.nodes[i].curve, panel.curve);
            if tt.is_empty() {
                continue;
            }
            panel_weights(db, &tgt, pidx, &|g: &Geom| combined_kernels(g, tt), &mut w);
            for (m, wm) in w.iter().enumerate() {
                let col = panel.first + m;
                let win = db.nodes[col].window;
                // SAFETY: columns col and nn + col belong to this panel only.
                unsafe {
                    let base = ptr.0;
                    *base.add(col * n + i) += wm[0] * win;
                    *base.add(col * n + nn + i) += wm[2] * win;
                    *base.add((nn + col) * n + i) += wm[1] * win;
                    *base.add((nn + col) * n + nn + i) += wm[3] * win;
                }
            }
        }
    });
    for i in 0..nn {
        let (e1, e2) = identity_part(scene, db.nodes[i].curve);
        mat.data[i * n + i] += e1;
        mat.data[(nn + i) * n + nn + i] += e2;
    }
    mat
}

/// Applies the unwindowed operator T to densities (phi, psi) supported on
/// the given panels.
pub fn apply_transmission(scene: &Scene, db: &DiscreteBoundary, phi: &[C], psi: &[C], panels: &[usize]) -> (Vec<C>, Vec<C>) {
    let nn = db.n_nodes();
    let terms = TransmissionTerms::new(scene);
    let rows: Vec<(C, C)> = for_each_target(nn, |i| {
        let tgt = Target::node(db, i);
        let mut w = vec![[C::new(0.0, 0.0); 4]; db.params.order];
        let mut acc = (C::new(0.0, 0.0), C::new(0.0, 0.0));
        for &pidx in panels {
            let panel = &db.panels[pidx];
            let tt = terms.get(db.nodes[i].curve, panel.curve);
            if tt.is_empty() {
                continue;
            }
            w.resize(panel.len, [C::new(0.0, 0.0); 4]);
            panel_weights(db, &tgt, pidx, &|g: &Geom| combined_kernels(g, tt), &mut w);
            for (m, wm) in w.iter().enumerate() {
                let j = panel.first + m;
                acc.0 += wm[0] * phi[j] + wm[1] * psi[j];
                acc.1 += wm[2] * phi[j] + wm[3] * psi[j];
            }
        }
        acc
    });
    rows.into_iter().unzip()
}

/// Single-wavenumber boundary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    /// Single layer S.
    Single,
    /// Double layer D (normal derivative at the source).
    Double,
    /// Adjoint double layer K (normal derivative at the target).
    AdjointDouble,
}

/// Dense N x N matrix of one layer operator with wavenumber k on the whole
/// discretized boundary (principal value for D and K).
pub fn assemble_layer(db: &DiscreteBoundary, k: f64, kind: LayerKind) -> DenseMatrix {
    let nn = db.n_nodes();
    let mut mat = DenseMatrix::zeros(nn);
    let idx = match kind {
        LayerKind::Double => 0,
        LayerKind::Single => 1,
        LayerKind::AdjointDouble => 3,
    };
    let ptr = SyncPtr(mat.data.as_mut_ptr());
    let ptr = &ptr;
    for_each_panel(db.panels.len(), |pidx| {
        let panel = &db.panels[pidx];
        let mut w = vec![[C::new(0.0, 0.0); 1]; panel.len];
        for i in 0..nn {
            let tgt = Target::node(db, i);
            panel_weights(db, &tgt, pidx, &|g: &Geom| [single_kernels(g, k)[idx]], &mut w);
            for (m, wm) in w.iter().enumerate() {
                // SAFETY: column panel.first + m belongs to this panel only.
                unsafe {
                    *ptr.0.add((panel.first + m) * nn + i) += wm[0];
                }
            }
        }
    });
    mat
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::discretize::{discretize, truncate_boundary, DiscretizationParams};
    use crate::geometry::{Illumination, InterfaceCurve, Polarization, Primitive, Region};
    use crate::specialfn::{bessel01, hankel1_0};
    use crate::window::WindowParams;
    use std::f64::consts::PI;

    fn circle(radius: f64, ppw: f64, lambda: f64) -> DiscreteBoundary {
        let s = Scene {
            name: String::new(),
            regions: vec![Region { id: 1, k: 1.0, label: String::new() }, Region { id: 2, k: 2.0, label: String::new() }],
            curves: vec![InterfaceCurve {
                plus: 1,
                minus: 2,
                head: None,
                body: vec![Primitive::arc(Vec2::ZERO, radius, 0.0, -2.0 * PI)],
                tail: None,
            }],
            siws: vec![],
            polarization: Polarization::TE,
            illumination: Illumination::PlaneWave { region: 1, angle: 0.0, amplitude: C::new(1.0, 0.0) },
        };
        let tb = truncate_boundary(&s, WindowParams::new(1.0, 0.5).unwrap()).unwrap();
        discretize(&tb, &DiscretizationParams::with_ppw(ppw), lambda).unwrap()
    }

    #[test]
    fn single_layer_constant_density_on_circle() {
        let k = 2.0 * PI;
        let db = circle(1.0, 10.0, 1.0);
        let s = assemble_layer(&db, k, LayerKind::Single);
        let ones = vec![C::new(1.0, 0.0); db.n_nodes()];
        let v = s.matvec(&ones);
        let want = C::new(0.0, PI / 2.0) * bessel01(k).j0 * hankel1_0(k).unwrap();
        for vi in v {
            assert!((vi - want).norm() < 1e-10 * want.norm(), "{vi} {want}");
        }
    }

    #[test]
    fn double_layer_gauss_identity() {
        // Laplace-limit check: for small k, D applied to 1 tends to -1/2
        // on a closed curve with outward normal.
        let db = circle(1.0, 10.0, 1.0);
        let d = assemble_layer(&db, 1e-6, LayerKind::Double);
        let ones = vec![C::new(1.0, 0.0); db.n_nodes()];
        for vi in d.matvec(&ones) {
            assert!((vi.re + 0.5).abs() < 1e-9, "{vi}");
        }
    }
}
