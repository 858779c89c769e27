//! Right-hand sides, dense solution of the windowed system and the
//! resulting boundary densities.

mod field;

pub use field::{
    error_metric, field_components, modal_overlap, EmField, FieldGrid, FieldValue, GridAxis, GridSpec, Units,
};

use crate::error::{Error, Result};
use crate::geometry::discretize::{discretize, truncate_boundary, DiscreteBoundary, DiscretizationParams, IlluminatedSiw};
use crate::geometry::{Illumination, Scene, Vec2};
use crate::incident::IncidentField;
use crate::kernels::{potential_kernels_geom, Geom};
use crate::modes::Branch;
use crate::operators::{apply_transmission, assemble_system, identity_part, DenseMatrix};
use crate::quad::adaptive;
use crate::window::WindowParams;
use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use web_time::Instant;

type C = Complex64;

/// Systems with a reciprocal condition estimate below this are rejected.
const MIN_RCOND: f64 = 1e-14;

/// Right-hand side used for beam and plane-wave illumination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeamRhs {
    /// Incident traces on the curves bounding the incident region.
    #[default]
    Unweighted,
    /// The flux row additionally scaled by (1 + nu) / (2 nu).
    EWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub window: WindowParams,
    pub discretization: DiscretizationParams,
    pub beam_rhs: BeamRhs,
}

impl SolveOptions {
    pub fn new(window: WindowParams, ppw: f64) -> Self {
        Self { window, discretization: DiscretizationParams::with_ppw(ppw), beam_rhs: BeamRhs::Unweighted }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub unknowns: usize,
    pub nodes: usize,
    pub panels: usize,
    /// ||A x - b|| / ||b||.
    pub residual: f64,
    /// Estimate of 1 / cond_1(A).
    pub rcond: f64,
    pub discretize_seconds: f64,
    pub assembly_seconds: f64,
    pub rhs_seconds: f64,
    pub solve_seconds: f64,
}

/// Solved boundary densities with everything needed to evaluate fields.
#[derive(Debug, Clone)]
pub struct Solution {
    pub scene: Scene,
    pub window: WindowParams,
    pub boundary: DiscreteBoundary,
    /// Unknown densities at the nodes (unwindowed). For mode illumination
    /// these are scattered traces; for beams and plane waves total traces.
    pub phi: Vec<C>,
    pub psi: Vec<C>,
    /// Incident traces on the illuminated waveguide (mode illumination).
    pub phi_inc: Vec<C>,
    pub psi_inc: Vec<C>,
    pub incident: IncidentField,
    pub diagnostics: SolveDiagnostics,
}

/// Incident field described by the scene's illumination.
pub fn incident_field(scene: &Scene, db: &DiscreteBoundary) -> Result<IncidentField> {
    Ok(match &scene.illumination {
        Illumination::Mode { .. } => {
            let ill = illuminated(db)?;
            IncidentField::modes(&ill.info, ill.modes.clone())
        }
        Illumination::Beam(b) => IncidentField::Beam { k: scene.k(b.region), beam: *b },
        Illumination::PlaneWave { region, angle, amplitude } => {
            IncidentField::Plane { k: scene.k(*region), angle: *angle, amplitude: *amplitude }
        }
    })
}

fn illuminated(db: &DiscreteBoundary) -> Result<&IlluminatedSiw> {
    db.truncated
        .illuminated
        .as_ref()
        .ok_or_else(|| Error::Config("mode illumination requires an illuminated waveguide".into()))
}

/// Plus-side traces (u, du/dn) of the incident mode on the illuminated
/// waveguide's ray nodes; zero elsewhere.
pub fn incident_traces(scene: &Scene, db: &DiscreteBoundary) -> Result<(Vec<C>, Vec<C>)> {
    let ill = illuminated(db)?;
    let inc = IncidentField::modes(&ill.info, ill.modes.clone());
    let n = db.n_nodes();
    let mut phi = vec![C::new(0.0, 0.0); n];
    let mut psi = vec![C::new(0.0, 0.0); n];
    for i in db.incident_nodes() {
        let node = &db.nodes[i];
        let plus = scene.curves[node.curve].plus;
        let branch = if plus == ill.info.core { Branch::Core } else { Branch::Cladding };
        let (u, g) = inc.eval(node.pos, branch);
        phi[i] = u;
        psi[i] = g[0] * node.normal.z + g[1] * node.normal.x;
    }
    Ok((phi, psi))
}

/// Panels carrying incident traces.
fn incident_panels(db: &DiscreteBoundary) -> Vec<usize> {
    let Some(ill) = &db.truncated.illuminated else { return Vec::new() };
    (0..db.panels.len())
        .filter(|&p| matches!(db.truncated.pieces[db.panels[p].piece].ray, Some((s, _)) if s == ill.siw))
        .collect()
}

/// Contribution of the discarded far tail of the illuminated waveguide to
/// the representation in `region`, computed over the transverse cut at
/// z_loc = -A: C(r) = -int [u dG/dn' - G du/dn'] ds with n' along the guide
/// direction. Returns the value and its gradient.
pub fn cross_section_potential(scene: &Scene, ill: &IlluminatedSiw, region: usize, r: Vec2) -> (C, [C; 2]) {
    let k = scene.k(region);
    let inc = IncidentField::modes(&ill.info, ill.modes.clone());
    let n_q = ill.info.frame.direction;
    // Profiles are max-normalized, so this bounds |u_inc|.
    let scale: f64 = ill.modes.iter().map(|m| m.1.norm()).sum();
    let mut total = [C::new(0.0, 0.0); 3];
    for seg in ill.perp.iter().filter(|s| s.region == region) {
        let (lo, hi) = (seg.x0.min(seg.x1), seg.x0.max(seg.x1));
        let f = |x: f64| -> [C; 3] {
            let q = seg.a + (seg.b - seg.a) * ((x - seg.x0) / (seg.x1 - seg.x0));
            let g = Geom::new(r, Vec2::ZERO, q, n_q);
            if !(g.rho > 0.0) {
                return [C::new(0.0, 0.0); 3];
            }
            let p = potential_kernels_geom(&g, k);
            let (u, du) = inc.eval(q, seg.branch);
            let dn = du[0] * n_q.z + du[1] * n_q.x;
            [u * p[3] - p[0] * dn, u * p[4] - p[1] * dn, u * p[5] - p[2] * dn]
        };
        let v = adaptive::<3, _>(f, lo, hi, 1e-15 * (1.0 + scale), 1e-13, 20_000);
        for m in 0..3 {
            total[m] -= v[m];
        }
    }
    (total[0], [total[1], total[2]])
}

/// Right-hand side for mode illumination:
/// -E phi_inc - T[phi_inc], with T over the truncated incident rays plus the
/// far tail expressed through the transverse cut.
pub fn build_rhs(scene: &Scene, db: &DiscreteBoundary) -> Result<Vec<C>> {
    if !matches!(scene.illumination, Illumination::Mode { .. }) {
        return Err(Error::Config("build_rhs needs mode illumination".into()));
    }
    let ill = illuminated(db)?;
    let (phi, psi) = incident_traces(scene, db)?;
    let n = db.n_nodes();
    let (t1, t2) = apply_transmission(scene, db, &phi, &psi, &incident_panels(db));
    let perp_regions: Vec<usize> = {
        let mut v: Vec<usize> = ill.perp.iter().map(|s| s.region).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let corr: Vec<(C, C)> = par_map(n, |i| {
        let node = &db.nodes[i];
        let mut c1 = C::new(0.0, 0.0);
        let mut c2 = C::new(0.0, 0.0);
        for reg in scene.curves[node.curve].regions() {
            if perp_regions.contains(&reg) {
                let (v, g) = cross_section_potential(scene, ill, reg, node.pos);
                c1 += v;
                c2 += g[0] * node.normal.z + g[1] * node.normal.x;
            }
        }
        (c1, c2)
    });
    let mut b = vec![C::new(0.0, 0.0); 2 * n];
    for i in 0..n {
        let (e1, e2) = identity_part(scene, db.nodes[i].curve);
        b[i] = -phi[i] * e1 - t1[i] + corr[i].0;
        b[n + i] = -psi[i] * e2 - t2[i] + corr[i].1;
    }
    Ok(b)
}

/// Right-hand side for beam or plane-wave illumination: incident traces on
/// every curve bounding the incident region, zero elsewhere.
pub fn build_rhs_beam(scene: &Scene, db: &DiscreteBoundary, variant: BeamRhs) -> Result<Vec<C>> {
    let region = match &scene.illumination {
        Illumination::Beam(b) => b.region,
        Illumination::PlaneWave { region, .. } => *region,
        Illumination::Mode { .. } => return Err(Error::Config("build_rhs_beam needs beam or plane-wave illumination".into())),
    };
    let inc = incident_field(scene, db)?;
    let n = db.n_nodes();
    let vals: Vec<(C, C)> = par_map(n, |i| {
        let node = &db.nodes[i];
        if !scene.curves[node.curve].touches(region) {
            return (C::new(0.0, 0.0), C::new(0.0, 0.0));
        }
        let (u, g) = inc.eval(node.pos, Branch::Auto);
        (u, g[0] * node.normal.z + g[1] * node.normal.x)
    });
    let mut b = vec![C::new(0.0, 0.0); 2 * n];
    for i in 0..n {
        let e2 = match variant {
            BeamRhs::Unweighted => 1.0,
            BeamRhs::EWeighted => identity_part(scene, db.nodes[i].curve).1,
        };
        b[i] = vals[i].0;
        b[n + i] = vals[i].1 * e2;
    }
    Ok(b)
}

/// Result of a dense solve.
#[derive(Debug, Clone)]
pub struct DenseSolve {
    pub x: Vec<C>,
    pub residual: f64,
    pub rcond: f64,
}

/// LU with partial pivoting. Fails on non-finite input or when the
/// estimated reciprocal condition number is below 1e-14.
pub fn solve_dense(mat: &DenseMatrix, b: &[C]) -> Result<DenseSolve> {
    let n = mat.n;
    if b.len() != n {
        return Err(Error::Assembly(format!("right-hand side has length {} but the system has {n} rows", b.len())));
    }
    if mat.data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Assembly("system matrix has non-finite entries".into()));
    }
    if b.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Assembly("right-hand side has non-finite entries".into()));
    }
    if n == 0 {
        return Ok(DenseSolve { x: Vec::new(), residual: 0.0, rcond: 1.0 });
    }
    let a = MatRef::from_column_major_slice(&mat.data, n, n);
    let lu = a.partial_piv_lu();
    let rhs = Mat::from_fn(n, 1, |i, _| b[i]);
    let sol = lu.solve(&rhs);
    let x: Vec<C> = (0..n).map(|i| sol[(i, 0)]).collect();
    let rcond = rcond_estimate(mat, &lu);
    if !(rcond >= MIN_RCOND) || x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Singular(format!(
            "condition estimate {:.3e} exceeds 1e14; the structure may be at a resonance or under-resolved",
            1.0 / rcond
        )));
    }
    let ax = mat.matvec(&x);
    let bn = norm2(b);
    let rn = norm2(&ax.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>());
    let residual = if bn > 0.0 { rn / bn } else { rn };
    Ok(DenseSolve { x, residual, rcond })
}

fn norm2(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hager-Higham estimate of 1 / (||A||_1 ||A^-1||_1).
fn rcond_estimate(mat: &DenseMatrix, lu: &faer::linalg::solvers::PartialPivLu<C>) -> f64 {
    let n = mat.n;
    let norm_a = (0..n)
        .map(|j| mat.data[j * n..(j + 1) * n].iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    if norm_a == 0.0 {
        return 0.0;
    }
    let mut x = Mat::from_fn(n, 1, |_, _| C::new(1.0 / n as f64, 0.0));
    let mut est = 0.0;
    let mut last_j = usize::MAX;
    for _ in 0..5 {
        let y = lu.solve(&x);
        let y1: f64 = (0..n).map(|i| y[(i, 0)].norm()).sum();
        if y1 <= est {
            break;
        }
        est = y1;
        let s = Mat::from_fn(n, 1, |i, _| {
            let v = y[(i, 0)];
            let a = v.norm();
            if a > 0.0 {
                v / a
            } else {
                C::new(1.0, 0.0)
            }
        });
        let z = lu.solve_adjoint(&s);
        let (j, zmax) = (0..n).map(|i| (i, z[(i, 0)].norm())).fold((0, -1.0), |b, c| if c.1 > b.1 { c } else { b });
        let ztx: f64 = (0..n).map(|i| (z[(i, 0)].conj() * x[(i, 0)]).re).sum();
        if zmax <= ztx || j == last_j {
            break;
        }
        last_j = j;
        x = Mat::from_fn(n, 1, |i, _| if i == j { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) });
    }
    if est == 0.0 || !est.is_finite() {
        return 0.0;
    }
    1.0 / (norm_a * est)
}

/// Full pipeline: truncate, discretize, assemble, build the right-hand side
/// and solve.
pub fn solve(scene: &Scene, opts: &SolveOptions) -> Result<Solution> {
    let t0 = Instant::now();
    let tb = truncate_boundary(scene, opts.window)?;
    let db = discretize(&tb, &opts.discretization, scene.min_wavelength())?;
    let t1 = Instant::now();
    let mat = assemble_system(scene, &db);
    let t2 = Instant::now();
    let (b, phi_inc, psi_inc) = match scene.illumination {
        Illumination::Mode { .. } => {
            let (p, q) = incident_traces(scene, &db)?;
            (build_rhs(scene, &db)?, p, q)
        }
        _ => {
            let z = vec![C::new(0.0, 0.0); db.n_nodes()];
            (build_rhs_beam(scene, &db, opts.beam_rhs)?, z.clone(), z)
        }
    };
    let t3 = Instant::now();
    let sol = solve_dense(&mat, &b)?;
    let t4 = Instant::now();
    let n = db.n_nodes();
    let incident = incident_field(scene, &db)?;
    let diagnostics = SolveDiagnostics {
        unknowns: 2 * n,
        nodes: n,
        panels: db.panels.len(),
        residual: sol.residual,
        rcond: sol.rcond,
        discretize_seconds: (t1 - t0).as_secs_f64(),
        assembly_seconds: (t2 - t1).as_secs_f64(),
        rhs_seconds: (t3 - t2).as_secs_f64(),
        solve_seconds: (t4 - t3).as_secs_f64(),
    };
    Ok(Solution {
        scene: scene.clone(),
        window: opts.window,
        phi: sol.x[..n].to_vec(),
        psi: sol.x[n..].to_vec(),
        boundary: db,
        phi_inc,
        psi_inc,
        incident,
        diagnostics,
    })
}

pub(crate) fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
