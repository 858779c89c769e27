//! Browser bindings: the window demo table, the slab mode table and a small
//! field solve rendered as an image.

use wasm_bindgen::prelude::*;
use wgf::geometry::Polarization;
use wgf::modes::{dispersion_residual, find_modes, SlabSpec};
use wgf::output::{write_rows, ModeRow, WindowDemoRow};
use wgf::scene_io::eval_expr;
use wgf::scenes::named_scene;
use wgf::solver::{error_metric, solve, GridAxis, GridSpec, SolveOptions};
use wgf::study::{incident_mode_values, probe_values};
use wgf::window::{windowed_oscillatory_demo, WindowParams};

/// Largest grid the page may request.
pub const MAX_GRID_POINTS: usize = 40_000;

fn csv_string(write: impl FnOnce(&mut Vec<u8>) -> wgf::Result<()>) -> Result<String, String> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| e.to_string())?;
    String::from_utf8(buf).map_err(|e| e.to_string())
}

fn number(s: &str, what: &str) -> Result<f64, String> {
    eval_expr(s).map_err(|e| format!("{what}: {e}"))
}

/// Table of |I - I_tr| and |I - I_w| for each window size, as CSV.
pub fn window_demo_csv(a: &str, alpha: f64, sizes: &str) -> Result<String, String> {
    let a = number(a, "a")?;
    let rows = sizes
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let size = number(s.trim(), "window size")?;
            let p = WindowParams::new(size, alpha).map_err(|e| e.to_string())?;
            windowed_oscillatory_demo(a, &p, 10.0).map(|r| WindowDemoRow::from(&r)).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, String>>()?;
    csv_string(|b| write_rows(b, &rows))
}

/// Guided modes of a symmetric slab, as CSV.
pub fn modes_csv(k_co: &str, k_cl: &str, h: &str, pol: &str) -> Result<String, String> {
    let pol: Polarization = pol.parse().map_err(|e: wgf::Error| e.to_string())?;
    let spec = SlabSpec::new(number(k_co, "k_co")?, number(k_cl, "k_cl")?, number(h, "h")?, pol)
        .map_err(|e| e.to_string())?;
    let rows: Vec<ModeRow> = find_modes(&spec).iter().map(|m| ModeRow::new(m, dispersion_residual(m, &spec))).collect();
    csv_string(|b| write_rows(b, &rows))
}

/// Total field of a named scene sampled on a grid.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct FieldImage {
    nz: usize,
    nx: usize,
    re: Vec<f64>,
    im: Vec<f64>,
    region: Vec<u32>,
    unknowns: usize,
    error: f64,
}

#[wasm_bindgen]
impl FieldImage {
    pub fn nz(&self) -> usize {
        self.nz
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    /// Real parts with z fastest; NaN on masked points.
    pub fn re(&self) -> Vec<f64> {
        self.re.clone()
    }
    pub fn im(&self) -> Vec<f64> {
        self.im.clone()
    }
    /// Region id per point, 0 where masked.
    pub fn region(&self) -> Vec<u32> {
        self.region.clone()
    }
    pub fn unknowns(&self) -> usize {
        self.unknowns
    }
    /// Probe error against the exact mode, or NaN when the scene has none.
    pub fn error(&self) -> f64 {
        self.error
    }
}

/// Window, discretization and sampling grid for `field_image`.
#[derive(Debug, Clone, Copy)]
pub struct ImageRequest {
    pub window_lambdas: f64,
    pub alpha: f64,
    pub ppw: f64,
    pub z: (f64, f64),
    pub x: (f64, f64),
    pub nz: usize,
    pub nx: usize,
}

pub fn field_image(name: &str, req: &ImageRequest) -> Result<FieldImage, String> {
    if req.nz * req.nx > MAX_GRID_POINTS {
        return Err(format!("grid has {} points, at most {MAX_GRID_POINTS} allowed", req.nz * req.nx));
    }
    let ns = named_scene(name).map_err(|e| e.to_string())?;
    let window = WindowParams::new(req.window_lambdas * ns.scene.max_wavelength(), req.alpha).map_err(|e| e.to_string())?;
    let sol = solve(&ns.scene, &SolveOptions::new(window, req.ppw)).map_err(|e| e.to_string())?;
    let spec = GridSpec {
        z: GridAxis { min: req.z.0, max: req.z.1, n: req.nz },
        x: GridAxis { min: req.x.0, max: req.x.1, n: req.nx },
    };
    let grid = sol.evaluate_grid(&spec).map_err(|e| e.to_string())?;
    let re = grid.values.iter().map(|v| v.as_ref().map_or(f64::NAN, |v| v.u.re)).collect();
    let im = grid.values.iter().map(|v| v.as_ref().map_or(f64::NAN, |v| v.u.im)).collect();
    let region = grid.values.iter().map(|v| v.as_ref().map_or(0, |v| v.region as u32)).collect();
    let error = if ns.exact_mode {
        let got = probe_values(&sol, &ns.probe).map_err(|e| e.to_string())?;
        let want = incident_mode_values(&ns.scene, &ns.probe).map_err(|e| e.to_string())?;
        error_metric(&got, &want).map_err(|e| e.to_string())?
    } else {
        f64::NAN
    };
    Ok(FieldImage { nz: req.nz, nx: req.nx, re, im, region, unknowns: sol.diagnostics.unknowns, error })
}

#[wasm_bindgen(js_name = windowDemo)]
pub fn window_demo_js(a: &str, alpha: f64, sizes: &str) -> Result<String, JsError> {
    window_demo_csv(a, alpha, sizes).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = slabModes)]
pub fn modes_js(k_co: &str, k_cl: &str, h: &str, pol: &str) -> Result<String, JsError> {
    modes_csv(k_co, k_cl, h, pol).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = solveField)]
#[allow(clippy::too_many_arguments)]
pub fn field_image_js(
    name: &str,
    window_lambdas: f64,
    alpha: f64,
    ppw: f64,
    z0: f64,
    z1: f64,
    x0: f64,
    x1: f64,
    nz: usize,
    nx: usize,
) -> Result<FieldImage, JsError> {
    let req = ImageRequest { window_lambdas, alpha, ppw, z: (z0, z1), x: (x0, x1), nz, nx };
    field_image(name, &req).map_err(|e| JsError::new(&e))
}
