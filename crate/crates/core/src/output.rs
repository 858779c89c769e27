//! CSV file formats for field grids, boundary densities, probe values,
//! convergence sweeps, mode tables and the windowed-integral demo.
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! gives bit-identical values. Grid files start with a block of `# key: value`
//! lines.

use crate::error::{Error, Result};
use crate::geometry::{Polarization, Vec2};
use crate::modes::{Mode, Parity};
use crate::solver::{FieldGrid, GridAxis, Solution};
use crate::study::SweepRow;
use crate::window::DemoRow;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Read, Write};

type C = Complex64;

/// Header block of a grid file.
#[derive(Debug, Clone, PartialEq)]
pub struct GridHeader {
    pub scene: String,
    pub scene_hash: String,
    pub polarization: Polarization,
    pub z: GridAxis,
    pub x: GridAxis,
}

/// One grid sample. Masked points have region 0 and NaN values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub z: f64,
    pub x: f64,
    pub region: usize,
    pub re_u: f64,
    pub im_u: f64,
}

/// Total boundary traces at one node; `t` is arclength along the truncated
/// curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub curve_id: usize,
    pub t: f64,
    pub z: f64,
    pub x: f64,
    pub re_phi: f64,
    pub im_phi: f64,
    pub re_psi: f64,
    pub im_psi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub z: f64,
    pub x: f64,
    pub re_u: f64,
    pub im_u: f64,
}

impl ProbeRow {
    pub fn point(&self) -> Vec2 {
        Vec2::new(self.z, self.x)
    }

    pub fn u(&self) -> C {
        C::new(self.re_u, self.im_u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub a_over_lambda: f64,
    pub window_a: f64,
    pub error: f64,
    pub unknowns: usize,
}

impl From<&SweepRow> for ConvergenceRow {
    fn from(r: &SweepRow) -> Self {
        Self { a_over_lambda: r.a_over_lambda, window_a: r.window_a, error: r.error, unknowns: r.unknowns }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRow {
    pub m: usize,
    pub parity: Parity,
    pub k_z: f64,
    pub gamma_co: f64,
    pub gamma_cl: f64,
    pub residual: f64,
}

impl ModeRow {
    pub fn new(mode: &Mode, residual: f64) -> Self {
        Self {
            m: mode.index,
            parity: mode.parity,
            k_z: mode.k_z,
            gamma_co: mode.gamma_co,
            gamma_cl: mode.gamma_cl,
            residual,
        }
    }
}

/// Windowed-integral demo row: A, |I - I_tr(A)|, |I - I_w(A)| and the two
/// truncated values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowDemoRow {
    pub a: f64,
    pub err_tr: f64,
    pub err_w: f64,
    pub re_i_tr: f64,
    pub im_i_tr: f64,
    pub re_i_w: f64,
    pub im_i_w: f64,
}

impl From<&DemoRow> for WindowDemoRow {
    fn from(r: &DemoRow) -> Self {
        Self {
            a: r.a,
            err_tr: r.err_tr,
            err_w: r.err_w,
            re_i_tr: r.i_tr.re,
            im_i_tr: r.i_tr.im,
            re_i_w: r.i_w.re,
            im_i_w: r.i_w.im,
        }
    }
}

pub fn grid_rows(grid: &FieldGrid) -> Vec<GridRow> {
    let mut out = Vec::with_capacity(grid.values.len());
    for ix in 0..grid.x.n {
        for iz in 0..grid.z.n {
            let p = grid.point(iz, ix);
            let row = match grid.get(iz, ix) {
                Some(v) => GridRow { z: p.z, x: p.x, region: v.region, re_u: v.u.re, im_u: v.u.im },
                None => GridRow { z: p.z, x: p.x, region: 0, re_u: f64::NAN, im_u: f64::NAN },
            };
            out.push(row);
        }
    }
    out
}

/// Total traces phi = w phi_scat + phi_inc and psi likewise, node by node.
pub fn density_rows(sol: &Solution) -> Vec<DensityRow> {
    sol.boundary
        .nodes
        .iter()
        .enumerate()
        .map(|(j, n)| {
            let phi = sol.phi[j] * n.window + sol.phi_inc[j];
            let psi = sol.psi[j] * n.window + sol.psi_inc[j];
            DensityRow {
                curve_id: n.curve,
                t: n.arc,
                z: n.pos.z,
                x: n.pos.x,
                re_phi: phi.re,
                im_phi: phi.im,
                re_psi: psi.re,
                im_psi: psi.im,
            }
        })
        .collect()
}

pub fn probe_rows(points: &[Vec2], values: &[C]) -> Vec<ProbeRow> {
    points.iter().zip(values).map(|(p, u)| ProbeRow { z: p.z, x: p.x, re_u: u.re, im_u: u.im }).collect()
}

pub fn write_grid<W: Write>(mut w: W, header: &GridHeader, rows: &[GridRow]) -> Result<()> {
    writeln!(w, "# scene: {}", header.scene)?;
    writeln!(w, "# scene_hash: {}", header.scene_hash)?;
    writeln!(w, "# polarization: {:?}", header.polarization)?;
    writeln!(w, "# z: {} {} {}", header.z.min, header.z.max, header.z.n)?;
    writeln!(w, "# x: {} {} {}", header.x.min, header.x.max, header.x.n)?;
    write_rows(w, rows)
}

pub fn read_grid<R: BufRead>(mut r: R) -> Result<(GridHeader, Vec<GridRow>)> {
    let mut fields = std::collections::HashMap::new();
    let mut line = String::new();
    loop {
        if r.fill_buf()?.first() != Some(&b'#') {
            break;
        }
        line.clear();
        r.read_line(&mut line)?;
        let body = line.trim_start_matches('#').trim();
        let (k, v) = body.split_once(':').ok_or_else(|| parse_err(format!("bad header line '{}'", line.trim())))?;
        fields.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| fields.get(k).cloned().ok_or_else(|| parse_err(format!("grid header lacks '{k}'")));
    let header = GridHeader {
        scene: get("scene")?,
        scene_hash: get("scene_hash")?,
        polarization: get("polarization")?.parse().map_err(|e: Error| parse_err(e.to_string()))?,
        z: parse_axis(&get("z")?)?,
        x: parse_axis(&get("x")?)?,
    };
    let rows: Vec<GridRow> = read_rows(r)?;
    if rows.len() != header.z.n * header.x.n {
        return Err(parse_err(format!(
            "grid has {} rows, header promises {} x {}",
            rows.len(),
            header.z.n,
            header.x.n
        )));
    }
    Ok((header, rows))
}

fn parse_axis(s: &str) -> Result<GridAxis> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    let bad = || parse_err(format!("bad axis '{s}', expected 'min max n'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok(GridAxis {
        min: parts[0].parse().map_err(|_| bad())?,
        max: parts[1].parse().map_err(|_| bad())?,
        n: parts[2].parse().map_err(|_| bad())?,
    })
}

fn parse_err(m: String) -> Error {
    Error::Parse(m)
}

/// Rows with a header line of field names.
pub fn write_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r).map_err(csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_rows<R: Read, T: DeserializeOwned>(r: R) -> Result<Vec<T>> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    rd.deserialize().map(|row| row.map_err(csv_err)).collect()
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        k => Error::Parse(format!("csv: {k:?}")),
    }
}
