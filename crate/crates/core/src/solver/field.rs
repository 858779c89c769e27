//! Field evaluation from solved densities, electromagnetic components,
//! the relative L2 error metric and modal overlaps.

use super::{cross_section_potential, par_map, Solution};
use crate::error::{Error, Result};
use crate::geometry::{Illumination, Location, Polarization, Vec2};
use crate::incident::IncidentField;
use crate::kernels::{potential_kernels_geom, Geom};
use crate::modes::{Branch, Mode, SlabSpec};
use crate::operators::{panel_weights, Target};
use crate::quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

/// Total field and its gradient [d/dz, d/dx] at a point of `region`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue {
    pub region: usize,
    pub u: C,
    pub grad: [C; 2],
}

impl Solution {
    /// Total field at r, or None within the boundary tolerance of a curve.
    pub fn field_at(&self, r: Vec2) -> Option<FieldValue> {
        let region = match self.scene.locate(r) {
            Location::Region(j) => j,
            Location::Boundary { .. } => return None,
        };
        let (u, grad) = self.field_in_region(r, region);
        Some(FieldValue { region, u, grad })
    }

    /// Field at many points, in parallel.
    pub fn evaluate_points(&self, points: &[Vec2]) -> Vec<Option<FieldValue>> {
        par_map(points.len(), |i| self.field_at(points[i]))
    }

    /// Representation in `region` at r, which must lie in that region.
    pub fn field_in_region(&self, r: Vec2, region: usize) -> (C, [C; 2]) {
        let scene = &self.scene;
        let db = &self.boundary;
        let k = scene.k(region);
        let tgt = Target::point(r);
        let mut u = C::new(0.0, 0.0);
        let mut g = [C::new(0.0, 0.0); 2];
        let mut w = vec![[C::new(0.0, 0.0); 6]; db.params.order];
        let kern = |geom: &Geom| potential_kernels_geom(geom, k);
        for (pidx, panel) in db.panels.iter().enumerate() {
            let curve = &scene.curves[panel.curve];
            if !curve.touches(region) {
                continue;
            }
            let range = panel.first..panel.first + panel.len;
            let dens = |j: usize| {
                let win = db.nodes[j].window;
                (self.phi[j] * win + self.phi_inc[j], self.psi[j] * win + self.psi_inc[j])
            };
            if range.clone().all(|j| {
                let (a, b) = dens(j);
                a == C::new(0.0, 0.0) && b == C::new(0.0, 0.0)
            }) {
                continue;
            }
            let (beta, nu) = if curve.plus == region { (1.0, 1.0) } else { (-1.0, scene.curve_nu(panel.curve)) };
            w.resize(panel.len, [C::new(0.0, 0.0); 6]);
            panel_weights(db, &tgt, pidx, &kern, &mut w);
            for (m, wm) in w.iter().enumerate() {
                let (p, q) = dens(panel.first + m);
                let q = q / nu;
                u += beta * (wm[3] * p - wm[0] * q);
                g[0] += beta * (wm[4] * p - wm[1] * q);
                g[1] += beta * (wm[5] * p - wm[2] * q);
            }
        }
        match (&scene.illumination, &db.truncated.illuminated) {
            (Illumination::Mode { .. }, Some(ill)) => {
                if ill.perp.iter().any(|s| s.region == region) {
                    let (v, dv) = cross_section_potential(scene, ill, region, r);
                    u += v;
                    g[0] += dv[0];
                    g[1] += dv[1];
                    // Inside the discarded far part of the guide the tail
                    // integral also reproduces the incident field.
                    let (z, x) = ill.info.frame.to_local(r);
                    if z < -self.window.a {
                        let seg = ill.perp.iter().find(|s| s.region == region && x >= s.x0.min(s.x1) && x <= s.x0.max(s.x1));
                        if let Some(seg) = seg {
                            let (v, dv) = self.incident.eval(r, seg.branch);
                            u += v;
                            g[0] += dv[0];
                            g[1] += dv[1];
                        }
                    }
                }
            }
            (Illumination::Beam(b), _) if b.region == region => add_incident(&self.incident, r, &mut u, &mut g),
            (Illumination::PlaneWave { region: rg, .. }, _) if *rg == region => {
                add_incident(&self.incident, r, &mut u, &mut g)
            }
            _ => {}
        }
        (u, g)
    }

    /// Field on a rectangular grid.
    pub fn evaluate_grid(&self, spec: &GridSpec) -> Result<FieldGrid> {
        spec.validate()?;
        let pts = spec.points();
        let values = self.evaluate_points(&pts);
        Ok(FieldGrid { z: spec.z, x: spec.x, values })
    }
}

fn add_incident(inc: &IncidentField, r: Vec2, u: &mut C, g: &mut [C; 2]) {
    let (v, dv) = inc.eval(r, Branch::Auto);
    *u += v;
    g[0] += dv[0];
    g[1] += dv[1];
}

/// Uniform samples `n` from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl GridAxis {
    pub fn value(&self, i: usize) -> f64 {
        if self.n <= 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.n - 1) as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub z: GridAxis,
    pub x: GridAxis,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("z", self.z), ("x", self.x)] {
            if a.n == 0 || !(a.max >= a.min) || !a.min.is_finite() || !a.max.is_finite() {
                return Err(Error::Config(format!("grid axis {name} must be a nonempty finite range")));
            }
        }
        Ok(())
    }

    /// Points in row-major order: x outer, z inner.
    pub fn points(&self) -> Vec<Vec2> {
        let mut v = Vec::with_capacity(self.z.n * self.x.n);
        for ix in 0..self.x.n {
            for iz in 0..self.z.n {
                v.push(Vec2::new(self.z.value(iz), self.x.value(ix)));
            }
        }
        v
    }
}

/// Sampled total field. `values[ix * z.n + iz]` is None for masked points
/// on or within 1e-10 of an interface.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub z: GridAxis,
    pub x: GridAxis,
    pub values: Vec<Option<FieldValue>>,
}

impl FieldGrid {
    pub fn point(&self, iz: usize, ix: usize) -> Vec2 {
        Vec2::new(self.z.value(iz), self.x.value(ix))
    }

    pub fn get(&self, iz: usize, ix: usize) -> Option<&FieldValue> {
        self.values[ix * self.z.n + iz].as_ref()
    }
}

/// Material constants used to turn u into E and H.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub omega: f64,
    pub mu: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self { omega: 1.0, mu: 1.0 }
    }
}

/// Electric and magnetic field vectors in (x, y, z) components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmField {
    pub e: [C; 3],
    pub h: [C; 3],
}

/// E and H from u and its gradient [du/dz, du/dx] in a region with
/// wavenumber `k`.
pub fn field_components(u: C, grad: [C; 2], k: f64, polarization: Polarization, units: Units) -> EmField {
    let zero = C::new(0.0, 0.0);
    let (uz, ux) = (grad[0], grad[1]);
    match polarization {
        Polarization::TE => {
            let c = C::new(0.0, 1.0 / (units.omega * units.mu));
            EmField { e: [zero, u, zero], h: [c * uz, zero, -c * ux] }
        }
        Polarization::TM => {
            let c = C::new(0.0, units.omega * units.mu / (k * k));
            EmField { e: [-c * uz, zero, c * ux], h: [zero, u, zero] }
        }
    }
}

/// Relative discrete L2 error sqrt(sum |u - ref|^2 / sum |ref|^2).
pub fn error_metric(field: &[C], reference: &[C]) -> Result<f64> {
    if field.len() != reference.len() {
        return Err(Error::Config(format!(
            "error metric needs equal lengths, got {} and {}",
            field.len(),
            reference.len()
        )));
    }
    let den: f64 = reference.iter().map(|z| z.norm_sqr()).sum();
    if !(den > 0.0) {
        return Err(Error::Config("error metric reference has zero norm".into()));
    }
    let num: f64 = field.iter().zip(reference).map(|(a, b)| (a - b).norm_sqr()).sum();
    Ok((num / den).sqrt())
}

/// Modal coefficient int u u_perp dx / int u_perp^2 dx of the computed field
/// on the transverse cut at local coordinate `z_loc` of waveguide `siw`,
/// integrated over |x_loc| <= h + extent with composite Gauss-Legendre panels
/// split at the core edges.
pub fn modal_overlap(sol: &Solution, siw: usize, spec: &SlabSpec, mode: &Mode, z_loc: f64, extent: f64) -> Result<C> {
    let info = sol.scene.siw_info(siw)?;
    let h = spec.h;
    let rule = GaussLegendre::new(16);
    let panels_per = |len: f64| ((len / (0.05 * h.max(0.1))).ceil() as usize).max(4);
    let mut xs = Vec::new();
    for (a, b) in [(-h - extent, -h), (-h, h), (h, h + extent)] {
        let np = panels_per(b - a);
        let step = (b - a) / np as f64;
        for p in 0..np {
            let lo = a + p as f64 * step;
            xs.extend(rule.mapped(lo, lo + step));
        }
    }
    let pts: Vec<Vec2> = xs.iter().map(|&(x, _)| info.frame.to_global(z_loc, x)).collect();
    let vals = sol.evaluate_points(&pts);
    let mut num = C::new(0.0, 0.0);
    let mut den = 0.0;
    for ((x, w), v) in xs.iter().zip(vals) {
        let v = v.ok_or_else(|| Error::Evaluation(format!("overlap cut point x = {x} lies on an interface")))?;
        let p = mode.profile(spec, *x);
        num += v.u * p * *w;
        den += p * p * *w;
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_metric_examples() {
        let r: Vec<C> = (0..100).map(|i| C::new((i as f64).sin(), 0.3)).collect();
        assert_eq!(error_metric(&r, &r).unwrap(), 0.0);
        let two: Vec<C> = r.iter().map(|v| v * 2.0).collect();
        assert!((error_metric(&two, &r).unwrap() - 1.0).abs() < 1e-15);
        assert!(error_metric(&r, &[C::new(0.0, 0.0); 100]).is_err());
        assert!(error_metric(&r[..3], &r).is_err());
    }

    #[test]
    fn plane_wave_components() {
        let k = 3.0;
        let u = C::new(1.0, 0.0);
        let f = field_components(u, [C::new(0.0, k), C::new(0.0, 0.0)], k, Polarization::TE, Units::default());
        assert_eq!(f.e[1], u);
        assert_eq!(f.h[2], C::new(0.0, 0.0));
        assert!((f.h[0] - C::new(-k, 0.0)).norm() < 1e-15);
        let f = field_components(u, [C::new(0.0, k), C::new(0.0, 0.0)], k, Polarization::TM, Units::default());
        assert_eq!(f.h[1], u);
        assert!((f.e[0] - C::new(1.0 / k, 0.0)).norm() < 1e-15);
    }
}
