//! Bound modes of a symmetric dielectric slab and the incident fields they
//! generate along a semi-infinite waveguide.

use crate::error::{Error, Result};
use crate::geometry::{Polarization, Vec2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Modes with gamma_cl * h below this are too close to cutoff to be used.
pub const CUTOFF_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlabSpec {
    pub k_co: f64,
    pub k_cl: f64,
    pub h: f64,
    pub polarization: Polarization,
}

impl SlabSpec {
    pub fn new(k_co: f64, k_cl: f64, h: f64, polarization: Polarization) -> Result<Self> {
        if !(k_cl > 0.0 && k_co > k_cl && k_co.is_finite()) {
            return Err(Error::Config(format!(
                "slab needs k_co > k_cl > 0, got k_co={k_co}, k_cl={k_cl}"
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Config(format!("slab half-width must be positive, got {h}")));
        }
        Ok(Self { k_co, k_cl, h, polarization })
    }

    /// Normalized frequency V = h sqrt(k_co^2 - k_cl^2).
    pub fn v_number(&self) -> f64 {
        self.h * (self.k_co * self.k_co - self.k_cl * self.k_cl).sqrt()
    }

    /// Derivative weight across the core/cladding interface.
    pub fn nu_wg(&self) -> f64 {
        match self.polarization {
            Polarization::TE => 1.0,
            Polarization::TM => (self.k_cl / self.k_co).powi(2),
        }
    }

    /// Number of guided modes predicted by the V number, ceil(2V/pi).
    pub fn expected_mode_count(&self) -> usize {
        (2.0 * self.v_number() / std::f64::consts::PI).ceil() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    /// Position in the list ordered by decreasing k_z.
    pub index: usize,
    /// Position among modes of the same parity.
    pub order: usize,
    pub parity: Parity,
    pub k_z: f64,
    pub gamma_co: f64,
    pub gamma_cl: f64,
    /// Factor making max |u_perp| equal to 1.
    pub scale: f64,
}

/// Dispersion function in the variable X = gamma_co h, written without
/// tangent poles. Zero exactly at the guided modes.
fn dispersion(parity: Parity, x: f64, v: f64, nu: f64) -> f64 {
    let y = (v * v - x * x).max(0.0).sqrt();
    let (s, c) = x.sin_cos();
    match parity {
        Parity::Symmetric => nu * x * s - y * c,
        Parity::Antisymmetric => nu * x * c + y * s,
    }
}

/// Residual of the dispersion relation, normalized by V.
pub fn dispersion_residual(mode: &Mode, spec: &SlabSpec) -> f64 {
    let v = spec.v_number();
    dispersion(mode.parity, mode.gamma_co * spec.h, v, spec.nu_wg()).abs() / v.max(1.0)
}

fn bisect(parity: Parity, mut lo: f64, mut hi: f64, v: f64, nu: f64) -> f64 {
    let mut flo = dispersion(parity, lo, v, nu);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = dispersion(parity, mid, v, nu);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    // One guarded Newton step with a numerical slope.
    let dx = 1e-7 * x.max(1e-3);
    let f = dispersion(parity, x, v, nu);
    let df = (dispersion(parity, x + dx, v, nu) - dispersion(parity, x - dx, v, nu)) / (2.0 * dx);
    let xn = x - f / df;
    if df.is_finite() && xn > lo && xn < hi && dispersion(parity, xn, v, nu).abs() < f.abs() {
        xn
    } else {
        x
    }
}

/// All guided modes ordered by decreasing k_z. Modes closer to cutoff than
/// [`CUTOFF_TOLERANCE`] are dropped.
pub fn find_modes(spec: &SlabSpec) -> Vec<Mode> {
    let v = spec.v_number();
    let nu = spec.nu_wg();
    let h = spec.h;
    let mut roots: Vec<(f64, Parity)> = Vec::new();
    // Symmetric roots live in (m pi, m pi + pi/2), antisymmetric ones in
    // (m pi + pi/2, (m+1) pi); each such interval below V holds exactly one.
    let mut m = 0usize;
    loop {
        let base = m as f64 * std::f64::consts::PI;
        let mut any = false;
        for (offset, parity) in [(0.0, Parity::Symmetric), (FRAC_PI_2, Parity::Antisymmetric)] {
            let lo = base + offset;
            if lo >= v {
                continue;
            }
            any = true;
            let hi = (lo + FRAC_PI_2).min(v);
            roots.push((bisect(parity, lo, hi, v, nu), parity));
        }
        if !any {
            break;
        }
        m += 1;
    }
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out = Vec::new();
    let mut counts = [0usize; 2];
    for (x, parity) in roots {
        let gamma_co = x / h;
        let y = (v * v - x * x).max(0.0).sqrt();
        if y < CUTOFF_TOLERANCE {
            continue;
        }
        let gamma_cl = y / h;
        let k_z = (spec.k_co * spec.k_co - gamma_co * gamma_co).sqrt();
        let scale = match parity {
            Parity::Symmetric => 1.0,
            Parity::Antisymmetric => {
                if x >= FRAC_PI_2 {
                    1.0
                } else {
                    1.0 / x.sin()
                }
            }
        };
        let slot = if parity == Parity::Symmetric { 0 } else { 1 };
        out.push(Mode { index: out.len(), order: counts[slot], parity, k_z, gamma_co, gamma_cl, scale });
        counts[slot] += 1;
    }
    out
}

/// Picks the `order`-th mode of the given parity.
pub fn select_mode(spec: &SlabSpec, parity: Parity, order: usize) -> Result<Mode> {
    find_modes(spec)
        .into_iter()
        .find(|m| m.parity == parity && m.order == order)
        .ok_or_else(|| {
            Error::NoMode(format!(
                "slab (k_co={}, k_cl={}, h={}) has no {:?} mode of order {order}",
                spec.k_co, spec.k_cl, spec.h, parity
            ))
        })
}

/// Which analytic branch of the profile to use. `Auto` picks by position;
/// the explicit branches give one-sided limits on the interfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Auto,
    Core,
    Cladding,
}

impl Mode {
    fn v(&self, t: f64) -> (f64, f64) {
        match self.parity {
            Parity::Symmetric => (t.cos(), -t.sin()),
            Parity::Antisymmetric => (t.sin(), t.cos()),
        }
    }

    /// Transverse profile and its derivative.
    pub fn profile_with_branch(&self, spec: &SlabSpec, x: f64, branch: Branch) -> (f64, f64) {
        let h = spec.h;
        let in_core = match branch {
            Branch::Auto => x.abs() <= h,
            Branch::Core => true,
            Branch::Cladding => false,
        };
        let (val, der) = if in_core {
            let (a, b) = self.v(self.gamma_co * x);
            (a, self.gamma_co * b)
        } else if x >= 0.0 {
            let e = (-self.gamma_cl * (x - h)).exp();
            let edge = self.v(self.gamma_co * h).0;
            (edge * e, -self.gamma_cl * edge * e)
        } else {
            let e = (self.gamma_cl * (x + h)).exp();
            let edge = self.v(-self.gamma_co * h).0;
            (edge * e, self.gamma_cl * edge * e)
        };
        (self.scale * val, self.scale * der)
    }

    pub fn profile(&self, spec: &SlabSpec, x: f64) -> f64 {
        self.profile_with_branch(spec, x, Branch::Auto).0
    }
}

/// Local frame of a semi-infinite waveguide: `z` runs along the guide toward
/// the structure (so the waveguide itself occupies z < 0) and `x` is the
/// transverse coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiwFrame {
    pub origin: Vec2,
    /// Unit vector pointing from the origin out along the guide.
    pub direction: Vec2,
}

impl SiwFrame {
    /// Transverse axis x_loc. (z_loc, x_loc) is a rotation of (z, x), so a
    /// guide pointing to -z has x_loc = x.
    pub fn perp(&self) -> Vec2 {
        (-self.direction).perp()
    }

    /// Global point to (z_loc, x_loc).
    pub fn to_local(&self, r: Vec2) -> (f64, f64) {
        let d = r - self.origin;
        (-d.dot(self.direction), d.dot(self.perp()))
    }

    pub fn to_global(&self, z: f64, x: f64) -> Vec2 {
        self.origin + self.direction * (-z) + self.perp() * x
    }
}

/// Single-mode incident field u = u_perp(x) exp(i k_z z) and its global
/// gradient.
pub fn mode_field(mode: &Mode, spec: &SlabSpec, frame: &SiwFrame, r: Vec2, branch: Branch) -> (Complex64, [Complex64; 2]) {
    let (z, x) = frame.to_local(r);
    let (p, dp) = mode.profile_with_branch(spec, x, branch);
    let phase = Complex64::from_polar(1.0, mode.k_z * z);
    let u = phase * p;
    let du_dz = Complex64::i() * mode.k_z * u;
    let du_dx = phase * dp;
    // grad z_loc = -direction, grad x_loc = perp.
    let dir = frame.direction;
    let perp = frame.perp();
    let g = [-du_dz * dir.z + du_dx * perp.z, -du_dz * dir.x + du_dx * perp.x];
    (u, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn te(k_co: f64, k_cl: f64, h: f64) -> SlabSpec {
        SlabSpec::new(k_co, k_cl, h, Polarization::TE).unwrap()
    }

    #[test]
    fn two_modes_for_reference_slab() {
        let spec = te(2.0 * PI, PI, 0.5);
        assert!((spec.v_number() - 2.7207).abs() < 1e-4);
        let modes = find_modes(&spec);
        assert_eq!(modes.len(), 2);
        assert_eq!(modes[0].parity, Parity::Symmetric);
        assert_eq!(modes[1].parity, Parity::Antisymmetric);
        for m in &modes {
            assert!(m.k_z > PI && m.k_z < 2.0 * PI);
            assert!(dispersion_residual(m, &spec) < 1e-12);
        }
    }

    #[test]
    fn single_mode_branch_arm() {
        assert_eq!(find_modes(&te(2.0 * PI, PI, 0.25)).len(), 1);
    }

    #[test]
    fn weak_guidance_keeps_fundamental() {
        let spec = te(1.0 + 1e-4, 1.0, 0.5);
        let modes = find_modes(&spec);
        assert_eq!(modes.len(), 1);
        assert!(modes[0].k_z > 1.0 && modes[0].k_z - 1.0 < 1e-4);
    }

    #[test]
    fn rejects_inverted_contrast() {
        assert!(SlabSpec::new(1.0, 1.0, 0.5, Polarization::TE).is_err());
        assert!(SlabSpec::new(1.0, 2.0, 0.5, Polarization::TE).is_err());
    }

    #[test]
    fn profile_is_continuous_and_has_parity() {
        let spec = te(2.0 * PI, PI, 0.5);
        for m in find_modes(&spec) {
            for xe in [0.5, -0.5] {
                let a = m.profile_with_branch(&spec, xe, Branch::Core).0;
                let b = m.profile_with_branch(&spec, xe, Branch::Cladding).0;
                assert!((a - b).abs() < 1e-14);
            }
            let sign = if m.parity == Parity::Symmetric { 1.0 } else { -1.0 };
            for i in 0..50 {
                let x = -3.0 + 6.0 * i as f64 / 49.0;
                assert!((m.profile(&spec, -x) - sign * m.profile(&spec, x)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn tm_derivative_jump_is_weighted() {
        let spec = SlabSpec::new(2.0 * PI, 2.0 * PI / 3.0, 0.5, Polarization::TM).unwrap();
        for m in find_modes(&spec) {
            let core = m.profile_with_branch(&spec, 0.5, Branch::Core).1;
            let clad = m.profile_with_branch(&spec, 0.5, Branch::Cladding).1;
            assert!((clad - spec.nu_wg() * core).abs() < 1e-10);
        }
    }

    #[test]
    fn max_normalization() {
        let spec = te(2.0 * PI, PI, 0.5);
        for m in find_modes(&spec) {
            let mx = (0..2001)
                .map(|i| m.profile(&spec, -2.0 + 4.0 * i as f64 / 2000.0).abs())
                .fold(0.0, f64::max);
            // Grid spacing 2e-3 bounds the sampled peak deficit by ~1e-4.
            assert!(mx <= 1.0 + 1e-12 && mx > 1.0 - 1e-4, "{mx}");
            let peak = if m.parity == Parity::Symmetric { 0.0 } else { (FRAC_PI_2 / m.gamma_co).min(spec.h) };
            assert!((m.profile(&spec, peak).abs() - 1.0).abs() < 1e-14);
        }
    }
}
