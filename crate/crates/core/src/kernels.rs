//! Helmholtz layer-potential kernels, each split into its Laplace part and a
//! remainder that is at most logarithmically singular. Summing the Laplace
//! parts before evaluation lets the wavenumber-difference kernels of the
//! transmission system cancel exactly.

use crate::geometry::Vec2;
use crate::specialfn::hankel01_split;
use num_complex::Complex64;
use std::f64::consts::PI;

const I4: Complex64 = Complex64::new(0.0, 0.25);
const INV_2PI: f64 = 0.5 / PI;

/// Relative position of a target r and a source r' with the normals at
/// both points. `d = r - r'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geom {
    pub d: Vec2,
    pub rho: f64,
    /// d . n(r)
    pub dn_t: f64,
    /// d . n(r')
    pub dn_s: f64,
    /// n(r) . n(r')
    pub nn: f64,
    /// n(r')
    pub n_s: Vec2,
}

impl Geom {
    pub fn new(target: Vec2, n_t: Vec2, source: Vec2, n_s: Vec2) -> Self {
        let d = target - source;
        Self { d, rho: d.norm(), dn_t: d.dot(n_t), dn_s: d.dot(n_s), nn: n_t.dot(n_s), n_s }
    }

    /// From a chord computed by the caller along with its normal projections.
    pub fn from_chord(d: Vec2, dn_t: f64, dn_s: f64, n_t: Vec2, n_s: Vec2) -> Self {
        Self { d, rho: d.norm(), dn_t, dn_s, nn: n_t.dot(n_s), n_s }
    }
}

/// Contribution of one region to a transmission-operator block: the
/// D and N kernels are weighted by `c_dn`, the S and K kernels by `c_sk`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionTerm {
    pub k: f64,
    pub c_dn: f64,
    pub c_sk: f64,
}

/// Full single-wavenumber kernels [S, D, K, N]:
/// S = G, D = dG/dn', K = dG/dn, N = d^2 G / dn dn'.
pub fn single_kernels(g: &Geom, k: f64) -> [Complex64; 4] {
    combined_kernels(g, &[RegionTerm { k, c_dn: 1.0, c_sk: 1.0 }])
}

/// Weighted sums over regions, returned as [sum c_dn D, sum c_sk S,
/// sum c_dn N, sum c_sk K], the order of the 2x2 transmission blocks.
pub fn combined_kernels(g: &Geom, terms: &[RegionTerm]) -> [Complex64; 4] {
    let rho = g.rho;
    let r2 = rho * rho;
    let c_dn: f64 = terms.iter().map(|t| t.c_dn).sum();
    let c_sk: f64 = terms.iter().map(|t| t.c_sk).sum();
    let mut dd = 0.0;
    let mut ss = 0.0;
    let mut nn = 0.0;
    let mut kk = 0.0;
    if c_sk != 0.0 {
        ss += c_sk * (-rho.ln() * INV_2PI);
        kk += c_sk * (-g.dn_t * INV_2PI / r2);
    }
    if c_dn != 0.0 {
        dd += c_dn * (g.dn_s * INV_2PI / r2);
        nn += c_dn * (-g.dn_t * g.dn_s / (PI * r2 * r2) + g.nn * INV_2PI / r2);
    }
    let mut out = [Complex64::new(dd, 0.0), Complex64::new(ss, 0.0), Complex64::new(nn, 0.0), Complex64::new(kk, 0.0)];
    let ratio = g.dn_t * g.dn_s / r2;
    for t in terms {
        let x = t.k * rho;
        let h = hankel01_split(x);
        let g_reg = Complex64::new(-t.k.ln() * INV_2PI, 0.0) + I4 * h.h0_reg;
        let h1r_over_rho = t.k * h.h1_reg / rho;
        let d_reg = I4 * h1r_over_rho * g.dn_s;
        let k_reg = -I4 * h1r_over_rho * g.dn_t;
        let n_reg = I4 * (t.k * t.k * (h.h0 - 2.0 * h.h1_reg / x) * ratio + h1r_over_rho * g.nn);
        out[0] += t.c_dn * d_reg;
        out[1] += t.c_sk * g_reg;
        out[2] += t.c_dn * n_reg;
        out[3] += t.c_sk * k_reg;
    }
    out
}

/// G and its gradient with respect to the target, and the double-layer
/// kernel dG/dn' with its gradient: [G, dG/dz, dG/dx, D, dD/dz, dD/dx].
/// Only valid away from the source point.
pub fn potential_kernels(target: Vec2, source: Vec2, n_s: Vec2, k: f64) -> [Complex64; 6] {
    potential_kernels_geom(&Geom::new(target, Vec2::ZERO, source, n_s), k)
}

pub fn potential_kernels_geom(geom: &Geom, k: f64) -> [Complex64; 6] {
    let d = geom.d;
    let n_s = geom.n_s;
    let rho = geom.rho;
    let x = k * rho;
    let h = hankel01_split(x);
    let g = I4 * h.h0;
    // G' = dG/drho = -(i/4) k H1.
    let gp = -I4 * k * h.h1;
    let dns = geom.dn_s;
    // D = -G' (d . n_s) / rho; grad D = -(G'' - G'/rho) (d.n_s) d / rho^2 - G' n_s / rho.
    let gpp = -I4 * k * k * (h.h0 - h.h1 / x);
    let dval = -gp * dns / rho;
    let a = (gpp - gp / rho) * dns / (rho * rho);
    let b = gp / rho;
    [
        g,
        gp * d.z / rho,
        gp * d.x / rho,
        dval,
        -(a * d.z + b * n_s.z),
        -(a * d.x + b * n_s.x),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::{hankel1_0, hankel1_1};

    fn direct(g: &Geom, k: f64) -> [Complex64; 4] {
        // Unsplit formulas as an oracle away from the diagonal.
        let x = k * g.rho;
        let h0 = hankel1_0(x).unwrap();
        let h1 = hankel1_1(x).unwrap();
        let s = I4 * h0;
        let d = I4 * k * h1 * g.dn_s / g.rho;
        let kk = -I4 * k * h1 * g.dn_t / g.rho;
        let h1p = h0 - h1 / x;
        let p = g.dn_t * g.dn_s;
        let n = I4 * (k * k * h1p * p / (g.rho * g.rho) - k * h1 * p / g.rho.powi(3) + k * h1 * g.nn / g.rho);
        [d, s, n, kk]
    }

    #[test]
    fn split_matches_direct() {
        let t = Vec2::new(0.3, -0.2);
        let nt = Vec2::from_angle(0.7);
        for (src, ang) in [(Vec2::new(1.1, 0.4), 2.0), (Vec2::new(0.31, -0.19), -1.0), (Vec2::new(-4.0, 3.0), 0.1)] {
            let g = Geom::new(t, nt, src, Vec2::from_angle(ang));
            for k in [0.5, PI, 20.0] {
                let a = single_kernels(&g, k);
                let b = direct(&g, k);
                for i in 0..4 {
                    assert!((a[i] - b[i]).norm() <= 1e-12 * (1.0 + b[i].norm()), "{i} {k} {} {}", a[i], b[i]);
                }
            }
        }
    }

    #[test]
    fn normal_derivative_by_differences() {
        let src = Vec2::new(0.2, 0.1);
        let ns = Vec2::from_angle(1.3);
        let tgt = Vec2::new(-0.9, 0.8);
        let nt = Vec2::from_angle(-0.4);
        let k = 3.0;
        let e = 1e-5;
        let s = |r: Vec2, rp: Vec2| single_kernels(&Geom::new(r, nt, rp, ns), k)[1];
        let fd_k = (s(tgt + nt * e, src) - s(tgt - nt * e, src)) / (2.0 * e);
        let fd_d = (s(tgt, src + ns * e) - s(tgt, src - ns * e)) / (2.0 * e);
        let kers = single_kernels(&Geom::new(tgt, nt, src, ns), k);
        assert!((fd_k - kers[3]).norm() < 1e-8);
        assert!((fd_d - kers[0]).norm() < 1e-8);
        let d = |r: Vec2| single_kernels(&Geom::new(r, nt, src, ns), k)[0];
        let fd_n = (d(tgt + nt * e) - d(tgt - nt * e)) / (2.0 * e);
        assert!((fd_n - kers[2]).norm() < 1e-7);
    }

    #[test]
    fn potential_gradients_by_differences() {
        let src = Vec2::new(0.2, 0.1);
        let ns = Vec2::from_angle(1.3);
        let tgt = Vec2::new(-0.6, 0.5);
        let k = 5.0;
        let e = 1e-6;
        let p = potential_kernels(tgt, src, ns, k);
        for (dir, gi, di) in [(Vec2::new(1.0, 0.0), 1, 4), (Vec2::new(0.0, 1.0), 2, 5)] {
            let a = potential_kernels(tgt + dir * e, src, ns, k);
            let b = potential_kernels(tgt - dir * e, src, ns, k);
            assert!(((a[0] - b[0]) / (2.0 * e) - p[gi]).norm() < 1e-7);
            assert!(((a[3] - b[3]) / (2.0 * e) - p[di]).norm() < 1e-7);
        }
        let s = single_kernels(&Geom::new(tgt, ns, src, ns), k);
        assert!((s[1] - p[0]).norm() < 1e-14);
        assert!((s[0] - p[3]).norm() < 1e-13);
    }

    #[test]
    fn te_difference_has_no_log_singularity() {
        // Same curve, equal coefficients of opposite sign: the S block must
        // stay bounded as rho -> 0.
        let terms = [RegionTerm { k: 2.0, c_dn: -1.0, c_sk: 1.0 }, RegionTerm { k: 5.0, c_dn: 1.0, c_sk: -1.0 }];
        let mut prev = None;
        for e in [1e-3, 1e-6, 1e-9, 1e-12] {
            let g = Geom::from_chord(Vec2::new(e, 0.0), 0.0, 0.0, Vec2::new(0.0, 1.0), Vec2::new(0.0, 1.0));
            let v = combined_kernels(&g, &terms);
            if let Some(p) = prev {
                let p: [Complex64; 4] = p;
                assert!((v[1] - p[1]).norm() < 1e-2);
                assert!(v[1].norm().is_finite());
            }
            prev = Some(v);
        }
        // Diagonal limit of G_reg is -(ln(k/2) + gamma)/(2 pi) + i/4.
        let g = Geom::from_chord(Vec2::new(1e-12, 0.0), 0.0, 0.0, Vec2::new(0.0, 1.0), Vec2::new(0.0, 1.0));
        let v = combined_kernels(&g, &terms)[1];
        let euler = 0.577_215_664_901_532_9;
        let lim = |k: f64| Complex64::new(-(k / 2.0).ln() * INV_2PI - euler * INV_2PI, 0.25);
        let want = lim(2.0) - lim(5.0);
        assert!((v - want).norm() < 1e-10, "{v} {want}");
    }
}
