//! Slow-rise window function and the windowed oscillatory integral demo.

use crate::error::{Error, Result};
use crate::quad::{adaptive_scalar, CompensatedSum, GaussLegendre};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Window half-size `a` and plateau fraction `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowParams {
    pub a: f64,
    pub alpha: f64,
}

impl WindowParams {
    pub fn new(a: f64, alpha: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Config(format!("window size must be positive, got {a}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Config(format!("plateau fraction must lie in (0,1), got {alpha}")));
        }
        Ok(Self { a, alpha })
    }

    /// Half-length of the plateau {w = 1}.
    pub fn plateau(&self) -> f64 {
        self.alpha * self.a
    }

    pub fn value(&self, z: f64) -> f64 {
        window_value(z, self)
    }
}

/// Window profile in the normalized rise variable: 1 for s <= 0, 0 for
/// s >= 1.
pub fn window_rise(s: f64) -> f64 {
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let t = 1.0 - s;
        (-2.0 * (-1.0 / (s * s)).exp() / (t * t)).exp()
    }
}

/// w_A(z).
pub fn window_value(z: f64, p: &WindowParams) -> f64 {
    let s = (z.abs() - p.alpha * p.a) / (p.a * (1.0 - p.alpha));
    window_rise(s)
}

/// One row of the windowed-integral convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemoRow {
    pub a: f64,
    pub i_w: Complex64,
    pub i_tr: Complex64,
    pub err_w: f64,
    pub err_tr: f64,
}

/// Reference value of the integral of exp(i a z)/sqrt(z) over [1, inf),
/// obtained by rotating the path to z = 1 + i t / a, which turns the
/// integrand into exp(-t) times a smooth factor.
pub fn oscillatory_reference(a: f64) -> Complex64 {
    let i = Complex64::i();
    let f = |t: f64| (-t).exp() / (Complex64::new(1.0, t / a)).sqrt();
    let mut total = Complex64::new(0.0, 0.0);
    let breaks = [0.0, 1.0, 4.0, 10.0, 20.0, 40.0, 80.0];
    for w in breaks.windows(2) {
        total += adaptive_scalar(f, w[0], w[1], 1e-18, 1e-16);
    }
    i / a * Complex64::from_polar(1.0, a) * total
}

/// Computes I_w(A) and I_tr(A) for the integrand exp(i a z)/sqrt(z) on
/// [1, A] with composite Gauss-Legendre panels of length at most
/// min(1, 2 pi / (ppw a)).
pub fn windowed_oscillatory_demo(a: f64, params: &WindowParams, quadrature_ppw: f64) -> Result<DemoRow> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("oscillation frequency must be positive, got {a}")));
    }
    if params.a <= 1.0 {
        return Err(Error::Config("window size must exceed the lower limit 1".into()));
    }
    let reference = oscillatory_reference(a);
    let panel = (2.0 * std::f64::consts::PI / (quadrature_ppw.max(1.0) * a)).min(1.0);
    let n_panels = ((params.a - 1.0) / panel).ceil() as usize;
    let h = (params.a - 1.0) / n_panels as f64;
    let gl = GaussLegendre::new(20);
    let mut sum_w = CompensatedSum::default();
    let mut sum_tr = CompensatedSum::default();
    for p in 0..n_panels {
        let lo = 1.0 + p as f64 * h;
        for (z, wq) in gl.mapped(lo, lo + h) {
            let f = Complex64::from_polar(wq / z.sqrt(), a * z);
            sum_tr.add(f);
            sum_w.add(f * window_value(z, params));
        }
    }
    let i_w = sum_w.value();
    let i_tr = sum_tr.value();
    Ok(DemoRow {
        a: params.a,
        i_w,
        i_tr,
        err_w: (reference - i_w).norm(),
        err_tr: (reference - i_tr).norm(),
    })
}
