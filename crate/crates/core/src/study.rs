//! Probe sampling, window-size convergence sweeps and their slope analysis.

use crate::error::{Error, Result};
use crate::geometry::{Illumination, Scene, Vec2};
use crate::modes::{mode_field, select_mode, Branch};
use crate::solver::{error_metric, solve, SolveOptions, Solution};
use crate::window::WindowParams;
use faer::linalg::solvers::SolveLstsq;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use web_time::Instant;

type C = Complex64;

/// Total field at the probe points; points on an interface are an error.
pub fn probe_values(sol: &Solution, probe: &[Vec2]) -> Result<Vec<C>> {
    sol.evaluate_points(probe)
        .into_iter()
        .zip(probe)
        .map(|(v, p)| v.map(|v| v.u).ok_or_else(|| Error::Evaluation(format!("probe point {p:?} lies on an interface"))))
        .collect()
}

/// The incident mode field at the probe points, which is the exact total
/// field when the illuminated guide continues undisturbed (FLAT).
pub fn incident_mode_values(scene: &Scene, probe: &[Vec2]) -> Result<Vec<C>> {
    let Illumination::Mode { siw, terms } = &scene.illumination else {
        return Err(Error::Config("an exact mode reference needs mode illumination".into()));
    };
    let info = scene.siw_info(*siw)?;
    let modes = terms
        .iter()
        .map(|t| Ok((select_mode(&info.spec, t.parity, t.order)?, t.amplitude)))
        .collect::<Result<Vec<_>>>()?;
    Ok(probe
        .iter()
        .map(|&r| modes.iter().map(|(m, a)| a * mode_field(m, &info.spec, &info.frame, r, Branch::Auto).0).sum())
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    /// The incident mode itself.
    ExactMode,
    /// A solve at this A / lambda.
    Window(f64),
    /// Precomputed probe values.
    Values(Vec<C>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a_over_lambda: f64,
    pub window_a: f64,
    pub error: f64,
    pub unknowns: usize,
    pub seconds: f64,
}

/// Settings shared by every solve of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub alpha: f64,
    pub ppw: f64,
}

/// Errors of the probe field for each A / lambda in `sweep` against the
/// reference, with lambda the largest wavelength of the scene.
pub fn convergence_sweep(
    scene: &Scene,
    probe: &[Vec2],
    sweep: &[f64],
    reference: &Reference,
    settings: SweepSettings,
) -> Result<Vec<SweepRow>> {
    if sweep.len() < 3 {
        return Err(Error::Config(format!("a sweep needs at least 3 window sizes, got {}", sweep.len())));
    }
    if sweep.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::Config("window sizes must be positive".into()));
    }
    let max = sweep.iter().copied().fold(0.0, f64::max);
    let lambda = scene.max_wavelength();
    let run = |al: f64| -> Result<(Vec<C>, usize, f64)> {
        let t = Instant::now();
        let w = WindowParams::new(al * lambda, settings.alpha)?;
        let sol = solve(scene, &SolveOptions::new(w, settings.ppw))?;
        let v = probe_values(&sol, probe)?;
        Ok((v, sol.diagnostics.unknowns, t.elapsed().as_secs_f64()))
    };
    let ref_values = match reference {
        Reference::ExactMode => incident_mode_values(scene, probe)?,
        Reference::Window(r) => {
            if !(*r > 1.5 * max) {
                return Err(Error::Config(format!(
                    "reference A/lambda {r} must exceed 1.5 x the sweep maximum {max}"
                )));
            }
            run(*r)?.0
        }
        Reference::Values(v) => {
            if v.len() != probe.len() {
                return Err(Error::Config(format!(
                    "reference has {} values for {} probe points",
                    v.len(),
                    probe.len()
                )));
            }
            v.clone()
        }
    };
    sweep
        .iter()
        .map(|&al| {
            let (v, unknowns, seconds) = run(al)?;
            Ok(SweepRow { a_over_lambda: al, window_a: al * lambda, error: error_metric(&v, &ref_values)?, unknowns, seconds })
        })
        .collect()
}

/// Consecutive log-log slopes -d ln(err) / d ln(A).
pub fn loglog_slopes(rows: &[SweepRow]) -> Vec<f64> {
    rows.windows(2)
        .map(|w| -(w[1].error / w[0].error).ln() / (w[1].a_over_lambda / w[0].a_over_lambda).ln())
        .collect()
}

/// RMS residual of the least-squares line through (ln A, ln err) divided by
/// that of the least-squares parabola. Large values mean the log-log curve
/// bends, i.e. no fixed power law describes the sweep.
pub fn power_law_misfit(rows: &[SweepRow]) -> f64 {
    let x: Vec<f64> = rows.iter().map(|r| r.a_over_lambda.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.error.ln()).collect();
    let line = poly_fit_rms(&x, &y, 1);
    let quad = poly_fit_rms(&x, &y, 2);
    line / quad.max(f64::MIN_POSITIVE)
}

fn poly_fit_rms(x: &[f64], y: &[f64], degree: usize) -> f64 {
    let m = degree + 1;
    let a = faer::Mat::<f64>::from_fn(x.len(), m, |i, j| x[i].powi(j as i32));
    let b = faer::Mat::<f64>::from_fn(y.len(), 1, |i, _| y[i]);
    let coef = a.qr().solve_lstsq(&b);
    let r = &a * &coef - &b;
    (r.squared_norm_l2() / x.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(f: impl Fn(f64) -> f64) -> Vec<SweepRow> {
        [4.0, 6.0, 8.0, 10.0, 12.0]
            .iter()
            .map(|&a| SweepRow { a_over_lambda: a, window_a: a, error: f(a), unknowns: 0, seconds: 0.0 })
            .collect()
    }

    #[test]
    fn slopes_of_power_law_are_constant() {
        let r = rows(|a| 3.0 * a.powf(-5.0));
        for s in loglog_slopes(&r) {
            assert!((s - 5.0).abs() < 1e-12);
        }
        assert!(power_law_misfit(&r) < 10.0);
    }

    #[test]
    fn exponential_decay_bends() {
        let r = rows(|a| (-2.0 * a).exp());
        let s = loglog_slopes(&r);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
        // A line fit leaves a curvature residual that a parabola removes.
        assert!(power_law_misfit(&r) >= 10.0);
    }
}
