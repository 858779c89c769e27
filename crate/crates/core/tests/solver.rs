//! Solver-level checks on the named scenes.

use num_complex::Complex64 as C;
use wgf::geometry::discretize::{discretize, truncate_boundary, DiscretizationParams};
use wgf::geometry::{Illumination, ModeTerm, Vec2};
use wgf::modes::{select_mode, Parity};
use wgf::scenes::named_scene;
use wgf::solver::{error_metric, modal_overlap, solve, GridAxis, GridSpec, SolveOptions};
use wgf::study::probe_values;
use wgf::window::WindowParams;

fn flat_window(a_over_lambda: f64, alpha: f64) -> WindowParams {
    WindowParams::new(a_over_lambda * 2.0, alpha).unwrap()
}

#[test]
fn flat_transmission_is_one() {
    let ns = named_scene("FLAT").unwrap();
    let w = flat_window(9.0, 0.5);
    let sol = solve(&ns.scene, &SolveOptions::new(w, 10.0)).unwrap();
    let info = ns.scene.siw_info(0).unwrap();
    let mode = select_mode(&info.spec, Parity::Symmetric, 0).unwrap();
    // Guide 0 points along -z, so its local z equals the global z.
    let z = w.alpha * w.a / 2.0;
    let t = modal_overlap(&sol, 0, &info.spec, &mode, z, 3.0).unwrap();
    assert!((t.norm() - 1.0).abs() < 1e-6, "|T| = {}", t.norm());
    let phase = C::from_polar(1.0, mode.k_z * z);
    assert!((t - phase).norm() < 1e-6, "T = {t}, expected {phase}");
}

#[test]
fn flat_deep_cladding_is_dark() {
    let ns = named_scene("FLAT").unwrap();
    let sol = solve(&ns.scene, &SolveOptions::new(flat_window(9.0, 0.5), 10.0)).unwrap();
    let info = ns.scene.siw_info(0).unwrap();
    let mode = select_mode(&info.spec, Parity::Symmetric, 0).unwrap();
    let x = info.h + 10.0 / mode.gamma_cl;
    for p in [Vec2::new(0.0, x), Vec2::new(3.0, -x)] {
        let u = sol.field_at(p).unwrap().u;
        assert!(u.norm() < 1e-4, "|u| = {} at {p:?}", u.norm());
    }
}

#[test]
fn solution_is_linear_in_illumination() {
    let mut ns = named_scene("FLAT").unwrap();
    let opts = SolveOptions::new(flat_window(4.0, 0.5), 8.0);
    let term = |parity, amplitude| ModeTerm { parity, order: 0, amplitude };
    let mut run = |terms: Vec<ModeTerm>| {
        ns.scene.illumination = Illumination::Mode { siw: 0, terms };
        let s = solve(&ns.scene, &opts).unwrap();
        let n = s.phi.len();
        (0..n).map(|j| (s.phi[j] + s.phi_inc[j], s.psi[j] + s.psi_inc[j])).collect::<Vec<_>>()
    };
    let (a, b) = (C::new(0.7, -0.2), C::new(-0.3, 1.1));
    let one = C::new(1.0, 0.0);
    let sym = run(vec![term(Parity::Symmetric, one)]);
    let anti = run(vec![term(Parity::Antisymmetric, one)]);
    let both = run(vec![term(Parity::Symmetric, a), term(Parity::Antisymmetric, b)]);
    let scale = both.iter().map(|p| p.0.norm().max(p.1.norm())).fold(0.0, f64::max);
    for ((s, t), c) in sym.iter().zip(&anti).zip(&both) {
        assert!((a * s.0 + b * t.0 - c.0).norm() < 1e-10 * scale);
        assert!((a * s.1 + b * t.1 - c.1).norm() < 1e-10 * scale);
    }
}

#[test]
fn zero_illumination_gives_zero_field() {
    let mut ns = named_scene("FLAT").unwrap();
    let Illumination::Mode { terms, .. } = &mut ns.scene.illumination else { unreachable!() };
    terms[0].amplitude = C::new(0.0, 0.0);
    let sol = solve(&ns.scene, &SolveOptions::new(flat_window(4.0, 0.5), 8.0)).unwrap();
    assert!(sol.phi.iter().chain(&sol.psi).all(|v| v.norm() == 0.0));
    assert!(probe_values(&sol, &ns.probe).unwrap().iter().all(|v| v.norm() == 0.0));
}

#[test]
fn grid_masks_interfaces_and_te_e_equals_u() {
    let ns = named_scene("FLAT").unwrap();
    let sol = solve(&ns.scene, &SolveOptions::new(flat_window(4.0, 0.5), 8.0)).unwrap();
    let spec = GridSpec { z: GridAxis { min: -2.0, max: 2.0, n: 5 }, x: GridAxis { min: -0.5, max: 0.5, n: 3 } };
    let g = sol.evaluate_grid(&spec).unwrap();
    for iz in 0..5 {
        assert!(g.get(iz, 0).is_none() && g.get(iz, 2).is_none());
        let v = g.get(iz, 1).unwrap();
        assert_eq!(v.region, 2);
        let em = wgf::solver::field_components(v.u, v.grad, 2.0 * std::f64::consts::PI, ns.scene.polarization, Default::default());
        assert_eq!(em.e[1], v.u);
    }
}

#[test]
fn lbend_corner_nodes_are_dense() {
    let ns = named_scene("LBEND").unwrap();
    let lambda = ns.scene.min_wavelength();
    let w = WindowParams::new(ns.window_lambdas * ns.scene.max_wavelength(), 0.5).unwrap();
    let tb = truncate_boundary(&ns.scene, w).unwrap();
    let db = discretize(&tb, &DiscretizationParams::with_ppw(10.0), lambda).unwrap();
    let h = 0.5;
    for corner in [Vec2::new(h, -h), Vec2::new(-h, h)] {
        let count = |lo: f64, hi: f64| {
            db.nodes.iter().filter(|n| (lo..hi).contains(&(n.pos - corner).norm())).count() as f64
        };
        // Two arms leave each corner.
        let near = count(0.0, lambda / 10.0) / (2.0 * lambda / 10.0);
        let ambient = count(2.0 * lambda, 4.0 * lambda) / (2.0 * 2.0 * lambda);
        assert!(near >= 3.0 * ambient, "corner {corner:?}: {near} vs ambient {ambient}");
    }
}

#[test]
fn illum_reference_windows_agree() {
    let ns = named_scene("ILLUM").unwrap();
    let lambda = ns.scene.max_wavelength();
    // At alpha = 0.5 the A/lambda = 20 window error alone is ~2e-8.
    let run = |al: f64| {
        let sol = solve(&ns.scene, &SolveOptions::new(WindowParams::new(al * lambda, 0.3).unwrap(), 10.0)).unwrap();
        probe_values(&sol, &ns.probe).unwrap()
    };
    let e = error_metric(&run(20.0), &run(24.0)).unwrap();
    assert!(e < 1e-8, "A/lambda 20 vs 24 differ by {e:.2e}");
}
