//! End-to-end runs of the `wgf` binary: exit codes, output schemas and
//! determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use wgf::cli::Diagnostics;
use wgf::output::{read_grid, read_rows, ConvergenceRow, DensityRow, ModeRow, ProbeRow, WindowDemoRow};

fn wgf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgf")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scenes_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

#[test]
fn modes_table() {
    let o = wgf(&["modes", "--kco", "6.2832", "--kcl", "3.1416", "--h", "0.5", "--pol", "TE"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows: Vec<ModeRow> = read_rows(o.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.residual < 1e-12));

    let o = wgf(&["modes", "--kco", "2*pi", "--kcl", "pi", "--h", "0.25"]);
    let rows: Vec<ModeRow> = read_rows(o.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 1);

    let o = wgf(&["modes", "--kco", "pi", "--kcl", "pi", "--h", "0.5"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("k_co > k_cl"));
}

#[test]
fn window_demo_table() {
    let o = wgf(&["window-demo"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows: Vec<WindowDemoRow> = read_rows(o.stdout.as_slice()).unwrap();
    let sizes: Vec<f64> = rows.iter().map(|r| r.a).collect();
    assert_eq!(sizes, [10.0, 20.0, 25.0, 50.0, 75.0, 100.0]);
    assert!(rows.windows(2).all(|w| w[1].err_w < w[0].err_w));
}

fn solve_flat(out: &Path, grid: Option<&str>) -> Output {
    let mut args = vec!["solve", "--scene", "FLAT", "--window-lambda", "4", "--ppw", "8", "--out", out.to_str().unwrap()];
    if let Some(g) = grid {
        args.extend(["--grid", g]);
    }
    wgf(&args)
}

#[test]
fn solve_outputs_round_trip_and_repeat_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = solve_flat(&a, Some("-6:6:25,-2:2:9"));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(code(&solve_flat(&b, Some("-6:6:25,-2:2:9"))), 0);
    for f in ["densities.csv", "grid.csv", "probe.csv", "diagnostics.json"] {
        let (x, y) = (std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap());
        assert!(x == y, "{f} differs between identical runs");
    }

    let text = std::fs::read(a.join("grid.csv")).unwrap();
    let (header, rows) = read_grid(text.as_slice()).unwrap();
    assert_eq!(header.scene, "FLAT");
    assert_eq!((header.z.n, header.x.n), (25, 9));
    // The grid rows x = +-0.5 lie on the interfaces and are masked.
    let masked: Vec<_> = rows.iter().filter(|r| r.region == 0).collect();
    assert_eq!(masked.len(), 2 * 25);
    assert!(masked.iter().all(|r| r.x.abs() == 0.5 && r.re_u.is_nan()));
    assert!(rows.iter().filter(|r| r.region != 0).all(|r| r.re_u.is_finite()));

    let dens: Vec<DensityRow> = read_rows(std::fs::File::open(a.join("densities.csv")).unwrap()).unwrap();
    let diag: Diagnostics = serde_json::from_str(&std::fs::read_to_string(a.join("diagnostics.json")).unwrap()).unwrap();
    assert_eq!(2 * dens.len(), diag.unknowns);
    assert_eq!(diag.error_reference.as_deref(), Some("exact mode"));
    assert!(diag.error.unwrap() < 1e-2);
    let probe: Vec<ProbeRow> = read_rows(std::fs::File::open(a.join("probe.csv")).unwrap()).unwrap();
    assert_eq!(probe.len(), 100);

    // Writing the parsed rows again reproduces the file.
    let mut again = Vec::new();
    wgf::output::write_grid(&mut again, &header, &rows).unwrap();
    assert_eq!(again, text);

    let timings: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("timings.json")).unwrap()).unwrap();
    assert!(timings["total_seconds"].as_f64().unwrap() > 0.0);
}

#[test]
fn reference_file_sets_probe_and_error() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    assert_eq!(code(&solve_flat(&a, None)), 0);
    assert!(!a.join("grid.csv").exists());
    let reference = a.join("probe.csv");
    let b = dir.path().join("b");
    let o = wgf(&[
        "solve", "--scene", "FLAT", "--window-lambda", "4", "--ppw", "8", "--out", b.to_str().unwrap(),
        "--reference", reference.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let diag: Diagnostics = serde_json::from_str(&std::fs::read_to_string(b.join("diagnostics.json")).unwrap()).unwrap();
    assert_eq!(diag.error, Some(0.0));
}

#[test]
fn bad_inputs_exit_with_config_status() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();

    let o = wgf(&["solve", "--scene", "NOWHERE.json", "--window", "5", "--out", out]);
    assert_eq!(code(&o), 2);

    let bad = dir.path().join("bad.json");
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(scenes_dir().join("flat.json")).unwrap()).unwrap();
    v["regions"][1]["wavenumber"] = serde_json::Value::from("2*pi+");
    std::fs::write(&bad, v.to_string()).unwrap();
    let o = wgf(&["solve", "--scene", bad.to_str().unwrap(), "--window", "5", "--out", out]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("regions[1].wavenumber"), "{}", stderr(&o));

    let o = wgf(&["solve", "--scene", "FLAT", "--grid", "0:1:0,0:1:3", "--out", out]);
    assert_eq!(code(&o), 2);
    let o = wgf(&["solve", "--scene", "FLAT", "--ppw", "3", "--out", out]);
    assert_eq!(code(&o), 2);
    // A window this small puts the cross-section through the disk.
    let o = wgf(&["solve", "--scene", "DISK", "--window-lambda", "1", "--out", out]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("curve 4"), "{}", stderr(&o));

    let o = wgf(&["converge", "--scene", "FLAT", "--sweep", "4"]);
    assert_eq!(code(&o), 2);
    let o = wgf(&["converge", "--scene", "FLAT", "--sweep", "3,4,5", "--reference-lambda", "6"]);
    assert_eq!(code(&o), 2);
    let o = wgf(&["scene", "SQUARE"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn probe_on_interface_is_a_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let probe = dir.path().join("p.csv");
    std::fs::write(&probe, "z,x\n0,0.5\n").unwrap();
    let out = dir.path().join("o");
    let o = wgf(&[
        "solve", "--scene", "FLAT", "--window-lambda", "4", "--ppw", "8", "--probe", probe.to_str().unwrap(), "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn converge_against_exact_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = wgf(&["converge", "--scene", "FLAT", "--sweep", "3,4,5", "--ppw", "8", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows: Vec<ConvergenceRow> = read_rows(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.windows(2).all(|w| w[1].error < w[0].error));
    assert_eq!(rows[0].window_a, 6.0);
}

#[test]
fn scene_command_matches_shipped_files() {
    for name in wgf::scenes::SCENE_NAMES {
        let o = wgf(&["scene", name]);
        assert_eq!(code(&o), 0);
        let file = std::fs::read(scenes_dir().join(format!("{}.json", name.to_lowercase()))).unwrap();
        assert!(o.stdout == file, "{name}");
    }
}
