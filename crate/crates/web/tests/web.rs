//! The browser entry points, called natively.

use wgf::output::{read_rows, ModeRow, WindowDemoRow};
use wgf_web::{field_image, modes_csv, window_demo_csv, ImageRequest, MAX_GRID_POINTS};

#[test]
fn window_demo_matches_core() {
    let csv = window_demo_csv("2*pi", 0.5, "10, 20,25").unwrap();
    let rows: Vec<WindowDemoRow> = read_rows(csv.as_bytes()).unwrap();
    assert_eq!(rows.iter().map(|r| r.a).collect::<Vec<_>>(), [10.0, 20.0, 25.0]);
    let p = wgf::window::WindowParams::new(20.0, 0.5).unwrap();
    let direct = wgf::window::windowed_oscillatory_demo(2.0 * std::f64::consts::PI, &p, 10.0).unwrap();
    assert_eq!(rows[1], WindowDemoRow::from(&direct));
    assert!(window_demo_csv("2*pi", 1.5, "10").unwrap_err().contains("plateau"));
    assert!(window_demo_csv("2*", 0.5, "10").unwrap_err().starts_with("a:"));
}

#[test]
fn modes_table() {
    let rows: Vec<ModeRow> = read_rows(modes_csv("2*pi", "pi", "0.5", "te").unwrap().as_bytes()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(modes_csv("pi", "2*pi", "0.5", "TE").is_err());
    assert!(modes_csv("2*pi", "pi", "0.5", "TX").is_err());
}

fn flat_request(nz: usize, nx: usize) -> ImageRequest {
    ImageRequest { window_lambdas: 4.0, alpha: 0.5, ppw: 8.0, z: (-2.0, 2.0), x: (-1.5, 1.5), nz, nx }
}

#[test]
fn flat_image_layout_and_error() {
    let img = field_image("flat", &flat_request(5, 7)).unwrap();
    assert_eq!((img.nz(), img.nx()), (5, 7));
    let (re, region) = (img.re(), img.region());
    assert_eq!(re.len(), 35);
    // Columns x = +-0.5 lie on the interfaces; z runs fastest.
    for iz in 0..5 {
        assert_eq!(region[2 * 5 + iz], 0);
        assert!(re[4 * 5 + iz].is_nan());
        assert_eq!(region[3 * 5 + iz], 2);
        assert_eq!((region[iz], region[6 * 5 + iz]), (3, 1));
    }
    assert!(img.error() < 1e-2);
    assert_eq!(img.unknowns() % 2, 0);
}

#[test]
fn requests_are_checked() {
    assert!(field_image("flat", &flat_request(MAX_GRID_POINTS, 2)).is_err());
    assert!(field_image("square", &flat_request(3, 3)).is_err());
    let img = field_image("illum", &ImageRequest { window_lambdas: 3.0, ..flat_request(3, 3) }).unwrap();
    assert!(img.error().is_nan());
}
