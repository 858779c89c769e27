//! Bessel functions of orders 0 and 1 and the Hankel functions of the first
//! kind for real positive arguments.
//!
//! Three regimes are used: ascending power series for small arguments,
//! Miller backward recurrence with Neumann series for the Y functions in the
//! intermediate range, and the Hankel asymptotic expansion beyond that.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_2_PI, PI};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN_2: f64 = std::f64::consts::LN_2;

/// Upper end of the power-series regime.
pub const SERIES_MAX: f64 = 5.0;
/// Upper end of the backward-recurrence regime; the asymptotic expansion is
/// used above it.
pub const RECURRENCE_MAX: f64 = 25.0;

/// J0, J1, Y0, Y1 at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bessel01 {
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1: f64,
}

/// Hankel functions split into a logarithmic/polar part and a remainder that
/// stays bounded as x -> 0:
/// `h0 = h0_reg + (2i/pi) ln x` and `h1 = h1_reg - 2i/(pi x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HankelSplit {
    pub h0: Complex64,
    pub h1: Complex64,
    pub h0_reg: Complex64,
    pub h1_reg: Complex64,
}

fn check(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Bessel argument must be finite and positive, got {x}")))
    }
}

/// H0^(1)(x).
pub fn hankel1_0(x: f64) -> Result<Complex64> {
    check(x)?;
    let b = bessel01(x);
    Ok(Complex64::new(b.j0, b.y0))
}

/// H1^(1)(x).
pub fn hankel1_1(x: f64) -> Result<Complex64> {
    check(x)?;
    let b = bessel01(x);
    Ok(Complex64::new(b.j1, b.y1))
}

/// All four real Bessel functions. The argument must be positive; this is
/// the unchecked fast path used by the kernels.
pub fn bessel01(x: f64) -> Bessel01 {
    debug_assert!(x > 0.0);
    if x <= SERIES_MAX {
        series(x).0
    } else if x <= RECURRENCE_MAX {
        recurrence(x)
    } else {
        asymptotic(x)
    }
}

/// Hankel functions together with their regularized remainders.
pub fn hankel01_split(x: f64) -> HankelSplit {
    debug_assert!(x > 0.0);
    if x <= SERIES_MAX {
        let (b, y0r, y1r) = series(x);
        HankelSplit {
            h0: Complex64::new(b.j0, b.y0),
            h1: Complex64::new(b.j1, b.y1),
            h0_reg: Complex64::new(b.j0, y0r),
            h1_reg: Complex64::new(b.j1, y1r),
        }
    } else {
        let b = bessel01(x);
        HankelSplit {
            h0: Complex64::new(b.j0, b.y0),
            h1: Complex64::new(b.j1, b.y1),
            h0_reg: Complex64::new(b.j0, b.y0 - FRAC_2_PI * x.ln()),
            h1_reg: Complex64::new(b.j1, b.y1 + FRAC_2_PI / x),
        }
    }
}

/// Power series. Also returns `Y0 - (2/pi) ln x` and `Y1 + 2/(pi x)` computed
/// without cancellation.
fn series(x: f64) -> (Bessel01, f64, f64) {
    let q = 0.25 * x * x;
    let half = 0.5 * x;
    // J0 - 1, J1, and the harmonic/digamma sums of the Y series.
    let mut j0m1 = 0.0;
    let mut j1 = 0.0;
    let mut ysum0 = 0.0;
    let mut ysum1 = 0.0;
    // term0 = (-1)^k q^k / (k!)^2, term1 = (-1)^k q^k / (k!(k+1)!)
    let mut term0 = 1.0;
    let mut term1 = 1.0;
    let mut harmonic = 0.0; // H_k
    let mut psi_sum = 1.0 - 2.0 * EULER_GAMMA; // psi(1) + psi(2)
    for k in 0..60 {
        if k > 0 {
            let kf = k as f64;
            term0 *= -q / (kf * kf);
            term1 *= -q / (kf * (kf + 1.0));
            harmonic += 1.0 / kf;
            psi_sum += 1.0 / kf + 1.0 / (kf + 1.0);
            j0m1 += term0;
            ysum0 -= harmonic * term0;
        }
        j1 += term1;
        ysum1 += psi_sum * term1;
        if k > 2 && term0.abs() < 1e-18 && term1.abs() < 1e-18 {
            break;
        }
    }
    let j0 = 1.0 + j0m1;
    let j1 = half * j1;
    let lnx = x.ln();
    let y0_reg = FRAC_2_PI * (lnx * j0m1 + (EULER_GAMMA - LN_2) * j0 + ysum0);
    let y0 = y0_reg + FRAC_2_PI * lnx;
    let y1_reg = FRAC_2_PI * (lnx - LN_2) * j1 - half / PI * ysum1;
    let y1 = y1_reg - FRAC_2_PI / x;
    (Bessel01 { j0, j1, y0, y1 }, y0_reg, y1_reg)
}

/// Miller backward recurrence for J_n, normalized by J0 + 2 sum J_2k = 1,
/// with the Neumann expansions of Y0 and Y1.
fn recurrence(x: f64) -> Bessel01 {
    let start = ((x + 12.0 * x.cbrt() + 30.0) as usize) | 1;
    let start = start + 1; // even
    let mut jn = vec![0.0; start + 2];
    jn[start] = 1e-300;
    let two_over_x = 2.0 / x;
    for n in (1..=start).rev() {
        jn[n - 1] = n as f64 * two_over_x * jn[n] - jn[n + 1];
        if jn[n - 1].abs() > 1e250 {
            let s = 1e-250;
            for v in jn[n - 1..].iter_mut() {
                *v *= s;
            }
        }
    }
    let mut norm = jn[0];
    for k in (2..=start).step_by(2) {
        norm += 2.0 * jn[k];
    }
    for v in jn.iter_mut() {
        *v /= norm;
    }
    let j0 = jn[0];
    let j1 = jn[1];
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut sign = -1.0;
    let mut k = 1;
    while 2 * k < start {
        let kf = k as f64;
        s0 += sign * jn[2 * k] / kf;
        s1 += sign * (jn[2 * k - 1] - jn[2 * k + 1]) / kf;
        sign = -sign;
        k += 1;
    }
    let y0 = FRAC_2_PI * (lg * j0 - 2.0 * s0);
    let y1 = FRAC_2_PI * (lg * j1 - j0 / x + s1);
    Bessel01 { j0, j1, y0, y1 }
}

/// Hankel asymptotic expansion in amplitude/phase form.
fn asymptotic(x: f64) -> Bessel01 {
    let (p0, q0) = pq(0.0, x);
    let (p1, q1) = pq(4.0, x);
    let amp = (FRAC_2_PI / x).sqrt();
    let (s, c) = x.sin_cos();
    // cos(x - pi/4), sin(x - pi/4), cos(x - 3pi/4), sin(x - 3pi/4) formed
    // from sin x and cos x directly to avoid rounding the shifted phase.
    let c0 = FRAC_1_SQRT_2 * (c + s);
    let s0 = FRAC_1_SQRT_2 * (s - c);
    let c1 = FRAC_1_SQRT_2 * (s - c);
    let s1 = -FRAC_1_SQRT_2 * (c + s);
    Bessel01 {
        j0: amp * (p0 * c0 - q0 * s0),
        y0: amp * (p0 * s0 + q0 * c0),
        j1: amp * (p1 * c1 - q1 * s1),
        y1: amp * (p1 * s1 + q1 * c1),
    }
}

/// P and Q amplitude series for order nu, given mu = 4 nu^2.
fn pq(mu: f64, x: f64) -> (f64, f64) {
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..80 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * eight_x);
        let a = term.abs();
        if a > prev {
            break;
        }
        prev = a;
        if k % 2 == 1 {
            // Q gets odd terms with alternating sign starting positive.
            q += if (k / 2) % 2 == 0 { term } else { -term };
        } else {
            p += if (k / 2) % 2 == 1 { -term } else { term };
        }
        if a < 1e-17 {
            break;
        }
    }
    (p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from 30-digit arbitrary-precision evaluation.
    const REF: &[(f64, f64, f64, f64, f64)] = &[
        (1e-6, 0.99999999999975, -8.8690314816594437029, 4.999999999999375e-7, -636619.77237217501376),
        (0.5, 0.93846980724081290423, -0.44451873350670655715, 0.24226845767487388638, -1.4714723926702430692),
        (1.0, 0.76519768655796655145, 0.088256964215676957983, 0.44005058574493351596, -0.78121282130028871655),
        (2.0, 0.22389077914123566805, 0.5103756726497451196, 0.5767248077568733872, -0.10703243154093754689),
        (4.0, -0.39714980986384737229, -0.016940739325064991904, -0.066043328023549136143, 0.39792571055710000525),
        (8.0, 0.17165080713755390609, 0.22352148938756622053, 0.23463634685391462438, -0.15806046173124749426),
        (12.0, 0.047689310796833536624, -0.22523731263436143369, -0.22344710449062761237, -0.05709921826089652105),
        (20.0, 0.16702466434058315473, 0.062640596809383831162, 0.066833124175850045579, -0.16551161436252129586),
        (35.0, -0.12684568275631256981, 0.045797987195155641061, 0.04399094217962563997, 0.12751273354559011719),
        (100.0, 0.019985850304223122424, -0.077244313365083152254, -0.077145352014112158033, -0.020372312002759793305),
        (1000.0, 0.024786686152420174561, 0.0047159179776228133998, 0.0047283119070895239176, -0.024784331292351778915),
        (1e4, -0.0070961603533888014773, 0.0036478055589866058867, 0.0036474507555295803441, 0.007096342752536495135),
    ];

    #[test]
    fn matches_reference_values() {
        for &(x, j0, y0, j1, y1) in REF {
            let b = bessel01(x);
            for (got, want, name) in [(b.j0, j0, "J0"), (b.y0, y0, "Y0"), (b.j1, j1, "J1"), (b.y1, y1, "Y1")] {
                let tol = 1e-13 * (1.0 + want.abs());
                assert!((got - want).abs() <= tol, "{name}({x}) = {got:e}, want {want:e}");
            }
        }
    }

    #[test]
    fn hankel_at_one() {
        let h0 = hankel1_0(1.0).unwrap();
        assert!((h0.re - 0.7651976865579666).abs() < 1e-15);
        assert!((h0.im - 0.0882569642156769).abs() < 1e-15);
        let h1 = hankel1_1(1.0).unwrap();
        assert!((h1.re - 0.4400505857449335).abs() < 1e-15);
        assert!((h1.im + 0.7812128213002887).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(hankel1_0(0.0).is_err());
        assert!(hankel1_1(-1.0).is_err());
        assert!(hankel1_0(f64::NAN).is_err());
    }

    #[test]
    fn small_argument_shape() {
        let x = 1e-8;
        let h = hankel1_0(x).unwrap();
        assert!((h.re - 1.0).abs() < 1e-15);
        let lead = FRAC_2_PI * ((0.5 * x).ln() + EULER_GAMMA);
        assert!((h.im - lead).abs() < 1e-14);
    }

    #[test]
    fn large_argument_amplitude() {
        let x = 1e4;
        let h = hankel1_0(x).unwrap();
        assert!((h.norm() * (PI * x / 2.0).sqrt() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn wronskian_log_spaced() {
        for i in 0..1000 {
            let x = 10f64.powf(-6.0 + 10.0 * i as f64 / 999.0);
            let b = bessel01(x);
            let w = b.j1 * b.y0 - b.j0 * b.y1;
            let want = 2.0 / (PI * x);
            assert!(((w - want) / want).abs() < 1e-13, "x={x}: {w} vs {want}");
        }
    }

    #[test]
    fn derivative_relation() {
        let h = 1e-6;
        for x in [0.3, 2.0, 4.99, 6.0, 17.0, 30.0, 250.0] {
            let d = (hankel1_0(x + h).unwrap() - hankel1_0(x - h).unwrap()) / (2.0 * h);
            let h1 = hankel1_1(x).unwrap();
            assert!((d + h1).norm() < 1e-8 * (1.0 + h1.norm()), "x={x}");
        }
    }

    #[test]
    fn regime_switches_are_continuous() {
        for xs in [SERIES_MAX, RECURRENCE_MAX] {
            let a = if xs == SERIES_MAX { series(xs).0 } else { recurrence(xs) };
            let b = if xs == SERIES_MAX { recurrence(xs) } else { asymptotic(xs) };
            for (u, v) in [(a.j0, b.j0), (a.j1, b.j1), (a.y0, b.y0), (a.y1, b.y1)] {
                assert!((u - v).abs() < 1e-12, "switch at {xs}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn split_parts_are_consistent() {
        for x in [1e-7, 0.01, 0.7, 3.0, 5.0, 9.0, 40.0] {
            let s = hankel01_split(x);
            let i = Complex64::i();
            let h0 = s.h0_reg + i * FRAC_2_PI * x.ln();
            let h1 = s.h1_reg - i * FRAC_2_PI / x;
            assert!((h0 - s.h0).norm() < 1e-13 * (1.0 + s.h0.norm()), "x={x}");
            assert!((h1 - s.h1).norm() < 1e-13 * s.h1.norm(), "x={x}");
        }
        // The regular remainder of H1 vanishes linearly at the origin.
        let s = hankel01_split(1e-9);
        assert!(s.h1_reg.norm() < 1e-7);
    }
}
