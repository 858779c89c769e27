//! One-dimensional quadrature building blocks: Gauss–Legendre rules,
//! barycentric Lagrange interpolation on panel nodes, and adaptive
//! Gauss–Kronrod integration for complex-valued integrands.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Barycentric Lagrange interpolation on a fixed node set.
#[derive(Debug, Clone)]
pub struct Barycentric {
    nodes: Vec<f64>,
    bweights: Vec<f64>,
}

impl Barycentric {
    pub fn new(nodes: &[f64]) -> Self {
        let n = nodes.len();
        let mut bweights = vec![1.0; n];
        for j in 0..n {
            for k in 0..n {
                if k != j {
                    bweights[j] /= nodes[j] - nodes[k];
                }
            }
        }
        // Rescale to avoid overflow for high orders; the formula is invariant.
        let scale = bweights.iter().fold(0.0_f64, |m, w| m.max(w.abs()));
        for w in &mut bweights {
            *w /= scale;
        }
        Self {
            nodes: nodes.to_vec(),
            bweights,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Writes the values of all Lagrange basis polynomials at `t` into `out`.
    pub fn basis(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.nodes.len());
        let mut denom = 0.0;
        for (j, (&x, &w)) in self.nodes.iter().zip(&self.bweights).enumerate() {
            let dt = t - x;
            if dt == 0.0 {
                out.iter_mut().for_each(|v| *v = 0.0);
                out[j] = 1.0;
                return;
            }
            let v = w / dt;
            out[j] = v;
            denom += v;
        }
        for v in out.iter_mut() {
            *v /= denom;
        }
    }
}

// Kronrod 15-point extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<const M: usize, F>(f: &mut F, a: f64, b: f64) -> ([Complex64; M], f64)
where
    F: FnMut(f64) -> [Complex64; M],
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let zero = Complex64::new(0.0, 0.0);
    let mut rk = [zero; M];
    let mut rg = [zero; M];
    let fc = f(c);
    for m in 0..M {
        rk[m] = fc[m] * WGK[7];
        rg[m] = fc[m] * WG[3];
    }
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let f1 = f(c - h * x);
        let f2 = f(c + h * x);
        for m in 0..M {
            let s = f1[m] + f2[m];
            rk[m] += s * WGK[j];
            if j % 2 == 1 {
                rg[m] += s * WG[j / 2];
            }
        }
    }
    let mut err = 0.0_f64;
    for m in 0..M {
        rk[m] *= h;
        rg[m] *= h;
        err = err.max((rk[m] - rg[m]).norm());
    }
    (rk, err)
}

/// Adaptive Gauss–Kronrod (7/15) integration of a vector of complex
/// integrands over [a, b]. Stops when the summed error estimate falls below
/// `max(abs_tol, rel_tol * |I|)` or after `max_intervals` bisections.
pub fn adaptive<const M: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> [Complex64; M]
where
    F: FnMut(f64) -> [Complex64; M],
{
    let (r0, e0) = gk15(&mut f, a, b);
    let mut intervals = vec![(a, b, r0, e0)];
    loop {
        let mut total = [Complex64::new(0.0, 0.0); M];
        let mut err = 0.0;
        for iv in &intervals {
            for m in 0..M {
                total[m] += iv.2[m];
            }
            err += iv.3;
        }
        let scale = total.iter().fold(0.0_f64, |s, v| s.max(v.norm()));
        if err <= abs_tol.max(rel_tol * scale) || intervals.len() >= max_intervals {
            return total;
        }
        // Bisect the interval with the largest error.
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, iv)| if iv.3 > best.1 { (i, iv.3) } else { best });
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (r1, e1) = gk15(&mut f, lo, mid);
        let (r2, e2) = gk15(&mut f, mid, hi);
        intervals.push((lo, mid, r1, e1));
        intervals.push((mid, hi, r2, e2));
    }
}

/// Scalar convenience wrapper around [`adaptive`].
pub fn adaptive_scalar<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Complex64
where
    F: FnMut(f64) -> Complex64,
{
    adaptive::<1, _>(|x| [f(x)], a, b, abs_tol, rel_tol, 4000)[0]
}

/// Kahan–Babuška compensated sum of complex values.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: Complex64) {
        let re = neumaier(self.sum.re, &mut self.comp.re, v.re);
        let im = neumaier(self.sum.im, &mut self.comp.im, v.im);
        self.sum = Complex64::new(re, im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, comp: &mut f64, v: f64) -> f64 {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *comp += (sum - t) + v;
    } else {
        *comp += (v - t) + sum;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 24, 32] {
            let gl = GaussLegendre::new(n);
            let wsum: f64 = gl.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14, "n={n} weight sum {wsum}");
            for deg in 0..(2 * n) {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got = gl.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn nodes_are_sorted_and_symmetric() {
        let gl = GaussLegendre::new(17);
        for w in gl.nodes.windows(2) {
            assert!(w[0] < w[1]);
        }
        for i in 0..17 {
            assert!((gl.nodes[i] + gl.nodes[16 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn barycentric_reproduces_polynomials() {
        let gl = GaussLegendre::new(16);
        let bary = Barycentric::new(&gl.nodes);
        let f = |x: f64| 3.0 * x.powi(15) - x.powi(7) + 0.5;
        let vals: Vec<f64> = gl.nodes.iter().map(|&x| f(x)).collect();
        let mut basis = vec![0.0; 16];
        for t in [-1.0, -0.73, 0.0, 0.31, 0.999, 1.0] {
            bary.basis(t, &mut basis);
            let interp: f64 = basis.iter().zip(&vals).map(|(b, v)| b * v).sum();
            assert!((interp - f(t)).abs() < 1e-12, "t={t}");
        }
        bary.basis(gl.nodes[3], &mut basis);
        assert_eq!(basis[3], 1.0);
    }

    #[test]
    fn kronrod_rule_degree() {
        // K15 is exact to degree 22, G7 to degree 13.
        let mut f = |x: f64| [Complex64::new(x.powi(22), x.powi(13))];
        let (r, _) = gk15(&mut f, -1.0, 1.0);
        assert!((r[0].re - 2.0 / 23.0).abs() < 1e-15);
        assert!(r[0].im.abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_log_singularity() {
        let v = adaptive_scalar(|x| Complex64::new(x.ln(), 0.0), 0.0, 1.0, 1e-14, 1e-14);
        assert!((v.re + 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut s = CompensatedSum::default();
        s.add(Complex64::new(1e16, 0.0));
        for _ in 0..10 {
            s.add(Complex64::new(1.0, 0.0));
        }
        s.add(Complex64::new(-1e16, 0.0));
        assert_eq!(s.value().re, 10.0);
    }
}
