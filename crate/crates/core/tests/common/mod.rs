//! Shared test oracles, independent of the engine's evaluation paths.

use num_complex::Complex64;

use biphoton::model::LayerSequence;

/// Adaptive Simpson quadrature with Richardson-style acceptance.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, depth)
}

/// Amplitude of the layered stack by direct numerical integration of
/// chi(z) e^{-i Phi(z)} with Phi the piecewise-linear accumulated phase.
/// This never touches the engine's sinc closed forms.
pub fn amplitude_by_quadrature(seq: &LayerSequence, dk: f64, tol: f64) -> Complex64 {
    let mut phi0 = 0.0_f64;
    let mut total = Complex64::new(0.0, 0.0);
    for layer in seq.layers() {
        let slope = dk + layer.dk_offset;
        let re = adaptive_simpson(&|t| (phi0 + slope * t).cos(), 0.0, layer.length, tol, 40);
        let im = adaptive_simpson(&|t| (phi0 + slope * t).sin(), 0.0, layer.length, tol, 40);
        total += layer.chi * Complex64::new(re, -im);
        phi0 += slope * layer.length;
    }
    total
}

/// Relative deviation with a floor on the denominator: values below 1e-5 of
/// `scale` are compared against that floor instead. Near deep interference
/// zeros the expanded double sums carry O(N^2 eps) cancellation noise, so a
/// bare relative tolerance is vacuous there; the floored form still demands
/// 9-digit agreement on any observable scale.
pub fn rel_dev_scaled(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-5 * scale.abs().max(f64::MIN_POSITIVE))
}
