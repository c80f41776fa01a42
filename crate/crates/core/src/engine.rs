//! Two-photon amplitudes and normalized spectral densities.
//!
//! Every structure admits up to three evaluation routes that must agree:
//!
//! * the generic layer sum ([`amplitude_general`]) over a resolved
//!   [`LayerSequence`];
//! * a closed-form discrete Gauss sum specialized to the structure kind
//!   ([`amplitude_photonic`], [`amplitude_aperiodic`], [`density_periodic`]);
//! * the expanded double-sum probability ([`density_general`],
//!   [`density_photonic`], [`density_aperiodic`]), which recomputes |F|^2
//!   from pairwise real trigonometric terms rather than squaring a complex
//!   sum. The redundancy is deliberate: it is the cross-check.
//!
//! Densities are reported normalized, |f|^2 = |F|^2 / (L^2 chi_ref^2), so a
//! single fully phase-matched layer of uniform susceptibility gives 1.
//!
//! Closed-form amplitude paths are O(N) per point; the double-sum densities
//! are O(N^2) and exist as verification paths.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::Result;
use crate::model::{AperiodicPolingSpec, DispersionParams, LayerSequence, PhotonicChirpSpec};

/// Below this value of |dk| * l_max the 1/dk closed forms switch to a
/// second-order moment expansion of the layered integral; keeps the series
/// truncation error below ~1e-12 while avoiding catastrophic cancellation.
pub const DK_FALLBACK_THRESHOLD: f64 = 1e-6;

/// sin(x)/x with the removable singularity evaluated by series.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

#[inline]
fn unit_phasor(theta: f64) -> Complex64 {
    let t = theta.rem_euclid(TAU);
    Complex64::new(t.cos(), t.sin())
}

/// Phase mismatch at detuning omega/c: dk = dk0 + B * (omega/c), um^-1.
pub fn phase_mismatch(omega_over_c: f64, d: &DispersionParams) -> f64 {
    d.dk0 + d.b_walkoff * omega_over_c
}

/// Amplitude with per-layer contributions retained.
#[derive(Debug, Clone)]
pub struct AmplitudeResult {
    /// Total amplitude F, um * susceptibility.
    pub value: Complex64,
    /// Per-layer contributions l_m * chi_m * F_m; their sum is `value`.
    pub partials: Vec<Complex64>,
    /// Accumulated phase at the entry of each layer (mod 2*pi).
    pub phases: Vec<f64>,
}

/// Generic layer sum: F = sum_m l_m chi_m e^{-i(phi_m + dk_m l_m/2)}
/// sinc(dk_m l_m/2), with phi_m the phase accumulated over earlier layers
/// and dk_m = dk + dk_offset_m.
pub fn amplitude_general(seq: &LayerSequence, dk: f64) -> Complex64 {
    let mut phi = 0.0_f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for layer in seq.layers() {
        let dkm = dk + layer.dk_offset;
        let half = 0.5 * dkm * layer.length;
        sum += layer.length * layer.chi * sinc(half) * unit_phasor(-(phi + half));
        phi = (phi + dkm * layer.length).rem_euclid(TAU);
    }
    sum
}

/// [`amplitude_general`] with partial amplitudes and entry phases kept.
pub fn amplitude_general_detailed(seq: &LayerSequence, dk: f64) -> AmplitudeResult {
    let mut phi = 0.0_f64;
    let mut partials = Vec::with_capacity(seq.len());
    let mut phases = Vec::with_capacity(seq.len());
    let mut sum = Complex64::new(0.0, 0.0);
    for layer in seq.layers() {
        let dkm = dk + layer.dk_offset;
        let half = 0.5 * dkm * layer.length;
        let term = layer.length * layer.chi * sinc(half) * unit_phasor(-(phi + half));
        phases.push(phi);
        partials.push(term);
        sum += term;
        phi = (phi + dkm * layer.length).rem_euclid(TAU);
    }
    AmplitudeResult {
        value: sum,
        partials,
        phases,
    }
}

fn normalize_density(f_sq: f64, total_len: f64, chi_ref: f64) -> f64 {
    if chi_ref == 0.0 {
        return 0.0;
    }
    let d = f_sq / (total_len * total_len * chi_ref * chi_ref);
    d.max(0.0)
}

/// Normalized density from the expanded pairwise sum
/// |F|^2 = sum |c_m|^2 + 2 sum_{m1<m2} Re(c_m1 c_m2*), computed with real
/// trigonometry rather than by squaring [`amplitude_general`].
pub fn density_general(seq: &LayerSequence, dk: f64) -> f64 {
    let n = seq.len();
    let mut r = Vec::with_capacity(n);
    let mut theta = Vec::with_capacity(n);
    let mut phi = 0.0_f64;
    for layer in seq.layers() {
        let dkm = dk + layer.dk_offset;
        let half = 0.5 * dkm * layer.length;
        r.push(layer.length * layer.chi * sinc(half));
        theta.push((phi + half).rem_euclid(TAU));
        phi = (phi + dkm * layer.length).rem_euclid(TAU);
    }
    let mut f_sq: f64 = r.iter().map(|v| v * v).sum();
    for m1 in 0..n {
        for m2 in (m1 + 1)..n {
            f_sq += 2.0 * r[m1] * r[m2] * (theta[m1] - theta[m2]).cos();
        }
    }
    normalize_density(f_sq, seq.total_length(), seq.chi_ref())
}

/// Closed-form photonic amplitude (discrete Gauss sum):
/// F = l chi0 e^{i l dk / 2} sum_m e^{-i(m l dk - alpha (m-1)^2 l^2 / 2)}
///     sinc((dk - alpha (m-1) l) l / 2).
pub fn amplitude_photonic(spec: &PhotonicChirpSpec, dk: f64) -> Complex64 {
    let l = spec.layer_len;
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 1..=spec.n_layers {
        let j = (m - 1) as f64;
        let x = 0.5 * (dk - spec.alpha * j * l) * l;
        let ph = m as f64 * l * dk - 0.5 * spec.alpha * j * j * l * l;
        sum += sinc(x) * unit_phasor(-ph);
    }
    l * spec.chi0 * unit_phasor(0.5 * l * dk) * sum
}

/// Normalized photonic density from the expanded double sum of sinc pairs
/// and cosine cross-phases. Equals |amplitude_photonic|^2/(L^2 chi0^2).
pub fn density_photonic(spec: &PhotonicChirpSpec, dk: f64) -> f64 {
    let n = spec.n_layers;
    let l = spec.layer_len;
    let a = spec.alpha;
    let s: Vec<f64> = (0..n)
        .map(|j| sinc(0.5 * (dk - a * j as f64 * l) * l))
        .collect();
    let mut bracket: f64 = s.iter().map(|v| v * v).sum();
    for m in 1..n {
        for p in 1..=(n - m) {
            let (mf, pf) = ((m - 1) as f64, p as f64);
            // Cross-phase of layers m and m+p: p*l*dk - alpha*p*(m-1+p/2)*l^2.
            let arg = pf * l * dk - a * pf * (mf + 0.5 * pf) * l * l;
            bracket += 2.0 * s[m - 1] * s[m + p - 1] * arg.rem_euclid(TAU).cos();
        }
    }
    let f_sq = l * l * spec.chi0 * spec.chi0 * bracket;
    normalize_density(f_sq, spec.total_len(), spec.chi0.abs())
}

/// Second-order moment expansion of F(dk) = integral chi(z) e^{-i dk z} dz
/// for the aperiodic stack, used inside the small-|dk| fallback window.
fn aperiodic_moment_series(spec: &AperiodicPolingSpec, dk: f64) -> Complex64 {
    let mut z = 0.0_f64;
    let (mut m0, mut m1, mut m2) = (0.0_f64, 0.0_f64, 0.0_f64);
    for m in 1..=spec.n_layers {
        let lm = spec.layer_len(m);
        let chi = if m % 2 == 1 { spec.chi0 } else { -spec.chi0 };
        let z1 = z + lm;
        m0 += chi * lm;
        m1 += chi * 0.5 * (z1 * z1 - z * z);
        m2 += chi * (z1 * z1 * z1 - z * z * z) / 3.0;
        z = z1;
    }
    Complex64::new(m0 - 0.5 * dk * dk * m2, -dk * m1)
}

/// Closed-form aperiodic amplitude (discrete Gauss sum):
/// F = (2 chi0 / dk) sum_m (-1)^{m-1} e^{-i dk((m-1/2) l0 + (m-1)^2 zeta/2)}
///     sin(dk l_m / 2),
/// with the removable dk -> 0 singularity evaluated by a moment expansion.
pub fn amplitude_aperiodic(spec: &AperiodicPolingSpec, dk: f64) -> Complex64 {
    let (_, l_max) = spec.layer_len_range();
    if (dk * l_max).abs() < DK_FALLBACK_THRESHOLD {
        return aperiodic_moment_series(spec, dk);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 1..=spec.n_layers {
        let j = (m - 1) as f64;
        let lm = spec.layer_len(m);
        let ph = dk * ((m as f64 - 0.5) * spec.l0 + 0.5 * j * j * spec.zeta);
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * (0.5 * dk * lm).sin() * unit_phasor(-ph);
    }
    2.0 * spec.chi0 / dk * sum
}

/// Normalized aperiodic density from the expanded double sum of sine pairs
/// with alternating signs. Equals |amplitude_aperiodic|^2/(L^2 chi0^2) and
/// shares its small-|dk| fallback.
pub fn density_aperiodic(spec: &AperiodicPolingSpec, dk: f64) -> f64 {
    let total = spec.total_len();
    let chi_ref = spec.chi0.abs();
    let (_, l_max) = spec.layer_len_range();
    if (dk * l_max).abs() < DK_FALLBACK_THRESHOLD {
        let f = aperiodic_moment_series(spec, dk);
        return normalize_density(f.norm_sqr(), total, chi_ref);
    }
    let n = spec.n_layers;
    let sines: Vec<f64> = (1..=n).map(|m| (0.5 * dk * spec.layer_len(m)).sin()).collect();
    let mut bracket: f64 = sines.iter().map(|v| v * v).sum();
    for m in 1..n {
        for p in 1..=(n - m) {
            let (mf, pf) = (m as f64, p as f64);
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            let arg = pf * dk * (spec.l0 + 0.5 * spec.zeta * (2.0 * mf + pf - 2.0));
            bracket += 2.0 * sign * sines[m + p - 1] * sines[m - 1] * arg.rem_euclid(TAU).cos();
        }
    }
    // The 4 restores |2 chi0 / dk|^2 from the sine bracket.
    let f_sq = 4.0 * spec.chi0 * spec.chi0 / (dk * dk) * bracket;
    normalize_density(f_sq, total, chi_ref)
}

/// Normalized density of the strictly periodic alternating stack.
///
/// Exact form: |f|^2 = (1/N^2) * [sin(N x)/sin(x)]^2 * sinc^2(dk l0/2) with
/// x = (dk - pi/l0) l0/2; the Dirichlet ratio is evaluated through a stable
/// reduction with its removable singularities taken by limit (ratio -> N^2).
/// With `approx` set, returns the large-N envelope
/// sinc^2(N x) * sinc^2(dk l0/2), which agrees with the exact form at the
/// grating-matched point.
pub fn density_periodic(n_layers: usize, l0: f64, dk: f64, approx: bool) -> f64 {
    let n = n_layers as f64;
    let x = 0.5 * (dk - PI / l0) * l0;
    let env = sinc(0.5 * dk * l0);
    if approx {
        let v = sinc(n * x);
        return (v * v * env * env).max(0.0);
    }
    // sin(N x)/sin(x) = +/- N sinc(N d)/sinc(d) with d = x mod pi in
    // [-pi/2, pi/2); the sign drops after squaring.
    let delta = x - (x / PI).round() * PI;
    let ratio = n * sinc(n * delta) / sinc(delta);
    let f_sq_rel = ratio * ratio * env * env; // |F|^2 / (l0^2 chi0^2)
    (f_sq_rel / (n * n)).max(0.0)
}

/// |amplitude|^2/(L^2 chi_ref^2) helper for the generic path.
pub fn density_from_amplitude(seq: &LayerSequence, dk: f64) -> f64 {
    normalize_density(
        amplitude_general(seq, dk).norm_sqr(),
        seq.total_length(),
        seq.chi_ref(),
    )
}

/// Closed-form normalized density for any structure kind that has one.
pub fn closed_form_density(structure: &crate::model::StructureSpec, dk: f64) -> Result<f64> {
    use crate::model::StructureSpec;
    match structure {
        StructureSpec::Photonic(s) => {
            let f = amplitude_photonic(s, dk);
            Ok(normalize_density(f.norm_sqr(), s.total_len(), s.chi0.abs()))
        }
        StructureSpec::Aperiodic(s) => {
            let f = amplitude_aperiodic(s, dk);
            Ok(normalize_density(f.norm_sqr(), s.total_len(), s.chi0.abs()))
        }
        StructureSpec::Periodic { n_layers, l0, .. } => {
            Ok(density_periodic(*n_layers, *l0, dk, false))
        }
        StructureSpec::Explicit(_) => Err(crate::error::Error::UnsupportedMethod(
            "closed form is not defined for explicit layer stacks".into(),
        )),
    }
}

/// Expanded double-sum normalized density for any structure kind.
pub fn double_sum_density(structure: &crate::model::StructureSpec, dk: f64) -> Result<f64> {
    use crate::model::StructureSpec;
    match structure {
        StructureSpec::Photonic(s) => Ok(density_photonic(s, dk)),
        StructureSpec::Aperiodic(s) => Ok(density_aperiodic(s, dk)),
        StructureSpec::Periodic { n_layers, l0, chi0 } => Ok(density_aperiodic(
            &AperiodicPolingSpec {
                n_layers: *n_layers,
                l0: *l0,
                zeta: 0.0,
                chi0: *chi0,
            },
            dk,
        )),
        StructureSpec::Explicit(seq) => Ok(density_general(seq, dk)),
    }
}
