//! Truncated weighted Gauss sums, a factor-detection scan built on them, and
//! the parameter mapping that realizes a Gauss sum in the chirped-photonic
//! two-photon amplitude.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;

use crate::engine::amplitude_photonic;
use crate::error::{Error, Result};
use crate::model::PhotonicChirpSpec;

/// Truncated weighted Gauss sum
/// S_N(tau) = sum_{m=-M}^{M} W_m exp(2 pi i (m + m^2/N) tau).
///
/// The evaluation argument is called `tau` here; the poling-chirp length
/// increment of the aperiodic structures is a different quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussSumSpec {
    /// Integer under test, N.
    pub n_under_test: u64,
    /// Truncation M: the sum runs over m = -M..=M.
    pub truncation: usize,
    /// 2M+1 weights; `None` means uniform 1/(2M+1).
    pub weights: Option<Vec<f64>>,
    /// Evaluation argument tau.
    pub argument: f64,
}

impl GaussSumSpec {
    /// Uniformly weighted spec.
    pub fn uniform(n_under_test: u64, truncation: usize, argument: f64) -> Self {
        GaussSumSpec {
            n_under_test,
            truncation,
            weights: None,
            argument,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_under_test == 0 {
            return Err(Error::invalid("n_under_test", "must be >= 1"));
        }
        if !self.argument.is_finite() {
            return Err(Error::invalid("argument", "must be finite"));
        }
        if let Some(w) = &self.weights {
            if w.len() != 2 * self.truncation + 1 {
                return Err(Error::invalid(
                    "weights",
                    format!("need 2M+1 = {} entries, got {}", 2 * self.truncation + 1, w.len()),
                ));
            }
            if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::invalid("weights", "must be finite and nonnegative"));
            }
        }
        Ok(())
    }

    pub fn weight(&self, idx: usize) -> f64 {
        match &self.weights {
            Some(w) => w[idx],
            None => 1.0 / (2 * self.truncation + 1) as f64,
        }
    }
}

/// Evaluate S_N(tau) directly, with phases reduced mod 2*pi in turn units
/// before the trigonometric step.
pub fn gauss_sum(spec: &GaussSumSpec) -> Result<Complex64> {
    spec.validate()?;
    let m_max = spec.truncation as i64;
    let n = spec.n_under_test as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for (idx, m) in (-m_max..=m_max).enumerate() {
        let mf = m as f64;
        // Phase in turns: (m + m^2/N) tau, fractional part only.
        let turns = (mf * spec.argument).rem_euclid(1.0)
            + (mf * mf * spec.argument / n).rem_euclid(1.0);
        let theta = TAU * turns.rem_euclid(1.0);
        sum += spec.weight(idx) * Complex64::new(theta.cos(), theta.sin());
    }
    Ok(sum)
}

/// Detection statistic for a trial divisor: the normalized intensity of the
/// truncated quadratic sum,
/// ((1/(M+1)) |sum_{m=0}^{M} exp(2 pi i m^2 N / l)|)^2.
///
/// Exactly 1 when `trial` divides `n` (all phases vanish; the reduction
/// m^2 N mod l is done in integer arithmetic), and small otherwise once the
/// truncation resolves the trial divisor (M of order sqrt(l)).
pub fn factor_magnitude(n: u64, trial: u64, m_trunc: u32) -> f64 {
    debug_assert!(trial >= 2 && m_trunc >= 1);
    let l = trial as u128;
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 0..=m_trunc as u128 {
        let r = (m * m % l) * (n as u128 % l) % l;
        let theta = TAU * (r as f64) / (trial as f64);
        sum += Complex64::new(theta.cos(), theta.sin());
    }
    let norm = sum.norm() / (m_trunc as f64 + 1.0);
    norm * norm
}

/// Standard discrimination level between divisors (statistic exactly 1) and
/// non-divisors.
pub const DEFAULT_FACTOR_THRESHOLD: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Outcome of a factor scan over trial divisors 2..=floor(sqrt(N)).
#[derive(Debug, Clone, PartialEq)]
pub struct FactorScanResult {
    pub n: u64,
    pub m_trunc: u32,
    pub threshold: f64,
    /// Every tested trial divisor with its statistic, ascending in trial.
    pub candidates: Vec<(u64, f64)>,
    /// Accepted factors including cofactors, sorted ascending. Empty for
    /// primes (that is the expected outcome, not an error).
    pub accepted: Vec<u64>,
}

/// Scan trial divisors l = 2..=floor(sqrt(N)); accept those whose statistic
/// exceeds the threshold, plus their cofactors N/l.
pub fn factor_scan(n: u64, m_trunc: u32, threshold: f64) -> Result<FactorScanResult> {
    if n < 2 {
        return Err(Error::invalid("n", "must be >= 2"));
    }
    if m_trunc < 1 {
        return Err(Error::invalid("m_trunc", "must be >= 1"));
    }
    if !(threshold.is_finite() && threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid("threshold", "must be in (0, 1)"));
    }
    let limit = (n as f64).sqrt().floor() as u64;
    let candidates: Vec<(u64, f64)> = (2..=limit)
        .into_par_iter()
        .map(|trial| (trial, factor_magnitude(n, trial, m_trunc)))
        .collect();
    let mut accepted = Vec::new();
    for &(trial, mag) in &candidates {
        if mag > threshold {
            accepted.push(trial);
            accepted.push(n / trial);
        }
    }
    accepted.sort_unstable();
    accepted.dedup();
    Ok(FactorScanResult {
        n,
        m_trunc,
        threshold,
        candidates,
        accepted,
    })
}

/// Structure parameters realizing a Gauss sum in the photonic amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdcGaussMap {
    /// Spatial chirp, um^-2.
    pub alpha: f64,
    /// Phase mismatch to drive the stack at, um^-1.
    pub dk: f64,
    /// Layer length the map was built for, um.
    pub layer_len: f64,
    /// Number of layers, 2M+1.
    pub n_layers: usize,
    /// Achieved bound on the per-layer sinc argument.
    pub max_sinc_arg: f64,
    /// Global phase by which the realized sum leads (2M+1) S_N(tau).
    pub global_phase: f64,
}

impl SpdcGaussMap {
    /// The photonic stack realizing the sum (unit susceptibility).
    pub fn structure(&self) -> PhotonicChirpSpec {
        PhotonicChirpSpec {
            n_layers: self.n_layers,
            layer_len: self.layer_len,
            chi0: 1.0,
            alpha: self.alpha,
        }
    }

    /// The realized sum: the engine's partial sum of the photonic amplitude
    /// at the mapped mismatch, normalized by the per-layer weight l*chi0.
    pub fn realized_sum(&self) -> Complex64 {
        amplitude_photonic(&self.structure(), self.dk) / self.layer_len
    }

    /// Unit phasor of the expected global phase.
    pub fn global_phasor(&self) -> Complex64 {
        Complex64::new(self.global_phase.cos(), self.global_phase.sin())
    }
}

fn wrap_half(x: f64) -> f64 {
    x - x.round()
}

/// Map a uniformly weighted Gauss sum onto the photonic Gauss-sum amplitude.
///
/// The quadratic phase of the amplitude, alpha (m-1)^2 l^2/2, matches the
/// Gauss phase 2 pi m'^2 tau/N modulo 2 pi for alpha = (4 pi/l^2) frac(tau/N)
/// taken on the principal branch; the linear phase carries the symmetric
/// window (index shift m' = m-1-M), giving
/// l dk = -2 pi tau (1 - 2M/N) mod 2 pi, again on the principal branch.
/// The branch reductions leave every term phase unchanged and minimize the
/// sinc arguments; the map is feasible when the achieved bound is <= delta,
/// which depends on (N, tau, M) only; no layer length can repair an
/// infeasible combination. Within the bound, each realized term differs from
/// the ideal phasor by at most delta^2/6 in magnitude.
pub fn map_spdc_to_gauss(
    target: &GaussSumSpec,
    layer_len: f64,
    delta: f64,
) -> Result<SpdcGaussMap> {
    target.validate()?;
    if target.weights.is_some() {
        return Err(Error::UnsupportedMethod(
            "the photonic realization carries uniform per-layer weights".into(),
        ));
    }
    if !(layer_len.is_finite() && layer_len > 0.0) {
        return Err(Error::invalid("layer_len", "layer length must be > 0"));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::invalid("delta", "must be > 0"));
    }
    let n = target.n_under_test as f64;
    let m = target.truncation as f64;
    let tau = target.argument;
    let l = layer_len;

    let alpha = 4.0 * std::f64::consts::PI / (l * l) * wrap_half(tau / n);
    let dk = TAU / l * wrap_half(-tau * (1.0 - 2.0 * m / n));

    let n_layers = 2 * target.truncation + 1;
    let max_sinc_arg = (0..n_layers)
        .map(|j| (0.5 * (dk - alpha * j as f64 * l) * l).abs())
        .fold(0.0, f64::max);
    if max_sinc_arg > delta {
        return Err(Error::Infeasible(format!(
            "sinc argument bound {max_sinc_arg:.3e} exceeds delta = {delta:.3e} \
             for N = {}, tau = {tau}, M = {}; the bound is set by (N, tau, M) alone",
            target.n_under_test, target.truncation
        )));
    }

    // Phase of the realized m = M+1 term relative to the tau-sum's m' = 0.
    let global_phase = 0.5 * l * dk - ((m + 1.0) * l * dk - 0.5 * alpha * m * m * l * l);

    Ok(SpdcGaussMap {
        alpha,
        dk,
        layer_len,
        n_layers,
        max_sinc_arg,
        global_phase,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_sum_trivial_arguments() {
        // tau = 0: all phases vanish, S = sum of weights = 1.
        let s = gauss_sum(&GaussSumSpec::uniform(15, 5, 0.0)).unwrap();
        assert!((s.re - 1.0).abs() < 1e-14 && s.im.abs() < 1e-14);

        // M = 0: S = W_0 regardless of tau.
        let s = gauss_sum(&GaussSumSpec::uniform(7, 0, 0.37)).unwrap();
        assert!((s.re - 1.0).abs() < 1e-14);

        // N=15, tau=15: every exponent is an integer number of turns.
        let s = gauss_sum(&GaussSumSpec::uniform(15, 5, 15.0)).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12, "|S| = {}", s.norm());
    }

    #[test]
    fn gauss_sum_respects_triangle_inequality() {
        for tau in [0.13, 1.7, 2.5, 40.0 / 3.0] {
            let s = gauss_sum(&GaussSumSpec::uniform(21, 6, tau)).unwrap();
            assert!(s.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn gauss_sum_validates_weights() {
        let mut spec = GaussSumSpec::uniform(10, 2, 0.5);
        spec.weights = Some(vec![0.2; 4]);
        assert!(gauss_sum(&spec).is_err());
        spec.weights = Some(vec![0.2, 0.2, 0.2, 0.2, -0.2]);
        assert!(gauss_sum(&spec).is_err());
        spec.weights = Some(vec![0.2; 5]);
        assert!(gauss_sum(&spec).is_ok());
    }

    #[test]
    fn factor_magnitude_divisors_exact() {
        assert_eq!(factor_magnitude(21, 3, 4), 1.0);
        assert_eq!(factor_magnitude(21, 7, 9), 1.0);
        assert_eq!(factor_magnitude(10_000, 100, 8), 1.0);
    }

    #[test]
    fn factor_magnitude_near_resonant_nondivisor() {
        // N=21, l=4: quarter-turn phases; 5-term intensity (sqrt(13)/5)^2.
        let v = factor_magnitude(21, 4, 4);
        assert!(v < 0.71, "got {v}");
        assert!((v - 13.0 / 25.0).abs() < 1e-12);
    }

    #[test]
    fn factor_scan_examples() {
        let r = factor_scan(15, 3, DEFAULT_FACTOR_THRESHOLD).unwrap();
        assert_eq!(r.accepted, vec![3, 5]);

        let r = factor_scan(13, 8, DEFAULT_FACTOR_THRESHOLD).unwrap();
        assert!(r.accepted.is_empty());

        let r = factor_scan(4, 8, DEFAULT_FACTOR_THRESHOLD).unwrap();
        assert_eq!(r.accepted, vec![2]);

        // 1003 = 17 * 59: accepts the pair, rejects every other trial <= 31.
        let r = factor_scan(1003, 6, DEFAULT_FACTOR_THRESHOLD).unwrap();
        assert_eq!(r.accepted, vec![17, 59]);
        assert_eq!(r.candidates.len(), 30);
    }

    #[test]
    fn factor_scan_validates_input() {
        assert!(factor_scan(1, 8, 0.5).is_err());
        assert!(factor_scan(10, 0, 0.5).is_err());
        assert!(factor_scan(10, 8, 1.5).is_err());
    }

    #[test]
    fn map_trivial_argument_gives_unchirped_stack() {
        let map = map_spdc_to_gauss(&GaussSumSpec::uniform(8, 3, 0.0), 50.0, 0.05).unwrap();
        assert_eq!(map.alpha, 0.0);
        assert_eq!(map.dk, 0.0);
        let s = map.realized_sum();
        assert!((s.re - 7.0).abs() < 1e-12 && s.im.abs() < 1e-12);
    }

    #[test]
    fn map_integer_resonance_is_exact() {
        // N=15, tau=15, M=5: the reduction collapses to an unchirped,
        // phase-matched stack and |engine sum|/(2M+1) = 1.
        let target = GaussSumSpec::uniform(15, 5, 15.0);
        let map = map_spdc_to_gauss(&target, 120.0, 0.05).unwrap();
        let s = map.realized_sum();
        assert!((s.norm() / 11.0 - 1.0).abs() < 5e-4, "got {}", s.norm() / 11.0);
    }

    #[test]
    fn map_reports_infeasible_with_achieved_bound() {
        // tau/N far from an integer: O(1) sinc arguments, no l can help.
        let target = GaussSumSpec::uniform(64, 4, 7.0);
        let err = map_spdc_to_gauss(&target, 75.0, 0.05).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn map_matches_gauss_sum_within_per_term_bound() {
        // tau = k N + eps keeps both reduced phases small.
        let n: u64 = 40;
        let m = 4usize;
        let delta = 0.05;
        // 0.999 keeps the constructed case strictly inside the bound.
        let eps = 0.999 * delta / (std::f64::consts::PI * (1.0 + 2.0 * m as f64 / n as f64));
        let tau = 2.0 * n as f64 + eps;
        let target = GaussSumSpec::uniform(n, m, tau);
        let map = map_spdc_to_gauss(&target, 200.0, delta).unwrap();
        let terms = (2 * m + 1) as f64;
        let expected = map.global_phasor() * terms * gauss_sum(&target).unwrap();
        let err = (map.realized_sum() - expected).norm();
        assert!(err <= terms * delta * delta / 6.0, "err {err}");
    }
}
