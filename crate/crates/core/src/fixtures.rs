//! Built-in parameter sets for the published chirped-stack spectra, ready to
//! evaluate. Names follow the figure panels they reproduce.
//!
//! Photonic sets share L = 8000 um, B = 0.3, lambda0 = 0.458 um and scan the
//! default grid; aperiodic sets use their predicted support band dilated by
//! half its width (plus a periodic-linewidth pad). The periodic set `fig2a`
//! scans the default grid.

use std::f64::consts::PI;

use crate::model::{AperiodicPolingSpec, DispersionParams, PhotonicChirpSpec, StructureSpec};
use crate::spectra::{predict_support_aperiodic, FrequencyGrid, Method, Scenario};

pub const LAMBDA0: f64 = 0.458;
pub const B_WALKOFF: f64 = 0.3;
pub const TOTAL_LEN: f64 = 8000.0;

/// Default photonic scan grid: covers every built-in comb and band at
/// better than 1e-4 um^-1 resolution.
pub fn default_grid() -> FrequencyGrid {
    FrequencyGrid {
        min: -0.35,
        max: 0.35,
        n_points: 8001,
    }
}

/// A named, ready-to-run scenario.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub scenario: Scenario,
    /// True when the published layer parameters actually tile the stated
    /// total length.
    pub length_consistent: bool,
    pub note: Option<&'static str>,
}

fn dispersion(dk0: f64) -> DispersionParams {
    DispersionParams {
        lambda0: LAMBDA0,
        b_walkoff: B_WALKOFF,
        dk0,
    }
}

fn photonic_fixture(
    name: &'static str,
    n_layers: usize,
    alpha: f64,
    dk0_in_alpha_l: f64,
) -> Fixture {
    let layer_len = TOTAL_LEN / n_layers as f64;
    let spec = PhotonicChirpSpec {
        n_layers,
        layer_len,
        chi0: 1.0,
        alpha,
    };
    Fixture {
        name,
        scenario: Scenario {
            structure: StructureSpec::Photonic(spec),
            dispersion: dispersion(dk0_in_alpha_l * alpha * layer_len),
            grid: default_grid(),
            method: Method::ClosedForm,
        },
        length_consistent: true,
        note: None,
    }
}

/// Support-dilated scan grid for an aperiodic stack: the predicted band
/// grown by half its width, plus a pad of a few periodic linewidths so the
/// zero-chirp limit keeps a usable window.
pub fn aperiodic_grid(spec: &AperiodicPolingSpec, d: &DispersionParams) -> FrequencyGrid {
    let band = predict_support_aperiodic(spec, d).expect("valid fixture spec");
    let pad = 0.5 * band.omega_width() + 30.0 / (d.b_walkoff.abs() * spec.total_len());
    FrequencyGrid {
        min: band.omega_lo - pad,
        max: band.omega_hi + pad,
        n_points: 8001,
    }
}

fn aperiodic_fixture(
    name: &'static str,
    n_layers: usize,
    l0: f64,
    zeta: f64,
    dk0_layer: Option<usize>,
    length_consistent: bool,
    note: Option<&'static str>,
) -> Fixture {
    let spec = AperiodicPolingSpec {
        n_layers,
        l0,
        zeta,
        chi0: 1.0,
    };
    // Published mismatch settings reference the caption layer convention
    // l_n = l0 + n*zeta.
    let dk0 = dk0_layer
        .map(|n| PI / (l0 + n as f64 * zeta))
        .unwrap_or(0.0);
    let d = dispersion(dk0);
    let grid = aperiodic_grid(&spec, &d);
    Fixture {
        name,
        scenario: Scenario {
            structure: StructureSpec::Aperiodic(spec),
            dispersion: d,
            grid,
            method: Method::ClosedForm,
        },
        length_consistent,
        note,
    }
}

/// All built-in fixtures in canonical order.
pub fn all() -> Vec<Fixture> {
    vec![
        photonic_fixture("fig1a", 5, 1.2e-5, 3.0),
        photonic_fixture("fig1b", 10, 1.2e-5, 5.0),
        photonic_fixture("fig1c", 20, 1.2e-5, 10.0),
        photonic_fixture("fig1d", 80, 1.2e-5, 40.0),
        photonic_fixture("fig1e", 5, 6e-6, 3.0),
        photonic_fixture("fig1f", 80, 6e-6, 40.0),
        Fixture {
            name: "fig2a",
            scenario: Scenario {
                structure: StructureSpec::Periodic {
                    n_layers: 50,
                    l0: 160.0,
                    chi0: 1.0,
                },
                dispersion: dispersion(0.0),
                grid: default_grid(),
                method: Method::ClosedForm,
            },
            length_consistent: true,
            note: None,
        },
        aperiodic_fixture("fig2b", 50, 88.09, 2.82, None, true, None),
        aperiodic_fixture(
            "fig3a",
            50,
            109.5,
            1.0,
            Some(37),
            false,
            Some(
                "published (N, l0, zeta) tile 6700-6750 um, not the stated 8000 um, \
                 under either layer convention; stored verbatim",
            ),
        ),
        aperiodic_fixture("fig3b", 50, 88.09, 2.82, Some(40), true, None),
        aperiodic_fixture("fig3c", 100, 52.225, 0.55, Some(85), true, None),
        aperiodic_fixture("fig3d", 160, 35.51, 0.18, Some(140), true, None),
    ]
}

pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}

pub fn names() -> Vec<&'static str> {
    all().iter().map(|f| f.name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build_and_validate() {
        for f in all() {
            f.scenario.structure.validate().unwrap();
            f.scenario.dispersion.validate().unwrap();
            f.scenario.grid.validate().unwrap();
            let seq = f.scenario.structure.build().unwrap();
            assert!(!seq.is_empty(), "{}", f.name);
        }
    }

    #[test]
    fn photonic_fixture_mismatch_settings() {
        let f = by_name("fig1a").unwrap();
        assert!((f.scenario.dispersion.dk0 - 0.0576).abs() < 1e-15);
        let f = by_name("fig1d").unwrap();
        assert!((f.scenario.dispersion.dk0 - 0.048).abs() < 1e-15);
    }

    #[test]
    fn fig3a_is_flagged_inconsistent() {
        let f = by_name("fig3a").unwrap();
        assert!(!f.length_consistent);
        assert!(f.note.is_some());
        // The advertised total is 8000; the verbatim parameters tile less.
        let total = f.scenario.structure.total_length();
        assert!((6700.0..6750.0).contains(&total), "total {total}");
    }

    #[test]
    fn consistent_aperiodic_fixtures_tile_l_under_caption_convention() {
        for name in ["fig2b", "fig3c", "fig3d"] {
            let f = by_name(name).unwrap();
            let StructureSpec::Aperiodic(s) = f.scenario.structure else {
                panic!("{name} should be aperiodic");
            };
            let n = s.n_layers as f64;
            let caption_total = n * s.l0 + s.zeta * n * (n + 1.0) / 2.0;
            assert!(
                (caption_total - TOTAL_LEN).abs() < 1e-9,
                "{name}: {caption_total}"
            );
        }
    }

    #[test]
    fn unknown_fixture_is_none() {
        assert!(by_name("fig9z").is_none());
    }
}
