//! Engine verification against independent oracles and randomized
//! cross-form properties.

mod common;

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use biphoton::engine::{
    amplitude_aperiodic, amplitude_general, amplitude_photonic, density_aperiodic,
    density_general, density_photonic, DK_FALLBACK_THRESHOLD,
};
use biphoton::model::{
    build_aperiodic, build_photonic, AperiodicPolingSpec, Layer, LayerSequence,
    PhotonicChirpSpec,
};
use common::{amplitude_by_quadrature, rel_dev_scaled};

fn random_sequence(rng: &mut ChaCha8Rng, max_layers: usize) -> LayerSequence {
    let n = rng.gen_range(1..=max_layers);
    let layers = (0..n)
        .map(|_| Layer {
            length: rng.gen_range(5.0..400.0),
            chi: if rng.gen_bool(0.3) {
                -rng.gen_range(0.2..2.0)
            } else {
                rng.gen_range(0.2..2.0)
            },
            dk_offset: rng.gen_range(-0.05..0.05),
        })
        .collect();
    LayerSequence::new(layers).unwrap()
}

#[test]
fn quadrature_oracle_validates_general_amplitude() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51dc_0001);
    for case in 0..100 {
        let seq = random_sequence(&mut rng, 8);
        let dk = rng.gen_range(-0.12..0.12);
        let engine = amplitude_general(&seq, dk);
        let oracle = amplitude_by_quadrature(&seq, dk, 1e-12);
        let scale = seq.total_length() * seq.chi_ref();
        let dev = (engine - oracle).norm() / oracle.norm().max(1e-8 * scale);
        assert!(dev < 1e-8, "case {case}: dev {dev:.2e}");
    }
}

#[test]
fn quadrature_oracle_fixed_three_layer_stack() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51dc_0002);
    let seq = random_sequence(&mut rng, 3);
    for dk in [-0.08, -0.013, 0.0, 0.004, 0.09] {
        let engine = amplitude_general(&seq, dk);
        let oracle = amplitude_by_quadrature(&seq, dk, 1e-12);
        let dev = (engine - oracle).norm() / oracle.norm().max(1e-30);
        assert!(dev < 1e-8, "dk={dk}: dev {dev:.2e}");
    }
}

#[test]
fn triple_form_agreement_random_photonic() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51dc_0003);
    for _ in 0..120 {
        let spec = PhotonicChirpSpec {
            n_layers: rng.gen_range(1..=100),
            layer_len: rng.gen_range(20.0..2000.0),
            chi0: rng.gen_range(0.3..2.0),
            alpha: rng.gen_range(-2e-5..2e-5),
        };
        let seq = build_photonic(&spec).unwrap();
        let total = spec.total_len();
        for _ in 0..4 {
            let dk = rng.gen_range(-0.15..0.15);
            let general = amplitude_general(&seq, dk).norm_sqr()
                / (total * total * spec.chi0 * spec.chi0);
            let closed = amplitude_photonic(&spec, dk).norm_sqr()
                / (total * total * spec.chi0 * spec.chi0);
            let double = density_photonic(&spec, dk);
            let dev1 = rel_dev_scaled(general, closed, 1.0);
            let dev2 = rel_dev_scaled(general, double, 1.0);
            assert!(dev1 < 1e-9 && dev2 < 1e-9, "spec {spec:?} dk {dk}");
        }
    }
}

#[test]
fn triple_form_agreement_random_aperiodic() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51dc_0004);
    for _ in 0..120 {
        let n_layers = rng.gen_range(1..=100);
        let l0 = rng.gen_range(20.0..300.0);
        let zeta_lo = -l0 / (n_layers.max(2) as f64) * 0.9;
        let spec = AperiodicPolingSpec {
            n_layers,
            l0,
            zeta: rng.gen_range(zeta_lo..3.0),
            chi0: rng.gen_range(0.3..2.0),
        };
        spec.validate().unwrap();
        let seq = build_aperiodic(&spec).unwrap();
        let total = spec.total_len();
        for _ in 0..4 {
            let dk = rng.gen_range(-0.15..0.15);
            let (_, lmax) = spec.layer_len_range();
            let in_fallback = (dk * lmax).abs() < 2.0 * DK_FALLBACK_THRESHOLD;
            let tol = if in_fallback { 1e-7 } else { 1e-9 };
            let general = amplitude_general(&seq, dk).norm_sqr()
                / (total * total * spec.chi0 * spec.chi0);
            let closed = amplitude_aperiodic(&spec, dk).norm_sqr()
                / (total * total * spec.chi0 * spec.chi0);
            let double = density_aperiodic(&spec, dk);
            assert!(
                rel_dev_scaled(general, closed, 1.0) < tol
                    && rel_dev_scaled(general, double, 1.0) < tol,
                "spec {spec:?} dk {dk}"
            );
        }
    }
}

#[test]
fn fallback_window_is_continuous() {
    // Straddle the series/direct switch by a hair: the jump itself must be
    // far below the 1e-6 continuity budget.
    let mut rng = ChaCha8Rng::seed_from_u64(0x51dc_0005);
    for _ in 0..50 {
        let spec = AperiodicPolingSpec {
            n_layers: 2 * rng.gen_range(1..=60),
            l0: rng.gen_range(20.0..200.0),
            zeta: rng.gen_range(0.0..2.0),
            chi0: 1.0,
        };
        let (_, lmax) = spec.layer_len_range();
        let d_lo = density_aperiodic(&spec, (1.0 - 1e-9) * DK_FALLBACK_THRESHOLD / lmax);
        let d_hi = density_aperiodic(&spec, (1.0 + 1e-9) * DK_FALLBACK_THRESHOLD / lmax);
        let dev = (d_lo - d_hi).abs() / d_lo.abs().max(d_hi.abs()).max(1e-300);
        assert!(dev < 1e-6 || d_lo.max(d_hi) < 1e-18, "spec {spec:?} dev {dev:.2e}");
    }

    // The chirped-poling fixture also sails through the wider +/-50% probe.
    let spec = AperiodicPolingSpec {
        n_layers: 50,
        l0: 88.09,
        zeta: 2.82,
        chi0: 1.0,
    };
    let (_, lmax) = spec.layer_len_range();
    let d_lo = density_aperiodic(&spec, 0.5 * DK_FALLBACK_THRESHOLD / lmax);
    let d_hi = density_aperiodic(&spec, 1.5 * DK_FALLBACK_THRESHOLD / lmax);
    let dev = (d_lo - d_hi).abs() / d_lo.abs().max(d_hi.abs());
    assert!(dev < 1e-6, "dev {dev:.2e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn photonic_lengths_and_offsets_are_affine(
        n in 1usize..60,
        l in 1.0f64..500.0,
        alpha in -1e-4f64..1e-4,
    ) {
        let spec = PhotonicChirpSpec { n_layers: n, layer_len: l, chi0: 1.0, alpha };
        let seq = build_photonic(&spec).unwrap();
        let total = seq.total_length();
        prop_assert!((total - n as f64 * l).abs() <= 1e-12 * total.abs());
        for w in seq.layers().windows(2) {
            let step = w[1].dk_offset - w[0].dk_offset;
            prop_assert!((step + alpha * l).abs() <= 1e-12 * (alpha * l).abs().max(1e-300));
        }
    }

    #[test]
    fn aperiodic_alternation_and_length_steps(
        n in 1usize..60,
        l0 in 1.0f64..300.0,
        zeta in 0.0f64..3.0,
        chi0 in 0.1f64..3.0,
    ) {
        let spec = AperiodicPolingSpec { n_layers: n, l0, zeta, chi0 };
        let seq = build_aperiodic(&spec).unwrap();
        for w in seq.layers().windows(2) {
            prop_assert!((w[0].chi * w[1].chi + chi0 * chi0).abs() <= 1e-12 * chi0 * chi0);
            prop_assert!((w[1].length - w[0].length - zeta).abs() <= 1e-12 * l0);
        }
    }

    #[test]
    fn zeta_alpha_round_trip(l0 in 1.0f64..500.0, alpha in -1e-3f64..1e-3) {
        let zeta = biphoton::model::zeta_from_alpha(l0, alpha).unwrap();
        let back = biphoton::model::alpha_from_zeta(l0, zeta).unwrap();
        prop_assert!((back - alpha).abs() <= 1e-12 * alpha.abs().max(1e-300));
    }

    #[test]
    fn solve_l0_round_trip(n in 1usize..200, zeta in 0.0f64..2.0, total in 100.0f64..20000.0) {
        prop_assume!(total / n as f64 > zeta * (n as f64 + 1.0) / 2.0 + 0.01);
        let l0 = biphoton::model::solve_l0(n, zeta, total).unwrap();
        let sum: f64 = (1..=n).map(|k| l0 + k as f64 * zeta).sum();
        prop_assert!((sum - total).abs() <= 1e-9 * total);
    }

    #[test]
    fn densities_nonnegative_and_bounded_for_uniform_chi(
        n in 1usize..40,
        l in 10.0f64..800.0,
        alpha in -5e-5f64..5e-5,
        dk in -0.2f64..0.2,
    ) {
        let spec = PhotonicChirpSpec { n_layers: n, layer_len: l, chi0: 1.0, alpha };
        let d = density_photonic(&spec, dk);
        prop_assert!(d >= 0.0);
        prop_assert!(d <= 1.0 + 1e-9);
        let seq = build_photonic(&spec).unwrap();
        let dg = density_general(&seq, dk);
        prop_assert!((0.0..=1.0 + 1e-9).contains(&dg));
    }

    #[test]
    fn partial_sum_matches_value(
        n in 1usize..30,
        l in 10.0f64..500.0,
        alpha in -5e-5f64..5e-5,
        dk in -0.2f64..0.2,
    ) {
        let spec = PhotonicChirpSpec { n_layers: n, layer_len: l, chi0: 1.0, alpha };
        let seq = build_photonic(&spec).unwrap();
        let det = biphoton::engine::amplitude_general_detailed(&seq, dk);
        let total: num_complex::Complex64 = det.partials.iter().sum();
        prop_assert!((total - det.value).norm() <= 1e-12 * det.value.norm().max(1e-300));
    }
}
