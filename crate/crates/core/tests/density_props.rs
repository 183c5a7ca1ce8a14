use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rollmeasure_core::density::{
    chart_divergence, chart_divergence_with, density_paper, divergence_report, fit_exp_quadratic, liouville_trajectory_test, ChartOptions,
    ChartOrientation, ChartSelection, DensityCandidate, DivergenceSample, VolumeForm,
};
use rollmeasure_core::{SemiAxes, Vec3};
use std::f64::consts::TAU;

fn samples(seed: u64, n: usize) -> Vec<DivergenceSample> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| DivergenceSample::from_uniform(std::array::from_fn(|_| rng.random()), 2.0))
        .collect()
}

fn unit() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-1.0f64..1.0)
        .prop_filter("away from the origin", |v| Vec3::new(v[0], v[1], v[2]).norm() > 0.1)
        .prop_map(|v| Vec3::new(v[0], v[1], v[2]).normalize())
}

fn omega() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-2.0f64..2.0).prop_map(|v| Vec3::new(v[0], v[1], v[2]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn chart_orientations_agree(g in unit(), om in omega(), k in 0usize..3) {
        let shapes = [(1.0, 2.0, 3.0), (1.0, 1.0, 2.0), (0.7, 1.3, 0.9)];
        let (a, b, c) = shapes[k];
        let ax = SemiAxes::new(a, b, c, 1.0).unwrap();
        let mut vals = Vec::new();
        for o in [ChartOrientation::Standard, ChartOrientation::Cyclic] {
            let (theta, psi) = o.coords(&g);
            prop_assume!(theta > 0.2 && theta < std::f64::consts::PI - 0.2);
            let opts = ChartOptions { orientation: o, form: VolumeForm::Area };
            let d = chart_divergence_with(&ax, &DensityCandidate::PaperForm, &DivergenceSample { theta, psi, omega: om }, opts).unwrap();
            vals.push((d.normalized(), d.scale / d.weight));
        }
        let scale = vals[0].1.max(vals[1].1).max(1.0);
        prop_assert!((vals[0].0 - vals[1].0).abs() <= 1e-6 * scale, "{:?}", vals);
    }

    #[test]
    fn residual_scales_linearly_in_omega(t in 0.2f64..2.9, p in 0.0f64..TAU, om in omega(), lam in 0.5f64..3.0) {
        prop_assume!(om.norm() > 0.1);
        let ax = SemiAxes::new(1.0, 2.0, 3.0, 1.0).unwrap();
        let s = DivergenceSample { theta: t, psi: p, omega: om };
        let s2 = DivergenceSample { omega: om * lam, ..s };
        let r1 = chart_divergence(&ax, &DensityCandidate::Constant, &s).unwrap();
        let r2 = chart_divergence(&ax, &DensityCandidate::Constant, &s2).unwrap();
        prop_assert!((r2.residual - lam * r1.residual).abs() <= 1e-6 * lam * r1.scale);
    }

    #[test]
    fn closed_form_density_is_axially_symmetric(t in 0.1f64..3.0, p in 0.0f64..TAU, rot in 0.0f64..TAU) {
        let ax = SemiAxes::new(1.2, 1.2, 0.7, 2.0).unwrap();
        let g = ChartOrientation::Standard.gamma(t, p);
        let h = ChartOrientation::Standard.gamma(t, p + rot);
        let (dg, dh) = (density_paper(&ax, &g).unwrap(), density_paper(&ax, &h).unwrap());
        prop_assert!((dg - dh).abs() <= 1e-12 * dg);
    }
}

#[test]
fn oblate_and_prolate_bodies_preserve_the_known_density() {
    let s = samples(3, 60);
    for (a, c) in [(1.0, 2.0), (2.0, 1.0), (1.0, 1.0), (0.5, 3.0)] {
        let ax = SemiAxes::new(a, a, c, 1.7).unwrap();
        let rep = divergence_report(&ax, &DensityCandidate::PaperAxisymmetric, &s, ChartOptions::default()).unwrap();
        assert!(rep.max_relative < 1e-6, "a={a} c={c}: {}", rep.max_relative);
    }
}

#[test]
fn coordinate_form_misses_the_known_density() {
    let ax = SemiAxes::new(1.0, 1.0, 2.0, 1.0).unwrap();
    let opts = ChartOptions {
        form: VolumeForm::Coordinate,
        ..Default::default()
    };
    let rep = divergence_report(&ax, &DensityCandidate::PaperAxisymmetric, &samples(4, 50), opts).unwrap();
    assert!(rep.max_relative > 1e-2);
}

#[test]
fn no_exp_quadratic_density_fits_a_triaxial_body() {
    let s = samples(5, 200);
    for (a, b, c) in [(1.0, 2.0, 3.0), (1.0, 1.1, 1.21)] {
        let ax = SemiAxes::new(a, b, c, 1.0).unwrap();
        let fit = fit_exp_quadratic(&ax, &s, ChartOptions::default()).unwrap();
        assert!(fit.rms_relative >= 1e-3, "{}", fit.rms_relative);
        let rep = divergence_report(&ax, &fit.candidate, &s, ChartOptions::default()).unwrap();
        assert!(rep.max_relative >= 1e-3);
        for rho in [DensityCandidate::Constant, DensityCandidate::PaperForm] {
            let rep = divergence_report(&ax, &rho, &s, ChartOptions::default()).unwrap();
            assert!(rep.max_relative >= 1e-3);
        }
    }
}

#[test]
fn adaptive_chart_handles_pole_passage() {
    let ax = SemiAxes::new(1.0, 1.0, 2.0, 1.0).unwrap();
    // γ̇ ≈ e₃ × Ω points at the standard pole
    let om = Vec3::new(-1.0f64.cos(), 1.0f64.sin(), 0.0) * 1.5;
    let s0 = DivergenceSample {
        theta: 0.05,
        psi: 1.0,
        omega: om,
    }
    .to_state(&ax, ChartOrientation::Standard);
    let run = |sel| liouville_trajectory_test(&ax, &DensityCandidate::PaperAxisymmetric, &s0, 1e-3, 0.2, VolumeForm::Area, sel).unwrap();
    let fixed = run(ChartSelection::Fixed(ChartOrientation::Standard));
    let adaptive = run(ChartSelection::Adaptive);
    assert!(!adaptive.truncated);
    assert!(adaptive.max_defect < 1e-5, "{}", adaptive.max_defect);
    assert!(fixed.truncated || fixed.max_defect > 10.0 * adaptive.max_defect);
}
