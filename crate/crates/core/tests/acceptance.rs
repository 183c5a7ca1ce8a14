//! End-to-end acceptance checks. Runs as a plain binary and prints one
//! PASS/FAIL line per criterion; exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rollmeasure_core::density::{
    divergence_report, liouville_trajectory_test, ChartOptions, ChartOrientation, ChartSelection, DensityCandidate, DivergenceSample,
    VolumeForm,
};
use rollmeasure_core::dynamics::{compare_backends, integrate, k_from_omega, ReducedState, Scheme};
use rollmeasure_core::frame::{frame_fields, gram_t, project_d, FieldKind};
use rollmeasure_core::geometry::{constraint_coeffs, gamma_from_r, height, r_from_gamma};
use rollmeasure_core::measure::{
    grid_charts, lie_bracket, structure_coefficients, structure_trace, structure_trace_numeric, sweep_verdict, GridSpec, SweepMode,
    DEFAULT_TOL_ZERO,
};
use rollmeasure_core::metric::metric_matrix;
use rollmeasure_core::{ChartPoint, ConfigCoords, SemiAxes, TangentCoords, Vec3};

fn axes(a: f64, b: f64, c: f64, m: f64) -> SemiAxes {
    SemiAxes::new(a, b, c, m).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn criterion_1() -> Outcome {
    let cases = [
        ((1.0, 1.0, 2.0, 1.0), true),
        ((1.0, 2.0, 2.0, 1.0), true),
        ((2.0, 1.0, 2.0, 1.0), true),
        ((1.0, 1.0, 1.0, 1.0), true),
        ((1.0, 2.0, 3.0, 1.0), false),
        ((1.0, 1.1, 1.21, 1.0), false),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for ((a, b, c, m), expected) in cases {
        let start = Instant::now();
        let (v, _) = sweep_verdict(&axes(a, b, c, m), 64, 64, DEFAULT_TOL_ZERO, SweepMode::Numeric).unwrap();
        let took = start.elapsed();
        let ok = v.necessary_condition_holds == expected && took <= Duration::from_secs(60);
        pass &= ok;
        parts.push(format!(
            "({a},{b},{c},{m}) sup={:.2e} holds={} {:.1}s",
            v.sup_abs_trace,
            v.necessary_condition_holds,
            took.as_secs_f64()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_2() -> Outcome {
    let shapes = [
        (1.0, 2.0, 3.0, 1.0),
        (1.0, 1.1, 1.21, 1.0),
        (2.0, 1.0, 3.0, 0.5),
        (0.5, 1.5, 0.8, 3.0),
        (1.0, 1.0, 2.0, 1.0),
    ];
    let grid = GridSpec::new(32, 32).unwrap();
    let mut worst = 0.0f64;
    for (a, b, c, m) in shapes {
        let ax = axes(a, b, c, m);
        for (_, _, chart) in grid_charts(&grid) {
            worst = worst.max(structure_trace(&ax, &chart, 1.0).unwrap().discrepancy());
        }
    }
    outcome(worst <= 1e-6, format!("max relative discrepancy {worst:.3e}"))
}

fn criterion_3() -> Outcome {
    let ax = axes(1.0, 2.0, 3.0, 1.0);
    let mut worst = 0.0f64;
    for k in 1..32 {
        let s = k as f64 / 32.0;
        let trace = |t: f64, p: f64| structure_trace_numeric(&ax, &ChartPoint::new(t, p).unwrap(), 1.0).unwrap().abs();
        worst = worst.max(trace(PI / 2.0, 0.01 + s * (2.0 * PI - 0.02)));
        for p in [PI / 2.0, PI, 1.5 * PI] {
            worst = worst.max(trace(0.01 + s * (PI - 0.02), p));
        }
    }
    outcome(worst <= 1e-8, format!("max |trace| {worst:.3e}"))
}

fn energy_errors(ax: &SemiAxes, s0: &ReducedState, dt: f64) -> (f64, f64) {
    let tr = integrate(ax, s0, dt, 10.0, Scheme::Rk4).unwrap();
    let e0 = tr.monitors[0].energy;
    tr.monitors.iter().fold((0.0f64, 0.0f64), |(e, g), m| {
        (e.max((m.energy - e0).abs() / e0), g.max(m.gamma_norm_err.abs()))
    })
}

fn criterion_4() -> Outcome {
    let ax = axes(1.0, 2.0, 3.0, 1.0);
    let g = ChartPoint::new(1.0, 0.7).unwrap().gamma();
    let om = Vec3::new(0.6, -0.4, 0.9).normalize() * 2.0;
    let s0 = ReducedState::new(g, k_from_omega(&ax, &g, &om));
    let (e1, g1) = energy_errors(&ax, &s0, 1e-3);
    let (e2, _) = energy_errors(&ax, &s0, 5e-4);
    let ratio = e1 / e2;
    let pass = e1 <= 1e-8 && g1 <= 1e-8 && (12.0..=20.0).contains(&ratio);
    outcome(pass, format!("energy {e1:.3e}, |γ| {g1:.3e}, halving ratio {ratio:.2}"))
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, b, c) in [(1.0, 1.0, 2.0), (1.0, 2.0, 3.0)] {
        let ax = axes(a, b, c, 1.0);
        let g = ChartPoint::new(1.2, 0.8).unwrap().gamma();
        let s0 = ReducedState::new(g, k_from_omega(&ax, &g, &Vec3::new(0.5, -0.3, 0.9)));
        let cmp = compare_backends(&ax, &s0, 1e-4, 1.0).unwrap();
        let ok = !cmp.truncated && cmp.max_chart_deviation <= 1e-6 && cmp.max_energy_gap <= 1e-9;
        pass &= ok;
        parts.push(format!(
            "({a},{b},{c}) chart {:.2e} |H−E| {:.2e}",
            cmp.max_chart_deviation, cmp.max_energy_gap
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let samples: Vec<_> = (0..200)
        .map(|_| DivergenceSample::from_uniform(std::array::from_fn(|_| rng.random()), 2.0))
        .collect();
    let starts = &samples[..10];
    let opts = ChartOptions::default();
    let max_defect = |ax: &SemiAxes, rho: &DensityCandidate| {
        starts
            .iter()
            .map(|s| {
                let s0 = s.to_state(ax, ChartOrientation::Standard);
                liouville_trajectory_test(ax, rho, &s0, 1e-3, 5.0, VolumeForm::Area, ChartSelection::Adaptive)
                    .unwrap()
                    .max_defect
            })
            .fold(0.0f64, f64::max)
    };

    let axisym = axes(1.0, 1.0, 2.0, 1.0);
    let paper = DensityCandidate::PaperAxisymmetric;
    let known_samples = divergence_report(&axisym, &paper, &samples, opts).unwrap().max_relative;
    let known_traj = max_defect(&axisym, &paper);

    let tri = axes(1.0, 2.0, 3.0, 1.0);
    let constant = DensityCandidate::Constant;
    let const_samples = divergence_report(&tri, &constant, &samples, opts).unwrap().max_relative;
    let const_traj = max_defect(&tri, &constant);

    let pass = known_samples <= 1e-5 && known_traj <= 1e-5 && const_samples >= 1e-2 && const_traj >= 1e-2;
    outcome(
        pass,
        format!("known density: samples {known_samples:.2e}, trajectories {known_traj:.2e}; constant on (1,2,3,1): samples {const_samples:.2e}, trajectories {const_traj:.2e}"),
    )
}

fn hat(v: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

fn criterion_7() -> Outcome {
    let rz = |a: f64| Rotation3::from_axis_angle(&Vector3::z_axis(), a).into_inner();
    let rx = |a: f64| Rotation3::from_axis_angle(&Vector3::x_axis(), a).into_inner();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut round, mut height_gap, mut kin) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let ax = axes(
            rng.random_range(0.3..3.0),
            rng.random_range(0.3..3.0),
            rng.random_range(0.3..3.0),
            rng.random_range(0.2..5.0),
        );
        let phi = rng.random_range(0.0..2.0 * PI);
        let chart = ChartPoint::new(rng.random_range(0.01..PI - 0.01), rng.random_range(0.01..2.0 * PI - 0.01)).unwrap();
        let (t, p) = (chart.theta(), chart.psi());
        let g = chart.gamma();
        let r = r_from_gamma(&ax, &g).unwrap();
        round = round.max((gamma_from_r(&ax, &r).unwrap() - g).norm());
        let h = height(&ax, &chart);
        height_gap = height_gap.max((h.z + r.dot(&g)).abs());
        let cc = constraint_coeffs(&ax, phi, t, p);
        let d_phi = -(rz(phi) * hat(&Vec3::z()) * rx(t) * rz(p) * r);
        let d_theta = -(rz(phi) * rx(t) * hat(&Vec3::x()) * rz(p) * r);
        let d_psi = -(rz(phi) * rx(t) * rz(p) * hat(&Vec3::z()) * r);
        let got = [cc.x_phi, cc.y_phi, h.z * phi.sin(), -h.z * phi.cos(), cc.x_psi, cc.y_psi];
        let want = [d_phi.x, d_phi.y, d_theta.x, d_theta.y, d_psi.x, d_psi.y];
        for k in 0..6 {
            kin = kin.max((got[k] - want[k]).abs());
        }
    }
    let pass = round <= 1e-12 && height_gap <= 1e-12 && kin <= 1e-10;
    outcome(pass, format!("r↔γ {round:.2e}, z+r·γ {height_gap:.2e}, −ġr {kin:.2e}"))
}

fn criterion_8() -> Outcome {
    let shapes = [(1.0, 2.0, 3.0, 1.0), (1.0, 1.0, 2.0, 1.0), (0.5, 1.5, 0.8, 3.0)];
    let grid = GridSpec::new(16, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut min_eig, mut phi_gap, mut idem, mut anti, mut skew) = (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (a, b, c, m) in shapes {
        let ax = axes(a, b, c, m);
        for (i, j, chart) in grid_charts(&grid) {
            let t = gram_t(&ax, &chart).unwrap();
            let scale = t.matrix().amax();
            min_eig = min_eig.min(t.matrix().symmetric_eigenvalues().min() / scale);
            let phi = rng.random_range(0.0..2.0 * PI);
            let q = ConfigCoords::new(phi, chart, 0.0, 0.0).unwrap();
            let f = frame_fields(&ax, &q);
            let g = metric_matrix(&ax, &chart);
            let w = [f.z, f.x1, f.x2];
            let tq = Matrix3::from_fn(|r, s| g.inner(&w[r], &w[s]));
            phi_gap = phi_gap.max((tq - t.matrix()).amax() / scale);

            let v = TangentCoords::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            );
            let p1 = project_d(&ax, &q, &v).unwrap().projected;
            let p2 = project_d(&ax, &q, &p1).unwrap().projected;
            idem = idem.max((p2 - p1).max_abs());

            if (i + j) % 4 == 0 {
                for u in FieldKind::ALL {
                    for v in FieldKind::ALL {
                        let uv = lie_bracket(&ax, u, v, &q).unwrap();
                        let vu = lie_bracket(&ax, v, u, &q).unwrap();
                        anti = anti.max((uv + vu).max_abs());
                    }
                }
                let cs = structure_coefficients(&ax, &chart).unwrap();
                for x in 0..3 {
                    for y in 0..3 {
                        for z in 0..3 {
                            skew = skew.max((cs.get(x, y, z) + cs.get(y, x, z)).abs());
                        }
                    }
                }
            }
        }
    }
    let pass = min_eig > 0.0 && phi_gap <= 1e-12 && idem <= 1e-10 && anti <= 1e-9 && skew <= 1e-9;
    outcome(
        pass,
        format!("min eig/scale {min_eig:.2e}, φ-gap {phi_gap:.2e}, idempotence {idem:.2e}, antisymmetry {anti:.2e}, skew {skew:.2e}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("trace verdicts on 64x64 grids", criterion_1),
        ("numeric vs closed-form trace", criterion_2),
        ("trace zeros on symmetry lines", criterion_3),
        ("RK4 conservation and order", criterion_4),
        ("backend equivalence", criterion_5),
        ("axisymmetric density", criterion_6),
        ("geometry oracles", criterion_7),
        ("frame and projection", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {} [{tag}] {name}: {} ({:.1}s)",
            k + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
