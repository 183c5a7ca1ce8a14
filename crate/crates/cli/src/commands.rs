use rayon::prelude::*;
use rollmeasure_core::density::{
    chart_divergence, liouville_trajectory_test, ChartOrientation, ChartSelection, DensityCandidate, DivergenceRecord, DivergenceReport,
    DivergenceSample, VolumeForm,
};
use rollmeasure_core::dynamics::{compare_backends, integrate, Scheme};
use rollmeasure_core::geometry::EqualPair;
use rollmeasure_core::measure::{evaluate_point, grid_charts, verdict_from_points, GridSpec, DEFAULT_TOL_ZERO};
use rollmeasure_core::{ChartPoint, SemiAxes, SymmetryClass};
use serde::Serialize;

use crate::config::{positive, seeded, uniform5, BodyConfig, FileValues, InitialData, DEFAULT_OMEGA_MAX};
use crate::error::CliError;
use crate::output::{ensure_dir, num, write_json, Csv};
use crate::{CheckArgs, CompareArgs, DensityArg, DensityArgs, ModeArg, SimulateArgs};

fn symmetry_label(ax: &SemiAxes) -> &'static str {
    match ax.symmetry_class() {
        SymmetryClass::Sphere => "sphere",
        SymmetryClass::Axisymmetric(EqualPair::AB) => "axisymmetric a=b",
        SymmetryClass::Axisymmetric(EqualPair::BC) => "axisymmetric b=c",
        SymmetryClass::Axisymmetric(EqualPair::AC) => "axisymmetric a=c",
        SymmetryClass::Triaxial => "triaxial",
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Serialize)]
struct CheckConfig {
    body: BodyConfig,
    grid: usize,
    tol_zero: f64,
    mode: &'static str,
    out: String,
}

#[derive(Serialize)]
struct Argmax {
    i_theta: usize,
    i_psi: usize,
    theta: f64,
    psi: f64,
}

#[derive(Serialize)]
struct VerdictFile {
    config: CheckConfig,
    symmetry_class: &'static str,
    necessary_condition_holds: bool,
    expected_from_symmetry: bool,
    sup_abs_trace: f64,
    argmax: Argmax,
    max_discrepancy: Option<f64>,
    points: usize,
}

pub fn check_measure(args: &CheckArgs) -> Result<(), CliError> {
    let file = FileValues::load(args.body.config.as_deref())?;
    let (body, ax) = BodyConfig::resolve(&args.body, &file)?;
    let n = file.pick(args.grid, "grid")?.unwrap_or(64);
    let tol_zero = positive(file.pick(args.tol_zero, "tol-zero")?.unwrap_or(DEFAULT_TOL_ZERO), "tol-zero")?;
    let mode = file.pick(args.mode, "mode")?.unwrap_or(ModeArg::Both);
    let out = crate::config::resolve_out(&args.body, &file)?;
    let grid = GridSpec::new(n, n)?;
    let sweep_mode = mode.sweep_mode();

    let charts: Vec<(usize, usize, ChartPoint)> = grid_charts(&grid).collect();
    let points = charts
        .par_iter()
        .map(|&(i, j, c)| evaluate_point(&ax, i, j, c, sweep_mode))
        .collect::<Result<Vec<_>, _>>()?;
    let verdict = verdict_from_points(&ax, grid, tol_zero, sweep_mode, &points);

    ensure_dir(&out)?;
    let mut csv = Csv::create(
        &out,
        "trace_grid.csv",
        &["i_theta", "i_psi", "theta", "psi", "trace_numeric", "trace_closed"],
    )?;
    for p in &points {
        csv.row([
            p.i_theta.to_string(),
            p.i_psi.to_string(),
            num(p.chart.theta()),
            num(p.chart.psi()),
            opt_num(p.numeric),
            opt_num(p.closed_form),
        ])?;
    }
    csv.finish()?;
    let file = VerdictFile {
        config: CheckConfig {
            body,
            grid: n,
            tol_zero,
            mode: mode.as_str(),
            out: out.display().to_string(),
        },
        symmetry_class: symmetry_label(&ax),
        necessary_condition_holds: verdict.necessary_condition_holds,
        expected_from_symmetry: verdict.expected_from_symmetry,
        sup_abs_trace: verdict.sup_abs_trace,
        argmax: Argmax {
            i_theta: verdict.argmax_index.0,
            i_psi: verdict.argmax_index.1,
            theta: verdict.argmax_chart.theta(),
            psi: verdict.argmax_chart.psi(),
        },
        max_discrepancy: verdict.max_discrepancy,
        points: points.len(),
    };
    write_json(&out, "verdict.json", &file)?;
    println!(
        "necessary condition {} (sup |trace| = {:.3e}, tol {:.1e})",
        if verdict.necessary_condition_holds { "holds" } else { "fails" },
        verdict.sup_abs_trace,
        tol_zero
    );
    Ok(())
}

#[derive(Serialize)]
struct SimulateConfig {
    body: BodyConfig,
    dt: f64,
    t_end: f64,
    seed: Option<u64>,
    omega_max: f64,
    initial: InitialData,
    out: String,
}

#[derive(Serialize)]
struct SimulateSummary {
    config: SimulateConfig,
    steps: usize,
    initial_energy: f64,
    final_relative_energy_drift: f64,
    max_relative_energy_drift: f64,
    max_gamma_norm_err: f64,
}

fn relative_drift(e: f64, e0: f64) -> f64 {
    if e0 > 0.0 {
        (e - e0).abs() / e0
    } else {
        (e - e0).abs()
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let file = FileValues::load(args.body.config.as_deref())?;
    let (body, ax) = BodyConfig::resolve(&args.body, &file)?;
    let dt = positive(file.pick(args.dt, "dt")?.unwrap_or(1e-3), "dt")?;
    let t_end = positive(file.pick(args.t_end, "t-end")?.unwrap_or(10.0), "t-end")?;
    let seed = file.pick(args.seed, "seed")?;
    let initial = InitialData::resolve(
        file.pick(args.gamma, "gamma")?,
        file.pick(args.omega, "omega")?,
        seed,
        DEFAULT_OMEGA_MAX,
    )?;
    let out = crate::config::resolve_out(&args.body, &file)?;

    let traj = integrate(&ax, &initial.state(&ax), dt, t_end, Scheme::Rk4)?;

    ensure_dir(&out)?;
    let header = ["t", "gamma1", "gamma2", "gamma3", "K1", "K2", "K3", "energy", "gamma_norm_err"];
    let mut csv = Csv::create(&out, "trajectory.csv", &header)?;
    let e0 = traj.monitors[0].energy;
    let mut max_drift = 0.0f64;
    let mut max_gamma = 0.0f64;
    for ((t, s), m) in traj.times.iter().zip(&traj.states).zip(&traj.monitors) {
        csv.row([*t, s.gamma.x, s.gamma.y, s.gamma.z, s.k.x, s.k.y, s.k.z, m.energy, m.gamma_norm_err].map(num))?;
        max_drift = max_drift.max(relative_drift(m.energy, e0));
        max_gamma = max_gamma.max(m.gamma_norm_err.abs());
    }
    csv.finish()?;
    let final_drift = relative_drift(traj.monitors.last().map_or(e0, |m| m.energy), e0);
    let summary = SimulateSummary {
        config: SimulateConfig {
            body,
            dt,
            t_end,
            seed,
            omega_max: DEFAULT_OMEGA_MAX,
            initial,
            out: out.display().to_string(),
        },
        steps: traj.len() - 1,
        initial_energy: e0,
        final_relative_energy_drift: final_drift,
        max_relative_energy_drift: max_drift,
        max_gamma_norm_err: max_gamma,
    };
    write_json(&out, "summary.json", &summary)?;
    println!("final relative energy drift: {final_drift:.3e}");
    Ok(())
}

#[derive(Serialize)]
struct DensityConfig {
    body: BodyConfig,
    density: &'static str,
    samples: usize,
    trajectories: usize,
    omega_max: f64,
    dt: f64,
    t_end: f64,
    seed: u64,
    out: String,
}

#[derive(Serialize)]
struct SampleStats {
    count: usize,
    max_abs_residual: f64,
    max_relative: f64,
    mean_relative: f64,
}

#[derive(Serialize)]
struct TrajectoryDefect {
    index: usize,
    theta0: f64,
    psi0: f64,
    omega0: [f64; 3],
    evaluated_steps: usize,
    max_defect: f64,
    truncated: bool,
}

#[derive(Serialize)]
struct DensitySummary {
    config: DensityConfig,
    density_tag: &'static str,
    samples: SampleStats,
    trajectories: Vec<TrajectoryDefect>,
    max_trajectory_defect: f64,
}

pub fn verify_density(args: &DensityArgs) -> Result<(), CliError> {
    let file = FileValues::load(args.body.config.as_deref())?;
    let (body, ax) = BodyConfig::resolve(&args.body, &file)?;
    let density = file.pick(args.density, "density")?.unwrap_or(DensityArg::Paper);
    let n_samples = file.pick(args.samples, "samples")?.unwrap_or(200);
    let n_traj = file.pick(args.trajectories, "trajectories")?.unwrap_or(10);
    let omega_max = positive(file.pick(args.omega_max, "omega-max")?.unwrap_or(DEFAULT_OMEGA_MAX), "omega-max")?;
    let dt = positive(file.pick(args.dt, "dt")?.unwrap_or(1e-3), "dt")?;
    let t_end = positive(file.pick(args.t_end, "t-end")?.unwrap_or(5.0), "t-end")?;
    let seed = file
        .pick(args.seed, "seed")?
        .ok_or_else(|| CliError::config("verify-density draws random samples and needs --seed"))?;
    let out = crate::config::resolve_out(&args.body, &file)?;
    if n_samples == 0 {
        return Err(CliError::config("--samples must be at least 1"));
    }
    let rho = match density {
        DensityArg::Paper => {
            if !matches!(
                ax.symmetry_class(),
                SymmetryClass::Sphere | SymmetryClass::Axisymmetric(EqualPair::AB)
            ) {
                return Err(CliError::config(
                    "--density paper needs a = b; use --density constant for other shapes",
                ));
            }
            DensityCandidate::PaperAxisymmetric
        }
        DensityArg::Constant => DensityCandidate::Constant,
    };

    let mut rng = seeded(seed);
    let samples: Vec<DivergenceSample> = (0..n_samples)
        .map(|_| DivergenceSample::from_uniform(uniform5(&mut rng), omega_max))
        .collect();
    let starts: Vec<DivergenceSample> = (0..n_traj)
        .map(|_| DivergenceSample::from_uniform(uniform5(&mut rng), omega_max))
        .collect();

    let records = samples
        .par_iter()
        .map(|s| chart_divergence(&ax, &rho, s).map(|value| DivergenceRecord { sample: *s, value }))
        .collect::<Result<Vec<_>, _>>()?;
    let report = DivergenceReport::from_records(rho.tag(), records);
    let defects = starts
        .par_iter()
        .enumerate()
        .map(|(index, s)| {
            let s0 = s.to_state(&ax, ChartOrientation::Standard);
            let r = liouville_trajectory_test(&ax, &rho, &s0, dt, t_end, VolumeForm::Area, ChartSelection::Adaptive)?;
            Ok(TrajectoryDefect {
                index,
                theta0: s.theta,
                psi0: s.psi,
                omega0: [s.omega.x, s.omega.y, s.omega.z],
                evaluated_steps: r.defects.len(),
                max_defect: r.max_defect,
                truncated: r.truncated,
            })
        })
        .collect::<Result<Vec<_>, rollmeasure_core::Error>>()?;

    ensure_dir(&out)?;
    let header = ["theta", "psi", "Omega1", "Omega2", "Omega3", "residual", "relative"];
    let mut csv = Csv::create(&out, "divergence.csv", &header)?;
    for r in &report.records {
        let s = &r.sample;
        csv.row(
            [
                s.theta,
                s.psi,
                s.omega.x,
                s.omega.y,
                s.omega.z,
                r.value.residual,
                r.value.relative(),
            ]
            .map(num),
        )?;
    }
    csv.finish()?;
    let max_trajectory_defect = defects.iter().map(|d| d.max_defect).fold(0.0, f64::max);
    let summary = DensitySummary {
        config: DensityConfig {
            body,
            density: density.as_str(),
            samples: n_samples,
            trajectories: n_traj,
            omega_max,
            dt,
            t_end,
            seed,
            out: out.display().to_string(),
        },
        density_tag: report.tag.as_str(),
        samples: SampleStats {
            count: report.records.len(),
            max_abs_residual: report.max_abs_residual,
            max_relative: report.max_relative,
            mean_relative: report.mean_relative,
        },
        trajectories: defects,
        max_trajectory_defect,
    };
    write_json(&out, "summary.json", &summary)?;
    println!(
        "{}: max relative residual {:.3e} over {} samples, max Liouville defect {:.3e} over {} trajectories",
        report.tag.as_str(),
        report.max_relative,
        report.records.len(),
        max_trajectory_defect,
        n_traj
    );
    Ok(())
}

#[derive(Serialize)]
struct CompareConfig {
    body: BodyConfig,
    dt: f64,
    t_end: f64,
    seed: Option<u64>,
    omega_max: f64,
    initial: InitialData,
    out: String,
}

#[derive(Serialize)]
struct CompareSummary {
    config: CompareConfig,
    max_chart_deviation: f64,
    max_energy_gap: f64,
    compared_steps: usize,
    truncated: bool,
    t_reached: f64,
}

pub fn compare(args: &CompareArgs) -> Result<(), CliError> {
    let file = FileValues::load(args.body.config.as_deref())?;
    let (body, ax) = BodyConfig::resolve(&args.body, &file)?;
    let dt = positive(file.pick(args.dt, "dt")?.unwrap_or(1e-4), "dt")?;
    let t_end = positive(file.pick(args.t_end, "t-end")?.unwrap_or(1.0), "t-end")?;
    let seed = file.pick(args.seed, "seed")?;
    let initial = InitialData::resolve(
        file.pick(args.gamma, "gamma")?,
        file.pick(args.omega, "omega")?,
        seed,
        DEFAULT_OMEGA_MAX,
    )?;
    let out = crate::config::resolve_out(&args.body, &file)?;

    let cmp = compare_backends(&ax, &initial.state(&ax), dt, t_end)?;

    ensure_dir(&out)?;
    let header = [
        "t",
        "theta_vectorial",
        "psi_vectorial",
        "theta",
        "psi",
        "p_alpha1",
        "p_alpha2",
        "p_a",
        "energy",
        "H",
    ];
    let mut csv = Csv::create(&out, "trajectory.csv", &header)?;
    for k in 0..cmp.compared_steps {
        let v = ChartPoint::from_gamma(&cmp.vectorial.states[k].gamma)?;
        let q = &cmp.quasi.states[k];
        csv.row(
            [
                cmp.vectorial.times[k],
                v.theta(),
                v.psi(),
                q.chart.theta(),
                q.chart.psi(),
                q.p_alpha[0],
                q.p_alpha[1],
                q.p_a,
                cmp.vectorial.monitors[k].energy,
                cmp.quasi.monitors[k].hamiltonian,
            ]
            .map(num),
        )?;
    }
    csv.finish()?;
    let summary = CompareSummary {
        config: CompareConfig {
            body,
            dt,
            t_end,
            seed,
            omega_max: DEFAULT_OMEGA_MAX,
            initial,
            out: out.display().to_string(),
        },
        max_chart_deviation: cmp.max_chart_deviation,
        max_energy_gap: cmp.max_energy_gap,
        compared_steps: cmp.compared_steps,
        truncated: cmp.truncated,
        t_reached: cmp.t_reached,
    };
    write_json(&out, "summary.json", &summary)?;
    println!(
        "max (theta, psi) deviation {:.3e}, max |H - E| {:.3e} over {} steps{}",
        cmp.max_chart_deviation,
        cmp.max_energy_gap,
        cmp.compared_steps,
        if cmp.truncated { " (truncated)" } else { "" }
    );
    Ok(())
}
