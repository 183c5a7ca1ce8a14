use core::f64::consts::PI;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{wrap_two_pi, ChartPoint, SemiAxes};
use crate::measure::check_theta_margin;

use super::integrate::{integrate, integrate_quasi, time_grid, QuasiMonitor, Scheme, Trajectory, VectorialMonitor};
use super::quasi::{convert_state, QuasiMomentumState};
use super::vectorial::ReducedState;

/// Side-by-side run of the two reduced formulations from matched initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct BackendComparison {
    pub vectorial: Trajectory<ReducedState, VectorialMonitor>,
    pub quasi: Trajectory<QuasiMomentumState, QuasiMonitor>,
    /// Largest `max(|Δθ|, |Δψ|)` over the compared steps, `ψ` compared mod 2π.
    pub max_chart_deviation: f64,
    /// Largest `|H − E|` over the compared steps.
    pub max_energy_gap: f64,
    /// Number of leading steps present in both trajectories.
    pub compared_steps: usize,
    pub truncated: bool,
    pub t_reached: f64,
}

fn wrapped_gap(a: f64, b: f64) -> f64 {
    let d = wrap_two_pi(a - b);
    d.min(2.0 * PI - d)
}

/// Integrates both formulations over `[0, t_end]` and records how far apart
/// they drift. Leaving the chart truncates the comparison instead of failing.
pub fn compare_backends(ax: &SemiAxes, s0: &ReducedState, dt: f64, t_end: f64) -> Result<BackendComparison> {
    time_grid(dt, t_end)?;
    let q0 = match convert_state(ax, s0) {
        Ok(q) => q,
        Err(Error::PoleProximity { .. }) => {
            let vectorial = Trajectory {
                times: alloc::vec![0.0],
                states: alloc::vec![*s0],
                monitors: alloc::vec![VectorialMonitor {
                    energy: super::vectorial::energy(ax, s0),
                    gamma_norm_err: s0.gamma.norm() - 1.0,
                }],
                truncated: true,
            };
            let quasi = Trajectory {
                times: Vec::new(),
                states: Vec::new(),
                monitors: Vec::new(),
                truncated: true,
            };
            return Ok(BackendComparison {
                vectorial,
                quasi,
                max_chart_deviation: 0.0,
                max_energy_gap: 0.0,
                compared_steps: 0,
                truncated: true,
                t_reached: 0.0,
            });
        }
        Err(e) => return Err(e),
    };
    let mut vectorial = integrate(ax, s0, dt, t_end, Scheme::Rk4)?;
    let quasi = integrate_quasi(ax, &q0, dt, t_end, Scheme::Rk4)?;

    let mut truncated = quasi.truncated;
    let mut max_chart_deviation: f64 = 0.0;
    let mut max_energy_gap: f64 = 0.0;
    let mut compared = 0;
    for k in 0..vectorial.len().min(quasi.len()) {
        let g = vectorial.states[k].gamma;
        let chart = match ChartPoint::from_gamma(&g) {
            Ok(c) if check_theta_margin(c.theta()).is_ok() => c,
            _ => {
                truncated = true;
                break;
            }
        };
        let qc = quasi.states[k].chart;
        let dev = (chart.theta() - qc.theta()).abs().max(wrapped_gap(chart.psi(), qc.psi()));
        max_chart_deviation = max_chart_deviation.max(dev);
        max_energy_gap = max_energy_gap.max((vectorial.monitors[k].energy - quasi.monitors[k].hamiltonian).abs());
        compared = k + 1;
    }
    vectorial.truncated = truncated;
    let t_reached = if compared > 0 { vectorial.times[compared - 1] } else { 0.0 };
    Ok(BackendComparison {
        vectorial,
        quasi,
        max_chart_deviation,
        max_energy_gap,
        compared_steps: compared,
        truncated,
        t_reached,
    })
}
