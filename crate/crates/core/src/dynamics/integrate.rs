use alloc::vec::Vec;

use nalgebra::SVector;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::SemiAxes;

use super::quasi::{hamiltonian, hamiltonian_field, QuasiMomentumState};
use super::vectorial::{energy, vector_field, ReducedState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorialMonitor {
    pub energy: f64,
    /// `|γ| − 1`.
    pub gamma_norm_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiMonitor {
    pub hamiltonian: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S, M> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub monitors: Vec<M>,
    /// Set when integration stopped before `t_end` because the state left
    /// the chart.
    pub truncated: bool,
}

impl<S, M> Trajectory<S, M> {
    fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            monitors: Vec::with_capacity(n),
            truncated: false,
        }
    }

    fn push(&mut self, t: f64, s: S, m: M) {
        self.times.push(t);
        self.states.push(s);
        self.monitors.push(m);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }
}

/// Time grid `t_k = k·dt`, with the final step shortened to land on `t_end`.
pub(crate) fn time_grid(dt: f64, t_end: f64) -> Result<Vec<f64>> {
    if !(dt.is_finite() && t_end.is_finite() && dt > 0.0 && t_end >= dt) {
        return Err(Error::InvalidStep { dt, t_end });
    }
    let ratio = t_end / dt;
    let n = if (ratio - ratio.round()).abs() <= 1e-9 * ratio {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    };
    let mut t: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
    t.push(t_end);
    Ok(t)
}

pub(crate) fn rk4_step<const N: usize, F>(f: &mut F, y: &SVector<f64, N>, h: f64) -> Result<SVector<f64, N>>
where
    F: FnMut(&SVector<f64, N>) -> Result<SVector<f64, N>>,
{
    let k1 = f(y)?;
    let k2 = f(&(y + k1 * (0.5 * h)))?;
    let k3 = f(&(y + k2 * (0.5 * h)))?;
    let k4 = f(&(y + k3 * h))?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

fn vectorial_monitor(ax: &SemiAxes, s: &ReducedState) -> VectorialMonitor {
    VectorialMonitor {
        energy: energy(ax, s),
        gamma_norm_err: s.gamma.norm() - 1.0,
    }
}

/// Fixed-step integration of the `(γ, K)` equations. `γ` is never
/// renormalized; its drift is reported in the monitors.
pub fn integrate(
    ax: &SemiAxes,
    s0: &ReducedState,
    dt: f64,
    t_end: f64,
    scheme: Scheme,
) -> Result<Trajectory<ReducedState, VectorialMonitor>> {
    let Scheme::Rk4 = scheme;
    let grid = time_grid(dt, t_end)?;
    let mut traj = Trajectory::with_capacity(grid.len());
    let mut y = s0.to_vector();
    traj.push(0.0, *s0, vectorial_monitor(ax, s0));
    let mut rhs = |v: &SVector<f64, 6>| -> Result<SVector<f64, 6>> {
        let r = vector_field(ax, &ReducedState::from_vector(v));
        Ok(SVector::<f64, 6>::new(
            r.gamma_dot.x,
            r.gamma_dot.y,
            r.gamma_dot.z,
            r.k_dot.x,
            r.k_dot.y,
            r.k_dot.z,
        ))
    };
    for w in grid.windows(2) {
        y = rk4_step(&mut rhs, &y, w[1] - w[0])?;
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { time: w[1] });
        }
        let s = ReducedState::from_vector(&y);
        traj.push(w[1], s, vectorial_monitor(ax, &s));
    }
    Ok(traj)
}

fn is_chart_exit(e: &Error) -> bool {
    matches!(e, Error::ChartMarginViolation { .. } | Error::ChartOutOfRange { .. })
}

/// Fixed-step integration of the quasi-momentum equations. Stops with
/// `truncated = true` when the state comes too close to a chart pole.
pub fn integrate_quasi(
    ax: &SemiAxes,
    s0: &QuasiMomentumState,
    dt: f64,
    t_end: f64,
    scheme: Scheme,
) -> Result<Trajectory<QuasiMomentumState, QuasiMonitor>> {
    let Scheme::Rk4 = scheme;
    let grid = time_grid(dt, t_end)?;
    let mut traj = Trajectory::with_capacity(grid.len());
    traj.push(
        0.0,
        *s0,
        QuasiMonitor {
            hamiltonian: hamiltonian(ax, s0)?,
        },
    );
    let mut y = s0.to_vector();
    let mut rhs = |v: &SVector<f64, 5>| -> Result<SVector<f64, 5>> {
        let s = QuasiMomentumState::from_vector(v)?;
        Ok(hamiltonian_field(ax, &s)?.to_vector())
    };
    for w in grid.windows(2) {
        let next = match rk4_step(&mut rhs, &y, w[1] - w[0]) {
            Ok(n) => n,
            Err(e) if is_chart_exit(&e) => {
                traj.truncated = true;
                break;
            }
            Err(e) => return Err(e),
        };
        if !next.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { time: w[1] });
        }
        let s = match QuasiMomentumState::from_vector(&next) {
            Ok(s) => s,
            Err(_) => {
                traj.truncated = true;
                break;
            }
        };
        y = s.to_vector();
        traj.push(
            w[1],
            s,
            QuasiMonitor {
                hamiltonian: hamiltonian(ax, &s)?,
            },
        );
    }
    Ok(traj)
}
