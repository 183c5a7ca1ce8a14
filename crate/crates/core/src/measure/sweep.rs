use core::f64::consts::PI;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, SemiAxes, SymmetryClass, CHART_EPS};

use super::trace::{structure_trace_numeric, trace_closed_form};

/// Verdict threshold on `sup |trace|`. The trace is dimensionless and does
/// not depend on the mass, so the threshold is absolute.
pub const DEFAULT_TOL_ZERO: f64 = 1e-8;

pub fn default_tol_zero() -> f64 {
    DEFAULT_TOL_ZERO
}

/// `φ` at which the numeric trace is evaluated during sweeps.
pub const SWEEP_PHI: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Numeric,
    ClosedForm,
    Both,
}

/// Cell-centred tensor grid over `[ε, π − ε] × [ε, 2π − ε]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_psi: usize,
}

impl GridSpec {
    pub fn new(n_theta: usize, n_psi: usize) -> Result<Self> {
        if n_theta < 8 || n_psi < 8 {
            return Err(Error::GridTooSmall { n_theta, n_psi });
        }
        Ok(Self { n_theta, n_psi })
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_psi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn chart(&self, i_theta: usize, i_psi: usize) -> ChartPoint {
        let dt = (PI - 2.0 * CHART_EPS) / self.n_theta as f64;
        let dp = (2.0 * PI - 2.0 * CHART_EPS) / self.n_psi as f64;
        let theta = CHART_EPS + (i_theta as f64 + 0.5) * dt;
        let psi = CHART_EPS + (i_psi as f64 + 0.5) * dp;
        ChartPoint::new(theta, psi).expect("cell centres lie inside the chart")
    }
}

/// Grid points in row-major `(i_theta, i_psi)` order.
pub fn grid_charts(grid: &GridSpec) -> impl Iterator<Item = (usize, usize, ChartPoint)> + '_ {
    (0..grid.n_theta).flat_map(move |i| (0..grid.n_psi).map(move |j| (i, j, grid.chart(i, j))))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub i_theta: usize,
    pub i_psi: usize,
    pub chart: ChartPoint,
    pub numeric: Option<f64>,
    pub closed_form: Option<f64>,
}

impl TracePoint {
    /// The value the verdict is based on: the numeric trace when available.
    pub fn verdict_value(&self) -> f64 {
        self.numeric.or(self.closed_form).unwrap_or(0.0)
    }

    pub fn discrepancy(&self) -> Option<f64> {
        match (self.numeric, self.closed_form) {
            (Some(n), Some(c)) => Some((n - c).abs() / c.abs().max(1.0)),
            _ => None,
        }
    }
}

pub fn evaluate_point(ax: &SemiAxes, i_theta: usize, i_psi: usize, chart: ChartPoint, mode: SweepMode) -> Result<TracePoint> {
    let numeric = match mode {
        SweepMode::Numeric | SweepMode::Both => Some(structure_trace_numeric(ax, &chart, SWEEP_PHI)?),
        SweepMode::ClosedForm => None,
    };
    let closed_form = match mode {
        SweepMode::ClosedForm | SweepMode::Both => Some(trace_closed_form(ax, &chart)?),
        SweepMode::Numeric => None,
    };
    Ok(TracePoint {
        i_theta,
        i_psi,
        chart,
        numeric,
        closed_form,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureVerdict {
    pub sup_abs_trace: f64,
    pub argmax_chart: ChartPoint,
    pub argmax_index: (usize, usize),
    /// Whether the necessary condition for an invariant measure holds on the
    /// grid, i.e. `sup_abs_trace ≤ tol_zero`.
    pub necessary_condition_holds: bool,
    pub grid: GridSpec,
    pub tol_zero: f64,
    pub mode: SweepMode,
    /// Largest relative numeric-vs-closed-form gap (mode `Both` only).
    pub max_discrepancy: Option<f64>,
    /// Outcome expected from the symmetry class alone: at least two equal
    /// semi-axes.
    pub expected_from_symmetry: bool,
}

/// Reduces grid evaluations to a verdict. The result does not depend on the
/// order of `points`: ties in `|trace|` go to the lowest `(i_theta, i_psi)`.
pub fn verdict_from_points(ax: &SemiAxes, grid: GridSpec, tol_zero: f64, mode: SweepMode, points: &[TracePoint]) -> MeasureVerdict {
    let mut best: Option<&TracePoint> = None;
    let mut max_disc: Option<f64> = None;
    for p in points {
        let v = p.verdict_value().abs();
        let better = match best {
            None => true,
            Some(b) => {
                let bv = b.verdict_value().abs();
                v > bv || (v == bv && (p.i_theta, p.i_psi) < (b.i_theta, b.i_psi))
            }
        };
        if better {
            best = Some(p);
        }
        if let Some(d) = p.discrepancy() {
            max_disc = Some(max_disc.map_or(d, |m: f64| m.max(d)));
        }
    }
    let (sup, chart, index) = match best {
        Some(b) => (b.verdict_value().abs(), b.chart, (b.i_theta, b.i_psi)),
        None => (0.0, grid.chart(0, 0), (0, 0)),
    };
    MeasureVerdict {
        sup_abs_trace: sup,
        argmax_chart: chart,
        argmax_index: index,
        necessary_condition_holds: sup <= tol_zero,
        grid,
        tol_zero,
        mode,
        max_discrepancy: max_disc,
        expected_from_symmetry: ax.symmetry_class() != SymmetryClass::Triaxial,
    }
}

/// Evaluates the trace on the whole grid and returns the verdict together
/// with the per-point values.
pub fn sweep_verdict(
    ax: &SemiAxes,
    n_theta: usize,
    n_psi: usize,
    tol_zero: f64,
    mode: SweepMode,
) -> Result<(MeasureVerdict, Vec<TracePoint>)> {
    let grid = GridSpec::new(n_theta, n_psi)?;
    let points = grid_charts(&grid)
        .map(|(i, j, chart)| evaluate_point(ax, i, j, chart, mode))
        .collect::<Result<Vec<_>>>()?;
    Ok((verdict_from_points(ax, grid, tol_zero, mode, &points), points))
}
