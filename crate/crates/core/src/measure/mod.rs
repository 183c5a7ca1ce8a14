//! Structure coefficients of the invariant frame and the trace criterion for
//! the existence of an invariant measure.
//!
//! With `Z` spanning the vertical part of `D` and `Y₁, Y₂` its horizontal
//! complement, the reduced dynamics can only preserve a smooth volume if
//! `C_{Z,Y₁}^{Y₁} + C_{Z,Y₂}^{Y₂}` vanishes on the whole shape space, where
//! `P[W_I, W_J] = C_{IJ}^K W_K`. The trace equals the `X₁`-coefficient of
//! `P[Z, X₁]` plus the `X₂`-coefficient of `P[Z, X₂]` in the basis
//! `(Z, X₁, X₂)`, which is what [`structure_trace_numeric`] evaluates.

mod bracket;
mod sweep;
mod trace;

pub use bracket::{lie_bracket, structure_coefficients, StructureCoefficients};
pub use sweep::{
    default_tol_zero, evaluate_point, grid_charts, sweep_verdict, verdict_from_points, GridSpec, MeasureVerdict, SweepMode, TracePoint,
    DEFAULT_TOL_ZERO, SWEEP_PHI,
};
pub use trace::{g_fun, structure_trace, structure_trace_numeric, trace_closed_form, StructureTrace, TOL_XCHECK};

pub(crate) use bracket::{check_theta_margin, structure_coefficients_at};
