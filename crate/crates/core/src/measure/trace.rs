#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;
use crate::frame::{FieldKind, LocalFrame};
use crate::geometry::{height, ChartPoint, SemiAxes};

use super::bracket::FrameStencil;

/// Agreement required between the numeric and closed-form traces, relative to
/// `max(1, |closed form|)`.
pub const TOL_XCHECK: f64 = 1e-6;

/// `X₁`-coefficient of `P[Z, X₁]` plus `X₂`-coefficient of `P[Z, X₂]`, with
/// brackets taken by central differences at `(phi_sample, θ, ψ)`.
pub fn structure_trace_numeric(ax: &SemiAxes, chart: &ChartPoint, phi_sample: f64) -> Result<f64> {
    let (theta, psi) = (chart.theta(), chart.psi());
    let stencil = FrameStencil::new(ax, phi_sample, theta, psi)?;
    let local = LocalFrame::at(ax, phi_sample, theta, psi)?;
    let c1 = local.project(&stencil.bracket(FieldKind::Z, FieldKind::X1)).coeffs;
    let c2 = local.project(&stencil.bracket(FieldKind::Z, FieldKind::X2)).coeffs;
    Ok(c1[1] + c2[2])
}

/// The polynomial factor of the closed-form trace that never vanishes
/// identically.
pub fn g_fun(ax: &SemiAxes, chart: &ChartPoint) -> f64 {
    let d = ax.squares();
    let (a2, b2, c2) = (d.x, d.y, d.z);
    let c2t = (2.0 * chart.theta()).cos();
    let c2p = (2.0 * chart.psi()).cos();
    (2.0 * a2 * b2 + 3.0 * a2 * c2 + 3.0 * b2 * c2) + (b2 - a2) * c2 * (1.0 - c2t) * c2p + (-2.0 * a2 * b2 + a2 * c2 + b2 * c2) * c2t
}

/// Closed form of the trace:
///
/// ```text
/// 3m³ sin⁴θ cosθ sinψ cosψ (a²−b²)(b²−c²)(c²−a²) G(θ, ψ) / (50 det T z⁴)
/// ```
pub fn trace_closed_form(ax: &SemiAxes, chart: &ChartPoint) -> Result<f64> {
    let det = crate::frame::gram_t(ax, chart)?.determinant();
    let z = height(ax, chart).z;
    let d = ax.squares();
    let m = ax.m();
    let (st, ct) = chart.theta().sin_cos();
    let (sp, cp) = chart.psi().sin_cos();
    let shape = (d.x - d.y) * (d.y - d.z) * (d.z - d.x);
    Ok(3.0 * m.powi(3) * st.powi(4) * ct * sp * cp / (50.0 * det * z.powi(4)) * shape * g_fun(ax, chart))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureTrace {
    pub chart: ChartPoint,
    pub numeric_value: f64,
    pub closed_form_value: f64,
}

impl StructureTrace {
    /// `|numeric − closed| / max(1, |closed|)`.
    pub fn discrepancy(&self) -> f64 {
        (self.numeric_value - self.closed_form_value).abs() / self.closed_form_value.abs().max(1.0)
    }
}

pub fn structure_trace(ax: &SemiAxes, chart: &ChartPoint, phi_sample: f64) -> Result<StructureTrace> {
    Ok(StructureTrace {
        chart: *chart,
        numeric_value: structure_trace_numeric(ax, chart, phi_sample)?,
        closed_form_value: trace_closed_form(ax, chart)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn chart(t: f64, p: f64) -> ChartPoint {
        ChartPoint::new(t, p).unwrap()
    }

    #[test]
    fn g_fun_sphere_is_constant() {
        let r = 1.3f64;
        let ax = SemiAxes::new(r, r, r, 1.0).unwrap();
        for (t, p) in [(0.3, 0.2), (1.5, 4.0), (2.9, 6.0)] {
            assert!((g_fun(&ax, &chart(t, p)) - 8.0 * r.powi(4)).abs() < 1e-12);
        }
    }

    #[test]
    fn g_fun_axisymmetric_loses_psi_dependence() {
        let ax = SemiAxes::new(1.5, 1.5, 0.7, 1.0).unwrap();
        let (a2, c2) = (2.25, 0.49);
        let t = 1.1;
        let expected = (2.0 * a2 * a2 + 6.0 * a2 * c2) + (-2.0 * a2 * a2 + 2.0 * a2 * c2) * (2.0 * t).cos();
        for p in [0.3, 2.0, 5.0] {
            assert!((g_fun(&ax, &chart(t, p)) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn g_fun_triaxial_equator_value() {
        let ax = SemiAxes::new(1.0, 2.0, 3.0, 1.0).unwrap();
        assert!((g_fun(&ax, &chart(PI / 2.0, PI / 2.0)) - 52.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_exact_zeros() {
        let axi = SemiAxes::new(1.0, 2.0, 2.0, 1.0).unwrap();
        assert_eq!(trace_closed_form(&axi, &chart(1.0, 1.0)).unwrap(), 0.0);
        let tri = SemiAxes::new(1.0, 2.0, 3.0, 1.0).unwrap();
        assert!(trace_closed_form(&tri, &chart(1.0, PI / 2.0)).unwrap().abs() < 1e-16);
    }

    #[test]
    fn numeric_matches_closed_form_triaxial() {
        let ax = SemiAxes::new(1.0, 2.0, 3.0, 1.0).unwrap();
        let st = structure_trace(&ax, &chart(PI / 3.0, PI / 6.0), 0.3).unwrap();
        assert!(st.discrepancy() <= TOL_XCHECK);
        assert!(st.numeric_value.abs() > 1e-2);
    }

    #[test]
    fn numeric_vanishes_axisymmetric() {
        let ax = SemiAxes::new(1.0, 1.0, 2.0, 1.0).unwrap();
        for (t, p) in [(0.5, 0.4), (1.9, 2.2), (2.7, 5.3)] {
            assert!(structure_trace_numeric(&ax, &chart(t, p), 1.3).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn numeric_vanishes_on_equator() {
        let ax = SemiAxes::new(1.0, 2.0, 3.0, 1.0).unwrap();
        for p in [0.4, 1.0, 3.7] {
            assert!(structure_trace_numeric(&ax, &chart(PI / 2.0, p), 0.7).unwrap().abs() < 1e-8);
        }
    }
}
