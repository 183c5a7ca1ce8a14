use core::f64::consts::PI;

use nalgebra::{SMatrix, Vector3};

use crate::error::{Error, Result};
use crate::frame::{fields_at, FieldKind, FrameAtPoint, LocalFrame};
use crate::geometry::{ChartPoint, ConfigCoords, SemiAxes, TangentCoords, CHART_EPS};
use crate::numdiff::{stencil, step};

/// Checks that a central-difference stencil of half-width `2h` around `theta`
/// stays in the shrunk chart. `φ` and `ψ` are periodic and never checked.
pub(crate) fn check_theta_margin(theta: f64) -> Result<()> {
    let margin = 2.0 * step(theta);
    if theta - margin >= CHART_EPS && theta + margin <= PI - CHART_EPS {
        Ok(())
    } else {
        Err(Error::ChartMarginViolation { theta })
    }
}

/// Frame fields at a point and their Jacobians in `(φ, θ, ψ)`.
///
/// The fields do not depend on `x, y`, so those columns are zero and omitted.
pub(crate) struct FrameStencil {
    pub center: FrameAtPoint,
    jac: [SMatrix<f64, 5, 3>; 5],
}

fn slot(kind: FieldKind) -> usize {
    match kind {
        FieldKind::Z => 0,
        FieldKind::X1 => 1,
        FieldKind::X2 => 2,
        FieldKind::Y1 => 3,
        FieldKind::Y2 => 4,
    }
}

impl FrameStencil {
    pub fn new(ax: &SemiAxes, phi: f64, theta: f64, psi: f64) -> Result<Self> {
        check_theta_margin(theta)?;
        let center = fields_at(ax, phi, theta, psi).0;
        let mut jac = [SMatrix::<f64, 5, 3>::zeros(); 5];
        let coords = [phi, theta, psi];
        for dir in 0..3 {
            let (lo, hi, span) = stencil(coords[dir]);
            let mut at_lo = coords;
            let mut at_hi = coords;
            at_lo[dir] = lo;
            at_hi[dir] = hi;
            let f_lo = fields_at(ax, at_lo[0], at_lo[1], at_lo[2]).0;
            let f_hi = fields_at(ax, at_hi[0], at_hi[1], at_hi[2]).0;
            for kind in FieldKind::ALL {
                let d = (f_hi.field(kind).to_vector() - f_lo.field(kind).to_vector()) / span;
                jac[slot(kind)].set_column(dir, &d);
            }
        }
        Ok(Self { center, jac })
    }

    /// `[u, v] = Dv·u − Du·v`.
    pub fn bracket(&self, u: FieldKind, v: FieldKind) -> TangentCoords {
        let uu: Vector3<f64> = self.center.field(u).angular();
        let vv: Vector3<f64> = self.center.field(v).angular();
        TangentCoords::from_vector(&(self.jac[slot(v)] * uu - self.jac[slot(u)] * vv))
    }
}

/// Lie bracket of two frame fields at `q`, by central differences.
pub fn lie_bracket(ax: &SemiAxes, u: FieldKind, v: FieldKind, q: &ConfigCoords) -> Result<TangentCoords> {
    let s = FrameStencil::new(ax, q.phi, q.chart.theta(), q.chart.psi())?;
    Ok(s.bracket(u, v))
}

/// Coefficients `C_{IJ}^K` of `P[W_I, W_J] = C_{IJ}^K W_K` in the frame
/// `W = (Z, Y₁, Y₂)`, indexed `c[I][J][K]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureCoefficients {
    pub c: [[[f64; 3]; 3]; 3],
}

impl StructureCoefficients {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[i][j][k]
    }

    /// `C_{Z,Y₁}^{Y₁} + C_{Z,Y₂}^{Y₂}`.
    pub fn vertical_trace(&self) -> f64 {
        self.c[0][1][1] + self.c[0][2][2]
    }
}

const FRAME: [FieldKind; 3] = [FieldKind::Z, FieldKind::Y1, FieldKind::Y2];

pub(crate) fn structure_coefficients_at(ax: &SemiAxes, phi: f64, theta: f64, psi: f64) -> Result<StructureCoefficients> {
    let stencil = FrameStencil::new(ax, phi, theta, psi)?;
    let local = LocalFrame::at(ax, phi, theta, psi)?;
    let mut c = [[[0.0; 3]; 3]; 3];
    for (i, &u) in FRAME.iter().enumerate() {
        for (j, &v) in FRAME.iter().enumerate() {
            if i == j {
                continue;
            }
            let p = local.project(&stencil.bracket(u, v));
            let zy = local.to_zy_basis(&p.coeffs);
            c[i][j] = [zy[0], zy[1], zy[2]];
        }
    }
    Ok(StructureCoefficients { c })
}

pub fn structure_coefficients(ax: &SemiAxes, chart: &ChartPoint) -> Result<StructureCoefficients> {
    structure_coefficients_at(ax, PI, chart.theta(), chart.psi())
}
