//! Invariant frame of the constraint distribution `D` and the orthogonal
//! projector onto it.
//!
//! `D` is spanned by
//!
//! ```text
//! Z  = ∂φ + x_phi ∂x + y_phi ∂y
//! X₁ = ∂θ + z sinφ ∂x − z cosφ ∂y
//! X₂ = ∂ψ + x_psi ∂x + y_psi ∂y
//! ```
//!
//! `Z` spans the part of `D` tangent to the group orbits (`∂φ, ∂x, ∂y`). The
//! horizontal fields `Y_α = X_α − (G(Z, X_α) / G(Z, Z)) Z` are its metric
//! complement inside `D`.

use core::f64::consts::PI;

use nalgebra::{linalg::Cholesky, Const, Matrix3};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{constraint_coeffs, height_at, ChartPoint, ConfigCoords, SemiAxes, TangentCoords, Vec3};
use crate::metric::{metric_at, MetricMatrix5};

/// Selector for the frame fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Z,
    X1,
    X2,
    Y1,
    Y2,
}

impl FieldKind {
    pub const ALL: [FieldKind; 5] = [FieldKind::Z, FieldKind::X1, FieldKind::X2, FieldKind::Y1, FieldKind::Y2];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameAtPoint {
    pub z: TangentCoords,
    pub x1: TangentCoords,
    pub x2: TangentCoords,
    pub y1: TangentCoords,
    pub y2: TangentCoords,
}

impl FrameAtPoint {
    pub fn field(&self, kind: FieldKind) -> TangentCoords {
        match kind {
            FieldKind::Z => self.z,
            FieldKind::X1 => self.x1,
            FieldKind::X2 => self.x2,
            FieldKind::Y1 => self.y1,
            FieldKind::Y2 => self.y2,
        }
    }
}

/// Gram matrix of `(Z, X₁, X₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramT {
    matrix: Matrix3<f64>,
    det: f64,
}

impl GramT {
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    /// Determinant, taken from the Cholesky factor.
    pub fn determinant(&self) -> f64 {
        self.det
    }
}

/// Result of projecting a tangent vector onto `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    /// Coefficients along `(Z, X₁, X₂)`.
    pub coeffs: Vec3,
    pub projected: TangentCoords,
}

/// Everything needed to project onto `D` at one configuration.
#[derive(Debug, Clone)]
pub(crate) struct LocalFrame {
    pub fields: FrameAtPoint,
    pub metric: MetricMatrix5,
    gram: Matrix3<f64>,
    chol: Cholesky<f64, Const<3>>,
    /// `G(Z, X_α) / G(Z, Z)` for `α = 1, 2`.
    shear: [f64; 2],
}

pub(crate) fn fields_at(ax: &SemiAxes, phi: f64, theta: f64, psi: f64) -> (FrameAtPoint, MetricMatrix5, [f64; 2]) {
    let cc = constraint_coeffs(ax, phi, theta, psi);
    let z_height = height_at(ax, theta, psi).z;
    let (sf, cf) = phi.sin_cos();
    let metric = metric_at(ax, theta, psi);
    let z = TangentCoords::new(1.0, 0.0, 0.0, cc.x_phi, cc.y_phi);
    let x1 = TangentCoords::new(0.0, 1.0, 0.0, z_height * sf, -z_height * cf);
    let x2 = TangentCoords::new(0.0, 0.0, 1.0, cc.x_psi, cc.y_psi);
    let gzz = metric.inner(&z, &z);
    let shear = [metric.inner(&z, &x1) / gzz, metric.inner(&z, &x2) / gzz];
    let frame = FrameAtPoint {
        z,
        x1,
        x2,
        y1: x1 - shear[0] * z,
        y2: x2 - shear[1] * z,
    };
    (frame, metric, shear)
}

impl LocalFrame {
    pub fn at(ax: &SemiAxes, phi: f64, theta: f64, psi: f64) -> Result<Self> {
        let (fields, metric, shear) = fields_at(ax, phi, theta, psi);
        let basis = [fields.z, fields.x1, fields.x2];
        let gram = Matrix3::from_fn(|i, j| metric.inner(&basis[i], &basis[j]));
        let chol = gram.cholesky().ok_or(Error::NonPositiveDefinite)?;
        Ok(Self {
            fields,
            metric,
            gram,
            chol,
            shear,
        })
    }

    pub fn gram(&self) -> GramT {
        let l = self.chol.l_dirty();
        let d = l[(0, 0)] * l[(1, 1)] * l[(2, 2)];
        GramT {
            matrix: self.gram,
            det: d * d,
        }
    }

    pub fn project(&self, v: &TangentCoords) -> Projection {
        let f = &self.fields;
        let rhs = Vec3::new(self.metric.inner(&f.z, v), self.metric.inner(&f.x1, v), self.metric.inner(&f.x2, v));
        let coeffs = self.chol.solve(&rhs);
        let projected = coeffs[0] * f.z + coeffs[1] * f.x1 + coeffs[2] * f.x2;
        Projection { coeffs, projected }
    }

    /// Rewrites `(Z, X₁, X₂)` coefficients in the basis `(Z, Y₁, Y₂)`.
    pub fn to_zy_basis(&self, coeffs: &Vec3) -> Vec3 {
        Vec3::new(
            coeffs[0] + self.shear[0] * coeffs[1] + self.shear[1] * coeffs[2],
            coeffs[1],
            coeffs[2],
        )
    }
}

pub fn frame_fields(ax: &SemiAxes, q: &ConfigCoords) -> FrameAtPoint {
    fields_at(ax, q.phi, q.chart.theta(), q.chart.psi()).0
}

/// Gram matrix of `(Z, X₁, X₂)`; it depends on the chart point only.
pub fn gram_t(ax: &SemiAxes, chart: &ChartPoint) -> Result<GramT> {
    Ok(LocalFrame::at(ax, PI, chart.theta(), chart.psi())?.gram())
}

/// Metric-orthogonal projection of `v` onto `D` at `q`.
pub fn project_d(ax: &SemiAxes, q: &ConfigCoords, v: &TangentCoords) -> Result<Projection> {
    Ok(LocalFrame::at(ax, q.phi, q.chart.theta(), q.chart.psi())?.project(v))
}
