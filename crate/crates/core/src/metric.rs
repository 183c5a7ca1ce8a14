//! Kinetic-energy metric on `Q = SO(3) × ℝ²`.
//!
//! Rows and columns are ordered `(φ̇, θ̇, ψ̇, ẋ, ẏ)` everywhere in the crate,
//! matching [`TangentCoords`]. The height rate is eliminated with
//! `ż = ∂z/∂θ θ̇ + ∂z/∂ψ ψ̇`.

use nalgebra::{Matrix3, SMatrix};
#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::{height_at, ChartPoint, SemiAxes, TangentCoords, Vec3};

/// Principal moments of inertia about the centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaTensor(Vec3);

impl InertiaTensor {
    pub fn diagonal(&self) -> Vec3 {
        self.0
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&self.0)
    }
}

pub fn inertia(ax: &SemiAxes) -> InertiaTensor {
    let d = ax.squares();
    let k = ax.m() / 5.0;
    InertiaTensor(Vec3::new(k * (d.y + d.z), k * (d.x + d.z), k * (d.x + d.y)))
}

/// Linear map from Euler rates `(φ̇, θ̇, ψ̇)` to the body angular velocity.
pub fn euler_rate_map(theta: f64, psi: f64) -> Matrix3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    Matrix3::new(sp * st, cp, 0.0, cp * st, -sp, 0.0, ct, 0.0, 1.0)
}

pub fn body_angular_velocity(chart: &ChartPoint, rates: &Vec3) -> Vec3 {
    euler_rate_map(chart.theta(), chart.psi()) * rates
}

/// Symmetric positive-definite 5×5 metric in coordinate components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricMatrix5(SMatrix<f64, 5, 5>);

impl MetricMatrix5 {
    pub fn matrix(&self) -> &SMatrix<f64, 5, 5> {
        &self.0
    }

    pub fn inner(&self, u: &TangentCoords, v: &TangentCoords) -> f64 {
        u.to_vector().dot(&(self.0 * v.to_vector()))
    }
}

pub(crate) fn metric_at(ax: &SemiAxes, theta: f64, psi: f64) -> MetricMatrix5 {
    let w = euler_rate_map(theta, psi);
    let h = height_at(ax, theta, psi);
    let dz = Vec3::new(0.0, h.dz_dtheta, h.dz_dpsi);
    let m = ax.m();
    let ang = w.transpose() * inertia(ax).matrix() * w + dz * dz.transpose() * m;
    let mut g = SMatrix::<f64, 5, 5>::zeros();
    g.fixed_view_mut::<3, 3>(0, 0).copy_from(&ang);
    g[(3, 3)] = m;
    g[(4, 4)] = m;
    // exact symmetry; the products above agree only to rounding
    let g = (g + g.transpose()) * 0.5;
    MetricMatrix5(g)
}

pub fn metric_matrix(ax: &SemiAxes, chart: &ChartPoint) -> MetricMatrix5 {
    metric_at(ax, chart.theta(), chart.psi())
}

pub fn inner(metric: &MetricMatrix5, u: &TangentCoords, v: &TangentCoords) -> f64 {
    metric.inner(u, v)
}
