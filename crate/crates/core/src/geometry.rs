//! Configuration-space geometry of the rolling ellipsoid.
//!
//! Euler angles follow the x-convention. The Poisson vector (the plane normal
//! in body coordinates) is `γ = g⁻¹e₃ = (sinθ sinψ, sinθ cosψ, cosθ)`, and `r`
//! points from the centre of the ellipsoid to the contact point, also in body
//! coordinates.

use core::f64::consts::PI;
use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, SVector, Vector3};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Width of the strip removed from each end of the open angle intervals.
pub const CHART_EPS: f64 = 1e-4;

/// Tolerance on `|γ| = 1` at API boundaries.
pub const UNIT_TOL: f64 = 1e-12;

/// Tolerance on the ellipsoid quadratic form for a contact vector.
pub const SURFACE_TOL: f64 = 1e-9;

/// Which two semi-axes coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualPair {
    AB,
    BC,
    AC,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryClass {
    Sphere,
    Axisymmetric(EqualPair),
    Triaxial,
}

/// Semi-axes `(a, b, c)` and mass `m` of a homogeneous ellipsoid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiAxes {
    a: f64,
    b: f64,
    c: f64,
    m: f64,
}

impl SemiAxes {
    pub fn new(a: f64, b: f64, c: f64, m: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(a) && ok(b) && ok(c) && ok(m) {
            Ok(Self { a, b, c, m })
        } else {
            Err(Error::InvalidSemiAxes { a, b, c, m })
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// `(a², b², c²)`.
    pub fn squares(&self) -> Vec3 {
        Vec3::new(self.a * self.a, self.b * self.b, self.c * self.c)
    }

    pub fn max_axis(&self) -> f64 {
        self.a.max(self.b).max(self.c)
    }

    /// Exact comparison of the stored values.
    #[allow(clippy::float_cmp)]
    pub fn symmetry_class(&self) -> SymmetryClass {
        match (self.a == self.b, self.b == self.c, self.a == self.c) {
            (true, true, _) => SymmetryClass::Sphere,
            (true, false, _) => SymmetryClass::Axisymmetric(EqualPair::AB),
            (false, true, _) => SymmetryClass::Axisymmetric(EqualPair::BC),
            (false, false, true) => SymmetryClass::Axisymmetric(EqualPair::AC),
            (false, false, false) => SymmetryClass::Triaxial,
        }
    }
}

/// Spherical coordinates `(θ, ψ)` on the shape space.
///
/// `θ` always lies in `[ε, π − ε]`. Points built with [`ChartPoint::new`] also
/// have `ψ ∈ [ε, 2π − ε]`; [`ChartPoint::periodic`] wraps `ψ` into `[0, 2π)`
/// instead, which is what trajectories crossing the `ψ` branch cut need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    theta: f64,
    psi: f64,
}

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && (CHART_EPS..=PI - CHART_EPS).contains(&theta) {
        Ok(())
    } else {
        Err(Error::ChartOutOfRange {
            name: "theta",
            value: theta,
        })
    }
}

fn check_periodic(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (CHART_EPS..=2.0 * PI - CHART_EPS).contains(&value) {
        Ok(())
    } else {
        Err(Error::ChartOutOfRange { name, value })
    }
}

impl ChartPoint {
    pub fn new(theta: f64, psi: f64) -> Result<Self> {
        check_theta(theta)?;
        check_periodic("psi", psi)?;
        Ok(Self { theta, psi })
    }

    pub fn periodic(theta: f64, psi: f64) -> Result<Self> {
        check_theta(theta)?;
        if !psi.is_finite() {
            return Err(Error::ChartOutOfRange { name: "psi", value: psi });
        }
        Ok(Self {
            theta,
            psi: wrap_two_pi(psi),
        })
    }

    /// Chart point of a (near-)unit Poisson vector, with `ψ` wrapped into `[0, 2π)`.
    pub fn from_gamma(gamma: &Vec3) -> Result<Self> {
        let n = gamma.norm();
        let theta = (gamma.z / n).clamp(-1.0, 1.0).acos();
        let psi = gamma.x.atan2(gamma.y);
        Self::periodic(theta, psi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn gamma(&self) -> Vec3 {
        gamma_at(self.theta, self.psi)
    }
}

/// Full coordinates `(φ, θ, ψ, x, y)` of a configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigCoords {
    pub phi: f64,
    pub chart: ChartPoint,
    pub x: f64,
    pub y: f64,
}

impl ConfigCoords {
    pub fn new(phi: f64, chart: ChartPoint, x: f64, y: f64) -> Result<Self> {
        check_periodic("phi", phi)?;
        Ok(Self { phi, chart, x, y })
    }

    /// Orbit representative used when converting between the reduced
    /// formulations: `φ = π`, `x = y = 0`. Every reduced quantity is
    /// independent of this choice.
    pub fn representative(chart: ChartPoint) -> Self {
        Self {
            phi: PI,
            chart,
            x: 0.0,
            y: 0.0,
        }
    }
}

/// Tangent vector in the coordinate basis `(∂φ, ∂θ, ∂ψ, ∂x, ∂y)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TangentCoords {
    pub dphi: f64,
    pub dtheta: f64,
    pub dpsi: f64,
    pub dx: f64,
    pub dy: f64,
}

impl TangentCoords {
    pub const fn new(dphi: f64, dtheta: f64, dpsi: f64, dx: f64, dy: f64) -> Self {
        Self {
            dphi,
            dtheta,
            dpsi,
            dx,
            dy,
        }
    }

    pub fn to_vector(self) -> SVector<f64, 5> {
        SVector::<f64, 5>::new(self.dphi, self.dtheta, self.dpsi, self.dx, self.dy)
    }

    pub fn from_vector(v: &SVector<f64, 5>) -> Self {
        Self::new(v[0], v[1], v[2], v[3], v[4])
    }

    /// Components along the angle directions `(φ, θ, ψ)`.
    pub fn angular(&self) -> Vec3 {
        Vec3::new(self.dphi, self.dtheta, self.dpsi)
    }

    pub fn max_abs(&self) -> f64 {
        self.to_vector().amax()
    }
}

impl Add for TangentCoords {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_vector(&(self.to_vector() + o.to_vector()))
    }
}

impl Sub for TangentCoords {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_vector(&(self.to_vector() - o.to_vector()))
    }
}

impl Neg for TangentCoords {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_vector(&-self.to_vector())
    }
}

impl Mul<TangentCoords> for f64 {
    type Output = TangentCoords;
    fn mul(self, v: TangentCoords) -> TangentCoords {
        TangentCoords::from_vector(&(v.to_vector() * self))
    }
}

/// Wraps an angle into `[0, 2π)`.
pub(crate) fn wrap_two_pi(x: f64) -> f64 {
    num_traits::Euclid::rem_euclid(&x, &(2.0 * PI))
}

pub(crate) fn gamma_at(theta: f64, psi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    Vec3::new(st * sp, st * cp, ct)
}

pub fn gamma_from_chart(chart: &ChartPoint) -> Vec3 {
    chart.gamma()
}

/// Rotation `g` taking body coordinates to space coordinates.
pub fn rotation_matrix(phi: f64, theta: f64, psi: f64) -> Matrix3<f64> {
    let (sf, cf) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    Matrix3::new(
        cp * cf - ct * sf * sp,
        -sp * cf - ct * sf * cp,
        st * sf,
        cp * sf + ct * cf * sp,
        -sp * sf + ct * cf * cp,
        -st * cf,
        st * sp,
        st * cp,
        ct,
    )
}

fn check_unit(gamma: &Vec3) -> Result<()> {
    let norm = gamma.norm();
    if (norm - 1.0).abs() <= UNIT_TOL {
        Ok(())
    } else {
        Err(Error::NonUnitGamma { norm })
    }
}

/// Contact vector without the unit-norm check. The map is homogeneous of
/// degree zero in `gamma`, so slightly non-unit inputs along a trajectory are
/// handled consistently.
pub fn contact_vector(ax: &SemiAxes, gamma: &Vec3) -> Vec3 {
    let d = ax.squares();
    let dg = d.component_mul(gamma);
    let n = dg.dot(gamma).sqrt();
    -dg / n
}

pub fn r_from_gamma(ax: &SemiAxes, gamma: &Vec3) -> Result<Vec3> {
    check_unit(gamma)?;
    Ok(contact_vector(ax, gamma))
}

/// Jacobian `∂r/∂γ` of [`contact_vector`].
pub fn contact_jacobian(ax: &SemiAxes, gamma: &Vec3) -> Matrix3<f64> {
    let d = ax.squares();
    let dg = d.component_mul(gamma);
    let n2 = dg.dot(gamma);
    let n = n2.sqrt();
    dg * dg.transpose() / (n2 * n) - Matrix3::from_diagonal(&d) / n
}

pub fn gamma_from_r(ax: &SemiAxes, r: &Vec3) -> Result<Vec3> {
    let d = ax.squares();
    let residual = r.x * r.x / d.x + r.y * r.y / d.y + r.z * r.z / d.z - 1.0;
    if residual.is_nan() || residual.abs() > SURFACE_TOL {
        return Err(Error::OffSurface { residual });
    }
    // (b²c², a²c², a²b²) ∝ (1/a², 1/b², 1/c²)
    let w = Vec3::new(d.y * d.z, d.x * d.z, d.x * d.y);
    let v = -w.component_mul(r);
    Ok(v / v.norm())
}

/// Height of the centre above the plane and its chart derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Height {
    pub z: f64,
    pub dz_dtheta: f64,
    pub dz_dpsi: f64,
}

pub(crate) fn height_at(ax: &SemiAxes, theta: f64, psi: f64) -> Height {
    let d = ax.squares();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    let z = (d.x * st * st * sp * sp + d.y * st * st * cp * cp + d.z * ct * ct).sqrt();
    Height {
        z,
        dz_dtheta: st * ct * (d.x * sp * sp + d.y * cp * cp - d.z) / z,
        dz_dpsi: st * st * sp * cp * (d.x - d.y) / z,
    }
}

pub fn height(ax: &SemiAxes, chart: &ChartPoint) -> Height {
    height_at(ax, chart.theta, chart.psi)
}

/// Rolling-constraint coefficients:
///
/// ```text
/// ẋ = x_phi φ̇ + z sinφ θ̇ + x_psi ψ̇
/// ẏ = y_phi φ̇ − z cosφ θ̇ + y_psi ψ̇
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintCoeffs {
    pub x_phi: f64,
    pub y_phi: f64,
    pub x_psi: f64,
    pub y_psi: f64,
}

pub fn constraint_coeffs(ax: &SemiAxes, phi: f64, theta: f64, psi: f64) -> ConstraintCoeffs {
    let d = ax.squares();
    let (a2, b2, c2) = (d.x, d.y, d.z);
    let (sf, cf) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    let k = st / height_at(ax, theta, psi).z;
    ConstraintCoeffs {
        x_phi: k * (a2 * (-sp * cp * sf - ct * cf * sp * sp) + b2 * (cp * sp * sf - cp * cp * ct * cf) + c2 * cf * ct),
        y_phi: k * (a2 * (sp * cp * cf - ct * sf * sp * sp) + b2 * (-cp * sp * cf - cp * cp * ct * sf) + c2 * sf * ct),
        x_psi: k * (a2 * (-sp * sp * cf - sp * ct * sf * cp) + b2 * (-cp * cp * cf + cp * ct * sf * sp)),
        y_psi: k * (a2 * (-sp * sp * sf + sp * ct * cf * cp) + b2 * (-cp * cp * sf - cp * ct * cf * sp)),
    }
}
