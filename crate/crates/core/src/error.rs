use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Error {
    #[error("semi-axes and mass must be finite and strictly positive (a={a}, b={b}, c={c}, m={m})")]
    InvalidSemiAxes { a: f64, b: f64, c: f64, m: f64 },
    #[error("angle {name}={value} lies outside the shrunk chart")]
    ChartOutOfRange { name: &'static str, value: f64 },
    #[error("expected a unit Poisson vector, got norm {norm}")]
    NonUnitGamma { norm: f64 },
    #[error("contact vector is off the ellipsoid surface (quadratic form residual {residual})")]
    OffSurface { residual: f64 },
    #[error("matrix is not positive definite")]
    NonPositiveDefinite,
    #[error("finite-difference stencil at theta={theta} leaves the valid chart")]
    ChartMarginViolation { theta: f64 },
    #[error("Poisson vector too close to the chart pole (theta={theta})")]
    PoleProximity { theta: f64 },
    #[error("state became non-finite at t={time}")]
    NonFinite { time: f64 },
    #[error("invalid time stepping: dt={dt}, t_end={t_end}")]
    InvalidStep { dt: f64, t_end: f64 },
    #[error("the explicit invariant density needs a = b")]
    NotAxisymmetric,
    #[error("grid needs at least 8 points per direction, got {n_theta}x{n_psi}")]
    GridTooSmall { n_theta: usize, n_psi: usize },
}
