//! Invariant-measure test for a homogeneous ellipsoid rolling without slipping
//! on a horizontal plane.
//!
//! The configuration space is `SO(3) × ℝ²` in Euler-angle coordinates
//! `(φ, θ, ψ, x, y)`. The planar Euclidean group acts by rotating `φ` and moving
//! `(x, y)`, and the shape space is the sphere of Poisson vectors in spherical
//! coordinates `(θ, ψ)`.
//!
//! Layout:
//!
//! * [`geometry`]: Euler kinematics, contact point, height and rolling constraints.
//! * [`metric`]: the kinetic-energy metric on `Q`.
//! * [`frame`]: the invariant frame `{Z, X₁, X₂}` of the constraint distribution,
//!   its orthogonalized horizontal part `{Y₁, Y₂}`, the Gram matrix and the
//!   orthogonal projector onto the distribution.
//! * [`measure`]: Lie brackets, structure coefficients, the trace criterion (both
//!   numerically and in closed form) and grid verdicts.
//! * [`dynamics`]: the reduced equations of motion as a `(γ, K)` system and as a
//!   quasi-momentum Hamiltonian system, with a fixed-step RK4 integrator.
//! * [`density`]: Liouville checks of candidate invariant densities.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

// Float methods come from `num_traits::Float` (backed by libm). When another
// crate in the build links std, the inherent methods win and the imports go
// unused, hence the `allow(unused_imports)` on them.

extern crate alloc;

pub mod density;
pub mod dynamics;
pub mod error;
pub mod frame;
pub mod geometry;
pub mod measure;
pub mod metric;
mod numdiff;

pub use error::{Error, Result};
pub use geometry::{ChartPoint, ConfigCoords, SemiAxes, SymmetryClass, TangentCoords, Vec3};
