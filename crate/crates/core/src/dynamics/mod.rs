//! Reduced equations of motion in two independent formulations.
//!
//! * [`vectorial`]: the state is the Poisson vector `γ` and the angular momentum
//!   `K` about the contact point, with `K̇ = K × Ω + m ṙ × (Ω × r)` and
//!   `γ̇ = γ × Ω`.
//! * [`quasi`]: the state is the chart point `(θ, ψ)` and the momenta conjugate
//!   to the quasi-velocities along `(Z, Y₁, Y₂)`. Its right-hand side is
//!   assembled from the structure coefficients of the frame.
//!
//! Both are integrated by the same fixed-step RK4 in [`integrate`], and
//! [`compare`] runs them side by side.

pub mod compare;
pub mod integrate;
pub mod quasi;
pub mod vectorial;

pub use compare::{compare_backends, BackendComparison};
pub use integrate::{integrate, integrate_quasi, QuasiMonitor, Scheme, Trajectory, VectorialMonitor};
pub use quasi::{convert_back, convert_state, hamiltonian, hamiltonian_field, CoefficientCache, GramBlocks, QuasiMomentumState, QuasiRate};
pub use vectorial::{energy, k_from_omega, mass_operator, omega_from_k, vector_field, ReducedRate, ReducedState};
