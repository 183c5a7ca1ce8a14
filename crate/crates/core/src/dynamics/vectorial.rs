use nalgebra::{Matrix3, SVector};

use crate::geometry::{contact_jacobian, contact_vector, SemiAxes, Vec3};
use crate::metric::inertia;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    /// Poisson vector, unit up to integration drift.
    pub gamma: Vec3,
    /// Angular momentum about the contact point, body frame.
    pub k: Vec3,
}

impl ReducedState {
    pub fn new(gamma: Vec3, k: Vec3) -> Self {
        Self { gamma, k }
    }

    pub fn to_vector(&self) -> SVector<f64, 6> {
        SVector::<f64, 6>::new(self.gamma.x, self.gamma.y, self.gamma.z, self.k.x, self.k.y, self.k.z)
    }

    pub fn from_vector(v: &SVector<f64, 6>) -> Self {
        Self {
            gamma: Vec3::new(v[0], v[1], v[2]),
            k: Vec3::new(v[3], v[4], v[5]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedRate {
    pub gamma_dot: Vec3,
    pub k_dot: Vec3,
}

/// `II + m(|r|² Id − r rᵗ)`, the map `Ω ↦ K`.
pub fn mass_operator(ax: &SemiAxes, gamma: &Vec3) -> Matrix3<f64> {
    let r = contact_vector(ax, gamma);
    inertia(ax).matrix() + (Matrix3::identity() * r.norm_squared() - r * r.transpose()) * ax.m()
}

pub fn k_from_omega(ax: &SemiAxes, gamma: &Vec3, omega: &Vec3) -> Vec3 {
    mass_operator(ax, gamma) * omega
}

/// Inverse of [`k_from_omega`]. Returns NaNs if `gamma` is not finite.
pub fn omega_from_k(ax: &SemiAxes, gamma: &Vec3, k: &Vec3) -> Vec3 {
    match mass_operator(ax, gamma).cholesky() {
        Some(ch) => ch.solve(k),
        None => Vec3::repeat(f64::NAN),
    }
}

pub fn vector_field(ax: &SemiAxes, s: &ReducedState) -> ReducedRate {
    let omega = omega_from_k(ax, &s.gamma, &s.k);
    let r = contact_vector(ax, &s.gamma);
    let gamma_dot = s.gamma.cross(&omega);
    let r_dot = contact_jacobian(ax, &s.gamma) * gamma_dot;
    let k_dot = s.k.cross(&omega) + r_dot.cross(&omega.cross(&r)) * ax.m();
    ReducedRate { gamma_dot, k_dot }
}

/// `½⟨II Ω, Ω⟩ + (m/2)|Ω × r|²`.
pub fn energy(ax: &SemiAxes, s: &ReducedState) -> f64 {
    let omega = omega_from_k(ax, &s.gamma, &s.k);
    let r = contact_vector(ax, &s.gamma);
    let rot = omega.dot(&(inertia(ax).matrix() * omega));
    0.5 * rot + 0.5 * ax.m() * omega.cross(&r).norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gamma_at;

    fn ax() -> SemiAxes {
        SemiAxes::new(1.0, 2.0, 3.0, 1.0).unwrap()
    }

    #[test]
    fn mass_operator_at_pole() {
        let ax = ax();
        let i = inertia(&ax).diagonal();
        let mop = mass_operator(&ax, &Vec3::z());
        let expected = Matrix3::from_diagonal(&Vec3::new(i.x + 9.0, i.y + 9.0, i.z));
        assert!((mop - expected).amax() < 1e-14);
    }

    #[test]
    fn sphere_mass_operator() {
        let sph = SemiAxes::new(1.2, 1.2, 1.2, 2.0).unwrap();
        let g = gamma_at(0.7, 2.0);
        let expected = Matrix3::identity() * (2.0 * 2.0 * 1.44 / 5.0) + (Matrix3::identity() - g * g.transpose()) * (2.0 * 1.44);
        assert!((mass_operator(&sph, &g) - expected).amax() < 1e-13);
    }

    #[test]
    fn mass_operator_dominates_inertia() {
        let ax = ax();
        let min_i = inertia(&ax).diagonal().min();
        let g = gamma_at(1.3, 4.4);
        let eig = mass_operator(&ax, &g).symmetric_eigenvalues();
        assert!(eig.min() >= min_i - 1e-12);
    }

    #[test]
    fn omega_examples() {
        let ax = ax();
        let i3 = inertia(&ax).diagonal().z;
        let om = omega_from_k(&ax, &Vec3::z(), &Vec3::new(0.0, 0.0, 2.0));
        assert!((om - Vec3::new(0.0, 0.0, 2.0 / i3)).norm() < 1e-14);

        let g = gamma_at(1.0, 0.5);
        let r = contact_vector(&ax, &g);
        let om = r * 0.3;
        assert!((k_from_omega(&ax, &g, &om) - inertia(&ax).matrix() * om).norm() < 1e-13);
    }

    #[test]
    fn vertical_spin_is_fixed_point() {
        let ax = ax();
        let s = ReducedState::new(Vec3::z(), Vec3::new(0.0, 0.0, 1.5));
        let f = vector_field(&ax, &s);
        assert!(f.gamma_dot.norm() < 1e-15 && f.k_dot.norm() < 1e-15);
        let i3 = inertia(&ax).diagonal().z;
        assert!((energy(&ax, &s) - 1.5 * 1.5 / (2.0 * i3)).abs() < 1e-14);
    }

    #[test]
    fn energy_homogeneity() {
        let ax = ax();
        let g = gamma_at(0.9, 3.0);
        let k = Vec3::new(0.3, -0.2, 0.5);
        let e1 = energy(&ax, &ReducedState::new(g, k));
        let e2 = energy(&ax, &ReducedState::new(g, k * 2.0));
        assert!((e2 - 4.0 * e1).abs() < 1e-13);
        assert_eq!(energy(&ax, &ReducedState::new(g, Vec3::zeros())), 0.0);
    }

    #[test]
    fn field_is_tangent_and_conserves_energy() {
        let ax = ax();
        let s = ReducedState::new(gamma_at(1.2, 0.8), Vec3::new(0.4, 1.1, -0.7));
        let f = vector_field(&ax, &s);
        assert!(f.gamma_dot.dot(&s.gamma).abs() < 1e-15);
        let h = 1e-6;
        let fwd = ReducedState::new(s.gamma + f.gamma_dot * h, s.k + f.k_dot * h);
        let bwd = ReducedState::new(s.gamma - f.gamma_dot * h, s.k - f.k_dot * h);
        let de = (energy(&ax, &fwd) - energy(&ax, &bwd)) / (2.0 * h);
        assert!(de.abs() < 1e-9);
    }
}
