//! Reduced dynamics in quasi-momenta.
//!
//! With quasi-velocities `v = (v^a, v^1, v^2)` along `(Z, Y₁, Y₂)`, the kinetic
//! energy is block diagonal, `½(K_ab v^a v^b + K_αβ v^α v^β)`, because `Z` and
//! the `Y_α` are metric-orthogonal. The momenta are `p_a = K_ab v^b` and
//! `p_α = K_αβ v^β`, and
//!
//! ```text
//! dq̂^i/dt = ρ^i_β ∂H/∂p_β
//! dp_I/dt = −ρ^i_I ∂H/∂q̂^i − C_{IJ}^K p_K ∂H/∂p_J
//! ```
//!
//! where `Tp(W_I) = ρ^i_I ∂_{q̂^i}` (zero for `Z`) and `C_{IJ}^K` are the
//! projected structure coefficients of the frame. Written out for `I = α` and
//! `I = a`, this is the vertical/horizontal split of the equations of motion
//! with every block of `C` kept.

use core::f64::consts::PI;

use alloc::collections::BTreeMap;
use nalgebra::{Matrix2, SVector, Vector2};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::frame::LocalFrame;
use crate::geometry::{constraint_coeffs, height_at, ChartPoint, SemiAxes, TangentCoords, Vec3};
use crate::measure::{check_theta_margin, StructureCoefficients};
use crate::metric::euler_rate_map;
use crate::numdiff::stencil;

use super::vectorial::{k_from_omega, omega_from_k, ReducedState};

/// Representative `φ` for all chart-level quantities.
const REP_PHI: f64 = PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiMomentumState {
    pub chart: ChartPoint,
    /// Momenta conjugate to `v^1, v^2`.
    pub p_alpha: [f64; 2],
    /// Momentum conjugate to `v^a`.
    pub p_a: f64,
}

impl QuasiMomentumState {
    /// `(θ, ψ, p_α1, p_α2, p_a)`.
    pub fn to_vector(&self) -> SVector<f64, 5> {
        SVector::<f64, 5>::new(self.chart.theta(), self.chart.psi(), self.p_alpha[0], self.p_alpha[1], self.p_a)
    }

    pub fn from_vector(v: &SVector<f64, 5>) -> Result<Self> {
        Ok(Self {
            chart: ChartPoint::periodic(v[0], v[1])?,
            p_alpha: [v[2], v[3]],
            p_a: v[4],
        })
    }

    /// Momenta ordered `(p_a, p_α1, p_α2)` to match the frame `(Z, Y₁, Y₂)`.
    fn frame_momenta(&self) -> Vec3 {
        Vec3::new(self.p_a, self.p_alpha[0], self.p_alpha[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiRate {
    pub dtheta: f64,
    pub dpsi: f64,
    pub dp_alpha: [f64; 2],
    pub dp_a: f64,
}

impl QuasiRate {
    pub fn to_vector(&self) -> SVector<f64, 5> {
        SVector::<f64, 5>::new(self.dtheta, self.dpsi, self.dp_alpha[0], self.dp_alpha[1], self.dp_a)
    }
}

/// The two diagonal blocks of the kinetic energy in the frame `(Z, Y₁, Y₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramBlocks {
    /// `G(Z, Z)`.
    pub vertical: f64,
    /// `G(Y_α, Y_β)`.
    pub horizontal: Matrix2<f64>,
    /// Largest `|G(Z, Y_α)|`; zero up to rounding.
    pub cross: f64,
}

impl GramBlocks {
    fn from_frame(local: &LocalFrame) -> Self {
        let f = &local.fields;
        let g = &local.metric;
        Self {
            vertical: g.inner(&f.z, &f.z),
            horizontal: Matrix2::new(
                g.inner(&f.y1, &f.y1),
                g.inner(&f.y1, &f.y2),
                g.inner(&f.y2, &f.y1),
                g.inner(&f.y2, &f.y2),
            ),
            cross: g.inner(&f.z, &f.y1).abs().max(g.inner(&f.z, &f.y2).abs()),
        }
    }

    fn horizontal_inverse(&self) -> Result<Matrix2<f64>> {
        self.horizontal.cholesky().map(|c| c.inverse()).ok_or(Error::NonPositiveDefinite)
    }

    /// Quasi-velocities `(v^a, v^1, v^2)` for momenta `(p_a, p_1, p_2)`.
    fn velocities(&self, p: &Vec3) -> Result<Vec3> {
        let vh = self.horizontal_inverse()? * Vector2::new(p[1], p[2]);
        Ok(Vec3::new(p[0] / self.vertical, vh[0], vh[1]))
    }
}

pub(crate) fn gram_blocks_at(ax: &SemiAxes, theta: f64, psi: f64) -> Result<GramBlocks> {
    Ok(GramBlocks::from_frame(&LocalFrame::at(ax, REP_PHI, theta, psi)?))
}

/// Everything the Hamiltonian field needs at one chart point, independent of
/// the momenta.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ChartData {
    coeffs: StructureCoefficients,
    blocks: GramBlocks,
    /// `ρ[i][I]`: component `i ∈ {θ, ψ}` of the pushforward of `W_I`.
    rho: [[f64; 3]; 2],
    /// `∂(1/K_ab)/∂q̂^i`.
    d_inv_vertical: [f64; 2],
    /// `∂K^{αβ}/∂q̂^i`.
    d_inv_horizontal: [Matrix2<f64>; 2],
}

fn chart_data(ax: &SemiAxes, theta: f64, psi: f64) -> Result<ChartData> {
    check_theta_margin(theta)?;
    let coeffs = crate::measure::structure_coefficients_at(ax, REP_PHI, theta, psi)?;
    let local = LocalFrame::at(ax, REP_PHI, theta, psi)?;
    let blocks = GramBlocks::from_frame(&local);
    let f = &local.fields;
    let rho = [[f.z.dtheta, f.y1.dtheta, f.y2.dtheta], [f.z.dpsi, f.y1.dpsi, f.y2.dpsi]];
    let mut d_inv_vertical = [0.0; 2];
    let mut d_inv_horizontal = [Matrix2::zeros(); 2];
    for (i, x) in [theta, psi].into_iter().enumerate() {
        let (lo, hi, span) = stencil(x);
        let (b_lo, b_hi) = if i == 0 {
            (gram_blocks_at(ax, lo, psi)?, gram_blocks_at(ax, hi, psi)?)
        } else {
            (gram_blocks_at(ax, theta, lo)?, gram_blocks_at(ax, theta, hi)?)
        };
        d_inv_vertical[i] = (1.0 / b_hi.vertical - 1.0 / b_lo.vertical) / span;
        d_inv_horizontal[i] = (b_hi.horizontal_inverse()? - b_lo.horizontal_inverse()?) / span;
    }
    Ok(ChartData {
        coeffs,
        blocks,
        rho,
        d_inv_vertical,
        d_inv_horizontal,
    })
}

fn field_from_data(data: &ChartData, s: &QuasiMomentumState) -> Result<QuasiRate> {
    let p = s.frame_momenta();
    let v = data.blocks.velocities(&p)?;
    let ph = Vector2::new(p[1], p[2]);
    // ∂H/∂q̂^i = ½ (p_a² ∂K^{ab} + p_α ∂K^{αβ} p_β)
    let dh = [0, 1].map(|i| 0.5 * (p[0] * p[0] * data.d_inv_vertical[i] + ph.dot(&(data.d_inv_horizontal[i] * ph))));

    let dq = [0, 1].map(|i| (0..3).map(|j| data.rho[i][j] * v[j]).sum::<f64>());

    let mut dp = [0.0; 3];
    for (big_i, out) in dp.iter_mut().enumerate() {
        let mut acc = -(data.rho[0][big_i] * dh[0] + data.rho[1][big_i] * dh[1]);
        for j in 0..3 {
            for k in 0..3 {
                acc -= data.coeffs.c[big_i][j][k] * p[k] * v[j];
            }
        }
        *out = acc;
    }
    Ok(QuasiRate {
        dtheta: dq[0],
        dpsi: dq[1],
        dp_alpha: [dp[1], dp[2]],
        dp_a: dp[0],
    })
}

/// `H = ½(p_a² / K_ab + p_α K^{αβ} p_β)`.
pub fn hamiltonian(ax: &SemiAxes, s: &QuasiMomentumState) -> Result<f64> {
    let blocks = gram_blocks_at(ax, s.chart.theta(), s.chart.psi())?;
    let p = s.frame_momenta();
    let v = blocks.velocities(&p)?;
    Ok(0.5 * p.dot(&v))
}

pub fn hamiltonian_field(ax: &SemiAxes, s: &QuasiMomentumState) -> Result<QuasiRate> {
    let data = chart_data(ax, s.chart.theta(), s.chart.psi())?;
    field_from_data(&data, s)
}

/// Memo of the momentum-independent part of the field, keyed by `(θ, ψ)`
/// rounded to a multiple of `quantum`.
#[derive(Debug, Clone)]
pub struct CoefficientCache {
    ax: SemiAxes,
    quantum: f64,
    memo: BTreeMap<(i64, i64), ChartData>,
}

impl CoefficientCache {
    pub fn new(ax: SemiAxes, quantum: f64) -> Self {
        Self {
            ax,
            quantum,
            memo: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }

    pub fn field(&mut self, s: &QuasiMomentumState) -> Result<QuasiRate> {
        let key = (
            (s.chart.theta() / self.quantum).round() as i64,
            (s.chart.psi() / self.quantum).round() as i64,
        );
        let data = match self.memo.get(&key) {
            Some(d) => *d,
            None => {
                let d = chart_data(&self.ax, s.chart.theta(), s.chart.psi())?;
                self.memo.insert(key, d);
                d
            }
        };
        field_from_data(&data, s)
    }
}

fn chart_for_conversion(gamma: &Vec3) -> Result<ChartPoint> {
    let n = gamma.norm();
    let theta = (gamma.z / n).clamp(-1.0, 1.0).acos();
    let chart = ChartPoint::from_gamma(gamma).map_err(|_| Error::PoleProximity { theta })?;
    check_theta_margin(theta).map_err(|_| Error::PoleProximity { theta })?;
    Ok(chart)
}

/// Constrained velocity at the orbit representative for Euler rates `rates`.
fn constrained_velocity(ax: &SemiAxes, chart: &ChartPoint, rates: &Vec3) -> TangentCoords {
    let (theta, psi) = (chart.theta(), chart.psi());
    let cc = constraint_coeffs(ax, REP_PHI, theta, psi);
    let z = height_at(ax, theta, psi).z;
    let (sf, cf) = REP_PHI.sin_cos();
    TangentCoords::new(
        rates[0],
        rates[1],
        rates[2],
        cc.x_phi * rates[0] + z * sf * rates[1] + cc.x_psi * rates[2],
        cc.y_phi * rates[0] - z * cf * rates[1] + cc.y_psi * rates[2],
    )
}

/// Maps a `(γ, K)` state to chart coordinates and quasi-momenta.
pub fn convert_state(ax: &SemiAxes, s: &ReducedState) -> Result<QuasiMomentumState> {
    let chart = chart_for_conversion(&s.gamma)?;
    let gamma = chart.gamma();
    let omega = omega_from_k(ax, &gamma, &s.k);
    let rates = euler_rate_map(chart.theta(), chart.psi())
        .lu()
        .solve(&omega)
        .ok_or(Error::PoleProximity { theta: chart.theta() })?;
    let qdot = constrained_velocity(ax, &chart, &rates);
    let local = LocalFrame::at(ax, REP_PHI, chart.theta(), chart.psi())?;
    let proj = local.project(&qdot);
    debug_assert!((qdot - proj.projected).max_abs() <= 1e-10 * qdot.max_abs().max(1.0));
    let v = local.to_zy_basis(&proj.coeffs);
    let blocks = GramBlocks::from_frame(&local);
    let ph = blocks.horizontal * Vector2::new(v[1], v[2]);
    Ok(QuasiMomentumState {
        chart,
        p_alpha: [ph[0], ph[1]],
        p_a: blocks.vertical * v[0],
    })
}

/// Inverse of [`convert_state`].
pub fn convert_back(ax: &SemiAxes, s: &QuasiMomentumState) -> Result<ReducedState> {
    let (theta, psi) = (s.chart.theta(), s.chart.psi());
    let local = LocalFrame::at(ax, REP_PHI, theta, psi)?;
    let blocks = GramBlocks::from_frame(&local);
    let v = blocks.velocities(&s.frame_momenta())?;
    let f = &local.fields;
    let qdot = v[0] * f.z + v[1] * f.y1 + v[2] * f.y2;
    let omega = euler_rate_map(theta, psi) * qdot.angular();
    let gamma = s.chart.gamma();
    Ok(ReducedState::new(gamma, k_from_omega(ax, &gamma, &omega)))
}
