//! Liouville checks of candidate invariant densities for the `(γ, Ω)` system.
//!
//! A density `ρ(γ)` against `dγ ∧ dΩ` is invariant when
//! `Σᵢ ∂ᵢ(ρ J fᵢ) = 0` in any chart `(θ, ψ, Ω₁, Ω₂, Ω₃)`, where `f` is the reduced
//! field written in that chart and `J` is the chart factor of `dγ` (`sin θ` for
//! the area form of the sphere, `1` for the bare coordinate form). Divergences
//! are taken by central differences with `h = ε^{1/3}·max(1, |x|)` in each of the
//! five coordinates.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{Matrix3, SMatrix, SVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::dynamics::{integrate, k_from_omega, mass_operator, omega_from_k, ReducedState, Scheme};
use crate::error::{Error, Result};
use crate::geometry::{contact_jacobian, contact_vector, gamma_at, EqualPair, SemiAxes, SymmetryClass, Vec3};
use crate::measure::check_theta_margin;
use crate::metric::inertia;
use crate::numdiff::stencil;

type Vec5 = SVector<f64, 5>;

/// Where a density came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DensityTag {
    PaperAxisymmetric,
    Constant,
    User,
}

impl DensityTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            DensityTag::PaperAxisymmetric => "paper_axisymmetric",
            DensityTag::Constant => "constant",
            DensityTag::User => "user",
        }
    }
}

/// A positive density `γ ↦ ρ(γ)` on the `(γ, Ω)` chart.
#[derive(Debug, Clone, Copy)]
pub enum DensityCandidate {
    /// The known density for `a = b`. Evaluation rejects other shapes.
    PaperAxisymmetric,
    Constant,
    /// The `a = b` formula evaluated for arbitrary semi-axes.
    PaperForm,
    /// `exp(lᵀγ + γᵀ Q γ)`.
    ExpQuadratic {
        linear: Vec3,
        quadratic: Matrix3<f64>,
    },
    /// Logarithm of a user density.
    LogCustom(fn(&SemiAxes, &Vec3) -> f64),
}

impl DensityCandidate {
    pub fn tag(&self) -> DensityTag {
        match self {
            DensityCandidate::PaperAxisymmetric => DensityTag::PaperAxisymmetric,
            DensityCandidate::Constant => DensityTag::Constant,
            _ => DensityTag::User,
        }
    }

    /// `ln ρ(γ)`.
    pub fn log_density(&self, ax: &SemiAxes, gamma: &Vec3) -> Result<f64> {
        match self {
            DensityCandidate::PaperAxisymmetric => Ok(density_paper(ax, gamma)?.ln()),
            DensityCandidate::Constant => Ok(0.0),
            DensityCandidate::PaperForm => Ok(paper_formula(ax, gamma).ln()),
            DensityCandidate::ExpQuadratic { linear, quadratic } => Ok(linear.dot(gamma) + gamma.dot(&(quadratic * gamma))),
            DensityCandidate::LogCustom(f) => Ok(f(ax, gamma)),
        }
    }

    pub fn density(&self, ax: &SemiAxes, gamma: &Vec3) -> Result<f64> {
        Ok(self.log_density(ax, gamma)?.exp())
    }
}

fn paper_formula(ax: &SemiAxes, gamma: &Vec3) -> f64 {
    let (a, c, m) = (ax.a(), ax.c(), ax.m());
    let r = contact_vector(ax, gamma);
    let ir = inertia(ax).matrix() * r;
    let s = a * a + c * c;
    (m / 5.0 * s + m * r.norm_squared()) * (2.0 / 25.0 * m * m * a * a * s + m * r.dot(&ir)).sqrt()
}

/// Invariant density of the `a = b` body against `dγ ∧ dΩ`.
pub fn density_paper(ax: &SemiAxes, gamma: &Vec3) -> Result<f64> {
    match ax.symmetry_class() {
        SymmetryClass::Sphere | SymmetryClass::Axisymmetric(EqualPair::AB) => Ok(paper_formula(ax, gamma)),
        _ => Err(Error::NotAxisymmetric),
    }
}

/// Chart factor of the `γ` part of the measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VolumeForm {
    /// Area form of the unit sphere, `sin θ dθ ∧ dψ`.
    #[default]
    Area,
    /// `dθ ∧ dψ`.
    Coordinate,
}

/// Which body axis is the pole of the spherical chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChartOrientation {
    /// `γ = (sin θ sin ψ, sin θ cos ψ, cos θ)`.
    #[default]
    Standard,
    /// `γ = (cos θ, sin θ sin ψ, sin θ cos ψ)`.
    Cyclic,
}

impl ChartOrientation {
    fn to_gamma(self, u: Vec3) -> Vec3 {
        match self {
            ChartOrientation::Standard => u,
            ChartOrientation::Cyclic => Vec3::new(u.z, u.x, u.y),
        }
    }

    fn local_of(self, g: &Vec3) -> Vec3 {
        match self {
            ChartOrientation::Standard => *g,
            ChartOrientation::Cyclic => Vec3::new(g.y, g.z, g.x),
        }
    }

    pub fn gamma(self, theta: f64, psi: f64) -> Vec3 {
        self.to_gamma(gamma_at(theta, psi))
    }

    /// `(θ, ψ)` of a nonzero `γ`, with `ψ ∈ (−π, π]`.
    pub fn coords(self, gamma: &Vec3) -> (f64, f64) {
        let u = self.local_of(gamma);
        ((u.z / u.norm()).clamp(-1.0, 1.0).acos(), u.x.atan2(u.y))
    }

    /// The orientation whose pole is further from `γ`.
    pub fn best_for(gamma: &Vec3) -> Self {
        if gamma.z.abs() <= gamma.x.abs() {
            ChartOrientation::Standard
        } else {
            ChartOrientation::Cyclic
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ChartOptions {
    pub form: VolumeForm,
    pub orientation: ChartOrientation,
}

impl VolumeForm {
    fn factor(self, theta: f64) -> f64 {
        match self {
            VolumeForm::Area => theta.sin(),
            VolumeForm::Coordinate => 1.0,
        }
    }
}

/// One point `(θ, ψ, Ω)` of the five-dimensional chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceSample {
    pub theta: f64,
    pub psi: f64,
    pub omega: Vec3,
}

/// Shortest distance of sampled `θ` from either pole.
pub const SAMPLE_THETA_MARGIN: f64 = 0.05;

impl DivergenceSample {
    /// Maps five uniform variates in `[0, 1)` to a point: `γ` uniform in area
    /// away from the poles and `Ω` uniform in the ball of radius `omega_max`.
    pub fn from_uniform(u: [f64; 5], omega_max: f64) -> Self {
        let c0 = SAMPLE_THETA_MARGIN.cos();
        let theta = (c0 * (1.0 - 2.0 * u[0])).acos();
        let psi = 2.0 * PI * u[1];
        let radius = omega_max * u[2].cbrt();
        let cz = 1.0 - 2.0 * u[3];
        let sz = (1.0 - cz * cz).max(0.0).sqrt();
        let az = 2.0 * PI * u[4];
        let omega = Vec3::new(sz * az.cos(), sz * az.sin(), cz) * radius;
        Self { theta, psi, omega }
    }

    pub fn gamma(&self, orientation: ChartOrientation) -> Vec3 {
        orientation.gamma(self.theta, self.psi)
    }

    pub fn to_state(&self, ax: &SemiAxes, orientation: ChartOrientation) -> ReducedState {
        let g = self.gamma(orientation);
        ReducedState::new(g, k_from_omega(ax, &g, &self.omega))
    }

    fn to_vector(self) -> Vec5 {
        Vec5::new(self.theta, self.psi, self.omega.x, self.omega.y, self.omega.z)
    }
}

/// Rates of the `(γ, K)` system written in `(θ, ψ, Ω)`.
pub fn chart_field(ax: &SemiAxes, orientation: ChartOrientation, theta: f64, psi: f64, omega: &Vec3) -> Vec5 {
    let g = orientation.gamma(theta, psi);
    let mop = mass_operator(ax, &g);
    let k = mop * omega;
    let r = contact_vector(ax, &g);
    let g_dot = g.cross(omega);
    let r_dot = contact_jacobian(ax, &g) * g_dot;
    let m = ax.m();
    let k_dot = k.cross(omega) + r_dot.cross(&omega.cross(&r)) * m;
    let mop_dot = (Matrix3::identity() * (2.0 * r.dot(&r_dot)) - r_dot * r.transpose() - r * r_dot.transpose()) * m;
    let omega_dot = omega_from_k(ax, &g, &(k_dot - mop_dot * omega));
    let u = orientation.local_of(&g);
    let u_dot = orientation.local_of(&g_dot);
    let theta_dot = -u_dot.z / theta.sin();
    let psi_dot = (u.y * u_dot.x - u.x * u_dot.y) / (u.x * u.x + u.y * u.y);
    Vec5::new(theta_dot, psi_dot, omega_dot.x, omega_dot.y, omega_dot.z)
}

fn check_sample(s: &DivergenceSample) -> Result<()> {
    check_theta_margin(s.theta)?;
    if s.psi.is_finite() && s.omega.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::ChartOutOfRange { name: "psi", value: s.psi })
    }
}

/// `Σᵢ ∂ᵢ(w fᵢ)` for a weight `w(x)` and the chart field, with the sum of the
/// absolute values of the terms.
fn weighted_divergence<W>(ax: &SemiAxes, orientation: ChartOrientation, x: &Vec5, mut weight: W) -> Result<(f64, f64)>
where
    W: FnMut(&Vec5) -> Result<f64>,
{
    let mut sum = 0.0;
    let mut abs = 0.0;
    for i in 0..5 {
        let (lo, hi, span) = stencil(x[i]);
        let mut eval = |xi: f64| -> Result<f64> {
            let mut y = *x;
            y[i] = xi;
            let f = chart_field(ax, orientation, y[0], y[1], &Vec3::new(y[2], y[3], y[4]));
            Ok(weight(&y)? * f[i])
        };
        let term = (eval(hi)? - eval(lo)?) / span;
        sum += term;
        abs += term.abs();
    }
    Ok((sum, abs))
}

/// Divergence of `ρ J f` at one chart point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceValue {
    /// `Σᵢ ∂ᵢ(ρ J fᵢ)`.
    pub residual: f64,
    /// `Σᵢ |∂ᵢ(ρ J fᵢ)|`.
    pub scale: f64,
    /// `ρ J` at the point.
    pub weight: f64,
}

impl DivergenceValue {
    /// `|residual| / scale`; zero where the field vanishes.
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual.abs() / self.scale
        } else {
            0.0
        }
    }

    /// `residual / (ρ J)`, the divergence of the field with respect to the
    /// measure. It does not depend on the chart.
    pub fn normalized(&self) -> f64 {
        self.residual / self.weight
    }
}

pub fn chart_divergence_with(
    ax: &SemiAxes,
    rho: &DensityCandidate,
    sample: &DivergenceSample,
    opts: ChartOptions,
) -> Result<DivergenceValue> {
    check_sample(sample)?;
    let weight = |y: &Vec5| -> Result<f64> {
        let g = opts.orientation.gamma(y[0], y[1]);
        Ok(rho.density(ax, &g)? * opts.form.factor(y[0]))
    };
    let x = sample.to_vector();
    let center = weight(&x)?;
    let (residual, scale) = weighted_divergence(ax, opts.orientation, &x, weight)?;
    Ok(DivergenceValue {
        residual,
        scale,
        weight: center,
    })
}

/// Divergence in the standard chart with the area form.
pub fn chart_divergence(ax: &SemiAxes, rho: &DensityCandidate, sample: &DivergenceSample) -> Result<DivergenceValue> {
    chart_divergence_with(ax, rho, sample, ChartOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceRecord {
    pub sample: DivergenceSample,
    pub value: DivergenceValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub tag: DensityTag,
    pub records: Vec<DivergenceRecord>,
    pub max_abs_residual: f64,
    pub max_relative: f64,
    pub mean_relative: f64,
}

impl DivergenceReport {
    /// Summary statistics over records in the given order.
    pub fn from_records(tag: DensityTag, records: Vec<DivergenceRecord>) -> Self {
        let mut max_abs_residual = 0.0f64;
        let mut max_relative = 0.0f64;
        let mut sum = 0.0;
        for r in &records {
            max_abs_residual = max_abs_residual.max(r.value.residual.abs());
            max_relative = max_relative.max(r.value.relative());
            sum += r.value.relative();
        }
        let mean_relative = if records.is_empty() { 0.0 } else { sum / records.len() as f64 };
        Self {
            tag,
            records,
            max_abs_residual,
            max_relative,
            mean_relative,
        }
    }
}

pub fn divergence_report(
    ax: &SemiAxes,
    rho: &DensityCandidate,
    samples: &[DivergenceSample],
    opts: ChartOptions,
) -> Result<DivergenceReport> {
    let records = samples
        .iter()
        .map(|s| {
            Ok(DivergenceRecord {
                sample: *s,
                value: chart_divergence_with(ax, rho, s, opts)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DivergenceReport::from_records(rho.tag(), records))
}

/// Chart used along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChartSelection {
    /// Switch per step to the orientation whose pole is furthest away.
    #[default]
    Adaptive,
    /// Stop at the first step that comes too close to a pole.
    Fixed(ChartOrientation),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiouvilleReport {
    pub times: Vec<f64>,
    /// `|d/dt ln(ρJ) + div f|` relative to `|d/dt ln(ρJ)| + Σ|∂ᵢ fᵢ|`, at each
    /// evaluated step.
    pub defects: Vec<f64>,
    pub max_defect: f64,
    pub truncated: bool,
}

/// Evaluates the Liouville defect `d/dt ln(ρ J) + div f` along an RK4
/// trajectory from `s0`. The time derivative is a five-point difference of the
/// stored states, so steps within two of either end (or of a shortened final
/// step) are skipped.
pub fn liouville_trajectory_test(
    ax: &SemiAxes,
    rho: &DensityCandidate,
    s0: &ReducedState,
    dt: f64,
    t_end: f64,
    form: VolumeForm,
    selection: ChartSelection,
) -> Result<LiouvilleReport> {
    let traj = integrate(ax, s0, dt, t_end, Scheme::Rk4)?;
    let mut report = LiouvilleReport {
        times: Vec::new(),
        defects: Vec::new(),
        max_defect: 0.0,
        truncated: false,
    };
    let log_weight = |g: &Vec3, orientation: ChartOrientation| -> Result<f64> {
        let (theta, _) = orientation.coords(g);
        Ok(rho.log_density(ax, g)? + form.factor(theta).ln())
    };
    let n = traj.len();
    for k in 2..n.saturating_sub(2) {
        let t = &traj.times[k - 2..=k + 2];
        let h = t[2] - t[1];
        if t.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
            continue;
        }
        let s = &traj.states[k];
        let orientation = match selection {
            ChartSelection::Adaptive => ChartOrientation::best_for(&s.gamma),
            ChartSelection::Fixed(o) => o,
        };
        let (theta, psi) = orientation.coords(&s.gamma);
        let g = orientation.gamma(theta, psi);
        let omega = omega_from_k(ax, &g, &s.k);
        let x = Vec5::new(theta, psi, omega.x, omega.y, omega.z);
        if let Err(e) = check_theta_margin(theta) {
            if matches!(selection, ChartSelection::Fixed(_)) {
                report.truncated = true;
                break;
            }
            return Err(e);
        }
        let (div_f, div_scale) = weighted_divergence(ax, orientation, &x, |_| Ok(1.0))?;
        let mut l = [0.0; 5];
        for (j, lj) in l.iter_mut().enumerate() {
            *lj = log_weight(&traj.states[k - 2 + j].gamma, orientation)?;
        }
        let dl = (l[0] - 8.0 * l[1] + 8.0 * l[3] - l[4]) / (12.0 * h);
        let scale = dl.abs() + div_scale;
        // at rest both sides vanish and only roundoff is left
        let at_rest = chart_field(ax, orientation, theta, psi, &omega).iter().all(|v| *v == 0.0);
        let defect = if scale > 0.0 && !at_rest { (dl + div_f).abs() / scale } else { 0.0 };
        report.times.push(t[2]);
        report.defects.push(defect);
        report.max_defect = report.max_defect.max(defect);
    }
    Ok(report)
}

/// Number of monomials in the exponent of the fitted family:
/// `γ₁, γ₂, γ₃, γ₁², γ₂², γ₁γ₂, γ₁γ₃, γ₂γ₃`. `γ₃²` is dropped because
/// `|γ| = 1` makes it redundant.
pub const EXP_QUADRATIC_PARAMS: usize = 8;

fn monomial_rates(g: &Vec3, gd: &Vec3) -> SVector<f64, EXP_QUADRATIC_PARAMS> {
    SVector::<f64, EXP_QUADRATIC_PARAMS>::from_column_slice(&[
        gd.x,
        gd.y,
        gd.z,
        2.0 * g.x * gd.x,
        2.0 * g.y * gd.y,
        g.x * gd.y + gd.x * g.y,
        g.x * gd.z + gd.x * g.z,
        g.y * gd.z + gd.y * g.z,
    ])
}

fn candidate_from_params(p: &SVector<f64, EXP_QUADRATIC_PARAMS>) -> DensityCandidate {
    let linear = Vec3::new(p[0], p[1], p[2]);
    let quadratic = Matrix3::new(p[3], p[5], p[6], 0.0, p[4], p[7], 0.0, 0.0, 0.0);
    DensityCandidate::ExpQuadratic { linear, quadratic }
}

/// Best exponential-quadratic density in the weighted least-squares sense.
#[derive(Debug, Clone, Copy)]
pub struct ExpQuadraticFit {
    pub candidate: DensityCandidate,
    /// Root mean square of the relative residuals.
    pub rms_relative: f64,
    pub max_relative: f64,
}

/// Fits `ln ρ` in the exponential-quadratic family so that
/// `d/dt ln ρ + div_μ₀ f ≈ 0` over the samples, where `μ₀` is the constant
/// density measure for `form`. Each equation is weighted by the divergence
/// scale of the constant density at that sample.
pub fn fit_exp_quadratic(ax: &SemiAxes, samples: &[DivergenceSample], opts: ChartOptions) -> Result<ExpQuadraticFit> {
    type Sq = SMatrix<f64, EXP_QUADRATIC_PARAMS, EXP_QUADRATIC_PARAMS>;
    let mut rows = Vec::with_capacity(samples.len());
    let mut ata = Sq::zeros();
    let mut atb = SVector::<f64, EXP_QUADRATIC_PARAMS>::zeros();
    for s in samples {
        let d = chart_divergence_with(ax, &DensityCandidate::Constant, s, opts)?;
        let g = s.gamma(opts.orientation);
        let a = monomial_rates(&g, &g.cross(&s.omega));
        let scale = d.scale / d.weight;
        if scale == 0.0 {
            continue;
        }
        let a = a / scale;
        let b = -d.normalized() / scale;
        ata += a * a.transpose();
        atb += a * b;
        rows.push((a, b));
    }
    let svd = ata.svd(true, true);
    let tol = 1e-12 * svd.singular_values.max();
    let p = svd.solve(&atb, tol).map_err(|_| Error::NonPositiveDefinite)?;
    let mut sq = 0.0;
    let mut max_relative = 0.0f64;
    for (a, b) in &rows {
        let r = (a.dot(&p) - b).abs();
        sq += r * r;
        max_relative = max_relative.max(r);
    }
    let rms_relative = if rows.is_empty() { 0.0 } else { (sq / rows.len() as f64).sqrt() };
    Ok(ExpQuadraticFit {
        candidate: candidate_from_params(&p),
        rms_relative,
        max_relative,
    })
}
