//! Markovian master equations `ρ̇ = -i[H(z), ρ] + Σ_k γ_k (L_k ρ L_k† - ½{L_k†L_k, ρ})`,
//! their propagators over one input step, and closed forms for three
//! single-qubit models.
//!
//! The qubit models use `H(z) = -h(z) σ/2`, `h(z) = scale · z` by default, with a
//! single jump operator at rate `γ`:
//!
//! | model              | field | jump | fixed point                  |
//! |--------------------|-------|------|------------------------------|
//! | `UnitalDephasing`  | σx    | σz   | `I/2`                        |
//! | `BadZField`        | σz    | σ⁻   | `|1⟩⟨1|`, input independent  |
//! | `GoodXField`       | σx    | σ⁻   | input dependent, full rank   |
//!
//! with `σ⁻ = |1⟩⟨0|`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::basis::GellMannBasis;
use crate::channels::{self, ChannelError, InputDomain, LinearMap, ParamChannel};
use crate::numerics::{self, c64, tol, CMatrix, NumericsError, C64};
use crate::sas::{SasError, SuperOpMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LindbladError {
    #[error("Hamiltonian at z = {z:?} is not Hermitian (defect {defect:e})")]
    NonHermitian { z: Vec<f64>, defect: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Sas(#[from] SasError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, LindbladError>;

type HamiltonianFn = dyn Fn(&[f64]) -> CMatrix + Send + Sync;

#[derive(Clone)]
pub struct LindbladModel {
    dim: usize,
    hamiltonian: Arc<HamiltonianFn>,
    jumps: Vec<(CMatrix, f64)>,
    dt: f64,
}

impl fmt::Debug for LindbladModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LindbladModel")
            .field("dim", &self.dim)
            .field("rates", &self.jumps.iter().map(|j| j.1).collect::<Vec<_>>())
            .field("dt", &self.dt)
            .finish()
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(LindbladError::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_nonnegative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(LindbladError::InvalidParameter(format!("{name} must be nonnegative and finite, got {v}")))
    }
}

impl LindbladModel {
    pub fn new<F>(dim: usize, hamiltonian: F, jumps: Vec<(CMatrix, f64)>, dt: f64) -> Result<Self>
    where
        F: Fn(&[f64]) -> CMatrix + Send + Sync + 'static,
    {
        check_positive("step duration", dt)?;
        for (l, rate) in &jumps {
            check_nonnegative("jump rate", *rate)?;
            if l.nrows() != dim || l.ncols() != dim {
                return Err(LindbladError::DimensionMismatch { expected: dim, got: l.nrows() });
            }
        }
        Ok(Self { dim, hamiltonian: Arc::new(hamiltonian), jumps, dt })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn jumps(&self) -> &[(CMatrix, f64)] {
        &self.jumps
    }

    pub fn hamiltonian(&self, z: &[f64]) -> Result<CMatrix> {
        let h = (self.hamiltonian)(z);
        if h.nrows() != self.dim || h.ncols() != self.dim {
            return Err(LindbladError::DimensionMismatch { expected: self.dim, got: h.nrows() });
        }
        let defect = (&h - h.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max);
        if defect > tol::STRUCTURAL {
            return Err(LindbladError::NonHermitian { z: z.to_vec(), defect });
        }
        Ok(h)
    }

    /// Generator in the column-stacking representation, `vec(𝓛(A)) = L vec(A)`.
    pub fn liouvillian_natural(&self, z: &[f64]) -> Result<CMatrix> {
        let d = self.dim;
        let id = CMatrix::identity(d, d);
        let h = self.hamiltonian(z)?;
        let mut gen = (numerics::kron(&id, &h) - numerics::kron(&h.transpose(), &id)) * c64(0.0, -1.0);
        for (l, rate) in &self.jumps {
            let ldl = l.adjoint() * l;
            let term = numerics::kron(&l.conjugate(), l)
                - (numerics::kron(&id, &ldl) + numerics::kron(&ldl.transpose(), &id)) * c64(0.5, 0.0);
            gen += term * c64(*rate, 0.0);
        }
        Ok(gen)
    }

    /// `L̂_ij = tr(B_i† 𝓛(B_j))`; the first row vanishes.
    pub fn liouvillian_superop(&self, z: &[f64], basis: &GellMannBasis) -> Result<CMatrix> {
        if basis.dim() != self.dim {
            return Err(LindbladError::DimensionMismatch { expected: self.dim, got: basis.dim() });
        }
        let n = basis.len();
        let v = CMatrix::from_fn(n, n, |r, c| basis.element(c).as_slice()[r]);
        Ok(v.adjoint() * self.liouvillian_natural(z)? * v)
    }

    /// `exp(L̂ Δτ)` at input `z` with the model's step duration.
    pub fn propagator(&self, z: &[f64], basis: &GellMannBasis) -> Result<Propagator> {
        self.propagator_for(z, self.dt, basis)
    }

    pub fn propagator_for(&self, z: &[f64], dt: f64, basis: &GellMannBasis) -> Result<Propagator> {
        check_positive("step duration", dt)?;
        let gen = self.liouvillian_superop(z, basis)?;
        let residue = numerics::max_imag(&gen);
        if residue > tol::STRUCTURAL {
            return Err(SasError::ImaginaryResidue(residue).into());
        }
        let e = numerics::matrix_exponential(&(numerics::real_part(&gen) * dt))?;
        Ok(Propagator { superop: SuperOpMatrix::from_real(self.dim, e)?, provenance: Provenance::NumericExpm })
    }

    /// Channel in the natural representation, `z ↦ exp(L(z) Δτ)`.
    pub fn natural_map(&self, z: &[f64]) -> Result<LinearMap> {
        let gen = self.liouvillian_natural(z)? * c64(self.dt, 0.0);
        Ok(LinearMap::from_natural(self.dim, numerics::matrix_exponential(&gen)?)?)
    }

    pub fn to_param_channel(&self, name: impl Into<String>, domain: InputDomain) -> ParamChannel {
        let model = self.clone();
        ParamChannel::new(name, self.dim, domain, move |z| {
            model.natural_map(z).map_err(|e| match e {
                LindbladError::Channel(c) => c,
                other => ChannelError::InvalidParameter(other.to_string()),
            })
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    NumericExpm,
    AnalyticFamily,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    pub superop: SuperOpMatrix,
    pub provenance: Provenance,
}

impl Propagator {
    pub fn matrix(&self) -> &DMatrix<f64> {
        self.superop.matrix()
    }
}

/// Scalar map from the input to the field strength `h(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Encoding {
    /// `h(z) = scale · z₀`.
    Linear { scale: f64 },
    /// `h(z) = scale · z₀ + offset`.
    Affine { scale: f64, offset: f64 },
}

impl Encoding {
    pub fn from_name(name: &str, scale: f64, offset: f64) -> Option<Self> {
        match name {
            "linear" => Some(Encoding::Linear { scale }),
            "affine" => Some(Encoding::Affine { scale, offset }),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Encoding::Linear { .. } => "linear",
            Encoding::Affine { .. } => "affine",
        }
    }

    pub fn field(&self, z: &[f64]) -> f64 {
        match *self {
            Encoding::Linear { scale } => scale * z[0],
            Encoding::Affine { scale, offset } => scale * z[0] + offset,
        }
    }
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)])
}

/// `σ⁻ = |1⟩⟨0|`, decaying towards `⟨σz⟩ = -1`.
pub fn sigma_minus() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)])
}

/// `(cosh(τ√s2), sinh(τ√s2)/√s2)` for either sign of `s2`, with a Taylor
/// expansion inside the guard band around the removable singularity `s2 = 0`.
pub fn cosh_sinhc(s2: f64, tau: f64) -> (f64, f64) {
    const GUARD: f64 = 1e-8;
    if s2.abs() < GUARD {
        let x = s2 * tau * tau;
        (1.0 + x / 2.0 + x * x / 24.0, tau * (1.0 + x / 6.0 + x * x / 120.0))
    } else if s2 > 0.0 {
        let s = s2.sqrt();
        ((tau * s).cosh(), (tau * s).sinh() / s)
    } else {
        let w = (-s2).sqrt();
        ((tau * w).cos(), (tau * w).sin() / w)
    }
}

fn complex_sqrt(x: f64) -> C64 {
    if x >= 0.0 {
        c64(x.sqrt(), 0.0)
    } else {
        c64(0.0, (-x).sqrt())
    }
}

fn check_params(gamma: f64, h: f64, dt: f64, need_dissipation: bool) -> Result<()> {
    if need_dissipation {
        check_positive("γ", gamma)?;
    } else {
        check_nonnegative("γ", gamma)?;
    }
    if !h.is_finite() {
        return Err(LindbladError::InvalidParameter(format!("h_t must be finite, got {h}")));
    }
    check_positive("Δτ", dt)
}

fn superop4(entries: [[f64; 4]; 4]) -> Propagator {
    let m = DMatrix::from_fn(4, 4, |i, j| entries[i][j]);
    Propagator { superop: SuperOpMatrix::from_real(2, m).expect("4x4"), provenance: Provenance::AnalyticFamily }
}

fn sort_eigs(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(numerics::eigenvalue_order);
    v
}

/// Singular values `√(K ± √(K²-1))` of `[[C+aS, bS], [-bS, C-aS]]` with `C² - (a²-b²)S² = 1`.
fn rotation_block_singular_values(c: f64, s: f64, a: f64, b: f64) -> (f64, f64) {
    let k = c * c + (a * a + b * b) * s * s;
    let r = (k * k - 1.0).max(0.0).sqrt();
    ((k + r).sqrt(), (1.0 / (k + r)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitExample {
    UnitalDephasing,
    BadZField,
    GoodXField,
}

impl QubitExample {
    pub const ALL: [QubitExample; 3] = [QubitExample::UnitalDephasing, QubitExample::BadZField, QubitExample::GoodXField];

    pub fn name(&self) -> &'static str {
        match self {
            QubitExample::UnitalDephasing => "lindblad_ing",
            QubitExample::BadZField => "lindblad_bad",
            QubitExample::GoodXField => "lindblad_good",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    pub fn field_operator(&self) -> CMatrix {
        match self {
            QubitExample::BadZField => pauli_z(),
            _ => pauli_x(),
        }
    }

    pub fn jump_operator(&self) -> CMatrix {
        match self {
            QubitExample::UnitalDephasing => pauli_z(),
            _ => sigma_minus(),
        }
    }

    /// `H = -h σ/2`.
    pub fn hamiltonian(&self, h: f64) -> CMatrix {
        self.field_operator() * c64(-h / 2.0, 0.0)
    }

    /// `c` in the removable-singularity locus `γ² = c h²` (none for the z-field model).
    pub fn singular_ratio(&self) -> Option<f64> {
        match self {
            QubitExample::UnitalDephasing => Some(1.0),
            QubitExample::GoodXField => Some(16.0),
            QubitExample::BadZField => None,
        }
    }

    pub fn on_singular_locus(&self, gamma: f64, h: f64, band: f64) -> bool {
        self.singular_ratio().is_some_and(|c| (gamma * gamma - c * h * h).abs() < band)
    }

    pub fn model(&self, gamma: f64, dt: f64, encoding: Encoding) -> Result<LindbladModel> {
        check_params(gamma, 0.0, dt, false)?;
        let ex = *self;
        LindbladModel::new(2, move |z| ex.hamiltonian(encoding.field(z)), vec![(self.jump_operator(), gamma)], dt)
    }

    /// Closed-form `T̂` at field `h`.
    pub fn closed_form(&self, gamma: f64, h: f64, dt: f64) -> Result<Propagator> {
        match self {
            QubitExample::UnitalDephasing => example_unital_dephasing(gamma, h, dt),
            QubitExample::BadZField => example_bad_zfield(gamma, h, dt),
            QubitExample::GoodXField => example_good_xfield(gamma, h, dt),
        }
    }

    /// Closed-form eigenvalues of `T̂`, in eigenvalue order.
    pub fn eigenvalues(&self, gamma: f64, h: f64, dt: f64) -> Result<Vec<C64>> {
        check_params(gamma, h, dt, *self != QubitExample::UnitalDephasing)?;
        let one = c64(1.0, 0.0);
        let v = match self {
            QubitExample::UnitalDephasing => {
                let s = complex_sqrt(gamma * gamma - h * h);
                vec![one, c64((-2.0 * gamma * dt).exp(), 0.0), (-(s + gamma) * dt).exp(), ((s - gamma) * dt).exp()]
            }
            QubitExample::BadZField => {
                let r = (-gamma * dt / 2.0).exp();
                vec![one, c64((-gamma * dt).exp(), 0.0), c64(0.0, h * dt).exp() * r, c64(0.0, -h * dt).exp() * r]
            }
            QubitExample::GoodXField => {
                let s = complex_sqrt(gamma * gamma - 16.0 * h * h);
                vec![
                    one,
                    c64((-gamma * dt / 2.0).exp(), 0.0),
                    (-(s + 3.0 * gamma) * dt / 4.0).exp(),
                    ((s - 3.0 * gamma) * dt / 4.0).exp(),
                ]
            }
        };
        Ok(sort_eigs(v))
    }

    /// Closed-form singular values `(σ₁, σ₂, σ₃)` of the traceless block, with `σ₁`
    /// the decoupled direction and `σ₂ ≥ σ₃` from the rotating block.
    pub fn singular_values(&self, gamma: f64, h: f64, dt: f64) -> Result<[f64; 3]> {
        check_params(gamma, h, dt, *self != QubitExample::UnitalDephasing)?;
        Ok(match self {
            QubitExample::UnitalDephasing => {
                let (c, s) = cosh_sinhc(gamma * gamma - h * h, dt);
                let e = (-gamma * dt).exp();
                let (a, b) = rotation_block_singular_values(c, s, gamma, h);
                [(-2.0 * gamma * dt).exp(), e * a, e * b]
            }
            QubitExample::BadZField => {
                let r = (-gamma * dt / 2.0).exp();
                [(-gamma * dt).exp(), r, r]
            }
            QubitExample::GoodXField => {
                let (c, s) = cosh_sinhc(gamma * gamma - 16.0 * h * h, dt / 4.0);
                let e = (-3.0 * gamma * dt / 4.0).exp();
                let (a, b) = rotation_block_singular_values(c, s, gamma, 4.0 * h);
                [(-gamma * dt / 2.0).exp(), e * a, e * b]
            }
        })
    }

    /// Closed-form fixed point of the channel at field `h`.
    pub fn fixed_point(&self, gamma: f64, h: f64) -> Result<CMatrix> {
        check_params(gamma, h, 1.0, *self != QubitExample::UnitalDephasing)?;
        Ok(match self {
            QubitExample::UnitalDephasing => CMatrix::identity(2, 2) * c64(0.5, 0.0),
            QubitExample::BadZField => {
                CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)])
            }
            QubitExample::GoodXField => good_fixed_point(gamma, h),
        })
    }
}

/// Field along σx, dephasing jump σz. Unital; mixing iff `h ≠ 0`.
pub fn example_unital_dephasing(gamma: f64, h: f64, dt: f64) -> Result<Propagator> {
    check_params(gamma, h, dt, false)?;
    let (c, s) = cosh_sinhc(gamma * gamma - h * h, dt);
    let e = (-gamma * dt).exp();
    Ok(superop4([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, (-2.0 * gamma * dt).exp(), 0.0, 0.0],
        [0.0, 0.0, e * (c - gamma * s), h * e * s],
        [0.0, 0.0, -h * e * s, e * (c + gamma * s)],
    ]))
}

/// Field along σz, amplitude damping. Fixed point `|1⟩⟨1|` for every input.
pub fn example_bad_zfield(gamma: f64, h: f64, dt: f64) -> Result<Propagator> {
    check_params(gamma, h, dt, true)?;
    let r = (-gamma * dt / 2.0).exp();
    let (sn, cs) = (h * dt).sin_cos();
    let e = (-gamma * dt).exp();
    Ok(superop4([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, r * cs, r * sn, 0.0],
        [0.0, -r * sn, r * cs, 0.0],
        [e - 1.0, 0.0, 0.0, e],
    ]))
}

/// Field along σx, amplitude damping. Input-dependent full-rank fixed point.
pub fn example_good_xfield(gamma: f64, h: f64, dt: f64) -> Result<Propagator> {
    check_params(gamma, h, dt, true)?;
    let (c, s) = cosh_sinhc(gamma * gamma - 16.0 * h * h, dt / 4.0);
    let e = (-3.0 * gamma * dt / 4.0).exp();
    let den = gamma * gamma + 2.0 * h * h;
    let t31 = 2.0 * gamma * h / den * (-1.0 + e * (c + 3.0 * gamma * s));
    let t41 = gamma / den * (-gamma + e * (gamma * c - (gamma * gamma + 8.0 * h * h) * s));
    Ok(superop4([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, (-gamma * dt / 2.0).exp(), 0.0, 0.0],
        [t31, 0.0, e * (c + gamma * s), 4.0 * h * e * s],
        [t41, 0.0, -4.0 * h * e * s, e * (c - gamma * s)],
    ]))
}

/// `exp(-g²/2)`: off-diagonal survival factor of the dephasing measurement.
pub fn dephasing_factor(g: f64) -> f64 {
    (-g * g / 2.0).exp()
}

/// Dephasing measurement of strength `g` after one step of [`example_good_xfield`]:
/// `T̂′ = diag(1, κ, κ, 1) T̂`.
pub fn measurement_composed(gamma: f64, h: f64, dt: f64, g: f64) -> Result<Propagator> {
    check_nonnegative("g", g)?;
    let mut p = example_good_xfield(gamma, h, dt)?;
    let kappa = dephasing_factor(g);
    let mut m = p.superop.matrix().clone();
    for i in 1..3 {
        m.row_mut(i).scale_mut(kappa);
    }
    p.superop = SuperOpMatrix::from_real(2, m)?;
    Ok(p)
}

/// `(h², iγh; -iγh, γ² + h²) / (γ² + 2h²)`.
pub fn good_fixed_point(gamma: f64, h: f64) -> CMatrix {
    measured_fixed_point_from(gamma, h, 0.0, 0.0)
}

fn measured_fixed_point_from(gamma: f64, h: f64, f1: f64, f2: f64) -> CMatrix {
    let den = gamma * gamma + 2.0 * h * h;
    let off = c64(0.0, gamma * h * (1.0 - f2) / den);
    CMatrix::from_row_slice(2, 2, &[
        c64((h * h - f1) / den, 0.0),
        off,
        off.conj(),
        c64((gamma * gamma + h * h + f1) / den, 0.0),
    ])
}

/// Correction terms `(f₁, f₂)` of the measured fixed point.
pub fn measurement_corrections(gamma: f64, h: f64, dt: f64, g: f64) -> Result<(f64, f64)> {
    check_params(gamma, h, dt, true)?;
    check_nonnegative("g", g)?;
    let (c, s) = cosh_sinhc(gamma * gamma - 16.0 * h * h, dt / 4.0);
    let a = g * g / 4.0;
    let b = 3.0 * gamma * dt / 4.0;
    let d = (a + b).cosh() - a.cosh() * c + gamma * a.sinh() * s;
    let f1 = 4.0 * gamma * h * h * a.sinh() * s / d;
    let f2 = a.sinh() * (b.exp() - c + gamma * s) / d;
    Ok((f1, f2))
}

/// Closed-form fixed point of [`measurement_composed`].
pub fn measurement_fixed_point(gamma: f64, h: f64, dt: f64, g: f64) -> Result<CMatrix> {
    let (f1, f2) = measurement_corrections(gamma, h, dt, g)?;
    Ok(measured_fixed_point_from(gamma, h, f1, f2))
}

/// Parametrized channel for a closed-form qubit example.
pub fn example_channel(example: QubitExample, gamma: f64, dt: f64, encoding: Encoding, domain: InputDomain) -> Result<ParamChannel> {
    closed_form_channel(example.name(), gamma, dt, encoding, domain, move |g, h, t| example.closed_form(g, h, t))
}

/// Parametrized channel for [`measurement_composed`].
pub fn measurement_channel(gamma: f64, dt: f64, g: f64, encoding: Encoding, domain: InputDomain) -> Result<ParamChannel> {
    check_nonnegative("g", g)?;
    closed_form_channel("measurement_composed", gamma, dt, encoding, domain, move |ga, h, t| measurement_composed(ga, h, t, g))
}

fn closed_form_channel<F>(name: &str, gamma: f64, dt: f64, encoding: Encoding, domain: InputDomain, f: F) -> Result<ParamChannel>
where
    F: Fn(f64, f64, f64) -> Result<Propagator> + Send + Sync + 'static,
{
    check_nonnegative("γ", gamma)?;
    check_positive("Δτ", dt)?;
    if domain.input_dim() != 1 {
        return Err(LindbladError::InvalidParameter(format!(
            "scalar field encodings need a one-dimensional input, got {}",
            domain.input_dim()
        )));
    }
    let basis = GellMannBasis::qubit();
    Ok(ParamChannel::new(name, 2, domain, move |z| {
        let p = f(gamma, encoding.field(z), dt).map_err(|e| ChannelError::InvalidParameter(e.to_string()))?;
        p.superop.to_map(&basis).map_err(|e| ChannelError::InvalidParameter(e.to_string()))
    }))
}

/// Dephasing measurement channel `ρ ↦ Σ_k M_k ρ M_k†` as a constant parametrized channel.
pub fn dephasing_channel(g: f64, domain: InputDomain) -> Result<ParamChannel> {
    Ok(ParamChannel::constant(channels::dephasing(g)?.to_map(), domain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn numeric(ex: QubitExample, gamma: f64, h: f64, dt: f64) -> DMatrix<f64> {
        let m = ex.model(gamma, dt, Encoding::Linear { scale: 1.0 }).unwrap();
        m.propagator(&[h], &GellMannBasis::qubit()).unwrap().superop.matrix().clone()
    }

    #[test]
    fn zero_generator() {
        let m = LindbladModel::new(2, |_| CMatrix::zeros(2, 2), vec![(sigma_minus(), 0.0)], 1.0).unwrap();
        let l = m.liouvillian_superop(&[0.0], &GellMannBasis::qubit()).unwrap();
        assert!(l.iter().all(|x| x.norm() < 1e-15));
    }

    #[test]
    fn pure_dephasing_generator() {
        let gamma = 0.7;
        let m = LindbladModel::new(2, |_| CMatrix::zeros(2, 2), vec![(pauli_z(), gamma)], 1.0).unwrap();
        let l = numerics::real_part(&m.liouvillian_superop(&[0.0], &GellMannBasis::qubit()).unwrap());
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, -2.0 * gamma, -2.0 * gamma, 0.0]));
        assert!(numerics::max_abs_diff(&l, &expected) < 1e-14);
    }

    #[test]
    fn generator_first_row_vanishes_and_rejects_non_hermitian() {
        let mut rng = SplitMix64::new(9);
        let h = rng.ginibre(3, 3);
        let h = &h + h.adjoint();
        let l = rng.ginibre(3, 3);
        let m = LindbladModel::new(3, move |_| h.clone(), vec![(l, 0.4)], 1.0).unwrap();
        let gen = m.liouvillian_superop(&[0.0], &GellMannBasis::new(3).unwrap()).unwrap();
        assert!(gen.row(0).iter().all(|x| x.norm() < 1e-13));

        let bad = LindbladModel::new(2, |_| sigma_minus(), vec![], 1.0).unwrap();
        assert!(matches!(bad.liouvillian_superop(&[0.0], &GellMannBasis::qubit()), Err(LindbladError::NonHermitian { .. })));
        assert!(LindbladModel::new(2, |_| pauli_x(), vec![(pauli_z(), -1.0)], 1.0).is_err());
    }

    #[test]
    fn bad_generator_eigenvalues() {
        let (gamma, h) = (0.8, 1.3);
        let m = QubitExample::BadZField.model(gamma, 1.0, Encoding::Linear { scale: 1.0 }).unwrap();
        let gen = m.liouvillian_superop(&[h], &GellMannBasis::qubit()).unwrap();
        let ev = numerics::eig(&gen, false).unwrap().eigenvalues;
        let expected = sort_eigs(vec![c64(0.0, 0.0), c64(-gamma, 0.0), c64(-gamma / 2.0, h), c64(-gamma / 2.0, -h)]);
        for (a, b) in ev.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn tiny_step_is_identity_and_semigroup_holds() {
        let basis = GellMannBasis::qubit();
        let m = QubitExample::GoodXField.model(1.0, 1.0, Encoding::Linear { scale: 1.0 }).unwrap();
        let p0 = m.propagator_for(&[0.5], 1e-12, &basis).unwrap();
        assert!(numerics::max_abs_diff(p0.matrix(), &DMatrix::identity(4, 4)) < 1e-10);
        let p1 = m.propagator_for(&[0.5], 0.7, &basis).unwrap();
        let p2 = m.propagator_for(&[0.5], 1.4, &basis).unwrap();
        assert!(numerics::max_abs_diff(p2.matrix(), &(p1.matrix() * p1.matrix())) < 1e-10);
        assert!(m.propagator_for(&[0.5], 0.0, &basis).is_err());
    }

    #[test]
    fn closed_forms_match_expm_at_reference_points() {
        for ex in QubitExample::ALL {
            for &(g, h) in &[(1.0, 1.0), (1.0, 2.0), (1.0, 0.25), (0.3, 0.7)] {
                let a = ex.closed_form(g, h, 1.0).unwrap();
                assert!(numerics::max_abs_diff(a.matrix(), &numeric(ex, g, h, 1.0)) < 1e-8, "{ex:?} γ={g} h={h}");
            }
        }
    }

    #[test]
    fn removable_singularities_are_continuous() {
        for (ex, c) in [(QubitExample::UnitalDephasing, 1.0), (QubitExample::GoodXField, 4.0)] {
            let h = 0.3;
            let g = c * h;
            let on = ex.closed_form(g, h, 1.0).unwrap();
            let near = ex.closed_form(g + 1e-7, h, 1.0).unwrap();
            assert!(numerics::max_abs_diff(on.matrix(), &numeric(ex, g, h, 1.0)) < 1e-8);
            assert!(numerics::max_abs_diff(on.matrix(), near.matrix()) < 1e-6);
        }
    }

    #[test]
    fn cosh_sinhc_branches() {
        let (c, s) = cosh_sinhc(4.0, 0.5);
        assert!((c - 1f64.cosh()).abs() < 1e-15 && (s - 1f64.sinh() / 2.0).abs() < 1e-15);
        let (c, s) = cosh_sinhc(-4.0, 0.5);
        assert!((c - 1f64.cos()).abs() < 1e-15 && (s - 1f64.sin() / 2.0).abs() < 1e-15);
        let (c, s) = cosh_sinhc(1e-9, 2.0);
        assert!((c - (2.0 * 1e-9f64.sqrt()).cosh()).abs() < 1e-15);
        assert!((s - (2.0 * 1e-9f64.sqrt()).sinh() / 1e-9f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn closed_form_spectra_match_numerics() {
        let mut rng = SplitMix64::new(21);
        for ex in QubitExample::ALL {
            for _ in 0..20 {
                let (g, h, dt) = (rng.uniform(0.05, 2.0), rng.uniform(0.05, 2.0), rng.uniform(0.2, 2.0));
                let t = ex.closed_form(g, h, dt).unwrap();
                let num = numerics::eig_real(t.matrix()).unwrap().eigenvalues;
                let cf = ex.eigenvalues(g, h, dt).unwrap();
                let mut a: Vec<f64> = num.iter().map(|x| x.norm()).collect();
                let mut b: Vec<f64> = cf.iter().map(|x| x.norm()).collect();
                a.sort_by(f64::total_cmp);
                b.sort_by(f64::total_cmp);
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-10, "{ex:?}: {a:?} vs {b:?}");
                }
                let p = t.superop.decompose().unwrap().p;
                let mut sv = numerics::singular_values(&p);
                let mut cf = ex.singular_values(g, h, dt).unwrap().to_vec();
                sv.sort_by(f64::total_cmp);
                cf.sort_by(f64::total_cmp);
                for (x, y) in sv.iter().zip(&cf) {
                    assert!((x - y).abs() < 1e-10, "{ex:?}: {sv:?} vs {cf:?}");
                }
            }
        }
    }

    #[test]
    fn good_fixed_point_reference() {
        let rho = good_fixed_point(1.0, 1.0);
        let expected = CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(2.0, 0.0)]) / c64(3.0, 0.0);
        assert!(numerics::max_abs_diff(&rho, &expected) < 1e-15);
    }

    #[test]
    fn measurement_reduces_to_good_at_zero_strength() {
        let a = measurement_composed(1.0, 0.6, 1.0, 0.0).unwrap();
        let b = example_good_xfield(1.0, 0.6, 1.0).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let (f1, f2) = measurement_corrections(1.0, 0.6, 1.0, 0.0).unwrap();
        assert_eq!((f1, f2), (0.0, 0.0));
    }

    #[test]
    fn measurement_matches_kraus_composition() {
        let basis = GellMannBasis::qubit();
        let deph = channels::dephasing(1.3).unwrap().to_map();
        let good = example_good_xfield(0.9, 0.4, 1.2).unwrap().superop.to_map(&basis).unwrap();
        let composed = SuperOpMatrix::from_map(&channels::compose(&deph, &good).unwrap(), &basis).unwrap();
        let closed = measurement_composed(0.9, 0.4, 1.2, 1.3).unwrap();
        assert!(numerics::max_abs_diff(composed.matrix(), closed.matrix()) < 1e-12);
    }

    #[test]
    fn parameter_validation() {
        assert!(example_good_xfield(0.0, 1.0, 1.0).is_err());
        assert!(example_bad_zfield(-1.0, 1.0, 1.0).is_err());
        assert!(example_unital_dephasing(0.0, 1.0, 1.0).is_ok());
        assert!(example_unital_dephasing(1.0, f64::NAN, 1.0).is_err());
        assert!(measurement_composed(1.0, 1.0, 1.0, -0.1).is_err());
    }
}
