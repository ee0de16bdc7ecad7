//! State-affine representation of input-driven channels.
//!
//! In an orthonormal Hermitian basis with `B_1 = I/√d`, a trace-preserving
//! channel has the block matrix
//!
//! ```text
//!         ⎛ 1        0    ⎞
//!   T̂ =  ⎝ √d q(z)  p(z) ⎠
//! ```
//!
//! and acts on full coordinates `(1/√d, x)` as `x ↦ p(z) x + q(z)`. This module
//! extracts `(p, q)`, iterates both the affine and the density-matrix systems,
//! evaluates the filter `Σ_j p(z_t)⋯p(z_{t-j+1}) q(z_{t-j})`, computes fixed
//! points, and certifies contraction on a sampled input lattice.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::basis::{BasisError, BlochVector, DensityMatrix, GellMannBasis};
use crate::channels::{ChannelError, InputDomain, LinearMap, ParamChannel};
use crate::numerics::{self, c64, tol, CMatrix, InducedNorm, NumericsError, C64};
use crate::rng::SplitMix64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SasError {
    #[error("superoperator has imaginary residue {0:e}; basis or map does not preserve Hermiticity")]
    ImaginaryResidue(f64),
    #[error("first row deviates from (1, 0, ..., 0) by {0:e}; map is not trace preserving")]
    NotTracePreserving(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no contraction certificate or decay bound; the filter may not exist")]
    NoCertificate,
    #[error("filter needs {needed} past inputs, got {got}")]
    InsufficientHistory { needed: usize, got: usize },
    #[error("I - p(z) is singular at z = {z:?} (p has an eigenvalue {eigenvalue} near 1)")]
    SingularFixedPoint { z: Vec<f64>, eigenvalue: f64 },
    #[error("fixed point at z = {z:?} is not a state: {reason}")]
    InvalidFixedPoint { z: Vec<f64>, reason: String },
    #[error("empty input lattice")]
    EmptyLattice,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, SasError>;

/// Columns are `vec(B_j)`; unitary because the basis is orthonormal.
fn basis_vec_matrix(basis: &GellMannBasis) -> CMatrix {
    let n = basis.len();
    CMatrix::from_fn(n, n, |r, c| basis.element(c).as_slice()[r])
}

/// Real `d² x d²` matrix `T̂_ij = tr(B_i† T(B_j))` in a Hermitian orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOpMatrix {
    dim: usize,
    matrix: DMatrix<f64>,
}

impl SuperOpMatrix {
    pub fn from_real(dim: usize, matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(SasError::DimensionMismatch { expected: dim * dim, got: matrix.nrows() });
        }
        Ok(Self { dim, matrix })
    }

    /// Realifies after checking that imaginary parts are below `1e-10`.
    pub fn from_complex(dim: usize, m: &CMatrix) -> Result<Self> {
        let residue = numerics::max_imag(m);
        if residue > tol::STRUCTURAL {
            return Err(SasError::ImaginaryResidue(residue));
        }
        Self::from_real(dim, numerics::real_part(m))
    }

    /// `T̂ = V† S V` with `V` the matrix of vectorized basis elements.
    pub fn from_map(map: &LinearMap, basis: &GellMannBasis) -> Result<Self> {
        if map.dim() != basis.dim() {
            return Err(SasError::DimensionMismatch { expected: basis.dim(), got: map.dim() });
        }
        let v = basis_vec_matrix(basis);
        Self::from_complex(map.dim(), &(v.adjoint() * map.natural() * &v))
    }

    pub fn to_map(&self, basis: &GellMannBasis) -> Result<LinearMap> {
        if self.dim != basis.dim() {
            return Err(SasError::DimensionMismatch { expected: basis.dim(), got: self.dim });
        }
        let v = basis_vec_matrix(basis);
        Ok(LinearMap::from_natural(self.dim, &v * numerics::to_complex(&self.matrix) * v.adjoint())?)
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, matrix: DMatrix::identity(dim * dim, dim * dim) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Distance of the first row from `(1, 0, ..., 0)`.
    pub fn first_row_defect(&self) -> f64 {
        self.matrix
            .row(0)
            .iter()
            .enumerate()
            .map(|(j, &v)| (v - if j == 0 { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }

    /// `self · first` (apply `first`, then `self`).
    pub fn after(&self, first: &SuperOpMatrix) -> Result<SuperOpMatrix> {
        if self.dim != first.dim {
            return Err(SasError::DimensionMismatch { expected: self.dim, got: first.dim });
        }
        Ok(Self { dim: self.dim, matrix: &self.matrix * &first.matrix })
    }

    /// Splits into the traceless block `p` and offset `q`.
    pub fn decompose(&self) -> Result<AffineBlock> {
        let defect = self.first_row_defect();
        if defect > tol::STRUCTURAL {
            return Err(SasError::NotTracePreserving(defect));
        }
        let n = self.matrix.nrows() - 1;
        let p = self.matrix.view((1, 1), (n, n)).into_owned();
        let q = self.matrix.view((1, 0), (n, 1)).column(0) / (self.dim as f64).sqrt();
        Ok(AffineBlock { dim: self.dim, p, q })
    }
}

/// `sas_decompose`.
pub fn sas_decompose(t: &SuperOpMatrix) -> Result<AffineBlock> {
    t.decompose()
}

/// `superop_matrix`: channel at `z` expressed in `basis`.
pub fn superop_matrix(channel: &ParamChannel, z: &[f64], basis: &GellMannBasis) -> Result<SuperOpMatrix> {
    SuperOpMatrix::from_map(&channel.at(z)?, basis)
}

/// One affine map `x ↦ p x + q` in orthonormal Bloch coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineBlock {
    pub dim: usize,
    pub p: DMatrix<f64>,
    pub q: DVector<f64>,
}

impl AffineBlock {
    pub fn step(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.p * x + &self.q
    }

    pub fn reassemble(&self) -> SuperOpMatrix {
        let n = self.p.nrows() + 1;
        let mut m = DMatrix::zeros(n, n);
        m[(0, 0)] = 1.0;
        m.view_mut((1, 1), (n - 1, n - 1)).copy_from(&self.p);
        m.view_mut((1, 0), (n - 1, 1)).copy_from(&(&self.q * (self.dim as f64).sqrt()));
        SuperOpMatrix { dim: self.dim, matrix: m }
    }

    /// `q` in the reporting convention (for qubits, spin expectations): `√d · q`.
    pub fn q_expectation(&self) -> DVector<f64> {
        &self.q * (self.dim as f64).sqrt()
    }

    /// `(I - p)⁻¹ q`.
    pub fn affine_fixed_point(&self) -> std::result::Result<DVector<f64>, NumericsError> {
        let n = self.p.nrows();
        numerics::solve(&(DMatrix::identity(n, n) - &self.p), &self.q)
    }

    pub fn traceless_spectral_radius(&self) -> Result<f64> {
        Ok(numerics::spectral_radius(&self.p)?)
    }
}

type BlockEvaluator = dyn Fn(&[f64]) -> Result<AffineBlock> + Send + Sync;

/// State-affine system `x_t = p(z_t) x_{t-1} + q(z_t)` on a compact input box.
#[derive(Clone)]
pub struct SasModel {
    name: String,
    basis: GellMannBasis,
    domain: InputDomain,
    eval: Arc<BlockEvaluator>,
}

impl fmt::Debug for SasModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SasModel").field("name", &self.name).field("dim", &self.dim()).field("domain", &self.domain).finish()
    }
}

impl SasModel {
    pub fn new<F>(name: impl Into<String>, basis: GellMannBasis, domain: InputDomain, eval: F) -> Self
    where
        F: Fn(&[f64]) -> Result<AffineBlock> + Send + Sync + 'static,
    {
        Self { name: name.into(), basis, domain, eval: Arc::new(eval) }
    }

    pub fn from_channel(channel: &ParamChannel, basis: &GellMannBasis) -> Result<Self> {
        if channel.dim() != basis.dim() {
            return Err(SasError::DimensionMismatch { expected: basis.dim(), got: channel.dim() });
        }
        let ch = channel.clone();
        let b = basis.clone();
        Ok(Self::new(channel.name(), basis.clone(), channel.domain().clone(), move |z| {
            superop_matrix(&ch, z, &b)?.decompose()
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &GellMannBasis {
        &self.basis
    }

    pub fn domain(&self) -> &InputDomain {
        &self.domain
    }

    pub fn at(&self, z: &[f64]) -> Result<AffineBlock> {
        if !self.domain.contains(z) {
            return Err(ChannelError::DomainViolation { z: z.to_vec() }.into());
        }
        (self.eval)(z)
    }

    /// `sas_step`.
    pub fn step(&self, x: &BlochVector, z: &[f64]) -> Result<BlochVector> {
        self.check_vector(x)?;
        Ok(BlochVector::new(x.dim, self.at(z)?.step(&x.coords)))
    }

    fn check_vector(&self, x: &BlochVector) -> Result<()> {
        let n = self.basis.len() - 1;
        if x.dim != self.dim() || x.coords.len() != n {
            return Err(SasError::DimensionMismatch { expected: n, got: x.coords.len() });
        }
        Ok(())
    }

    /// `iterate_sas`: the states after each input (same length as `inputs`).
    pub fn iterate(&self, x0: &BlochVector, inputs: &[Vec<f64>]) -> Result<Vec<BlochVector>> {
        self.check_vector(x0)?;
        let mut x = x0.coords.clone();
        let mut out = Vec::with_capacity(inputs.len());
        for z in inputs {
            x = self.at(z)?.step(&x);
            out.push(BlochVector::new(x0.dim, x.clone()));
        }
        Ok(out)
    }

    /// Fixed point of the channel at a single input.
    pub fn fixed_point(&self, z: &[f64]) -> Result<FixedPoint> {
        let block = self.at(z)?;
        let x = block.affine_fixed_point().map_err(|_| {
            let ev = numerics::eig_real(&block.p)
                .ok()
                .and_then(|s| {
                    s.eigenvalues.iter().map(|l| (*l - c64(1.0, 0.0)).norm()).reduce(f64::min).map(|dist| 1.0 - dist)
                })
                .unwrap_or(f64::NAN);
            SasError::SingularFixedPoint { z: z.to_vec(), eigenvalue: ev }
        })?;
        let x = BlochVector::new(self.dim(), x);
        let rho = self
            .basis
            .bloch_to_density(&x)
            .map_err(|e| SasError::InvalidFixedPoint { z: z.to_vec(), reason: e.to_string() })?;
        let residue = (block.step(&x.coords) - &x.coords).norm();
        if residue > 1e-9 {
            return Err(SasError::InvalidFixedPoint { z: z.to_vec(), reason: format!("residue {residue:e}") });
        }
        Ok(FixedPoint { z: z.to_vec(), x, rho })
    }

    pub fn to_density(&self, x: &BlochVector) -> Result<DensityMatrix> {
        Ok(self.basis.bloch_to_density(x)?)
    }
}

/// `iterate_density` with the drift policy: re-Hermitize each step, renormalize
/// the trace only if it drifts by more than `1e-12`, never force positivity.
pub fn iterate_density(channel: &ParamChannel, rho0: &DensityMatrix, inputs: &[Vec<f64>]) -> Result<Vec<DensityMatrix>> {
    if rho0.dim() != channel.dim() {
        return Err(SasError::DimensionMismatch { expected: channel.dim(), got: rho0.dim() });
    }
    let mut rho = rho0.clone();
    let mut out = Vec::with_capacity(inputs.len());
    for z in inputs {
        let m = channel.at(z)?.apply_op(rho.matrix());
        let mut m = (&m + m.adjoint()) * c64(0.5, 0.0);
        let tr = m.trace().re;
        if (tr - 1.0).abs() > tol::CONVERGENCE {
            m /= c64(tr, 0.0);
        }
        rho = DensityMatrix::new(m)?;
        out.push(rho.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct FixedPoint {
    pub z: Vec<f64>,
    pub x: BlochVector,
    pub rho: DensityMatrix,
}

/// Bound `||Σ_{j≥J} (Π p) q||₂ <= equivalence · rate^J · q_sup / (1 - rate)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayBound {
    pub rate: f64,
    /// Norm-equivalence constant between the certifying norm and the Euclidean norm.
    pub equivalence: f64,
    /// Supremum of `||q(z)||₂` over the domain (as sampled).
    pub q_sup: f64,
}

impl DecayBound {
    pub fn tail(&self, depth: usize) -> f64 {
        if self.q_sup == 0.0 {
            return 0.0;
        }
        self.equivalence * self.rate.powi(depth as i32) * self.q_sup / (1.0 - self.rate)
    }

    /// Smallest depth whose tail bound is below `tol`.
    pub fn depth_for(&self, tol: f64) -> Option<usize> {
        if !(self.rate < 1.0 && self.rate >= 0.0) {
            return None;
        }
        if self.tail(0) < tol {
            return Some(0);
        }
        if self.rate == 0.0 {
            return Some(1);
        }
        let j = ((tol * (1.0 - self.rate) / (self.equivalence * self.q_sup)).ln() / self.rate.ln()).ceil();
        let mut j = j.max(0.0) as usize;
        while self.tail(j) >= tol {
            j += 1;
        }
        Some(j)
    }
}

#[derive(Debug, Clone)]
pub struct FilterValue {
    pub x: BlochVector,
    pub depth: usize,
    pub tail_bound: f64,
}

/// Truncated filter `Σ_{j<J} p(z_t)⋯p(z_{t-j+1}) q(z_{t-j})`. `inputs` is
/// chronological (last element is `z_t`); `J` is chosen so the tail bound is
/// below `tol`.
pub fn filter_eval(model: &SasModel, inputs: &[Vec<f64>], bound: Option<DecayBound>, tol: f64) -> Result<FilterValue> {
    let bound = bound.ok_or(SasError::NoCertificate)?;
    let depth = bound.depth_for(tol).ok_or(SasError::NoCertificate)?;
    if depth > inputs.len() {
        return Err(SasError::InsufficientHistory { needed: depth, got: inputs.len() });
    }
    let n = model.basis.len() - 1;
    let mut acc = DVector::zeros(n);
    let mut prefix = DMatrix::<f64>::identity(n, n);
    for z in inputs.iter().rev().take(depth) {
        let block = model.at(z)?;
        acc += &prefix * &block.q;
        prefix *= &block.p;
    }
    Ok(FilterValue { x: BlochVector::new(model.dim(), acc), depth, tail_bound: bound.tail(depth) })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    #[serde(serialize_with = "serialize_complex_list")]
    pub eigenvalues: Vec<C64>,
    pub is_ergodic: bool,
    pub is_mixing: bool,
    pub traceless_spectral_radius: f64,
}

pub(crate) fn serialize_complex_list<S: serde::Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

/// Spectrum of `T̂`, mixing (traceless block radius `< 1 - 1e-10`) and
/// ergodicity (exactly one eigenvalue within `1e-8` of 1).
pub fn spectrum_analysis(t: &SuperOpMatrix) -> Result<SpectrumReport> {
    let spec = numerics::eig_real(t.matrix())?;
    let block = t.decompose()?;
    let radius = block.traceless_spectral_radius()?;
    let unit = spec.eigenvalues.iter().filter(|l| (**l - c64(1.0, 0.0)).norm() < 1e-8).count();
    Ok(SpectrumReport {
        eigenvalues: spec.eigenvalues,
        is_ergodic: unit == 1,
        is_mixing: radius < 1.0 - tol::STRUCTURAL,
        traceless_spectral_radius: radius,
    })
}

/// Sample of the input domain: uniform lattice plus seeded random interior points.
#[derive(Debug, Clone, Serialize)]
pub struct Lattice {
    pub per_axis: usize,
    pub random_points: usize,
    pub seed: u64,
    #[serde(skip)]
    pub points: Vec<Vec<f64>>,
}

impl Lattice {
    pub fn new(domain: &InputDomain, per_axis: usize, random_points: usize, seed: u64) -> Self {
        let mut points = domain.lattice(per_axis);
        let mut rng = SplitMix64::new(seed);
        points.extend((0..random_points).map(|_| domain.sample(&mut rng)));
        Self { per_axis, random_points, seed, points }
    }

    /// 101 points per axis and 1000 random points.
    pub fn default_for(domain: &InputDomain, seed: u64) -> Self {
        Self::new(domain, 101, 1000, seed)
    }

    /// Explicit points (e.g. a single input).
    pub fn from_points(points: Vec<Vec<f64>>) -> Self {
        Self { per_axis: 0, random_points: 0, seed: 0, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Norms tried by the contraction certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertNorm {
    Induced { norm: InducedNorm },
    /// `||D p D⁻¹||₂` with `D = diag(scales)`.
    ScaledSpectral { scales: Vec<f64> },
}

impl CertNorm {
    pub fn eval(&self, p: &DMatrix<f64>) -> f64 {
        match self {
            CertNorm::Induced { norm } => numerics::induced_norm(p, *norm).expect("p is square"),
            CertNorm::ScaledSpectral { scales } => {
                let scaled = DMatrix::from_fn(p.nrows(), p.ncols(), |i, j| scales[i] * p[(i, j)] / scales[j]);
                numerics::singular_values(&scaled)[0]
            }
        }
    }

    /// Constant `c` with `||v||₂ <= c ||v||_N` and `||v||_N <= ||v||₂` after rescaling
    /// (product of both equivalence constants).
    pub fn equivalence(&self, n: usize) -> f64 {
        match self {
            CertNorm::Induced { norm: InducedNorm::Spectral } => 1.0,
            CertNorm::Induced { .. } => (n as f64).sqrt(),
            CertNorm::ScaledSpectral { scales } => {
                let hi = scales.iter().copied().fold(0.0, f64::max);
                let lo = scales.iter().copied().fold(f64::INFINITY, f64::min);
                hi / lo
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            CertNorm::Induced { norm } => norm.name().to_string(),
            CertNorm::ScaledSpectral { scales } => {
                let s: Vec<String> = scales.iter().map(|x| format!("{x}")).collect();
                format!("scaled_spectral[{}]", s.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormEntry {
    pub norm: CertNorm,
    pub sup: f64,
    pub argmax: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    CertifiedContractive { norm: CertNorm, sup: f64, epsilon: f64 },
    NecessaryConditionFailed { z: Vec<f64>, traceless_spectral_radius: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct EspReport {
    pub lattice: Lattice,
    pub norm_table: Vec<NormEntry>,
    /// `(k, max ||p(z_1)⋯p(z_k)||₂^{1/k})` over sampled products.
    pub product_estimates: Vec<(usize, f64)>,
    pub mixing_per_input: Vec<bool>,
    pub max_traceless_spectral_radius: f64,
    pub q_sup: f64,
    pub verdict: Verdict,
    /// Size of the traceless block `p`.
    pub traceless_dim: usize,
}

impl EspReport {
    pub fn is_certified(&self) -> bool {
        matches!(self.verdict, Verdict::CertifiedContractive { .. })
    }

    pub fn decay_bound(&self) -> Option<DecayBound> {
        match &self.verdict {
            Verdict::CertifiedContractive { norm, sup, .. } => {
                Some(DecayBound { rate: *sup, equivalence: norm.equivalence(self.traceless_dim), q_sup: self.q_sup })
            }
            _ => None,
        }
    }
}

const SCALE_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
const PRODUCT_SAMPLES: usize = 64;

fn scale_candidates(n: usize, rng: &mut SplitMix64) -> Vec<Vec<f64>> {
    if n <= 1 {
        return vec![];
    }
    let free = n - 1;
    let total = SCALE_GRID.len().pow(free.min(8) as u32);
    let mut out = Vec::new();
    if free <= 3 {
        for idx in 0..total {
            let mut k = idx;
            let mut s = vec![1.0];
            for _ in 0..free {
                s.push(SCALE_GRID[k % SCALE_GRID.len()]);
                k /= SCALE_GRID.len();
            }
            out.push(s);
        }
    } else {
        for _ in 0..128 {
            let mut s = vec![1.0];
            s.extend((0..free).map(|_| SCALE_GRID[rng.below(SCALE_GRID.len())]));
            out.push(s);
        }
    }
    out.retain(|s| s.iter().any(|&x| x != 1.0));
    out
}

/// Tries spectral, column-sum and row-sum norms, then diagonally scaled spectral
/// norms, over every lattice point; records random length-`k` product growth.
///
/// Any norm with `sup < 1` certifies contraction; any lattice point whose
/// traceless block has spectral radius `>= 1` fails the necessary condition.
pub fn contraction_certificate(model: &SasModel, lattice: &Lattice, k_max: usize) -> Result<EspReport> {
    if lattice.is_empty() {
        return Err(SasError::EmptyLattice);
    }
    let blocks: Vec<AffineBlock> = lattice.points.iter().map(|z| model.at(z)).collect::<Result<_>>()?;
    let n = blocks[0].p.nrows();

    let mut radii = Vec::with_capacity(blocks.len());
    for b in &blocks {
        radii.push(b.traceless_spectral_radius()?);
    }
    let mixing_per_input: Vec<bool> = radii.iter().map(|r| *r < 1.0 - tol::STRUCTURAL).collect();
    let (worst_idx, max_radius) =
        radii.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    let q_sup = blocks.iter().map(|b| b.q.norm()).fold(0.0, f64::max);

    let mut rng = SplitMix64::new(lattice.seed ^ 0x5EED0FCE27);
    let mut norms: Vec<CertNorm> = InducedNorm::ALL.iter().map(|&norm| CertNorm::Induced { norm }).collect();
    norms.extend(scale_candidates(n, &mut rng).into_iter().map(|scales| CertNorm::ScaledSpectral { scales }));

    let mut norm_table = Vec::with_capacity(norms.len());
    for norm in norms {
        let (mut sup, mut arg) = (f64::NEG_INFINITY, 0);
        for (i, b) in blocks.iter().enumerate() {
            let v = norm.eval(&b.p);
            if v > sup {
                sup = v;
                arg = i;
            }
        }
        norm_table.push(NormEntry { norm, sup, argmax: lattice.points[arg].clone() });
    }

    let mut product_estimates = Vec::new();
    for k in 1..=k_max {
        let mut best: f64 = 0.0;
        for _ in 0..PRODUCT_SAMPLES {
            let mut prod = DMatrix::<f64>::identity(n, n);
            for _ in 0..k {
                prod = &blocks[rng.below(blocks.len())].p * prod;
            }
            best = best.max(numerics::singular_values(&prod)[0].powf(1.0 / k as f64));
        }
        product_estimates.push((k, best));
    }

    let verdict = if max_radius >= 1.0 - tol::STRUCTURAL {
        Verdict::NecessaryConditionFailed { z: lattice.points[worst_idx].clone(), traceless_spectral_radius: max_radius }
    } else {
        // first entry in search order with the smallest sup below 1
        let best = norm_table
            .iter()
            .filter(|e| e.sup < 1.0 - tol::STRUCTURAL)
            .fold(None::<&NormEntry>, |acc, e| match acc {
                Some(a) if a.sup <= e.sup => Some(a),
                _ => Some(e),
            });
        match best {
            Some(e) => Verdict::CertifiedContractive { norm: e.norm.clone(), sup: e.sup, epsilon: 1.0 - e.sup },
            None => Verdict::Inconclusive,
        }
    };

    Ok(EspReport {
        lattice: lattice.clone(),
        norm_table,
        product_estimates,
        mixing_per_input,
        max_traceless_spectral_radius: max_radius,
        q_sup,
        verdict,
        traceless_dim: n,
    })
}

#[derive(Debug, Clone)]
pub struct FixedPointReport {
    pub entries: Vec<FixedPoint>,
    /// `max_z ||ρ*(z) - ρ*(z₀)||₁ < 1e-9`.
    pub input_independent: bool,
    /// `max_z ||T(ρ*(z₀), z) - ρ*(z₀)||₁`.
    pub witness_deviation: f64,
    pub max_fixed_point_spread: f64,
    /// `max_z ||q(z)||₂ < 1e-10`.
    pub unital: bool,
    pub max_q_norm: f64,
}

pub fn fixed_point_report(model: &SasModel, lattice: &Lattice) -> Result<FixedPointReport> {
    if lattice.is_empty() {
        return Err(SasError::EmptyLattice);
    }
    let entries: Vec<FixedPoint> = lattice.points.iter().map(|z| model.fixed_point(z)).collect::<Result<_>>()?;
    let reference = &entries[0];
    let spread = entries.iter().map(|e| e.rho.trace_distance(&reference.rho)).fold(0.0, f64::max);
    let mut witness: f64 = 0.0;
    let mut max_q: f64 = 0.0;
    for z in &lattice.points {
        let block = model.at(z)?;
        max_q = max_q.max(block.q.norm());
        let image = BlochVector::new(model.dim(), block.step(&reference.x.coords));
        let image = model.basis.from_real_coords(&image.full_coords())?;
        witness = witness.max(numerics::hermitian_trace_norm(&(image - reference.rho.matrix())));
    }
    Ok(FixedPointReport {
        input_independent: spread < 1e-9,
        witness_deviation: witness,
        max_fixed_point_spread: spread,
        unital: max_q < tol::STRUCTURAL,
        max_q_norm: max_q,
        entries,
    })
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    /// Unital channel under contraction: filter is identically `I/d`.
    pub unital_trivial: bool,
    /// Input-independent fixed point under contraction: filter is constant.
    pub constant_filter: Option<DensityMatrix>,
    pub predicted_bloch: Option<BlochVector>,
    /// Largest distance between a sampled filter output and the prediction.
    pub max_prediction_deviation: Option<f64>,
    /// Largest pairwise distance between sampled filter outputs.
    pub filter_spread: f64,
    pub sequences: usize,
    /// Predictions agree with the sampled filter within `1e-8`.
    pub consistent: bool,
}

const THEOREM_TOL: f64 = 1e-8;

/// Predicts trivial/constant filters from unitality or an input-independent fixed
/// point, and checks the prediction by evaluating the filter on `sequences`
/// random input sequences.
pub fn theorem_checks(
    model: &SasModel,
    lattice: &Lattice,
    certificate: &EspReport,
    sequences: usize,
    seed: u64,
) -> Result<TheoremReport> {
    let bound = certificate.decay_bound().ok_or(SasError::NoCertificate)?;
    let fps = fixed_point_report(model, lattice)?;
    let depth = bound.depth_for(tol::CONVERGENCE).ok_or(SasError::NoCertificate)?;
    let mut rng = SplitMix64::new(seed);
    let mut outputs = Vec::with_capacity(sequences);
    for _ in 0..sequences {
        let inputs = model.domain().sample_sequence(depth + 8, &mut rng);
        outputs.push(filter_eval(model, &inputs, Some(bound), tol::CONVERGENCE)?.x);
    }
    let mut spread: f64 = 0.0;
    for (i, a) in outputs.iter().enumerate() {
        for b in &outputs[i + 1..] {
            spread = spread.max((&a.coords - &b.coords).norm());
        }
    }

    let unital_trivial = fps.unital;
    let predicted = if unital_trivial {
        Some(BlochVector::zeros(model.dim()))
    } else if fps.input_independent {
        Some(fps.entries[0].x.clone())
    } else {
        None
    };
    let deviation = predicted
        .as_ref()
        .map(|p| outputs.iter().map(|o| (&o.coords - &p.coords).norm()).fold(0.0, f64::max));
    let consistent = match deviation {
        Some(dev) => dev < THEOREM_TOL,
        None => spread > THEOREM_TOL,
    };
    let constant_filter = match &predicted {
        Some(p) => Some(model.to_density(p)?),
        None => None,
    };
    Ok(TheoremReport {
        unital_trivial,
        constant_filter,
        predicted_bloch: predicted,
        max_prediction_deviation: deviation,
        filter_spread: spread,
        sequences,
        consistent,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EspProbeReport {
    /// `distances[i][t]` = `||ρ_t - ρ'_t||₁` for pair `i`; index 0 is the initial distance.
    pub distances: Vec<Vec<f64>>,
    /// Largest one-step ratio `d_t / d_{t-1}` (ratios with `d_{t-1} < 1e-13` skipped).
    pub max_step_factor: f64,
    /// Largest geometric-mean rate `(d_T / d_0)^{1/T}` across pairs.
    pub mean_rate: f64,
    pub terminal_max: f64,
}

/// Drives pairs of initial states with the same inputs and records their trace distance.
pub fn esp_probe(channel: &ParamChannel, inputs: &[Vec<f64>], pairs: &[(DensityMatrix, DensityMatrix)]) -> Result<EspProbeReport> {
    if pairs.is_empty() {
        return Err(SasError::InvalidArgument("esp_probe needs at least one pair of initial states".into()));
    }
    let mut distances = Vec::with_capacity(pairs.len());
    let (mut max_factor, mut mean_rate, mut terminal): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (a, b) in pairs {
        let ta = iterate_density(channel, a, inputs)?;
        let tb = iterate_density(channel, b, inputs)?;
        let mut d = vec![a.trace_distance(b)];
        d.extend(ta.iter().zip(&tb).map(|(x, y)| x.trace_distance(y)));
        for w in d.windows(2) {
            if w[0] > 1e-13 {
                max_factor = max_factor.max(w[1] / w[0]);
            }
        }
        let last = *d.last().unwrap();
        terminal = terminal.max(last);
        if d[0] > 0.0 && !inputs.is_empty() {
            mean_rate = mean_rate.max((last / d[0]).powf(1.0 / inputs.len() as f64));
        }
        distances.push(d);
    }
    Ok(EspProbeReport { distances, max_step_factor: max_factor, mean_rate, terminal_max: terminal })
}

/// Weighting sequence for the fading-memory norm `sup_s w_s ||z_{t-s}||`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Weighting {
    /// `w_s = λ^s`, `0 < λ < 1`.
    Geometric(f64),
}

impl Weighting {
    pub fn weight(&self, s: usize) -> f64 {
        match *self {
            Weighting::Geometric(l) => l.powi(s as i32),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Weighting::Geometric(l) if l > 0.0 && l < 1.0 => Ok(()),
            Weighting::Geometric(l) => Err(SasError::InvalidArgument(format!("geometric weighting needs 0 < λ < 1, got {l}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FmpEntry {
    pub k: usize,
    pub output_deviation: f64,
    pub weighted_input_distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FmpProbeReport {
    pub entries: Vec<FmpEntry>,
    /// `exp(slope)` of a least-squares fit of `ln(deviation)` against `k`.
    pub fitted_rate: Option<f64>,
}

/// Perturbs every input at times `<= t - k` and reports how much the state at
/// time `t` moves. Both runs start from `I/d`.
pub fn fmp_probe(channel: &ParamChannel, inputs: &[Vec<f64>], weighting: Weighting, ks: &[usize], seed: u64) -> Result<FmpProbeReport> {
    weighting.validate()?;
    let t = inputs.len();
    let start = DensityMatrix::maximally_mixed(channel.dim());
    let reference = iterate_density(channel, &start, inputs)?;
    let reference = reference.last().ok_or_else(|| SasError::InvalidArgument("empty input sequence".into()))?;
    let mut rng = SplitMix64::new(seed);
    let mut entries = Vec::new();
    for &k in ks {
        if k >= t {
            return Err(SasError::InsufficientHistory { needed: k + 1, got: t });
        }
        let mut perturbed = inputs.to_vec();
        let mut weighted: f64 = 0.0;
        // positions 0..t-k hold the inputs at times <= t - k (last input is time t)
        for (pos, z) in perturbed.iter_mut().enumerate().take(t - k) {
            *z = channel.domain().sample(&mut rng);
            let lag = t - 1 - pos;
            let diff = z.iter().zip(&inputs[pos]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            weighted = weighted.max(weighting.weight(lag) * diff);
        }
        let out = iterate_density(channel, &start, &perturbed)?;
        entries.push(FmpEntry {
            k,
            output_deviation: out.last().expect("non-empty").trace_distance(reference),
            weighted_input_distance: weighted,
        });
    }
    let pts: Vec<(f64, f64)> =
        entries.iter().filter(|e| e.output_deviation > 1e-14).map(|e| (e.k as f64, e.output_deviation.ln())).collect();
    let fitted_rate = (pts.len() >= 2).then(|| {
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let (mx, my) = (sx / m, sy / m);
        let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (num / den).exp()
    });
    Ok(FmpProbeReport { entries, fitted_rate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{self, depolarizing, identity_channel, random_channel};

    fn qubit() -> GellMannBasis {
        GellMannBasis::qubit()
    }

    #[test]
    fn identity_superop() {
        let t = SuperOpMatrix::from_map(&identity_channel(3), &GellMannBasis::new(3).unwrap()).unwrap();
        assert!(numerics::max_abs_diff(t.matrix(), &DMatrix::identity(9, 9)) < 1e-14);
    }

    #[test]
    fn depolarizing_superop_is_diagonal() {
        let t = SuperOpMatrix::from_map(&depolarizing(0.3, 2).unwrap(), &qubit()).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.7, 0.7, 0.7]));
        assert!(numerics::max_abs_diff(t.matrix(), &expected) < 1e-14);
        let block = t.decompose().unwrap();
        assert!(block.q.norm() < 1e-15);
    }

    #[test]
    fn superop_reproduces_channel_action() {
        let mut rng = SplitMix64::new(17);
        for d in [2, 3] {
            let basis = GellMannBasis::new(d).unwrap();
            let k = random_channel(d, 2, &mut rng).to_map();
            let t = SuperOpMatrix::from_map(&k, &basis).unwrap();
            let a = rng.ginibre(d, d);
            let a = &a + a.adjoint();
            let lhs = basis.to_real_coords(&k.apply_op(&a)).unwrap();
            let rhs = t.matrix() * basis.to_real_coords(&a).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
            // and back
            let back = t.to_map(&basis).unwrap();
            assert!(numerics::max_abs_diff(back.natural(), k.natural()) < 1e-12);
        }
    }

    #[test]
    fn decompose_roundtrip_and_errors() {
        let mut rng = SplitMix64::new(3);
        let basis = GellMannBasis::new(3).unwrap();
        let t = SuperOpMatrix::from_map(&random_channel(3, 4, &mut rng).to_map(), &basis).unwrap();
        let block = sas_decompose(&t).unwrap();
        assert!(numerics::max_abs_diff(block.reassemble().matrix(), t.matrix()) < 1e-15);
        assert_eq!(block.p, t.matrix().view((1, 1), (8, 8)).into_owned());

        let mut bad = t.matrix().clone();
        bad[(0, 2)] = 0.1;
        let bad = SuperOpMatrix::from_real(3, bad).unwrap();
        assert!(matches!(bad.decompose(), Err(SasError::NotTracePreserving(_))));
        // non-Hermiticity-preserving map gives an imaginary residue
        let mut nat = identity_channel(2).natural().clone();
        nat[(1, 1)] = c64(0.0, 1.0);
        let m = LinearMap::from_natural(2, nat).unwrap();
        assert!(matches!(SuperOpMatrix::from_map(&m, &qubit()), Err(SasError::ImaginaryResidue(_))));
    }

    #[test]
    fn action_on_full_coordinates() {
        let mut rng = SplitMix64::new(31);
        let basis = qubit();
        let t = SuperOpMatrix::from_map(&random_channel(2, 3, &mut rng).to_map(), &basis).unwrap();
        let block = t.decompose().unwrap();
        let x = BlochVector::from_pauli([0.1, -0.4, 0.3]);
        let full = t.matrix() * x.full_coords();
        assert!((full[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((full.rows(1, 3).into_owned() - block.step(&x.coords)).norm() < 1e-14);
    }

    fn depolarizing_model(lambda: f64) -> SasModel {
        let ch = channels::input_depolarizing(2, InputDomain::unit(1), move |_| lambda);
        SasModel::from_channel(&ch, &qubit()).unwrap()
    }

    #[test]
    fn affine_iteration_basics() {
        let model = depolarizing_model(0.5);
        let x0 = BlochVector::new(2, DVector::from_vec(vec![0.0, 0.0, 1.0]));
        let inputs = vec![vec![0.3]; 6];
        let traj = model.iterate(&x0, &inputs).unwrap();
        assert_eq!(traj.len(), 6);
        for (t, x) in traj.iter().enumerate() {
            assert!((x.coords[2] - 0.5f64.powi(t as i32 + 1)).abs() < 1e-14);
        }
        assert!(model.iterate(&x0, &[vec![2.0]]).is_err());

        // p = 0 gives x_t = q(z_t)
        let q = DVector::from_vec(vec![0.1, 0.0, -0.2]);
        let qq = q.clone();
        let zero = SasModel::new("p0", qubit(), InputDomain::unit(1), move |z| {
            Ok(AffineBlock { dim: 2, p: DMatrix::zeros(3, 3), q: &qq * z[0] })
        });
        let traj = zero.iterate(&x0, &[vec![0.5], vec![1.0]]).unwrap();
        assert!((&traj[0].coords - &q * 0.5).norm() < 1e-15);
        assert!((&traj[1].coords - &q).norm() < 1e-15);
    }

    #[test]
    fn density_and_affine_trajectories_agree() {
        let mut rng = SplitMix64::new(77);
        let basis = qubit();
        let a = random_channel(2, 2, &mut rng).to_map();
        let b = random_channel(2, 3, &mut rng).to_map();
        let ch = ParamChannel::new("mix", 2, InputDomain::unit(1), move |z| a.mix(&b, z[0]));
        let model = SasModel::from_channel(&ch, &basis).unwrap();
        let rho0 = DensityMatrix::random(2, &mut rng);
        let inputs = ch.domain().sample_sequence(100, &mut rng);
        let dens = iterate_density(&ch, &rho0, &inputs).unwrap();
        let aff = model.iterate(&basis.density_to_bloch(&rho0).unwrap(), &inputs).unwrap();
        for (r, x) in dens.iter().zip(&aff) {
            assert!((basis.density_to_bloch(r).unwrap().coords - &x.coords).norm() < 1e-10);
        }
    }

    #[test]
    fn spectrum_of_identity_is_not_ergodic() {
        let r = spectrum_analysis(&SuperOpMatrix::identity(2)).unwrap();
        assert!(!r.is_ergodic && !r.is_mixing);
        let r = spectrum_analysis(&SuperOpMatrix::from_map(&depolarizing(0.2, 2).unwrap(), &qubit()).unwrap()).unwrap();
        assert!(r.is_ergodic && r.is_mixing);
        assert!((r.traceless_spectral_radius - 0.8).abs() < 1e-12);
    }

    #[test]
    fn certificate_for_depolarizing() {
        let ch = channels::input_depolarizing(2, InputDomain::unit(1), |z| 0.1 + 0.8 * z[0]);
        let model = SasModel::from_channel(&ch, &qubit()).unwrap();
        let lattice = Lattice::new(ch.domain(), 11, 20, 1);
        let report = contraction_certificate(&model, &lattice, 4).unwrap();
        match &report.verdict {
            Verdict::CertifiedContractive { sup, .. } => assert!((sup - 0.9).abs() < 1e-12),
            v => panic!("unexpected {v:?}"),
        }
        assert!(report.mixing_per_input.iter().all(|&m| m));
        let fps = fixed_point_report(&model, &lattice).unwrap();
        assert!(fps.unital && fps.input_independent);
        let th = theorem_checks(&model, &lattice, &report, 10, 5).unwrap();
        assert!(th.unital_trivial && th.consistent);
        assert!(numerics::max_abs_diff(th.constant_filter.unwrap().matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-12);
    }

    #[test]
    fn rotation_fails_necessary_condition() {
        let ch = ParamChannel::new("rot", 2, InputDomain::unit(1), |z| {
            let u = CMatrix::from_diagonal(&numerics::CVector::from_vec(vec![c64(0.0, z[0]).exp(), c64(0.0, -z[0]).exp()]));
            Ok(channels::unitary_channel(&u)?.to_map())
        });
        let model = SasModel::from_channel(&ch, &qubit()).unwrap();
        let report = contraction_certificate(&model, &Lattice::new(ch.domain(), 5, 0, 0), 2).unwrap();
        assert!(matches!(report.verdict, Verdict::NecessaryConditionFailed { .. }));
        assert!(report.decay_bound().is_none());
        assert!(matches!(filter_eval(&model, &[vec![0.1]], report.decay_bound(), 1e-6), Err(SasError::NoCertificate)));
    }

    #[test]
    fn filter_at_constant_input_equals_fixed_point() {
        let mut rng = SplitMix64::new(5);
        let basis = qubit();
        let a = random_channel(2, 2, &mut rng).to_map();
        let ch = channels::blend(
            &ParamChannel::constant(a, InputDomain::unit(1)),
            &DensityMatrix::random(2, &mut rng),
            0.4,
        )
        .unwrap();
        let model = SasModel::from_channel(&ch, &basis).unwrap();
        let report = contraction_certificate(&model, &Lattice::new(ch.domain(), 3, 0, 0), 2).unwrap();
        assert!(report.is_certified());
        let inputs = vec![vec![0.5]; 400];
        let f = filter_eval(&model, &inputs, report.decay_bound(), 1e-13).unwrap();
        assert!(f.tail_bound < 1e-13);
        let fp = model.fixed_point(&[0.5]).unwrap();
        assert!((f.x.coords - fp.x.coords).norm() < 1e-12);
        assert!(matches!(
            filter_eval(&model, &inputs[..2], report.decay_bound(), 1e-13),
            Err(SasError::InsufficientHistory { .. })
        ));
    }

    #[test]
    fn singular_fixed_point_is_reported() {
        let model = SasModel::new("id", qubit(), InputDomain::unit(1), |_| {
            Ok(AffineBlock { dim: 2, p: DMatrix::identity(3, 3), q: DVector::zeros(3) })
        });
        assert!(matches!(model.fixed_point(&[0.0]), Err(SasError::SingularFixedPoint { .. })));
    }

    #[test]
    fn decay_bound_depth() {
        let b = DecayBound { rate: 0.5, equivalence: 1.0, q_sup: 1.0 };
        let j = b.depth_for(1e-6).unwrap();
        assert!(b.tail(j) < 1e-6 && b.tail(j - 1) >= 1e-6);
        assert_eq!(DecayBound { rate: 0.5, equivalence: 1.0, q_sup: 0.0 }.depth_for(1e-12), Some(0));
        assert_eq!(DecayBound { rate: 1.0, equivalence: 1.0, q_sup: 1.0 }.depth_for(1e-12), None);
    }

    #[test]
    fn unitary_probe_keeps_distance() {
        let ch = ParamChannel::new("rot", 2, InputDomain::unit(1), |z| {
            let u = CMatrix::from_row_slice(2, 2, &[
                c64(z[0].cos(), 0.0), c64(0.0, -z[0].sin()),
                c64(0.0, -z[0].sin()), c64(z[0].cos(), 0.0),
            ]);
            Ok(channels::unitary_channel(&u)?.to_map())
        });
        let mut rng = SplitMix64::new(4);
        let pairs = vec![(DensityMatrix::random(2, &mut rng), DensityMatrix::random(2, &mut rng))];
        let inputs = ch.domain().sample_sequence(50, &mut rng);
        let r = esp_probe(&ch, &inputs, &pairs).unwrap();
        let d = &r.distances[0];
        assert!(d.iter().all(|x| (x - d[0]).abs() < 1e-10));
        assert!(esp_probe(&ch, &inputs, &[]).is_err());
    }

    #[test]
    fn weighting_validation() {
        let ch = channels::input_depolarizing(2, InputDomain::unit(1), |z| 0.1 + 0.8 * z[0]);
        let inputs = vec![vec![0.5]; 10];
        assert!(fmp_probe(&ch, &inputs, Weighting::Geometric(1.5), &[1], 0).is_err());
        assert!(fmp_probe(&ch, &inputs, Weighting::Geometric(0.5), &[10], 0).is_err());
        assert_eq!(Weighting::Geometric(0.5).weight(0), 1.0);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]
        #[test]
        fn superop_of_composition_is_product(seed in 0u64..1_000_000) {
            let mut rng = SplitMix64::new(seed);
            let d = 2 + rng.below(2);
            let basis = GellMannBasis::new(d).unwrap();
            let a = random_channel(d, 2, &mut rng).to_map();
            let b = random_channel(d, 3, &mut rng).to_map();
            let ab = SuperOpMatrix::from_map(&channels::compose(&a, &b).unwrap(), &basis).unwrap();
            let prod = SuperOpMatrix::from_map(&a, &basis).unwrap().after(&SuperOpMatrix::from_map(&b, &basis).unwrap()).unwrap();
            proptest::prop_assert!(numerics::max_abs_diff(ab.matrix(), prod.matrix()) < 1e-12);
        }

        #[test]
        fn unital_iff_q_vanishes(seed in 0u64..1_000_000) {
            let mut rng = SplitMix64::new(seed);
            let basis = qubit();
            let u = channels::random_unitary(2, &mut rng);
            let unital = channels::compose(&channels::dephasing(rng.uniform(0.1, 2.0)).unwrap().to_map(),
                &channels::unitary_channel(&u).unwrap().to_map()).unwrap();
            let t = SuperOpMatrix::from_map(&unital, &basis).unwrap();
            proptest::prop_assert!(t.decompose().unwrap().q.norm() < 1e-12);
            let id = basis.to_real_coords(&CMatrix::identity(2, 2)).unwrap();
            proptest::prop_assert!((t.matrix() * &id - &id).norm() < 1e-12);
        }
    }
}
