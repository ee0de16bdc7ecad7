//! Quantum channels: Kraus sets, linear maps on operators, CPTP checks, named
//! channel families, composition, and input-parametrized channels.
//!
//! A fixed-input channel is stored as a [`LinearMap`] in the column-stacking
//! representation: `vec(T(A)) = S vec(A)` with `vec(A)[i + j d] = A[i, j]`.
//! Under this convention `vec(K A K†) = (conj(K) ⊗ K) vec(A)` and composition
//! is plain matrix multiplication.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::basis::{BasisError, DensityMatrix};
use crate::numerics::{self, c64, tol, CMatrix, NumericsError};
use crate::rng::SplitMix64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operator is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("map is not CPTP: {0}")]
    NotCptp(String),
    #[error("input {z:?} outside domain")]
    DomainViolation { z: Vec<f64> },
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

/// Kraus operators `{K_i}` acting on a `d`-dimensional space.
#[derive(Debug, Clone)]
pub struct KrausSet {
    dim: usize,
    ops: Vec<CMatrix>,
}

impl KrausSet {
    /// Validates shapes, count `<= d²`, and completeness `Σ K†K = I` within `1e-10`.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let set = Self::unchecked(ops)?;
        if set.ops.len() > set.dim * set.dim {
            return Err(ChannelError::InvalidParameter(format!(
                "{} Kraus operators exceed d² = {}",
                set.ops.len(),
                set.dim * set.dim
            )));
        }
        let defect = set.completeness_defect();
        if defect > tol::STRUCTURAL {
            return Err(ChannelError::NotCptp(format!("completeness defect {defect:e}")));
        }
        Ok(set)
    }

    /// Shape checks only; used to inspect invalid sets with [`cptp_report_kraus`].
    pub fn unchecked(ops: Vec<CMatrix>) -> Result<Self> {
        let dim = ops.first().map(|k| k.nrows()).ok_or_else(|| ChannelError::InvalidParameter("empty Kraus set".into()))?;
        for k in &ops {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(ChannelError::DimensionMismatch { expected: dim, got: k.nrows().max(k.ncols()) });
            }
        }
        Ok(Self { dim, ops })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.ops
    }

    /// `||Σ K†K - I||` (largest entry modulus).
    pub fn completeness_defect(&self) -> f64 {
        let sum = self.ops.iter().fold(CMatrix::zeros(self.dim, self.dim), |acc, k| acc + k.adjoint() * k);
        numerics::max_abs_diff(&sum, &CMatrix::identity(self.dim, self.dim))
    }

    pub fn to_map(&self) -> LinearMap {
        let n = self.dim * self.dim;
        let s = self.ops.iter().fold(CMatrix::zeros(n, n), |acc, k| acc + numerics::kron(&k.conjugate(), k));
        LinearMap { dim: self.dim, natural: s }
    }

    /// `Σ K_i A K_i†` on an arbitrary operator.
    pub fn apply_op(&self, a: &CMatrix) -> CMatrix {
        self.ops.iter().fold(CMatrix::zeros(self.dim, self.dim), |acc, k| acc + k * a * k.adjoint())
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_dim(self.dim, rho.dim())?;
        Ok(DensityMatrix::new(self.apply_op(rho.matrix()))?)
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(ChannelError::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn vec_op(a: &CMatrix) -> numerics::CVector {
    // nalgebra storage is column-major, which is exactly the column-stacking order
    numerics::CVector::from_column_slice(a.as_slice())
}

fn unvec(v: &numerics::CVector, d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

/// Linear map on `B(H)` in the column-stacking representation.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    dim: usize,
    natural: CMatrix,
}

impl LinearMap {
    pub fn from_natural(dim: usize, natural: CMatrix) -> Result<Self> {
        let n = dim * dim;
        if natural.nrows() != n || natural.ncols() != n {
            return Err(ChannelError::DimensionMismatch { expected: n, got: natural.nrows().max(natural.ncols()) });
        }
        Ok(Self { dim, natural })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, natural: CMatrix::identity(dim * dim, dim * dim) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn natural(&self) -> &CMatrix {
        &self.natural
    }

    pub fn apply_op(&self, a: &CMatrix) -> CMatrix {
        unvec(&(&self.natural * vec_op(a)), self.dim)
    }

    /// Applies the map and validates the result as a state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_dim(self.dim, rho.dim())?;
        let out = self.apply_op(rho.matrix());
        Ok(DensityMatrix::new(out)?)
    }

    /// `self ∘ first`: applies `first`, then `self`.
    pub fn after(&self, first: &LinearMap) -> Result<LinearMap> {
        check_dim(self.dim, first.dim)?;
        Ok(LinearMap { dim: self.dim, natural: &self.natural * &first.natural })
    }

    /// Convex combination `(1 - w) self + w other`.
    pub fn mix(&self, other: &LinearMap, w: f64) -> Result<LinearMap> {
        check_dim(self.dim, other.dim)?;
        Ok(LinearMap { dim: self.dim, natural: &self.natural * c64(1.0 - w, 0.0) + &other.natural * c64(w, 0.0) })
    }

    /// Unnormalized Choi matrix `Σ_ij E_ij ⊗ T(E_ij)`.
    pub fn choi(&self) -> ChoiMatrix {
        let d = self.dim;
        let j = CMatrix::from_fn(d * d, d * d, |r, c| {
            let (i, a) = (r / d, r % d);
            let (jj, b) = (c / d, c % d);
            self.natural[(a + b * d, i + jj * d)]
        });
        ChoiMatrix { dim: d, matrix: j }
    }

    /// Reports completeness, trace preservation, and Choi positivity.
    pub fn cptp_report(&self) -> CptpReport {
        let d = self.dim;
        // T†(I)[i, j] = tr(T(E_ji))
        let mut dual_identity = CMatrix::zeros(d, d);
        let mut trace_defect: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut e = CMatrix::zeros(d, d);
                e[(j, i)] = c64(1.0, 0.0);
                let tr = self.apply_op(&e).trace();
                dual_identity[(i, j)] = tr;
                let target = if i == j { 1.0 } else { 0.0 };
                trace_defect = trace_defect.max((tr - c64(target, 0.0)).norm());
            }
        }
        let completeness_defect = numerics::max_abs_diff(&dual_identity, &CMatrix::identity(d, d));
        CptpReport::from_parts(completeness_defect, trace_defect, &self.choi())
    }

    /// Kraus decomposition from the Choi eigendecomposition (eigenvalues below
    /// `1e-14` relative to the largest are dropped).
    pub fn to_kraus(&self) -> Result<KrausSet> {
        self.choi().to_kraus()
    }
}

impl From<&KrausSet> for LinearMap {
    fn from(k: &KrausSet) -> Self {
        k.to_map()
    }
}

#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    dim: usize,
    matrix: CMatrix,
}

impl ChoiMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn min_eigenvalue(&self) -> f64 {
        numerics::hermitian_eigenvalues(&self.matrix)[0]
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        numerics::is_psd(&self.matrix, tol)
    }

    pub fn to_kraus(&self) -> Result<KrausSet> {
        let d = self.dim;
        let h = (&self.matrix + self.matrix.adjoint()) * c64(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let mut ops = Vec::new();
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam < -tol::STRUCTURAL * top.max(1.0) {
                return Err(ChannelError::NotCptp(format!("Choi eigenvalue {lam:e}")));
            }
            if lam <= 1e-14 * top {
                continue;
            }
            let v = eig.eigenvectors.column(k);
            let s = lam.sqrt();
            ops.push(CMatrix::from_fn(d, d, |a, i| v[i * d + a] * s));
        }
        KrausSet::unchecked(ops)
    }
}

/// CPTP diagnostics. Never fails; [`CptpReport::is_cptp`] gives the verdict.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CptpReport {
    pub completeness_defect: f64,
    pub trace_defect: f64,
    pub choi_min_eigenvalue: f64,
    pub choi_hermiticity_defect: f64,
}

impl CptpReport {
    fn from_parts(completeness_defect: f64, trace_defect: f64, choi: &ChoiMatrix) -> Self {
        let herm = numerics::max_abs_diff(&choi.matrix, &choi.matrix.adjoint());
        Self {
            completeness_defect,
            trace_defect,
            choi_min_eigenvalue: choi.min_eigenvalue(),
            choi_hermiticity_defect: herm,
        }
    }

    pub fn is_cptp(&self) -> bool {
        self.completeness_defect < tol::STRUCTURAL
            && self.trace_defect < tol::STRUCTURAL
            && self.choi_hermiticity_defect < tol::STRUCTURAL
            && self.choi_min_eigenvalue > -tol::STRUCTURAL
    }
}

pub fn cptp_report_kraus(k: &KrausSet) -> CptpReport {
    let mut report = k.to_map().cptp_report();
    report.completeness_defect = k.completeness_defect();
    report
}

pub fn identity_channel(d: usize) -> LinearMap {
    LinearMap::identity(d)
}

/// `E(A) = (1 - λ) A + λ tr(A) I/d`.
pub fn depolarizing(lambda: f64, d: usize) -> Result<LinearMap> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(ChannelError::InvalidParameter(format!("depolarizing probability {lambda} outside [0, 1]")));
    }
    let n = d * d;
    let mut s = CMatrix::identity(n, n) * c64(1.0 - lambda, 0.0);
    // vec(tr(A) I/d) = vec(I) vec(I)ᵀ vec(A) / d
    for a in 0..d {
        for i in 0..d {
            s[(a + a * d, i + i * d)] += c64(lambda / d as f64, 0.0);
        }
    }
    Ok(LinearMap { dim: d, natural: s })
}

/// Qubit dephasing with Kraus operators `√κ I`, `√(1-κ)|0⟩⟨0|`, `√(1-κ)|1⟩⟨1|`,
/// `κ = e^{-g²/2}`: populations are kept, coherences scale by `κ`.
pub fn dephasing(g: f64) -> Result<KrausSet> {
    if !(g >= 0.0) {
        return Err(ChannelError::InvalidParameter(format!("measurement strength {g} must be >= 0")));
    }
    let kappa = (-g * g / 2.0).exp();
    let k0 = CMatrix::identity(2, 2) * c64(kappa.sqrt(), 0.0);
    if kappa == 1.0 {
        return KrausSet::new(vec![k0]);
    }
    let mut k1 = CMatrix::zeros(2, 2);
    let mut k2 = CMatrix::zeros(2, 2);
    k1[(0, 0)] = c64((1.0 - kappa).sqrt(), 0.0);
    k2[(1, 1)] = c64((1.0 - kappa).sqrt(), 0.0);
    KrausSet::new(vec![k0, k1, k2])
}

pub fn unitary_channel(u: &CMatrix) -> Result<KrausSet> {
    if u.nrows() != u.ncols() {
        return Err(ChannelError::NotUnitary(f64::INFINITY));
    }
    let d = u.nrows();
    let defect = numerics::max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(d, d));
    if defect > tol::STRUCTURAL {
        return Err(ChannelError::NotUnitary(defect));
    }
    KrausSet::new(vec![u.clone()])
}

/// `compose(t2, t1)` applies `t1` first, then `t2`.
pub fn compose(t2: &LinearMap, t1: &LinearMap) -> Result<LinearMap> {
    t2.after(t1)
}

/// The transpose map, positive but not completely positive.
pub fn transpose_map(d: usize) -> LinearMap {
    let n = d * d;
    let s = CMatrix::from_fn(n, n, |r, c| {
        let (a, b) = (r % d, r / d);
        let (i, j) = (c % d, c / d);
        if a == j && b == i {
            c64(1.0, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    LinearMap { dim: d, natural: s }
}

/// Random CPTP map with `k` Kraus operators: a Ginibre matrix `G` (`kd x d`)
/// orthonormalized to an isometry `V = G (G†G)^{-1/2}` and cut into blocks.
pub fn random_channel(d: usize, k: usize, rng: &mut SplitMix64) -> KrausSet {
    let g = rng.ginibre(k * d, d);
    let gram = g.adjoint() * &g;
    let eig = gram.symmetric_eigen();
    let inv_sqrt = &eig.eigenvectors
        * CMatrix::from_diagonal(&eig.eigenvalues.map(|l| c64(1.0 / l.sqrt(), 0.0)))
        * eig.eigenvectors.adjoint();
    let v = g * inv_sqrt;
    let ops = (0..k).map(|b| v.rows(b * d, d).into_owned()).collect();
    KrausSet::unchecked(ops).expect("shapes are consistent")
}

/// Random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary(d: usize, rng: &mut SplitMix64) -> CMatrix {
    let g = rng.ginibre(d, d);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMatrix::from_diagonal(&r.diagonal().map(|x| if x.norm() > 0.0 { x / x.norm() } else { c64(1.0, 0.0) }));
    q * phases
}

/// Compact box `[lo, hi]` of admissible inputs.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct InputDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl InputDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(ChannelError::InvalidParameter("domain bounds must have equal, nonzero length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
            return Err(ChannelError::InvalidParameter(format!("empty or non-finite box {lo:?}..{hi:?}")));
        }
        Ok(Self { lo, hi })
    }

    /// `[0, 1]ⁿ`.
    pub fn unit(n: usize) -> Self {
        Self { lo: vec![0.0; n], hi: vec![1.0; n] }
    }

    pub fn input_dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        const SLACK: f64 = 1e-12;
        z.len() == self.lo.len()
            && z.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| *x >= a - SLACK && *x <= b + SLACK)
    }

    /// Uniform lattice with `per_axis` points per coordinate (endpoints included;
    /// a single point sits at the midpoint). Points in row-major order.
    pub fn lattice(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| match per_axis {
                0 => vec![],
                1 => vec![0.5 * (a + b)],
                n => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
            })
            .collect();
        let mut points = vec![vec![]];
        for axis in &axes {
            points = points
                .into_iter()
                .flat_map(|p: Vec<f64>| {
                    axis.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        points
    }

    pub fn sample(&self, rng: &mut SplitMix64) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(&a, &b)| rng.uniform(a, b)).collect()
    }

    pub fn sample_sequence(&self, len: usize, rng: &mut SplitMix64) -> Vec<Vec<f64>> {
        (0..len).map(|_| self.sample(rng)).collect()
    }
}

type Evaluator = dyn Fn(&[f64]) -> Result<LinearMap> + Send + Sync;

/// Input-driven channel `z ↦ T(·, z)` on a compact input box.
#[derive(Clone)]
pub struct ParamChannel {
    name: String,
    dim: usize,
    domain: InputDomain,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for ParamChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamChannel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .finish()
    }
}

impl ParamChannel {
    pub fn new<F>(name: impl Into<String>, dim: usize, domain: InputDomain, eval: F) -> Self
    where
        F: Fn(&[f64]) -> Result<LinearMap> + Send + Sync + 'static,
    {
        Self { name: name.into(), dim, domain, eval: Arc::new(eval) }
    }

    /// Input-independent channel.
    pub fn constant(map: LinearMap, domain: InputDomain) -> Self {
        let dim = map.dim();
        Self::new("constant", dim, domain, move |_| Ok(map.clone()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &InputDomain {
        &self.domain
    }

    /// Evaluates the channel; inputs outside the domain are reported, not clamped.
    pub fn at(&self, z: &[f64]) -> Result<LinearMap> {
        if !self.domain.contains(z) {
            return Err(ChannelError::DomainViolation { z: z.to_vec() });
        }
        let map = (self.eval)(z)?;
        check_dim(self.dim, map.dim())?;
        Ok(map)
    }

    /// Checks the CPTP report at every point of a lattice.
    pub fn worst_cptp_report(&self, points: &[Vec<f64>]) -> Result<CptpReport> {
        let mut worst: Option<CptpReport> = None;
        for z in points {
            let r = self.at(z)?.cptp_report();
            worst = Some(match worst {
                None => r,
                Some(w) => CptpReport {
                    completeness_defect: w.completeness_defect.max(r.completeness_defect),
                    trace_defect: w.trace_defect.max(r.trace_defect),
                    choi_min_eigenvalue: w.choi_min_eigenvalue.min(r.choi_min_eigenvalue),
                    choi_hermiticity_defect: w.choi_hermiticity_defect.max(r.choi_hermiticity_defect),
                },
            });
        }
        worst.ok_or_else(|| ChannelError::InvalidParameter("no lattice points".into()))
    }
}

/// Applies `first` then `second` at the same input.
pub fn compose_param(second: &ParamChannel, first: &ParamChannel) -> Result<ParamChannel> {
    check_dim(second.dim, first.dim)?;
    if second.domain != first.domain {
        return Err(ChannelError::InvalidParameter("composed channels must share the input domain".into()));
    }
    let (a, b) = (second.clone(), first.clone());
    let name = format!("{} ∘ {}", a.name, b.name);
    Ok(ParamChannel::new(name, a.dim, a.domain.clone(), move |z| a.at(z)?.after(&b.at(z)?)))
}

/// Input-driven depolarizing channel with probability `lambda(z)`.
pub fn input_depolarizing<F>(d: usize, domain: InputDomain, lambda: F) -> ParamChannel
where
    F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
{
    ParamChannel::new("depolarizing", d, domain, move |z| depolarizing(lambda(z), d))
}

/// `ρ ↦ (1 - ε) T(ρ, z) + ε σ`.
///
/// As a map on all operators this is `A ↦ (1 - ε) T(A, z) + ε tr(A) σ`.
pub fn blend(t: &ParamChannel, sigma: &DensityMatrix, eps: f64) -> Result<ParamChannel> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(ChannelError::InvalidParameter(format!("blend weight {eps} outside (0, 1)")));
    }
    check_dim(t.dim, sigma.dim())?;
    let d = t.dim;
    let replace = replacement_map(sigma);
    let inner = t.clone();
    Ok(ParamChannel::new(format!("blend({})", t.name), d, t.domain.clone(), move |z| inner.at(z)?.mix(&replace, eps)))
}

/// `A ↦ tr(A) σ`.
pub fn replacement_map(sigma: &DensityMatrix) -> LinearMap {
    let d = sigma.dim();
    let vs = vec_op(sigma.matrix());
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        s.set_column(i + i * d, &vs);
    }
    LinearMap { dim: d, natural: s }
}

/// Filter of the blended system written as a series,
/// `U_t = ε Σ_{j≥0} (1-ε)^j (T_{z_t} ∘ … ∘ T_{z_{t-j+1}})(σ)`,
/// truncated after `terms` compositions. `inputs` is chronological; its last
/// entry is `z_t`.
pub fn blend_filter_series(
    t: &ParamChannel,
    sigma: &DensityMatrix,
    eps: f64,
    inputs: &[Vec<f64>],
    terms: usize,
) -> Result<CMatrix> {
    if terms > inputs.len() {
        return Err(ChannelError::InvalidParameter(format!(
            "{terms} series terms need at least as many inputs, got {}",
            inputs.len()
        )));
    }
    let d = t.dim;
    let mut acc = sigma.matrix() * c64(eps, 0.0);
    let mut prefix = LinearMap::identity(d);
    let mut weight = eps;
    for z in inputs.iter().rev().take(terms) {
        prefix = prefix.after(&t.at(z)?)?;
        weight *= 1.0 - eps;
        acc += prefix.apply_op(sigma.matrix()) * c64(weight, 0.0);
    }
    Ok(acc)
}
