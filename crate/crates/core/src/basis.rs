//! Generalized Gell-Mann operator bases and the coordinate maps between
//! operators, coordinate vectors, and Bloch vectors.
//!
//! All coordinates are taken with respect to an orthonormal Hermitian basis
//! (`tr(B_i† B_j) = δ_ij`), so a density matrix always has first coordinate
//! `1/√d`. For qubits the reporting convention `⟨σ^a⟩ = tr(σ^a ρ)` differs from
//! the orthonormal coordinates by the fixed factor `√2`; see
//! [`BlochVector::to_pauli`].

use nalgebra::DVector;
use thiserror::Error;

use crate::numerics::{self, c64, tol, CMatrix, CVector};

/// Largest Hilbert-space dimension accepted by [`GellMannBasis::tensor_power`].
pub const MAX_TENSOR_DIM: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("basis dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("tensor power must be at least 1")]
    ZeroPower,
    #[error("tensor basis would have dimension {0} > {MAX_TENSOR_DIM}")]
    TooLarge(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("not a density matrix: {0}")]
    NotAState(String),
}

pub type Result<T> = std::result::Result<T, BasisError>;

/// Ordered orthonormal Hermitian basis of `d x d` operators, element 0 = `I/√d`.
#[derive(Debug, Clone)]
pub struct GellMannBasis {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl GellMannBasis {
    /// Generalized Gell-Mann basis in the fixed order: identity, symmetric
    /// off-diagonal generators for `j < k` (row-major), antisymmetric ones in the
    /// same order, then the `d - 1` diagonal generators.
    ///
    /// For `d = 2` this is `{I, σx, σy, σz} / √2`.
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(BasisError::DimensionTooSmall(d));
        }
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut elements = Vec::with_capacity(d * d);
        elements.push(CMatrix::identity(d, d) * c64(1.0 / (d as f64).sqrt(), 0.0));

        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect();
        for &(j, k) in &pairs {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = c64(inv_sqrt2, 0.0);
            m[(k, j)] = c64(inv_sqrt2, 0.0);
            elements.push(m);
        }
        for &(j, k) in &pairs {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = c64(0.0, -inv_sqrt2);
            m[(k, j)] = c64(0.0, inv_sqrt2);
            elements.push(m);
        }
        for l in 1..d {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut m = CMatrix::zeros(d, d);
            for j in 0..l {
                m[(j, j)] = c64(norm, 0.0);
            }
            m[(l, l)] = c64(-(l as f64) * norm, 0.0);
            elements.push(m);
        }
        Ok(Self { dim: d, elements })
    }

    pub fn qubit() -> Self {
        Self::new(2).expect("d = 2 is valid")
    }

    /// All `n`-fold tensor products of the elements, in lexicographic order of the
    /// factor indices. Since element 0 is `I/√d`, the first product is `I/√(d^n)`.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(BasisError::ZeroPower);
        }
        let big = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(self.dim)).unwrap_or(usize::MAX);
        if big > MAX_TENSOR_DIM {
            return Err(BasisError::TooLarge(big));
        }
        let mut elements = self.elements.clone();
        for _ in 1..n {
            elements = elements
                .iter()
                .flat_map(|a| self.elements.iter().map(move |b| numerics::kron(a, b)))
                .collect();
        }
        Ok(Self { dim: big, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of elements, `d²`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &CMatrix {
        &self.elements[i]
    }

    /// Hilbert–Schmidt Gram matrix `tr(B_i† B_j)`.
    pub fn gram(&self) -> CMatrix {
        let n = self.len();
        CMatrix::from_fn(n, n, |i, j| hs_inner(&self.elements[i], &self.elements[j]))
    }

    fn check_operator(&self, a: &CMatrix) -> Result<()> {
        if a.nrows() != self.dim || a.ncols() != self.dim {
            return Err(BasisError::DimensionMismatch { expected: self.dim, got: a.nrows().max(a.ncols()) });
        }
        Ok(())
    }

    /// Coordinates `a_i = tr(B_i† A)`.
    pub fn to_coords(&self, a: &CMatrix) -> Result<CVector> {
        self.check_operator(a)?;
        Ok(CVector::from_iterator(self.len(), self.elements.iter().map(|b| hs_inner(b, a))))
    }

    /// `Σ a_i B_i`.
    pub fn from_coords(&self, a: &CVector) -> Result<CMatrix> {
        if a.len() != self.len() {
            return Err(BasisError::DimensionMismatch { expected: self.len(), got: a.len() });
        }
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (ai, b) in a.iter().zip(&self.elements) {
            out += b * *ai;
        }
        Ok(out)
    }

    /// Real coordinates of a Hermitian operator.
    pub fn to_real_coords(&self, a: &CMatrix) -> Result<DVector<f64>> {
        Ok(self.to_coords(a)?.map(|x| x.re))
    }

    pub fn from_real_coords(&self, a: &DVector<f64>) -> Result<CMatrix> {
        self.from_coords(&a.map(|x| c64(x, 0.0)))
    }

    pub fn density_to_bloch(&self, rho: &DensityMatrix) -> Result<BlochVector> {
        let c = self.to_real_coords(rho.matrix())?;
        Ok(BlochVector { dim: self.dim, coords: c.rows(1, self.len() - 1).into_owned() })
    }

    /// Strict inverse of [`Self::density_to_bloch`]: rejects vectors that do not
    /// describe a state (possible for `d > 2` even inside the unit ball).
    pub fn bloch_to_density(&self, x: &BlochVector) -> Result<DensityMatrix> {
        if x.dim != self.dim || x.coords.len() + 1 != self.len() {
            return Err(BasisError::DimensionMismatch { expected: self.len() - 1, got: x.coords.len() });
        }
        DensityMatrix::new(self.from_real_coords(&x.full_coords())?)
    }
}

fn hs_inner(a: &CMatrix, b: &CMatrix) -> nalgebra::Complex<f64> {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Real coordinates with respect to the traceless basis elements.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    pub dim: usize,
    pub coords: DVector<f64>,
}

impl BlochVector {
    pub fn new(dim: usize, coords: DVector<f64>) -> Self {
        Self { dim, coords }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, coords: DVector::zeros(dim * dim - 1) }
    }

    /// `(1/√d, xᵀ)ᵀ`.
    pub fn full_coords(&self) -> DVector<f64> {
        let mut full = DVector::zeros(self.coords.len() + 1);
        full[0] = 1.0 / (self.dim as f64).sqrt();
        full.rows_mut(1, self.coords.len()).copy_from(&self.coords);
        full
    }

    /// Qubit spin expectations `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩) = √2 · x`.
    pub fn to_pauli(&self) -> Option<[f64; 3]> {
        if self.dim != 2 {
            return None;
        }
        let s = std::f64::consts::SQRT_2;
        Some([s * self.coords[0], s * self.coords[1], s * self.coords[2]])
    }

    pub fn from_pauli(expectations: [f64; 3]) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { dim: 2, coords: DVector::from_iterator(3, expectations.iter().map(|e| e * s)) }
    }
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    /// Validates at the structural tolerance `1e-10`.
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, tol::STRUCTURAL)
    }

    pub fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(BasisError::NotAState(format!("shape {}x{}", m.nrows(), m.ncols())));
        }
        if !numerics::is_hermitian(&m, tol) {
            return Err(BasisError::NotAState("not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr - c64(1.0, 0.0)).norm() > tol {
            return Err(BasisError::NotAState(format!("trace {}", tr.re)));
        }
        let min_ev = numerics::hermitian_eigenvalues(&m)[0];
        if min_ev < -tol {
            return Err(BasisError::NotAState(format!("minimum eigenvalue {min_ev:e}")));
        }
        Ok(Self(m))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(CMatrix::identity(d, d) * c64(1.0 / d as f64, 0.0))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn pure(psi: &CVector) -> Self {
        let n = psi.norm();
        let v = psi / c64(n, 0.0);
        Self(&v * v.adjoint())
    }

    /// `|k⟩⟨k|`.
    pub fn basis_state(d: usize, k: usize) -> Self {
        let mut m = CMatrix::zeros(d, d);
        m[(k, k)] = c64(1.0, 0.0);
        Self(m)
    }

    /// Random mixed state `G G† / tr(G G†)` from a Ginibre matrix.
    pub fn random(d: usize, rng: &mut crate::rng::SplitMix64) -> Self {
        let g = rng.ginibre(d, d);
        let m = &g * g.adjoint();
        let tr = m.trace();
        Self(m / tr)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// `||ρ - σ||₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        numerics::hermitian_trace_norm(&(&self.0 - &other.0))
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }
}
