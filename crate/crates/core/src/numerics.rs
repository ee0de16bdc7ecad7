//! Dense complex-matrix kernel: norms, spectra, decompositions and the matrix
//! exponential. Everything here is a pure function of its inputs.
//!
//! The factorizations are delegated to `nalgebra`; this module pins down the
//! conventions the rest of the crate relies on (ordering of eigenvalues,
//! descending singular values, tolerance semantics).

use std::cmp::Ordering;

use nalgebra::{ComplexField, DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

pub type C64 = nalgebra::Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance ladder shared by all modules.
pub mod tol {
    /// Hermiticity, trace, completeness and other structural checks.
    pub const STRUCTURAL: f64 = 1e-10;
    /// Absolute tolerance for iterative convergence.
    pub const CONVERGENCE: f64 = 1e-12;
    /// Agreement with closed-form expressions.
    pub const CLOSED_FORM: f64 = 1e-8;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("Schatten exponent must be >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular system (condition estimate {condition:e})")]
    Singular { condition: f64 },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}

pub type Result<T> = std::result::Result<T, NumericsError>;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ensure_square<T: ComplexField>(a: &DMatrix<T>) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(NumericsError::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(a.nrows())
}

fn ensure_finite<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<()> {
    if a.iter().all(|x| x.clone().modulus().is_finite()) {
        Ok(())
    } else {
        Err(NumericsError::NonFinite)
    }
}

/// Matrix norms induced by vector norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InducedNorm {
    /// Largest singular value (induced by the Euclidean norm).
    Spectral,
    /// Maximum absolute column sum (induced by the 1-norm).
    ColSum,
    /// Maximum absolute row sum (induced by the ∞-norm).
    RowSum,
}

impl InducedNorm {
    pub const ALL: [InducedNorm; 3] = [InducedNorm::Spectral, InducedNorm::ColSum, InducedNorm::RowSum];

    pub fn name(&self) -> &'static str {
        match self {
            InducedNorm::Spectral => "spectral",
            InducedNorm::ColSum => "col_sum",
            InducedNorm::RowSum => "row_sum",
        }
    }
}

/// Singular values in descending order.
pub fn singular_values<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(Ordering::Equal));
    sv
}

/// Schatten p-norm `(Σ σ_i^p)^{1/p}`; `p = 1` is the trace norm, `p = 2` the Frobenius norm.
pub fn schatten_norm<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, p: f64) -> Result<f64> {
    ensure_square(a)?;
    if !(p >= 1.0) {
        return Err(NumericsError::InvalidExponent(p));
    }
    let sv = singular_values(a);
    if p == 1.0 {
        return Ok(sv.iter().sum());
    }
    Ok(sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p))
}

pub fn induced_norm<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, kind: InducedNorm) -> Result<f64> {
    ensure_square(a)?;
    if a.is_empty() {
        return Ok(0.0);
    }
    Ok(match kind {
        InducedNorm::Spectral => singular_values(a)[0],
        InducedNorm::ColSum => a
            .column_iter()
            .map(|c| c.iter().map(|x| x.clone().modulus()).sum::<f64>())
            .fold(0.0, f64::max),
        InducedNorm::RowSum => a
            .row_iter()
            .map(|r| r.iter().map(|x| x.clone().modulus()).sum::<f64>())
            .fold(0.0, f64::max),
    })
}

/// `exp(A)` by Padé scaling-and-squaring.
pub fn matrix_exponential<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;
    if n == 0 {
        return Ok(a.clone());
    }
    let e = a.exp();
    ensure_finite(&e)?;
    Ok(e)
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Sorted by descending modulus, then descending real part, then descending imaginary part.
    pub eigenvalues: Vec<C64>,
    /// Unit-norm eigenvectors as columns, in the same order as `eigenvalues`.
    pub eigenvectors: Option<CMatrix>,
}

impl Spectrum {
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max)
    }
}

const ORDER_TIE: f64 = 1e-12;

/// Deterministic eigenvalue order used in every report.
pub fn eigenvalue_order(a: &C64, b: &C64) -> Ordering {
    let (ma, mb) = (a.norm(), b.norm());
    if (ma - mb).abs() > ORDER_TIE {
        return mb.partial_cmp(&ma).unwrap_or(Ordering::Equal);
    }
    if (a.re - b.re).abs() > ORDER_TIE {
        return b.re.partial_cmp(&a.re).unwrap_or(Ordering::Equal);
    }
    b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal)
}

/// Eigenvalues (and optionally eigenvectors) of a general complex matrix.
///
/// Eigenvectors are obtained as right singular vectors of `A - λI` belonging to
/// the smallest singular values; eigenvalues closer than `1e-7` are treated as
/// one cluster and receive as many vectors as the cluster has members.
pub fn eig(a: &CMatrix, with_vectors: bool) -> Result<Spectrum> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;
    if n == 0 {
        return Ok(Spectrum { eigenvalues: vec![], eigenvectors: with_vectors.then(|| CMatrix::zeros(0, 0)) });
    }
    let mut eigenvalues = match nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, 10_000)
        .and_then(|s| s.eigenvalues())
    {
        Some(vals) => vals.iter().copied().collect(),
        None => hessenberg_qr_eigenvalues(a)?,
    };
    eigenvalues.sort_by(eigenvalue_order);

    if !with_vectors {
        return Ok(Spectrum { eigenvalues, eigenvectors: None });
    }

    const CLUSTER: f64 = 1e-7;
    let mut vectors = CMatrix::zeros(n, n);
    let mut assigned = vec![false; n];
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let members: Vec<usize> =
            (i..n).filter(|&j| !assigned[j] && (eigenvalues[j] - eigenvalues[i]).norm() < CLUSTER).collect();
        let centre = members.iter().map(|&j| eigenvalues[j]).sum::<C64>() / members.len() as f64;
        let shifted = a - CMatrix::identity(n, n) * centre;
        let svd = shifted.svd(false, true);
        let v = svd.v_t.expect("requested V").adjoint();
        // nalgebra's ordered SVD puts the smallest singular values last
        let order = sorted_desc_indices(&svd.singular_values);
        for (k, &j) in members.iter().enumerate() {
            let col = order[n - 1 - k];
            let mut vec = v.column(col).into_owned();
            let norm = vec.norm();
            if norm > 0.0 {
                vec /= C64::from(norm);
            }
            vectors.set_column(j, &vec);
            assigned[j] = true;
        }
    }
    Ok(Spectrum { eigenvalues, eigenvectors: Some(vectors) })
}

/// Shifted QR iteration on the Hessenberg form with Wilkinson shifts and an
/// exceptional shift every tenth sweep. Fallback for spectra on which the Schur
/// iteration above stagnates (e.g. unitary channels with degenerate phases).
fn hessenberg_qr_eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    let n = a.nrows();
    let mut h = nalgebra::linalg::Hessenberg::new(a.clone()).h();
    let mut out = vec![C64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let scale = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if h[(l, l - 1)].norm() <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
                h[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            out[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 200 * n {
            return Err(NumericsError::NoConvergence);
        }
        let mu = if iter.is_multiple_of(10) {
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.5 * h[(hi, hi - 1)].norm())
        } else {
            let (p, q, r, s) = (h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
            let half = (p - s) * 0.5;
            let disc = (half * half + q * r).sqrt();
            let (m1, m2) = (s - (disc - half), s + (disc + half));
            if (m1 - s).norm() <= (m2 - s).norm() { m1 } else { m2 }
        };
        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (x, y) = (h[(k, k)], h[(k + 1, k)]);
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 { (C64::new(1.0, 0.0), C64::new(0.0, 0.0)) } else { (x / r, y / r) };
            for j in k..=hi {
                let (u, v) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = c.conj() * u + s.conj() * v;
                h[(k + 1, j)] = -s * u + c * v;
            }
            rots.push((c, s));
        }
        for (idx, (c, s)) in rots.into_iter().enumerate() {
            let k = l + idx;
            for i in l..=(k + 2).min(hi) {
                let (u, v) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = u * c + v * s;
                h[(i, k + 1)] = -u * s.conj() + v * c.conj();
            }
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }
    out[0] = h[(0, 0)];
    Ok(out)
}

fn sorted_desc_indices(v: &DVector<f64>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).unwrap_or(Ordering::Equal));
    idx
}

/// Eigenvalues of a real matrix, via the complex path.
pub fn eig_real(a: &DMatrix<f64>) -> Result<Spectrum> {
    eig(&to_complex(a), false)
}

pub fn spectral_radius<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<f64> {
    let c = a.map(|x| {
        let (re, im) = (x.clone().real(), x.imaginary());
        c64(re, im)
    });
    Ok(eig(&c, false)?.spectral_radius())
}

#[derive(Debug, Clone)]
pub struct SvdResult {
    /// Nonnegative, descending.
    pub singular_values: Vec<f64>,
    pub u: Option<CMatrix>,
    pub v_t: Option<CMatrix>,
}

pub fn svd(a: &CMatrix, with_vectors: bool) -> SvdResult {
    if !with_vectors {
        return SvdResult { singular_values: singular_values(a), u: None, v_t: None };
    }
    let s = a.clone().svd(true, true);
    let order = sorted_desc_indices(&s.singular_values);
    let u = s.u.expect("requested U");
    let v_t = s.v_t.expect("requested V");
    let mut uu = CMatrix::zeros(u.nrows(), order.len());
    let mut vv = CMatrix::zeros(order.len(), v_t.ncols());
    for (k, &j) in order.iter().enumerate() {
        uu.set_column(k, &u.column(j));
        vv.set_row(k, &v_t.row(j));
    }
    SvdResult {
        singular_values: order.iter().map(|&j| s.singular_values[j]).collect(),
        u: Some(uu),
        v_t: Some(vv),
    }
}

/// Ratio `σ_max / σ_min`; infinite for a singular matrix.
pub fn condition_number<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    let sv = singular_values(a);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Solves `A x = b`. Refuses systems whose condition estimate exceeds `1e14`.
pub fn solve<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, b: &DVector<T>) -> Result<DVector<T>> {
    let n = ensure_square(a)?;
    if b.len() != n {
        return Err(NumericsError::DimensionMismatch(format!("matrix is {n}x{n}, rhs has length {}", b.len())));
    }
    let condition = condition_number(a);
    if !(condition < 1e14) {
        return Err(NumericsError::Singular { condition });
    }
    a.clone().lu().solve(b).ok_or(NumericsError::Singular { condition })
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

pub fn is_hermitian(a: &CMatrix, tol: f64) -> bool {
    a.nrows() == a.ncols() && (a - a.adjoint()).iter().all(|x| x.norm() <= tol)
}

/// Ascending eigenvalues of the Hermitian part `(A + A†)/2`.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let h = (a + a.adjoint()) * c64(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    ev
}

/// Hermitian within `tol` and smallest eigenvalue `>= -tol`.
pub fn is_psd(a: &CMatrix, tol: f64) -> bool {
    is_hermitian(a, tol) && hermitian_eigenvalues(a).first().is_none_or(|&m| m >= -tol)
}

pub fn to_complex(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| c64(x, 0.0))
}

/// Largest absolute imaginary part.
pub fn max_imag(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.im.abs()).fold(0.0, f64::max)
}

pub fn real_part(a: &CMatrix) -> DMatrix<f64> {
    a.map(|x| x.re)
}

/// Trace norm of a Hermitian matrix, `Σ |λ_i|`.
pub fn hermitian_trace_norm(a: &CMatrix) -> f64 {
    hermitian_eigenvalues(a).iter().map(|x| x.abs()).sum()
}

pub fn max_abs_diff<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x.clone() - y.clone()).modulus()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
    }

    fn pseudo_random(n: usize, seed: u64) -> CMatrix {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        CMatrix::from_fn(n, n, |_, _| c64(next(), next()))
    }

    #[test]
    fn schatten_trivial_values() {
        let i3 = CMatrix::identity(3, 3);
        assert!((schatten_norm(&i3, 1.0).unwrap() - 3.0).abs() < 1e-14);
        assert!((schatten_norm(&sigma_x(), 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn schatten_one_is_sum_of_singular_values() {
        let a = pseudo_random(4, 7);
        let sv = svd(&a, true).singular_values;
        assert!((schatten_norm(&a, 1.0).unwrap() - sv.iter().sum::<f64>()).abs() < 1e-12);
        // Frobenius agrees with the entrywise definition
        assert!((schatten_norm(&a, 2.0).unwrap() - a.norm()).abs() < 1e-12);
    }

    #[test]
    fn schatten_rejects_bad_input() {
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(schatten_norm(&rect, 1.0), Err(NumericsError::NotSquare { .. })));
        assert!(matches!(schatten_norm(&CMatrix::identity(2, 2), 0.5), Err(NumericsError::InvalidExponent(_))));
        assert!(induced_norm(&rect, InducedNorm::Spectral).is_err());
    }

    #[test]
    fn induced_norms() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.2]));
        assert!((induced_norm(&d, InducedNorm::Spectral).unwrap() - 0.5).abs() < 1e-15);
        for kind in InducedNorm::ALL {
            assert!((induced_norm(&DMatrix::<f64>::identity(4, 4), kind).unwrap() - 1.0).abs() < 1e-15);
        }
        let a = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 3.0, 4.0]);
        assert_eq!(induced_norm(&a, InducedNorm::ColSum).unwrap(), 6.0);
        assert_eq!(induced_norm(&a, InducedNorm::RowSum).unwrap(), 7.0);
    }

    #[test]
    fn expm_basics() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![c64(0.3, 0.0), c64(-1.2, 0.5)]));
        let e = matrix_exponential(&d).unwrap();
        assert!((e[(0, 0)] - c64(0.3, 0.0).exp()).norm() < 1e-14);
        assert!((e[(1, 1)] - c64(-1.2, 0.5).exp()).norm() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-15);
        let z = matrix_exponential(&CMatrix::zeros(3, 3)).unwrap();
        assert!(max_abs_diff(&z, &CMatrix::identity(3, 3)) < 1e-15);
    }

    #[test]
    fn expm_inverse_pair() {
        for seed in 0..10 {
            let mut a = pseudo_random(5, seed);
            let scale = 10.0 / a.norm();
            a *= c64(scale.min(3.0), 0.0);
            let prod = matrix_exponential(&a).unwrap() * matrix_exponential(&(-&a)).unwrap();
            assert!(max_abs_diff(&prod, &CMatrix::identity(5, 5)) < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn expm_rejects_non_finite() {
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 1)] = c64(f64::NAN, 0.0);
        assert_eq!(matrix_exponential(&a), Err(NumericsError::NonFinite));
    }

    #[test]
    fn eig_diag_and_order() {
        let d = to_complex(&DMatrix::from_diagonal(&DVector::from_vec(vec![0.3, 1.0])));
        let s = eig(&d, true).unwrap();
        assert!((s.eigenvalues[0] - c64(1.0, 0.0)).norm() < 1e-14);
        assert!((s.eigenvalues[1] - c64(0.3, 0.0)).norm() < 1e-14);
        // conjugate pair ties are broken by imaginary part, positive first
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let s = eig_real(&rot).unwrap();
        assert!(s.eigenvalues[0].im > 0.0 && s.eigenvalues[1].im < 0.0);
    }

    #[test]
    fn eigenvectors_satisfy_definition() {
        let a = pseudo_random(4, 3);
        let s = eig(&a, true).unwrap();
        let v = s.eigenvectors.unwrap();
        for (k, lam) in s.eigenvalues.iter().enumerate() {
            let col = v.column(k).into_owned();
            let r = &a * &col - col * *lam;
            assert!(r.norm() < 1e-9, "residual {}", r.norm());
        }
    }

    #[test]
    fn hermitian_svd_eig_consistency() {
        for seed in 0..5 {
            let r = pseudo_random(4, 100 + seed);
            let h = &r + r.adjoint();
            let mut ev: Vec<f64> = hermitian_eigenvalues(&h).iter().map(|x| x.abs()).collect();
            ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let sv = singular_values(&h);
            for (x, y) in ev.iter().zip(&sv) {
                assert!((x - y).abs() < 1e-10);
            }
            assert!(spectral_radius(&h).unwrap() <= induced_norm(&h, InducedNorm::Spectral).unwrap() + 1e-12);
        }
    }

    #[test]
    fn solve_and_singular() {
        let a = to_complex(&DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]));
        let b = CVector::from_vec(vec![c64(1.0, 0.0), c64(2.0, 0.0)]);
        let x = solve(&a, &b).unwrap();
        assert!((&a * x - b).norm() < 1e-14);
        let s = to_complex(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]));
        assert!(matches!(solve(&s, &CVector::zeros(2)), Err(NumericsError::Singular { .. })));
        assert!(matches!(solve(&a, &CVector::zeros(3)), Err(NumericsError::DimensionMismatch(_))));
    }

    #[test]
    fn kron_dagger_psd() {
        let i2 = CMatrix::identity(2, 2);
        assert_eq!(kron(&i2, &i2), CMatrix::identity(4, 4));
        let a = CMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 2.), c64(3., 0.), c64(4., 1.)]);
        assert_eq!(dagger(&a)[(0, 1)], c64(3., 0.));
        assert_eq!(dagger(&a)[(1, 0)], c64(0., -2.));
        assert!(!is_hermitian(&a, 1e-10));
        let rho = CMatrix::from_row_slice(2, 2, &[c64(0.5, 0.), c64(0.5, 0.), c64(0.5, 0.), c64(0.5, 0.)]);
        assert!(is_psd(&rho, 1e-10));
        assert!(!is_psd(&sigma_x(), 1e-10));
    }

    #[test]
    fn degenerate_unitary_spectrum() {
        let mut rng = crate::rng::SplitMix64::new(0xC9);
        for _ in 0..40 {
            let u = crate::channels::random_unitary(3, &mut rng);
            let phases = eig(&u, false).unwrap().eigenvalues;
            let natural = kron(&u.conjugate(), &u);
            let got = eig(&natural, false).unwrap().eigenvalues;
            let mut expected: Vec<C64> = phases.iter().flat_map(|a| phases.iter().map(move |b| a * b.conj())).collect();
            expected.sort_by(eigenvalue_order);
            for l in &expected {
                let best = got.iter().map(|g| (g - l).norm()).fold(f64::INFINITY, f64::min);
                assert!(best < 1e-10, "{l} missing");
            }
            let fallback = hessenberg_qr_eigenvalues(&natural).unwrap();
            for l in &expected {
                assert!(fallback.iter().map(|g| (g - l).norm()).fold(f64::INFINITY, f64::min) < 1e-10);
            }
        }
    }
}
