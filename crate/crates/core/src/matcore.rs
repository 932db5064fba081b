//! Dense complex matrices and Hermitian spectral routines.
//!
//! [`ComplexMatrix`] is a square, finite-valued matrix backed by `nalgebra`.
//! [`DensityMatrix`] adds the state invariants (Hermitian, unit trace, PSD) and
//! caches a clamped spectrum so fractional powers `rho^a` are cheap.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Result, SkewError};

/// Relative tolerance for the Hermiticity check: `max|H - H^dagger| <= tol * (1 + max|H_jk|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Absolute tolerance on `|Tr(rho) - 1|`.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue a density matrix may carry before validation fails.
pub const NEGATIVE_EIGENVALUE_TOL: f64 = 1e-10;
/// Eigenvalues below `CLAMP_REL * lambda_max` are treated as exact zeros.
pub const CLAMP_REL: f64 = 1e-12;

/// Square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a `dim x dim` matrix from row-major entries.
    pub fn from_row_major(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(SkewError::EmptyMatrix);
        }
        if entries.len() != dim * dim {
            return Err(SkewError::DimMismatch { left: entries.len(), right: dim * dim });
        }
        Self::from_nalgebra(DMatrix::from_row_slice(dim, dim, &entries))
    }

    /// Builds a matrix from separate real and imaginary row-major parts.
    pub fn from_parts(dim: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(SkewError::DimMismatch { left: re.len(), right: im.len() });
        }
        let entries = re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        Self::from_row_major(dim, entries)
    }

    /// Builds a real matrix from rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(SkewError::NotSquare { rows: dim, cols: row.len() });
            }
            entries.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::from_row_major(dim, entries)
    }

    pub fn from_nalgebra(inner: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = inner.shape();
        if rows != cols {
            return Err(SkewError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(SkewError::EmptyMatrix);
        }
        for c in 0..cols {
            for r in 0..rows {
                let z = inner[(r, c)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(SkewError::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Self { inner })
    }

    pub(crate) fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self { inner: DMatrix::from_fn(dim, dim, f) }
    }

    pub(crate) fn wrap(inner: DMatrix<Complex64>) -> Self {
        debug_assert!(inner.is_square());
        Self { inner }
    }

    pub fn identity(dim: usize) -> Self {
        Self { inner: DMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { inner: DMatrix::zeros(dim, dim) }
    }

    /// Diagonal matrix with real entries.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (k, &v) in values.iter().enumerate() {
            m.inner[(k, k)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(SkewError::DimMismatch { left: a.len(), right: b.len() });
        }
        Ok(Self::from_fn(a.len(), |r, c| a[r] * b[c].conj()))
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let d = self.dim();
        (0..d).flat_map(|r| (0..d).map(move |c| (r, c))).map(|(r, c)| self.inner[(r, c)]).collect()
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint() }
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { inner: &self.inner * c }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |H - H^dagger|` over entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.inner[(r, c)] - self.inner[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residual() <= HERMITIAN_TOL * (1.0 + self.max_abs())
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let residual = self.hermiticity_residual();
        if residual <= HERMITIAN_TOL * (1.0 + self.max_abs()) {
            Ok(())
        } else {
            Err(SkewError::NotHermitian { residual })
        }
    }

    pub fn ensure_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(SkewError::DimMismatch { left: self.dim(), right: other.dim() })
        }
    }

    /// `(H + H^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self { inner: (&self.inner + self.inner.adjoint()) * Complex64::new(0.5, 0.0) }
    }

    /// `U A U^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        self.ensure_same_dim(u)?;
        Ok(Self { inner: &u.inner * &self.inner * u.inner.adjoint() })
    }

    /// Frobenius inner product `Tr(self^dagger other)`.
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        self.inner.dotc(&other.inner)
    }

    /// `||A - B||_HS`.
    pub fn hs_distance(&self, other: &Self) -> f64 {
        (&self.inner - &other.inner).norm()
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { inner: &self.inner + &rhs.inner }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { inner: &self.inner - &rhs.inner }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { inner: &self.inner * &rhs.inner }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix { inner: -&self.inner }
    }
}

/// `AB - BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.ensure_same_dim(b)?;
    Ok(ComplexMatrix { inner: &a.inner * &b.inner - &b.inner * &a.inner })
}

/// `Tr(A^dagger A)`.
pub fn hs_norm_sq(a: &ComplexMatrix) -> f64 {
    a.hs_inner(a).re.max(0.0)
}

/// Eigendecomposition `H = U diag(lambda) U^dagger` of a Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// `U diag(f(lambda_k)) U^dagger`.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let u = self.eigenvectors.as_nalgebra();
        let mut scaled = u.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let s = Complex64::new(f(lambda), 0.0);
            scaled.column_mut(k).iter_mut().for_each(|x| *x *= s);
        }
        ComplexMatrix::wrap(scaled * u.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("spectrum is never empty")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
///
/// Each eigenvector is rotated so its first component of modulus above
/// `1e-12` is real and positive, which makes the output reproducible for a
/// fixed input.
pub fn herm_eig(h: &ComplexMatrix) -> Result<Spectrum> {
    h.ensure_hermitian()?;
    let eig = SymmetricEigen::new(h.hermitian_part().inner);
    let d = h.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut vectors = DMatrix::<Complex64>::zeros(d, d);
    let mut values = Vec::with_capacity(d);
    for (k, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let col = eig.eigenvectors.column(src);
        let phase = col
            .iter()
            .find(|z| z.norm() > 1e-12)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(Complex64::new(1.0, 0.0));
        vectors.set_column(k, &(col * phase));
    }
    Ok(Spectrum { eigenvalues: values, eigenvectors: ComplexMatrix::wrap(vectors) })
}

/// A validated quantum state with its clamped spectrum cached.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    spectrum: Spectrum,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        mat.ensure_hermitian()?;
        let trace = mat.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(SkewError::BadTrace { trace });
        }
        let mut spectrum = herm_eig(&mat)?;
        let min = spectrum.min_eigenvalue();
        if min < -NEGATIVE_EIGENVALUE_TOL {
            return Err(SkewError::NotPositive { min_eigenvalue: min });
        }
        let cutoff = CLAMP_REL * spectrum.max_eigenvalue();
        for lambda in &mut spectrum.eigenvalues {
            if *lambda < cutoff {
                *lambda = 0.0;
            }
        }
        Ok(Self { mat, spectrum })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Clamped spectrum: eigenvalues below `CLAMP_REL * lambda_max` are exactly 0.
    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// `rho^a` for `a` in `[0, 1]`, with the convention `rho^0 = I` even when `rho` is singular.
    pub fn pow(&self, a: f64) -> Result<ComplexMatrix> {
        if !(0.0..=1.0).contains(&a) {
            return Err(SkewError::BadParameter(format!("power {a} outside [0, 1]")));
        }
        if a == 0.0 {
            return Ok(ComplexMatrix::identity(self.dim()));
        }
        Ok(self.spectrum.map(|lambda| if lambda > 0.0 { lambda.powf(a) } else { 0.0 }))
    }

    /// `U rho U^dagger` for a unitary `U`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(self.mat.conjugate_by(u)?.hermitian_part())
    }
}

/// `rho^a`; see [`DensityMatrix::pow`].
pub fn mat_pow(rho: &DensityMatrix, a: f64) -> Result<ComplexMatrix> {
    rho.pow(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma(k: usize) -> ComplexMatrix {
        let e = match k {
            1 => vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)],
            2 => vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)],
            _ => vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)],
        };
        ComplexMatrix::from_row_major(2, e).unwrap()
    }

    #[test]
    fn construction_rejects_bad_shapes() {
        assert_eq!(ComplexMatrix::from_row_major(0, vec![]), Err(SkewError::EmptyMatrix));
        assert!(matches!(
            ComplexMatrix::from_row_major(2, vec![c(1., 0.); 3]),
            Err(SkewError::DimMismatch { .. })
        ));
        assert!(matches!(
            ComplexMatrix::from_row_major(1, vec![c(f64::NAN, 0.)]),
            Err(SkewError::NonFinite { row: 0, col: 0 })
        ));
        assert!(matches!(
            ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0]]),
            Err(SkewError::NotSquare { .. })
        ));
    }

    #[test]
    fn eig_of_identity() {
        let s = herm_eig(&ComplexMatrix::identity(3)).unwrap();
        for v in &s.eigenvalues {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn eig_of_diagonal_sorts_and_permutes() {
        let s = herm_eig(&ComplexMatrix::diag(&[2.0, -1.0])).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], 2.0, epsilon = 1e-14);
        let u = &s.eigenvectors;
        assert_abs_diff_eq!(u.get(1, 0).re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(u.get(0, 1).re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(u.get(0, 0).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(herm_eig(&m), Err(SkewError::NotHermitian { .. })));
    }

    #[test]
    fn eig_is_deterministic() {
        let h = &(&sigma(1) + &sigma(2)) + &sigma(3).scale_real(0.3);
        assert_eq!(herm_eig(&h).unwrap(), herm_eig(&h).unwrap());
    }

    #[test]
    fn pow_of_half_identity() {
        let rho = DensityMatrix::new(ComplexMatrix::identity(2).scale_real(0.5)).unwrap();
        let r = rho.pow(0.5).unwrap();
        let expected = ComplexMatrix::identity(2).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        assert!(r.hs_distance(&expected) < 1e-14);
    }

    #[test]
    fn pow_of_diagonal() {
        let rho = DensityMatrix::new(ComplexMatrix::diag(&[0.25, 0.75])).unwrap();
        let r = rho.pow(0.5).unwrap();
        assert_abs_diff_eq!(r.get(0, 0).re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(r.get(1, 1).re, 0.75f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(r.get(1, 1).re, 0.866_025_403_784_438_6, epsilon = 1e-14);
    }

    #[test]
    fn pow_zero_of_projector_is_identity() {
        let rho = DensityMatrix::new(ComplexMatrix::diag(&[1.0, 0.0])).unwrap();
        assert_eq!(rho.pow(0.0).unwrap(), ComplexMatrix::identity(2));
        // positive powers of the kernel stay zero
        assert_abs_diff_eq!(rho.pow(0.3).unwrap().get(1, 1).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pow_rejects_out_of_range() {
        let rho = DensityMatrix::new(ComplexMatrix::diag(&[0.5, 0.5])).unwrap();
        assert!(rho.pow(1.5).is_err());
        assert!(rho.pow(-0.1).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::diag(&[0.5, 0.6])),
            Err(SkewError::BadTrace { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::diag(&[1.5, -0.5])),
            Err(SkewError::NotPositive { .. })
        ));
        // tiny negative round-off is clamped
        let rho = DensityMatrix::new(ComplexMatrix::diag(&[1.0 + 1e-11, -1e-11])).unwrap();
        assert_eq!(rho.spectrum().eigenvalues[0], 0.0);
    }

    #[test]
    fn commutator_cases() {
        let a = &sigma(1) + &sigma(3).scale_real(0.4);
        assert_eq!(hs_norm_sq(&commutator(&a, &a).unwrap()), 0.0);
        let id = ComplexMatrix::identity(2);
        assert!(hs_norm_sq(&commutator(&id, &a).unwrap()) < 1e-30);
        // [s1, s2] = 2i s3, checked entrywise against hand multiplication
        let k = commutator(&sigma(1), &sigma(2)).unwrap();
        let expected = sigma(3).scale(c(0.0, 2.0));
        assert!(k.hs_distance(&expected) < 1e-15);
        assert!(matches!(
            commutator(&id, &ComplexMatrix::identity(3)),
            Err(SkewError::DimMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn hs_norm_cases() {
        assert_eq!(hs_norm_sq(&ComplexMatrix::zeros(3)), 0.0);
        assert_abs_diff_eq!(hs_norm_sq(&ComplexMatrix::identity(2)), 2.0, epsilon = 1e-15);
        let entrywise: f64 = sigma(1).to_row_major().iter().map(|z| z.norm_sqr()).sum();
        assert_abs_diff_eq!(hs_norm_sq(&sigma(1)), entrywise, epsilon = 1e-15);
        assert_abs_diff_eq!(entrywise, 2.0, epsilon = 1e-15);
    }
}
