//! Dense complex-matrix substrate.
//!
//! Everything above this module works with `n x n` complex matrices of small
//! order (`n <= 100`). Exponentials of Hermitian generators go through the
//! Hermitian eigendecomposition, so unitarity holds to working precision for
//! any evolution time.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Numerical tolerances shared by the structural predicates.
///
/// `structural` is absolute but every predicate scales it by
/// `max(1, frobenius(M))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub structural: f64,
    pub spectral: f64,
    pub search: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        structural: 1e-10,
        spectral: 1e-12,
        search: 1e-9,
    };

    pub fn new(structural: f64, spectral: f64, search: f64) -> Result<Self> {
        for (name, v) in [
            ("structural", structural),
            ("spectral", spectral),
            ("search", search),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} tolerance must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            structural,
            spectral,
            search,
        })
    }

    fn scaled(&self, m: &ComplexMatrix) -> f64 {
        self.structural * frobenius(m).max(1.0)
    }

    pub fn is_hermitian(&self, m: &ComplexMatrix) -> bool {
        m.is_square() && hermitian_residual(m) <= self.scaled(m)
    }

    pub fn is_skew_hermitian(&self, m: &ComplexMatrix) -> bool {
        m.is_square() && (m + m.adjoint()).norm() <= self.scaled(m)
    }

    pub fn is_unitary(&self, m: &ComplexMatrix) -> bool {
        m.is_square() && unitarity_residual(m) <= self.scaled(m)
    }
}

/// Entrywise 2-norm.
pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.norm()
}

pub fn is_hermitian(m: &ComplexMatrix) -> bool {
    Tolerances::DEFAULT.is_hermitian(m)
}

pub fn is_skew_hermitian(m: &ComplexMatrix) -> bool {
    Tolerances::DEFAULT.is_skew_hermitian(m)
}

pub fn is_unitary(m: &ComplexMatrix) -> bool {
    Tolerances::DEFAULT.is_unitary(m)
}

/// `||M - M^dagger||_F`.
pub fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// `||U^dagger U - Id||_F`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - ComplexMatrix::identity(n, n)).norm()
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// `XY - YX`.
pub fn commutator(x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    x * y - y * x
}

/// Rank-one outer product `|a><b|`.
pub fn outer(a: &ComplexVector, b: &ComplexVector) -> ComplexMatrix {
    a * b.adjoint()
}

/// Multiplies `v` by the unit phase that makes its first significant entry
/// real and positive. Entries below `1e-10 * ||v||` are skipped.
pub fn gauge_fix(v: &mut ComplexVector) {
    let norm = v.norm();
    if norm == 0.0 {
        return;
    }
    if let Some(z) = v.iter().copied().find(|z| z.norm() > 1e-10 * norm) {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|e| *e *= phase);
    }
}

pub(crate) fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.is_square() && m.nrows() > 0 {
        Ok(m.nrows())
    } else {
        Err(Error::InvalidArgument(format!(
            "expected a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )))
    }
}

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn ensure_hermitian(m: &ComplexMatrix) -> Result<usize> {
    let n = ensure_square(m)?;
    let residual = hermitian_residual(m);
    if residual > Tolerances::DEFAULT.scaled(m) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(n)
}

pub(crate) fn ensure_unitary(u: &ComplexMatrix) -> Result<usize> {
    let n = ensure_square(u)?;
    let residual = unitarity_residual(u);
    if residual > Tolerances::DEFAULT.scaled(u) {
        return Err(Error::NotUnitary { residual });
    }
    Ok(n)
}

/// `(M + M^dagger) / 2`.
pub(crate) fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition `H = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column `k` belongs to `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn vector(&self, k: usize) -> ComplexVector {
        self.vectors.column(k).into_owned()
    }

    /// `V diag(f(values)) V^dagger`.
    pub fn map<F: Fn(f64) -> Complex64>(&self, f: F) -> ComplexMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let factor = f(lambda);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= factor);
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| Complex64::new(l, 0.0))
    }

    /// `exp(-i H t / hbar)`.
    pub fn propagator(&self, t: f64, hbar: f64) -> ComplexMatrix {
        self.map(|l| Complex64::from_polar(1.0, -l * t / hbar))
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
///
/// Eigenvectors of (numerically) degenerate eigenvalues are replaced by a
/// canonical orthonormal basis of their eigenspace, obtained by pivoted
/// Gram-Schmidt on the projected standard basis. Every eigenvector is phase
/// fixed with [`gauge_fix`].
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = ensure_hermitian(h)?;
    let scale = frobenius(h).max(1.0);
    let sym = hermitian_part(h);
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, 10_000 * n)
        .ok_or(Error::ConvergenceFailure { dim: n })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }

    let gap = Tolerances::DEFAULT.spectral * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= gap {
            end += 1;
        }
        canonicalize_cluster(&mut vectors, start, end);
        start = end;
    }

    Ok(HermitianEigen { values, vectors })
}

fn canonicalize_cluster(vectors: &mut ComplexMatrix, start: usize, end: usize) {
    let m = end - start;
    if m == 1 {
        let mut v = vectors.column(start).into_owned();
        gauge_fix(&mut v);
        vectors.set_column(start, &v);
        return;
    }
    let block = vectors.columns(start, m).into_owned();
    let projector = &block * block.adjoint();
    let basis = pivoted_gram_schmidt(&projector, Vec::new(), m);
    for (k, v) in basis.into_iter().enumerate() {
        vectors.set_column(start + k, &v);
    }
}

/// Extends `basis` to `count` orthonormal vectors drawn from the columns of
/// `candidates`, always taking the candidate with the largest residual norm
/// (lowest column index on ties). New vectors are gauge fixed.
pub(crate) fn pivoted_gram_schmidt(
    candidates: &ComplexMatrix,
    mut basis: Vec<ComplexVector>,
    count: usize,
) -> Vec<ComplexVector> {
    let mut residuals: Vec<ComplexVector> = candidates
        .column_iter()
        .map(|c| {
            let mut r = c.into_owned();
            for q in &basis {
                let coeff = q.dotc(&r);
                r.axpy(-coeff, q, ONE);
            }
            r
        })
        .collect();

    while basis.len() < count {
        let mut best = 0;
        let mut best_norm = -1.0;
        for (j, r) in residuals.iter().enumerate() {
            let norm = r.norm();
            if norm > best_norm {
                best = j;
                best_norm = norm;
            }
        }
        if best_norm <= 0.0 {
            break;
        }
        let mut q = residuals[best].unscale(best_norm);
        // second pass keeps orthogonality at the 1e-16 level
        for p in &basis {
            let coeff = p.dotc(&q);
            q.axpy(-coeff, p, ONE);
        }
        q.unscale_mut(q.norm());
        gauge_fix(&mut q);
        for r in residuals.iter_mut() {
            let coeff = q.dotc(r);
            r.axpy(-coeff, &q, ONE);
        }
        basis.push(q);
    }
    basis
}

/// `exp(-i H t / hbar)` through the Hermitian eigendecomposition.
pub fn unitary_exp(h: &ComplexMatrix, t: f64, hbar: f64) -> Result<ComplexMatrix> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "hbar must be positive, got {hbar}"
        )));
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "time must be finite, got {t}"
        )));
    }
    Ok(herm_eig(h)?.propagator(t, hbar))
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;

    pub fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn mat(n: usize, entries: &[Complex64]) -> ComplexMatrix {
        ComplexMatrix::from_row_slice(n, n, entries)
    }

    pub fn real_diag(d: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
            d.len(),
            d.iter().map(|&x| c(x, 0.0)),
        ))
    }

    pub fn sigma_x() -> ComplexMatrix {
        mat(2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn sigma_y() -> ComplexMatrix {
        mat(2, &[ZERO, -I, I, ZERO])
    }

    pub fn sigma_z() -> ComplexMatrix {
        real_diag(&[1.0, -1.0])
    }
}
