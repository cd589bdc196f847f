//! The su(n) layer for flag manifolds `SU(n)/S(U(n_1) x ... x U(n_t))`.
//!
//! Inner product on su(n) is minus the Killing form, `(X, Y) = -2n Tr(XY)`.
//! For a block structure `(n_1, ..., n_t)` the isotropy algebra `k` holds the
//! block-diagonal part of a matrix and its orthogonal complement `m` the
//! off-diagonal blocks. Invariant metrics are given by positive multipliers
//! `mu_ij` on the off-diagonal blocks.
//!
//! Two equigeodesic tests live here:
//! - [`is_equigeodesic_structural`]: `A x = i alpha x` for blocks `(1, n-1)`,
//!   vanishing block products `X_ij X_jk` otherwise;
//! - [`is_equigeodesic_variational`]: `[X, Lambda X_m]_m = 0` against randomly
//!   sampled metric operators `Lambda`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{
    commutator, ensure_dim, ensure_square, ensure_unitary, frobenius, unitary_exp, ComplexMatrix,
    ComplexVector, Tolerances, I, ZERO,
};
use crate::random::{log_uniform, seeded_rng};

/// Relative tolerance for both equigeodesic criteria.
pub const CRITERION_TOL: f64 = 1e-9;

/// Default number of metric operators sampled by the variational test.
pub const DEFAULT_METRIC_SAMPLES: usize = 16;

/// Range of the log-uniform metric multipliers.
pub const MU_RANGE: (f64, f64) = (0.1, 10.0);

/// A partition `(n_1, ..., n_t)` of `n` with `t >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockStructure {
    parts: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockStructure {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.len() < 2 {
            return Err(Error::InvalidBlocks(format!(
                "need at least two blocks, got {}",
                parts.len()
            )));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidBlocks("block sizes must be positive".into()));
        }
        let mut offsets = Vec::with_capacity(parts.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &p in &parts {
            acc += p;
            offsets.push(acc);
        }
        Ok(Self { parts, offsets })
    }

    /// The pure-state flag `(1, n - 1)`.
    pub fn pure_state(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidBlocks(format!(
                "pure-state flag needs n >= 2, got {n}"
            )));
        }
        Self::new(vec![1, n - 1])
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn n(&self) -> usize {
        self.offsets[self.parts.len()]
    }

    pub fn range(&self, block: usize) -> Range<usize> {
        self.offsets[block]..self.offsets[block + 1]
    }

    /// Block index owning row/column `index`.
    pub fn block_of(&self, index: usize) -> usize {
        self.offsets[1..]
            .iter()
            .position(|&end| index < end)
            .unwrap_or(self.parts.len() - 1)
    }

    pub fn is_pure_state_flag(&self) -> bool {
        self.parts.len() == 2 && self.parts[0] == 1
    }

    /// All pairs `(i, j)` with `j < i`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(|i| (0..i).map(move |j| (i, j)))
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        ensure_dim(self.n(), n)
    }
}

impl fmt::Display for BlockStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for BlockStructure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidBlocks(format!("bad block size {p:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }
}

/// A traceless skew-Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SuVector(ComplexMatrix);

impl SuVector {
    /// Validates skew-Hermiticity and tracelessness; inputs are never repaired.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        ensure_square(&matrix)?;
        let tol = Tolerances::DEFAULT.structural * frobenius(&matrix).max(1.0);
        let residual = (&matrix + matrix.adjoint()).norm();
        if residual > tol {
            return Err(Error::NotSkewHermitian { residual });
        }
        let trace = matrix.trace().norm();
        if trace > tol {
            return Err(Error::NotTraceless { trace });
        }
        Ok(Self(matrix))
    }

    pub fn zero(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n, n))
    }

    /// Assembles `[[i alpha, -x^dagger], [x, A]]`.
    ///
    /// `A` must be skew-Hermitian with `Tr(A) = -i alpha`.
    pub fn from_flag_blocks(alpha: f64, x: &ComplexVector, a: &ComplexMatrix) -> Result<Self> {
        let m = x.len();
        if a.nrows() != m || a.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: a.nrows(),
            });
        }
        let n = m + 1;
        let mut out = ComplexMatrix::zeros(n, n);
        out[(0, 0)] = Complex64::new(0.0, alpha);
        for k in 0..m {
            out[(k + 1, 0)] = x[k];
            out[(0, k + 1)] = -x[k].conj();
        }
        out.view_mut((1, 1), (m, m)).copy_from(a);
        Self::new(out)
    }

    /// Skips validation; callers guarantee the structure.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self(matrix)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// `(alpha, x, A)` with respect to the `(1, n - 1)` flag.
    pub fn flag_blocks(&self) -> (f64, ComplexVector, ComplexMatrix) {
        let n = self.dim();
        let alpha = self.0[(0, 0)].im;
        let x = self.0.view((1, 0), (n - 1, 1)).column(0).into_owned();
        let a = self.0.view((1, 1), (n - 1, n - 1)).into_owned();
        (alpha, x, a)
    }

    /// Hermitian generator `H = iX` of the same one-parameter group.
    pub fn to_hamiltonian(&self) -> ComplexMatrix {
        &self.0 * I
    }
}

/// `(X, Y) = -B(X, Y) = -2n Tr(XY)`.
pub fn killing_inner(x: &SuVector, y: &SuVector) -> Result<f64> {
    let n = x.dim();
    ensure_dim(n, y.dim())?;
    let mut tr = ZERO;
    for i in 0..n {
        for j in 0..n {
            tr += x.0[(i, j)] * y.0[(j, i)];
        }
    }
    debug_assert!(
        tr.im.abs() < 1e-10 * (1.0 + frobenius(&x.0) * frobenius(&y.0)),
        "Tr(XY) not real: {tr}"
    );
    Ok(-2.0 * n as f64 * tr.re)
}

pub fn killing_norm(x: &SuVector) -> f64 {
    // (X, X) = 2n ||X||_F^2 for skew-Hermitian X
    (2.0 * x.dim() as f64).sqrt() * frobenius(&x.0)
}

fn diagonal_mask(m: &ComplexMatrix, blocks: &BlockStructure) -> ComplexMatrix {
    let n = m.nrows();
    ComplexMatrix::from_fn(n, n, |i, j| {
        if blocks.block_of(i) == blocks.block_of(j) {
            m[(i, j)]
        } else {
            ZERO
        }
    })
}

/// Splits `X = X_k + X_m` into block-diagonal and off-diagonal parts.
pub fn reductive_split(x: &SuVector, blocks: &BlockStructure) -> Result<(SuVector, SuVector)> {
    blocks.check_dim(x.dim())?;
    let xk = diagonal_mask(&x.0, blocks);
    let xm = &x.0 - &xk;
    Ok((SuVector(xk), SuVector(xm)))
}

fn project_m(m: &ComplexMatrix, blocks: &BlockStructure) -> ComplexMatrix {
    m - diagonal_mask(m, blocks)
}

/// Invariant metric on the flag manifold given by multipliers `mu_ij > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricOperator {
    blocks: BlockStructure,
    mu: BTreeMap<(usize, usize), f64>,
}

impl MetricOperator {
    /// `mu` is keyed by zero-based `(i, j)` with `j < i`; every pair must be
    /// present.
    pub fn new(blocks: BlockStructure, mu: BTreeMap<(usize, usize), f64>) -> Result<Self> {
        for (i, j) in blocks.pairs() {
            match mu.get(&(i, j)) {
                Some(&v) if v > 0.0 && v.is_finite() => {}
                Some(&v) => {
                    return Err(Error::InvalidMetric(format!(
                        "mu[{i},{j}] = {v} is not positive"
                    )))
                }
                None => return Err(Error::InvalidMetric(format!("missing mu[{i},{j}]"))),
            }
        }
        if mu.len() != blocks.pairs().count() {
            return Err(Error::InvalidMetric(
                "multiplier for a non-existent block pair".into(),
            ));
        }
        Ok(Self { blocks, mu })
    }

    pub fn uniform(blocks: BlockStructure, mu: f64) -> Result<Self> {
        let map = blocks.pairs().map(|p| (p, mu)).collect();
        Self::new(blocks, map)
    }

    /// Multipliers drawn log-uniformly from [`MU_RANGE`].
    pub fn random<R: Rng + ?Sized>(blocks: BlockStructure, rng: &mut R) -> Self {
        let mu = blocks
            .pairs()
            .map(|p| (p, log_uniform(MU_RANGE.0, MU_RANGE.1, rng)))
            .collect();
        Self { blocks, mu }
    }

    pub fn blocks(&self) -> &BlockStructure {
        &self.blocks
    }

    /// Symmetric in its arguments; `None` on the diagonal.
    pub fn mu(&self, i: usize, j: usize) -> Option<f64> {
        let key = if i > j { (i, j) } else { (j, i) };
        self.mu.get(&key).copied()
    }

    /// Scales the blocks `X_ij` and `X_ji` of an element of `m` by `mu_ij`.
    pub fn apply(&self, xm: &SuVector) -> Result<SuVector> {
        self.blocks.check_dim(xm.dim())?;
        let diag = diagonal_mask(&xm.0, &self.blocks);
        if diag.norm() > Tolerances::DEFAULT.structural * frobenius(&xm.0).max(1.0) {
            return Err(Error::StructureMismatch(format!(
                "metric operators act on m; diagonal blocks have norm {:.3e}",
                diag.norm()
            )));
        }
        let n = xm.dim();
        let out = ComplexMatrix::from_fn(n, n, |r, c| {
            match self.mu(self.blocks.block_of(r), self.blocks.block_of(c)) {
                Some(mu) => xm.0[(r, c)] * mu,
                None => ZERO,
            }
        });
        Ok(SuVector(out))
    }
}

/// Lie bracket `XY - YX`.
pub fn bracket(x: &SuVector, y: &SuVector) -> Result<SuVector> {
    ensure_dim(x.dim(), y.dim())?;
    Ok(SuVector(commutator(&x.0, &y.0)))
}

/// Which form of the structural test produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructuralBasis {
    /// `A x = i alpha x`, blocks `(1, n - 1)`.
    EigenRelation,
    /// `X_ij X_jk = 0` for distinct `i, j, k`, three or more blocks.
    BlockProducts,
    /// Two blocks `(k, n - k)` with `k > 1`: no distinct triple exists, the
    /// product test is empty. No structural characterization is claimed.
    Vacuous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuralVerdict {
    pub holds: bool,
    pub residual: f64,
    pub basis: StructuralBasis,
}

pub fn is_equigeodesic_structural(
    x: &SuVector,
    blocks: &BlockStructure,
) -> Result<StructuralVerdict> {
    blocks.check_dim(x.dim())?;
    if blocks.is_pure_state_flag() {
        let (alpha, v, a) = x.flag_blocks();
        let defect = &a * &v - &v * Complex64::new(0.0, alpha);
        let residual = defect.norm() / (frobenius(&a) * v.norm()).max(1.0);
        return Ok(StructuralVerdict {
            holds: residual <= CRITERION_TOL,
            residual,
            basis: StructuralBasis::EigenRelation,
        });
    }
    if blocks.len() == 2 {
        return Ok(StructuralVerdict {
            holds: true,
            residual: 0.0,
            basis: StructuralBasis::Vacuous,
        });
    }

    let t = blocks.len();
    let block = |i: usize, j: usize| {
        let (ri, rj) = (blocks.range(i), blocks.range(j));
        x.0.view((ri.start, rj.start), (ri.len(), rj.len()))
            .into_owned()
    };
    let mut worst: f64 = 0.0;
    for i in 0..t {
        for j in 0..t {
            for k in 0..t {
                if i == j || j == k || i == k {
                    continue;
                }
                worst = worst.max((block(i, j) * block(j, k)).norm());
            }
        }
    }
    let (_, xm) = reductive_split(x, blocks)?;
    let residual = worst / frobenius(&xm.0).powi(2).max(1.0);
    Ok(StructuralVerdict {
        holds: residual <= CRITERION_TOL,
        residual,
        basis: StructuralBasis::BlockProducts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalVerdict {
    pub holds: bool,
    /// Max over sampled metrics of `||[X, Lambda X_m]_m|| / max(1, ||X||^2)`,
    /// norms taken in the Killing inner product.
    pub max_residual: f64,
}

/// Residual of `[X, Lambda X_m]_m` for one metric operator.
pub fn variational_residual(x: &SuVector, metric: &MetricOperator) -> Result<f64> {
    let blocks = metric.blocks();
    let (_, xm) = reductive_split(x, blocks)?;
    let lambda_xm = metric.apply(&xm)?;
    let br = bracket(x, &lambda_xm)?;
    let proj = SuVector(project_m(&br.0, blocks));
    Ok(killing_norm(&proj) / killing_norm(x).powi(2).max(1.0))
}

/// Tests `[X, Lambda X_m]_m = 0` for `samples` random metric operators.
pub fn is_equigeodesic_variational(
    x: &SuVector,
    blocks: &BlockStructure,
    samples: usize,
    seed: u64,
) -> Result<VariationalVerdict> {
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "need at least one metric sample".into(),
        ));
    }
    blocks.check_dim(x.dim())?;
    let mut rng = seeded_rng(seed, 0);
    let mut max_residual: f64 = 0.0;
    for _ in 0..samples {
        let metric = MetricOperator::random(blocks.clone(), &mut rng);
        max_residual = max_residual.max(variational_residual(x, &metric)?);
    }
    Ok(VariationalVerdict {
        holds: max_residual <= CRITERION_TOL,
        max_residual,
    })
}

/// `Ad(U) X = U X U^dagger`.
pub fn ad_conjugate(u: &ComplexMatrix, x: &SuVector) -> Result<SuVector> {
    let n = ensure_unitary(u)?;
    ensure_dim(n, x.dim())?;
    let m = u * &x.0 * u.adjoint();
    Ok(SuVector((&m - m.adjoint()).scale(0.5)))
}

/// `exp(tX)`, the homogeneous curve through the origin lifted to SU(n).
pub fn coset_orbit(x: &SuVector, t: f64) -> Result<ComplexMatrix> {
    // exp(tX) = exp(-i (iX) t)
    unitary_exp(&x.to_hamiltonian(), t, 1.0)
}
