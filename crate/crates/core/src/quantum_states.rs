//! Pure states, density matrices and the quasi-pure family, with the
//! Fubini-Study distance and energy-uncertainty functionals.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    ensure_dim, ensure_hermitian, ensure_unitary, frobenius, gauge_fix, herm_eig, hermitian_part,
    outer, pivoted_gram_schmidt, ComplexMatrix, ComplexVector, ONE,
};

const NORM_TOL: f64 = 1e-12;
const DENSITY_TOL: f64 = 1e-12;
const RANK_ONE_TOL: f64 = 1e-10;
const ORTHONORMAL_TOL: f64 = 1e-10;
const TRANSPORT_TOL: f64 = 1e-9;

/// Physical units; only `hbar` enters the dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    pub hbar: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self { hbar: 1.0 }
    }
}

impl Units {
    pub fn new(hbar: f64) -> Result<Self> {
        if hbar > 0.0 && hbar.is_finite() {
            Ok(Self { hbar })
        } else {
            Err(Error::InvalidArgument(format!(
                "hbar must be positive, got {hbar}"
            )))
        }
    }
}

/// Unit vector representing a ray.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
}

impl PureState {
    /// Rejects vectors whose norm differs from one by more than `1e-12`.
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("empty state vector".into()));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn from_slice(amplitudes: &[Complex64]) -> Result<Self> {
        Self::new(ComplexVector::from_row_slice(amplitudes))
    }

    pub(crate) fn from_unit_unchecked(amplitudes: ComplexVector) -> Self {
        Self { amplitudes }
    }

    /// Computational basis vector `|k>` of dimension `n`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidArgument(format!(
                "basis index {k} out of range for n = {n}"
            )));
        }
        let mut v = ComplexVector::zeros(n);
        v[k] = ONE;
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> ComplexVector {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &PureState) -> Result<Complex64> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn with_phase(&self, theta: f64) -> Self {
        Self {
            amplitudes: &self.amplitudes * Complex64::from_polar(1.0, theta),
        }
    }

    /// Same ray, first significant amplitude real and positive.
    pub fn gauge_fixed(&self) -> Self {
        let mut v = self.amplitudes.clone();
        gauge_fix(&mut v);
        Self { amplitudes: v }
    }

    /// Unitary `U` in SU(n) (for `n >= 2`) whose first column is this state.
    ///
    /// The remaining columns come from pivoted Gram-Schmidt on the standard
    /// basis, so the frame depends only on the amplitudes.
    pub fn adapted_frame(&self) -> ComplexMatrix {
        let n = self.dim();
        let basis = pivoted_gram_schmidt(
            &ComplexMatrix::identity(n, n),
            vec![self.amplitudes.clone()],
            n,
        );
        let mut u = DMatrix::from_columns(&basis);
        if n >= 2 {
            let det = u.determinant();
            let fix = det.conj() / det.norm();
            u.column_mut(n - 1).iter_mut().for_each(|z| *z *= fix);
        }
        u
    }

    /// `|self><self|`.
    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix(outer(&self.amplitudes, &self.amplitudes))
    }
}

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let n = ensure_hermitian(&matrix).map_err(|e| Error::NotDensity(e.to_string()))?;
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOL * n as f64
            || trace.im.abs() > DENSITY_TOL * n as f64
        {
            return Err(Error::NotDensity(format!("trace {trace} differs from 1")));
        }
        let eig = herm_eig(&matrix)?;
        if eig.min() < -DENSITY_TOL {
            return Err(Error::NotDensity(format!(
                "negative eigenvalue {}",
                eig.min()
            )));
        }
        Ok(Self(matrix))
    }

    /// Maximally mixed state `Id / n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self(ComplexMatrix::identity(n, n).unscale(n as f64))
    }

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

    /// Ascending spectrum.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(herm_eig(&self.0)?.values)
    }

    /// Trace norm `||self - other||_1`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        ensure_dim(self.dim(), other.dim())?;
        let diff = hermitian_part(&(&self.0 - &other.0));
        Ok(herm_eig(&diff)?.values.iter().map(|l| l.abs()).sum())
    }
}

/// Data of a quasi-pure state `p1 |phi_1><phi_1| + p2 sum_{i>=2} |phi_i><phi_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiPureSpec {
    p1: f64,
    p2: f64,
    basis: Vec<PureState>,
}

impl QuasiPureSpec {
    pub fn new(p1: f64, p2: f64, basis: Vec<PureState>) -> Result<Self> {
        let n = basis.len();
        if n < 2 {
            return Err(Error::InvalidSpec(format!(
                "need n >= 2 basis states, got {n}"
            )));
        }
        if let Some(bad) = basis.iter().find(|b| b.dim() != n) {
            return Err(Error::InvalidSpec(format!(
                "basis state of dimension {} in a {n}-element basis",
                bad.dim()
            )));
        }
        if !(0.0..=1.0).contains(&p1) || p2 < 0.0 || !p2.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "weights out of range: p1 = {p1}, p2 = {p2}"
            )));
        }
        if (p1 - p2).abs() <= DENSITY_TOL {
            return Err(Error::InvalidSpec("p1 must differ from p2".into()));
        }
        let total = p1 + (n as f64 - 1.0) * p2;
        if (total - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidSpec(format!(
                "p1 + (n - 1) p2 = {total}, expected 1"
            )));
        }
        for i in 0..n {
            for j in 0..i {
                let ov = basis[i].amplitudes.dotc(&basis[j].amplitudes).norm();
                if ov > ORTHONORMAL_TOL {
                    return Err(Error::InvalidSpec(format!(
                        "basis states {j} and {i} overlap by {ov:.3e}"
                    )));
                }
            }
        }
        Ok(Self { p1, p2, basis })
    }

    /// Completes `distinguished` with its adapted frame.
    pub fn around(p1: f64, p2: f64, distinguished: &PureState) -> Result<Self> {
        let frame = distinguished.adapted_frame();
        let mut basis = vec![distinguished.clone()];
        basis.extend(
            frame
                .column_iter()
                .skip(1)
                .map(|c| PureState::from_unit_unchecked(c.into_owned())),
        );
        Self::new(p1, p2, basis)
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn basis(&self) -> &[PureState] {
        &self.basis
    }

    pub fn distinguished(&self) -> &PureState {
        &self.basis[0]
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Fubini-Study distance `s = arccos |<phi|psi>|` in `[0, pi/2]`.
///
/// Evaluated as `atan2(||psi - <phi|psi> phi||, |<phi|psi>|)`, which equals
/// the arccos form for unit vectors and keeps full relative accuracy near
/// both ends of the range.
pub fn fs_distance(phi: &PureState, psi: &PureState) -> Result<f64> {
    let ov = phi.overlap(psi)?;
    let mut perp = psi.amplitudes.clone();
    perp.axpy(-ov, &phi.amplitudes, ONE);
    Ok(perp.norm().atan2(ov.norm().min(1.0)))
}

/// `sin` of the Fubini-Study distance: `||psi - <phi|psi> phi||`.
pub(crate) fn chordal_residual(v: &ComplexVector, target: &ComplexVector) -> f64 {
    let ov = target.dotc(v);
    let mut perp = v.clone();
    perp.axpy(-ov, target, ONE);
    perp.norm()
}

/// `Delta E_phi(H) = sqrt(<H^2> - <H>^2)`, evaluated as `||(H - <H>) phi||`.
pub fn energy_uncertainty(h: &ComplexMatrix, phi: &PureState) -> Result<f64> {
    let n = ensure_hermitian(h)?;
    ensure_dim(n, phi.dim())?;
    let v = h * &phi.amplitudes;
    let mean = phi.amplitudes.dotc(&v).re;
    let mut centered = v;
    centered.axpy(Complex64::new(-mean, 0.0), &phi.amplitudes, ONE);
    Ok(centered.norm())
}

/// `sqrt(Tr(rho H^2) - Tr(rho H)^2)` for a mixed state.
pub fn energy_uncertainty_mixed(h: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64> {
    let n = ensure_hermitian(h)?;
    ensure_dim(n, rho.dim())?;
    let rh = &rho.0 * h;
    let mean = rh.trace().re;
    let second = (&rh * h).trace().re;
    Ok((second - mean * mean).max(0.0).sqrt())
}

/// Largest energy uncertainty over pure states: half the spectral spread,
/// attained by the balanced superposition of extreme eigenvectors.
pub fn energy_uncertainty_max(h: &ComplexMatrix) -> Result<(f64, PureState)> {
    let eig = herm_eig(h)?;
    let n = eig.dim();
    let value = 0.5 * (eig.max() - eig.min());
    if n == 1 {
        return Ok((0.0, PureState::from_unit_unchecked(eig.vector(0))));
    }
    let witness = (eig.vector(n - 1) + eig.vector(0)).unscale(std::f64::consts::SQRT_2);
    Ok((value, PureState::from_unit_unchecked(witness)))
}

pub fn projector(phi: &PureState) -> DensityMatrix {
    phi.projector()
}

/// Inverse of [`projector`] up to phase: the dominant eigenvector, gauge fixed.
pub fn state_from_projector(rho: &DensityMatrix) -> Result<PureState> {
    let eig = herm_eig(&rho.0)?;
    let n = eig.dim();
    if n >= 2 {
        let second = eig.values[n - 2];
        if second.abs() > RANK_ONE_TOL {
            return Err(Error::NotRankOne { second });
        }
    }
    let mut v = eig.vector(n - 1);
    gauge_fix(&mut v);
    Ok(PureState::from_unit_unchecked(v))
}

pub fn quasi_pure(spec: &QuasiPureSpec) -> DensityMatrix {
    let n = spec.dim();
    let mut rho = ComplexMatrix::zeros(n, n);
    for (k, b) in spec.basis.iter().enumerate() {
        let w = if k == 0 { spec.p1 } else { spec.p2 };
        rho += outer(&b.amplitudes, &b.amplitudes) * Complex64::new(w, 0.0);
    }
    DensityMatrix(hermitian_part(&rho))
}

/// Checks `U rho U^dagger = varrho` for a unitary carrying the distinguished
/// ray of `rho` onto that of `varrho`.
pub fn quasi_pure_transport(
    rho: &QuasiPureSpec,
    varrho: &QuasiPureSpec,
    u: &ComplexMatrix,
) -> Result<bool> {
    let n = ensure_unitary(u)?;
    ensure_dim(rho.dim(), varrho.dim())?;
    ensure_dim(rho.dim(), n)?;
    if (rho.p1 - varrho.p1).abs() > DENSITY_TOL || (rho.p2 - varrho.p2).abs() > DENSITY_TOL {
        return Err(Error::SpectraMismatch {
            p1: rho.p1,
            p2: rho.p2,
            q1: varrho.p1,
            q2: varrho.p2,
        });
    }
    let image = PureState::from_unit_unchecked(u * &rho.distinguished().amplitudes);
    let distance = fs_distance(&image, varrho.distinguished())?;
    if distance > TRANSPORT_TOL {
        return Err(Error::DistinguishedStateNotMapped { distance });
    }
    let moved = u * quasi_pure(rho).matrix() * u.adjoint();
    Ok(frobenius(&(moved - quasi_pure(varrho).matrix())) <= TRANSPORT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::test_util::*;
    use crate::numerics::{identity, unitarity_residual, I, ZERO};
    use crate::random::{random_hermitian, random_state, random_unitary, seeded_rng};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn ket(v: &[Complex64]) -> PureState {
        PureState::normalized(ComplexVector::from_row_slice(v)).unwrap()
    }

    #[test]
    fn state_construction() {
        assert!(matches!(
            PureState::from_slice(&[ONE, ONE]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(PureState::normalized(ComplexVector::zeros(3)).is_err());
        assert!(PureState::basis(2, 2).is_err());
        assert!(Units::new(0.0).is_err());
        assert_eq!(Units::default().hbar, 1.0);
    }

    #[test]
    fn fs_distance_examples() {
        let zero = PureState::basis(2, 0).unwrap();
        let one = PureState::basis(2, 1).unwrap();
        let plus = ket(&[ONE, ONE]);
        assert_eq!(fs_distance(&zero, &zero).unwrap(), 0.0);
        assert!((fs_distance(&zero, &one).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((fs_distance(&zero, &plus).unwrap() - FRAC_PI_4).abs() < 1e-15);
        // agrees with the arccos form
        assert!((fs_distance(&zero, &plus).unwrap() - FRAC_1_SQRT_2.acos()).abs() < 1e-15);
        assert!(fs_distance(&zero, &PureState::basis(3, 0).unwrap()).is_err());
    }

    #[test]
    fn fs_distance_symmetry_and_phase() {
        let mut rng = seeded_rng(1, 0);
        for n in 2..6 {
            let a = random_state(n, &mut rng);
            let b = random_state(n, &mut rng);
            let d = fs_distance(&a, &b).unwrap();
            assert!((d - fs_distance(&b, &a).unwrap()).abs() < 1e-14);
            assert!(
                (d - fs_distance(&a.with_phase(1.3), &b.with_phase(-0.4)).unwrap()).abs() < 1e-14
            );
            assert!((0.0..=FRAC_PI_2).contains(&d));
        }
    }

    #[test]
    fn energy_uncertainty_examples() {
        let zero = PureState::basis(2, 0).unwrap();
        assert_eq!(energy_uncertainty(&sigma_z(), &zero).unwrap(), 0.0);
        assert!((energy_uncertainty(&sigma_x(), &zero).unwrap() - 1.0).abs() < 1e-15);

        // off-diagonal coupling block: Delta E at e_1 equals ||x||
        let x = [c(1.0, 2.0), c(-0.5, 0.3), c(0.0, -1.0)];
        let mut h = ComplexMatrix::zeros(4, 4);
        for (k, &z) in x.iter().enumerate() {
            h[(k + 1, 0)] = z;
            h[(0, k + 1)] = z.conj();
        }
        let norm_x = ComplexVector::from_row_slice(&x).norm();
        let e1 = PureState::basis(4, 0).unwrap();
        assert!((energy_uncertainty(&h, &e1).unwrap() - norm_x).abs() < 1e-14);

        assert!(matches!(
            energy_uncertainty(&(sigma_x() * I), &zero),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            energy_uncertainty(&sigma_x(), &PureState::basis(3, 0).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn energy_uncertainty_max_examples() {
        let (v, w) = energy_uncertainty_max(&sigma_z()).unwrap();
        assert_eq!(v, 1.0);
        assert!(
            (w.amplitudes()
                - ComplexVector::from_row_slice(&[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]))
            .norm()
                < 1e-15
        );

        let (v, w) = energy_uncertainty_max(&real_diag(&[2.0, 0.0, -2.0])).unwrap();
        assert_eq!(v, 2.0);
        let expected =
            ComplexVector::from_row_slice(&[c(FRAC_1_SQRT_2, 0.0), ZERO, c(FRAC_1_SQRT_2, 0.0)]);
        assert!((w.amplitudes() - expected).norm() < 1e-15);

        let mut rng = seeded_rng(3, 0);
        let h0 = random_hermitian(5, 1.0, &mut rng);
        let shifted = &h0 + identity(5) * c(3.7, 0.0);
        let (a, wa) = energy_uncertainty_max(&h0).unwrap();
        let (b, _) = energy_uncertainty_max(&shifted).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((energy_uncertainty(&h0, &wa).unwrap() - a).abs() < 1e-10);
    }

    #[test]
    fn balanced_mixture_matches_superposition() {
        let mut rng = seeded_rng(4, 0);
        let h = random_hermitian(6, 1.0, &mut rng);
        let eig = herm_eig(&h).unwrap();
        let (value, witness) = energy_uncertainty_max(&h).unwrap();
        let mix = (outer(&eig.vector(0), &eig.vector(0)) + outer(&eig.vector(5), &eig.vector(5)))
            .scale(0.5);
        let mixed = energy_uncertainty_mixed(&h, &DensityMatrix::new(mix).unwrap()).unwrap();
        assert!((mixed - value).abs() < 1e-10);
        assert!((energy_uncertainty(&h, &witness).unwrap() - value).abs() < 1e-10);
    }

    #[test]
    fn projector_round_trip() {
        let zero = PureState::basis(4, 0).unwrap();
        assert_eq!(projector(&zero).matrix(), &real_diag(&[1.0, 0.0, 0.0, 0.0]));
        let mut rng = seeded_rng(5, 0);
        for n in 1..7 {
            let phi = random_state(n, &mut rng);
            let back = state_from_projector(&projector(&phi)).unwrap();
            assert!(fs_distance(&phi, &back).unwrap() <= 1e-9);
            assert!(back.amplitudes()[0].im.abs() < 1e-15 && back.amplitudes()[0].re > 0.0);
        }
        let half = DensityMatrix::maximally_mixed(2);
        assert!(matches!(
            state_from_projector(&half),
            Err(Error::NotRankOne { .. })
        ));
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(real_diag(&[0.5, 0.5])).is_ok());
        assert!(DensityMatrix::new(real_diag(&[0.6, 0.5])).is_err());
        assert!(DensityMatrix::new(real_diag(&[1.5, -0.5])).is_err());
        assert!(DensityMatrix::new(sigma_x() * I).is_err());
    }

    #[test]
    fn quasi_pure_examples() {
        let e = |n, k| PureState::basis(n, k).unwrap();
        let pure = QuasiPureSpec::new(1.0, 0.0, vec![e(2, 0), e(2, 1)]).unwrap();
        assert_eq!(quasi_pure(&pure).matrix(), &real_diag(&[1.0, 0.0]));

        let spec = QuasiPureSpec::new(0.6, 0.2, vec![e(3, 0), e(3, 1), e(3, 2)]).unwrap();
        assert!((quasi_pure(&spec).matrix() - real_diag(&[0.6, 0.2, 0.2])).norm() < 1e-15);

        let mut rng = seeded_rng(6, 0);
        let phi = random_state(5, &mut rng);
        let spec = QuasiPureSpec::around(0.1, 0.225, &phi).unwrap();
        let rho = quasi_pure(&spec);
        let spectrum = rho.spectrum().unwrap();
        assert!((spectrum[0] - 0.1).abs() < 1e-12);
        assert!(spectrum[1..].iter().all(|&l| (l - 0.225).abs() < 1e-12));
        assert!(DensityMatrix::new(rho.into_matrix()).is_ok());
    }

    #[test]
    fn quasi_pure_rejects_bad_specs() {
        let e = |n, k| PureState::basis(n, k).unwrap();
        let basis = vec![e(3, 0), e(3, 1), e(3, 2)];
        assert!(QuasiPureSpec::new(1.0 / 3.0, 1.0 / 3.0, basis.clone()).is_err());
        assert!(QuasiPureSpec::new(0.6, 0.3, basis.clone()).is_err());
        let overlapping = vec![e(3, 0), ket(&[ONE, ONE, ZERO]), e(3, 2)];
        assert!(QuasiPureSpec::new(0.6, 0.2, overlapping).is_err());
        assert!(QuasiPureSpec::new(0.6, 0.2, vec![e(2, 0), e(2, 1), e(3, 2)]).is_err());
    }

    #[test]
    fn transport_examples() {
        let spec = QuasiPureSpec::around(0.7, 0.15, &PureState::basis(3, 0).unwrap()).unwrap();
        assert!(quasi_pure_transport(&spec, &spec, &identity(3)).unwrap());

        let mut rng = seeded_rng(7, 0);
        let psi = random_state(3, &mut rng);
        // target basis rotated arbitrarily in the complement of psi
        let frame = psi.adapted_frame();
        let mut inner = identity(3);
        inner
            .view_mut((1, 1), (2, 2))
            .copy_from(&random_unitary(2, &mut rng));
        let rotated = &frame * inner;
        let target_basis: Vec<PureState> = rotated
            .column_iter()
            .map(|c| PureState::from_unit_unchecked(c.into_owned()))
            .collect();
        let target = QuasiPureSpec::new(0.7, 0.15, target_basis).unwrap();
        // any unitary with U e_1 = psi (up to phase)
        let mut w = identity(3);
        w[(0, 0)] = Complex64::from_polar(1.0, 0.8);
        w.view_mut((1, 1), (2, 2))
            .copy_from(&random_unitary(2, &mut rng));
        let u = &frame * w;
        assert!(unitarity_residual(&u) < 1e-12);
        assert!(quasi_pure_transport(&spec, &target, &u).unwrap());

        let other = QuasiPureSpec::around(0.6, 0.2, &psi).unwrap();
        assert!(matches!(
            quasi_pure_transport(&spec, &other, &u),
            Err(Error::SpectraMismatch { .. })
        ));
        assert!(matches!(
            quasi_pure_transport(&spec, &target, &identity(3)),
            Err(Error::DistinguishedStateNotMapped { .. })
        ));
    }

    #[test]
    fn adapted_frame_is_special_unitary() {
        let mut rng = seeded_rng(8, 0);
        for n in 1..8 {
            let phi = random_state(n, &mut rng);
            let u = phi.adapted_frame();
            assert!(unitarity_residual(&u) < 1e-13);
            assert!((u.column(0) - phi.amplitudes()).norm() < 1e-15);
            if n >= 2 {
                assert!((u.determinant() - ONE).norm() < 1e-12);
            }
        }
    }
}
