//! Optimal-speed Hamiltonians between pure states.
//!
//! Writing a Hamiltonian in a frame whose first vector is the initial state
//! `phi`,
//!
//! ```text
//!     H = [[alpha, x^dagger],
//!          [x,     A       ]]
//! ```
//!
//! the energy uncertainty at `phi` is `||x||`. The evolution of `phi` runs
//! along a Fubini-Study geodesic at constant speed `||x|| / hbar`, reaching
//! any state on it in exactly the speed-limit time `hbar s / ||x||`, iff
//! `A x = alpha x` (after removing the trace of `H`). Equivalently `-iH` is an
//! equigeodesic vector of `SU(n)/S(U(1) x U(n-1))` based at the frame.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::evolution::Propagator;
use crate::lie_flag::{SuVector, CRITERION_TOL};
use crate::numerics::{
    ensure_dim, ensure_hermitian, frobenius, hermitian_part, outer, ComplexMatrix, ComplexVector,
    Tolerances, I, ONE,
};
use crate::quantum_states::{
    chordal_residual, energy_uncertainty_max, fs_distance, DensityMatrix, PureState, Units,
};
use crate::random::{random_unitary, seeded_rng};

/// Relative tolerance on `|Delta E_phi - Delta E_max|` for saturation.
pub const SATURATION_TOL: f64 = 1e-8;

/// Arrival is declared when the infidelity drops to this value.
pub const ARRIVAL_INFIDELITY: f64 = 1e-9;

/// Scan step in units of `hbar / Delta E_max`.
pub const SCAN_STEP: f64 = 0.01;

/// Sampled minima above this distance are not refined.
const REFINE_WINDOW: f64 = 0.05;

/// Trace-norm threshold for density-matrix arrival.
pub const DENSITY_ARRIVAL_TOL: f64 = 1e-8;

/// `H` in the frame adapted to a state.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianBlocks {
    pub alpha: f64,
    pub x: ComplexVector,
    pub a: ComplexMatrix,
    /// `U` with `U e_1 = phi`; `H = U [[alpha, x^dagger], [x, A]] U^dagger`.
    pub frame: ComplexMatrix,
}

impl HamiltonianBlocks {
    pub fn reassemble(&self) -> ComplexMatrix {
        let m = self.x.len();
        let n = m + 1;
        let mut local = ComplexMatrix::zeros(n, n);
        local[(0, 0)] = Complex64::new(self.alpha, 0.0);
        for k in 0..m {
            local[(k + 1, 0)] = self.x[k];
            local[(0, k + 1)] = self.x[k].conj();
        }
        local.view_mut((1, 1), (m, m)).copy_from(&self.a);
        &self.frame * local * self.frame.adjoint()
    }
}

pub fn adapted_blocks(h: &ComplexMatrix, phi: &PureState) -> Result<HamiltonianBlocks> {
    let n = ensure_hermitian(h)?;
    ensure_dim(n, phi.dim())?;
    let frame = phi.adapted_frame();
    let local = hermitian_part(&(frame.adjoint() * h * &frame));
    Ok(HamiltonianBlocks {
        alpha: local[(0, 0)].re,
        x: local.view((1, 0), (n - 1, 1)).column(0).into_owned(),
        a: local.view((1, 1), (n - 1, n - 1)).into_owned(),
        frame,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    /// `phi` is an eigenvector of `H`; the ray never moves.
    Stationary,
    Optimal,
    Suboptimal,
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Stationary => "Stationary",
            Self::Optimal => "Optimal",
            Self::Suboptimal => "Suboptimal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalityVerdict {
    pub kind: VerdictKind,
    /// `||A x - alpha x|| / max(1, ||A|| ||x||)` on the traceless part of `H`.
    pub residual: f64,
    pub delta_e: f64,
    pub delta_e_max: f64,
}

impl OptimalityVerdict {
    /// `Delta E_phi(H) = Delta E_max(H)` within [`SATURATION_TOL`].
    ///
    /// Saturation implies an `Optimal` verdict. The converse needs the
    /// spectrum of `A` off `x` to lie within `alpha +- ||x||`.
    pub fn saturates(&self) -> bool {
        (self.delta_e - self.delta_e_max).abs() <= SATURATION_TOL * self.delta_e_max.max(1.0)
    }
}

fn traceless(h: &ComplexMatrix) -> ComplexMatrix {
    let n = h.nrows();
    let shift = h.trace() / Complex64::new(n as f64, 0.0);
    let mut out = h.clone();
    for k in 0..n {
        out[(k, k)] -= shift;
    }
    hermitian_part(&out)
}

pub fn is_optimal_speed(h: &ComplexMatrix, phi: &PureState) -> Result<OptimalityVerdict> {
    ensure_hermitian(h)?;
    let h0 = traceless(h);
    let blocks = adapted_blocks(&h0, phi)?;
    let (delta_e_max, _) = energy_uncertainty_max(h)?;
    let delta_e = blocks.x.norm();
    let scale = frobenius(&h0).max(1.0);

    if delta_e <= Tolerances::DEFAULT.structural * scale {
        return Ok(OptimalityVerdict {
            kind: VerdictKind::Stationary,
            residual: 0.0,
            delta_e,
            delta_e_max,
        });
    }
    let a_norm = frobenius(&blocks.a);
    let mut defect = &blocks.a * &blocks.x;
    defect.axpy(Complex64::new(-blocks.alpha, 0.0), &blocks.x, ONE);
    let residual = defect.norm() / (a_norm * delta_e).max(1.0);
    let optimal = a_norm <= CRITERION_TOL * scale || residual <= CRITERION_TOL;
    Ok(OptimalityVerdict {
        kind: if optimal {
            VerdictKind::Optimal
        } else {
            VerdictKind::Suboptimal
        },
        residual,
        delta_e,
        delta_e_max,
    })
}

/// Canonical direction of the geodesic from `phi` towards `psi`.
///
/// Returns `(s, phi_g, chi)` with `phi_g` the gauge-fixed representative of
/// `phi` and `chi` the unit vector orthogonal to it such that the ray of
/// `psi` is `cos(s) phi_g + sin(s) chi`. `None` for coincident rays.
fn geodesic_direction(
    phi: &PureState,
    psi: &PureState,
) -> Result<Option<(f64, ComplexVector, ComplexVector)>> {
    ensure_dim(phi.dim(), psi.dim())?;
    let phi_g = phi.gauge_fixed().into_amplitudes();
    let ov = phi_g.dotc(psi.amplitudes());
    let s = fs_distance(phi, psi)?;
    let target = if ov.norm() > Tolerances::DEFAULT.structural {
        // rephase psi so that <phi|psi> >= 0
        psi.amplitudes() * (ov.conj() / ov.norm())
    } else {
        psi.gauge_fixed().into_amplitudes()
    };
    let mut perp = target;
    perp.axpy(-phi_g.dotc(&perp), &phi_g, ONE);
    let norm = perp.norm();
    if norm <= Tolerances::DEFAULT.structural {
        return Ok(None);
    }
    Ok(Some((s, phi_g, perp.unscale(norm))))
}

/// `i E (|chi><phi| - |phi><chi|)`: drives `phi` along the Fubini-Study
/// geodesic to `psi` with `Delta E_phi = E`, arriving at `T = hbar s / E`.
///
/// Coincident rays give the zero matrix.
pub fn optimal_hamiltonian(phi: &PureState, psi: &PureState, energy: f64) -> Result<ComplexMatrix> {
    check_energy(energy)?;
    let n = phi.dim();
    match geodesic_direction(phi, psi)? {
        None => Ok(ComplexMatrix::zeros(n, n)),
        Some((_, p, chi)) => Ok(core_hamiltonian(&p, &chi, energy)),
    }
}

fn core_hamiltonian(phi: &ComplexVector, chi: &ComplexVector, energy: f64) -> ComplexMatrix {
    (outer(chi, phi) - outer(phi, chi)) * (I * energy)
}

fn check_energy(energy: f64) -> Result<()> {
    if energy > 0.0 && energy.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "energy must be positive, got {energy}"
        )))
    }
}

/// Family member `H_core + alpha (|phi><phi| + |chi><chi|) + Q B Q`, where
/// `Q` projects off `span{phi, chi}`.
///
/// Every member satisfies `A x = alpha x` and traces the same ray
/// trajectory as [`optimal_hamiltonian`].
pub fn optimal_family_member(
    phi: &PureState,
    psi: &PureState,
    energy: f64,
    alpha: f64,
    complement: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    check_energy(energy)?;
    let n = ensure_hermitian(complement)?;
    ensure_dim(phi.dim(), n)?;
    let Some((_, p, chi)) = geodesic_direction(phi, psi)? else {
        return Ok(ComplexMatrix::zeros(n, n));
    };
    let plane = outer(&p, &p) + outer(&chi, &chi);
    let q = ComplexMatrix::identity(n, n) - &plane;
    let h = core_hamiltonian(&p, &chi, energy)
        + plane * Complex64::new(alpha, 0.0)
        + &q * complement * &q;
    Ok(hermitian_part(&h))
}

/// Random family member with `alpha` uniform on `[-E, E]` and a complement
/// block whose spectrum lies in `[alpha - E, alpha + E]`, so the sample also
/// saturates `Delta E_phi = Delta E_max = E`.
pub fn optimal_family_sample(
    phi: &PureState,
    psi: &PureState,
    energy: f64,
    seed: u64,
) -> Result<ComplexMatrix> {
    check_energy(energy)?;
    let n = phi.dim();
    let mut rng = seeded_rng(seed, 0);
    let alpha = energy * rng.random_range(-1.0..=1.0);
    let w = random_unitary(n, &mut rng);
    let mut scaled = w.clone();
    for k in 0..n {
        let lambda = alpha + energy * rng.random_range(-1.0..=1.0);
        scaled.column_mut(k).iter_mut().for_each(|z| *z *= lambda);
    }
    let complement = hermitian_part(&(scaled * w.adjoint()));
    optimal_family_member(phi, psi, energy, alpha, &complement)
}

/// Speed-limit time `hbar s / Delta E_phi(H)`.
pub fn qsl_time(phi: &PureState, psi: &PureState, h: &ComplexMatrix, units: Units) -> Result<f64> {
    let s = fs_distance(phi, psi)?;
    let delta_e = crate::quantum_states::energy_uncertainty(h, phi)?;
    if delta_e <= Tolerances::DEFAULT.structural * frobenius(h).max(1.0) {
        return Err(Error::StationaryState { delta_e });
    }
    Ok(units.hbar * s / delta_e)
}

/// First time in `(0, horizon]` at which `exp(-iHt/hbar) phi` reaches the ray
/// of `psi` (infidelity at most [`ARRIVAL_INFIDELITY`]).
///
/// Scans at `hbar * 0.01 / Delta E_max` and refines every discrete minimum of
/// `sin s(phi(t), psi)` by golden-section search, in time order.
pub fn first_arrival_time(
    h: &ComplexMatrix,
    phi: &PureState,
    psi: &PureState,
    horizon: f64,
    units: Units,
) -> Result<Option<f64>> {
    ensure_dim(phi.dim(), psi.dim())?;
    let prop = Propagator::new(h, units)?;
    ensure_dim(prop.dim(), phi.dim())?;
    let coeffs = prop.coefficients(phi.amplitudes());
    let target = psi.amplitudes();
    let distance = |t: f64| chordal_residual(&prop.evolve_coefficients(&coeffs, t), target);
    let accept = |v: f64| v * v <= ARRIVAL_INFIDELITY;
    search_first_minimum(&prop, horizon, units, distance, accept)
}

/// Density-matrix analogue of [`first_arrival_time`] with arrival declared
/// at trace distance [`DENSITY_ARRIVAL_TOL`].
pub fn first_arrival_time_density(
    h: &ComplexMatrix,
    rho: &DensityMatrix,
    target: &DensityMatrix,
    horizon: f64,
    units: Units,
) -> Result<Option<f64>> {
    ensure_dim(rho.dim(), target.dim())?;
    let prop = Propagator::new(h, units)?;
    ensure_dim(prop.dim(), rho.dim())?;
    let distance = |t: f64| {
        prop.apply_density(rho, t)
            .and_then(|r| r.trace_distance(target))
            .unwrap_or(f64::INFINITY)
    };
    let accept = |v: f64| v <= DENSITY_ARRIVAL_TOL;
    search_first_minimum(&prop, horizon, units, distance, accept)
}

fn search_first_minimum<F, A>(
    prop: &Propagator,
    horizon: f64,
    units: Units,
    f: F,
    accept: A,
) -> Result<Option<f64>>
where
    F: Fn(f64) -> f64,
    A: Fn(f64) -> bool,
{
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let eig = prop.eigen();
    let spread = 0.5 * (eig.max() - eig.min());
    if spread
        <= Tolerances::DEFAULT.spectral * eig.values.iter().map(|l| l.abs()).fold(1.0, f64::max)
    {
        // H is a multiple of the identity; nothing moves
        return Ok(None);
    }
    let step = units.hbar * SCAN_STEP / spread;
    let count = (horizon / step).ceil() as usize;
    let times: Vec<f64> = (0..=count)
        .map(|k| (k as f64 * step).min(horizon))
        .collect();
    let values: Vec<f64> = times.iter().map(|&t| f(t)).collect();

    let last = times.len() - 1;
    for k in 0..=last {
        let left = if k == 0 { values[k] } else { values[k - 1] };
        let right = if k == last { values[k] } else { values[k + 1] };
        // both distances move by at most SCAN_STEP per step, so a sampled
        // minimum far above zero cannot hide an arrival
        let is_min = values[k] <= left && values[k] <= right;
        if !is_min || values[k] > REFINE_WINDOW {
            continue;
        }
        let lo = times[k.saturating_sub(1)];
        let hi = times[(k + 1).min(last)];
        let (t, v) = golden_section(&f, lo, hi);
        if t > 0.0 && accept(v) {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Minimizes a unimodal function on `[lo, hi]`.
fn golden_section<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let candidates = [(lo, f(lo)), (c, fc), (d, fd), (hi, f(hi))];
    candidates
        .into_iter()
        .fold((lo, f64::INFINITY), |best, cand| {
            if cand.1 < best.1 {
                cand
            } else {
                best
            }
        })
}

/// Equigeodesic generator of an optimal Hamiltonian: `X = -i H_0` with `H_0`
/// the traceless part of `H`, and the base point `U` (`U e_1 = phi`).
#[derive(Debug, Clone, PartialEq)]
pub struct EquigeodesicGenerator {
    pub vector: SuVector,
    pub base_point: ComplexMatrix,
}

impl EquigeodesicGenerator {
    /// `Ad(U^dagger) X`, the generator translated back to the origin.
    pub fn at_origin(&self) -> SuVector {
        let m = self.base_point.adjoint() * self.vector.matrix() * &self.base_point;
        SuVector::from_matrix_unchecked((&m - m.adjoint()).scale(0.5))
    }
}

pub fn equigeodesic_vector_of(h: &ComplexMatrix, phi: &PureState) -> Result<EquigeodesicGenerator> {
    let verdict = is_optimal_speed(h, phi)?;
    if verdict.kind != VerdictKind::Optimal {
        return Err(Error::NotOptimal {
            residual: verdict.residual,
        });
    }
    let x = traceless(h) * (-I);
    let vector = SuVector::from_matrix_unchecked((&x - x.adjoint()).scale(0.5));
    Ok(EquigeodesicGenerator {
        vector,
        base_point: phi.adapted_frame(),
    })
}
