//! Unitary propagation of pure and density states, and trajectory
//! diagnostics: Fubini-Study speed, geodesic defect, two-plane confinement.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    ensure_dim, herm_eig, hermitian_part, ComplexMatrix, ComplexVector, HermitianEigen, ONE,
};
use crate::quantum_states::{fs_distance, DensityMatrix, PureState, Units};

/// Diagnostics refuse windows whose distance from the initial state comes
/// within this margin of the `pi/2` fold of `arccos |<phi|psi>|`.
pub const FOLD_MARGIN: f64 = 1e-3;

/// Cached spectral data of `exp(-iHt/hbar)` for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Propagator {
    eig: HermitianEigen,
    hbar: f64,
}

impl Propagator {
    pub fn new(h: &ComplexMatrix, units: Units) -> Result<Self> {
        Ok(Self {
            eig: herm_eig(h)?,
            hbar: units.hbar,
        })
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eig
    }

    pub fn unitary(&self, t: f64) -> ComplexMatrix {
        self.eig.propagator(t, self.hbar)
    }

    /// Coordinates of `v` in the eigenbasis.
    pub fn coefficients(&self, v: &ComplexVector) -> ComplexVector {
        self.eig.vectors.ad_mul(v)
    }

    /// `exp(-iHt/hbar) v` from precomputed [`Self::coefficients`].
    pub fn evolve_coefficients(&self, coeffs: &ComplexVector, t: f64) -> ComplexVector {
        let phased = ComplexVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(&self.eig.values)
                .map(|(c, &l)| c * Complex64::from_polar(1.0, -l * t / self.hbar)),
        );
        &self.eig.vectors * phased
    }

    pub fn apply(&self, phi: &PureState, t: f64) -> Result<PureState> {
        ensure_dim(self.dim(), phi.dim())?;
        let c = self.coefficients(phi.amplitudes());
        Ok(PureState::from_unit_unchecked(
            self.evolve_coefficients(&c, t),
        ))
    }

    pub fn apply_density(&self, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        ensure_dim(self.dim(), rho.dim())?;
        let u = self.unitary(t);
        let moved = &u * rho.matrix() * u.adjoint();
        Ok(DensityMatrix::from_matrix_unchecked(hermitian_part(&moved)))
    }
}

/// `exp(-iHt/hbar) |phi>`.
pub fn propagate(h: &ComplexMatrix, phi: &PureState, t: f64, units: Units) -> Result<PureState> {
    Propagator::new(h, units)?.apply(phi, t)
}

/// `U rho U^dagger` with `U = exp(-iHt/hbar)`.
pub fn propagate_density(
    h: &ComplexMatrix,
    rho: &DensityMatrix,
    t: f64,
    units: Units,
) -> Result<DensityMatrix> {
    Propagator::new(h, units)?.apply_density(rho, t)
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Pure(PureState),
    Density(DensityMatrix),
}

impl From<PureState> for InitialState {
    fn from(s: PureState) -> Self {
        Self::Pure(s)
    }
}

impl From<DensityMatrix> for InitialState {
    fn from(s: DensityMatrix) -> Self {
        Self::Density(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryStates {
    Pure(Vec<PureState>),
    Density(Vec<DensityMatrix>),
}

impl TrajectoryStates {
    pub fn len(&self) -> usize {
        match self {
            Self::Pure(v) => v.len(),
            Self::Density(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// States sampled on an ascending time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: TrajectoryStates,
    pub hamiltonian: ComplexMatrix,
    pub units: Units,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn pure_states(&self) -> Result<&[PureState]> {
        match &self.states {
            TrajectoryStates::Pure(v) => Ok(v),
            TrajectoryStates::Density(_) => Err(Error::InvalidArgument(
                "operation needs a pure-state trajectory".into(),
            )),
        }
    }
}

/// `n + 1` equally spaced points from `t0` to `t1`.
pub fn uniform_grid(t0: f64, t1: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![t0];
    }
    let h = (t1 - t0) / steps as f64;
    (0..=steps)
        .map(|k| if k == steps { t1 } else { t0 + h * k as f64 })
        .collect()
}

pub fn sample_trajectory(
    h: &ComplexMatrix,
    initial: impl Into<InitialState>,
    grid: &[f64],
    units: Units,
) -> Result<Trajectory> {
    if grid
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::InvalidArgument(
            "time grid must be strictly ascending".into(),
        ));
    }
    let prop = Propagator::new(h, units)?;
    let states = match initial.into() {
        InitialState::Pure(phi) => {
            ensure_dim(prop.dim(), phi.dim())?;
            let c = prop.coefficients(phi.amplitudes());
            TrajectoryStates::Pure(
                grid.iter()
                    .map(|&t| PureState::from_unit_unchecked(prop.evolve_coefficients(&c, t)))
                    .collect(),
            )
        }
        InitialState::Density(rho) => TrajectoryStates::Density(
            grid.iter()
                .map(|&t| prop.apply_density(&rho, t))
                .collect::<Result<_>>()?,
        ),
    };
    Ok(Trajectory {
        times: grid.to_vec(),
        states,
        hamiltonian: h.clone(),
        units,
    })
}

fn distances_from_start(states: &[PureState]) -> Result<Vec<f64>> {
    let d = states
        .iter()
        .map(|s| fs_distance(&states[0], s))
        .collect::<Result<Vec<_>>>()?;
    if let Some(&worst) = d.iter().find(|&&x| x > FRAC_PI_2 - FOLD_MARGIN) {
        return Err(Error::FoldExceeded { distance: worst });
    }
    Ok(d)
}

/// Finite-difference estimate of `d/dt s(phi(0), phi(t))` on a uniform grid:
/// central differences inside, one-sided at the ends.
pub fn fs_speed_profile(traj: &Trajectory) -> Result<Vec<f64>> {
    let states = traj.pure_states()?;
    let n = states.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "speed profile needs at least two samples".into(),
        ));
    }
    let h = (traj.times[n - 1] - traj.times[0]) / (n - 1) as f64;
    let uniform = traj
        .times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1e-300));
    if !uniform {
        return Err(Error::InvalidArgument(
            "speed profile needs a uniform grid".into(),
        ));
    }
    let d = distances_from_start(states)?;
    let profile = (0..n)
        .map(|k| match k {
            0 => (d[1] - d[0]) / h,
            k if k == n - 1 => (d[k] - d[k - 1]) / h,
            k => (d[k + 1] - d[k - 1]) / (2.0 * h),
        })
        .collect();
    Ok(profile)
}

/// Path length along consecutive samples minus the endpoint distance.
///
/// Zero (to grid resolution) exactly when the samples lie on a minimizing
/// Fubini-Study geodesic.
pub fn geodesic_defect(traj: &Trajectory) -> Result<f64> {
    let states = traj.pure_states()?;
    if states.len() <= 1 {
        return Ok(0.0);
    }
    let d = distances_from_start(states)?;
    let mut length = 0.0;
    for w in states.windows(2) {
        length += fs_distance(&w[0], &w[1])?;
    }
    Ok(length - d[d.len() - 1])
}

/// Largest norm of a sample's component outside `span{phi, psi}`.
pub fn subspace_leakage(traj: &Trajectory, phi: &PureState, psi: &PureState) -> Result<f64> {
    let states = traj.pure_states()?;
    ensure_dim(phi.dim(), psi.dim())?;
    let mut plane = vec![phi.amplitudes().clone()];
    let ov = phi.overlap(psi)?;
    let mut perp = psi.amplitudes().clone();
    perp.axpy(-ov, phi.amplitudes(), ONE);
    let norm = perp.norm();
    if norm > 1e-12 {
        plane.push(perp.unscale(norm));
    }
    let mut worst: f64 = 0.0;
    for s in states {
        ensure_dim(phi.dim(), s.dim())?;
        let mut rest = s.amplitudes().clone();
        for q in &plane {
            let c = q.dotc(&rest);
            rest.axpy(-c, q, ONE);
        }
        worst = worst.max(rest.norm());
    }
    Ok(worst.clamp(0.0, 1.0))
}
