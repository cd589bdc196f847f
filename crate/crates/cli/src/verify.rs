//! Seeded randomized verification of the library invariants.
//!
//! Every check draws trial `k` from its own stream
//! `seeded_rng(seed, (check_id << 32) | k)`, so a check's result depends only
//! on `(seed, trials, n_max)` and not on which other checks ran.

use std::f64::consts::{FRAC_PI_2, PI};

use brachistochrone::evolution::{
    fs_speed_profile, geodesic_defect, propagate, propagate_density, sample_trajectory,
    subspace_leakage, uniform_grid,
};
use brachistochrone::lie_flag::{
    ad_conjugate, bracket, coset_orbit, is_equigeodesic_structural, is_equigeodesic_variational,
    killing_inner, reductive_split,
};
use brachistochrone::numerics::{frobenius, herm_eig, outer, unitarity_residual, unitary_exp};
use brachistochrone::quantum_states::{
    energy_uncertainty, energy_uncertainty_max, energy_uncertainty_mixed, fs_distance, quasi_pure,
    quasi_pure_transport,
};
use brachistochrone::random::{
    log_uniform, random_equigeodesic, random_hermitian, random_state, random_su, random_unitary,
    seeded_rng,
};
use brachistochrone::synthesis::{
    adapted_blocks, equigeodesic_vector_of, first_arrival_time, first_arrival_time_density,
    is_optimal_speed, optimal_family_sample, optimal_hamiltonian, qsl_time,
};
use brachistochrone::{
    BlockStructure, ComplexMatrix, DensityMatrix, PureState, QuasiPureSpec, Result, SuVector,
    Units, VerdictKind,
};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Algebra,
    Synthesis,
    Evolution,
    All,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    pub n_max: usize,
}

impl VerifyConfig {
    pub fn new(trials: usize, seed: u64, n_max: usize) -> Self {
        Self {
            trials,
            seed,
            n_max: n_max.max(3),
        }
    }

    fn rng(&self, check: u32, trial: usize) -> ChaCha8Rng {
        seeded_rng(self.seed, (u64::from(check) << 32) | trial as u64)
    }

    /// Dimension for a trial, cycling through `lo..=min(hi, n_max)`.
    fn dim(&self, trial: usize, lo: usize, hi: usize) -> usize {
        let hi = hi.min(self.n_max).max(lo);
        lo + trial % (hi - lo + 1)
    }
}

/// Result of one property over all its trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    /// Worst value of the bounded quantity, in the units of `tolerance`.
    pub max_residual: f64,
    pub tolerance: f64,
    /// Secondary measurements, reported but not thresholded by `tolerance`.
    pub notes: Vec<(&'static str, f64)>,
    /// First failure, for diagnostics.
    pub first_failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Tracker {
    outcome: CheckOutcome,
}

impl Tracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            outcome: CheckOutcome {
                name,
                trials: 0,
                failures: 0,
                max_residual: 0.0,
                tolerance,
                notes: Vec::new(),
                first_failure: None,
            },
        }
    }

    fn trial(&mut self) {
        self.outcome.trials += 1;
    }

    /// Records `value <= tolerance`.
    fn bounded(&mut self, trial: usize, value: f64) {
        let tol = self.outcome.tolerance;
        self.outcome.max_residual = self.outcome.max_residual.max(value);
        if value.is_nan() || value > tol {
            self.fail(trial, format!("residual {value:e} > {tol:e}"));
        }
    }

    /// Records a condition with its own threshold.
    fn require(&mut self, trial: usize, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.fail(trial, what());
        }
    }

    fn note_min(&mut self, key: &'static str, value: f64) {
        self.note(key, value, f64::min);
    }

    fn note_max(&mut self, key: &'static str, value: f64) {
        self.note(key, value, f64::max);
    }

    fn note(&mut self, key: &'static str, value: f64, pick: fn(f64, f64) -> f64) {
        match self.outcome.notes.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => *v = pick(*v, value),
            None => self.outcome.notes.push((key, value)),
        }
    }

    fn error(&mut self, trial: usize, e: brachistochrone::Error) {
        self.fail(trial, format!("error: {e}"));
    }

    fn fail(&mut self, trial: usize, message: String) {
        self.outcome.failures += 1;
        if self.outcome.first_failure.is_none() {
            self.outcome.first_failure = Some(format!("trial {trial}: {message}"));
        }
    }

    /// Runs `body` for every trial; library errors count as failures.
    fn run(
        mut self,
        trials: usize,
        mut body: impl FnMut(&mut Self, usize) -> Result<()>,
    ) -> CheckOutcome {
        for k in 0..trials {
            self.trial();
            if let Err(e) = body(&mut self, k) {
                self.error(k, e);
            }
        }
        self.outcome
    }
}

const UNIT: Units = Units { hbar: 1.0 };

fn scaled(m: ComplexMatrix, s: f64) -> ComplexMatrix {
    m * Complex64::new(s, 0.0)
}

fn block_diagonal_residual(u: &ComplexMatrix) -> f64 {
    (1..u.nrows())
        .map(|k| u[(0, k)].norm().max(u[(k, 0)].norm()))
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------- algebra

pub fn check_eig_round_trip(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("eig_round_trip", 1e-10).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(1, k);
        let n = cfg.dim(k, 1, 8);
        let h = random_hermitian(n, log_uniform(1e-2, 1e2, &mut rng), &mut rng);
        let eig = herm_eig(&h)?;
        t.bounded(
            k,
            frobenius(&(eig.reconstruct() - &h)) / frobenius(&h).max(1.0),
        );
        Ok(())
    })
}

pub fn check_exp_unitarity(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("exp_unitarity", 1e-10).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(2, k);
        let n = cfg.dim(k, 1, 8);
        let h = random_hermitian(n, 1.0, &mut rng);
        let h = scaled(
            h.clone(),
            rng.random_range(0.0..=100.0) / frobenius(&h).max(1e-300),
        );
        let time = rng.random_range(-1e3..=1e3);
        t.bounded(k, unitarity_residual(&unitary_exp(&h, time, 1.0)?));
        Ok(())
    })
}

pub fn check_exp_group_law(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("exp_group_law", 1e-9).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(3, k);
        let n = cfg.dim(k, 1, 8);
        let h = random_hermitian(n, 1.0, &mut rng);
        let (s, r) = (
            rng.random_range(-10.0..=10.0),
            rng.random_range(-10.0..=10.0),
        );
        let lhs = unitary_exp(&h, s, 1.0)? * unitary_exp(&h, r, 1.0)?;
        t.bounded(k, frobenius(&(lhs - unitary_exp(&h, s + r, 1.0)?)));
        Ok(())
    })
}

pub fn check_killing_ad_invariance(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("killing_ad_invariance", 1e-8).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(4, k);
        let n = cfg.dim(k, 2, 8);
        let x = SuVector::new(random_su(n, 1.0, &mut rng))?;
        let y = SuVector::new(random_su(n, 1.0, &mut rng))?;
        let u = random_unitary(n, &mut rng);
        let diff =
            killing_inner(&ad_conjugate(&u, &x)?, &ad_conjugate(&u, &y)?)? - killing_inner(&x, &y)?;
        t.bounded(
            k,
            diff.abs() / (1.0 + frobenius(x.matrix()) * frobenius(y.matrix())),
        );
        Ok(())
    })
}

/// Structural and variational tests on one constructed-true and one generic
/// vector per trial, blocks `(1, n - 1)`, `n <= 6`.
pub fn check_criterion_equivalence(cfg: &VerifyConfig, metric_samples: usize) -> CheckOutcome {
    let mut tracker = Tracker::new("criterion_equivalence", 1e-9);
    for k in 0..cfg.trials {
        let mut rng = cfg.rng(5, k);
        let n = cfg.dim(k, 2, 6);
        let blocks = BlockStructure::pure_state(n).expect("n >= 2");
        let truthy = random_equigeodesic(n, 1.0, &mut rng);
        let generic =
            SuVector::new(random_su(n, 1.0, &mut rng)).expect("generator output is in su(n)");
        for (x, expected) in [(truthy, true), (generic, false)] {
            tracker.trial();
            let seed = rng.random();
            let verdicts = is_equigeodesic_structural(&x, &blocks).and_then(|s| {
                Ok((
                    s,
                    is_equigeodesic_variational(&x, &blocks, metric_samples, seed)?,
                ))
            });
            let (s, v) = match verdicts {
                Ok(pair) => pair,
                Err(e) => {
                    tracker.error(k, e);
                    continue;
                }
            };
            tracker.require(k, s.holds == v.holds, || {
                format!(
                    "structural {} vs variational {} at n = {n}",
                    s.holds, v.holds
                )
            });
            tracker.require(k, s.holds == expected, || {
                format!("expected {expected}, got {}", s.holds)
            });
            if expected {
                tracker.bounded(k, s.residual.max(v.max_residual));
            } else {
                let weakest = s.residual.min(v.max_residual);
                tracker.note_min("false_case_min_residual", weakest);
                tracker.require(k, weakest > 1e-3, || {
                    format!("false-case residual {weakest:e} <= 1e-3")
                });
            }
        }
    }
    tracker.outcome
}

pub fn check_split_idempotence(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("split_idempotence", 0.0).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(6, k);
        let n = cfg.dim(k, 2, 8);
        let blocks = BlockStructure::pure_state(n)?;
        let (_, xm) = reductive_split(&SuVector::new(random_su(n, 1.0, &mut rng))?, &blocks)?;
        let (k2, m2) = reductive_split(&xm, &blocks)?;
        t.bounded(
            k,
            frobenius(k2.matrix()) + frobenius(&(m2.matrix() - xm.matrix())),
        );
        Ok(())
    })
}

pub fn check_bracket_closure(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("bracket_closure", 1e-10).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(7, k);
        let n = cfg.dim(k, 2, 8);
        let x = SuVector::new(random_su(n, 1.0, &mut rng))?;
        let y = SuVector::new(random_su(n, 1.0, &mut rng))?;
        let z = bracket(&x, &y)?;
        let m = z.matrix();
        let skew = frobenius(&(m + m.adjoint())) / frobenius(m).max(1.0);
        t.bounded(k, skew.max(m.trace().norm()));
        Ok(())
    })
}

/// Structural-true `X` with `A != 0`: `exp(tX) exp(-tX_m)` stays in the
/// isotropy group and the orbits of the origin under `X` and `X_m` agree.
pub fn check_m_generation(cfg: &VerifyConfig, time_samples: usize) -> CheckOutcome {
    Tracker::new("m_part_generation", 1e-9).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(8, k);
        let n = cfg.dim(k, 3, 8);
        let x = random_equigeodesic(n, log_uniform(0.2, 2.0, &mut rng), &mut rng);
        let (_, xm) = reductive_split(&x, &BlockStructure::pure_state(n)?)?;
        let (_, _, a) = x.flag_blocks();
        t.require(k, frobenius(&a) > 1e-3, || "constructed A vanished".into());
        let origin = PureState::basis(n, 0)?;
        let (h, hm) = (x.to_hamiltonian(), xm.to_hamiltonian());
        for j in 0..time_samples {
            let time = 10.0 * (j as f64 + rng.random::<f64>()) / time_samples as f64;
            let group = block_diagonal_residual(
                &(coset_orbit(&x, time)? * coset_orbit(&xm, time)?.adjoint()),
            );
            t.note_max("group_block_residual", group);
            t.require(k, group <= 1e-8, || {
                format!("exp(tX)exp(-tX_m) off-block {group:e} at t = {time}")
            });
            let a = propagate(&h, &origin, time, UNIT)?.projector();
            let b = propagate(&hm, &origin, time, UNIT)?.projector();
            t.bounded(k, frobenius(&(a.matrix() - b.matrix())));
        }
        Ok(())
    })
}

pub fn check_fs_triangle(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("fs_triangle", 1e-10).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(9, k);
        let n = cfg.dim(k, 2, 8);
        let (a, b, c) = (
            random_state(n, &mut rng),
            random_state(n, &mut rng),
            random_state(n, &mut rng),
        );
        let excess = fs_distance(&a, &c)? - fs_distance(&a, &b)? - fs_distance(&b, &c)?;
        t.bounded(k, excess.max(0.0));
        Ok(())
    })
}

pub fn check_fs_unitary_invariance(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("fs_unitary_invariance", 1e-10).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(10, k);
        let n = cfg.dim(k, 2, 8);
        let (a, b) = (random_state(n, &mut rng), random_state(n, &mut rng));
        let u = random_unitary(n, &mut rng);
        let ua = PureState::normalized(&u * a.amplitudes())?;
        let ub = PureState::normalized(&u * b.amplitudes())?;
        t.bounded(k, (fs_distance(&ua, &ub)? - fs_distance(&a, &b)?).abs());
        Ok(())
    })
}

pub fn check_uncertainty_bound(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("uncertainty_bound", 1e-10).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(11, k);
        let n = cfg.dim(k, 2, 8);
        let h = random_hermitian(n, 1.0, &mut rng);
        let phi = random_state(n, &mut rng);
        let (max, _) = energy_uncertainty_max(&h)?;
        t.bounded(k, (energy_uncertainty(&h, &phi)? - max).max(0.0));
        Ok(())
    })
}

// -------------------------------------------------------------- synthesis

/// `|0> -> |1>` at `E = 1`, `hbar = 1`.
pub fn check_qubit_oracle(_cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("qubit_oracle", 1e-7).run(1, |t, k| {
        let (zero, one) = (PureState::basis(2, 0)?, PureState::basis(2, 1)?);
        let h = optimal_hamiltonian(&zero, &one, 1.0)?;
        let arrival = first_arrival_time(&h, &zero, &one, 10.0, UNIT)?;
        let qsl = qsl_time(&zero, &one, &h, UNIT)?;
        let Some(arrival) = arrival else {
            t.require(k, false, || "no arrival within the horizon".into());
            return Ok(());
        };
        t.bounded(k, (arrival - FRAC_PI_2).abs());
        let qsl_err = (qsl - FRAC_PI_2).abs();
        t.note_max("qsl_error", qsl_err);
        t.require(k, qsl_err <= 1e-12, || {
            format!("qsl_time off by {qsl_err:e}")
        });
        let (de, (de_max, _)) = (energy_uncertainty(&h, &zero)?, energy_uncertainty_max(&h)?);
        let spread = (de - 1.0).abs().max((de_max - 1.0).abs());
        t.note_max("uncertainty_error", spread);
        t.require(k, spread <= 1e-12, || {
            format!("Delta E = {de}, Delta E_max = {de_max}")
        });
        Ok(())
    })
}

/// Synthesis, verdict, equigeodesic vector and arrival fidelity at the
/// speed-limit time.
pub fn check_synthesis_round_trip(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("synthesis_round_trip", 1e-9).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(12, k);
        let n = cfg.dim(k, 2, 8);
        let (phi, psi) = (random_state(n, &mut rng), random_state(n, &mut rng));
        let energy = log_uniform(0.1, 10.0, &mut rng);
        let units = Units::new(log_uniform(0.5, 2.0, &mut rng))?;
        let h = optimal_hamiltonian(&phi, &psi, energy)?;
        let verdict = is_optimal_speed(&h, &phi)?;
        t.require(k, verdict.kind == VerdictKind::Optimal, || {
            format!("verdict {}", verdict.kind)
        });
        let g = equigeodesic_vector_of(&h, &phi)?;
        let structural =
            is_equigeodesic_structural(&g.at_origin(), &BlockStructure::pure_state(n)?)?;
        t.require(k, structural.holds, || {
            format!("structural residual {:e}", structural.residual)
        });
        let time = units.hbar * fs_distance(&phi, &psi)? / energy;
        let end = propagate(&h, &phi, time, units)?;
        t.bounded(k, 1.0 - end.overlap(&psi)?.norm_sqr());
        Ok(())
    })
}

/// Optimal verdict coincides with saturation on synthesized, family and
/// generic instances.
pub fn check_saturation(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("saturation_equivalence", 1e-8).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(13, k);
        let n = cfg.dim(k, 2, 8);
        let (phi, psi) = (random_state(n, &mut rng), random_state(n, &mut rng));
        let energy = log_uniform(0.1, 10.0, &mut rng);
        let candidates = [
            optimal_hamiltonian(&phi, &psi, energy)?,
            optimal_family_sample(&phi, &psi, energy, rng.random())?,
            random_hermitian(n, 1.0, &mut rng),
        ];
        for h in candidates {
            let v = is_optimal_speed(&h, &phi)?;
            let gap = (v.delta_e - v.delta_e_max).abs() / v.delta_e_max.max(1.0);
            if v.kind == VerdictKind::Optimal {
                t.bounded(k, gap);
            }
            t.require(k, (v.kind == VerdictKind::Optimal) == v.saturates(), || {
                format!("verdict {} with relative gap {gap:e}", v.kind)
            });
        }
        Ok(())
    })
}

/// Draws `(H, phi)` with `||A x - alpha x|| > 0.1 ||x||` and `||A|| > 0.1`
/// after normalizing the traceless part of `H` to unit Frobenius norm.
pub fn violating_instance(n: usize, rng: &mut ChaCha8Rng) -> Result<(ComplexMatrix, PureState)> {
    loop {
        let mut h = random_hermitian(n, 1.0, rng);
        let shift = h.trace() / Complex64::new(n as f64, 0.0);
        for j in 0..n {
            h[(j, j)] -= shift;
        }
        let h = scaled(h.clone(), 1.0 / frobenius(&h).max(1e-300));
        let phi = random_state(n, rng);
        let b = adapted_blocks(&h, &phi)?;
        let x_norm = b.x.norm();
        let defect = (&b.a * &b.x - &b.x * Complex64::new(b.alpha, 0.0)).norm();
        if x_norm > 1e-3 && defect > 0.1 * x_norm && frobenius(&b.a) > 0.1 {
            return Ok((h, phi));
        }
    }
}

/// Strict inequality off the optimal set, the closed form of the maximum,
/// its superposition witness and the balanced two-point mixture.
pub fn check_suboptimal_gap(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("suboptimal_gap", 1e-10).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(14, k);
        let n = cfg.dim(k, 2, 8);
        let (h, phi) = violating_instance(n, &mut rng)?;
        let x_norm = adapted_blocks(&h, &phi)?.x.norm();
        let (max, witness) = energy_uncertainty_max(&h)?;
        let margin = max - x_norm;
        t.note_min("min_margin", margin);
        t.require(k, margin > 1e-12, || {
            format!("Delta E_max - ||x|| = {margin:e}")
        });

        let eig = herm_eig(&h)?;
        let closed = 0.5 * (eig.max() - eig.min());
        let (top, bottom) = (eig.vector(n - 1), eig.vector(0));
        let mixture = DensityMatrix::new(
            (outer(&top, &top) + outer(&bottom, &bottom)) * Complex64::new(0.5, 0.0),
        )?;
        t.bounded(k, (max - closed).abs());
        t.bounded(k, (energy_uncertainty(&h, &witness)? - closed).abs());
        t.bounded(k, (energy_uncertainty_mixed(&h, &mixture)? - closed).abs());
        Ok(())
    })
}

/// `H` acting on `span{phi, chi, chi2}` as `E (i|chi><phi| - i|phi><chi|) +
/// b E (|chi><chi2| + |chi2><chi|)`, plus an arbitrary block on the rest.
/// Needs `n >= 3`; the verdict is `Suboptimal` whenever `b > 0`.
pub fn constructed_suboptimal(
    n: usize,
    energy: f64,
    b: f64,
    rng: &mut ChaCha8Rng,
) -> (ComplexMatrix, PureState) {
    assert!(n >= 3);
    let frame = random_unitary(n, rng);
    let (phi, chi, chi2) = (
        frame.column(0).into_owned(),
        frame.column(1).into_owned(),
        frame.column(2).into_owned(),
    );
    let i_e = Complex64::new(0.0, energy);
    let mut h = (outer(&chi, &phi) - outer(&phi, &chi)) * i_e
        + (outer(&chi, &chi2) + outer(&chi2, &chi)) * Complex64::new(b * energy, 0.0);
    if n > 3 {
        let rest = frame.columns(3, n - 3).into_owned();
        let block = random_hermitian(n - 3, energy, rng);
        h += &rest * block * rest.adjoint();
    }
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    (h, PureState::normalized(phi).expect("unitary column"))
}

/// Speed limit along `psi = phi(t*)`: never beaten, attained exactly on the
/// Optimal verdicts, missed by more than `1e-3 T` on constructed violations.
pub fn check_qsl_inequality(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("qsl_inequality", 1e-6).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(15, k);
        let kind = k % 3;
        let n = if kind == 2 {
            cfg.dim(k / 3, 3, 8)
        } else {
            cfg.dim(k / 3, 2, 8)
        };
        let (h, phi, t_star) = match kind {
            0 => loop {
                let h = random_hermitian(n, 1.0, &mut rng);
                let phi = random_state(n, &mut rng);
                let de = energy_uncertainty(&h, &phi)?;
                if energy_uncertainty_max(&h)?.0 <= 20.0 * de {
                    break (h, phi, rng.random_range(0.1..=1.5) / de);
                }
            },
            1 => {
                let (phi, psi) = (random_state(n, &mut rng), random_state(n, &mut rng));
                let energy = log_uniform(0.2, 5.0, &mut rng);
                let h = optimal_family_sample(&phi, &psi, energy, rng.random())?;
                (h, phi, rng.random_range(0.05..=0.95) * FRAC_PI_2 / energy)
            }
            _ => {
                let energy = log_uniform(0.2, 5.0, &mut rng);
                let b = rng.random_range(1.0..=3.0);
                let (h, phi) = constructed_suboptimal(n, energy, b, &mut rng);
                (h, phi, rng.random_range(0.8..=1.4) / energy)
            }
        };
        let psi = propagate(&h, &phi, t_star, UNIT)?;
        let qsl = qsl_time(&phi, &psi, &h, UNIT)?;
        let Some(arrival) = first_arrival_time(&h, &phi, &psi, t_star * 1.01, UNIT)? else {
            t.require(k, false, || format!("no arrival before {t_star}"));
            return Ok(());
        };
        t.require(k, arrival >= qsl - 1e-7, || {
            format!("arrival {arrival} beats the bound {qsl}")
        });
        let verdict = is_optimal_speed(&h, &phi)?.kind;
        if verdict == VerdictKind::Optimal {
            t.bounded(k, (arrival - qsl).abs());
        }
        if kind == 2 {
            let ratio = (arrival - qsl) / qsl;
            t.note_min("constructed_min_gap_over_t", ratio);
            t.require(k, verdict == VerdictKind::Suboptimal, || {
                format!("constructed instance is {verdict}")
            });
            t.require(k, ratio > 1e-3, || {
                format!("gap {ratio:e} T on a constructed violation")
            });
        }
        Ok(())
    })
}

pub fn check_phase_gauge(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("phase_gauge", 1e-9).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(16, k);
        let n = cfg.dim(k, 2, 8);
        let (phi, psi) = (random_state(n, &mut rng), random_state(n, &mut rng));
        let (theta, eta) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
        let energy = log_uniform(0.2, 5.0, &mut rng);
        let a = optimal_hamiltonian(&phi, &psi, energy)?;
        let b = optimal_hamiltonian(&phi.with_phase(theta), &psi.with_phase(eta), energy)?;
        for j in 0..5 {
            let time = j as f64 * 0.7 / energy;
            let pa = propagate(&a, &phi, time, UNIT)?.projector();
            let pb = propagate(&b, &phi.with_phase(theta), time, UNIT)?.projector();
            t.bounded(k, frobenius(&(pa.matrix() - pb.matrix())));
        }
        Ok(())
    })
}

// -------------------------------------------------------------- evolution

pub fn check_flow(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("flow", 1e-10).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(17, k);
        let n = cfg.dim(k, 1, 8);
        let h = random_hermitian(n, 1.0, &mut rng);
        let phi = random_state(n, &mut rng);
        let (s, r) = (rng.random_range(0.0..=5.0), rng.random_range(0.0..=5.0));
        let stepped = propagate(&h, &propagate(&h, &phi, s, UNIT)?, r, UNIT)?;
        let direct = propagate(&h, &phi, s + r, UNIT)?;
        t.bounded(k, (stepped.amplitudes() - direct.amplitudes()).norm());
        Ok(())
    })
}

/// Norm, mean energy and energy uncertainty along a trajectory.
pub fn check_conservation(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("conservation", 1e-10).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(18, k);
        let n = cfg.dim(k, 2, 8);
        let h = random_hermitian(n, 1.0, &mut rng);
        let phi = random_state(n, &mut rng);
        let mean = |s: &PureState| s.amplitudes().dotc(&(&h * s.amplitudes())).re;
        let (m0, d0) = (mean(&phi), energy_uncertainty(&h, &phi)?);
        for j in 1..=5 {
            let s = propagate(&h, &phi, 4.0 * j as f64, UNIT)?;
            t.bounded(k, (s.amplitudes().norm() - 1.0).abs());
            t.bounded(k, (mean(&s) - m0).abs());
            t.bounded(k, (energy_uncertainty(&h, &s)? - d0).abs());
        }
        Ok(())
    })
}

/// Constant speed `Delta E / hbar`, zero geodesic defect and no leakage out
/// of `span{phi, psi}` along family members.
pub fn check_optimal_geometry(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("optimal_geometry", 1e-6).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(19, k);
        let n = cfg.dim(k, 2, 8);
        let (phi, psi) = (random_state(n, &mut rng), random_state(n, &mut rng));
        let energy = log_uniform(0.2, 5.0, &mut rng);
        let units = Units::new(log_uniform(0.5, 2.0, &mut rng))?;
        let h = optimal_family_sample(&phi, &psi, energy, rng.random())?;
        let speed = energy / units.hbar;
        // stay clear of the pi/2 fold where the distance stops growing
        let s = fs_distance(&phi, &psi)?.min(FRAC_PI_2 - 1e-2);
        let traj = sample_trajectory(&h, phi.clone(), &uniform_grid(0.0, s / speed, 200), units)?;
        for v in fs_speed_profile(&traj)? {
            t.bounded(k, (v - speed).abs());
        }
        let defect = geodesic_defect(&traj)?;
        t.bounded(k, defect.abs());
        let leak = subspace_leakage(&traj, &phi, &psi)?;
        t.note_max("max_leakage", leak);
        t.require(k, leak < 1e-10, || format!("leakage {leak:e}"));
        Ok(())
    })
}

/// Quasi-pure states follow their distinguished rays: transport by any
/// unitary mapping the rays, and equal arrival times.
pub fn check_quasi_pure_reduction(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("quasi_pure_reduction", 1e-7).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(20, k);
        let n = cfg.dim(k, 3, 6);
        let (phi, psi) = (random_state(n, &mut rng), random_state(n, &mut rng));
        let p1 = rng.random_range(0.3..=0.95);
        let p2 = (1.0 - p1) / (n - 1) as f64;
        let (rho, varrho) = (
            QuasiPureSpec::around(p1, p2, &phi)?,
            QuasiPureSpec::around(p1, p2, &psi)?,
        );

        let mut w = ComplexMatrix::zeros(n, n);
        w[(0, 0)] = Complex64::from_polar(1.0, rng.random_range(-PI..PI));
        w.view_mut((1, 1), (n - 1, n - 1))
            .copy_from(&random_unitary(n - 1, &mut rng));
        let u = psi.adapted_frame() * w * phi.adapted_frame().adjoint();
        let moved = &u * quasi_pure(&rho).matrix() * u.adjoint();
        let transport = frobenius(&(moved - quasi_pure(&varrho).matrix()));
        t.note_max("transport_residual", transport);
        t.require(
            k,
            transport <= 1e-9 && quasi_pure_transport(&rho, &varrho, &u)?,
            || format!("transport residual {transport:e}"),
        );

        let energy = log_uniform(0.2, 5.0, &mut rng);
        let h = optimal_hamiltonian(&phi, &psi, energy)?;
        let horizon = 1.5 * FRAC_PI_2 / energy;
        let pure = first_arrival_time(&h, &phi, &psi, horizon, UNIT)?;
        let mixed =
            first_arrival_time_density(&h, &quasi_pure(&rho), &quasi_pure(&varrho), horizon, UNIT)?;
        match (pure, mixed) {
            (Some(a), Some(b)) => t.bounded(k, (a - b).abs()),
            other => t.require(k, false, || format!("arrivals {other:?}")),
        }
        Ok(())
    })
}

/// Quasi-pure matrices are states, and unitary evolution keeps the spectrum.
pub fn check_quasi_pure_density(cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("quasi_pure_density", 1e-10).run(cfg.trials, |t, k| {
        let mut rng = cfg.rng(21, k);
        let n = cfg.dim(k, 2, 8);
        let p1 = rng.random_range(0.0..=1.0);
        let p2 = (1.0 - p1) / (n - 1) as f64;
        if (p1 - p2).abs() < 1e-6 {
            return Ok(());
        }
        let rho = quasi_pure(&QuasiPureSpec::around(p1, p2, &random_state(n, &mut rng))?);
        let spectrum = rho.spectrum()?;
        t.bounded(k, (rho.matrix().trace().re - 1.0).abs());
        t.bounded(k, (-spectrum[0]).max(0.0));
        let later = propagate_density(&random_hermitian(n, 1.0, &mut rng), &rho, 5.0, UNIT)?;
        for (a, b) in spectrum.iter().zip(later.spectrum()?) {
            t.bounded(k, (a - b).abs());
        }
        Ok(())
    })
}

/// Deliberately wrong expectation: `sigma_x + sigma_z` at `|0>` is claimed
/// optimal. Must fail.
pub fn check_negative_control(_cfg: &VerifyConfig) -> CheckOutcome {
    Tracker::new("negative_control", 1e-9).run(1, |t, k| {
        let h = ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(-1.0, 0.0),
            ],
        );
        let verdict = is_optimal_speed(&h, &PureState::basis(2, 0)?)?;
        t.bounded(k, verdict.residual);
        Ok(())
    })
}

type CheckFn = fn(&VerifyConfig) -> CheckOutcome;

fn registry() -> Vec<(Suite, CheckFn)> {
    vec![
        (Suite::Algebra, check_eig_round_trip),
        (Suite::Algebra, check_exp_unitarity),
        (Suite::Algebra, check_exp_group_law),
        (Suite::Algebra, check_killing_ad_invariance),
        (Suite::Algebra, |c| check_criterion_equivalence(c, 16)),
        (Suite::Algebra, check_split_idempotence),
        (Suite::Algebra, check_bracket_closure),
        (Suite::Algebra, |c| check_m_generation(c, 10)),
        (Suite::Algebra, check_fs_triangle),
        (Suite::Algebra, check_fs_unitary_invariance),
        (Suite::Algebra, check_uncertainty_bound),
        (Suite::Synthesis, check_qubit_oracle),
        (Suite::Synthesis, check_synthesis_round_trip),
        (Suite::Synthesis, check_saturation),
        (Suite::Synthesis, check_suboptimal_gap),
        (Suite::Synthesis, check_qsl_inequality),
        (Suite::Synthesis, check_phase_gauge),
        (Suite::Evolution, check_flow),
        (Suite::Evolution, check_conservation),
        (Suite::Evolution, check_optimal_geometry),
        (Suite::Evolution, check_quasi_pure_reduction),
        (Suite::Evolution, check_quasi_pure_density),
    ]
}

/// Runs every check of `suite`, plus the negative control if requested.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig, negative_control: bool) -> Vec<CheckOutcome> {
    let mut out: Vec<CheckOutcome> = registry()
        .into_iter()
        .filter(|(s, _)| suite.includes(*s))
        .map(|(_, check)| check(cfg))
        .collect();
    if negative_control {
        out.push(check_negative_control(cfg));
    }
    out
}
