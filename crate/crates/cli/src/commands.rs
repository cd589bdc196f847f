use std::path::{Path, PathBuf};
use std::time::Instant;

use brachistochrone::evolution::{sample_trajectory, uniform_grid, TrajectoryStates};
use brachistochrone::lie_flag::{is_equigeodesic_structural, is_equigeodesic_variational};
use brachistochrone::numerics::frobenius;
use brachistochrone::quantum_states::{
    energy_uncertainty, energy_uncertainty_max, energy_uncertainty_mixed, fs_distance,
};
use brachistochrone::synthesis::{is_optimal_speed, optimal_family_sample, optimal_hamiltonian};
use brachistochrone::{
    BlockStructure, ComplexMatrix, DensityMatrix, PureState, SuVector, Units, VerdictKind,
};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::json::{
    parse_json, parse_state_input, read_text, write_json, JsonComplexMatrix, MatrixKind, StateFile,
    StateInput, TrajectoryFile,
};
use crate::report::{digest_inputs, Outputs, RunReport};
use crate::verify::{run_suite, Suite, VerifyConfig};

#[derive(Debug, Parser)]
#[command(
    name = "brach",
    version,
    about = "Optimal-speed Hamiltonian synthesis and verification"
)]
pub struct Cli {
    /// Emit a JSON run report instead of key=value lines.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a Hamiltonian that carries one state to another at the speed limit.
    Synthesize {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(long)]
        energy: f64,
        /// Draw a random member of the optimal family instead of the minimal one.
        #[arg(long)]
        family_seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify a Hamiltonian at a state as Optimal, Suboptimal or Stationary.
    Check {
        #[arg(long)]
        ham: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
    /// Test whether an su(n) vector is equigeodesic for a flag manifold.
    Equigeodesic {
        #[arg(long)]
        vector: PathBuf,
        /// Block sizes, e.g. "1,2".
        #[arg(long)]
        blocks: String,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample the trajectory of a state on a uniform time grid.
    Evolve {
        #[arg(long)]
        ham: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        t0: f64,
        #[arg(long, allow_negative_numbers = true)]
        t1: f64,
        #[arg(long)]
        steps: usize,
        /// Evolve the state as a density matrix.
        #[arg(long)]
        density: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the seeded property suites.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        /// Add a deliberately wrong check that must fail.
        #[arg(long)]
        negative_control: bool,
    },
}

/// What a command produced before rendering.
#[derive(Debug, Clone)]
pub struct Execution {
    pub exit_code: i32,
    pub outputs: Outputs,
    pub seed: Option<u64>,
    pub inputs_digest: String,
    pub error: Option<String>,
}

struct Success {
    exit_code: i32,
    outputs: Outputs,
}

/// Input files read so far, for the digest.
#[derive(Default)]
struct Inputs(Vec<Vec<u8>>);

impl Inputs {
    fn read(&mut self, path: &Path) -> CliResult<(String, String)> {
        let text = read_text(path)?;
        self.0.push(text.clone().into_bytes());
        Ok((text, path.display().to_string()))
    }

    fn digest(&self) -> String {
        digest_inputs(self.0.iter().map(Vec::as_slice))
    }
}

pub fn execute(command: &Command) -> Execution {
    let mut inputs = Inputs::default();
    let seed = match command {
        Command::Synthesize { family_seed, .. } => *family_seed,
        Command::Equigeodesic { seed, .. } | Command::Verify { seed, .. } => Some(*seed),
        _ => None,
    };
    let result = match command {
        Command::Synthesize {
            from,
            to,
            energy,
            family_seed,
            out,
        } => synthesize(&mut inputs, from, to, *energy, *family_seed, out),
        Command::Check { ham, state } => check(&mut inputs, ham, state),
        Command::Equigeodesic {
            vector,
            blocks,
            samples,
            seed,
        } => equigeodesic(&mut inputs, vector, blocks, *samples, *seed),
        Command::Evolve {
            ham,
            state,
            t0,
            t1,
            steps,
            density,
            out,
        } => evolve(&mut inputs, ham, state, *t0, *t1, *steps, *density, out),
        Command::Verify {
            suite,
            trials,
            seed,
            n_max,
            negative_control,
        } => verify(*suite, *trials, *seed, *n_max, *negative_control),
    };
    match result {
        Ok(s) => Execution {
            exit_code: s.exit_code,
            outputs: s.outputs,
            seed,
            inputs_digest: inputs.digest(),
            error: None,
        },
        Err(e) => {
            let mut outputs = Outputs::new();
            outputs.push("error", e.to_string());
            Execution {
                exit_code: e.exit_code(),
                outputs,
                seed,
                inputs_digest: inputs.digest(),
                error: Some(e.to_string()),
            }
        }
    }
}

/// Parses `argv`, runs the command and renders stdout. Returns the exit code
/// and the text to print; argument errors come back as clap's message with
/// exit code 2.
pub fn run<I, T>(argv: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                (0, text, String::new())
            } else {
                (code, String::new(), text)
            };
        }
    };
    let start = Instant::now();
    let exec = execute(&cli.command);
    let stderr = exec
        .error
        .clone()
        .map(|e| format!("error: {e}\n"))
        .unwrap_or_default();
    let stdout = if cli.json {
        let echo = argv
            .iter()
            .map(|a| a.to_string_lossy().into_owned())
            .collect();
        RunReport::new(
            echo,
            exec.inputs_digest,
            &exec.outputs,
            exec.seed,
            start.elapsed(),
            exec.exit_code,
        )
        .to_json()
            + "\n"
    } else {
        exec.outputs.to_lines()
    };
    (exec.exit_code, stdout, stderr)
}

fn read_state(inputs: &mut Inputs, path: &Path) -> CliResult<(PureState, Units)> {
    let (text, name) = inputs.read(path)?;
    let file: StateFile = parse_json(&text, &name)?;
    Ok((file.state()?, file.units()?))
}

fn read_matrix(inputs: &mut Inputs, path: &Path, kind: MatrixKind) -> CliResult<ComplexMatrix> {
    let (text, name) = inputs.read(path)?;
    let file: JsonComplexMatrix = parse_json(&text, &name)?;
    file.to_matrix_of(kind)
}

fn synthesize(
    inputs: &mut Inputs,
    from: &Path,
    to: &Path,
    energy: f64,
    family_seed: Option<u64>,
    out: &Path,
) -> CliResult<Success> {
    let (phi, units) = read_state(inputs, from)?;
    let (psi, target_units) = read_state(inputs, to)?;
    if units != target_units {
        return Err(CliError::Invalid(format!(
            "states disagree on hbar: {} vs {}",
            units.hbar, target_units.hbar
        )));
    }
    if phi.dim() != psi.dim() {
        return Err(CliError::Dimension(format!(
            "states have n = {} and n = {}",
            phi.dim(),
            psi.dim()
        )));
    }
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(CliError::Invalid(format!(
            "energy must be positive, got {energy}"
        )));
    }
    let s = fs_distance(&phi, &psi)?;
    let h = match family_seed {
        None => optimal_hamiltonian(&phi, &psi, energy)?,
        Some(seed) => optimal_family_sample(&phi, &psi, energy, seed)?,
    };
    let mut outputs = Outputs::new();
    outputs.push("n", phi.dim()).push("s", s);
    if frobenius(&h) == 0.0 {
        // coincident rays: nothing to synthesize
        outputs.push("T", 0.0);
        return Ok(Success {
            exit_code: CliError::CoincidentRays.exit_code(),
            outputs,
        });
    }
    write_json(
        out,
        &JsonComplexMatrix::from_matrix(&h, Some(MatrixKind::Hermitian)),
    )?;
    let (delta_e_max, _) = energy_uncertainty_max(&h)?;
    outputs
        .push("energy", energy)
        .push("hbar", units.hbar)
        .push("T", units.hbar * s / energy)
        .push("delta_e", energy_uncertainty(&h, &phi)?)
        .push("delta_e_max", delta_e_max)
        .push("out", out.display().to_string());
    Ok(Success {
        exit_code: 0,
        outputs,
    })
}

fn check(inputs: &mut Inputs, ham: &Path, state: &Path) -> CliResult<Success> {
    let h = read_matrix(inputs, ham, MatrixKind::Hermitian)?;
    let (phi, _) = read_state(inputs, state)?;
    let v = is_optimal_speed(&h, &phi)?;
    let mut outputs = Outputs::new();
    outputs
        .push("verdict", v.kind.to_string())
        .push("delta_e", v.delta_e)
        .push("delta_e_max", v.delta_e_max)
        .push("residual", v.residual)
        .push("saturates", v.saturates());
    let exit_code = match v.kind {
        VerdictKind::Optimal => 0,
        VerdictKind::Suboptimal => 1,
        VerdictKind::Stationary => 5,
    };
    Ok(Success { exit_code, outputs })
}

fn equigeodesic(
    inputs: &mut Inputs,
    vector: &Path,
    blocks: &str,
    samples: usize,
    seed: u64,
) -> CliResult<Success> {
    let blocks: BlockStructure = blocks
        .parse()
        .map_err(|e: brachistochrone::Error| CliError::Invalid(e.to_string()))?;
    let x = SuVector::new(read_matrix(inputs, vector, MatrixKind::SkewHermitian)?)?;
    let structural = is_equigeodesic_structural(&x, &blocks)?;
    let variational = is_equigeodesic_variational(&x, &blocks, samples, seed)?;
    let mut outputs = Outputs::new();
    outputs
        .push("blocks", blocks.to_string())
        .push("structural", structural.holds)
        .push("structural_basis", format!("{:?}", structural.basis))
        .push("structural_residual", structural.residual)
        .push("variational", variational.holds)
        .push("variational_max_residual", variational.max_residual)
        .push("samples", samples);
    let exit_code = if structural.holds && variational.holds {
        0
    } else {
        1
    };
    Ok(Success { exit_code, outputs })
}

#[allow(clippy::too_many_arguments)]
fn evolve(
    inputs: &mut Inputs,
    ham: &Path,
    state: &Path,
    t0: f64,
    t1: f64,
    steps: usize,
    density: bool,
    out: &Path,
) -> CliResult<Success> {
    let h = read_matrix(inputs, ham, MatrixKind::Hermitian)?;
    let (text, name) = inputs.read(state)?;
    let input = parse_state_input(&text, &name)?;
    if !(t0.is_finite() && t1.is_finite() && t1 >= t0) {
        return Err(CliError::Invalid(format!(
            "need finite t0 <= t1, got [{t0}, {t1}]"
        )));
    }
    if t1 > t0 && steps == 0 {
        return Err(CliError::Invalid(
            "steps must be positive when t1 > t0".into(),
        ));
    }
    let grid = if t1 == t0 {
        vec![t0]
    } else {
        uniform_grid(t0, t1, steps)
    };
    let (traj, units) = match input {
        StateInput::Pure(phi, units) if density => {
            (sample_trajectory(&h, phi.projector(), &grid, units)?, units)
        }
        StateInput::Pure(phi, units) => (sample_trajectory(&h, phi, &grid, units)?, units),
        StateInput::Density(rho) => (
            sample_trajectory(&h, rho, &grid, Units::default())?,
            Units::default(),
        ),
    };
    write_json(out, &TrajectoryFile::from_trajectory(&traj))?;

    let mut outputs = Outputs::new();
    outputs.push("samples", traj.len()).push("hbar", units.hbar);
    match &traj.states {
        TrajectoryStates::Pure(states) => pure_conservation(&h, states, &mut outputs)?,
        TrajectoryStates::Density(states) => density_conservation(&h, states, &mut outputs)?,
    }
    outputs.push("out", out.display().to_string());
    Ok(Success {
        exit_code: 0,
        outputs,
    })
}

fn pure_conservation(
    h: &ComplexMatrix,
    states: &[PureState],
    outputs: &mut Outputs,
) -> CliResult<()> {
    let mean = |s: &PureState| s.amplitudes().dotc(&(h * s.amplitudes())).re;
    let (first, last) = (&states[0], &states[states.len() - 1]);
    let (m0, d0) = (mean(first), energy_uncertainty(h, first)?);
    let (mut norm, mut energy, mut spread) = (0.0f64, 0.0f64, 0.0f64);
    for s in states {
        norm = norm.max((s.amplitudes().norm() - 1.0).abs());
        energy = energy.max((mean(s) - m0).abs());
        spread = spread.max((energy_uncertainty(h, s)? - d0).abs());
    }
    outputs
        .push("kind", "pure")
        .push("norm_drift", norm)
        .push("energy_drift", energy)
        .push("uncertainty_drift", spread)
        .push("delta_e", d0)
        .push("fs_distance_travelled", fs_distance(first, last)?);
    Ok(())
}

fn density_conservation(
    h: &ComplexMatrix,
    states: &[DensityMatrix],
    outputs: &mut Outputs,
) -> CliResult<()> {
    let mean = |r: &DensityMatrix| (r.matrix() * h).trace().re;
    let first = &states[0];
    let spectrum0 = first.spectrum()?;
    let (m0, d0) = (mean(first), energy_uncertainty_mixed(h, first)?);
    let (mut trace, mut spectrum, mut energy, mut spread) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for r in states {
        trace = trace.max((r.matrix().trace().re - 1.0).abs());
        for (a, b) in r.spectrum()?.iter().zip(&spectrum0) {
            spectrum = spectrum.max((a - b).abs());
        }
        energy = energy.max((mean(r) - m0).abs());
        spread = spread.max((energy_uncertainty_mixed(h, r)? - d0).abs());
    }
    outputs
        .push("kind", "density")
        .push("trace_drift", trace)
        .push("spectrum_drift", spectrum)
        .push("energy_drift", energy)
        .push("uncertainty_drift", spread)
        .push("spectrum", Value::from(spectrum0));
    Ok(())
}

fn verify(
    suite: Suite,
    trials: usize,
    seed: u64,
    n_max: usize,
    negative_control: bool,
) -> CliResult<Success> {
    if trials == 0 {
        return Err(CliError::Invalid("--trials must be positive".into()));
    }
    if !(2..=64).contains(&n_max) {
        return Err(CliError::Invalid(format!(
            "--n-max must lie in 2..=64, got {n_max}"
        )));
    }
    let cfg = VerifyConfig::new(trials, seed, n_max);
    let outcomes = run_suite(suite, &cfg, negative_control);
    let mut outputs = Outputs::new();
    for o in &outcomes {
        let mut entry = json!({
            "status": if o.passed() { "pass" } else { "fail" },
            "max_residual": o.max_residual,
            "tolerance": o.tolerance,
            "trials": o.trials,
            "failures": o.failures,
        });
        for (k, v) in &o.notes {
            entry[*k] = json!(v);
        }
        if let Some(f) = &o.first_failure {
            entry["first_failure"] = json!(f);
        }
        outputs.push(o.name, entry);
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    outputs
        .push("passed", outcomes.len() - failed)
        .push("failed", failed);
    Ok(Success {
        exit_code: if failed == 0 { 0 } else { 1 },
        outputs,
    })
}
