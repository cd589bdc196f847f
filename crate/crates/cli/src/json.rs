//! JSON interchange. Complex numbers are `[re, im]` pairs; doubles are
//! written in shortest round-trip form, so decode(encode(m)) == m exactly.

use std::path::Path;

use brachistochrone::evolution::{Trajectory, TrajectoryStates};
use brachistochrone::{ComplexMatrix, ComplexVector, DensityMatrix, PureState, Units};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Amplitudes typed by hand are accepted within this distance of unit norm
/// and renormalized.
pub const STATE_NORM_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    Hermitian,
    SkewHermitian,
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonComplexMatrix {
    pub n: usize,
    pub rows: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<MatrixKind>,
}

impl JsonComplexMatrix {
    pub fn from_matrix(m: &ComplexMatrix, kind: Option<MatrixKind>) -> Self {
        let rows = m
            .row_iter()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        Self {
            n: m.nrows(),
            rows,
            kind,
        }
    }

    pub fn to_matrix(&self) -> CliResult<ComplexMatrix> {
        if self.rows.len() != self.n || self.rows.iter().any(|r| r.len() != self.n) {
            return Err(CliError::Invalid(format!("matrix is not {0}x{0}", self.n)));
        }
        if self.n == 0 {
            return Err(CliError::Invalid("empty matrix".into()));
        }
        let entries = self.rows.iter().flatten();
        if entries.clone().flatten().any(|x| !x.is_finite()) {
            return Err(CliError::Invalid("matrix has non-finite entries".into()));
        }
        Ok(ComplexMatrix::from_row_iterator(
            self.n,
            self.n,
            entries.map(|&[re, im]| Complex64::new(re, im)),
        ))
    }

    /// Decodes and checks the declared kind, if any, against `expected`.
    pub fn to_matrix_of(&self, expected: MatrixKind) -> CliResult<ComplexMatrix> {
        match self.kind {
            Some(kind) if kind != expected => Err(CliError::Invalid(format!(
                "expected a {expected:?} matrix, file declares {kind:?}"
            ))),
            _ => self.to_matrix(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JsonUnits {
    pub hbar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    pub amplitudes: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<JsonUnits>,
}

impl StateFile {
    pub fn from_state(phi: &PureState, units: Option<Units>) -> Self {
        Self {
            n: phi.dim(),
            amplitudes: encode_vector(phi.amplitudes()),
            units: units.map(|u| JsonUnits { hbar: u.hbar }),
        }
    }

    pub fn amplitudes(&self) -> CliResult<ComplexVector> {
        if self.amplitudes.len() != self.n || self.n == 0 {
            return Err(CliError::Invalid(format!(
                "state declares n = {} but has {} amplitudes",
                self.n,
                self.amplitudes.len()
            )));
        }
        if self.amplitudes.iter().flatten().any(|x| !x.is_finite()) {
            return Err(CliError::Invalid("state has non-finite amplitudes".into()));
        }
        Ok(decode_vector(&self.amplitudes))
    }

    pub fn state(&self) -> CliResult<PureState> {
        let v = self.amplitudes()?;
        let norm = v.norm();
        if (norm - 1.0).abs() > STATE_NORM_SLACK {
            return Err(CliError::Invalid(format!(
                "state has norm {norm}, expected 1"
            )));
        }
        if norm == 1.0 {
            return Ok(PureState::new(v)?);
        }
        Ok(PureState::normalized(v)?)
    }

    pub fn units(&self) -> CliResult<Units> {
        match self.units {
            None => Ok(Units::default()),
            Some(u) => Units::new(u.hbar).map_err(|e| CliError::Invalid(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonSample {
    Pure(Vec<[f64; 2]>),
    Density(JsonComplexMatrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFile {
    pub times: Vec<f64>,
    pub states: Vec<JsonSample>,
}

impl TrajectoryFile {
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        let states = match &traj.states {
            TrajectoryStates::Pure(v) => v
                .iter()
                .map(|s| JsonSample::Pure(encode_vector(s.amplitudes())))
                .collect(),
            TrajectoryStates::Density(v) => v
                .iter()
                .map(|r| {
                    JsonSample::Density(JsonComplexMatrix::from_matrix(
                        r.matrix(),
                        Some(MatrixKind::Density),
                    ))
                })
                .collect(),
        };
        Self {
            times: traj.times.clone(),
            states,
        }
    }
}

pub fn encode_vector(v: &ComplexVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn decode_vector(v: &[[f64; 2]]) -> ComplexVector {
    ComplexVector::from_iterator(v.len(), v.iter().map(|&[re, im]| Complex64::new(re, im)))
}

/// A state input: a pure-state file or a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum StateInput {
    Pure(PureState, Units),
    Density(DensityMatrix),
}

pub fn parse_state_input(text: &str, path: &str) -> CliResult<StateInput> {
    let value: serde_json::Value = parse_json(text, path)?;
    if value.get("amplitudes").is_some() {
        let file: StateFile = from_value(value, path)?;
        return Ok(StateInput::Pure(file.state()?, file.units()?));
    }
    let file: JsonComplexMatrix = from_value(value, path)?;
    let rho = DensityMatrix::new(file.to_matrix_of(MatrixKind::Density)?)?;
    Ok(StateInput::Density(rho))
}

pub fn parse_json<T: DeserializeOwned>(text: &str, path: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.into(),
        message: e.to_string(),
    })
}

fn from_value<T: DeserializeOwned>(value: serde_json::Value, path: &str) -> CliResult<T> {
    serde_json::from_value(value).map_err(|e| CliError::Parse {
        path: path.into(),
        message: e.to_string(),
    })
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string(value).expect("plain data serializes");
    std::fs::write(path, text + "\n").map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
