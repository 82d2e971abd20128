//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when the input violates a physical or
//! mathematical requirement, 2 for usage and file-format errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::boundary::BoundaryCondition;
use crate::error::Error;
use crate::gates;
use crate::io::{format_f64, to_json_string, MatrixFile, MatrixKind};
use crate::linalg::haar_random_unitary;
use crate::phase_recovery::{recover_full, AmplitudeOracle, EntryMethod};
use crate::smatrix::{self, ScatteringMatrix, BLOCK_TOLERANCE};
use crate::von_neumann::{self, VonNeumannParam};

#[derive(Debug, Parser)]
#[command(
    name = "qwire",
    version,
    about = "Scattering at a single quantum-wire vertex"
)]
pub struct Cli {
    /// Write the result here instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check rank and self-adjointness of a boundary pair.
    Validate { path: PathBuf },

    /// S-matrix of a boundary pair at energy E.
    Scatter {
        path: PathBuf,
        #[arg(long)]
        energy: f64,
    },

    /// Canonical boundary pair with S(E0) equal to a given unitary.
    Design {
        path: PathBuf,
        #[arg(long)]
        energy: f64,
    },

    /// Boundary pair of a named gate: `phase:<chi>`, `hadamard` or `cnot`.
    Gate {
        name: String,
        #[arg(long)]
        energy: f64,
    },

    /// Move an S-matrix file to another energy.
    Propagate {
        path: PathBuf,
        #[arg(long)]
        to: f64,
    },

    /// Split the channels of a boundary pair into decoupled blocks (1-based).
    Decompose {
        path: PathBuf,
        /// Reference energy; samples are log-spaced over [E/4, 4E].
        #[arg(long)]
        energy: f64,
        #[arg(long, default_value_t = BLOCK_TOLERANCE)]
        tolerance: f64,
    },

    /// Check that S-matrices at distinct energies come from one vertex.
    Consistency {
        #[arg(required = true, num_args = 2..)]
        paths: Vec<PathBuf>,
    },

    /// Rebuild an S-matrix from magnitude-only measurements.
    Recover {
        /// Hidden S-matrix file. Omit to draw a Haar-random one.
        path: Option<PathBuf>,
        #[arg(long, conflicts_with = "path", requires_all = ["n", "energy"])]
        seed: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        energy: Option<f64>,
        /// Write the per-entry report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },

    /// Convert to or from the von Neumann unitary W.
    Vn {
        path: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        /// With `from-w`, emit S(E) instead of a boundary pair.
        #[arg(long)]
        energy: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    ToW,
    FromW,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Format(_) | Error::Io(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

fn flag_energy(name: &str, e: f64) -> Result<f64, CliError> {
    if e.is_finite() && e > 0.0 {
        Ok(e)
    } else {
        Err(CliError::Usage(format!(
            "--{name} must be a positive finite number, got {e}"
        )))
    }
}

/// What a command produced: a document for standard output and an exit code.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: 0,
        }
    }
}

#[derive(Serialize)]
struct BlocksDoc {
    blocks: Vec<Vec<usize>>,
}

#[derive(Serialize)]
struct ConsistencyDoc {
    max_residual: f64,
    consistent: bool,
}

#[derive(Serialize)]
struct RecoveryDoc {
    energy: f64,
    oracle_calls: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_entry_error: Option<f64>,
    methods: Vec<Vec<EntryMethod>>,
    recovered: MatrixFile,
}

fn doc<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(to_json_string(value)?)
}

fn read(path: &Path) -> Result<MatrixFile, CliError> {
    Ok(MatrixFile::read(path)?)
}

fn parse_gate(name: &str, energy: f64) -> Result<BoundaryCondition, CliError> {
    match name {
        "hadamard" => Ok(gates::hadamard_boundary(energy)),
        "cnot" => Ok(gates::cnot_boundary(energy)),
        _ => {
            let chi = name
                .strip_prefix("phase:")
                .ok_or_else(|| CliError::Usage(format!("unknown gate `{name}`")))?
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("bad phase in `{name}`: {e}")))?;
            if !chi.is_finite() {
                return Err(CliError::Usage(format!("bad phase in `{name}`")));
            }
            Ok(gates::phase_boundary(chi, energy)?)
        }
    }
}

/// Runs one command without touching the process.
pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Validate { path } => {
            let bc = read(path)?.to_boundary_condition()?;
            let report = bc.validate();
            let valid = report.is_valid();
            Ok(Outcome {
                stdout: format!("{}: {report}\n", if valid { "valid" } else { "invalid" }),
                stderr: String::new(),
                code: if valid { 0 } else { 1 },
            })
        }
        Command::Scatter { path, energy } => {
            let energy = flag_energy("energy", *energy)?;
            let bc = read(path)?.to_boundary_condition()?;
            let s = smatrix::scatter(&bc, energy)?;
            Ok(Outcome::ok(MatrixFile::smatrix(&s).to_json()))
        }
        Command::Design { path, energy } => {
            let energy = flag_energy("energy", *energy)?;
            let file = read(path)?;
            if file.kind == MatrixKind::BoundaryPair {
                return Err(CliError::Usage(
                    "design expects a square matrix file".into(),
                ));
            }
            if let Some(e) = file.energy.filter(|&e| e != energy) {
                return Err(CliError::Usage(format!(
                    "file energy {} differs from --energy {}",
                    format_f64(e),
                    format_f64(energy)
                )));
            }
            let bc = smatrix::design_matrix(&file.matrix()?, energy)?;
            Ok(Outcome::ok(MatrixFile::boundary_pair(&bc).to_json()))
        }
        Command::Gate { name, energy } => {
            let energy = flag_energy("energy", *energy)?;
            let bc = parse_gate(name, energy)?;
            Ok(Outcome::ok(MatrixFile::boundary_pair(&bc).to_json()))
        }
        Command::Propagate { path, to } => {
            let to = flag_energy("to", *to)?;
            let s = read(path)?.to_smatrix()?;
            let moved = smatrix::propagate(&s, to)?;
            Ok(Outcome::ok(MatrixFile::smatrix(&moved).to_json()))
        }
        Command::Decompose {
            path,
            energy,
            tolerance,
        } => {
            let energy = flag_energy("energy", *energy)?;
            if !(tolerance.is_finite() && *tolerance >= 0.0) {
                return Err(CliError::Usage(format!("bad --tolerance {tolerance}")));
            }
            let bc = read(path)?.to_boundary_condition()?;
            let blocks =
                smatrix::block_decompose(&bc, &smatrix::default_block_samples(energy), *tolerance)?;
            let one_based = blocks
                .blocks
                .iter()
                .map(|b| b.iter().map(|i| i + 1).collect())
                .collect();
            Ok(Outcome::ok(doc(&BlocksDoc { blocks: one_based })?))
        }
        Command::Consistency { paths } => {
            let family = paths
                .iter()
                .map(|p| Ok(read(p)?.to_smatrix()?))
                .collect::<Result<Vec<_>, CliError>>()?;
            let report = smatrix::family_consistency(&family)?;
            let text = doc(&ConsistencyDoc {
                max_residual: report.max_residual,
                consistent: report.consistent,
            })?;
            Ok(Outcome {
                stdout: text,
                stderr: String::new(),
                code: if report.consistent { 0 } else { 1 },
            })
        }
        Command::Recover {
            path,
            seed,
            n,
            energy,
            report,
        } => {
            let hidden = match (path, seed) {
                (Some(p), _) => read(p)?.to_smatrix()?,
                (None, Some(seed)) => {
                    let n = n
                        .filter(|&n| n > 0)
                        .ok_or_else(|| CliError::Usage("--n must be positive".into()))?;
                    let energy = flag_energy("energy", energy.expect("required by clap"))?;
                    ScatteringMatrix::new(haar_random_unitary(n, *seed), energy)?
                }
                (None, None) => {
                    return Err(CliError::Usage(
                        "give a matrix file or --seed with --n and --energy".into(),
                    ))
                }
            };
            let mut oracle = AmplitudeOracle::new(hidden.clone());
            let result = recover_full(&mut oracle)?.with_reference(hidden.matrix());
            let error = result.max_entry_error.expect("reference set");
            let stderr = format!(
                "max entry error {} after {} oracle calls\n",
                format_f64(error),
                result.oracle_calls
            );
            if let Some(report_path) = report {
                let text = doc(&RecoveryDoc {
                    energy: hidden.energy(),
                    oracle_calls: result.oracle_calls,
                    max_entry_error: result.max_entry_error,
                    methods: result.methods.clone(),
                    recovered: MatrixFile::smatrix(&result.recovered),
                })?;
                std::fs::write(report_path, text)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", report_path.display())))?;
            }
            Ok(Outcome {
                stdout: MatrixFile::smatrix(&result.recovered).to_json(),
                stderr,
                code: 0,
            })
        }
        Command::Vn {
            path,
            direction,
            energy,
        } => {
            let file = read(path)?;
            let energy = energy.map(|e| flag_energy("energy", e)).transpose()?;
            let text = match direction {
                Direction::ToW => {
                    let w = match file.kind {
                        MatrixKind::BoundaryPair => {
                            von_neumann::w_from_bc(&file.to_boundary_condition()?)?
                        }
                        MatrixKind::Smatrix => von_neumann::w_from_s(&file.to_smatrix()?)?,
                        MatrixKind::Unitary => {
                            let e = energy.ok_or_else(|| {
                                CliError::Usage(
                                    "--energy is required for a unitary file without energy".into(),
                                )
                            })?;
                            von_neumann::w_from_s(&ScatteringMatrix::new(file.matrix()?, e)?)?
                        }
                    };
                    MatrixFile::unitary(w.matrix()).to_json()
                }
                Direction::FromW => {
                    if file.kind == MatrixKind::BoundaryPair {
                        return Err(CliError::Usage(
                            "from-w expects a square matrix file".into(),
                        ));
                    }
                    let w = VonNeumannParam::new(file.matrix()?)?;
                    match energy {
                        Some(e) => MatrixFile::smatrix(&von_neumann::s_from_w(&w, e)?).to_json(),
                        None => MatrixFile::boundary_pair(&von_neumann::bc_from_w(&w)?).to_json(),
                    }
                }
            };
            Ok(Outcome::ok(text))
        }
    }
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match execute(&cli.command) {
        Ok(outcome) => {
            let _ = stderr.write_all(outcome.stderr.as_bytes());
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &outcome.stdout)
                    .map_err(|e| format!("{}: {e}", path.display())),
                None => stdout
                    .write_all(outcome.stdout.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => outcome.code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    2
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}
