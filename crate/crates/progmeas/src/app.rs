//! Command-line front end.

use std::fs;
use std::io::{self, Read};

use clap::{ArgGroup, Args, Parser, Subcommand};
use progmeas_core::processor::{sample_outcomes, validate_povm};
use progmeas_core::qcore::PureState;
use progmeas_core::qid::{pauli_measurement_program, qid_circuit_search, qid_povm, sic_program, unitary_program, QidProgram};
use progmeas_core::tomography::Tomographer;
use progmeas_core::vnmeas::{
    build_orthogonal_processor, coprogram_condition, coprogram_condition_slots, feasibility_table_check,
    pad_with_zero_slots, relaxed_pvm_processor, SlotAssignment, SynthesisReport, TableViolation,
    VonNeumannMeasurement,
};
use progmeas_core::Error;
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::format::{
    exact, slot_map, to_json, ComplexJson, DataJson, MeasurementJson, MeasurementSetJson, OperatorJson,
    PovmJson, ProgramJson, PureStateJson, RunManifest, StateJson,
};

#[derive(Debug, Parser)]
#[command(name = "progmeas", version, about = "Measurement-assisted programmable quantum processors")]
pub struct Cli {
    /// Seed for sampling commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Tolerance for validating input states, POVMs and measurements.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Output path (`-` for stdout).
    #[arg(long, global = true, default_value = "-")]
    pub output: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["sic", "program"])))]
pub struct ProgramSource {
    /// Use the tetrahedral SIC program.
    #[arg(long)]
    pub sic: bool,
    /// Program amplitudes file `{"alpha": [[re, im] x4]}`.
    #[arg(long)]
    pub program: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// POVM realized by a QID program.
    QidPovm(ProgramSource),
    /// Emit a named QID program.
    #[command(group(ArgGroup::new("family").required(true).args(["sic", "unitary", "pauli"])))]
    QidProgram {
        #[arg(long)]
        sic: bool,
        /// Rotation vector `mu` as `x,y,z`.
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        unitary: Option<Vec<f64>>,
        /// Pauli axis 1, 2 or 3.
        #[arg(long)]
        pauli: Option<usize>,
    },
    /// Sample outcome counts.
    Simulate {
        #[arg(long)]
        state: String,
        #[arg(long)]
        povm: String,
        #[arg(long)]
        n: u64,
    },
    /// Linear-inversion state reconstruction.
    Reconstruct {
        /// `{"counts": [...]}` or `{"probabilities": [...]}`.
        #[arg(long)]
        data: String,
        #[arg(long)]
        povm: String,
        /// Clip negative eigenvalues of the estimate.
        #[arg(long)]
        project: bool,
    },
    /// Coprogram condition of two measurements.
    VnCheck {
        #[arg(long)]
        measurements: String,
    },
    /// Processor synthesis with zero-slot padding or an explicit assignment.
    VnSynth {
        #[arg(long)]
        measurements: String,
    },
    /// Relaxed shift construction.
    VnRelaxed {
        #[arg(long)]
        measurements: String,
    },
    /// CSV of the Bloch points of a QID POVM.
    BlochExport(ProgramSource),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::QidPovm(_) => "qid-povm",
            Command::QidProgram { .. } => "qid-program",
            Command::Simulate { .. } => "simulate",
            Command::Reconstruct { .. } => "reconstruct",
            Command::VnCheck { .. } => "vn-check",
            Command::VnSynth { .. } => "vn-synth",
            Command::VnRelaxed { .. } => "vn-relaxed",
            Command::BlochExport(_) => "bloch-export",
        }
    }

    fn inputs(&self) -> Vec<String> {
        match self {
            Command::QidPovm(src) | Command::BlochExport(src) => src.program.iter().cloned().collect(),
            Command::QidProgram { .. } => Vec::new(),
            Command::Simulate { state, povm, .. } => vec![state.clone(), povm.clone()],
            Command::Reconstruct { data, povm, .. } => vec![data.clone(), povm.clone()],
            Command::VnCheck { measurements } | Command::VnSynth { measurements } | Command::VnRelaxed { measurements } => {
                vec![measurements.clone()]
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: malformed JSON: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    /// 3 for mathematically infeasible requests, 2 for invalid input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_infeasible() => 3,
            _ => 2,
        }
    }
}

fn read_input(path: &str) -> Result<String, CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_string(),
        source,
    };
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(io_err)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io_err)
    }
}

fn read_json<T: DeserializeOwned>(path: &str) -> Result<T, CliError> {
    serde_json::from_str(&read_input(path)?).map_err(|source| CliError::Json {
        path: path.to_string(),
        source,
    })
}

/// Writes `text` to `path`, or stdout for `-`.
pub fn write_output(path: &str, text: &str) -> Result<(), CliError> {
    use std::io::Write;
    let io_err = |source| CliError::Io {
        path: path.to_string(),
        source,
    };
    if path == "-" {
        io::stdout().write_all(text.as_bytes()).map_err(io_err)
    } else {
        fs::write(path, text).map_err(io_err)
    }
}

#[derive(Serialize)]
struct Output<T: Serialize> {
    manifest: RunManifest,
    #[serde(flatten)]
    body: T,
}

fn load_program(src: &ProgramSource, tol: f64) -> Result<QidProgram, CliError> {
    match &src.program {
        Some(path) => {
            let alpha = read_json::<ProgramJson>(path)?.amplitudes()?;
            let norm = alpha.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if !norm.is_finite() || (norm - 1.0).abs() > tol {
                return Err(Error::NotNormalized { norm }.into());
            }
            Ok(QidProgram::new(alpha.map(|z| z / norm))?)
        }
        None => Ok(sic_program()),
    }
}

fn display_labels() -> Vec<String> {
    match qid_circuit_search() {
        Some(c) => c.labels.to_vec(),
        None => (0..4).map(|k| k.to_string()).collect(),
    }
}

#[derive(Serialize)]
struct QidPovmBody {
    labels: Vec<String>,
    program: ProgramJson,
    program_operator: OperatorJson,
    elements: Vec<OperatorJson>,
    r_anchor: [f64; 3],
    informationally_complete: bool,
    bloch_points: [[f64; 3]; 4],
}

#[derive(Serialize)]
struct QidProgramBody {
    #[serde(flatten)]
    program: ProgramJson,
    state: PureStateJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<Vec<Vec<usize>>>,
}

#[derive(Serialize)]
struct CountsBody {
    n: u64,
    counts: Vec<u64>,
}

#[derive(Serialize)]
struct DiagnosticsJson {
    residual: f64,
    eigenvalues: Vec<f64>,
    projected: bool,
}

#[derive(Serialize)]
struct ReconstructBody {
    state: OperatorJson,
    diagnostics: DiagnosticsJson,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ViolationJson {
    RowOverlap {
        alpha: usize,
        beta: usize,
        outcome: usize,
        overlap: f64,
    },
    PermutationRelated {
        alpha: usize,
        beta: usize,
        permutation: Vec<usize>,
    },
}

impl From<&TableViolation> for ViolationJson {
    fn from(v: &TableViolation) -> Self {
        match v {
            TableViolation::RowOverlap {
                alpha,
                beta,
                outcome,
                overlap,
            } => ViolationJson::RowOverlap {
                alpha: *alpha,
                beta: *beta,
                outcome: *outcome,
                overlap: *overlap,
            },
            TableViolation::PermutationRelated {
                alpha,
                beta,
                permutation,
            } => ViolationJson::PermutationRelated {
                alpha: *alpha,
                beta: *beta,
                permutation: permutation.clone(),
            },
        }
    }
}

#[derive(Serialize)]
struct CheckBody {
    operator: OperatorJson,
    scalar: Option<ComplexJson>,
    orthogonal_programs_required: bool,
    table_violations: Vec<ViolationJson>,
}

#[derive(Serialize)]
struct VerificationJson {
    measurement: MeasurementJson,
    program: PureStateJson,
    partition: Vec<Vec<usize>>,
    povm: Vec<OperatorJson>,
    povm_error: f64,
    leakage: f64,
    projection_postulate: bool,
}

#[derive(Serialize)]
struct SynthesisBody {
    data_dim: usize,
    program_dim: usize,
    unitary: bool,
    completion_used: bool,
    unitarity_residual: f64,
    gate: OperatorJson,
    verifications: Vec<VerificationJson>,
}

impl From<&SynthesisReport> for SynthesisBody {
    fn from(r: &SynthesisReport) -> Self {
        let verifications = r
            .verifications
            .iter()
            .enumerate()
            .map(|(a, v)| VerificationJson {
                measurement: MeasurementJson::from(&r.measurements[a]),
                program: PureStateJson::from(&r.programs[a]),
                partition: r.partitions[a].blocks().to_vec(),
                povm: v.povm.iter().map(OperatorJson::from).collect(),
                povm_error: v.povm_error,
                leakage: v.leakage,
                projection_postulate: v.projection_postulate,
            })
            .collect();
        SynthesisBody {
            data_dim: r.processor.data_dim(),
            program_dim: r.processor.program_dim(),
            unitary: r.unitary,
            completion_used: r.completion_used,
            unitarity_residual: r.unitarity_residual,
            gate: OperatorJson::from(r.gate()),
            verifications,
        }
    }
}

fn load_measurements(path: &str, tol: f64) -> Result<(MeasurementSetJson, Vec<VonNeumannMeasurement>), CliError> {
    let set: MeasurementSetJson = read_json(path)?;
    let ms = set
        .measurements
        .iter()
        .map(|m| m.to_measurement(tol))
        .collect::<Result<Vec<_>, _>>()?;
    if ms.is_empty() {
        return Err(Error::Empty("measurement list").into());
    }
    Ok((set, ms))
}

fn emit<T: Serialize>(manifest: RunManifest, body: T) -> String {
    to_json(&Output { manifest, body })
}

/// Runs one command and returns the text to write.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let tol = cli.tol;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
    }
    let uses_seed = matches!(cli.command, Command::Simulate { .. });
    let manifest = RunManifest {
        command: cli.command.name().to_string(),
        inputs: cli.command.inputs(),
        seed: uses_seed.then(|| cli.seed.unwrap_or(0)),
        version: env!("CARGO_PKG_VERSION").to_string(),
        tolerance: tol,
    };
    match &cli.command {
        Command::QidPovm(src) => {
            let prog = load_program(src, tol)?;
            let report = qid_povm(&prog);
            Ok(emit(
                manifest,
                QidPovmBody {
                    labels: display_labels(),
                    program: ProgramJson::from_amplitudes(prog.alpha()),
                    program_operator: OperatorJson::from(&report.program_operator),
                    elements: report.elements.iter().map(OperatorJson::from).collect(),
                    r_anchor: report.r_anchor,
                    informationally_complete: report.informationally_complete,
                    bloch_points: report.bloch_points(),
                },
            ))
        }
        Command::QidProgram { sic, unitary, pauli } => {
            let (prog, partition) = if *sic {
                (sic_program(), None)
            } else if let Some(mu) = unitary {
                let mu: [f64; 3] = mu
                    .as_slice()
                    .try_into()
                    .map_err(|_| CliError::Usage(format!("--unitary expects 3 components, got {}", mu.len())))?;
                if mu.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite.into());
                }
                (unitary_program(mu), None)
            } else {
                let (prog, part) = pauli_measurement_program(pauli.expect("clap enforces one family"))?;
                (prog, Some(part.blocks().to_vec()))
            };
            Ok(emit(
                manifest,
                QidProgramBody {
                    program: ProgramJson::from_amplitudes(prog.alpha()),
                    state: PureStateJson::from(&prog.state()),
                    partition,
                },
            ))
        }
        Command::Simulate { state, povm, n } => {
            let rho = read_json::<StateJson>(state)?.to_density(tol)?;
            let povm = read_json::<PovmJson>(povm)?.to_operators()?;
            validate_povm(&povm, tol)?;
            let counts = sample_outcomes(&rho, &povm, *n, manifest.seed.unwrap_or(0))?;
            Ok(emit(manifest, CountsBody { n: *n, counts }))
        }
        Command::Reconstruct { data, povm, project } => {
            let data: DataJson = read_json(data)?;
            let tomo = Tomographer::with_tolerance(read_json::<PovmJson>(povm)?.to_operators()?, tol)?;
            let (state, diagnostics) = match (&data.counts, &data.probabilities) {
                (Some(counts), None) => tomo.reconstruct_from_counts(counts, *project)?,
                (None, Some(p)) if *project => tomo.estimate(p, true)?,
                (None, Some(p)) => {
                    let rho = tomo.reconstruct(p)?;
                    let (_, diag) = tomo.estimate(p, false)?;
                    (rho.into_matrix(), diag)
                }
                _ => {
                    return Err(CliError::Usage(
                        "data file needs exactly one of \"counts\" or \"probabilities\"".to_string(),
                    ))
                }
            };
            Ok(emit(
                manifest,
                ReconstructBody {
                    state: OperatorJson::from(&state),
                    diagnostics: DiagnosticsJson {
                        residual: diagnostics.residual,
                        eigenvalues: diagnostics.eigenvalues,
                        projected: diagnostics.projected,
                    },
                },
            ))
        }
        Command::VnCheck { measurements } => {
            let (set, ms) = load_measurements(measurements, tol)?;
            if ms.len() != 2 {
                return Err(CliError::Usage(format!("vn-check needs exactly 2 measurements, got {}", ms.len())));
            }
            let cond = match &set.slots {
                Some(slots) if slots.len() == 2 => coprogram_condition_slots(
                    &ms[0],
                    &slot_map(&slots[0], ms[0].dim())?,
                    &ms[1],
                    &slot_map(&slots[1], ms[1].dim())?,
                )?,
                Some(slots) => {
                    return Err(CliError::Usage(format!("expected 2 slot maps, got {}", slots.len())));
                }
                None => coprogram_condition(&ms[0], &ms[1])?,
            };
            let table_violations = if ms.len() <= ms[0].dim() {
                feasibility_table_check(&ms)?.iter().map(ViolationJson::from).collect()
            } else {
                Vec::new()
            };
            Ok(emit(
                manifest,
                CheckBody {
                    operator: OperatorJson::from(&cond.operator),
                    scalar: cond.scalar.map(|k| [k.re, k.im]),
                    orthogonal_programs_required: cond.scalar.is_none(),
                    table_violations,
                },
            ))
        }
        Command::VnSynth { measurements } => {
            let (set, ms) = load_measurements(measurements, tol)?;
            let assignment = match (&set.slots, &set.programs) {
                (None, None) => pad_with_zero_slots(&ms)?,
                (Some(slots), programs) => {
                    let dp = slots.first().map_or(0, |s| s.len());
                    let maps = slots
                        .iter()
                        .zip(&ms)
                        .map(|(s, m)| slot_map(s, m.dim()))
                        .collect::<Result<Vec<_>, _>>()?;
                    let programs = match programs {
                        Some(ps) => ps.iter().map(|p| p.to_state(tol)).collect::<Result<Vec<_>, _>>()?,
                        None => (0..ms.len())
                            .map(|a| PureState::basis(dp, a))
                            .collect::<Result<Vec<_>, _>>()?,
                    };
                    SlotAssignment::new(dp, programs, maps)?
                }
                (None, Some(_)) => return Err(CliError::Usage("\"programs\" requires \"slots\"".to_string())),
            };
            let report = build_orthogonal_processor(&assignment, &ms)?;
            Ok(emit(manifest, SynthesisBody::from(&report)))
        }
        Command::VnRelaxed { measurements } => {
            let (_, ms) = load_measurements(measurements, tol)?;
            let report = relaxed_pvm_processor(&ms)?;
            Ok(emit(manifest, SynthesisBody::from(&report)))
        }
        Command::BlochExport(src) => {
            let prog = load_program(src, tol)?;
            let points = qid_povm(&prog).bloch_points();
            let mut csv = format!("# {}", to_json(&manifest));
            csv.push_str("label,x,y,z\n");
            for (label, p) in display_labels().iter().zip(points) {
                csv.push_str(&format!("{label},{},{},{}\n", exact(p[0]), exact(p[1]), exact(p[2])));
            }
            Ok(csv)
        }
    }
}
