//! Command-line front end.
//!
//! Exit codes: 0 for an affirmative verdict, 1 for a negative one, 2 for
//! usage and input errors. JSON artifacts carry the run configuration under
//! `config`; CSV artifacts written with `--out` get it in a `.meta.json`
//! sidecar next to the file.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cloning::{cloning_feasible, generation_feasible};
use crate::compression::{
    density_matrix, rate_scan, rate_scan_csv, shannon_entropy, von_neumann_entropy, Ensemble,
    TwoStateSource, DEFAULT_MAX_BLOCK,
};
use crate::deleting::{is_valid_deleter, make_swap_deleter, recover_deleted, recovery_fidelities};
use crate::geometry::{
    overlap_dominance_counterexample, pair_dominance_counterexample, verify_counterexample,
    xi_scan, xi_scan_csv, SearchMethod,
};
use crate::io::{read_json, to_json_string, AncillaFile, EnsembleFile, MatrixFile, StateSetFile};
use crate::linalg::{c, CVector};
use crate::statekit::{StateSet, StateVector};
use crate::teleport::{independence_check_with, teleport_with, MeasurementBasis};
use crate::{sampling, Error, Result, Tolerances};

#[derive(Debug, Parser)]
#[command(name = "qperm", version, about = "Cloning, deleting and compression checks for quantum states")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Relative eigenvalue floor for PSD tests.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_psd: f64,
    /// Smallest admissible overlap modulus between signal states.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub min_overlap: f64,
    #[arg(long, global = true, env = "QPERM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format, defaulting to csv for tabular commands and json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Grid,
    Random,
    Hillclimb,
}

impl From<MethodArg> for SearchMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Grid => SearchMethod::Grid,
            MethodArg::Random => SearchMethod::Random,
            MethodArg::Hillclimb => SearchMethod::Hillclimb,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisArg {
    Bell,
    Computational,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case", rename_all_fields = "camelCase")]
pub enum Command {
    /// Decide whether the ancillas let one more copy of each state be made.
    CloneCheck {
        #[arg(long)]
        states: PathBuf,
        #[arg(long)]
        ancilla: PathBuf,
        /// Copies of each state already held.
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
    /// Check a deleting unitary on a state set and recover the deleted copies.
    DeleteVerify {
        #[arg(long)]
        unitary: PathBuf,
        #[arg(long)]
        states: PathBuf,
        /// Where to write the recovery unitary.
        #[arg(long)]
        recovery_out: Option<PathBuf>,
    },
    /// Write a swap deleter, optionally followed by a random environment unitary.
    MakeDeleter {
        #[arg(long)]
        dim: usize,
        /// Environment dimension, at least dim + 1 (default).
        #[arg(long)]
        env_dim: Option<usize>,
        #[arg(long)]
        random_v: bool,
    },
    /// Von Neumann and Shannon entropies of an ensemble.
    Entropy {
        #[arg(long, conflicts_with = "overlap")]
        ensemble: Option<PathBuf>,
        /// Equiprobable pair of real states with this overlap.
        #[arg(long)]
        overlap: Option<f64>,
    },
    /// Block-coding fidelity for a two-state source.
    Schumacher {
        /// Overlap of the source states; 45 degrees by default.
        #[arg(long)]
        overlap: Option<f64>,
        #[arg(long = "n", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long = "rate", value_delimiter = ',', required = true)]
        rate_list: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_MAX_BLOCK)]
        max_block: usize,
    },
    /// Entropy of three equiprobable states against cos(xi) for fixed overlaps.
    GeometryScan {
        #[arg(long)]
        a12: f64,
        #[arg(long)]
        a23: f64,
        #[arg(long)]
        a31: f64,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
    /// Search for triples whose overlaps and entropy grow together.
    Counterexample {
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Hillclimb)]
        method: MethodArg,
        /// Search over pairs of states instead (never succeeds).
        #[arg(long)]
        two_state: bool,
    },
    /// Teleport one qubit and report every measurement branch.
    TeleportDemo {
        /// Amplitudes as re0,im0,re1,im1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "random")]
        amps: Option<Vec<f64>>,
        /// Haar-random input drawn from the seed.
        #[arg(long)]
        random: bool,
        #[arg(long, value_enum, default_value_t = BasisArg::Bell)]
        basis: BasisArg,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CloneCheck { .. } => "clone-check",
            Command::DeleteVerify { .. } => "delete-verify",
            Command::MakeDeleter { .. } => "make-deleter",
            Command::Entropy { .. } => "entropy",
            Command::Schumacher { .. } => "schumacher",
            Command::GeometryScan { .. } => "geometry-scan",
            Command::Counterexample { .. } => "counterexample",
            Command::TeleportDemo { .. } => "teleport-demo",
        }
    }

    fn tabular(&self) -> bool {
        matches!(self, Command::Schumacher { .. } | Command::GeometryScan { .. })
    }
}

/// Configuration echoed into every artifact.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub seed: u64,
    pub format: Format,
    pub tolerances: Tolerances,
    pub args: Command,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let tolerances = Tolerances {
            psd: cli.global.tol_psd,
            min_overlap: cli.global.min_overlap,
            ..Tolerances::default()
        };
        if let Some(name) = tolerances.first_invalid() {
            return Err(Error::OutOfRange {
                name,
                value: if name == "psd" { tolerances.psd } else { tolerances.min_overlap },
                expected: "a positive number",
            });
        }
        let tabular = cli.command.tabular();
        let format = cli.global.format.unwrap_or(if tabular { Format::Csv } else { Format::Json });
        if format == Format::Csv && !tabular {
            return Err(Error::Schema {
                field: "--format".into(),
                reason: format!("csv output is not available for {}", cli.command.name()),
            });
        }
        Ok(Self {
            seed: cli.global.seed,
            format,
            tolerances,
            args: cli.command.clone(),
        })
    }
}

/// Verdict of a command, mapped onto the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Affirmative,
    Negative,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Affirmative
        } else {
            Verdict::Negative
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Affirmative => 0,
            Verdict::Negative => 1,
        }
    }
}

enum Artifact {
    Json(Value),
    Csv { table: String, meta: Value },
}

struct Outcome {
    verdict: Verdict,
    artifact: Artifact,
    /// Secondary files written alongside the main artifact.
    extra: Vec<(PathBuf, String)>,
}

impl Outcome {
    fn json(verdict: Verdict, config: &RunConfig, result: impl Serialize) -> Result<Self> {
        Ok(Self {
            verdict,
            artifact: Artifact::Json(json!({ "config": config, "result": serde_json::to_value(result)? })),
            extra: Vec::new(),
        })
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(verdict) => verdict.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Verdict> {
    let config = RunConfig::from_cli(cli)?;
    let outcome = dispatch(&config)?;
    emit(&outcome, cli.global.out.as_deref())?;
    Ok(outcome.verdict)
}

fn emit(outcome: &Outcome, out: Option<&Path>) -> Result<()> {
    let (text, meta) = match &outcome.artifact {
        Artifact::Json(v) => (to_json_string(v)?, None),
        Artifact::Csv { table, meta } => (table.clone(), Some(meta)),
    };
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            if let Some(meta) = meta {
                let mut sidecar = path.as_os_str().to_owned();
                sidecar.push(".meta.json");
                std::fs::write(PathBuf::from(sidecar), to_json_string(meta)?)?;
            }
        }
        None => print!("{text}"),
    }
    for (path, text) in &outcome.extra {
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn dispatch(config: &RunConfig) -> Result<Outcome> {
    let tol = &config.tolerances;
    match &config.args {
        Command::CloneCheck {
            states,
            ancilla,
            copies,
        } => {
            let psi = read_json::<StateSetFile>(states)?.to_state_set(tol)?;
            let anc = read_json::<AncillaFile>(ancilla)?.to_mixed_state_set(tol)?;
            let cloning = cloning_feasible(&psi, &anc, *copies, tol)?;
            let generation = generation_feasible(&psi, &anc, tol)?;
            let verdict = Verdict::from_bool(cloning.feasible);
            Outcome::json(
                verdict,
                config,
                json!({ "cloning": cloning, "generationFeasible": generation.feasible }),
            )
        }
        Command::DeleteVerify {
            unitary,
            states,
            recovery_out,
        } => delete_verify(config, unitary, states, recovery_out.as_deref()),
        Command::MakeDeleter {
            dim,
            env_dim,
            random_v,
        } => {
            let env_dim = env_dim.unwrap_or(dim + 1);
            let v = random_v.then(|| sampling::haar_unitary(&mut sampling::stream(config.seed, 0), env_dim));
            let u = make_swap_deleter(*dim, env_dim, v.as_ref().map(|v| v.matrix()), tol)?;
            let file = MatrixFile::from_matrix(u.matrix());
            Ok(Outcome {
                verdict: Verdict::Affirmative,
                artifact: Artifact::Json(json!({ "config": config, "dim": file.dim, "matrix": file.matrix })),
                extra: Vec::new(),
            })
        }
        Command::Entropy { ensemble, overlap } => {
            let ens = match (ensemble, overlap) {
                (Some(path), _) => read_json::<EnsembleFile>(path)?.to_ensemble(tol)?,
                (None, Some(g)) => TwoStateSource::new(*g)?.ensemble(),
                (None, None) => TwoStateSource::forty_five_degrees().ensemble(),
            };
            entropy_report(config, &ens)
        }
        Command::Schumacher {
            overlap,
            n_list,
            rate_list,
            max_block,
        } => {
            let source = match overlap {
                Some(g) => TwoStateSource::new(*g)?,
                None => TwoStateSource::forty_five_degrees(),
            };
            let points = rate_scan(&source, n_list, rate_list, *max_block)?;
            let summary = json!({ "overlap": source.overlap(), "entropyBits": source.entropy() });
            let artifact = match config.format {
                Format::Csv => Artifact::Csv {
                    table: rate_scan_csv(&points),
                    meta: json!({ "config": config, "source": summary }),
                },
                Format::Json => Artifact::Json(json!({
                    "config": config,
                    "result": { "source": summary, "points": points },
                })),
            };
            Ok(Outcome {
                verdict: Verdict::Affirmative,
                artifact,
                extra: Vec::new(),
            })
        }
        Command::GeometryScan { a12, a23, a31, grid } => {
            let scan = xi_scan(*a12, *a23, *a31, *grid, tol)?;
            let verdict = Verdict::from_bool(scan.non_increasing_in_cos);
            let artifact = match config.format {
                Format::Csv => Artifact::Csv {
                    table: xi_scan_csv(&scan),
                    meta: json!({
                        "config": config,
                        "nonIncreasingInCos": scan.non_increasing_in_cos,
                        "nonDecreasingInCos": scan.non_decreasing_in_cos,
                        "boundaryPoints": scan.boundary_points,
                    }),
                },
                Format::Json => Artifact::Json(json!({ "config": config, "result": scan })),
            };
            Ok(Outcome {
                verdict,
                artifact,
                extra: Vec::new(),
            })
        }
        Command::Counterexample {
            budget,
            method,
            two_state,
        } => {
            if *two_state {
                let outcome = pair_dominance_counterexample(config.seed, *budget);
                let verdict = Verdict::from_bool(outcome.certificate().is_some());
                return Outcome::json(verdict, config, outcome);
            }
            let outcome = overlap_dominance_counterexample(config.seed, *budget, (*method).into(), tol);
            let verification = outcome
                .certificate()
                .map(|pair| verify_counterexample(pair, tol))
                .transpose()?;
            let verdict = Verdict::from_bool(verification.is_some_and(|v| v.valid));
            Outcome::json(
                verdict,
                config,
                json!({ "search": outcome, "verification": verification }),
            )
        }
        Command::TeleportDemo { amps, random, basis } => {
            let psi = match (amps, random) {
                (Some(a), _) => parse_qubit(a, tol)?,
                (None, true) => sampling::haar_state(&mut sampling::stream(config.seed, 0), 2),
                (None, false) => StateVector::basis(2, 0),
            };
            let basis = match basis {
                BasisArg::Bell => MeasurementBasis::Bell,
                BasisArg::Computational => MeasurementBasis::Computational,
            };
            let trace = teleport_with(&psi, basis)?;
            let independent = independence_check_with(std::slice::from_ref(&psi), basis);
            let faithful = trace.fidelities.iter().all(|f| *f >= 1.0 - 1e-10);
            Outcome::json(
                Verdict::from_bool(independent && faithful),
                config,
                json!({ "trace": trace, "independent": independent, "faithful": faithful }),
            )
        }
    }
}

fn parse_qubit(amps: &[f64], tol: &Tolerances) -> Result<StateVector> {
    if amps.len() != 4 {
        return Err(Error::Schema {
            field: "--amps".into(),
            reason: format!("expected 4 numbers re0,im0,re1,im1, found {}", amps.len()),
        });
    }
    let v = CVector::from_vec(vec![c(amps[0], amps[1]), c(amps[2], amps[3])]);
    StateVector::with_tolerance(v, tol.norm).map_err(|e| Error::Schema {
        field: "--amps".into(),
        reason: e.to_string(),
    })
}

fn entropy_report(config: &RunConfig, ens: &Ensemble) -> Result<Outcome> {
    let rho = density_matrix(ens);
    let result = json!({
        "entropyBits": von_neumann_entropy(&rho),
        "shannonBits": shannon_entropy(ens.probs()),
        "eigenvalues": rho.eigenvalues(),
    });
    Outcome::json(Verdict::Affirmative, config, result)
}

fn delete_verify(
    config: &RunConfig,
    unitary: &Path,
    states: &Path,
    recovery_out: Option<&Path>,
) -> Result<Outcome> {
    let tol = &config.tolerances;
    let psi: StateSet = read_json::<StateSetFile>(states)?.to_state_set(tol)?;
    let u = read_json::<MatrixFile>(unitary)?.to_unitary(tol)?;
    let d = psi.dim();
    if u.dim() % (d * d) != 0 || u.dim() < d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: u.dim(),
        });
    }
    let de = u.dim() / (d * d);
    let trace = is_valid_deleter(
        &u,
        &psi,
        &StateVector::basis(d, 0),
        &StateVector::basis(de, 0),
        tol,
    )?;

    let mut extra = Vec::new();
    let recovery = if trace.valid {
        match recover_deleted(&psi, &trace.environment_states, tol) {
            Ok(w) => {
                let fidelities = recovery_fidelities(&w, &psi, &trace.environment_states);
                if let Some(path) = recovery_out {
                    let file = MatrixFile::from_matrix(w.matrix());
                    let text = to_json_string(&json!({ "config": config, "dim": file.dim, "matrix": file.matrix }))?;
                    extra.push((path.to_path_buf(), text));
                }
                Some(Ok(fidelities))
            }
            Err(e @ Error::GramMismatch { .. }) => Some(Err(e.to_string())),
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let recovered = match &recovery {
        Some(Ok(f)) => f.iter().all(|x| *x >= 1.0 - tol.map),
        _ => false,
    };
    let (fidelities, recovery_error) = match recovery {
        Some(Ok(f)) => (Some(f), None),
        Some(Err(msg)) => (None, Some(msg)),
        None => (None, None),
    };
    let mut outcome = Outcome::json(
        Verdict::from_bool(trace.valid && recovered),
        config,
        json!({
            "trace": trace,
            "recovered": recovered,
            "recoveryFidelities": fidelities,
            "recoveryError": recovery_error,
        }),
    )?;
    outcome.extra = extra;
    Ok(outcome)
}
