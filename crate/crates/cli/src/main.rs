//! `spin-povm`: construct, verify and search for optimal POVMs on N copies of
//! spin-J pure states.
//!
//! Every command prints one JSON object `{"manifest": …, "result": …}` on
//! stdout (or CSV with `--csv` where offered). Validation failures exit with
//! status 1 and print `{"manifest": …, "error": {"code", "message"}}`; usage
//! errors exit with status 2.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use spin_povm::bloch::{cubic_quartic_checks, pure_state_invariants, purity_residual_max, spinor_to_bloch, Spinor};
use spin_povm::catalog::{self, min_projector_bound};
use spin_povm::montecarlo::{estimate_average_fidelity, simulate, volume_check, RNG_ALGORITHM};
use spin_povm::povm::{verify, weight_sum, Povm};
use spin_povm::solver::{scan_min_n, search_povm, SearchConfig};
use spin_povm::sun_algebra::{
    anticommutator_residual, build_d_tensor, build_generator_basis, d_contraction_constant, d_identity_residuals,
};
use spin_povm::{tol, Error, Spin};

/// Worker count used when `--workers` is not given. Fixed rather than taken
/// from the machine so that default runs are reproducible everywhere.
const DEFAULT_WORKERS: usize = 4;

#[derive(Debug, Parser, Serialize)]
#[command(name = "spin-povm", version, about = "Optimal POVMs for N copies of spin-J pure states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Generalized Gell-Mann basis and structure-constant checks.
    Generators {
        #[arg(long)]
        spin: Spin,
        /// Accepted for compatibility; output is always JSON.
        #[arg(long)]
        json: bool,
    },
    /// Bloch vector and purity checks for a single state.
    VerifyState {
        #[arg(long)]
        spin: Spin,
        /// Path to a state file, or the JSON itself: {"J":"1","re":[…],"im":[…]}.
        #[arg(long)]
        state: String,
    },
    /// Moment, completeness and sampled-identity residuals of a POVM file.
    VerifyPovm {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo average fidelity of a POVM file.
    Fidelity {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_WORKERS)]
        workers: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Simulated measure-and-guess trials with a POVM file.
    Simulate {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_WORKERS)]
        workers: usize,
    },
    /// List or write the built-in POVMs.
    Catalog {
        #[arg(long, conflicts_with = "emit")]
        list: bool,
        #[arg(long)]
        emit: Option<String>,
        #[arg(long, requires = "emit")]
        out: Option<PathBuf>,
    },
    /// Lower bound on the number of elements for N = 1, 2, 3.
    Bounds {
        #[arg(long)]
        spin: Spin,
        #[arg(long)]
        copies: u32,
    },
    /// Numerical search for a POVM with a given number of elements.
    Search {
        #[arg(long)]
        spin: Spin,
        #[arg(long)]
        copies: u32,
        #[arg(long)]
        elements: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search over a range of element counts.
    Scan {
        #[arg(long)]
        spin: Spin,
        #[arg(long)]
        copies: u32,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        csv: bool,
    },
    /// Numerical vs closed-form volume of the pure-state space.
    VolumeCheck {
        /// Single dimension to check; all of 2..=6 when omitted.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 20_000)]
        points: usize,
    },
}

#[derive(Debug, Args, Serialize)]
struct SolverArgs {
    #[arg(long, default_value_t = 100)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    max_iterations: usize,
    #[arg(long)]
    enforce_weight_caps: bool,
    /// Keep going after a feasible restart is found.
    #[arg(long)]
    exhaustive: bool,
}

impl SolverArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            restarts: self.restarts,
            tolerance: self.tol,
            seed: self.seed,
            max_iterations: self.max_iterations,
            enforce_weight_caps: self.enforce_weight_caps,
            stop_at_first_feasible: !self.exhaustive,
            ..SearchConfig::default()
        }
    }
}

#[derive(Debug, Deserialize)]
struct StateRecord {
    #[serde(rename = "J")]
    spin: Spin,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Debug)]
struct Failure {
    code: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: e.code(), message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: "io_error", message: format!("{}: {e}", path.display()) }
}

enum Output {
    Json(Value),
    Csv(String),
}

fn seed_of(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::VerifyPovm { seed, .. } | Command::Fidelity { seed, .. } | Command::Simulate { seed, .. } => {
            Some(*seed)
        }
        Command::Search { solver, .. } | Command::Scan { solver, .. } => Some(solver.seed),
        _ => None,
    }
}

fn name_of(cmd: &Command) -> &'static str {
    match cmd {
        Command::Generators { .. } => "generators",
        Command::VerifyState { .. } => "verify-state",
        Command::VerifyPovm { .. } => "verify-povm",
        Command::Fidelity { .. } => "fidelity",
        Command::Simulate { .. } => "simulate",
        Command::Catalog { .. } => "catalog",
        Command::Bounds { .. } => "bounds",
        Command::Search { .. } => "search",
        Command::Scan { .. } => "scan",
        Command::VolumeCheck { .. } => "volume-check",
    }
}

fn load_povm(path: &Path) -> Result<Povm, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    Ok(Povm::from_json(&text)?)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn load_state(arg: &str) -> Result<StateRecord, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        let path = Path::new(arg);
        fs::read_to_string(path).map_err(|e| io_failure(path, e))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Malformed(e.to_string()).into())
}

fn run(cmd: &Command) -> Result<Output, Failure> {
    let out = match cmd {
        Command::Generators { spin, .. } => {
            let basis = build_generator_basis(*spin)?;
            let d = build_d_tensor(&basis)?;
            let (trace, contraction) = d_identity_residuals(&d);
            json!({
                "J": spin,
                "dim": basis.dim(),
                "generator_count": basis.len(),
                "orthonormality_residual": basis.orthonormality_residual(),
                "hermiticity_residual": basis.hermiticity_residual(),
                "d_trace_residual": trace,
                "d_contraction_residual": contraction,
                "d_contraction_constant": d_contraction_constant(*spin),
                "anticommutator_residual": anticommutator_residual(&basis, &d),
                "d_nonzero_entries": d.nnz(),
            })
        }
        Command::VerifyState { spin, state } => {
            let rec = load_state(state)?;
            if rec.spin != *spin {
                return Err(Error::SpinMismatch(spin.to_string(), rec.spin.to_string()).into());
            }
            let psi = Spinor::from_parts(*spin, &rec.re, &rec.im)?;
            let norm = psi.norm_sqr().sqrt();
            psi.check_normalized()?;
            let basis = build_generator_basis(*spin)?;
            let d = build_d_tensor(&basis)?;
            let n = spinor_to_bloch(&psi, &basis)?;
            let (cubic, quartic) = cubic_quartic_checks(&n, &d)?;
            let (cubic_expected, quartic_expected) = pure_state_invariants(*spin);
            json!({
                "J": spin,
                "norm": norm,
                "bloch": n.components(),
                "bloch_norm": n.norm(),
                "purity_residual": purity_residual_max(&n, &d)?,
                "cubic": cubic,
                "cubic_expected": cubic_expected,
                "quartic": quartic,
                "quartic_expected": quartic_expected,
            })
        }
        Command::VerifyPovm { file, samples, seed } => {
            let povm = load_povm(file)?;
            let basis = build_generator_basis(povm.spin())?;
            let d = build_d_tensor(&basis)?;
            let report = verify(&povm, &basis, &d, *samples, *seed)?;
            json!({
                "J": povm.spin(),
                "N": povm.copies(),
                "elements": povm.len(),
                "weight_sum": povm.total_weight(),
                "weight_sum_expected": weight_sum(povm.copies(), povm.spin()),
                "report": report,
                "worst_residual": report.worst(),
            })
        }
        Command::Fidelity { file, samples, seed, workers, csv } => {
            let povm = load_povm(file)?;
            let est = estimate_average_fidelity(&povm, *samples, *seed, *workers)?;
            if *csv {
                return Ok(Output::Csv(format!(
                    "mean,stderr,analytic,samples\n{},{},{},{}\n",
                    est.mean, est.stderr, est.analytic, est.samples
                )));
            }
            json!({
                "mean": est.mean,
                "stderr": est.stderr,
                "analytic": est.analytic,
                "samples": est.samples,
                "z_score": est.z_score(),
            })
        }
        Command::Simulate { file, trials, seed, workers } => {
            let povm = load_povm(file)?;
            serde_json::to_value(simulate(&povm, *trials, *seed, *workers)?).expect("serializable")
        }
        Command::Catalog { list, emit, out } => match (emit, list) {
            (Some(name), _) => {
                let povm = catalog::by_name(name)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown catalog entry {name:?}")))?;
                match out {
                    Some(path) => {
                        write_file(path, &povm.to_json())?;
                        json!({"name": name, "path": path, "elements": povm.len()})
                    }
                    None => json!({"name": name, "povm": povm.to_record()}),
                }
            }
            (None, _) => json!({ "names": catalog::NAMES }),
        },
        Command::Bounds { spin, copies } => {
            serde_json::to_value(min_projector_bound(*copies, *spin)?).expect("serializable")
        }
        Command::Search { spin, copies, elements, solver, out } => {
            let res = search_povm(*spin, *copies, *elements, &solver.config())?;
            if let Some(path) = out {
                write_file(path, &res.best.to_json())?;
            }
            json!({
                "J": spin,
                "N": copies,
                "elements": elements,
                "feasible": res.feasible,
                "best_residual": res.best_residual,
                "restarts_used": res.restarts_used,
                "method": res.method,
                "verification": res.verification,
                "trace": res.trace,
                "povm": res.best.to_record(),
            })
        }
        Command::Scan { spin, copies, from, to, solver, csv } => {
            let table = scan_min_n(*spin, *copies, *from..=*to, &solver.config())?;
            if *csv {
                let mut s = String::from("n,best_residual,feasible,restarts_used,conjectured_scaling\n");
                for r in &table.rows {
                    s.push_str(&format!(
                        "{},{},{},{},{}\n",
                        r.n, r.best_residual, r.feasible, r.restarts_used, table.conjectured_scaling
                    ));
                }
                return Ok(Output::Csv(s));
            }
            serde_json::to_value(table).expect("serializable")
        }
        Command::VolumeCheck { dim, points } => {
            let dims: Vec<usize> = match dim {
                Some(d) => vec![*d],
                None => (2..=6).collect(),
            };
            let rows = dims
                .into_iter()
                .map(|d| {
                    let (numeric, analytic) = volume_check(d, *points)?;
                    Ok(json!({
                        "dim": d,
                        "numeric": numeric,
                        "analytic": analytic,
                        "relative_error": ((numeric - analytic) / analytic).abs(),
                    }))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            json!({ "volumes": rows })
        }
    };
    Ok(Output::Json(out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = run(&cli.command);
    let manifest = json!({
        "command": name_of(&cli.command),
        "config": &cli.command,
        "seed": seed_of(&cli.command),
        "rng": RNG_ALGORITHM,
        "version": env!("CARGO_PKG_VERSION"),
        "max_symmetric_dim": tol::max_symmetric_dim(),
        "duration_ms": start.elapsed().as_secs_f64() * 1e3,
    });
    match outcome {
        Ok(Output::Json(result)) => {
            println!("{}", serde_json::to_string_pretty(&json!({"manifest": manifest, "result": result})).unwrap());
            ExitCode::SUCCESS
        }
        Ok(Output::Csv(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            let body = json!({"manifest": manifest, "error": {"code": f.code, "message": f.message}});
            println!("{}", serde_json::to_string_pretty(&body).unwrap());
            ExitCode::from(1)
        }
    }
}
