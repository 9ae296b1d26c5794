use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use czpulse::circuit::sequence_unitary;
use czpulse::compiler::predicted_pulse_count;
use czpulse::exact::{computational_block, equiv_up_to_global_phase};
use czpulse::gates_io::parse_gates;
use czpulse::lcu::{block_encoding_check, select_pulse_count, sweep, sweep_csv, with_pauli_durations, LcuSpec};
use czpulse::model::schedule_duration;
use czpulse::noisy::{run_trajectories, NoiseParams, RunOptions, CONVERGENCE_TOLERANCE};
use czpulse::schedule_io::{parse_schedule, write_schedule};
use czpulse::{compile, CompileOptions, Execution, LabelTable, LoweringStyle, PhysParams, TimingPolicy};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "czpulse", version, about = "Compile and simulate Cirac-Zoller multi-controlled gates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    ControlledUnitary,
    Toffoli,
}

impl From<Style> for LoweringStyle {
    fn from(s: Style) -> Self {
        match s {
            Style::ControlledUnitary => LoweringStyle::ControlledUnitary,
            Style::Toffoli => LoweringStyle::Toffoli,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// TOML table of extra unitary labels.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct Physics {
    /// Carrier Rabi frequency Ω/2π in MHz.
    #[arg(long, default_value_t = 0.2)]
    rabi_mhz: f64,
    /// Lamb-Dicke parameter.
    #[arg(long, default_value_t = 0.1)]
    lamb_dicke: f64,
    /// Duration of a target unitary, as LABEL=MICROSECONDS. Repeatable.
    /// Pauli-string labels default to (2m - 1) four-sideband blocks.
    #[arg(long = "target-duration", value_name = "LABEL=US")]
    target_durations: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Lower a gate file to a pulse schedule.
    Compile {
        gates: PathBuf,
        /// Cancel inverse pulses at gate boundaries.
        #[arg(long)]
        optimize: bool,
        #[arg(long, value_enum, default_value = "controlled-unitary")]
        style: Style,
        /// Where to write the schedule.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        physics: Physics,
        #[command(flatten)]
        common: Common,
    },
    /// Check a schedule against the ideal unitary of a gate file.
    Verify {
        schedule: PathBuf,
        gates: PathBuf,
        #[arg(long, default_value_t = 2)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Predict sideband counts from control strings alone.
    Count {
        gates: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Select-operator pulse budgets.
    Lcu {
        /// Number of terms.
        #[arg(long = "L", value_name = "L", conflicts_with = "sweep")]
        l: Option<usize>,
        /// Inclusive range of term counts, e.g. 2..1024.
        #[arg(long)]
        sweep: Option<String>,
        /// LCU term file (`coefficient label` per line) to block-encode.
        #[arg(long, conflicts_with_all = ["l", "sweep"])]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo trajectories over every computational input.
    Simulate {
        schedule: PathBuf,
        /// Gate file whose unitary is the target of one pass.
        #[arg(long)]
        ideal: PathBuf,
        /// Noise configuration (TOML); defaults to the built-in rates.
        #[arg(long)]
        noise: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        iterations: usize,
        /// Overrides n_traj from the noise file.
        #[arg(long)]
        traj: Option<usize>,
        /// Overrides seed from the noise file.
        #[arg(long)]
        seed: Option<u64>,
        /// Rerun with half the substep and compare.
        #[arg(long)]
        check_convergence: bool,
        /// Check convergence and exit with status 3 if it fails.
        #[arg(long)]
        strict: bool,
        /// Run trajectories on one thread.
        #[arg(long)]
        sequential: bool,
        /// Directory for fidelities.csv and summary.csv.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        physics: Physics,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Input(String),
    Verify(String),
    NotConverged(String),
}

impl From<czpulse::Error> for Failure {
    fn from(e: czpulse::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Run = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn labels(common: &Common) -> Result<LabelTable, Failure> {
    match &common.labels {
        Some(p) => Ok(LabelTable::parse_toml(&read(p)?)?),
        None => Ok(LabelTable::new()),
    }
}

fn physics(p: &Physics) -> Result<(PhysParams, TimingPolicy), Failure> {
    let params = PhysParams::new(2.0 * std::f64::consts::PI * p.rabi_mhz * 1e6, p.lamb_dicke, 10)?;
    let mut policy = TimingPolicy::default();
    for entry in &p.target_durations {
        let (label, us) = entry
            .split_once('=')
            .ok_or_else(|| Failure::Input(format!("`{entry}` is not LABEL=MICROSECONDS")))?;
        let us: f64 = us
            .parse()
            .map_err(|_| Failure::Input(format!("bad duration in `{entry}`")))?;
        policy = policy.with_target(label, us * 1e-6);
    }
    Ok((params, policy))
}

fn parse_range(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Input(format!("range `{s}` should look like 2..1024"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn run(cli: Cli) -> Run {
    match cli.command {
        Command::Compile {
            gates,
            optimize,
            style,
            out,
            physics: phys,
            common,
        } => {
            let table = labels(&common)?;
            let seq = parse_gates(&read(&gates)?, &table)?;
            let style = LoweringStyle::from(style);
            let s = compile(&seq, CompileOptions { optimize, style })?;
            let plain = if optimize {
                compile(&seq, CompileOptions::standard(style))?
            } else {
                s.clone()
            };
            let (params, policy) = physics(&phys)?;
            let policy = with_pauli_durations(&s, &params, policy);
            let duration = schedule_duration(&s, &params, &policy).ok();
            if let Some(path) = &out {
                write(path, &write_schedule(&s))?;
            }
            let (baseline, fin) = (plain.rsb_count(), s.rsb_count());
            let us = duration.map_or(String::new(), |d| format!("{:.3}", d * 1e6));
            Ok(match common.format {
                Format::Csv => format!(
                    "baseline,eliminated,final,pulses,duration_us\n{baseline},{},{fin},{},{us}\n",
                    baseline - fin,
                    s.len()
                ),
                Format::Text => {
                    let mut t = format!(
                        "baseline: {baseline}\neliminated: {}\nfinal: {fin}\npulses: {}\n",
                        baseline - fin,
                        s.len()
                    );
                    match duration {
                        Some(_) => {
                            let _ = writeln!(t, "duration: {us} us");
                        }
                        None => t.push_str("duration: unknown (pass --target-duration for each target label)\n"),
                    }
                    t
                }
            })
        }
        Command::Verify {
            schedule,
            gates,
            n_max,
            tolerance,
            common,
        } => {
            let table = labels(&common)?;
            let s = parse_schedule(&read(&schedule)?)?;
            let seq = parse_gates(&read(&gates)?, &table)?;
            let ideal = sequence_unitary(&seq, s.ion_count)?;
            let block = computational_block(&s, n_max, &table, Execution::default())?;
            let eq = equiv_up_to_global_phase(&block.matrix, &ideal, tolerance);
            let pass = eq.equal && block.leakage <= tolerance;
            let verdict = if pass { "pass" } else { "fail" };
            let text = match common.format {
                Format::Csv => format!(
                    "result,phase,deviation,leakage\n{verdict},{:.12},{:e},{:e}\n",
                    eq.phase, eq.deviation, block.leakage
                ),
                Format::Text => format!(
                    "{verdict}\nphase: {:.12} rad\ndeviation: {:e}\nleakage: {:e}\n",
                    eq.phase, eq.deviation, block.leakage
                ),
            };
            if pass {
                Ok(text)
            } else {
                Err(Failure::Verify(text))
            }
        }
        Command::Count { gates, common } => {
            let seq = parse_gates(&read(&gates)?, &labels(&common)?)?;
            if let Some(first) = seq.gates.first() {
                let mixed = seq
                    .gates
                    .iter()
                    .any(|g| g.control_qubits != first.control_qubits || g.target_qubits != first.target_qubits);
                if mixed {
                    return Err(Failure::Input(
                        "count needs every gate on the same control and target qubits; compile gives exact counts".into(),
                    ));
                }
            }
            let r = predicted_pulse_count(&seq.control_strings())?;
            Ok(match common.format {
                Format::Csv => r.to_csv(),
                Format::Text => format!("{r}\n"),
            })
        }
        Command::Lcu {
            l,
            sweep: range,
            spec,
            out,
            common,
        } => {
            let text = if let Some(path) = spec {
                let spec = LcuSpec::parse(&read(&path)?, &labels(&common)?)?;
                let r = select_pulse_count(spec.len().max(2))?;
                let residual = block_encoding_check(&spec)?;
                match common.format {
                    Format::Csv => format!(
                        "L,ancillas,normalization,baseline,final,residual\n{},{},{:.12},{},{},{:e}\n",
                        spec.len(),
                        spec.ancilla_count(),
                        spec.normalization(),
                        r.baseline,
                        r.final_count,
                        residual
                    ),
                    Format::Text => format!(
                        "terms: {}\nancillas: {}\nnormalization: {:.12}\nRSB pulses: {} -> {}\nblock-encoding residual: {:e}\n",
                        spec.len(),
                        spec.ancilla_count(),
                        spec.normalization(),
                        r.baseline,
                        r.final_count,
                        residual
                    ),
                }
            } else if let Some(range) = range {
                let (a, b) = parse_range(&range)?;
                let rows = sweep(a..=b)?;
                match common.format {
                    Format::Csv => sweep_csv(&rows),
                    Format::Text => rows
                        .iter()
                        .map(|r| format!("L={:<5} {} -> {} ({:.4})\n", r.l, r.baseline, r.final_count, r.ratio))
                        .collect(),
                }
            } else {
                let l = l.ok_or_else(|| Failure::Input("pass --L, --sweep or --spec".into()))?;
                let r = select_pulse_count(l)?;
                match common.format {
                    Format::Csv => sweep_csv(&sweep([l])?),
                    Format::Text => format!("L={l}: {} -> {}\n{r}\n", r.baseline, r.final_count),
                }
            };
            if let Some(path) = out {
                write(&path, &text)?;
            }
            Ok(text)
        }
        Command::Simulate {
            schedule,
            ideal,
            noise,
            iterations,
            traj,
            seed,
            check_convergence,
            strict,
            sequential,
            out_dir,
            physics: phys,
            common,
        } => {
            let table = labels(&common)?;
            let s = parse_schedule(&read(&schedule)?)?;
            let seq = parse_gates(&read(&ideal)?, &table)?;
            let u = sequence_unitary(&seq, s.ion_count)?;
            let mut noise = match noise {
                Some(p) => NoiseParams::parse_toml(&read(&p)?)?,
                None => NoiseParams::default(),
            };
            noise.n_traj = traj.unwrap_or(noise.n_traj);
            noise.seed = seed.unwrap_or(noise.seed);
            noise.validate()?;
            if iterations == 0 {
                return Err(Failure::Input("--iterations must be at least 1".into()));
            }
            let (params, policy) = physics(&phys)?;
            let policy = with_pauli_durations(&s, &params, policy);
            let opts = RunOptions {
                execution: if sequential { Execution::Sequential } else { Execution::Parallel },
                check_convergence: check_convergence || strict,
                policy,
                table,
                subgroup_width: None,
                iterations: Some(iterations),
            };
            let inputs: Vec<usize> = (0..1usize << s.ion_count).collect();
            let r = run_trajectories(&s, &params, &noise, &u, &inputs, &opts)?;
            if let Some(dir) = &out_dir {
                fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
                write(&dir.join("fidelities.csv"), &r.to_csv())?;
                write(&dir.join("summary.csv"), &r.summary_csv())?;
            }
            let text = match common.format {
                Format::Csv => r.to_csv(),
                Format::Text => r.summary(),
            };
            if strict && r.converged() == Some(false) {
                return Err(Failure::NotConverged(format!(
                    "{text}halving dt moved a fidelity by more than {} points\n",
                    100.0 * CONVERGENCE_TOLERANCE
                )));
            }
            if r.converged() == Some(false) {
                eprintln!("warning: trajectories did not converge in dt");
            }
            Ok(text)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Verify(text)) => {
            print!("{text}");
            ExitCode::from(EXIT_VERIFY_FAILED)
        }
        Err(Failure::NotConverged(text)) => {
            print!("{text}");
            eprintln!("error: not converged");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
    }
}
