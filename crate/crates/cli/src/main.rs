use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use syncenf::harness::{
    self, check_interface, parse_environment, render_trace, render_word_trace, EnvTrace,
};
use syncenf::program::synthetic_program;
use syncenf::{
    check_constraints, check_enforceability, explain, parse_automaton, parse_program,
    project_inputs, transform_non_enforceable, EditSets, EnvSource, RepairPolicy, Resettable,
    SafetyAutomaton, ScriptedOutputs, SimConfig, TickFunction, TransformOutcome,
};

/// Synchronous runtime enforcement of safety automata.
#[derive(Parser)]
#[command(name = "syncenf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide enforceability; exit 1 and list dead locations if not enforceable.
    Check { automaton: PathBuf },
    /// Merge dead locations into the violating state; exit 1 if impossible.
    Transform {
        automaton: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the input automaton (outputs erased).
    Project {
        automaton: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print edit sets and the repair chosen at each location.
    Explain {
        automaton: PathBuf,
        #[command(flatten)]
        repair: RepairArgs,
        #[arg(long)]
        auto_transform: bool,
    },
    /// Run the enforcer and write a tick-by-tick trace.
    Simulate {
        automaton: PathBuf,
        /// Mealy program; optional when the trace environment carries outputs.
        program: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
        /// Trace file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the enforcer constraints over all observed words up to a length.
    Verify {
        automaton: PathBuf,
        #[command(flatten)]
        repair: RepairArgs,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        #[arg(long)]
        auto_transform: bool,
        /// Directory receiving one replayable trace per failed constraint.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare per-tick time of the bare program and the enforced program.
    Bench {
        automaton: PathBuf,
        program: Option<PathBuf>,
        /// Use a synthetic program with this many parallel regions.
        #[arg(long, conflicts_with = "program")]
        synthetic: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RepairArgs {
    #[arg(long, default_value = "nearest")]
    policy: RepairPolicy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl RepairArgs {
    fn policy(&self) -> RepairPolicy {
        self.policy.with_seed(self.seed)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    repair: RepairArgs,
    #[arg(long, default_value_t = 1000)]
    ticks: u64,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,
    /// `random` or `trace:<file>`.
    #[arg(long, default_value = "random")]
    env: EnvArg,
    #[arg(long)]
    auto_transform: bool,
}

#[derive(Clone)]
enum EnvArg {
    Random,
    Trace(PathBuf),
}

impl FromStr for EnvArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(EnvArg::Random),
            _ => s
                .strip_prefix("trace:")
                .filter(|p| !p.is_empty())
                .map(|p| EnvArg::Trace(PathBuf::from(p)))
                .ok_or_else(|| format!("expected `random` or `trace:<file>`, got `{s}`")),
        }
    }
}

trait Program: TickFunction + Resettable {}
impl<T: TickFunction + Resettable> Program for T {}

/// A definite negative answer, as opposed to a failure to run.
struct Negative;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_automaton(path: &Path) -> Result<SafetyAutomaton> {
    let source = read(path)?;
    let raw = parse_automaton(&source).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    raw.normalize()
        .map_err(|e| anyhow!("{}: {e}", path.display()))
}

/// Loads an automaton that the enforcer can use, transforming it on request.
fn load_enforceable(
    path: &Path,
    auto_transform: bool,
) -> Result<Result<SafetyAutomaton, Negative>> {
    let a = load_automaton(path)?;
    let report = check_enforceability(&a);
    if report.is_enforceable() {
        return Ok(Ok(a));
    }
    let dead = report.dead_names.join(" ");
    if !auto_transform {
        eprintln!("not enforceable; dead locations: {dead} (use --auto-transform)");
        return Ok(Err(Negative));
    }
    match transform_non_enforceable(&a) {
        TransformOutcome::Transformed(t) => {
            eprintln!(
                "transformed: merged dead locations into {}",
                t.name(t.violating())
            );
            Ok(Ok(t))
        }
        TransformOutcome::NotTransformable => {
            eprintln!("not enforceable and not transformable; dead locations: {dead}");
            Ok(Err(Negative))
        }
    }
}

fn sim_config(run: &RunArgs) -> Result<SimConfig> {
    let env = match &run.env {
        EnvArg::Random => EnvSource::Random,
        EnvArg::Trace(path) => EnvSource::Trace(
            parse_environment(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))?,
        ),
    };
    Ok(SimConfig {
        ticks: run.ticks,
        runs: run.runs as usize,
        seed: run.repair.seed,
        env,
        policy: run.repair.policy(),
    })
}

fn load_program(
    a: &SafetyAutomaton,
    path: Option<&Path>,
    env: &EnvSource,
) -> Result<Box<dyn Program>> {
    match path {
        Some(path) => {
            let program =
                parse_program(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))?;
            check_interface(a, program.alphabet())?;
            Ok(Box::new(program))
        }
        None => match env {
            EnvSource::Trace(EnvTrace {
                outputs: Some(outputs),
                ..
            }) if !outputs.is_empty() => {
                for &y in outputs {
                    a.alphabet().check_output(y)?;
                }
                Ok(Box::new(ScriptedOutputs::new(outputs.clone())))
            }
            _ => bail!("a program file is required unless the trace environment lists outputs"),
        },
    }
}

fn run(cli: Cli) -> Result<Result<(), Negative>> {
    match cli.command {
        Command::Check { automaton } => {
            let a = load_automaton(&automaton)?;
            let report = check_enforceability(&a);
            if report.is_enforceable() {
                println!("enforceable");
                return Ok(Ok(()));
            }
            println!("not enforceable");
            println!("dead locations: {}", report.dead_names.join(" "));
            if let Some(w) = &report.witness {
                println!("witness: {} (reaches {})", w.prefix, a.name(w.location));
            }
            Ok(Err(Negative))
        }
        Command::Transform { automaton, out } => {
            let a = load_automaton(&automaton)?;
            match transform_non_enforceable(&a) {
                TransformOutcome::Transformed(t) => {
                    write_or_print(out.as_deref(), &t.render())?;
                    Ok(Ok(()))
                }
                TransformOutcome::NotTransformable => {
                    println!("NONE");
                    Ok(Err(Negative))
                }
            }
        }
        Command::Project { automaton, out } => {
            let a = load_automaton(&automaton)?;
            write_or_print(out.as_deref(), &project_inputs(&a).render(&a))?;
            Ok(Ok(()))
        }
        Command::Explain {
            automaton,
            repair,
            auto_transform,
        } => {
            let a = match load_enforceable(&automaton, auto_transform)? {
                Ok(a) => a,
                Err(n) => return Ok(Err(n)),
            };
            let sets = EditSets::compute(&a, &project_inputs(&a));
            print!("{}", explain(&sets, repair.policy())?);
            Ok(Ok(()))
        }
        Command::Simulate {
            automaton,
            program,
            run,
            out,
        } => {
            let a = match load_enforceable(&automaton, run.auto_transform)? {
                Ok(a) => a,
                Err(n) => return Ok(Err(n)),
            };
            let config = sim_config(&run)?;
            let mut program = load_program(&a, program.as_deref(), &config.env)?;
            let sim = harness::simulate(&a, program.as_mut(), &config)?;
            write_or_print(out.as_deref(), &render_trace(&a, &sim.records))?;
            if out.is_some() {
                println!("{}", sim.summary);
            } else {
                eprintln!("{}", sim.summary);
            }
            Ok(Ok(()))
        }
        Command::Verify {
            automaton,
            repair,
            max_len,
            auto_transform,
            out,
        } => {
            let a = match load_enforceable(&automaton, auto_transform)? {
                Ok(a) => a,
                Err(n) => return Ok(Err(n)),
            };
            let report = check_constraints(&a, repair.policy(), max_len)?;
            println!("{report}");
            if let Some(dir) = out {
                fs::create_dir_all(&dir)
                    .with_context(|| format!("cannot create {}", dir.display()))?;
                for (c, w) in report.failures() {
                    let name = c.short_name().replace('\'', "prime");
                    let path = dir.join(format!("{name}.trace"));
                    write_or_print(Some(&path), &render_word_trace(w))?;
                }
            }
            Ok(if report.all_passed() {
                Ok(())
            } else {
                Err(Negative)
            })
        }
        Command::Bench {
            automaton,
            program,
            synthetic,
            run,
        } => {
            let a = match load_enforceable(&automaton, run.auto_transform)? {
                Ok(a) => a,
                Err(n) => return Ok(Err(n)),
            };
            let config = sim_config(&run)?;
            let mut program: Box<dyn Program> = match synthetic {
                Some(regions) => Box::new(synthetic_program(a.alphabet(), regions)),
                None => load_program(&a, program.as_deref(), &config.env)?,
            };
            let result = harness::bench(&a, program.as_mut(), &config)?;
            println!("{result}");
            Ok(Ok(()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Negative)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
