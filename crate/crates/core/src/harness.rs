//! Simulation and overhead measurement around the enforcer.
//!
//! Random environments draw one `next_u32` per tick from ChaCha8 seeded with
//! `seed_from_u64(seed)` and keep the low `|I|` bits, which is uniform over
//! the input vectors.

use std::fmt::{self, Write as _};
use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{Alphabet, Bits, Event, Word};
use crate::automaton::SafetyAutomaton;
use crate::document;
use crate::edit::RepairPolicy;
use crate::error::{Error, ParseError, ParseErrorKind};
use crate::program::{Resettable, TickFunction};
use crate::runtime::{Enforcer, TickRecord};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnvSource {
    Random,
    Trace(EnvTrace),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub ticks: u64,
    pub runs: usize,
    pub seed: u64,
    pub env: EnvSource,
    pub policy: RepairPolicy,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            ticks: 1000,
            runs: 5,
            seed: 0,
            env: EnvSource::Random,
            policy: RepairPolicy::Nearest,
        }
    }
}

/// `ticks` uniformly random input vectors.
pub fn random_environment(alphabet: &Alphabet, seed: u64, ticks: u64) -> Vec<Bits> {
    let width = alphabet.input_width();
    let mask = (1u32 << width) - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..ticks)
        .map(|_| Bits::new(rng.next_u32() & mask, width))
        .collect()
}

/// Inputs replayed from a file, with the program's outputs when every line
/// carries one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvTrace {
    pub inputs: Vec<Bits>,
    pub outputs: Option<Vec<Bits>>,
}

impl EnvTrace {
    pub fn from_word(word: &Word) -> Self {
        EnvTrace {
            inputs: word.inputs(),
            outputs: Some(word.outputs()),
        }
    }

    /// The observed word, if outputs are known.
    pub fn word(&self) -> Option<Word> {
        let outputs = self.outputs.as_ref()?;
        Some(
            self.inputs
                .iter()
                .zip(outputs)
                .map(|(&x, &y)| Event::new(x, y))
                .collect(),
        )
    }
}

/// Reads an environment file. Each line is an input vector (`10`), an event
/// (`10/1`), or a trace record whose `observed` field is used.
pub fn parse_environment(source: &str) -> Result<EnvTrace, ParseError> {
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut all_outputs = true;
    for (line, text) in document::content_lines(source) {
        let malformed = || ParseError::new(line, ParseErrorKind::MalformedTrace);
        let token = if text.contains('=') {
            text.split_whitespace()
                .find_map(|f| f.strip_prefix("observed="))
                .ok_or_else(malformed)?
        } else {
            text
        };
        if token.contains('/') {
            let ev: Event = token.parse().map_err(|_| malformed())?;
            inputs.push(ev.input);
            outputs.push(ev.output);
        } else {
            inputs.push(token.parse().map_err(|_| malformed())?);
            all_outputs = false;
        }
    }
    Ok(EnvTrace {
        inputs,
        outputs: all_outputs.then_some(outputs),
    })
}

/// One line per event, `x/y`, loadable by [`parse_environment`].
pub fn render_word_trace(word: &Word) -> String {
    word.iter().map(|e| format!("{e}\n")).collect()
}

/// Trace file contents: one record per tick.
pub fn render_trace(automaton: &SafetyAutomaton, records: &[TickRecord]) -> String {
    let mut out = String::new();
    for r in records {
        writeln!(
            out,
            "t={} observed={} released={} input_edited={} output_edited={} state={}",
            r.t,
            r.observed,
            r.released,
            u8::from(r.input_edited),
            u8::from(r.output_edited),
            automaton.name(r.state_after)
        )
        .expect("writing to a String");
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub ticks: u64,
    pub input_edits: u64,
    pub output_edits: u64,
}

impl Summary {
    pub fn of(records: &[TickRecord]) -> Self {
        Summary {
            ticks: records.len() as u64,
            input_edits: records.iter().filter(|r| r.input_edited).count() as u64,
            output_edits: records.iter().filter(|r| r.output_edited).count() as u64,
        }
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ticks: {}\ninput edits: {}\noutput edits: {}",
            self.ticks, self.input_edits, self.output_edits
        )
    }
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub records: Vec<TickRecord>,
    pub summary: Summary,
}

/// Fails unless a program was written for the automaton's interface.
pub fn check_interface(automaton: &SafetyAutomaton, program: &Alphabet) -> Result<(), Error> {
    if automaton.alphabet() == program {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch(
            "program and automaton declare different interfaces",
        ))
    }
}

/// Environment inputs for one run. Trace environments are cut to `ticks`.
pub fn environment(automaton: &SafetyAutomaton, config: &SimConfig) -> Result<Vec<Bits>, Error> {
    match &config.env {
        EnvSource::Random => Ok(random_environment(
            automaton.alphabet(),
            config.seed,
            config.ticks,
        )),
        EnvSource::Trace(trace) => {
            let limit = usize::try_from(config.ticks).unwrap_or(usize::MAX);
            let inputs: Vec<Bits> = trace.inputs.iter().copied().take(limit).collect();
            for &x in &inputs {
                automaton.alphabet().check_input(x)?;
            }
            Ok(inputs)
        }
    }
}

/// Runs the enforcer from its initial location over the configured environment.
pub fn simulate<P: TickFunction + Resettable + ?Sized>(
    automaton: &SafetyAutomaton,
    program: &mut P,
    config: &SimConfig,
) -> Result<Simulation, Error> {
    let env = environment(automaton, config)?;
    let mut enforcer = Enforcer::new(automaton.clone(), config.policy)?;
    program.reset();
    let records = enforcer.run(env, program)?;
    let summary = Summary::of(&records);
    Ok(Simulation { records, summary })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchResult {
    pub mean_tick_plain: Duration,
    pub mean_tick_enforced: Duration,
    pub increase_percent: f64,
}

impl BenchResult {
    /// Enforced minus plain per-tick time, in nanoseconds.
    pub fn overhead_nanos(&self) -> f64 {
        self.mean_tick_enforced.as_secs_f64() * 1e9 - self.mean_tick_plain.as_secs_f64() * 1e9
    }
}

impl fmt::Display for BenchResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mean tick (plain): {:.3} us\nmean tick (enforced): {:.3} us\nincrease: {:.1} %",
            self.mean_tick_plain.as_secs_f64() * 1e6,
            self.mean_tick_enforced.as_secs_f64() * 1e6,
            self.increase_percent
        )
    }
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Mean per-tick time of the bare program loop and of the enforced loop.
///
/// Both loops see the same environment and start from a reset program. One
/// warm-up run of each is discarded; the reported figure is the median over
/// `runs` of the per-run mean. Runs alternate between the two loops.
pub fn bench<P: TickFunction + Resettable + ?Sized>(
    automaton: &SafetyAutomaton,
    program: &mut P,
    config: &SimConfig,
) -> Result<BenchResult, Error> {
    let env = environment(automaton, config)?;
    let mut enforcer = Enforcer::new(automaton.clone(), config.policy)?;
    let ticks = env.len().max(1) as f64;

    let plain_run = |program: &mut P| {
        program.reset();
        let start = Instant::now();
        for &x in &env {
            black_box(program.tick(black_box(x)));
        }
        start.elapsed().as_secs_f64() / ticks
    };
    let mut enforced_run = |program: &mut P| -> Result<f64, Error> {
        program.reset();
        enforcer.reset();
        let start = Instant::now();
        for &x in &env {
            black_box(enforcer.tick(black_box(x), program)?);
        }
        Ok(start.elapsed().as_secs_f64() / ticks)
    };

    plain_run(program);
    enforced_run(program)?;
    let mut plain = Vec::with_capacity(config.runs);
    let mut enforced = Vec::with_capacity(config.runs);
    for _ in 0..config.runs.max(1) {
        plain.push(plain_run(program));
        enforced.push(enforced_run(program)?);
    }
    let mean_tick_plain = Duration::from_secs_f64(median(plain));
    let mean_tick_enforced = Duration::from_secs_f64(median(enforced));
    let plain = mean_tick_plain.as_secs_f64();
    let increase_percent = if plain > 0.0 {
        (mean_tick_enforced.as_secs_f64() - plain) / plain * 100.0
    } else {
        f64::INFINITY
    };
    Ok(BenchResult {
        mean_tick_plain,
        mean_tick_enforced,
        increase_percent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::program::{MealyProgram, ScriptedOutputs};

    #[test]
    fn random_environment_is_reproducible_and_in_range() {
        let a = corpus::s1();
        let env = random_environment(a.alphabet(), 7, 500);
        assert_eq!(env, random_environment(a.alphabet(), 7, 500));
        assert_ne!(env, random_environment(a.alphabet(), 8, 500));
        assert!(env.iter().all(|x| x.width() == 2));
        for v in 0..4 {
            assert!(env.iter().any(|x| x.value() == v));
        }
    }

    #[test]
    fn null_environment_has_empty_vectors() {
        let env = random_environment(corpus::null().alphabet(), 1, 3);
        assert_eq!(env, vec![Bits::zero(0); 3]);
    }

    #[test]
    fn simulate_counts_edits() {
        let a = corpus::s1();
        let mut p = MealyProgram::constant(a.alphabet().clone(), "1".parse().unwrap());
        let sim = simulate(&a, &mut p, &SimConfig::default()).unwrap();
        assert_eq!(sim.summary.ticks, 1000);
        assert_eq!(
            sim.summary.input_edits,
            sim.records.iter().filter(|r| r.input_edited).count() as u64
        );
        assert!(sim.summary.input_edits > 0 && sim.summary.output_edits > 0);
    }

    #[test]
    fn zero_ticks_gives_empty_trace() {
        let a = corpus::s1();
        let mut p = MealyProgram::constant(a.alphabet().clone(), "0".parse().unwrap());
        let config = SimConfig {
            ticks: 0,
            ..SimConfig::default()
        };
        let sim = simulate(&a, &mut p, &config).unwrap();
        assert!(sim.records.is_empty());
        assert_eq!(render_trace(&a, &sim.records), "");
    }

    #[test]
    fn trace_rendering() {
        let a = corpus::s1();
        let mut p = ScriptedOutputs::new(vec!["1".parse().unwrap()]);
        let config = SimConfig {
            env: EnvSource::Trace(parse_environment("10\n11\n").unwrap()),
            ..SimConfig::default()
        };
        let sim = simulate(&a, &mut p, &config).unwrap();
        assert_eq!(
            render_trace(&a, &sim.records),
            "t=0 observed=10/1 released=10/1 input_edited=0 output_edited=0 state=q0\n\
             t=1 observed=11/1 released=10/1 input_edited=1 output_edited=0 state=q0\n"
        );
    }

    #[test]
    fn environment_formats() {
        let t = parse_environment("# env\n10/1\n01/0\n").unwrap();
        assert_eq!(t.word().unwrap(), "10/1 01/0".parse().unwrap());
        let t = parse_environment("10\n01/0\n").unwrap();
        assert_eq!(t.outputs, None);
        assert_eq!(t.inputs.len(), 2);
        let record = "t=0 observed=11/1 released=10/1 input_edited=1 output_edited=0 state=q0";
        let t = parse_environment(record).unwrap();
        assert_eq!(t.word().unwrap(), "11/1".parse().unwrap());
        let err = parse_environment("10\nt=1 released=10/1\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(parse_environment("1x\n").is_err());
    }

    #[test]
    fn word_trace_round_trip() {
        let w: Word = "10/1 11/0 01/1".parse().unwrap();
        let t = parse_environment(&render_word_trace(&w)).unwrap();
        assert_eq!(t, EnvTrace::from_word(&w));
    }

    #[test]
    fn interface_mismatch() {
        let a = corpus::s1();
        assert!(check_interface(&a, corpus::abo_program().alphabet()).is_err());
        assert!(check_interface(&a, a.alphabet()).is_ok());
    }

    #[test]
    fn bench_reports_consistent_figures() {
        let a = corpus::s1();
        let mut p = MealyProgram::constant(a.alphabet().clone(), "1".parse().unwrap());
        let config = SimConfig {
            ticks: 200,
            runs: 3,
            ..SimConfig::default()
        };
        let r = bench(&a, &mut p, &config).unwrap();
        let plain = r.mean_tick_plain.as_secs_f64();
        let enforced = r.mean_tick_enforced.as_secs_f64();
        if plain > 0.0 {
            let expected = (enforced - plain) / plain * 100.0;
            assert!((r.increase_percent - expected).abs() < 1e-6 * expected.abs().max(1.0));
        }
    }
}
