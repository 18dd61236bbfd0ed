//! Black-box synchronous programs driven one tick at a time.

use std::collections::HashMap;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{Alphabet, Bits};
use crate::document::{self, InterfaceHeaders};
use crate::error::{Error, ParseError, ParseErrorKind};

/// The program's per-tick entry point: one input vector in, one output vector out.
pub trait TickFunction {
    fn tick(&mut self, input: Bits) -> Bits;
}

impl<F: FnMut(Bits) -> Bits> TickFunction for F {
    fn tick(&mut self, input: Bits) -> Bits {
        self(input)
    }
}

/// Programs that can be put back into their initial state.
pub trait Resettable {
    fn reset(&mut self);
}

/// Deterministic, total Mealy machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MealyProgram {
    alphabet: Alphabet,
    names: Vec<String>,
    initial: usize,
    /// Row-major `state × input` → `(next state, output)`.
    table: Vec<(usize, Bits)>,
    current: usize,
}

impl MealyProgram {
    /// Builds a machine from a total transition function.
    pub fn from_fn(
        alphabet: Alphabet,
        states: usize,
        mut f: impl FnMut(usize, Bits) -> (usize, Bits),
    ) -> Self {
        assert!(states > 0);
        let mut table = Vec::with_capacity(states * alphabet.input_count());
        for s in 0..states {
            for x in alphabet.input_vectors() {
                let (t, y) = f(s, x);
                assert!(t < states && y.width() == alphabet.output_width());
                table.push((t, y));
            }
        }
        MealyProgram {
            alphabet,
            names: (0..states).map(|i| format!("s{i}")).collect(),
            initial: 0,
            table,
            current: 0,
        }
    }

    /// Single-state machine that always emits `output`.
    pub fn constant(alphabet: Alphabet, output: Bits) -> Self {
        Self::from_fn(alphabet, 1, |_, _| (0, output))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self) -> &str {
        &self.names[self.current]
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        document::render_interface(&mut out, &self.alphabet);
        out.push_str(&format!("states: {}\n", self.names.join(" ")));
        out.push_str(&format!("initial: {}\n", self.names[self.initial]));
        let n = self.alphabet.input_count();
        for (i, &(t, y)) in self.table.iter().enumerate() {
            let x = Bits::new((i % n) as u32, self.alphabet.input_width());
            out.push_str(&format!(
                "{} -> {} : {x} / {y}\n",
                self.names[i / n],
                self.names[t]
            ));
        }
        out
    }
}

impl TickFunction for MealyProgram {
    fn tick(&mut self, input: Bits) -> Bits {
        let (next, out) =
            self.table[self.current * self.alphabet.input_count() + input.value() as usize];
        self.current = next;
        out
    }
}

impl Resettable for MealyProgram {
    fn reset(&mut self) {
        self.current = self.initial;
    }
}

/// Parses a program document (`s0 -> s1 : 10 / 1`). Input patterns may use
/// `-`; outputs must be concrete.
pub fn parse_program(source: &str) -> Result<MealyProgram, ParseError> {
    let mut iface = InterfaceHeaders::default();
    let mut states: Option<Vec<String>> = None;
    let mut initial: Option<String> = None;
    let mut pending = Vec::new();
    let mut last_line = 0;
    for (line, text) in document::content_lines(source) {
        last_line = line;
        if let Some((key, value)) = document::header(text) {
            if iface.accept(key, value, line)? {
                continue;
            }
            match key {
                "states" => document::set_once(
                    &mut states,
                    value
                        .split_whitespace()
                        .map(str::to_owned)
                        .collect::<Vec<_>>(),
                    key,
                    line,
                )?,
                "initial" => document::set_once(&mut initial, value.to_owned(), key, line)?,
                _ => {
                    return Err(ParseError::new(
                        line,
                        ParseErrorKind::UnknownHeader(key.to_owned()),
                    ))
                }
            }
        } else {
            pending.push((line, text));
        }
    }
    let alphabet = iface.finish(last_line)?;
    let names = states
        .ok_or_else(|| ParseError::new(last_line, ParseErrorKind::MissingHeader("states")))?;
    let mut index = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(ParseError::new(
                last_line,
                ParseErrorKind::DuplicateState(n.clone()),
            ));
        }
    }
    let lookup = |name: &str, line| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| ParseError::new(line, ParseErrorKind::UnknownState(name.to_owned())))
    };
    let initial = initial
        .ok_or_else(|| ParseError::new(last_line, ParseErrorKind::MissingHeader("initial")))?;
    let initial = lookup(&initial, last_line)?;

    let n_in = alphabet.input_count();
    let mut table: Vec<Option<(usize, Bits)>> = vec![None; names.len() * n_in];
    for (line, text) in pending {
        let (from, to, lhs, rhs) = document::transition_parts(text)
            .ok_or_else(|| ParseError::new(line, ParseErrorKind::MalformedTransition))?;
        let from = lookup(from, line)?;
        let to = lookup(to, line)?;
        if rhs.contains('-') {
            return Err(ParseError::new(
                line,
                ParseErrorKind::WildcardOutput(rhs.to_owned()),
            ));
        }
        let ys = document::expand_pattern(rhs, alphabet.output_width(), "output", line)?;
        let y = ys[0];
        for x in document::expand_pattern(lhs, alphabet.input_width(), "input", line)? {
            let slot = &mut table[from * n_in + x.value() as usize];
            match slot {
                Some(existing) if *existing != (to, y) => {
                    return Err(ParseError::new(
                        line,
                        ParseErrorKind::ConflictingProgramTransition {
                            state: names[from].clone(),
                            input: x.to_string(),
                        },
                    ))
                }
                _ => *slot = Some((to, y)),
            }
        }
    }
    let mut full = Vec::with_capacity(table.len());
    for (i, entry) in table.into_iter().enumerate() {
        match entry {
            Some(e) => full.push(e),
            None => {
                return Err(ParseError::new(
                    last_line,
                    ParseErrorKind::IncompleteProgram {
                        state: names[i / n_in].clone(),
                        input: Bits::new((i % n_in) as u32, alphabet.input_width()).to_string(),
                    },
                ))
            }
        }
    }
    Ok(MealyProgram {
        alphabet,
        names,
        initial,
        table: full,
        current: initial,
    })
}

impl FromStr for MealyProgram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(parse_program(s)?)
    }
}

/// Emits a fixed output sequence, one element per tick, ignoring inputs.
/// Wraps around when exhausted.
#[derive(Clone, Debug)]
pub struct ScriptedOutputs {
    outputs: Vec<Bits>,
    position: usize,
}

impl ScriptedOutputs {
    pub fn new(outputs: Vec<Bits>) -> Self {
        assert!(!outputs.is_empty(), "script needs at least one output");
        ScriptedOutputs {
            outputs,
            position: 0,
        }
    }

    /// Reuses the buffer for a new script.
    pub fn load(&mut self, outputs: &[Bits]) {
        self.outputs.clear();
        self.outputs.extend_from_slice(outputs);
        self.position = 0;
    }
}

impl TickFunction for ScriptedOutputs {
    fn tick(&mut self, _input: Bits) -> Bits {
        let y = self.outputs[self.position % self.outputs.len()];
        self.position += 1;
        y
    }
}

impl Resettable for ScriptedOutputs {
    fn reset(&mut self) {
        self.position = 0;
    }
}

/// Synchronous parallel composition of Mealy regions sharing the input.
/// Region outputs are combined by XOR.
#[derive(Clone, Debug)]
pub struct ParallelProgram {
    regions: Vec<MealyProgram>,
    output_width: usize,
}

impl ParallelProgram {
    pub fn new(regions: Vec<MealyProgram>) -> Self {
        assert!(!regions.is_empty());
        let output_width = regions[0].alphabet.output_width();
        assert!(regions.iter().all(|r| r.alphabet == regions[0].alphabet));
        ParallelProgram {
            regions,
            output_width,
        }
    }

    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    /// Total number of region states, the size measure of the family.
    pub fn size(&self) -> usize {
        self.regions.iter().map(MealyProgram::state_count).sum()
    }
}

impl TickFunction for ParallelProgram {
    fn tick(&mut self, input: Bits) -> Bits {
        let acc = self
            .regions
            .iter_mut()
            .fold(0u32, |acc, r| acc ^ r.tick(input).value());
        Bits::new(acc, self.output_width)
    }
}

impl Resettable for ParallelProgram {
    fn reset(&mut self) {
        self.regions.iter_mut().for_each(Resettable::reset);
    }
}

/// Size-parameterized benchmark program: `regions` random four-state Mealy
/// regions over `alphabet`, each generated from ChaCha8 seeded with its index.
pub fn synthetic_program(alphabet: &Alphabet, regions: usize) -> ParallelProgram {
    const STATES: usize = 4;
    let regions = (0..regions.max(1))
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
            let width = alphabet.output_width();
            MealyProgram::from_fn(alphabet.clone(), STATES, |_, _| {
                let y = rng.gen_range(0..(1u32 << width));
                (rng.gen_range(0..STATES), Bits::new(y, width))
            })
        })
        .collect();
    ParallelProgram::new(regions)
}
