use thiserror::Error;

use crate::analysis::EnforceabilityReport;

/// Failure while reading an automaton, program or trace document.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("unknown header `{0}`")]
    UnknownHeader(String),
    #[error("duplicate header `{0}`")]
    DuplicateHeader(String),
    #[error("missing `{0}` declaration")]
    MissingHeader(&'static str),
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("invalid interface: {0}")]
    Interface(String),
    #[error("malformed transition, expected `<from> -> <to> : <inputs>/<outputs>`")]
    MalformedTransition,
    #[error("{what} pattern `{pattern}` has length {found}, expected {expected}")]
    PatternLength {
        what: &'static str,
        pattern: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid character in pattern `{0}`")]
    PatternChar(String),
    #[error("violating state must be a trap (transition `{from} -> {to}`)")]
    ViolatingNotTrap { from: String, to: String },
    #[error("initial and violating state coincide")]
    InitialIsViolating,
    #[error("output of a program transition must be concrete, got `{0}`")]
    WildcardOutput(String),
    #[error("conflicting program transitions from `{state}` on input {input}")]
    ConflictingProgramTransition { state: String, input: String },
    #[error("program has no transition from `{state}` on input {input}")]
    IncompleteProgram { state: String, input: String },
    #[error("malformed trace line")]
    MalformedTrace,
}

impl ParseError {
    pub(crate) fn new(line: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, kind }
    }
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid bit vector `{0}`")]
    InvalidBits(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("interface has {0} variables, at most 16 are supported")]
    InterfaceTooWide(usize),
    #[error("inputs and outputs must be non-empty unless the interface is null")]
    EmptyInterface,
    #[error("{what} width mismatch: expected {expected}, found {found}")]
    WidthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("empty property: the initial location is violating")]
    EmptyProperty,
    #[error("word violates the property; edit sets are undefined past a violation")]
    PriorViolates,
    #[error("automaton not enforceable: {} dead location(s)", .0.dead_locations.len())]
    NotEnforceable(Box<EnforceabilityReport>),
    #[error("empty edit set at location {location}: not enforceable at runtime")]
    EmptyEditSet { location: String },
    #[error("observed vector {0} already lies in the edit set; repair is not needed")]
    RepairNotNeeded(String),
    #[error("enumeration budget exceeded: {words} words requested, budget is {budget}")]
    BudgetExceeded { words: u64, budget: u64 },
    #[error("alphabet mismatch between automaton and {0}")]
    AlphabetMismatch(&'static str),
}
