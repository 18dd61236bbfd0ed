//! Synchronous runtime enforcement of safety properties over Boolean
//! reactive interfaces.
//!
//! A property is a safety automaton over input/output bit vectors. The
//! [`Enforcer`] sits between the environment and a black-box program and, on
//! every tick, minimally repairs the input before the program runs and the
//! output after it, so that the released word never leaves the property.

pub mod alphabet;
pub mod analysis;
pub mod automaton;
pub mod corpus;
mod document;
pub mod edit;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod program;
pub mod projection;
pub mod runtime;

pub use alphabet::{Alphabet, Bits, Event, Word};
pub use analysis::{
    check_enforceability, transform_non_enforceable, EnforceabilityReport, TransformOutcome,
    Witness,
};
pub use automaton::{parse_automaton, Location, RawAutomaton, SafetyAutomaton};
pub use edit::{explain, EditSets, RepairPolicy};
pub use error::{Error, ParseError, ParseErrorKind};
pub use harness::{BenchResult, EnvSource, SimConfig, Summary};
pub use oracle::{check_constraints, oracle_enforce, Constraint, ConstraintReport};
pub use program::{parse_program, MealyProgram, Resettable, ScriptedOutputs, TickFunction};
pub use projection::{project_inputs, InputAutomaton};
pub use runtime::{enforce_word, Enforcer, TickRecord};
