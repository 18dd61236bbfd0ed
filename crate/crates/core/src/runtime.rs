//! The online bi-directional enforcer.
//!
//! Each tick reads an input, repairs it if no accepting successor exists in
//! the input automaton, calls the program exactly once with the (possibly
//! repaired) input, repairs the output if the pair would enter `qv`, releases
//! the pair and advances. The current location is always accepting and equals
//! the location reached by the released word.

use crate::alphabet::{Bits, Event, Word};
use crate::analysis::check_enforceability;
use crate::automaton::{Location, SafetyAutomaton};
use crate::edit::{EditSets, RepairKind, RepairPolicy, Repairer};
use crate::error::Error;
use crate::program::{ScriptedOutputs, TickFunction};
use crate::projection::{project_inputs, InputAutomaton};

/// One step of the enforced execution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TickRecord {
    pub t: u64,
    /// Environment input and the program's response to the released input.
    pub observed: Event,
    pub released: Event,
    pub input_edited: bool,
    pub output_edited: bool,
    pub state_after: Location,
}

#[derive(Clone, Debug)]
pub struct Enforcer {
    automaton: SafetyAutomaton,
    inputs: InputAutomaton,
    repairer: Repairer,
    state: Location,
    tick: u64,
}

impl Enforcer {
    /// Fails with the enforceability report if some accepting location is dead.
    pub fn new(automaton: SafetyAutomaton, policy: RepairPolicy) -> Result<Self, Error> {
        let report = check_enforceability(&automaton);
        if !report.is_enforceable() {
            return Err(Error::NotEnforceable(Box::new(report)));
        }
        let inputs = project_inputs(&automaton);
        let sets = EditSets::compute(&automaton, &inputs);
        let repairer = Repairer::new(sets, policy)?;
        Ok(Enforcer {
            state: automaton.initial(),
            automaton,
            inputs,
            repairer,
            tick: 0,
        })
    }

    pub fn automaton(&self) -> &SafetyAutomaton {
        &self.automaton
    }

    pub fn input_automaton(&self) -> &InputAutomaton {
        &self.inputs
    }

    pub fn repairer(&self) -> &Repairer {
        &self.repairer
    }

    pub fn state(&self) -> Location {
        self.state
    }

    /// Ticks processed so far.
    pub fn ticks(&self) -> u64 {
        self.tick
    }

    /// Back to `q0` at tick 0.
    pub fn reset(&mut self) {
        self.state = self.automaton.initial();
        self.tick = 0;
    }

    pub fn tick<P: TickFunction + ?Sized>(
        &mut self,
        x: Bits,
        program: &mut P,
    ) -> Result<TickRecord, Error> {
        let q = self.state;
        self.automaton.alphabet().check_input(x)?;

        let input_edited = !self.inputs.has_accepting_successor(q, x);
        let x_released = if input_edited {
            self.repairer.repair(q, x, RepairKind::Input)?
        } else {
            x
        };

        let y = program.tick(x_released);
        self.automaton.alphabet().check_output(y)?;

        let candidate = self.automaton.step(q, &Event::new(x_released, y));
        let output_edited = !self.automaton.is_accepting(candidate);
        let y_released = if output_edited {
            self.repairer.repair(
                q,
                y,
                RepairKind::Output {
                    context: x_released,
                },
            )?
        } else {
            y
        };

        let released = Event::new(x_released, y_released);
        let next = self.automaton.step(q, &released);
        debug_assert!(self.automaton.is_accepting(next));
        self.state = next;
        let record = TickRecord {
            t: self.tick,
            observed: Event::new(x, y),
            released,
            input_edited,
            output_edited,
            state_after: next,
        };
        self.tick += 1;
        Ok(record)
    }

    pub fn run<P: TickFunction + ?Sized>(
        &mut self,
        env: impl IntoIterator<Item = Bits>,
        program: &mut P,
    ) -> Result<Vec<TickRecord>, Error> {
        env.into_iter().map(|x| self.tick(x, program)).collect()
    }
}

/// Concatenation of the released events.
pub fn released_word(records: &[TickRecord]) -> Word {
    records.iter().map(|r| r.released).collect()
}

/// Concatenation of the observed events.
pub fn observed_word(records: &[TickRecord]) -> Word {
    records.iter().map(|r| r.observed).collect()
}

/// Enforces a complete observed word: inputs come from the word and a
/// scripted program replays its outputs, one per tick.
pub fn enforce_word(enforcer: &mut Enforcer, observed: &Word) -> Result<Word, Error> {
    enforcer.reset();
    if observed.is_empty() {
        return Ok(Word::new());
    }
    let mut program = ScriptedOutputs::new(observed.outputs());
    let records = enforcer.run(observed.inputs(), &mut program)?;
    Ok(released_word(&records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::program::MealyProgram;

    fn b(s: &str) -> Bits {
        s.parse().unwrap()
    }

    fn s1_enforcer() -> Enforcer {
        Enforcer::new(corpus::s1(), RepairPolicy::Nearest).unwrap()
    }

    #[test]
    fn fresh_enforcer_starts_at_q0() {
        let e = s1_enforcer();
        assert_eq!(e.state(), e.automaton().initial());
        assert_eq!(e.ticks(), 0);
    }

    #[test]
    fn non_enforceable_rejected_with_report() {
        match Enforcer::new(corpus::fig4(), RepairPolicy::Nearest) {
            Err(Error::NotEnforceable(report)) => assert_eq!(report.dead_names, ["q1"]),
            other => panic!("expected NotEnforceable, got {other:?}"),
        }
    }

    #[test]
    fn transformed_automaton_accepted() {
        assert!(Enforcer::new(corpus::fig5b(), RepairPolicy::Nearest).is_ok());
    }

    #[test]
    fn input_repair_keeps_output() {
        let mut e = s1_enforcer();
        let mut p = MealyProgram::constant(e.automaton().alphabet().clone(), b("1"));
        let r = e.tick(b("11"), &mut p).unwrap();
        assert_eq!(r.released, "10/1".parse().unwrap());
        assert!(r.input_edited);
        assert!(!r.output_edited);
        assert_eq!(r.observed, "11/1".parse().unwrap());
    }

    #[test]
    fn output_repair_on_b_and_r() {
        let mut e = s1_enforcer();
        let mut p = MealyProgram::constant(e.automaton().alphabet().clone(), b("1"));
        let r = e.tick(b("01"), &mut p).unwrap();
        assert_eq!(r.released, "01/0".parse().unwrap());
        assert!(!r.input_edited);
        assert!(r.output_edited);
    }

    #[test]
    fn compliant_event_untouched() {
        let mut e = s1_enforcer();
        let mut p = MealyProgram::constant(e.automaton().alphabet().clone(), b("1"));
        let r = e.tick(b("10"), &mut p).unwrap();
        assert_eq!(r.released, "10/1".parse().unwrap());
        assert!(!r.input_edited && !r.output_edited);
        assert_eq!(e.ticks(), 1);
    }

    #[test]
    fn run_reproduces_published_trace() {
        let mut e = s1_enforcer();
        let mut p = ScriptedOutputs::new(vec![b("1"), b("1"), b("0")]);
        let records = e.run([b("10"), b("11"), b("01")], &mut p).unwrap();
        let released = released_word(&records);
        assert_eq!(released, "10/1 10/1 01/0".parse().unwrap());
    }

    #[test]
    fn empty_environment() {
        let mut e = s1_enforcer();
        let mut p = ScriptedOutputs::new(vec![b("1")]);
        assert!(e.run([], &mut p).unwrap().is_empty());
        assert_eq!(enforce_word(&mut e, &Word::new()).unwrap(), Word::new());
    }

    #[test]
    fn program_sees_repaired_input() {
        let mut e = s1_enforcer();
        let mut seen = Vec::new();
        let mut p = |x: Bits| {
            seen.push(x);
            b("0")
        };
        e.tick(b("11"), &mut p).unwrap();
        assert_eq!(seen, [b("10")]);
    }

    #[test]
    fn width_mismatch_rejected() {
        let mut e = s1_enforcer();
        let mut p = |_x: Bits| b("0");
        assert!(matches!(
            e.tick(b("1"), &mut p),
            Err(Error::WidthMismatch { .. })
        ));
        let mut bad = |_x: Bits| b("00");
        assert!(matches!(
            e.tick(b("10"), &mut bad),
            Err(Error::WidthMismatch { .. })
        ));
    }
}
