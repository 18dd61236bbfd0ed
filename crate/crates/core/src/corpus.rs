//! Named automata and generated automaton families used by the test suites
//! and the benchmark harness.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::Alphabet;
use crate::analysis::check_enforceability;
use crate::automaton::{RawAutomaton, SafetyAutomaton};
use crate::program::MealyProgram;

pub const S1_DOC: &str = include_str!("../data/s1.aut");
pub const ABO_DOC: &str = include_str!("../data/abo.aut");
pub const FIG4_DOC: &str = include_str!("../data/fig4.aut");
pub const FIG5A_DOC: &str = include_str!("../data/fig5a.aut");
pub const FIG5B_DOC: &str = include_str!("../data/fig5b.aut");
pub const NULL_DOC: &str = include_str!("../data/null.aut");
pub const TWO_PROPS_DOC: &str = include_str!("../data/two_props.aut");
pub const ABO_PROGRAM_DOC: &str = include_str!("../data/abo.mealy");
pub const CONST1_PROGRAM_DOC: &str = include_str!("../data/const1.mealy");
pub const NULL_PROGRAM_DOC: &str = include_str!("../data/null.mealy");

fn load(doc: &str) -> SafetyAutomaton {
    doc.parse().expect("bundled automaton is valid")
}

/// "A and B cannot happen simultaneously, and B and R cannot happen simultaneously."
pub fn s1() -> SafetyAutomaton {
    load(S1_DOC)
}

/// Every event leads to `q1`, from which every event violates.
pub fn fig4() -> SafetyAutomaton {
    load(FIG4_DOC)
}

/// Repairable non-enforceable property: `(1,1)` from `q0` reaches a dead end.
pub fn fig5a() -> SafetyAutomaton {
    load(FIG5A_DOC)
}

/// [`fig5a`] with its dead location merged into `qv`.
pub fn fig5b() -> SafetyAutomaton {
    load(FIG5B_DOC)
}

pub fn null() -> SafetyAutomaton {
    load(NULL_DOC)
}

pub fn two_props() -> SafetyAutomaton {
    load(TWO_PROPS_DOC)
}

pub fn abo_program() -> MealyProgram {
    ABO_PROGRAM_DOC.parse().expect("bundled program is valid")
}

/// All named automata with their labels.
pub fn named() -> Vec<(&'static str, SafetyAutomaton)> {
    vec![
        ("s1", s1()),
        ("abo", load(ABO_DOC)),
        ("fig4", fig4()),
        ("fig5a", fig5a()),
        ("fig5b", fig5b()),
        ("null", null()),
        ("two_props", two_props()),
    ]
}

fn interface(inputs: usize, outputs: usize) -> Alphabet {
    let ins: Vec<String> = (0..inputs).map(|i| format!("i{i}")).collect();
    let outs: Vec<String> = (0..outputs).map(|i| format!("o{i}")).collect();
    Alphabet::new(ins, outs).expect("generated names are distinct")
}

/// One accepting location where every event loops.
pub fn all_self_loop(inputs: usize, outputs: usize) -> SafetyAutomaton {
    from_table(interface(inputs, outputs), 1, |_, _| 0)
}

/// Builds and normalizes an automaton with `accepting` locations plus a trap
/// numbered `accepting`; `target(q, event_index)` gives each successor.
pub fn from_table(
    alphabet: Alphabet,
    accepting: usize,
    mut target: impl FnMut(usize, usize) -> usize,
) -> SafetyAutomaton {
    let mut names: Vec<String> = (0..accepting).map(|i| format!("q{i}")).collect();
    names.push("qv".into());
    let events = alphabet.event_count();
    let mut raw = RawAutomaton::new(alphabet, names, 0, accepting).expect("q0 is not the trap");
    for q in 0..accepting {
        for ev in 0..events {
            let t = target(q, ev);
            assert!(t <= accepting);
            let event = raw.alphabet().event_at(ev);
            raw.add_transition(q, event, t).expect("valid transition");
        }
    }
    raw.normalize().expect("q0 is accepting")
}

/// Every structurally distinct normalized automaton with at most three
/// locations (the trap included) over one input and one output, in a fixed
/// order. Includes non-enforceable ones.
pub fn exhaustive_small() -> Vec<SafetyAutomaton> {
    let alphabet = interface(1, 1);
    let events = alphabet.event_count();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for accepting in 1..=2usize {
        let slots = accepting * events;
        let choices = accepting + 1;
        let total = choices.pow(slots as u32);
        for code in 0..total {
            let a = from_table(alphabet.clone(), accepting, |q, ev| {
                (code / choices.pow((q * events + ev) as u32)) % choices
            });
            if seen.insert(a.clone()) {
                out.push(a);
            }
        }
    }
    out
}

/// Random automaton with between one and `max_accepting` accepting
/// locations; each transition enters the trap with probability `trap_bias`.
pub fn random_automaton(
    rng: &mut impl Rng,
    alphabet: &Alphabet,
    max_accepting: usize,
    trap_bias: f64,
) -> SafetyAutomaton {
    let accepting = rng.gen_range(1..=max_accepting);
    from_table(alphabet.clone(), accepting, |_, _| {
        if rng.gen_bool(trap_bias) {
            accepting
        } else {
            rng.gen_range(0..accepting)
        }
    })
}

/// `count` distinct enforceable automata with at most five locations over two
/// inputs and one output, drawn from ChaCha8 seeded with `seed`.
pub fn random_enforceable(count: usize, seed: u64) -> Vec<SafetyAutomaton> {
    random_filtered(count, seed, true)
}

/// Like [`random_enforceable`] but every automaton violates the
/// enforceability condition.
pub fn random_non_enforceable(count: usize, seed: u64) -> Vec<SafetyAutomaton> {
    random_filtered(count, seed, false)
}

fn random_filtered(count: usize, seed: u64, enforceable: bool) -> Vec<SafetyAutomaton> {
    let alphabet = interface(2, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    // Dead ends need most transitions into the trap.
    let bias = if enforceable { 0.35 } else { 0.8 };
    while out.len() < count {
        let a = random_automaton(&mut rng, &alphabet, 4, bias);
        if check_enforceability(&a).is_enforceable() == enforceable && seen.insert(a.clone()) {
            out.push(a);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_automata_parse() {
        let names: Vec<_> = named().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names.len(), 7);
    }

    #[test]
    fn exhaustive_small_is_distinct_and_bounded() {
        let all = exhaustive_small();
        assert!(all.iter().all(|a| a.location_count() <= 3));
        let unique: HashSet<_> = all.iter().collect();
        assert_eq!(unique.len(), all.len());
        // One accepting location: each of the four events loops or traps.
        let two = all.iter().filter(|a| a.location_count() == 2).count();
        assert_eq!(two, 16);
    }

    #[test]
    fn random_families_respect_filter() {
        let good = random_enforceable(10, 1);
        assert_eq!(good.len(), 10);
        assert!(good
            .iter()
            .all(|a| check_enforceability(a).is_enforceable()));
        assert!(good.iter().all(|a| a.location_count() <= 5));
        let bad = random_non_enforceable(5, 1);
        assert!(bad
            .iter()
            .all(|a| !check_enforceability(a).is_enforceable()));
        assert_eq!(random_enforceable(10, 1), good);
    }
}
