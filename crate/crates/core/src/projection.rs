//! Input projection of a safety automaton.

use crate::alphabet::{Alphabet, Bits};
use crate::automaton::{Location, SafetyAutomaton};
use crate::error::Error;

/// The automaton with outputs erased from its labels. Shares the location set
/// of its source and may be nondeterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputAutomaton {
    alphabet: Alphabet,
    location_count: usize,
    violating: Location,
    /// Sorted successor lists, row-major `location × input`.
    successors: Vec<Vec<Location>>,
}

/// `δ_I = {(q, x, q′) : ∃y. δ(q, (x, y)) = q′}`
pub fn project_inputs(a: &SafetyAutomaton) -> InputAutomaton {
    let alphabet = a.alphabet().clone();
    let inputs = alphabet.input_count();
    let mut successors = vec![Vec::new(); a.location_count() * inputs];
    for (q, e, target) in a.transitions() {
        successors[q.index() * inputs + e.input.value() as usize].push(target);
    }
    for s in &mut successors {
        s.sort_unstable();
        s.dedup();
    }
    InputAutomaton {
        alphabet,
        location_count: a.location_count(),
        violating: a.violating(),
        successors,
    }
}

impl InputAutomaton {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn location_count(&self) -> usize {
        self.location_count
    }

    pub fn initial(&self) -> Location {
        Location(0)
    }

    pub fn violating(&self) -> Location {
        self.violating
    }

    pub fn successors(&self, q: Location, x: Bits) -> &[Location] {
        &self.successors[q.index() * self.alphabet.input_count() + x.value() as usize]
    }

    pub fn contains(&self, q: Location, x: Bits, target: Location) -> bool {
        self.successors(q, x).binary_search(&target).is_ok()
    }

    /// Line 5 of the enforcement loop: some successor on `x` is accepting.
    pub fn has_accepting_successor(&self, q: Location, x: Bits) -> bool {
        self.successors(q, x).iter().any(|&t| t != self.violating)
    }

    pub fn is_deterministic(&self) -> bool {
        self.successors.iter().all(|s| s.len() <= 1)
    }

    /// `σ_I ⊨ φ_I`: some run from `q0` ends outside `qv`.
    pub fn accepts(&self, inputs: &[Bits]) -> Result<bool, Error> {
        let mut current = vec![false; self.location_count];
        current[0] = true;
        for &x in inputs {
            self.alphabet.check_input(x)?;
            let mut next = vec![false; self.location_count];
            for (q, _) in current.iter().enumerate().filter(|(_, &on)| on) {
                for &t in self.successors(Location(q), x) {
                    next[t.index()] = true;
                }
            }
            current = next;
        }
        Ok(current
            .iter()
            .enumerate()
            .any(|(q, &on)| on && Location(q) != self.violating))
    }

    /// `(from, x, to)` triples in location then input order.
    pub fn transitions(&self) -> impl Iterator<Item = (Location, Bits, Location)> + '_ {
        (0..self.location_count).flat_map(move |q| {
            self.alphabet.input_vectors().flat_map(move |x| {
                self.successors(Location(q), x)
                    .iter()
                    .map(move |&t| (Location(q), x, t))
            })
        })
    }

    /// Document-style rendering, one line per transition, names from `source`.
    pub fn render(&self, source: &SafetyAutomaton) -> String {
        let mut out = String::from("# input automaton\n");
        if self.alphabet.is_null() {
            out.push_str("interface: null\n");
        }
        out.push_str(&format!("inputs: {}\n", self.alphabet.inputs().join(" ")));
        let names: Vec<&str> = source.locations().map(|q| source.name(q)).collect();
        out.push_str(&format!("states: {}\n", names.join(" ")));
        out.push_str(&format!("initial: {}\n", source.name(self.initial())));
        out.push_str(&format!("violating: {}\n", source.name(self.violating)));
        for (q, x, t) in self.transitions() {
            out.push_str(&format!("{} -> {} : {x}\n", source.name(q), source.name(t)));
        }
        out
    }
}
